use crate::linalg::{c, from_rows, pauli_x, CMatrix, I, ONE, ZERO};
use serde::{Deserialize, Serialize};

/// Unitary gates. Angles are in radians; rotations are `exp(−iθσ/2)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "gate", rename_all = "lowercase")]
pub enum Gate {
    Rx {
        qubit: usize,
        theta: f64,
    },
    Ry {
        qubit: usize,
        theta: f64,
    },
    Rz {
        qubit: usize,
        theta: f64,
    },
    H {
        qubit: usize,
    },
    X {
        qubit: usize,
    },
    Cnot {
        control: usize,
        target: usize,
    },
    Swap {
        a: usize,
        b: usize,
    },
    /// Arbitrary unitary; `qubits[0]` is the most significant local index.
    Unitary {
        qubits: Vec<usize>,
        #[serde(with = "crate::json::complex_rows")]
        matrix: CMatrix,
    },
}

impl Gate {
    pub fn qubits(&self) -> Vec<usize> {
        match self {
            Gate::Rx { qubit, .. }
            | Gate::Ry { qubit, .. }
            | Gate::Rz { qubit, .. }
            | Gate::H { qubit }
            | Gate::X { qubit } => vec![*qubit],
            Gate::Cnot { control, target } => vec![*control, *target],
            Gate::Swap { a, b } => vec![*a, *b],
            Gate::Unitary { qubits, .. } => qubits.clone(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Gate::Rx { .. } => "rx",
            Gate::Ry { .. } => "ry",
            Gate::Rz { .. } => "rz",
            Gate::H { .. } => "h",
            Gate::X { .. } => "x",
            Gate::Cnot { .. } => "cnot",
            Gate::Swap { .. } => "swap",
            Gate::Unitary { .. } => "unitary",
        }
    }

    /// Matrix on the gate's own qubits, ordered as [`Gate::qubits`].
    pub fn matrix(&self) -> CMatrix {
        match self {
            Gate::Rx { theta, .. } => rx(*theta),
            Gate::Ry { theta, .. } => ry(*theta),
            Gate::Rz { theta, .. } => rz(*theta),
            Gate::H { .. } => hadamard(),
            Gate::X { .. } => pauli_x(),
            Gate::Cnot { .. } => cnot(),
            Gate::Swap { .. } => swap(),
            Gate::Unitary { matrix, .. } => matrix.clone(),
        }
    }
}

pub fn rx(theta: f64) -> CMatrix {
    let (s, co) = (theta / 2.0).sin_cos();
    from_rows(&[&[c(co, 0.0), -I * s], &[-I * s, c(co, 0.0)]])
}

pub fn ry(theta: f64) -> CMatrix {
    let (s, co) = (theta / 2.0).sin_cos();
    from_rows(&[&[c(co, 0.0), c(-s, 0.0)], &[c(s, 0.0), c(co, 0.0)]])
}

pub fn rz(theta: f64) -> CMatrix {
    let h = theta / 2.0;
    from_rows(&[&[c(h.cos(), -h.sin()), ZERO], &[ZERO, c(h.cos(), h.sin())]])
}

pub fn hadamard() -> CMatrix {
    let s = c(0.5f64.sqrt(), 0.0);
    from_rows(&[&[s, s], &[s, -s]])
}

/// Control is the first (most significant) qubit.
pub fn cnot() -> CMatrix {
    from_rows(&[
        &[ONE, ZERO, ZERO, ZERO],
        &[ZERO, ONE, ZERO, ZERO],
        &[ZERO, ZERO, ZERO, ONE],
        &[ZERO, ZERO, ONE, ZERO],
    ])
}

pub fn swap() -> CMatrix {
    from_rows(&[
        &[ONE, ZERO, ZERO, ZERO],
        &[ZERO, ZERO, ONE, ZERO],
        &[ZERO, ONE, ZERO, ZERO],
        &[ZERO, ZERO, ZERO, ONE],
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{max_abs, pauli_y, pauli_z, unitarity_error};
    use std::f64::consts::PI;

    #[test]
    fn gates_are_unitary() {
        for m in [rx(0.3), ry(-1.2), rz(2.5), hadamard(), cnot(), swap()] {
            assert!(unitarity_error(&m) < 1e-12);
        }
    }

    #[test]
    fn half_turns_are_paulis_up_to_phase() {
        assert!(max_abs(&(rx(PI) - pauli_x() * (-I))) < 1e-12);
        assert!(max_abs(&(ry(PI) - pauli_y() * (-I))) < 1e-12);
        assert!(max_abs(&(rz(PI) - pauli_z() * (-I))) < 1e-12);
    }

    #[test]
    fn gate_json_uses_names_and_radians() {
        let g = Gate::Ry { qubit: 2, theta: 0.5 };
        let s = serde_json::to_string(&g).unwrap();
        assert_eq!(s, r#"{"gate":"ry","qubit":2,"theta":0.5}"#);
        let back: Gate = serde_json::from_str(&s).unwrap();
        assert_eq!(back, g);
    }
}
