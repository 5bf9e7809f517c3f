//! The three seven-qubit tomography circuits of the teleportation study.
//!
//! Layout: `A` on q1, `B` on q3, `C` on q5; SIC ancilla pairs (q0, q2) and
//! (q4, q6). `B` is tomographed on q1 after a SWAP and moved back before
//! `A` is prepared there.

use crate::error::{Result, TbsfError};
use crate::linalg::{c, identity, pauli_x, pauli_y, pauli_z, CMatrix, CVector};
use crate::qcsim::fragments::sic_bit_names;
use crate::qcsim::{doubled_sic_measurement, Circuit, NoiseSite};
use crate::tomography::Readout;
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_PI_2;

pub const QUBIT_A: usize = 1;
pub const QUBIT_B: usize = 3;
pub const QUBIT_C: usize = 5;
pub const ANCILLAS_LOW: [usize; 2] = [0, 2];
pub const ANCILLAS_HIGH: [usize; 2] = [4, 6];
pub const BELL_BITS: [&str; 2] = ["bell_a", "bell_b"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Particle {
    A,
    B,
    C,
}

impl Particle {
    pub const ALL: [Particle; 3] = [Particle::A, Particle::B, Particle::C];

    pub fn name(self) -> &'static str {
        match self {
            Particle::A => "A",
            Particle::B => "B",
            Particle::C => "C",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "A" | "a" => Ok(Particle::A),
            "B" | "b" => Ok(Particle::B),
            "C" | "c" => Ok(Particle::C),
            _ => Err(TbsfError::InvalidInput(format!("unknown particle {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BellOutcome {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl BellOutcome {
    pub const ALL: [BellOutcome; 4] = [
        BellOutcome::PhiPlus,
        BellOutcome::PhiMinus,
        BellOutcome::PsiPlus,
        BellOutcome::PsiMinus,
    ];

    /// `(bell_a, bell_b)` after CNOT(A→B) and H(A).
    pub fn bits(self) -> (u8, u8) {
        match self {
            BellOutcome::PhiPlus => (0, 0),
            BellOutcome::PhiMinus => (1, 0),
            BellOutcome::PsiPlus => (0, 1),
            BellOutcome::PsiMinus => (1, 1),
        }
    }

    /// Unitary picked up by `|ψ⟩` on its way back through the Bell measurement.
    pub fn correction(self) -> CMatrix {
        match self {
            BellOutcome::PhiPlus => identity(2),
            BellOutcome::PhiMinus => pauli_z(),
            BellOutcome::PsiPlus => pauli_x(),
            BellOutcome::PsiMinus => pauli_y(),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            BellOutcome::PhiPlus => "phi+",
            BellOutcome::PhiMinus => "phi-",
            BellOutcome::PsiPlus => "psi+",
            BellOutcome::PsiMinus => "psi-",
        }
    }
}

impl std::str::FromStr for BellOutcome {
    type Err = TbsfError;

    fn from_str(s: &str) -> Result<Self> {
        BellOutcome::ALL
            .into_iter()
            .find(|o| o.label() == s.to_ascii_lowercase())
            .ok_or_else(|| TbsfError::InvalidInput(format!("unknown Bell outcome {s:?}")))
    }
}

/// Bloch angles `(θ, φ)` with `|ψ⟩ ∝ (cos θ/2, e^{iφ} sin θ/2)`.
pub fn bloch_angles(psi: &CVector) -> (f64, f64) {
    let psi = psi.normalize();
    let theta = 2.0 * psi[0].norm().clamp(0.0, 1.0).acos();
    let phi = if psi[1].norm() < 1e-15 || psi[0].norm() < 1e-15 {
        0.0
    } else {
        psi[1].arg() - psi[0].arg()
    };
    (theta, phi)
}

/// Append `W = R_z(φ) R_x(−π/2) R_z(θ) R_x(π/2)`, which takes `|0⟩` to `|ψ⟩`
/// up to a global phase.
pub fn prepare_state(c: &mut Circuit, q: usize, psi: &CVector) {
    let (theta, phi) = bloch_angles(psi);
    c.rx(q, FRAC_PI_2).rz(q, theta).rx(q, -FRAC_PI_2).rz(q, phi);
}

/// `[√3/2, e^{iπ/4}/2]`.
pub fn default_target_state() -> CVector {
    let s = std::f64::consts::FRAC_PI_4;
    CVector::from_vec(vec![c(3f64.sqrt() / 2.0, 0.0), c(s.cos() / 2.0, s.sin() / 2.0)])
}

#[derive(Debug, Clone)]
pub struct TomographyCircuit {
    pub particle: Particle,
    pub circuit: Circuit,
    pub readout: Readout,
}

/// Circuit options beyond the target state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CircuitOptions {
    pub postselect: Option<BellOutcome>,
    /// Skip the preparation of `|ψ⟩` on A (leaves A in `|0⟩`).
    pub prepare_target: bool,
}

impl Default for CircuitOptions {
    fn default() -> Self {
        Self {
            postselect: Some(BellOutcome::PhiPlus),
            prepare_target: true,
        }
    }
}

/// Build the tomography circuit for one particle.
pub fn build_circuit(particle: Particle, psi: &CVector, opts: CircuitOptions) -> TomographyCircuit {
    let bits = sic_bit_names("");
    let mut c = Circuit::new(7);

    c.h(QUBIT_B).cnot(QUBIT_B, QUBIT_C);
    c.noise(NoiseSite::BellPrep, [QUBIT_B, QUBIT_C]);
    c.barrier();
    if particle == Particle::C {
        doubled_sic_measurement(&mut c, QUBIT_C, ANCILLAS_HIGH, bits.clone());
    }
    c.swap(QUBIT_B, QUBIT_A);
    if particle == Particle::B {
        doubled_sic_measurement(&mut c, QUBIT_A, ANCILLAS_LOW, bits.clone());
    } else {
        c.barrier();
    }
    c.swap(QUBIT_A, QUBIT_B);
    c.barrier();
    if opts.prepare_target {
        prepare_state(&mut c, QUBIT_A, psi);
    }
    if particle == Particle::A {
        doubled_sic_measurement(&mut c, QUBIT_A, ANCILLAS_LOW, bits.clone());
    }
    c.barrier();
    c.noise(NoiseSite::BellMeas, [QUBIT_A, QUBIT_B]);
    c.cnot(QUBIT_A, QUBIT_B).h(QUBIT_A);
    c.measure(QUBIT_A, BELL_BITS[0]).measure(QUBIT_B, BELL_BITS[1]);

    let postselect = opts
        .postselect
        .map(|o| {
            let (a, b) = o.bits();
            vec![(BELL_BITS[0].to_string(), a), (BELL_BITS[1].to_string(), b)]
        })
        .unwrap_or_default();
    TomographyCircuit {
        particle,
        circuit: c,
        readout: Readout {
            label_bits: bits.to_vec(),
            postselect,
        },
    }
}

pub fn build_circuits(psi: &CVector, opts: CircuitOptions) -> [TomographyCircuit; 3] {
    Particle::ALL.map(|p| build_circuit(p, psi, opts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::random_pure_state;
    use crate::qcsim::gates::{rx, rz};
    use crate::qcsim::{Gate, Op};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn prepared(psi: &CVector) -> CVector {
        let (theta, phi) = bloch_angles(psi);
        let w = rz(phi) * rx(-FRAC_PI_2) * rz(theta) * rx(FRAC_PI_2);
        w.column(0).into_owned()
    }

    #[test]
    fn preparation_reaches_target_up_to_phase() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let mut states = vec![
            default_target_state(),
            CVector::from_vec(vec![c(0.0, 0.0), c(0.0, 1.0)]),
        ];
        states.extend((0..20).map(|_| random_pure_state(2, &mut rng)));
        for psi in states {
            let overlap = psi.dotc(&prepared(&psi)).norm();
            assert!((overlap - 1.0).abs() < 1e-12);
        }
        let (theta, phi) = bloch_angles(&default_target_state());
        assert!((theta - std::f64::consts::FRAC_PI_3).abs() < 1e-12);
        assert!((phi - std::f64::consts::FRAC_PI_4).abs() < 1e-12);
    }

    #[test]
    fn bell_outcome_labels_round_trip() {
        for o in BellOutcome::ALL {
            assert_eq!(o.label().parse::<BellOutcome>().unwrap(), o);
        }
        assert!("phi".parse::<BellOutcome>().is_err());
    }

    fn swap_positions(c: &Circuit) -> Vec<usize> {
        c.ops
            .iter()
            .enumerate()
            .filter(|(_, op)| matches!(op, Op::Gate(Gate::Swap { .. })))
            .map(|(k, _)| k)
            .collect()
    }

    #[test]
    fn structure_of_the_three_circuits() {
        let psi = default_target_state();
        for tc in build_circuits(&psi, CircuitOptions::default()) {
            let c = &tc.circuit;
            c.validate().unwrap();
            assert_eq!(c.n_qubits, 7);
            assert_eq!(c.count_gates("swap"), 2);
            assert_eq!(c.count_gates("unitary"), 1);
            let swaps = swap_positions(c);
            let between = &c.ops[swaps[0] + 1..swaps[1]];
            match tc.particle {
                Particle::A | Particle::C => assert_eq!(between, &[Op::Barrier]),
                Particle::B => assert!(between.iter().any(|op| matches!(op, Op::Measure { .. }))),
            }
            // tomography of B and C is finished before A is touched after the second SWAP
            let prep_start = swaps[1] + 2;
            let last_sic = c
                .ops
                .iter()
                .rposition(|op| matches!(op, Op::Measure { bit, .. } if bit.starts_with("mu")))
                .unwrap();
            match tc.particle {
                Particle::A => assert!(last_sic > prep_start),
                _ => assert!(last_sic < prep_start),
            }
            assert_eq!(c.bit_names().len(), 6);
        }
    }

    #[test]
    fn postselection_bits_follow_outcome() {
        let psi = default_target_state();
        let opts = CircuitOptions {
            postselect: Some(BellOutcome::PsiMinus),
            prepare_target: true,
        };
        let tc = build_circuit(Particle::B, &psi, opts);
        assert_eq!(
            tc.readout.postselect,
            vec![("bell_a".to_string(), 1), ("bell_b".to_string(), 1)]
        );
        let none = build_circuit(
            Particle::B,
            &psi,
            CircuitOptions {
                postselect: None,
                prepare_target: true,
            },
        );
        assert!(none.readout.postselect.is_empty());
    }
}
