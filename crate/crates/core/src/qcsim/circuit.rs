use super::gates::Gate;
use crate::error::{Result, TbsfError};
use crate::linalg::{unitarity_error, CMatrix};
use serde::{Deserialize, Serialize};

pub const MAX_QUBITS: usize = 8;

/// Where an analytic two-qubit depolarizing channel is inserted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseSite {
    BellPrep,
    BellMeas,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Op {
    Gate(Gate),
    /// Computational-basis measurement; bit value 0 ↔ eigenvalue +1.
    Measure {
        qubit: usize,
        bit: String,
    },
    Reset {
        qubit: usize,
    },
    Barrier,
    /// `ρ ↦ fρ + (1 − f) 1/4 ⊗ Tr_{qubits} ρ` with `f` taken from the noise model.
    Noise {
        site: NoiseSite,
        qubits: [usize; 2],
    },
    /// The doubled SIC measurement applied directly through its 16 Kraus
    /// operators, recording `(μ₁, μ₂, μ₃, μ₄)` into `bits`.
    SicKraus {
        qubit: usize,
        bits: [String; 4],
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    pub n_qubits: usize,
    pub ops: Vec<Op>,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            ops: Vec::new(),
        }
    }

    pub fn push(&mut self, op: Op) -> &mut Self {
        self.ops.push(op);
        self
    }

    pub fn gate(&mut self, g: Gate) -> &mut Self {
        self.push(Op::Gate(g))
    }

    pub fn rx(&mut self, qubit: usize, theta: f64) -> &mut Self {
        self.gate(Gate::Rx { qubit, theta })
    }

    pub fn ry(&mut self, qubit: usize, theta: f64) -> &mut Self {
        self.gate(Gate::Ry { qubit, theta })
    }

    pub fn rz(&mut self, qubit: usize, theta: f64) -> &mut Self {
        self.gate(Gate::Rz { qubit, theta })
    }

    pub fn h(&mut self, qubit: usize) -> &mut Self {
        self.gate(Gate::H { qubit })
    }

    pub fn x(&mut self, qubit: usize) -> &mut Self {
        self.gate(Gate::X { qubit })
    }

    pub fn cnot(&mut self, control: usize, target: usize) -> &mut Self {
        self.gate(Gate::Cnot { control, target })
    }

    pub fn swap(&mut self, a: usize, b: usize) -> &mut Self {
        self.gate(Gate::Swap { a, b })
    }

    pub fn unitary(&mut self, qubits: Vec<usize>, matrix: CMatrix) -> &mut Self {
        self.gate(Gate::Unitary { qubits, matrix })
    }

    pub fn measure(&mut self, qubit: usize, bit: impl Into<String>) -> &mut Self {
        self.push(Op::Measure { qubit, bit: bit.into() })
    }

    pub fn reset(&mut self, qubit: usize) -> &mut Self {
        self.push(Op::Reset { qubit })
    }

    pub fn barrier(&mut self) -> &mut Self {
        self.push(Op::Barrier)
    }

    pub fn noise(&mut self, site: NoiseSite, qubits: [usize; 2]) -> &mut Self {
        self.push(Op::Noise { site, qubits })
    }

    pub fn append(&mut self, other: &Circuit) -> &mut Self {
        self.ops.extend(other.ops.iter().cloned());
        self
    }

    /// Classical bit names in order of first appearance.
    pub fn bit_names(&self) -> Vec<String> {
        let mut names = Vec::new();
        for op in &self.ops {
            match op {
                Op::Measure { bit, .. } => names.push(bit.clone()),
                Op::SicKraus { bits, .. } => names.extend(bits.iter().cloned()),
                _ => {}
            }
        }
        names
    }

    pub fn bit_index(&self, name: &str) -> Option<usize> {
        self.bit_names().iter().position(|b| b == name)
    }

    pub fn count_gates(&self, name: &str) -> usize {
        self.ops
            .iter()
            .filter(|op| matches!(op, Op::Gate(g) if g.name() == name))
            .count()
    }

    pub fn count_barriers(&self) -> usize {
        self.ops.iter().filter(|op| matches!(op, Op::Barrier)).count()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n_qubits;
        if n == 0 || n > MAX_QUBITS {
            return Err(TbsfError::InvalidCircuit(format!(
                "{n} qubits (supported: 1..={MAX_QUBITS})"
            )));
        }
        let check = |qs: &[usize]| -> Result<()> {
            for (k, &q) in qs.iter().enumerate() {
                if q >= n {
                    return Err(TbsfError::InvalidCircuit(format!("qubit {q} out of range")));
                }
                if qs[..k].contains(&q) {
                    return Err(TbsfError::InvalidCircuit(format!("qubit {q} repeated in one op")));
                }
            }
            Ok(())
        };
        for op in &self.ops {
            match op {
                Op::Gate(g) => {
                    let qs = g.qubits();
                    check(&qs)?;
                    if let Gate::Unitary { matrix, .. } = g {
                        let dim = 1usize << qs.len();
                        if matrix.nrows() != dim || matrix.ncols() != dim {
                            return Err(TbsfError::InvalidCircuit(format!(
                                "unitary on {} qubits must be {dim}x{dim}",
                                qs.len()
                            )));
                        }
                        let err = unitarity_error(matrix);
                        if err > 1e-10 {
                            return Err(TbsfError::InvalidCircuit(format!(
                                "custom gate is not unitary (deviation {err:e})"
                            )));
                        }
                    }
                }
                Op::Measure { qubit, .. } | Op::Reset { qubit } | Op::SicKraus { qubit, .. } => check(&[*qubit])?,
                Op::Noise { qubits, .. } => check(qubits)?,
                Op::Barrier => {}
            }
        }
        let names = self.bit_names();
        for (k, name) in names.iter().enumerate() {
            if names[..k].contains(name) {
                return Err(TbsfError::InvalidCircuit(format!(
                    "classical bit {name:?} written twice"
                )));
            }
        }
        Ok(())
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("circuit serializes")
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let c: Circuit = serde_json::from_str(s)?;
        c.validate()?;
        Ok(c)
    }
}
