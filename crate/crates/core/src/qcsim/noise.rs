use super::circuit::NoiseSite;
use crate::error::{Result, TbsfError};
use serde::{Deserialize, Serialize};

/// Gate-level depolarizing noise, readout flips and the two analytic
/// Bell-pair depolarizing fidelities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    /// Depolarizing probability after each single-qubit gate.
    pub p1: f64,
    /// Depolarizing probability after each two-qubit gate.
    pub p2: f64,
    /// Per-qubit `(Pr[1|0], Pr[0|1])`; qubits beyond the list read out perfectly.
    #[serde(default)]
    pub readout: Vec<(f64, f64)>,
    #[serde(default = "one")]
    pub bell_prep_f: f64,
    #[serde(default = "one")]
    pub bell_meas_f: f64,
}

fn one() -> f64 {
    1.0
}

impl Default for NoiseModel {
    fn default() -> Self {
        Self::ideal()
    }
}

impl NoiseModel {
    pub fn ideal() -> Self {
        Self {
            p1: 0.0,
            p2: 0.0,
            readout: Vec::new(),
            bell_prep_f: 1.0,
            bell_meas_f: 1.0,
        }
    }

    /// Only the Bell-pair fidelities `f_pr`, `f_ms`.
    pub fn bell(f_pr: f64, f_ms: f64) -> Self {
        Self {
            bell_prep_f: f_pr,
            bell_meas_f: f_ms,
            ..Self::ideal()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let mut all = vec![self.p1, self.p2, self.bell_prep_f, self.bell_meas_f];
        all.extend(self.readout.iter().flat_map(|&(a, b)| [a, b]));
        if all.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(TbsfError::InvalidInput("noise parameters must lie in [0, 1]".into()));
        }
        Ok(())
    }

    pub fn readout_for(&self, qubit: usize) -> (f64, f64) {
        self.readout.get(qubit).copied().unwrap_or((0.0, 0.0))
    }

    pub fn site_fidelity(&self, site: NoiseSite) -> f64 {
        match site {
            NoiseSite::BellPrep => self.bell_prep_f,
            NoiseSite::BellMeas => self.bell_meas_f,
        }
    }

    pub fn is_ideal(&self) -> bool {
        self.p1 == 0.0
            && self.p2 == 0.0
            && self.bell_prep_f == 1.0
            && self.bell_meas_f == 1.0
            && self.readout.iter().all(|&(a, b)| a == 0.0 && b == 0.0)
    }
}
