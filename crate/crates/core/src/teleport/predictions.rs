//! Closed-form time-bidirectional states of A, B and C.

use super::circuits::{BellOutcome, Particle};
use crate::error::{Result, TbsfError};
use crate::linalg::{identity, kron, outer, CMatrix, CVector};
use crate::state::TimeBidirectionalState;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EtaTriple {
    pub a: TimeBidirectionalState,
    pub b: TimeBidirectionalState,
    pub c: TimeBidirectionalState,
}

impl EtaTriple {
    pub fn get(&self, p: Particle) -> &TimeBidirectionalState {
        match p {
            Particle::A => &self.a,
            Particle::B => &self.b,
            Particle::C => &self.c,
        }
    }
}

fn mix() -> CMatrix {
    identity(2).scale(0.5)
}

/// `f|ψ⟩⟨ψ| + (1 − f)·1/2`.
pub fn depolarized(psi: &CVector, f: f64) -> CMatrix {
    outer(&psi.normalize()).scale(f) + mix().scale(1.0 - f)
}

fn product(forward: &CMatrix, backward: &CMatrix) -> Result<TimeBidirectionalState> {
    TimeBidirectionalState::from_flat(kron(forward, backward))
}

/// Noiseless states for a postselected Bell outcome, or without postselection.
pub fn ideal_prediction(psi: &CVector, postselect: Option<BellOutcome>) -> Result<EtaTriple> {
    let pure = outer(&psi.normalize());
    let a = product(&pure, &mix())?;
    match postselect {
        Some(o) => {
            let u = o.correction();
            let moved = &u * &pure * u.adjoint();
            Ok(EtaTriple {
                a,
                b: product(&mix(), &moved)?,
                c: product(&moved, &mix())?,
            })
        }
        None => Ok(EtaTriple {
            a,
            b: product(&mix(), &mix())?,
            c: product(&mix(), &mix())?,
        }),
    }
}

/// Depolarized Bell preparation (`f_pr`) and measurement (`f_ms`) with `Φ⁺` postselection:
/// `η_B = ρ_mix ⊗ [f_pr|ψ⟩⟨ψ| + (1−f_pr)ρ_mix]`,
/// `η_C = [f_pr f_ms|ψ⟩⟨ψ| + (1−f_pr f_ms)ρ_mix] ⊗ ρ_mix`.
pub fn analytic_noisy_prediction(f_pr: f64, f_ms: f64, psi: &CVector) -> Result<EtaTriple> {
    noisy_prediction(BellOutcome::PhiPlus, f_pr, f_ms, psi)
}

/// [`analytic_noisy_prediction`] for any postselected Bell outcome.
pub fn noisy_prediction(outcome: BellOutcome, f_pr: f64, f_ms: f64, psi: &CVector) -> Result<EtaTriple> {
    for f in [f_pr, f_ms] {
        if !(0.0..=1.0).contains(&f) {
            return Err(TbsfError::InvalidInput(format!(
                "fidelity parameter {f} outside [0, 1]"
            )));
        }
    }
    let u = outcome.correction();
    let moved = &u * psi.normalize();
    Ok(EtaTriple {
        a: product(&outer(&psi.normalize()), &mix())?,
        b: product(&mix(), &depolarized(&moved, f_pr))?,
        c: product(&depolarized(&moved, f_pr * f_ms), &mix())?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::teleport::circuits::default_target_state;
    use crate::tomography::metrics::{fidelity, linear_entropy};

    #[test]
    fn noiseless_limit_is_ideal() {
        let psi = default_target_state();
        let noisy = analytic_noisy_prediction(1.0, 1.0, &psi).unwrap();
        let ideal = ideal_prediction(&psi, Some(BellOutcome::PhiPlus)).unwrap();
        for p in Particle::ALL {
            assert!(crate::linalg::max_abs(&(noisy.get(p).matrix() - ideal.get(p).matrix())) < 1e-15);
        }
    }

    #[test]
    fn carrier_of_c_at_reference_noise() {
        let psi = default_target_state();
        let eta = analytic_noisy_prediction(0.8, 0.9, &psi).unwrap();
        let fwd = eta.c.reduced_forward();
        let f = 0.72;
        assert!((fidelity(&fwd, &outer(&psi)) - (1.0 + f) / 2.0).abs() < 1e-10);
        let want = 1.0 - (f * f + f * (1.0 - f) + (1.0 - f) * (1.0 - f) / 2.0);
        assert!((linear_entropy(&fwd) - want).abs() < 1e-12);
    }

    #[test]
    fn carrier_fidelities_are_ordered() {
        let psi = default_target_state();
        let pure = outer(&psi);
        for i in 0..=10 {
            for j in 0..=10 {
                let eta = analytic_noisy_prediction(i as f64 / 10.0, j as f64 / 10.0, &psi).unwrap();
                let fa = fidelity(&eta.a.reduced_forward(), &pure);
                let fb = fidelity(&eta.b.reduced_backward(), &pure);
                let fc = fidelity(&eta.c.reduced_forward(), &pure);
                assert!(fa >= fb - 1e-12 && fb >= fc - 1e-12);
            }
        }
    }

    #[test]
    fn out_of_range_parameters_rejected() {
        assert!(analytic_noisy_prediction(1.2, 0.5, &default_target_state()).is_err());
    }
}
