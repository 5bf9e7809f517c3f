//! Least-squares fit of the Bell-pair depolarizing parameters to report metrics.

use super::circuits::BellOutcome;
use super::predictions::{ideal_prediction, noisy_prediction};
use super::report::{metric_rows, MetricRow};
use crate::error::{Result, TbsfError};
use crate::linalg::CVector;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseFit {
    pub f_pr: f64,
    pub f_ms: f64,
    /// Root-mean-square deviation over the fidelity and entropy columns.
    pub residual: f64,
}

/// RMS deviation between `observed` and the rows predicted for `(f_pr, f_ms)`.
pub fn fit_residual(observed: &[MetricRow], outcome: BellOutcome, psi: &CVector, f_pr: f64, f_ms: f64) -> Result<f64> {
    let ideal = ideal_prediction(psi, Some(outcome))?;
    let predicted = metric_rows(&noisy_prediction(outcome, f_pr, f_ms, psi)?, &ideal);
    if predicted.len() != observed.len() {
        return Err(TbsfError::InvalidInput(format!(
            "expected {} metric rows, got {}",
            predicted.len(),
            observed.len()
        )));
    }
    let mut sum = 0.0;
    for (o, p) in observed.iter().zip(&predicted) {
        if (o.particle, o.part) != (p.particle, p.part) {
            return Err(TbsfError::InvalidInput("metric rows are out of order".into()));
        }
        sum += (o.fidelity - p.fidelity).powi(2) + (o.linear_entropy - p.linear_entropy).powi(2);
    }
    Ok((sum / (2 * observed.len()) as f64).sqrt())
}

/// Grid search over `[0, 1]²` followed by a shrinking pattern search.
pub fn fit_noise(observed: &[MetricRow], outcome: BellOutcome, psi: &CVector) -> Result<NoiseFit> {
    let eval = |a: f64, b: f64| fit_residual(observed, outcome, psi, a, b);
    let mut best = NoiseFit {
        f_pr: 1.0,
        f_ms: 1.0,
        residual: eval(1.0, 1.0)?,
    };
    const GRID: usize = 20;
    for i in 0..=GRID {
        for j in 0..=GRID {
            let (a, b) = (i as f64 / GRID as f64, j as f64 / GRID as f64);
            let r = eval(a, b)?;
            if r < best.residual {
                best = NoiseFit {
                    f_pr: a,
                    f_ms: b,
                    residual: r,
                };
            }
        }
    }
    let mut h = 0.5 / GRID as f64;
    while h > 1e-7 {
        let mut improved = false;
        for (da, db) in [(h, 0.0), (-h, 0.0), (0.0, h), (0.0, -h)] {
            let (a, b) = ((best.f_pr + da).clamp(0.0, 1.0), (best.f_ms + db).clamp(0.0, 1.0));
            let r = eval(a, b)?;
            if r < best.residual {
                best = NoiseFit {
                    f_pr: a,
                    f_ms: b,
                    residual: r,
                };
                improved = true;
            }
        }
        if !improved {
            h *= 0.5;
        }
    }
    Ok(best)
}
