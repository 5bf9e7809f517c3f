//! Linear inversion of doubled-SIC frequencies.

use super::dataset::TomographyDataset;
use super::schemes::{sic_outcome_tensors, MeasurementConfig};
use crate::error::{Result, TbsfError};
use crate::linalg::{hermitize, project_psd, CMatrix};
use crate::state::TimeBidirectionalState;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

/// Smallest admissible singular value of the 16×16 SIC system.
pub const SINGULAR_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct LinearInversion {
    /// Flattened solution before Hermitization and PSD projection.
    pub raw: CMatrix,
    /// Whether clipping negative eigenvalues changed the estimate.
    pub projected: bool,
    pub eta: TimeBidirectionalState,
}

/// Solve `f(μ) = 2·K(μ)•η` for the flattened `η` given frequencies in SIC label order.
pub fn invert_frequencies(frequencies: &[f64]) -> Result<CMatrix> {
    let set = sic_outcome_tensors();
    if frequencies.len() != set.len() {
        return Err(TbsfError::InvalidInput(format!(
            "expected {} SIC frequencies, got {}",
            set.len(),
            frequencies.len()
        )));
    }
    let d2 = set.dim() * set.dim();
    let a = DMatrix::from_fn(set.len(), d2 * d2, |mu, e| set.tensors()[mu].flat()[e] * 2.0);
    let sv = a.clone().singular_values();
    let smallest = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if smallest < SINGULAR_TOL {
        return Err(TbsfError::SingularSystem(smallest));
    }
    let f = DVector::from_iterator(frequencies.len(), frequencies.iter().map(|&x| Complex64::new(x, 0.0)));
    let x = a.lu().solve(&f).ok_or(TbsfError::SingularSystem(smallest))?;
    Ok(CMatrix::from_iterator(d2, d2, x.iter().copied()))
}

/// Linear-inversion estimate from the SIC configuration of a dataset.
pub fn linear_inversion(data: &TomographyDataset) -> Result<LinearInversion> {
    let cc = data
        .get(MeasurementConfig::Sic)
        .ok_or_else(|| TbsfError::NotInformationallyComplete("dataset has no SIC counts".into()))?;
    let passed = cc.postselection_passed();
    if passed <= 0.0 {
        return Err(TbsfError::ZeroPostselection(passed));
    }
    let set = sic_outcome_tensors();
    let freqs = set
        .labels()
        .iter()
        .map(|l| {
            cc.labels
                .iter()
                .position(|x| x == l)
                .map(|k| cc.counts[k] / passed)
                .ok_or_else(|| TbsfError::UnknownOutcome(format!("SIC outcome {l} missing")))
        })
        .collect::<Result<Vec<_>>>()?;
    let raw = invert_frequencies(&freqs)?;
    let herm = hermitize(&raw);
    let projected_matrix = project_psd(&herm);
    let projected = crate::linalg::min_eigenvalue(&herm) < 0.0;
    let eta = TimeBidirectionalState::from_flat_normalized(projected_matrix)?;
    Ok(LinearInversion { raw, projected, eta })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{identity, max_abs, random_density, trace_distance};
    use crate::measurement::outcome_distribution;
    use crate::qcsim::NoiseModel;
    use crate::tomography::dataset::{simulate_dataset, TomographyConfig};
    use crate::tomography::schemes::Scheme;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn exact_probabilities_invert_exactly() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let set = sic_outcome_tensors();
        for rank in 1..=4 {
            let eta = TimeBidirectionalState::from_flat(random_density(4, rank, &mut rng)).unwrap();
            let p = outcome_distribution(&set, &eta).unwrap();
            let raw = invert_frequencies(&p).unwrap();
            assert!(max_abs(&(raw - eta.matrix())) < 1e-8);
        }
    }

    #[test]
    fn uniform_frequencies_give_maximally_mixed() {
        let raw = invert_frequencies(&[1.0 / 16.0; 16]).unwrap();
        assert!(max_abs(&(raw - identity(4).scale(0.25))) < 1e-12);
    }

    #[test]
    fn sampled_frequencies_are_projected_near_truth() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        // a pure η sits on the boundary, so sampling noise breaks positivity
        let eta = TimeBidirectionalState::from_flat(random_density(4, 1, &mut rng)).unwrap();
        let cfg = TomographyConfig::new(Scheme::Sic, 20_000, 4);
        let sim = simulate_dataset(&eta, &cfg, &NoiseModel::ideal()).unwrap();
        let li = linear_inversion(&sim.dataset).unwrap();
        assert!(li.projected);
        let n = sim.dataset.total_passed();
        let td = trace_distance(li.eta.matrix(), eta.matrix());
        assert!(td < 10.0 / n.sqrt(), "trace distance {td} at N = {n}");
    }
}
