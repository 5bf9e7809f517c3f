//! Scenario definition and per-particle reconstruction.

use super::circuits::{build_circuits, default_target_state, BellOutcome, CircuitOptions, Particle, TomographyCircuit};
use crate::error::{Result, TbsfError};
use crate::linalg::CVector;
use crate::qcsim::{self, CountsRow, NoiseModel};
use crate::rng::split_seed;
use crate::state::TimeBidirectionalState;
use crate::tomography::{
    linear_inversion, mle_reconstruct, ConfigCounts, MeasurementConfig, MleOptions, TomographyDataset,
};
use rayon::prelude::*;

#[derive(Debug, Clone, PartialEq)]
pub struct TeleportScenario {
    pub target_state: CVector,
    /// `None` keeps every run.
    pub postselect: Option<BellOutcome>,
    pub shots: u64,
    pub noise: NoiseModel,
    pub seed: u64,
    pub prepare_target: bool,
}

impl Default for TeleportScenario {
    fn default() -> Self {
        Self {
            target_state: default_target_state(),
            postselect: Some(BellOutcome::PhiPlus),
            shots: 20_000,
            noise: NoiseModel::ideal(),
            seed: 0,
            prepare_target: true,
        }
    }
}

impl TeleportScenario {
    pub fn validate(&self) -> Result<()> {
        if self.target_state.len() != 2 {
            return Err(TbsfError::DimensionMismatch("target state must be a qubit".into()));
        }
        if (self.target_state.norm() - 1.0).abs() > 1e-10 {
            return Err(TbsfError::InvalidInput(format!(
                "target state has norm {}",
                self.target_state.norm()
            )));
        }
        if self.shots == 0 {
            return Err(TbsfError::InvalidInput("shots must be at least 1".into()));
        }
        self.noise.validate()
    }

    pub fn circuit_options(&self) -> CircuitOptions {
        CircuitOptions {
            postselect: self.postselect,
            prepare_target: self.prepare_target,
        }
    }

    pub fn circuits(&self) -> [TomographyCircuit; 3] {
        build_circuits(&self.target_state, self.circuit_options())
    }
}

#[derive(Debug, Clone)]
pub struct ParticleResult {
    pub particle: Particle,
    pub eta: TimeBidirectionalState,
    pub counts: ConfigCounts,
    pub converged: bool,
    pub iterations: usize,
}

impl ParticleResult {
    pub fn survival_fraction(&self) -> f64 {
        if self.counts.shots > 0.0 {
            self.counts.postselection_passed() / self.counts.shots
        } else {
            0.0
        }
    }
}

fn tally<'a>(tc: &TomographyCircuit, raw: impl IntoIterator<Item = (&'a str, f64)>) -> Result<ConfigCounts> {
    ConfigCounts::tally(MeasurementConfig::Sic, &tc.circuit, &tc.readout, raw)
}

fn estimate(particle: Particle, counts: ConfigCounts, exact: bool) -> Result<ParticleResult> {
    let data = TomographyDataset::new(vec![counts.clone()]);
    if exact {
        let li = linear_inversion(&data)?;
        Ok(ParticleResult {
            particle,
            eta: li.eta,
            counts,
            converged: true,
            iterations: 0,
        })
    } else {
        let res = mle_reconstruct(&data, &MleOptions::default())?;
        Ok(ParticleResult {
            particle,
            eta: res.eta_hat,
            counts,
            converged: res.converged,
            iterations: res.iterations,
        })
    }
}

/// Infinite-statistics path: exact outcome distributions and linear inversion.
pub fn reconstruct_exact(scenario: &TeleportScenario) -> Result<Vec<ParticleResult>> {
    scenario.validate()?;
    scenario
        .circuits()
        .par_iter()
        .map(|tc| {
            let dist = qcsim::exact_outcome_distribution(&tc.circuit, &scenario.noise)?;
            let counts = tally(tc, dist.iter().map(|(b, p)| (b.as_str(), *p)))?;
            estimate(tc.particle, counts, true)
        })
        .collect()
}

/// Raw records of `scenario.shots` runs per circuit; circuit `k` uses seed stream `k`.
pub fn sample_counts(scenario: &TeleportScenario) -> Result<Vec<CountsRow>> {
    scenario.validate()?;
    let per_circuit = scenario
        .circuits()
        .par_iter()
        .enumerate()
        .map(|(k, tc)| {
            let records = qcsim::run(
                &tc.circuit,
                &scenario.noise,
                scenario.shots,
                split_seed(scenario.seed, k as u64),
            )?;
            Ok(records
                .into_iter()
                .map(|r| CountsRow {
                    config_id: tc.particle.name().to_string(),
                    bits: r.outcome,
                    count: r.multiplicity,
                })
                .collect::<Vec<_>>())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(per_circuit.into_iter().flatten().collect())
}

/// Maximum-likelihood reconstruction from raw records keyed by particle name.
pub fn reconstruct_from_counts(scenario: &TeleportScenario, rows: &[CountsRow]) -> Result<Vec<ParticleResult>> {
    for r in rows {
        Particle::parse(&r.config_id)?;
    }
    scenario
        .circuits()
        .par_iter()
        .map(|tc| {
            let name = tc.particle.name();
            let counts = tally(
                tc,
                rows.iter()
                    .filter(|r| r.config_id == name)
                    .map(|r| (r.bits.as_str(), r.count as f64)),
            )?;
            if counts.postselection_passed() == 0.0 {
                return Err(TbsfError::ZeroPostselection(0.0));
            }
            estimate(tc.particle, counts, false)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{max_abs, outer, CMatrix};
    use crate::teleport::predictions::ideal_prediction;

    fn assert_close(a: &CMatrix, b: &CMatrix, tol: f64) {
        let d = max_abs(&(a - b));
        assert!(d < tol, "deviation {d:e}");
    }

    #[test]
    fn exact_path_reproduces_ideal_states() {
        let scenario = TeleportScenario::default();
        let res = reconstruct_exact(&scenario).unwrap();
        let ideal = ideal_prediction(&scenario.target_state, scenario.postselect).unwrap();
        for r in &res {
            assert_close(r.eta.matrix(), ideal.get(r.particle).matrix(), 1e-8);
            assert!((r.survival_fraction() - 0.25).abs() < 1e-10);
        }
    }

    #[test]
    fn unprepared_target_leaves_a_in_ground_state() {
        let scenario = TeleportScenario {
            prepare_target: false,
            ..TeleportScenario::default()
        };
        let res = reconstruct_exact(&scenario).unwrap();
        let ket0 = CVector::from_vec(vec![crate::linalg::ONE, crate::linalg::ZERO]);
        assert_close(&res[0].eta.reduced_forward(), &outer(&ket0), 1e-8);
    }

    #[test]
    fn sampling_is_seed_deterministic() {
        let scenario = TeleportScenario {
            shots: 300,
            seed: 5,
            ..TeleportScenario::default()
        };
        let a = sample_counts(&scenario).unwrap();
        let b = sample_counts(&scenario).unwrap();
        assert_eq!(a, b);
        let total: u64 = a.iter().filter(|r| r.config_id == "B").map(|r| r.count).sum();
        assert_eq!(total, 300);
    }

    #[test]
    fn unknown_particle_in_counts_is_rejected() {
        let rows = vec![CountsRow {
            config_id: "D".into(),
            bits: "000000".into(),
            count: 1,
        }];
        assert!(reconstruct_from_counts(&TeleportScenario::default(), &rows).is_err());
    }
}
