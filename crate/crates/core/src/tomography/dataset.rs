//! Per-configuration postselected counts and their simulation through `qcsim`.

use super::schemes::{MeasurementConfig, Scheme};
use crate::error::{Result, TbsfError};
use crate::linalg::unitary_with_first_column;
use crate::qcsim::{self, doubled_sic_measurement, nondestructive_pauli, Circuit, CountsRow, NoiseModel};
use crate::rng::split_seed;
use crate::state::TimeBidirectionalState;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TomographyConfig {
    pub scheme: Scheme,
    pub configs: Vec<MeasurementConfig>,
    /// Runs per configuration, counted before postselection.
    pub shots: u64,
    pub seed: u64,
}

impl TomographyConfig {
    pub fn new(scheme: Scheme, shots: u64, seed: u64) -> Self {
        Self {
            scheme,
            configs: MeasurementConfig::for_scheme(scheme),
            shots,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.shots == 0 {
            return Err(TbsfError::InvalidInput("shots must be at least 1".into()));
        }
        let mut sorted = self.configs.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != self.configs.len() {
            return Err(TbsfError::InvalidInput(
                "measurement configurations must be distinct".into(),
            ));
        }
        let consistent = self.configs.iter().all(|c| {
            matches!(
                (self.scheme, c),
                (Scheme::Sic, MeasurementConfig::Sic) | (Scheme::Mub, MeasurementConfig::Mub(..))
            )
        });
        if !consistent {
            return Err(TbsfError::InvalidInput(format!(
                "configurations do not belong to the {:?} scheme",
                self.scheme
            )));
        }
        Ok(())
    }
}

/// One row of a postselected dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountsRecord {
    pub config_id: String,
    pub outcome: String,
    pub count: f64,
    pub postselection_passed: f64,
}

/// Which classical bits carry the tomography outcome and which must match for postselection.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Readout {
    pub label_bits: Vec<String>,
    pub postselect: Vec<(String, u8)>,
}

impl Readout {
    /// Outcome label of a raw bit string, or `None` if it fails postselection.
    pub fn classify(&self, circuit: &Circuit, bits: &str) -> Result<Option<String>> {
        let bytes = bits.as_bytes();
        let bit = |name: &str| -> Result<u8> {
            let k = circuit
                .bit_index(name)
                .ok_or_else(|| TbsfError::InvalidCircuit(format!("circuit has no bit {name:?}")))?;
            match bytes.get(k) {
                Some(b'0') => Ok(0),
                Some(b'1') => Ok(1),
                _ => Err(TbsfError::InvalidInput(format!("malformed outcome string {bits:?}"))),
            }
        };
        if bytes.len() != circuit.bit_names().len() {
            return Err(TbsfError::InvalidInput(format!(
                "outcome {bits:?} has {} bits, circuit declares {}",
                bytes.len(),
                circuit.bit_names().len()
            )));
        }
        for (name, want) in &self.postselect {
            if bit(name)? != *want {
                return Ok(None);
            }
        }
        let label = self
            .label_bits
            .iter()
            .map(|n| bit(n).map(|b| (b'0' + b) as char))
            .collect::<Result<String>>()?;
        Ok(Some(label))
    }
}

/// Postselected outcome counts of one configuration, in the order of its outcome tensors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigCounts {
    pub config: MeasurementConfig,
    pub labels: Vec<String>,
    pub counts: Vec<f64>,
    /// Runs before postselection.
    pub shots: f64,
}

impl ConfigCounts {
    pub fn empty(config: MeasurementConfig) -> Self {
        let labels = config.outcome_tensors().labels().to_vec();
        let counts = vec![0.0; labels.len()];
        Self {
            config,
            labels,
            counts,
            shots: 0.0,
        }
    }

    pub fn postselection_passed(&self) -> f64 {
        self.counts.iter().sum()
    }

    pub fn add(&mut self, label: &str, count: f64) -> Result<()> {
        let k = self
            .labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| TbsfError::UnknownOutcome(format!("{label} in config {}", self.config.id())))?;
        self.counts[k] += count;
        Ok(())
    }

    /// Tally raw `(bits, count)` pairs of `circuit` into postselected counts.
    pub fn tally<'a>(
        config: MeasurementConfig,
        circuit: &Circuit,
        readout: &Readout,
        raw: impl IntoIterator<Item = (&'a str, f64)>,
    ) -> Result<Self> {
        let mut out = Self::empty(config);
        for (bits, count) in raw {
            if count < 0.0 {
                return Err(TbsfError::InvalidInput("negative count".into()));
            }
            out.shots += count;
            if let Some(label) = readout.classify(circuit, bits)? {
                out.add(&label, count)?;
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TomographyDataset {
    pub configs: Vec<ConfigCounts>,
    /// Configurations with no surviving runs, reported but ignored by estimators.
    pub warnings: Vec<String>,
}

impl TomographyDataset {
    pub fn new(configs: Vec<ConfigCounts>) -> Self {
        let warnings = configs
            .iter()
            .filter(|c| c.postselection_passed() == 0.0)
            .map(|c| format!("config {} has no runs surviving postselection; skipped", c.config.id()))
            .collect();
        Self { configs, warnings }
    }

    pub fn total_passed(&self) -> f64 {
        self.configs.iter().map(|c| c.postselection_passed()).sum()
    }

    pub fn survival_fraction(&self) -> f64 {
        let shots: f64 = self.configs.iter().map(|c| c.shots).sum();
        if shots > 0.0 {
            self.total_passed() / shots
        } else {
            0.0
        }
    }

    pub fn get(&self, config: MeasurementConfig) -> Option<&ConfigCounts> {
        self.configs.iter().find(|c| c.config == config)
    }

    pub fn records(&self) -> Vec<CountsRecord> {
        self.configs
            .iter()
            .flat_map(|c| {
                let passed = c.postselection_passed();
                c.labels.iter().zip(&c.counts).map(move |(l, &n)| CountsRecord {
                    config_id: c.config.id(),
                    outcome: l.clone(),
                    count: n,
                    postselection_passed: passed,
                })
            })
            .collect()
    }

    /// Counts `N · P(μ)` from exact conditional probabilities of `eta`.
    pub fn from_probabilities(
        eta: &TimeBidirectionalState,
        configs: &[MeasurementConfig],
        virtual_shots: f64,
    ) -> Result<Self> {
        let out = configs
            .iter()
            .map(|&cfg| {
                let set = cfg.outcome_tensors();
                let probs = crate::measurement::outcome_distribution(&set, eta)?;
                let mut cc = ConfigCounts::empty(cfg);
                cc.counts = probs.iter().map(|p| p * virtual_shots).collect();
                cc.shots = virtual_shots;
                Ok(cc)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::new(out))
    }
}

/// Multinomial counts drawn directly from the postselected distribution of
/// `eta`, `shots` per configuration; configuration `k` uses seed stream `k`.
pub fn sample_synthetic(
    eta: &TimeBidirectionalState,
    configs: &[MeasurementConfig],
    shots: u64,
    seed: u64,
) -> Result<TomographyDataset> {
    let counts = configs
        .iter()
        .enumerate()
        .map(|(k, &cfg)| {
            let probs = crate::measurement::outcome_distribution(&cfg.outcome_tensors(), eta)?;
            let mut rng = ChaCha8Rng::seed_from_u64(split_seed(seed, k as u64));
            let mut cc = ConfigCounts::empty(cfg);
            let mut left = shots;
            let mut mass = 1.0;
            for (slot, p) in cc.counts.iter_mut().zip(&probs) {
                let draw = if mass <= 0.0 || left == 0 {
                    0
                } else {
                    let q = (p / mass).clamp(0.0, 1.0);
                    Binomial::new(left, q).expect("valid binomial").sample(&mut rng)
                };
                *slot = draw as f64;
                left -= draw;
                mass -= p;
            }
            // rounding can leave a remainder when the last probabilities are tiny
            if left > 0 {
                let k_max = (0..probs.len())
                    .max_by(|&a, &b| probs[a].total_cmp(&probs[b]))
                    .unwrap_or(0);
                cc.counts[k_max] += left as f64;
            }
            cc.shots = shots as f64;
            Ok(cc)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TomographyDataset::new(counts))
}

/// Append the measurement fragment of `config` on `target`; returns the label bits.
pub fn append_fragment(
    c: &mut Circuit,
    config: MeasurementConfig,
    target: usize,
    ancillas: [usize; 2],
    prefix: &str,
) -> Vec<String> {
    match config {
        MeasurementConfig::Mub(r1, r2) => {
            let m1 = format!("{prefix}m1");
            let m2 = format!("{prefix}m2");
            nondestructive_pauli(c, target, r1, ancillas[0], m1.clone());
            if r1 == r2 {
                vec![m1.clone(), m1]
            } else {
                nondestructive_pauli(c, target, r2, ancillas[1], m2.clone());
                vec![m1, m2]
            }
        }
        MeasurementConfig::Sic => {
            let bits = qcsim::fragments::sic_bit_names(prefix);
            doubled_sic_measurement(c, target, ancillas, bits.clone());
            bits.to_vec()
        }
    }
}

/// Circuit realizing `eta` on a single qubit and measuring `config` on it.
///
/// Qubit 0 carries the system, qubit 1 its backward partner, qubits 2–3 a
/// purifying reference, qubits 4–5 the fragment ancillas. Postselecting
/// `Φ⁺` on (0, 1) makes the measured statistics those of `eta`.
pub fn state_source_circuit(eta: &TimeBidirectionalState, config: MeasurementConfig) -> Result<(Circuit, Readout)> {
    if eta.dim() != 2 {
        return Err(TbsfError::DimensionMismatch(format!(
            "circuit tomography is single-qubit, got dimension {}",
            eta.dim()
        )));
    }
    let v = eta.normalized()?.purify().state_vector(4);
    let mut c = Circuit::new(6);
    c.unitary(vec![0, 1, 2, 3], unitary_with_first_column(&v));
    c.barrier();
    let label_bits = append_fragment(&mut c, config, 0, [4, 5], "");
    c.barrier();
    c.cnot(0, 1).h(0).measure(0, "bell0").measure(1, "bell1");
    let readout = Readout {
        label_bits,
        postselect: vec![("bell0".into(), 0), ("bell1".into(), 0)],
    };
    Ok((c, readout))
}

/// A simulated dataset together with the raw per-run records that produced it.
#[derive(Debug, Clone)]
pub struct SimulatedDataset {
    pub dataset: TomographyDataset,
    pub raw: Vec<CountsRow>,
}

/// Sample every configuration of `config` on circuits built from `eta`.
///
/// Configuration `k` uses the seed stream `split_seed(config.seed, k)`, so
/// the result is independent of thread scheduling.
pub fn simulate_dataset(
    eta: &TimeBidirectionalState,
    config: &TomographyConfig,
    noise: &NoiseModel,
) -> Result<SimulatedDataset> {
    config.validate()?;
    noise.validate()?;
    let per_config: Vec<(ConfigCounts, Vec<CountsRow>)> = config
        .configs
        .par_iter()
        .enumerate()
        .map(|(k, &cfg)| {
            let (circuit, readout) = state_source_circuit(eta, cfg)?;
            let records = qcsim::run(&circuit, noise, config.shots, split_seed(config.seed, k as u64))?;
            let counts = ConfigCounts::tally(
                cfg,
                &circuit,
                &readout,
                records.iter().map(|r| (r.outcome.as_str(), r.multiplicity as f64)),
            )?;
            let raw = records
                .into_iter()
                .map(|r| CountsRow {
                    config_id: cfg.id(),
                    bits: r.outcome,
                    count: r.multiplicity,
                })
                .collect();
            Ok((counts, raw))
        })
        .collect::<Result<Vec<_>>>()?;
    let (counts, raw): (Vec<_>, Vec<_>) = per_config.into_iter().unzip();
    Ok(SimulatedDataset {
        dataset: TomographyDataset::new(counts),
        raw: raw.into_iter().flatten().collect(),
    })
}

/// Exact infinite-statistics dataset of the same circuits, scaled to `virtual_shots`.
pub fn exact_dataset(
    eta: &TimeBidirectionalState,
    configs: &[MeasurementConfig],
    noise: &NoiseModel,
    virtual_shots: f64,
) -> Result<TomographyDataset> {
    let counts = configs
        .par_iter()
        .map(|&cfg| {
            let (circuit, readout) = state_source_circuit(eta, cfg)?;
            let dist = qcsim::exact_outcome_distribution(&circuit, noise)?;
            ConfigCounts::tally(
                cfg,
                &circuit,
                &readout,
                dist.iter().map(|(b, p)| (b.as_str(), p * virtual_shots)),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TomographyDataset::new(counts))
}

/// Rebuild a dataset from raw records written by [`simulate_dataset`].
pub fn dataset_from_raw(
    eta_dim: usize,
    configs: &[MeasurementConfig],
    rows: &[CountsRow],
) -> Result<TomographyDataset> {
    // the circuit layout does not depend on the prepared state
    let placeholder = TimeBidirectionalState::no_postselection(&crate::linalg::identity(eta_dim).scale(0.5))?;
    let counts = configs
        .iter()
        .map(|&cfg| {
            let (circuit, readout) = state_source_circuit(&placeholder, cfg)?;
            let id = cfg.id();
            ConfigCounts::tally(
                cfg,
                &circuit,
                &readout,
                rows.iter()
                    .filter(|r| r.config_id == id)
                    .map(|r| (r.bits.as_str(), r.count as f64)),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TomographyDataset::new(counts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{identity, kron, outer, random_density, vector, ONE, ZERO};
    use crate::measurement::outcome_distribution;
    use crate::qcsim::PauliBasis;

    #[test]
    fn synthetic_counts_are_exact_in_total_and_unbiased() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let eta = TimeBidirectionalState::from_flat(random_density(4, 4, &mut rng)).unwrap();
        let data = sample_synthetic(&eta, &[MeasurementConfig::Sic], 200_000, 3).unwrap();
        let cc = &data.configs[0];
        assert_eq!(cc.postselection_passed(), 200_000.0);
        let probs = outcome_distribution(&MeasurementConfig::Sic.outcome_tensors(), &eta).unwrap();
        let chi2: f64 = cc
            .counts
            .iter()
            .zip(&probs)
            .map(|(n, p)| (n - 200_000.0 * p).powi(2) / (200_000.0 * p))
            .sum();
        // 15 degrees of freedom; 99.9th percentile is about 37.7
        assert!(chi2 < 37.7, "chi2 {chi2}");
    }

    #[test]
    fn exact_circuit_statistics_match_tensor_contraction() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let eta = TimeBidirectionalState::from_flat(random_density(4, 4, &mut rng)).unwrap();
        let mut configs = MeasurementConfig::all_mub();
        configs.push(MeasurementConfig::Sic);
        let data = exact_dataset(&eta, &configs, &NoiseModel::ideal(), 1.0).unwrap();
        for cc in &data.configs {
            let set = cc.config.outcome_tensors();
            let want = outcome_distribution(&set, &eta).unwrap();
            let passed = cc.postselection_passed();
            let postsel = 0.5 * set.total().contract(eta.tensor()).re;
            assert!(
                (passed - postsel).abs() < 1e-10,
                "{} passed {passed} vs {postsel}",
                cc.config.id()
            );
            for (n, p) in cc.counts.iter().zip(&want) {
                assert!((n / passed - p).abs() < 1e-10, "{}", cc.config.id());
            }
        }
    }

    #[test]
    fn noiseless_sic_sampling_within_three_sigma() {
        let rho = outer(&vector(&[ONE, ZERO]));
        let eta = TimeBidirectionalState::no_postselection(&rho).unwrap();
        let cfg = TomographyConfig::new(Scheme::Sic, 40_000, 1);
        let sim = simulate_dataset(&eta, &cfg, &NoiseModel::ideal()).unwrap();
        let cc = &sim.dataset.configs[0];
        let n = cc.postselection_passed();
        let set = sic_set();
        for ((label, k), &count) in set.iter().zip(&cc.counts) {
            let p = 2.0 * k.contract(eta.tensor()).re;
            let sigma = (p * (1.0 - p) / n).sqrt();
            assert!(
                (count / n - p).abs() <= 3.0 * sigma + 1e-12,
                "{label}: {} vs {p}",
                count / n
            );
        }
    }

    fn sic_set() -> crate::measurement::OutcomeTensorSet {
        MeasurementConfig::Sic.outcome_tensors()
    }

    #[test]
    fn zero_postselection_config_is_flagged() {
        let ket0 = vector(&[ONE, ZERO]);
        let ket1 = vector(&[ZERO, ONE]);
        let eta = TimeBidirectionalState::from_flat(kron(&outer(&ket0), &outer(&ket1))).unwrap();
        let cfg = TomographyConfig {
            scheme: Scheme::Mub,
            configs: vec![MeasurementConfig::Mub(PauliBasis::Z, PauliBasis::Z)],
            shots: 2000,
            seed: 9,
        };
        let sim = simulate_dataset(&eta, &cfg, &NoiseModel::ideal()).unwrap();
        assert_eq!(sim.dataset.configs[0].postselection_passed(), 0.0);
        assert_eq!(sim.dataset.warnings.len(), 1);
    }

    #[test]
    fn simulation_is_seed_deterministic_and_raw_rows_rebuild_it() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let eta = TimeBidirectionalState::from_flat(random_density(4, 2, &mut rng)).unwrap();
        let cfg = TomographyConfig::new(Scheme::Mub, 500, 77);
        let a = simulate_dataset(&eta, &cfg, &NoiseModel::ideal()).unwrap();
        let b = simulate_dataset(&eta, &cfg, &NoiseModel::ideal()).unwrap();
        assert_eq!(qcsim::io::counts_to_string(&a.raw), qcsim::io::counts_to_string(&b.raw));
        let rebuilt = dataset_from_raw(2, &cfg.configs, &a.raw).unwrap();
        assert_eq!(rebuilt, a.dataset);
        for cc in &a.dataset.configs {
            assert_eq!(cc.shots, 500.0);
        }
    }

    #[test]
    fn config_validation() {
        let mut cfg = TomographyConfig::new(Scheme::Mub, 10, 0);
        assert!(cfg.validate().is_ok());
        cfg.configs.push(cfg.configs[0]);
        assert!(cfg.validate().is_err());
        assert!(TomographyConfig::new(Scheme::Sic, 0, 0).validate().is_err());
        let mixed = TomographyConfig {
            scheme: Scheme::Sic,
            configs: vec![MeasurementConfig::Mub(PauliBasis::X, PauliBasis::Y)],
            shots: 1,
            seed: 0,
        };
        assert!(mixed.validate().is_err());
    }

    #[test]
    fn records_sum_to_passed() {
        let eta = TimeBidirectionalState::no_postselection(&identity(2).scale(0.5)).unwrap();
        let data = TomographyDataset::from_probabilities(&eta, &MeasurementConfig::all_mub(), 1000.0).unwrap();
        for cc in &data.configs {
            let recs: Vec<_> = data
                .records()
                .into_iter()
                .filter(|r| r.config_id == cc.config.id())
                .collect();
            let sum: f64 = recs.iter().map(|r| r.count).sum();
            assert!((sum - recs[0].postselection_passed).abs() < 1e-9);
        }
    }
}
