//! Branch-tree execution of circuits.
//!
//! Every measurement splits each live branch by the *recorded* bit value.
//! The exact path carries probabilities; the sampling path carries shot
//! counts split binomially, so a run of `N` shots costs one density-matrix
//! evolution per distinct record rather than per shot.

use super::circuit::{Circuit, Op};
use super::density::DensityMatrix;
use super::fragments::sic_kraus_operators;
use super::noise::NoiseModel;
use crate::error::{Result, TbsfError};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Branches below this probability are dropped from the exact path.
pub const PRUNE_TOL: f64 = 1e-15;
pub const MAX_EXACT_BITS: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShotRecord {
    /// Bit values in the circuit's declared bit order, e.g. `"0110"`.
    pub outcome: String,
    pub multiplicity: u64,
}

impl ShotRecord {
    pub fn bit(&self, circuit: &Circuit, name: &str) -> Option<u8> {
        let k = circuit.bit_index(name)?;
        self.outcome.as_bytes().get(k).map(|b| b - b'0')
    }
}

#[derive(Debug, Clone)]
pub struct Branch {
    pub record: Vec<u8>,
    pub state: DensityMatrix,
    pub probability: f64,
    shots: u64,
}

impl Branch {
    pub fn outcome(&self) -> String {
        self.record.iter().map(|&b| (b'0' + b) as char).collect()
    }
}

enum Mode<'a> {
    Exact,
    Sample(&'a mut ChaCha8Rng),
}

/// `(bit assignments, unnormalized state)` for each outcome of an instrument.
type Children = Vec<(Vec<(usize, u8)>, DensityMatrix)>;

fn instrument_children(op: &Op, state: &DensityMatrix, circuit: &Circuit, noise: &NoiseModel) -> Option<Children> {
    match op {
        Op::Measure { qubit, bit } => {
            let k = circuit.bit_index(bit).expect("validated bit");
            let (e0, e1) = noise.readout_for(*qubit);
            let p0 = state.project(*qubit, 0);
            let p1 = state.project(*qubit, 1);
            let mix = |a: f64, b: f64| {
                let mut s = p0.clone();
                s.scale(a);
                let mut t = p1.clone();
                t.scale(b);
                s.add_assign(&t);
                s
            };
            Some(vec![
                (vec![(k, 0)], mix(1.0 - e0, e1)),
                (vec![(k, 1)], mix(e0, 1.0 - e1)),
            ])
        }
        Op::SicKraus { qubit, bits } => {
            let idx: Vec<usize> = bits
                .iter()
                .map(|b| circuit.bit_index(b).expect("validated bit"))
                .collect();
            Some(
                sic_kraus_operators()
                    .into_iter()
                    .map(|(mu, a)| {
                        let assign = (0..4).map(|j| (idx[j], mu[j])).collect();
                        (assign, state.kraus_branch(&[*qubit], &a))
                    })
                    .collect(),
            )
        }
        _ => None,
    }
}

fn apply_deterministic(op: &Op, state: &mut DensityMatrix, noise: &NoiseModel) {
    match op {
        Op::Gate(g) => {
            let qs = g.qubits();
            state.apply_unitary(&qs, &g.matrix());
            match qs.len() {
                1 => state.depolarize(&qs, noise.p1),
                2 => state.depolarize(&qs, noise.p2),
                _ => {}
            }
        }
        Op::Reset { qubit } => state.reset(*qubit),
        Op::Noise { site, qubits } => state.depolarize(qubits, 1.0 - noise.site_fidelity(*site)),
        Op::Barrier | Op::Measure { .. } | Op::SicKraus { .. } => {}
    }
}

fn execute(circuit: &Circuit, noise: &NoiseModel, mut mode: Mode, shots: u64) -> Result<Vec<Branch>> {
    circuit.validate()?;
    noise.validate()?;
    let nbits = circuit.bit_names().len();
    let mut branches = vec![Branch {
        record: vec![0; nbits],
        state: DensityMatrix::zero_state(circuit.n_qubits),
        probability: 1.0,
        shots,
    }];
    for op in &circuit.ops {
        let mut next = Vec::with_capacity(branches.len());
        for mut br in branches {
            let Some(children) = instrument_children(op, &br.state, circuit, noise) else {
                apply_deterministic(op, &mut br.state, noise);
                next.push(br);
                continue;
            };
            let probs: Vec<f64> = children.iter().map(|(_, s)| s.trace().max(0.0)).collect();
            let counts: Vec<u64> = match &mut mode {
                Mode::Exact => vec![0; children.len()],
                Mode::Sample(rng) => multinomial(br.shots, &probs, rng),
            };
            for (((assign, mut state), p), n) in children.into_iter().zip(&probs).zip(counts) {
                let keep = match mode {
                    Mode::Exact => br.probability * p > PRUNE_TOL,
                    Mode::Sample(_) => n > 0,
                };
                if !keep {
                    continue;
                }
                state.scale(1.0 / p);
                let mut record = br.record.clone();
                for (k, v) in assign {
                    record[k] = v;
                }
                next.push(Branch {
                    record,
                    state,
                    probability: br.probability * p,
                    shots: n,
                });
            }
        }
        branches = next;
    }
    Ok(branches)
}

fn multinomial(n: u64, probs: &[f64], rng: &mut ChaCha8Rng) -> Vec<u64> {
    let mut remaining = n;
    let mut mass: f64 = probs.iter().sum();
    let last = probs.len() - 1;
    probs
        .iter()
        .enumerate()
        .map(|(k, &p)| {
            let draw = if k == last {
                remaining
            } else if remaining == 0 || mass <= 0.0 {
                0
            } else {
                let q = (p / mass).clamp(0.0, 1.0);
                Binomial::new(remaining, q).expect("probability in [0, 1]").sample(rng)
            };
            remaining -= draw;
            mass -= p;
            draw
        })
        .collect()
}

/// Final branches of the exact evolution, with their probabilities and
/// normalized post-measurement states.
pub fn exact_branches(circuit: &Circuit, noise: &NoiseModel) -> Result<Vec<Branch>> {
    let nbits = circuit.bit_names().len();
    if nbits > MAX_EXACT_BITS {
        return Err(TbsfError::InvalidCircuit(format!(
            "{nbits} classical bits exceed the exact-path limit of {MAX_EXACT_BITS}"
        )));
    }
    execute(circuit, noise, Mode::Exact, 0)
}

/// Exact probability of every recorded outcome string.
pub fn exact_outcome_distribution(circuit: &Circuit, noise: &NoiseModel) -> Result<BTreeMap<String, f64>> {
    let mut dist = BTreeMap::new();
    for br in exact_branches(circuit, noise)? {
        *dist.entry(br.outcome()).or_insert(0.0) += br.probability;
    }
    Ok(dist)
}

/// Sample `shots` runs; deterministic in `seed`. Records are sorted by outcome.
pub fn run(circuit: &Circuit, noise: &NoiseModel, shots: u64, seed: u64) -> Result<Vec<ShotRecord>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let branches = execute(circuit, noise, Mode::Sample(&mut rng), shots)?;
    let mut counts: BTreeMap<String, u64> = BTreeMap::new();
    for br in branches {
        *counts.entry(br.outcome()).or_insert(0) += br.shots;
    }
    Ok(counts
        .into_iter()
        .map(|(outcome, multiplicity)| ShotRecord { outcome, multiplicity })
        .collect())
}

/// `Σ multiplicity` over records matching `pred`.
pub fn count_where(records: &[ShotRecord], pred: impl Fn(&ShotRecord) -> bool) -> u64 {
    records.iter().filter(|r| pred(r)).map(|r| r.multiplicity).sum()
}
