//! Outcome tensors of the two single-qubit tomography schemes.

use crate::error::{Result, TbsfError};
use crate::measurement::OutcomeTensorSet;
use crate::qcsim::{sic_kraus_operators, PauliBasis};
use crate::tensor::ComplexTensor4;
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Mub,
    Sic,
}

impl std::str::FromStr for Scheme {
    type Err = TbsfError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mub" => Ok(Scheme::Mub),
            "sic" => Ok(Scheme::Sic),
            other => Err(TbsfError::InvalidInput(format!("unknown scheme {other:?}"))),
        }
    }
}

/// One measurement setting: an ordered MUB pair, or the doubled SIC measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MeasurementConfig {
    Mub(PauliBasis, PauliBasis),
    Sic,
}

impl MeasurementConfig {
    pub fn id(&self) -> String {
        match self {
            MeasurementConfig::Mub(a, b) => format!("{}{}", a.letter(), b.letter()),
            MeasurementConfig::Sic => "sic".to_string(),
        }
    }

    pub fn parse(id: &str) -> Result<Self> {
        let basis = |ch: char| match ch {
            'x' => Ok(PauliBasis::X),
            'y' => Ok(PauliBasis::Y),
            'z' => Ok(PauliBasis::Z),
            _ => Err(TbsfError::InvalidInput(format!("unknown config id {id:?}"))),
        };
        if id == "sic" {
            return Ok(MeasurementConfig::Sic);
        }
        let chars: Vec<char> = id.chars().collect();
        if chars.len() != 2 {
            return Err(TbsfError::InvalidInput(format!("unknown config id {id:?}")));
        }
        Ok(MeasurementConfig::Mub(basis(chars[0])?, basis(chars[1])?))
    }

    pub fn outcome_tensors(&self) -> OutcomeTensorSet {
        match *self {
            MeasurementConfig::Mub(a, b) => mub_outcome_tensors(a, b),
            MeasurementConfig::Sic => sic_outcome_tensors(),
        }
    }

    pub fn all_mub() -> Vec<MeasurementConfig> {
        let mut out = Vec::with_capacity(9);
        for a in PauliBasis::ALL {
            for b in PauliBasis::ALL {
                out.push(MeasurementConfig::Mub(a, b));
            }
        }
        out
    }

    pub fn for_scheme(scheme: Scheme) -> Vec<MeasurementConfig> {
        match scheme {
            Scheme::Mub => Self::all_mub(),
            Scheme::Sic => vec![MeasurementConfig::Sic],
        }
    }
}

/// `Π^{(r)}(μ)` for bit `μ` (0 ↔ +1).
pub fn pauli_projector(basis: PauliBasis, bit: u8) -> DMatrix<Complex64> {
    let sign = if bit == 0 { 1.0 } else { -1.0 };
    (crate::linalg::identity(2) + basis.matrix().scale(sign)).scale(0.5)
}

/// Sequential nondestructive measurements of `σ_{r₁}` then `σ_{r₂}`.
///
/// Labels are `"μ₁μ₂"` bit strings; for `r₁ = r₂` only `"00"` and `"11"` occur.
pub fn mub_outcome_tensors(r1: PauliBasis, r2: PauliBasis) -> OutcomeTensorSet {
    let mut outcomes = Vec::new();
    for m1 in 0..2u8 {
        for m2 in 0..2u8 {
            if r1 == r2 && m1 != m2 {
                continue;
            }
            let a = if r1 == r2 {
                pauli_projector(r1, m1)
            } else {
                pauli_projector(r2, m2) * pauli_projector(r1, m1)
            };
            outcomes.push((format!("{m1}{m2}"), ComplexTensor4::from_operator_pair(&a, &a)));
        }
    }
    OutcomeTensorSet::new(outcomes).expect("MUB tensors are valid")
}

/// The 16 doubled-SIC outcome tensors, labels `"μ₁μ₂μ₃μ₄"`.
pub fn sic_outcome_tensors() -> OutcomeTensorSet {
    let outcomes = sic_kraus_operators()
        .into_iter()
        .map(|(mu, a)| {
            let label: String = mu.iter().map(|b| (b'0' + b) as char).collect();
            (label, ComplexTensor4::from_operator_pair(&a, &a))
        })
        .collect();
    OutcomeTensorSet::new(outcomes).expect("SIC tensors are valid")
}

/// Rank of the span of the flattened outcome tensors.
pub fn span_rank<'a>(sets: impl IntoIterator<Item = &'a OutcomeTensorSet>) -> usize {
    let rows: Vec<Vec<Complex64>> = sets
        .into_iter()
        .flat_map(|s| s.tensors().iter().map(|t| t.flat().iter().copied().collect()))
        .collect();
    if rows.is_empty() {
        return 0;
    }
    let m = DMatrix::from_fn(rows.len(), rows[0].len(), |i, j| rows[i][j]);
    let sv = m.singular_values();
    let max = sv.iter().cloned().fold(0.0, f64::max);
    sv.iter().filter(|&&s| s > 1e-10 * max.max(1.0)).count()
}

/// Condition number of the Gram matrix of the flattened outcome tensors.
pub fn gram_condition_number(set: &OutcomeTensorSet) -> f64 {
    let n = set.len();
    let t = set.tensors();
    let gram = DMatrix::from_fn(n, n, |a, b| crate::linalg::hs_inner(t[a].flat(), t[b].flat()));
    let (values, _) = crate::linalg::hermitian_eigen(&gram);
    values[0] / values[n - 1]
}

pub fn check_informationally_complete(configs: &[MeasurementConfig]) -> Result<()> {
    let sets: Vec<OutcomeTensorSet> = configs.iter().map(|c| c.outcome_tensors()).collect();
    let rank = span_rank(&sets);
    if rank < 16 {
        return Err(TbsfError::NotInformationallyComplete(format!(
            "outcome tensors span {rank} of 16 dimensions"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{identity, kron, max_abs, outer, partial_trace_second, vector, ONE, ZERO};
    use crate::state::TimeBidirectionalState;

    #[test]
    fn distinct_bases_total_is_half_identity() {
        let set = mub_outcome_tensors(PauliBasis::X, PauliBasis::Y);
        assert_eq!(set.len(), 4);
        assert!(max_abs(&(set.total().flat() - identity(4).scale(0.5))) < 1e-12);
        for t in set.tensors() {
            let (values, _) = crate::linalg::hermitian_eigen(t.flat());
            assert!(values[0] > 1e-3 && values[1].abs() < 1e-12);
        }
    }

    #[test]
    fn repeated_basis_is_single_projective_measurement() {
        let set = mub_outcome_tensors(PauliBasis::Z, PauliBasis::Z);
        assert_eq!(set.labels(), &["00".to_string(), "11".to_string()]);
        let ket0 = vector(&[ONE, ZERO]);
        let ket1 = vector(&[ZERO, ONE]);
        let eta = TimeBidirectionalState::from_flat(kron(&outer(&ket0), &outer(&ket1))).unwrap();
        assert!(set.total().contract(eta.tensor()).norm() < 1e-15);
    }

    #[test]
    fn all_mub_sets_are_normalized() {
        for cfg in MeasurementConfig::all_mub() {
            let set = cfg.outcome_tensors();
            let red = partial_trace_second(set.total().flat(), 2, 2);
            assert!(max_abs(&(red - identity(2))) < 1e-12);
        }
    }

    #[test]
    fn sic_set_properties() {
        assert!((sic_theta_value() - (1.0 / 3f64.sqrt()).acos()).abs() < 1e-15);
        let set = sic_outcome_tensors();
        assert_eq!(set.len(), 16);
        assert!(max_abs(&(set.total().flat() - identity(4).scale(0.5))) < 1e-12);
        assert_eq!(span_rank([&set]), 16);
        let cond = gram_condition_number(&set);
        assert!(cond.is_finite() && cond < 1e3, "condition number {cond}");
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(61);
        for _ in 0..10 {
            let eta = TimeBidirectionalState::from_flat(crate::linalg::random_density(4, 4, &mut rng)).unwrap();
            assert!((set.total().contract(eta.tensor()).re - 0.5).abs() < 1e-12);
        }
    }

    fn sic_theta_value() -> f64 {
        crate::qcsim::fragments::sic_theta()
    }

    #[test]
    fn mub_union_is_complete_and_single_configs_are_not() {
        check_informationally_complete(&MeasurementConfig::all_mub()).unwrap();
        check_informationally_complete(&[MeasurementConfig::Sic]).unwrap();
        assert!(check_informationally_complete(&[MeasurementConfig::Mub(PauliBasis::X, PauliBasis::Y)]).is_err());
    }

    #[test]
    fn config_ids_round_trip() {
        for cfg in MeasurementConfig::all_mub().into_iter().chain([MeasurementConfig::Sic]) {
            assert_eq!(MeasurementConfig::parse(&cfg.id()).unwrap(), cfg);
        }
        assert!(MeasurementConfig::parse("xq").is_err());
    }
}
