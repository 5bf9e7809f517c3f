//! Time-bidirectional states: construction, reduced states, spectral
//! decomposition and purification.
//!
//! A state `η_{ii'}^{jj'}` is held in the flattened forward-slow layout of
//! [`ComplexTensor4`], where it is a Hermitian PSD unit-trace `d² × d²`
//! matrix.
//!
//! The backward block of the flattened matrix is written in terms of the
//! components of the postselected *bra*. For a postselection onto `⟨φ|` the
//! backward reduced state is therefore `|φ̄⟩⟨φ̄| = conj(|φ⟩⟨φ|)`; use
//! [`TimeBidirectionalState::postselected_state`] for the operator `|φ⟩⟨φ|`
//! itself.

use crate::error::{Result, TbsfError};
use crate::json::{matrix_to_rows, rows_to_matrix, ComplexRows};
use crate::linalg::{
    conj, hermitian_eigen, hermiticity_error, hermitize, identity, kron, min_eigenvalue, outer, partial_trace_first,
    partial_trace_second, CMatrix, CVector, ZERO,
};
use crate::tensor::{ComplexTensor4, INDEX_CONVENTION};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub const HERMITIAN_TOL: f64 = 1e-12;
pub const PSD_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-12;
/// Below this full trace the pre/post pair cannot be normalized.
pub const TRIVIAL_POSTSELECTION_TOL: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq)]
pub struct TimeBidirectionalState {
    tensor: ComplexTensor4,
}

#[derive(Debug, Clone)]
pub struct TwoStateDensityVectorDecomposition {
    pub weights: Vec<f64>,
    /// `vectors[r][(i, j)] = φ^{(r) j}_i`.
    pub vectors: Vec<CMatrix>,
}

#[derive(Debug, Clone)]
pub struct PurificationTensor {
    dim: usize,
    reference_dim: usize,
    /// Indexed `(i, r, j)`, row-major.
    theta: Vec<Complex64>,
}

pub(crate) fn check_density(rho: &CMatrix, what: &str) -> Result<()> {
    if rho.nrows() != rho.ncols() {
        return Err(TbsfError::DimensionMismatch(format!("{what} is not square")));
    }
    if hermiticity_error(rho) > 1e-10 {
        return Err(TbsfError::InvalidInput(format!("{what} is not Hermitian")));
    }
    if min_eigenvalue(rho) < -PSD_TOL {
        return Err(TbsfError::InvalidInput(format!("{what} is not positive semidefinite")));
    }
    if (rho.trace().re - 1.0).abs() > 1e-10 {
        return Err(TbsfError::InvalidInput(format!("{what} does not have unit trace")));
    }
    Ok(())
}

pub(crate) fn check_effect(e: &CMatrix, what: &str) -> Result<()> {
    if e.nrows() != e.ncols() {
        return Err(TbsfError::DimensionMismatch(format!("{what} is not square")));
    }
    if hermiticity_error(e) > 1e-10 {
        return Err(TbsfError::InvalidInput(format!("{what} is not Hermitian")));
    }
    let (values, _) = hermitian_eigen(e);
    if values.last().copied().unwrap_or(0.0) < -PSD_TOL || values[0] > 1.0 + PSD_TOL {
        return Err(TbsfError::InvalidInput(format!("{what} is not between 0 and identity")));
    }
    Ok(())
}

pub(crate) fn check_unit(v: &CVector, what: &str) -> Result<()> {
    if (v.norm() - 1.0).abs() > 1e-10 {
        return Err(TbsfError::InvalidInput(format!(
            "{what} must have unit norm (norm {})",
            v.norm()
        )));
    }
    Ok(())
}

impl TimeBidirectionalState {
    /// Normalize `η ↦ η / η_{ii}^{jj}` and validate.
    pub fn new(tensor: ComplexTensor4) -> Result<Self> {
        let tr = tensor.full_trace();
        if tr.norm() <= TRIVIAL_POSTSELECTION_TOL {
            return Err(TbsfError::TrivialPostselection(tr.norm()));
        }
        let flat = tensor.into_flat().map(|z| z / tr);
        Self::from_normalized_flat(flat)
    }

    /// Accept an already normalized flattened matrix; entries are kept as
    /// given after validation (apart from exact Hermitian symmetrization).
    fn from_normalized_flat(flat: CMatrix) -> Result<Self> {
        let err = hermiticity_error(&flat);
        if err > HERMITIAN_TOL {
            return Err(TbsfError::InvariantViolation(format!(
                "flattened state is not Hermitian (deviation {err:e})"
            )));
        }
        let flat = if err > 0.0 { hermitize(&flat) } else { flat };
        let min = min_eigenvalue(&flat);
        if min < -PSD_TOL {
            return Err(TbsfError::InvariantViolation(format!(
                "flattened state has negative eigenvalue {min:e}"
            )));
        }
        let tr = flat.trace();
        if (tr - Complex64::new(1.0, 0.0)).norm() > TRACE_TOL {
            return Err(TbsfError::InvariantViolation(format!("trace {tr} is not 1")));
        }
        Ok(Self {
            tensor: ComplexTensor4::from_flat(flat),
        })
    }

    /// Validate a flattened matrix without renormalizing it.
    pub fn from_flat_normalized(flat: CMatrix) -> Result<Self> {
        Self::from_normalized_flat(flat)
    }

    /// Normalize an arbitrary nonzero PSD matrix in the flattened layout.
    pub fn from_flat(flat: CMatrix) -> Result<Self> {
        Self::new(ComplexTensor4::from_flat(flat))
    }

    /// `η_{ii'}^{jj'} = ρ^pre_{ii';mm'} E_post^{jj';mm'}` for a system of
    /// dimension `system_dim` entangled with an ancilla.
    ///
    /// Both operators act on `system ⊗ ancilla`, system index slow.
    pub fn from_pre_post(rho_pre: &CMatrix, e_post: &CMatrix, system_dim: usize) -> Result<Self> {
        let n = rho_pre.nrows();
        if e_post.nrows() != n || system_dim == 0 || !n.is_multiple_of(system_dim) {
            return Err(TbsfError::DimensionMismatch(format!(
                "pre {}x{}, post {}x{}, system dim {}",
                n,
                rho_pre.ncols(),
                e_post.nrows(),
                e_post.ncols(),
                system_dim
            )));
        }
        check_density(rho_pre, "preselected state")?;
        check_effect(e_post, "postselection effect")?;
        let d = system_dim;
        let da = n / d;
        let tensor = ComplexTensor4::from_fn(d, |i, ip, j, jp| {
            let mut acc = ZERO;
            for m in 0..da {
                for mp in 0..da {
                    acc += rho_pre[(i * da + m, ip * da + mp)] * e_post[(jp * da + mp, j * da + m)];
                }
            }
            acc
        });
        Self::new(tensor)
    }

    /// No postselection: `η = ρ ⊗ 1/d`.
    pub fn no_postselection(rho: &CMatrix) -> Result<Self> {
        check_density(rho, "state")?;
        let d = rho.nrows();
        Self::from_flat(kron(rho, &identity(d)))
    }

    /// Two-state vector `(|ψ⟩, ⟨φ|)`: preselect `|ψ⟩`, postselect onto `|φ⟩`.
    pub fn pure_two_state(psi_pre: &CVector, phi_post: &CVector) -> Result<Self> {
        if psi_pre.len() != phi_post.len() {
            return Err(TbsfError::DimensionMismatch(format!(
                "pre dim {} vs post dim {}",
                psi_pre.len(),
                phi_post.len()
            )));
        }
        check_unit(psi_pre, "preselected vector")?;
        check_unit(phi_post, "postselected vector")?;
        Self::from_flat(kron(&outer(psi_pre), &conj(&outer(phi_post))))
    }

    /// Mixed two-state vector: preselect `ρ`, postselect with effect `∝ ρ_post`.
    pub fn mixed_two_state(rho_pre: &CMatrix, rho_post: &CMatrix) -> Result<Self> {
        if rho_pre.nrows() != rho_post.nrows() {
            return Err(TbsfError::DimensionMismatch(format!(
                "pre dim {} vs post dim {}",
                rho_pre.nrows(),
                rho_post.nrows()
            )));
        }
        check_density(rho_pre, "preselected state")?;
        check_density(rho_post, "postselected state")?;
        Self::from_flat(kron(rho_pre, &conj(rho_post)))
    }

    /// Generalized two-state vector `c_i^j (|i⟩, ⟨j|)`, i.e. `η = |Ψ⟩⟨Ψ|`
    /// with `Ψ = c_i^j |i⟩|j⟩`.
    pub fn generalized_two_state(c: &CMatrix) -> Result<Self> {
        Self::density_vector_mixture(&[1.0], std::slice::from_ref(c))
    }

    /// `η = Σ_r p_r |Ψ_r⟩⟨Ψ_r|` with `Ψ_r` the normalized vectorization of
    /// `c^{(r)}` (`c[(i, j)] = c_i^j`).
    pub fn density_vector_mixture(weights: &[f64], vectors: &[CMatrix]) -> Result<Self> {
        if weights.is_empty() || vectors.is_empty() {
            return Err(TbsfError::InvalidInput("empty density-vector mixture".into()));
        }
        if weights.len() != vectors.len() {
            return Err(TbsfError::DimensionMismatch(format!(
                "{} weights for {} vectors",
                weights.len(),
                vectors.len()
            )));
        }
        if weights.iter().any(|&w| w < 0.0 || !w.is_finite()) {
            return Err(TbsfError::InvalidInput("mixture weights must be nonnegative".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-10 {
            return Err(TbsfError::InvalidInput(format!("mixture weights sum to {total}")));
        }
        let d = vectors[0].nrows();
        let mut flat = CMatrix::zeros(d * d, d * d);
        for (&w, c) in weights.iter().zip(vectors) {
            if c.nrows() != d || c.ncols() != d {
                return Err(TbsfError::DimensionMismatch(
                    "mixture components differ in shape".into(),
                ));
            }
            let psi = vectorize(c);
            let norm = psi.norm();
            if norm == 0.0 {
                return Err(TbsfError::InvalidInput("zero generalized two-state vector".into()));
            }
            flat += outer(&psi.unscale(norm)).scale(w);
        }
        Self::from_flat(flat)
    }

    pub fn dim(&self) -> usize {
        self.tensor.dim()
    }

    pub fn tensor(&self) -> &ComplexTensor4 {
        &self.tensor
    }

    /// The flattened `d² × d²` density matrix.
    pub fn matrix(&self) -> &CMatrix {
        self.tensor.flat()
    }

    /// `η↑_{ii'} = η_{ii'}^{kk}`.
    pub fn reduced_forward(&self) -> CMatrix {
        let d = self.dim();
        partial_trace_second(self.matrix(), d, d)
    }

    /// `η↓^{jj'} = η_{kk}^{jj'}` as a matrix in `(j, j')`.
    pub fn reduced_backward(&self) -> CMatrix {
        let d = self.dim();
        partial_trace_first(self.matrix(), d, d)
    }

    /// The normalized postselection operator seen by the system: the complex
    /// conjugate of [`reduced_backward`](Self::reduced_backward).
    pub fn postselected_state(&self) -> CMatrix {
        conj(&self.reduced_backward())
    }

    /// `η ↦ η / η_{ii}^{jj}` applied again.
    pub fn normalized(&self) -> Result<Self> {
        Self::new(self.tensor.clone())
    }

    pub fn spectral_decompose(&self) -> TwoStateDensityVectorDecomposition {
        let d = self.dim();
        let (values, vectors) = hermitian_eigen(self.matrix());
        let mut weights = Vec::new();
        let mut vecs = Vec::new();
        for (k, &lambda) in values.iter().enumerate() {
            // clamps [-PSD_TOL, 0) to zero; validated states have nothing below
            let lambda = lambda.max(0.0);
            if lambda <= RANK_TOL {
                continue;
            }
            weights.push(lambda);
            let col = vectors.column(k);
            vecs.push(CMatrix::from_fn(d, d, |i, j| col[i * d + j]));
        }
        TwoStateDensityVectorDecomposition { weights, vectors: vecs }
    }

    /// `Θ_{i;r}^j = √λ_r φ^{(r) j}_i` with one reference level per nonzero weight.
    pub fn purify(&self) -> PurificationTensor {
        let d = self.dim();
        let dec = self.spectral_decompose();
        let rank = dec.weights.len();
        let mut theta = vec![ZERO; d * rank * d];
        for (r, (w, phi)) in dec.weights.iter().zip(&dec.vectors).enumerate() {
            let s = w.sqrt();
            for i in 0..d {
                for j in 0..d {
                    theta[(i * rank + r) * d + j] = phi[(i, j)] * s;
                }
            }
        }
        PurificationTensor {
            dim: d,
            reference_dim: rank,
            theta,
        }
    }

    pub fn to_json(&self) -> EtaJson {
        EtaJson {
            dim: self.dim(),
            index_convention: INDEX_CONVENTION.to_string(),
            matrix: matrix_to_rows(self.matrix()),
        }
    }

    pub fn from_json(json: &EtaJson) -> Result<Self> {
        if json.index_convention != INDEX_CONVENTION {
            return Err(TbsfError::InvalidInput(format!(
                "unsupported index convention {:?}",
                json.index_convention
            )));
        }
        let flat = rows_to_matrix(&json.matrix)?;
        if flat.nrows() != json.dim * json.dim || flat.ncols() != json.dim * json.dim {
            return Err(TbsfError::DimensionMismatch(format!(
                "dim {} needs a {}x{} matrix",
                json.dim,
                json.dim * json.dim,
                json.dim * json.dim
            )));
        }
        Self::from_normalized_flat(flat)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("state serializes")
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        Self::from_json(&serde_json::from_str(s)?)
    }
}

/// Weights at or below this are treated as zero rank.
pub const RANK_TOL: f64 = 1e-12;

/// `Ψ_{(i,j)} = c[(i, j)]`, forward index slow.
pub fn vectorize(c: &CMatrix) -> CVector {
    let m = c.ncols();
    CVector::from_fn(c.nrows() * m, |k, _| c[(k / m, k % m)])
}

impl TwoStateDensityVectorDecomposition {
    pub fn reassemble(&self) -> ComplexTensor4 {
        let d = self.vectors.first().map_or(0, |v| v.nrows());
        let mut flat = CMatrix::zeros(d * d, d * d);
        for (w, phi) in self.weights.iter().zip(&self.vectors) {
            flat += outer(&vectorize(phi)).scale(*w);
        }
        ComplexTensor4::from_flat(flat)
    }
}

impl PurificationTensor {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn reference_dim(&self) -> usize {
        self.reference_dim
    }

    pub fn theta(&self, i: usize, r: usize, j: usize) -> Complex64 {
        self.theta[(i * self.reference_dim + r) * self.dim + j]
    }

    /// `Θ_{i;r}^j conj(Θ)_{i';r}^{j'}` summed over the reference index.
    pub fn contract_reference(&self) -> ComplexTensor4 {
        ComplexTensor4::from_fn(self.dim, |i, ip, j, jp| {
            (0..self.reference_dim)
                .map(|r| self.theta(i, r, j) * self.theta(ip, r, jp).conj())
                .sum()
        })
    }

    /// `|Θ⟩ = Θ_{i;r}^j |i⟩_Q |j⟩_A |r⟩_R` padded to `reference_levels ≥ rank`.
    pub fn state_vector(&self, reference_levels: usize) -> CVector {
        assert!(reference_levels >= self.reference_dim);
        let d = self.dim;
        let mut v = CVector::zeros(d * d * reference_levels);
        for i in 0..d {
            for j in 0..d {
                for r in 0..self.reference_dim {
                    v[(i * d + j) * reference_levels + r] = self.theta(i, r, j);
                }
            }
        }
        v
    }
}

/// Serialized form of a state.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct EtaJson {
    pub dim: usize,
    pub index_convention: String,
    pub matrix: ComplexRows,
}

impl Serialize for TimeBidirectionalState {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de> Deserialize<'de> for TimeBidirectionalState {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let json = EtaJson::deserialize(d)?;
        Self::from_json(&json).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, max_abs, random_density, random_pure_state, vector, ONE};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ket0() -> CVector {
        vector(&[ONE, ZERO])
    }

    fn ket_plus() -> CVector {
        vector(&[c(0.5f64.sqrt(), 0.0), c(0.5f64.sqrt(), 0.0)])
    }

    #[test]
    fn no_postselection_of_ket0() {
        let eta = TimeBidirectionalState::no_postselection(&outer(&ket0())).unwrap();
        assert!(max_abs(&(eta.reduced_forward() - outer(&ket0()))) < 1e-15);
        assert!(max_abs(&(eta.reduced_backward() - identity(2).scale(0.5))) < 1e-15);
    }

    #[test]
    fn no_postselection_of_maximally_mixed() {
        let eta = TimeBidirectionalState::no_postselection(&identity(2).scale(0.5)).unwrap();
        assert!(max_abs(&(eta.matrix() - identity(4).scale(0.25))) < 1e-15);
    }

    #[test]
    fn pure_two_state_product_structure() {
        let eta = TimeBidirectionalState::pure_two_state(&ket0(), &ket0()).unwrap();
        let expected = kron(&outer(&ket0()), &outer(&ket0()));
        assert!(max_abs(&(eta.matrix() - expected)) < 1e-15);

        let eta = TimeBidirectionalState::pure_two_state(&ket0(), &ket_plus()).unwrap();
        assert!(max_abs(&(eta.reduced_forward() - outer(&ket0()))) < 1e-15);
        assert!(max_abs(&(eta.reduced_backward() - outer(&ket_plus()))) < 1e-15);
    }

    #[test]
    fn pure_two_state_rejects_unnormalized() {
        let v = vector(&[ONE, ONE]);
        assert!(matches!(
            TimeBidirectionalState::pure_two_state(&ket0(), &v),
            Err(TbsfError::InvalidInput(_))
        ));
    }

    #[test]
    fn complex_postselection_is_stored_conjugated() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let psi = random_pure_state(2, &mut rng);
        let phi = random_pure_state(2, &mut rng);
        let eta = TimeBidirectionalState::pure_two_state(&psi, &phi).unwrap();
        assert!(max_abs(&(eta.postselected_state() - outer(&phi))) < 1e-14);
        assert!(max_abs(&(eta.reduced_backward() - conj(&outer(&phi)))) < 1e-14);
    }

    #[test]
    fn mixed_two_state_examples() {
        let mix = identity(2).scale(0.5);
        let eta = TimeBidirectionalState::mixed_two_state(&mix, &mix).unwrap();
        assert!(max_abs(&(eta.matrix() - identity(4).scale(0.25))) < 1e-15);

        let a = TimeBidirectionalState::mixed_two_state(&outer(&ket0()), &mix).unwrap();
        let b = TimeBidirectionalState::no_postselection(&outer(&ket0())).unwrap();
        assert!(max_abs(&(a.matrix() - b.matrix())) < 1e-15);

        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let rho = random_density(3, 3, &mut rng);
        let sigma = random_density(3, 2, &mut rng);
        let eta = TimeBidirectionalState::mixed_two_state(&rho, &sigma).unwrap();
        assert!(max_abs(&(eta.reduced_forward() - &rho)) < 1e-14);
        assert!(max_abs(&(eta.postselected_state() - &sigma)) < 1e-14);
    }

    #[test]
    fn mixed_two_state_dimension_mismatch() {
        let r2 = identity(2).scale(0.5);
        let r3 = identity(3).scale(1.0 / 3.0);
        assert!(matches!(
            TimeBidirectionalState::mixed_two_state(&r2, &r3),
            Err(TbsfError::DimensionMismatch(_))
        ));
    }

    #[test]
    fn single_identity_component_is_maximally_entangled() {
        let cmat = identity(2).scale(0.5f64.sqrt());
        let eta = TimeBidirectionalState::density_vector_mixture(&[1.0], &[cmat]).unwrap();
        let phi_plus = vector(&[c(0.5f64.sqrt(), 0.0), ZERO, ZERO, c(0.5f64.sqrt(), 0.0)]);
        assert!(max_abs(&(eta.matrix() - outer(&phi_plus))) < 1e-15);
        let half = identity(2).scale(0.5);
        assert!(max_abs(&(eta.reduced_forward() - &half)) < 1e-15);
        assert!(max_abs(&(eta.reduced_backward() - &half)) < 1e-15);
    }

    #[test]
    fn two_orthogonal_components_have_half_weights() {
        let c1 = identity(2);
        let c2 = crate::linalg::pauli_z();
        let eta = TimeBidirectionalState::density_vector_mixture(&[0.5, 0.5], &[c1, c2]).unwrap();
        let dec = eta.spectral_decompose();
        assert_eq!(dec.weights.len(), 2);
        assert!((dec.weights[0] - 0.5).abs() < 1e-14 && (dec.weights[1] - 0.5).abs() < 1e-14);
    }

    #[test]
    fn empty_mixture_is_rejected() {
        assert!(TimeBidirectionalState::density_vector_mixture(&[], &[]).is_err());
    }

    #[test]
    fn spectral_examples() {
        let eta = TimeBidirectionalState::pure_two_state(&ket0(), &ket_plus()).unwrap();
        let dec = eta.spectral_decompose();
        assert_eq!(dec.weights.len(), 1);
        assert!((dec.weights[0] - 1.0).abs() < 1e-14);

        let eta = TimeBidirectionalState::no_postselection(&outer(&ket0())).unwrap();
        let dec = eta.spectral_decompose();
        assert_eq!(dec.weights.len(), 2);
        assert!((dec.weights[0] - 0.5).abs() < 1e-14);
    }

    #[test]
    fn purification_ranks() {
        let eta = TimeBidirectionalState::pure_two_state(&ket0(), &ket_plus()).unwrap();
        assert_eq!(eta.purify().reference_dim(), 1);
        let eta = TimeBidirectionalState::no_postselection(&identity(2).scale(0.5)).unwrap();
        let p = eta.purify();
        assert_eq!(p.reference_dim(), 4);
        assert!(p.contract_reference().max_abs_diff(eta.tensor()) < 1e-14);
    }

    #[test]
    fn trivial_postselection_is_an_error() {
        // ancilla prepared in |0⟩, postselected onto |1⟩: nothing Bob does on Q helps
        let ket1 = vector(&[ZERO, ONE]);
        let rho = kron(&outer(&ket0()), &outer(&ket0()));
        let e = kron(&identity(2), &outer(&ket1));
        assert!(matches!(
            TimeBidirectionalState::from_pre_post(&rho, &e, 2),
            Err(TbsfError::TrivialPostselection(_))
        ));
        let e = kron(&outer(&ket1), &identity(2));
        assert!(TimeBidirectionalState::from_pre_post(&rho, &e, 2).is_ok());
    }

    #[test]
    fn from_pre_post_dimension_mismatch() {
        let rho = identity(4).scale(0.25);
        let e = identity(2);
        assert!(matches!(
            TimeBidirectionalState::from_pre_post(&rho, &e, 2),
            Err(TbsfError::DimensionMismatch(_))
        ));
    }

    #[test]
    fn json_round_trip_is_bit_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let rho = random_density(4, 3, &mut rng);
        let eta = TimeBidirectionalState::from_flat(rho).unwrap();
        let s = eta.to_json_string();
        assert!(s.contains("\"index_convention\": \"forward-slow\""));
        let back = TimeBidirectionalState::from_json_str(&s).unwrap();
        for (a, b) in eta.matrix().iter().zip(back.matrix().iter()) {
            assert_eq!(a.re.to_bits(), b.re.to_bits());
            assert_eq!(a.im.to_bits(), b.im.to_bits());
        }
    }
}
