//! Operation outcome tensors, outcome probabilities, mean values and weak
//! values.
//!
//! An outcome tensor of a branch with Kraus operators `{A}` is
//! `K^{ii'}_{jj'} = Σ_A A_{ji} conj(A_{j'i'}) = ⟨j| M_μ(|i⟩⟨i'|) |j'⟩`.
//! In the forward-slow layout its flattened matrix is PSD and the total
//! tensor satisfies `Σ_k K^{ii'}_{kk} = δ^{ii'}` for a trace-preserving
//! instrument.

use crate::error::{Result, TbsfError};
use crate::linalg::{
    hermitian_eigen, hermiticity_error, identity, kron, max_abs, min_eigenvalue, partial_trace_second, unitarity_error,
    CMatrix,
};
use crate::state::{check_density, check_effect, TimeBidirectionalState};
use crate::tensor::ComplexTensor4;
use num_complex::Complex64;

/// Eigenvalues closer than this are merged into one outcome.
pub const EIGENVALUE_MERGE_TOL: f64 = 1e-9;
/// `K • η` at or below this counts as a vanishing postselection probability.
pub const ZERO_POSTSELECTION_TOL: f64 = 1e-14;
pub const SET_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct HermitianObservable {
    matrix: CMatrix,
    eigenvalues: Vec<f64>,
    projectors: Vec<CMatrix>,
}

impl HermitianObservable {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() || matrix.nrows() == 0 {
            return Err(TbsfError::DimensionMismatch("observable must be square".into()));
        }
        let err = hermiticity_error(&matrix);
        if err > 1e-10 {
            return Err(TbsfError::InvalidInput(format!(
                "observable is not Hermitian (deviation {err:e})"
            )));
        }
        let (values, vectors) = hermitian_eigen(&matrix);
        let n = matrix.nrows();
        let mut eigenvalues: Vec<f64> = Vec::new();
        let mut groups: Vec<Vec<usize>> = Vec::new();
        for (k, &v) in values.iter().enumerate() {
            match groups.last_mut() {
                Some(g) if (values[g[0]] - v).abs() <= EIGENVALUE_MERGE_TOL => g.push(k),
                _ => groups.push(vec![k]),
            }
        }
        let mut projectors = Vec::with_capacity(groups.len());
        for g in &groups {
            let mean = g.iter().map(|&k| values[k]).sum::<f64>() / g.len() as f64;
            let rounded = mean.round();
            eigenvalues.push(if (mean - rounded).abs() <= EIGENVALUE_MERGE_TOL {
                rounded
            } else {
                mean
            });
            let mut p = CMatrix::zeros(n, n);
            for &k in g {
                let v = vectors.column(k);
                p += v * v.adjoint();
            }
            projectors.push(p);
        }
        Ok(Self {
            matrix,
            eigenvalues,
            projectors,
        })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Distinct eigenvalues in descending order.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn projectors(&self) -> &[CMatrix] {
        &self.projectors
    }

    /// `"+1"`, `"-1"`, `"+0.5"`, ...
    pub fn label(value: f64) -> String {
        format!("{value:+}")
    }

    pub fn labels(&self) -> Vec<String> {
        self.eigenvalues.iter().map(|&v| Self::label(v)).collect()
    }
}

#[derive(Debug, Clone)]
pub struct OutcomeTensorSet {
    dim: usize,
    labels: Vec<String>,
    tensors: Vec<ComplexTensor4>,
    total: ComplexTensor4,
}

impl OutcomeTensorSet {
    /// Validate and assemble a set; enforces semipositivity of every branch
    /// and `Σ_k K^{ii'}_{kk} = δ^{ii'}` for the total.
    pub fn new(outcomes: Vec<(String, ComplexTensor4)>) -> Result<Self> {
        let Some(first) = outcomes.first() else {
            return Err(TbsfError::InvalidInput("outcome set is empty".into()));
        };
        let dim = first.1.dim();
        let mut total = ComplexTensor4::zeros(dim);
        let mut labels = Vec::with_capacity(outcomes.len());
        let mut tensors = Vec::with_capacity(outcomes.len());
        for (label, k) in outcomes {
            if k.dim() != dim {
                return Err(TbsfError::DimensionMismatch(format!(
                    "outcome {label} has dim {} (expected {dim})",
                    k.dim()
                )));
            }
            if labels.contains(&label) {
                return Err(TbsfError::InvalidInput(format!("duplicate outcome label {label}")));
            }
            let min = min_eigenvalue(k.flat());
            if min < -SET_TOL || hermiticity_error(k.flat()) > SET_TOL {
                return Err(TbsfError::InvariantViolation(format!(
                    "outcome {label} is not semipositive (min eigenvalue {min:e})"
                )));
            }
            total = total.add(&k);
            labels.push(label);
            tensors.push(k);
        }
        let dev = max_abs(&(partial_trace_second(total.flat(), dim, dim) - identity(dim)));
        if dev > SET_TOL {
            return Err(TbsfError::InvariantViolation(format!(
                "outcome tensors are not normalized (deviation {dev:e})"
            )));
        }
        Ok(Self {
            dim,
            labels,
            tensors,
            total,
        })
    }

    /// One outcome per entry of `kraus`, each possibly with several Kraus operators.
    pub fn from_kraus(outcomes: Vec<(String, Vec<CMatrix>)>) -> Result<Self> {
        let tensors = outcomes
            .into_iter()
            .map(|(label, ops)| {
                let dim = ops.first().map_or(0, |a| a.nrows());
                let k = ops.iter().fold(ComplexTensor4::zeros(dim), |acc, a| {
                    acc.add(&ComplexTensor4::from_operator_pair(a, a))
                });
                (label, k)
            })
            .collect();
        Self::new(tensors)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn tensors(&self) -> &[ComplexTensor4] {
        &self.tensors
    }

    pub fn total(&self) -> &ComplexTensor4 {
        &self.total
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &ComplexTensor4)> {
        self.labels.iter().map(String::as_str).zip(&self.tensors)
    }

    pub fn get(&self, label: &str) -> Result<&ComplexTensor4> {
        self.labels
            .iter()
            .position(|l| l == label)
            .map(|k| &self.tensors[k])
            .ok_or_else(|| TbsfError::UnknownOutcome(label.to_string()))
    }
}

fn check_povm(effects: &[CMatrix], dim: usize) -> Result<()> {
    if effects.is_empty() {
        return Err(TbsfError::InvalidInput("POVM has no effects".into()));
    }
    let mut sum = CMatrix::zeros(dim, dim);
    for e in effects {
        if e.nrows() != dim || e.ncols() != dim {
            return Err(TbsfError::DimensionMismatch(format!(
                "POVM effect is {}x{} (expected {dim}x{dim})",
                e.nrows(),
                e.ncols()
            )));
        }
        check_effect(e, "POVM effect")?;
        sum += e;
    }
    let dev = max_abs(&(sum - identity(dim)));
    if dev > 1e-8 {
        return Err(TbsfError::IncompletePovm(dev));
    }
    Ok(())
}

/// Validated `(probe dim, system dim)` of an indirect measurement.
fn indirect_dims(rho_probe: &CMatrix, coupling: &CMatrix, probe_povm: &[CMatrix]) -> Result<(usize, usize)> {
    check_density(rho_probe, "probe state")?;
    let dp = rho_probe.nrows();
    let n = coupling.nrows();
    if coupling.ncols() != n || !n.is_multiple_of(dp) {
        return Err(TbsfError::DimensionMismatch(format!(
            "coupling {}x{} does not act on a probe of dim {dp}",
            n,
            coupling.ncols()
        )));
    }
    let err = unitarity_error(coupling);
    if err > 1e-10 {
        return Err(TbsfError::NonUnitaryCoupling(err));
    }
    check_povm(probe_povm, dp)?;
    Ok((dp, n / dp))
}

/// `M_μ(X) = Tr_probe[(E_μ ⊗ 1) U (ρ_probe ⊗ X) U†]`.
fn probe_channel(rho_probe: &CMatrix, coupling: &CMatrix, effect: &CMatrix, x: &CMatrix) -> CMatrix {
    let dp = rho_probe.nrows();
    let d = x.nrows();
    let out = coupling * kron(rho_probe, x) * coupling.adjoint();
    let weighted = kron(effect, &identity(d)) * out;
    crate::linalg::partial_trace_first(&weighted, dp, d)
}

/// Outcome tensors of an indirect measurement: the probe starts in
/// `rho_probe`, couples through `coupling` on `probe ⊗ system` and is read
/// out with `probe_povm`. Outcome labels are the POVM indices.
pub fn build_indirect(rho_probe: &CMatrix, coupling: &CMatrix, probe_povm: &[CMatrix]) -> Result<OutcomeTensorSet> {
    let (_, d) = indirect_dims(rho_probe, coupling, probe_povm)?;
    let mut outcomes = Vec::with_capacity(probe_povm.len());
    for (mu, effect) in probe_povm.iter().enumerate() {
        let mut k = ComplexTensor4::zeros(d);
        for i in 0..d {
            for ip in 0..d {
                let mut x = CMatrix::zeros(d, d);
                x[(i, ip)] = Complex64::new(1.0, 0.0);
                let m = probe_channel(rho_probe, coupling, effect, &x);
                for j in 0..d {
                    for jp in 0..d {
                        k.set(i, ip, j, jp, m[(j, jp)]);
                    }
                }
            }
        }
        outcomes.push((mu.to_string(), k));
    }
    OutcomeTensorSet::new(outcomes)
}

/// `K(μ) = Π(μ) ⊗ conj(Π(μ))` for each distinct eigenvalue.
pub fn projective_set(obs: &HermitianObservable) -> OutcomeTensorSet {
    let outcomes = obs
        .labels()
        .into_iter()
        .zip(obs.projectors())
        .map(|(label, p)| (label, ComplexTensor4::from_operator_pair(p, p)))
        .collect();
    OutcomeTensorSet::new(outcomes).expect("spectral projectors form a valid outcome set")
}

/// `Õ = Σ_s μ_s Π(μ_s) ⊗ conj(Π(μ_s))`.
pub fn auxiliary_tensor(obs: &HermitianObservable) -> ComplexTensor4 {
    obs.eigenvalues()
        .iter()
        .zip(obs.projectors())
        .fold(ComplexTensor4::zeros(obs.dim()), |acc, (&mu, p)| {
            acc.add(&ComplexTensor4::from_operator_pair(p, p).scale(mu))
        })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutcomeProbability {
    pub value: f64,
    /// Set when `K • η` vanishes; `value` is then 0.
    pub zero_postselection: bool,
}

fn check_dims(set_dim: usize, eta: &TimeBidirectionalState) -> Result<()> {
    if set_dim != eta.dim() {
        return Err(TbsfError::DimensionMismatch(format!(
            "outcome set dim {set_dim} vs state dim {}",
            eta.dim()
        )));
    }
    Ok(())
}

/// `P(μ) = K(μ)•η / K•η`.
pub fn outcome_probability(
    set: &OutcomeTensorSet,
    label: &str,
    eta: &TimeBidirectionalState,
) -> Result<OutcomeProbability> {
    check_dims(set.dim(), eta)?;
    let k_mu = set.get(label)?;
    let denom = set.total().contract(eta.tensor()).re;
    if denom <= ZERO_POSTSELECTION_TOL {
        return Ok(OutcomeProbability {
            value: 0.0,
            zero_postselection: true,
        });
    }
    let p = k_mu.contract(eta.tensor()).re / denom;
    Ok(OutcomeProbability {
        value: p.clamp(0.0, 1.0),
        zero_postselection: false,
    })
}

/// All outcome probabilities in label order.
pub fn outcome_distribution(set: &OutcomeTensorSet, eta: &TimeBidirectionalState) -> Result<Vec<f64>> {
    set.labels()
        .iter()
        .map(|l| outcome_probability(set, l, eta).map(|p| p.value))
        .collect()
}

/// Total probability that `e_post` clicks after the indirect measurement,
/// evaluated on the full `probe ⊗ system ⊗ ancilla` network.
pub fn postselection_probability(
    rho_pre: &CMatrix,
    rho_probe: &CMatrix,
    coupling: &CMatrix,
    e_post: &CMatrix,
) -> Result<f64> {
    let dp = rho_probe.nrows();
    let trivial = [identity(dp)];
    let out = evolve_network(rho_pre, rho_probe, coupling, &trivial, e_post)?;
    let p = (kron(&identity(dp), e_post) * out).trace().re;
    Ok(p.clamp(0.0, 1.0))
}

/// `U` applied to `ρ_probe ⊗ ρ_pre` on `probe ⊗ system ⊗ ancilla`.
fn evolve_network(
    rho_pre: &CMatrix,
    rho_probe: &CMatrix,
    coupling: &CMatrix,
    probe_povm: &[CMatrix],
    e_post: &CMatrix,
) -> Result<CMatrix> {
    let (_, d) = indirect_dims(rho_probe, coupling, probe_povm)?;
    check_density(rho_pre, "preselected state")?;
    check_effect(e_post, "postselection effect")?;
    let n = rho_pre.nrows();
    if e_post.nrows() != n || !n.is_multiple_of(d) {
        return Err(TbsfError::DimensionMismatch(format!(
            "pre/post operators of dim {n}/{} do not factor over a system of dim {d}",
            e_post.nrows()
        )));
    }
    let u = kron(coupling, &identity(n / d));
    Ok(&u * kron(rho_probe, rho_pre) * u.adjoint())
}

/// Conditional probability of probe outcome `mu` given postselection,
/// computed directly on the joint `probe ⊗ system ⊗ ancilla` state without
/// any outcome tensors.
pub fn full_network_probability(
    rho_pre: &CMatrix,
    rho_probe: &CMatrix,
    coupling: &CMatrix,
    probe_povm: &[CMatrix],
    mu: usize,
    e_post: &CMatrix,
) -> Result<f64> {
    let effect = probe_povm
        .get(mu)
        .ok_or_else(|| TbsfError::UnknownOutcome(mu.to_string()))?;
    let out = evolve_network(rho_pre, rho_probe, coupling, probe_povm, e_post)?;
    let joint = (kron(effect, e_post) * &out).trace().re;
    let post = (kron(&identity(rho_probe.nrows()), e_post) * &out).trace().re;
    if post <= ZERO_POSTSELECTION_TOL {
        return Err(TbsfError::ZeroPostselection(post));
    }
    Ok((joint / post).clamp(0.0, 1.0))
}

/// `Tr[E_μ Tr_system(U (ρ_probe ⊗ ρ) U†)]`, the textbook probability with
/// no postselection.
pub fn standard_probability(rho: &CMatrix, rho_probe: &CMatrix, coupling: &CMatrix, effect: &CMatrix) -> f64 {
    let dp = rho_probe.nrows();
    let d = rho.nrows();
    let out = coupling * kron(rho_probe, rho) * coupling.adjoint();
    (effect * partial_trace_second(&out, dp, d)).trace().re
}

/// `⟨O⟩ = Õ•η / K•η` for a projective measurement of `obs`.
pub fn mean_value(obs: &HermitianObservable, eta: &TimeBidirectionalState) -> Result<f64> {
    check_dims(obs.dim(), eta)?;
    let set = projective_set(obs);
    let denom = set.total().contract(eta.tensor()).re;
    if denom <= ZERO_POSTSELECTION_TOL {
        return Err(TbsfError::ZeroPostselection(denom));
    }
    Ok(auxiliary_tensor(obs).contract(eta.tensor()).re / denom)
}

/// The weak value `Σ ⟨j|O|i⟩ η_{ik}^{jk} / η_{ik}^{ik}`.
pub fn weak_value(obs: &HermitianObservable, eta: &TimeBidirectionalState) -> Result<Complex64> {
    check_dims(obs.dim(), eta)?;
    let one = identity(obs.dim());
    let numer = ComplexTensor4::from_operator_pair(obs.matrix(), &one).contract(eta.tensor());
    let denom = weak_denominator(eta);
    if denom.abs() <= ZERO_POSTSELECTION_TOL {
        return Err(TbsfError::OrthogonalPrePost(denom.abs()));
    }
    Ok(numer / denom)
}

/// `(1⊗1)•η`, real and nonnegative for a valid state.
pub fn weak_denominator(eta: &TimeBidirectionalState) -> f64 {
    let one = identity(eta.dim());
    ComplexTensor4::from_operator_pair(&one, &one).contract(eta.tensor()).re
}

/// `(Π_a ⊗ conj Π_b)•η`, the interference weights of eigen-branches `a, b`.
pub fn branch_weights(obs: &HermitianObservable, eta: &TimeBidirectionalState) -> Vec<Vec<Complex64>> {
    let ps = obs.projectors();
    ps.iter()
        .map(|a| {
            ps.iter()
                .map(|b| ComplexTensor4::from_operator_pair(a, b).contract(eta.tensor()))
                .collect()
        })
        .collect()
}
