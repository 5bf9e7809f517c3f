//! Counts-weighted log-likelihood and its maximization over `η = TT†/Tr(TT†)`.

use super::dataset::TomographyDataset;
use super::schemes::check_informationally_complete;
use crate::error::{Result, TbsfError};
use crate::linalg::{conj, identity, CMatrix};
use crate::state::TimeBidirectionalState;
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;

pub const PROBABILITY_FLOOR: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MleOptions {
    pub max_iterations: usize,
    pub relative_tolerance: f64,
    pub gradient_tolerance: f64,
    pub initial_step: f64,
}

impl Default for MleOptions {
    fn default() -> Self {
        Self {
            max_iterations: 5000,
            relative_tolerance: 1e-10,
            gradient_tolerance: 1e-8,
            initial_step: 1.0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReconstructionResult {
    pub eta_hat: TimeBidirectionalState,
    pub log_likelihood: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Log-likelihood after each accepted step, starting with the initial point.
    pub history: Vec<f64>,
}

/// A configuration reduced to `(n_μ, Ĝ_μ)` terms and its total `(N, Ĝ)`,
/// where `Ĝ = conj(flat K)` so that `K•η = Tr(Ĝ F)`.
struct Term {
    outcomes: Vec<(f64, CMatrix)>,
    total_count: f64,
    total: CMatrix,
}

struct Objective {
    terms: Vec<Term>,
    n: f64,
    dim: usize,
}

fn tr_prod(a: &CMatrix, b: &CMatrix) -> f64 {
    // Re Tr(a b) without forming the product
    a.iter().zip(b.transpose().iter()).map(|(x, y)| (x * y).re).sum()
}

impl Objective {
    fn new(data: &TomographyDataset) -> Result<Self> {
        let mut terms = Vec::new();
        let mut dim = 0;
        for cc in &data.configs {
            let passed = cc.postselection_passed();
            if passed <= 0.0 {
                continue;
            }
            let set = cc.config.outcome_tensors();
            dim = set.dim();
            let mut outcomes = Vec::new();
            for (label, &n) in cc.labels.iter().zip(&cc.counts) {
                if n > 0.0 {
                    outcomes.push((n, conj(set.get(label)?.flat())));
                }
            }
            terms.push(Term {
                outcomes,
                total_count: passed,
                total: conj(set.total().flat()),
            });
        }
        if terms.is_empty() {
            return Err(TbsfError::InvalidInput("dataset has no postselected counts".into()));
        }
        let n = terms.iter().map(|t| t.total_count).sum();
        Ok(Self { terms, n, dim })
    }

    /// `Σ_c Σ_μ n log(K_μ•F / K_c•F)`; invariant under rescaling `F`.
    fn value(&self, f: &CMatrix) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                let denom = tr_prod(&t.total, f).max(PROBABILITY_FLOOR);
                t.outcomes
                    .iter()
                    .map(|(n, g)| {
                        n * (tr_prod(g, f).max(PROBABILITY_FLOOR) / denom)
                            .max(PROBABILITY_FLOOR)
                            .ln()
                    })
                    .sum::<f64>()
            })
            .sum()
    }

    /// Gradient with respect to `T̄` of the per-count likelihood at `F = TT†`.
    fn gradient(&self, t: &CMatrix) -> CMatrix {
        let f = t * t.adjoint();
        let d2 = self.dim * self.dim;
        let mut r = CMatrix::zeros(d2, d2);
        for term in &self.terms {
            for (n, g) in &term.outcomes {
                r += g.scale(n / tr_prod(g, &f).max(PROBABILITY_FLOOR));
            }
            r -= term
                .total
                .scale(term.total_count / tr_prod(&term.total, &f).max(PROBABILITY_FLOOR));
        }
        (r * t).scale(1.0 / self.n)
    }
}

const MEMORY: usize = 10;

/// Two-loop recursion for the quasi-Newton ascent direction.
fn lbfgs_direction(g: &CMatrix, memory: &VecDeque<(CMatrix, CMatrix)>) -> CMatrix {
    let mut q = g.clone();
    let mut alphas = Vec::with_capacity(memory.len());
    for (sv, yv) in memory.iter().rev() {
        let rho = 1.0 / real_inner(yv, sv);
        let alpha = rho * real_inner(sv, &q);
        q -= yv.scale(alpha);
        alphas.push((alpha, rho));
    }
    if let Some((sv, yv)) = memory.back() {
        q *= crate::linalg::c(real_inner(sv, yv) / real_inner(yv, yv), 0.0);
    }
    for ((sv, yv), (alpha, rho)) in memory.iter().zip(alphas.into_iter().rev()) {
        let beta = rho * real_inner(yv, &q);
        q += sv.scale(alpha - beta);
    }
    q
}

fn step_to(obj: &Objective, t: &CMatrix, direction: &CMatrix, step: f64) -> (CMatrix, f64) {
    let mut cand = t + direction.scale(step);
    cand /= crate::linalg::c(cand.norm(), 0.0);
    let v = obj.value(&(&cand * cand.adjoint())) / obj.n;
    (cand, v)
}

/// Backtrack from `step` until the likelihood does not decrease, or expand
/// while it keeps increasing. Returns `None` when no step helps.
fn line_search(
    obj: &Objective,
    t: &CMatrix,
    direction: &CMatrix,
    value: f64,
    step: &mut f64,
) -> Option<(CMatrix, f64)> {
    let mut s = *step;
    let (mut best, mut best_value) = step_to(obj, t, direction, s);
    if best_value >= value {
        for _ in 0..30 {
            let (cand, v) = step_to(obj, t, direction, 2.0 * s);
            if v <= best_value {
                break;
            }
            s *= 2.0;
            best = cand;
            best_value = v;
        }
    } else {
        loop {
            s *= 0.5;
            if s < 1e-300 {
                return None;
            }
            (best, best_value) = step_to(obj, t, direction, s);
            if best_value >= value {
                break;
            }
        }
    }
    *step = s;
    Some((best, best_value))
}

fn real_inner(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x.conj() * y).re).sum()
}

fn factor_to_state(t: &CMatrix) -> Result<TimeBidirectionalState> {
    TimeBidirectionalState::from_flat_normalized(t * t.adjoint())
}

/// Counts-weighted log-likelihood of `eta` for the dataset.
pub fn log_likelihood(data: &TomographyDataset, eta: &TimeBidirectionalState) -> Result<f64> {
    Ok(Objective::new(data)?.value(eta.matrix()))
}

/// Frobenius norm of the likelihood gradient at `T = √F(η)`, per count.
pub fn gradient_norm_at(data: &TomographyDataset, eta: &TimeBidirectionalState) -> Result<f64> {
    let obj = Objective::new(data)?;
    let t = crate::linalg::psd_sqrt(eta.matrix());
    Ok(obj.gradient(&t).norm())
}

/// Maximum-likelihood `η̂` by ascent on the factor `T`.
///
/// Directions come from a limited-memory quasi-Newton recursion over the
/// likelihood gradient; the step adapts by doubling or halving so that every
/// accepted iterate is at least as likely as the previous one.
/// Stops when the relative likelihood change falls below
/// `relative_tolerance` or the gradient norm below `gradient_tolerance`;
/// otherwise returns the best iterate with `converged = false`.
pub fn mle_reconstruct(data: &TomographyDataset, opts: &MleOptions) -> Result<ReconstructionResult> {
    let configs: Vec<_> = data
        .configs
        .iter()
        .filter(|c| c.postselection_passed() > 0.0)
        .map(|c| c.config)
        .collect();
    check_informationally_complete(&configs)?;
    let obj = Objective::new(data)?;
    let d2 = obj.dim * obj.dim;

    let mut t = identity(d2).scale(1.0 / (d2 as f64).sqrt());
    let mut value = obj.value(&(&t * t.adjoint())) / obj.n;
    let mut history = vec![value * obj.n];
    let mut step = opts.initial_step;
    let mut converged = false;
    let mut iterations = 0;

    let mut memory: VecDeque<(CMatrix, CMatrix)> = VecDeque::new();
    let mut prev: Option<(CMatrix, CMatrix)> = None;

    while iterations < opts.max_iterations {
        iterations += 1;
        let g = obj.gradient(&t);
        if g.norm() < opts.gradient_tolerance {
            converged = true;
            break;
        }
        if let Some((pt, pg)) = prev.take() {
            // ascent form: s = Δt, y = −Δg, stored only when curvature is positive
            let sv = &t - pt;
            let yv = &pg - &g;
            if real_inner(&sv, &yv) > 1e-300 {
                if memory.len() == MEMORY {
                    memory.pop_front();
                }
                memory.push_back((sv, yv));
            }
        }
        let mut direction = lbfgs_direction(&g, &memory);
        if real_inner(&direction, &g) <= 0.0 {
            memory.clear();
            direction = g.clone();
        }
        prev = Some((t.clone(), g));

        let accepted = line_search(&obj, &t, &direction, value, &mut step);
        let Some((cand, cand_value)) = accepted else {
            // no ascent direction left at floating-point resolution
            converged = true;
            break;
        };
        let rel = (cand_value - value).abs() / value.abs().max(f64::MIN_POSITIVE);
        t = cand;
        value = cand_value;
        history.push(value * obj.n);
        if rel < opts.relative_tolerance {
            converged = true;
            break;
        }
    }

    Ok(ReconstructionResult {
        eta_hat: factor_to_state(&t)?,
        log_likelihood: value * obj.n,
        iterations,
        converged,
        history,
    })
}
