//! Exact conditional moments of a Gaussian pointer weakly coupled to an
//! observable, compared with the first-order weak-value predictions.
//!
//! The probe wave function is `ψ(q) = (2πσ²)^{-1/4} exp(−q²/4σ²)`. The
//! coupling `exp(−iε O ⊗ P)` shifts the pointer by `ε μ_s` on the eigenspace
//! of `μ_s`, so after postselection the pointer state is
//! `Σ_{ss'} w_{ss'} |ψ_s⟩⟨ψ_{s'}|` with `w_{ss'} = (Π_s ⊗ conj Π_{s'})•η`.
//! Moments of that state are evaluated by trapezoidal quadrature, using the
//! analytic derivative `ψ'(x) = −x ψ(x) / 2σ²` for the momentum.

use crate::error::{Result, TbsfError};
use crate::measurement::{branch_weights, weak_value, HermitianObservable};
use crate::state::TimeBidirectionalState;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianProbeConfig {
    pub sigma: f64,
    pub epsilon: f64,
    /// Half-width of the quadrature support in units of `sigma`.
    pub grid_halfwidth: f64,
    pub grid_points: usize,
}

impl Default for GaussianProbeConfig {
    fn default() -> Self {
        Self {
            sigma: 1.0,
            epsilon: 1e-3,
            grid_halfwidth: 10.0,
            grid_points: 4096,
        }
    }
}

impl GaussianProbeConfig {
    pub fn with_epsilon(self, epsilon: f64) -> Self {
        Self { epsilon, ..self }
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.grid_halfwidth * self.sigma / (self.grid_points.max(2) - 1) as f64
    }

    /// Check the grid resolves every shifted branch.
    pub fn validate(&self, max_abs_eigenvalue: f64) -> Result<()> {
        if !self.sigma.is_finite() || self.sigma <= 0.0 || !self.epsilon.is_finite() {
            return Err(TbsfError::InvalidInput(format!(
                "sigma {} must be positive and epsilon {} finite",
                self.sigma, self.epsilon
            )));
        }
        if self.grid_points < 2 || self.spacing() > self.sigma / 20.0 {
            return Err(TbsfError::GridTooCoarse(format!(
                "spacing {:.3e} exceeds sigma/20 = {:.3e}",
                self.spacing(),
                self.sigma / 20.0
            )));
        }
        let needed = 8.0 * self.sigma + self.epsilon.abs() * max_abs_eigenvalue;
        if self.grid_halfwidth * self.sigma < needed {
            return Err(TbsfError::GridTooCoarse(format!(
                "half-width {:.3} is below the required {needed:.3}",
                self.grid_halfwidth * self.sigma
            )));
        }
        Ok(())
    }

    fn grid(&self) -> (Vec<f64>, f64) {
        let h = self.spacing();
        let l = self.grid_halfwidth * self.sigma;
        let xs = (0..self.grid_points).map(|k| -l + h * k as f64).collect();
        (xs, h)
    }

    fn psi(&self, x: f64) -> f64 {
        let s2 = self.sigma * self.sigma;
        (2.0 * std::f64::consts::PI * s2).powf(-0.25) * (-x * x / (4.0 * s2)).exp()
    }

    fn dpsi(&self, x: f64) -> f64 {
        -x / (2.0 * self.sigma * self.sigma) * self.psi(x)
    }
}

fn trapezoid(h: f64, values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut first = None;
    let mut last = 0.0;
    for v in values {
        if first.is_none() {
            first = Some(v);
        }
        sum += v;
        last = v;
    }
    h * (sum - 0.5 * (first.unwrap_or(0.0) + last))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeMoments {
    pub mean_q: f64,
    pub mean_p: f64,
}

/// Exact postselected pointer moments `(⟨Q⟩, ⟨P⟩)`.
pub fn probe_conditional_moments(
    obs: &HermitianObservable,
    eta: &TimeBidirectionalState,
    cfg: &GaussianProbeConfig,
) -> Result<ProbeMoments> {
    let mus = obs.eigenvalues();
    let max_mu = mus.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    cfg.validate(max_mu)?;
    // propagates OrthogonalPrePost
    weak_value(obs, eta)?;
    let w = branch_weights(obs, eta);
    let (xs, h) = cfg.grid();
    let n = mus.len();

    let mut norm = Complex64::new(0.0, 0.0);
    let mut q = Complex64::new(0.0, 0.0);
    let mut p = Complex64::new(0.0, 0.0);
    for s in 0..n {
        let a = cfg.epsilon * mus[s];
        for sp in 0..n {
            let b = cfg.epsilon * mus[sp];
            let overlap = trapezoid(h, xs.iter().map(|&x| cfg.psi(x - a) * cfg.psi(x - b)));
            let first = trapezoid(h, xs.iter().map(|&x| x * cfg.psi(x - a) * cfg.psi(x - b)));
            // ⟨ψ_{s'}| P |ψ_s⟩ = −i ∫ ψ_{s'} ψ_s'
            let deriv = trapezoid(h, xs.iter().map(|&x| cfg.psi(x - b) * cfg.dpsi(x - a)));
            norm += w[s][sp] * overlap;
            q += w[s][sp] * first;
            p += w[s][sp] * Complex64::new(0.0, -deriv);
        }
    }
    if norm.re <= crate::measurement::ZERO_POSTSELECTION_TOL {
        return Err(TbsfError::ZeroPostselection(norm.re));
    }
    Ok(ProbeMoments {
        mean_q: (q / norm).re,
        mean_p: (p / norm).re,
    })
}

/// `(ε Re O_w, (ε/4σ²) Im O_w)`.
pub fn first_order_prediction(
    obs: &HermitianObservable,
    eta: &TimeBidirectionalState,
    cfg: &GaussianProbeConfig,
) -> Result<(f64, f64)> {
    let w = weak_value(obs, eta)?;
    let eps = cfg.epsilon;
    let s2 = cfg.sigma * cfg.sigma;
    Ok((eps * w.re, eps / (4.0 * s2) * w.im))
}

/// Linear response of the pointer momentum, `2ε ⟨P²⟩_ψ Im O_w`.
///
/// For the Gaussian pointer `⟨P²⟩_ψ = 1/(4σ²)`, so this is `(ε/2σ²) Im O_w`,
/// twice the coefficient used by [`first_order_prediction`].
pub fn momentum_linear_response(
    obs: &HermitianObservable,
    eta: &TimeBidirectionalState,
    cfg: &GaussianProbeConfig,
) -> Result<f64> {
    let w = weak_value(obs, eta)?;
    Ok(2.0 * cfg.epsilon * momentum_second_moment(cfg) * w.im)
}

/// `⟨P²⟩_ψ = ∫ ψ'(q)² dq` on the configured grid.
pub fn momentum_second_moment(cfg: &GaussianProbeConfig) -> f64 {
    let (xs, h) = cfg.grid();
    trapezoid(h, xs.iter().map(|&x| cfg.dpsi(x).powi(2)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub epsilon: f64,
    pub exact_q: f64,
    pub exact_p: f64,
    pub pred_q: f64,
    pub pred_p: f64,
}

impl SweepPoint {
    pub fn residual_q(&self) -> f64 {
        (self.exact_q - self.pred_q).abs()
    }

    pub fn residual_p(&self) -> f64 {
        (self.exact_p - self.pred_p).abs()
    }
}

pub fn epsilon_sweep(
    obs: &HermitianObservable,
    eta: &TimeBidirectionalState,
    cfg: &GaussianProbeConfig,
    epsilons: &[f64],
) -> Result<Vec<SweepPoint>> {
    epsilons
        .iter()
        .map(|&e| {
            let c = cfg.with_epsilon(e);
            let m = probe_conditional_moments(obs, eta, &c)?;
            let (pq, pp) = first_order_prediction(obs, eta, &c)?;
            Ok(SweepPoint {
                epsilon: e,
                exact_q: m.mean_q,
                exact_p: m.mean_p,
                pred_q: pq,
                pred_p: pp,
            })
        })
        .collect()
}

/// `(m(2ε) − 2 m(ε)) / ε²` for the `(Q, P)` moments; finite and
/// ε-independent when the moments are linear in ε up to `O(ε²)`.
pub fn richardson_ratio(
    obs: &HermitianObservable,
    eta: &TimeBidirectionalState,
    cfg: &GaussianProbeConfig,
) -> Result<(f64, f64)> {
    let e = cfg.epsilon;
    let m1 = probe_conditional_moments(obs, eta, cfg)?;
    let m2 = probe_conditional_moments(obs, eta, &cfg.with_epsilon(2.0 * e))?;
    Ok((
        (m2.mean_q - 2.0 * m1.mean_q) / (e * e),
        (m2.mean_p - 2.0 * m1.mean_p) / (e * e),
    ))
}
