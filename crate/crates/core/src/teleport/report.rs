//! Table-style summary of a teleportation run.

use super::circuits::{BellOutcome, Particle};
use super::demo::{reconstruct_exact, reconstruct_from_counts, sample_counts, ParticleResult, TeleportScenario};
use super::fit::{fit_noise, NoiseFit};
use super::predictions::{ideal_prediction, EtaTriple};
use crate::error::{Result, TbsfError};
use crate::linalg::CMatrix;
use crate::qcsim::{CountsRow, NoiseModel};
use crate::state::TimeBidirectionalState;
use crate::tomography::metrics::{fidelity, linear_entropy};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Part {
    Full,
    Forward,
    Backward,
}

impl Part {
    pub const ALL: [Part; 3] = [Part::Full, Part::Forward, Part::Backward];

    pub fn of(self, eta: &TimeBidirectionalState) -> CMatrix {
        match self {
            Part::Full => eta.matrix().clone(),
            Part::Forward => eta.reduced_forward(),
            Part::Backward => eta.reduced_backward(),
        }
    }

    fn suffix(self) -> &'static str {
        match self {
            Part::Full => "",
            Part::Forward => "↑",
            Part::Backward => "↓",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricRow {
    pub particle: Particle,
    pub part: Part,
    pub fidelity: f64,
    pub linear_entropy: f64,
}

impl MetricRow {
    pub fn label(&self) -> String {
        format!("eta_{}{}", self.particle.name(), self.part.suffix())
    }
}

/// The nine rows `(η, η↑, η↓)` for `A, B, C`, each compared with `reference`.
pub fn metric_rows(etas: &EtaTriple, reference: &EtaTriple) -> Vec<MetricRow> {
    let mut rows = Vec::with_capacity(9);
    for p in Particle::ALL {
        for part in Part::ALL {
            let m = part.of(etas.get(p));
            rows.push(MetricRow {
                particle: p,
                part,
                fidelity: fidelity(&m, &part.of(reference.get(p))),
                linear_entropy: linear_entropy(&m),
            });
        }
    }
    rows
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParticleReport {
    pub particle: Particle,
    pub eta: TimeBidirectionalState,
    #[serde(with = "crate::json::complex_rows")]
    pub forward: CMatrix,
    #[serde(with = "crate::json::complex_rows")]
    pub backward: CMatrix,
    pub shots: f64,
    pub postselection_passed: f64,
    pub survival_fraction: f64,
    pub converged: bool,
    pub iterations: usize,
}

impl From<&ParticleResult> for ParticleReport {
    fn from(r: &ParticleResult) -> Self {
        Self {
            particle: r.particle,
            forward: r.eta.reduced_forward(),
            backward: r.eta.reduced_backward(),
            eta: r.eta.clone(),
            shots: r.counts.shots,
            postselection_passed: r.counts.postselection_passed(),
            survival_fraction: r.survival_fraction(),
            converged: r.converged,
            iterations: r.iterations,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DemoReport {
    pub target_state: Vec<Complex64>,
    pub postselect: Option<BellOutcome>,
    pub exact: bool,
    pub shots: u64,
    pub seed: u64,
    pub noise: NoiseModel,
    pub particles: Vec<ParticleReport>,
    /// Noiseless prediction the fidelities refer to.
    pub ideal: EtaTriple,
    pub rows: Vec<MetricRow>,
    pub survival_fraction: f64,
    /// Least-squares `(f_pr, f_ms)` for postselected runs.
    pub noise_fit: Option<NoiseFit>,
}

impl DemoReport {
    pub fn from_results(scenario: &TeleportScenario, exact: bool, results: &[ParticleResult]) -> Result<Self> {
        let find = |p: Particle| {
            results
                .iter()
                .find(|r| r.particle == p)
                .map(|r| r.eta.clone())
                .ok_or_else(|| TbsfError::InvalidInput(format!("missing particle {}", p.name())))
        };
        let etas = EtaTriple {
            a: find(Particle::A)?,
            b: find(Particle::B)?,
            c: find(Particle::C)?,
        };
        let ideal = ideal_prediction(&scenario.target_state, scenario.postselect)?;
        let rows = metric_rows(&etas, &ideal);
        let passed: f64 = results.iter().map(|r| r.counts.postselection_passed()).sum();
        let shots: f64 = results.iter().map(|r| r.counts.shots).sum();
        let noise_fit = match scenario.postselect {
            Some(o) => Some(fit_noise(&rows, o, &scenario.target_state)?),
            None => None,
        };
        let report = Self {
            target_state: scenario.target_state.iter().copied().collect(),
            postselect: scenario.postselect,
            exact,
            shots: scenario.shots,
            seed: scenario.seed,
            noise: scenario.noise.clone(),
            particles: results.iter().map(ParticleReport::from).collect(),
            ideal,
            rows,
            survival_fraction: if shots > 0.0 { passed / shots } else { 0.0 },
            noise_fit,
        };
        report.validate()?;
        Ok(report)
    }

    pub fn validate(&self) -> Result<()> {
        for r in &self.rows {
            if !(0.0..=1.0).contains(&r.fidelity) || !r.fidelity.is_finite() {
                return Err(TbsfError::InvariantViolation(format!(
                    "{} fidelity {}",
                    r.label(),
                    r.fidelity
                )));
            }
            let max_entropy = if r.part == Part::Full { 0.75 } else { 0.5 };
            if !(-1e-9..=max_entropy + 1e-9).contains(&r.linear_entropy) {
                return Err(TbsfError::InvariantViolation(format!(
                    "{} linear entropy {}",
                    r.label(),
                    r.linear_entropy
                )));
            }
        }
        Ok(())
    }

    pub fn row(&self, particle: Particle, part: Part) -> &MetricRow {
        self.rows
            .iter()
            .find(|r| r.particle == particle && r.part == part)
            .expect("report has all nine rows")
    }

    /// Fidelities of the parts carrying `|ψ⟩`: `(A↑, B↓, C↑)`.
    pub fn carrier_fidelities(&self) -> (f64, f64, f64) {
        (
            self.row(Particle::A, Part::Forward).fidelity,
            self.row(Particle::B, Part::Backward).fidelity,
            self.row(Particle::C, Part::Forward).fidelity,
        )
    }

    pub fn ordering_holds(&self) -> bool {
        let (a, b, c) = self.carrier_fidelities();
        a >= b && b >= c
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let post = self.postselect.map_or("none", |o| o.label());
        let mode = if self.exact { "exact" } else { "sampled" };
        writeln!(
            s,
            "postselection: {post}   mode: {mode}   shots/circuit: {}   seed: {}",
            self.shots, self.seed
        )
        .unwrap();
        writeln!(s, "survival fraction: {:.4}", self.survival_fraction).unwrap();
        writeln!(s).unwrap();
        writeln!(s, "{:<10} {:>9} {:>15}", "state", "fidelity", "linear entropy").unwrap();
        for r in &self.rows {
            writeln!(s, "{:<10} {:>9.4} {:>15.4}", r.label(), r.fidelity, r.linear_entropy).unwrap();
        }
        if let Some(fit) = &self.noise_fit {
            writeln!(s).unwrap();
            writeln!(
                s,
                "noise fit: f_pr = {:.4}, f_ms = {:.4}, rms residual = {:.4}",
                fit.f_pr, fit.f_ms, fit.residual
            )
            .unwrap();
        }
        for p in &self.particles {
            if !p.converged {
                writeln!(s, "warning: reconstruction of {} did not converge", p.particle.name()).unwrap();
            }
        }
        s
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn rows_csv(&self) -> Result<String> {
        let mut wr = csv::Writer::from_writer(Vec::new());
        wr.write_record(["state", "fidelity", "linear_entropy"])?;
        for r in &self.rows {
            wr.write_record([
                r.label(),
                format!("{:.10}", r.fidelity),
                format!("{:.10}", r.linear_entropy),
            ])?;
        }
        let bytes = wr.into_inner().map_err(|e| TbsfError::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv is utf-8"))
    }

    pub fn all_converged(&self) -> bool {
        self.particles.iter().all(|p| p.converged)
    }
}

/// Run the scenario on the exact or sampled path. Sampled runs also return
/// their raw records.
pub fn run_demo(scenario: &TeleportScenario, exact: bool) -> Result<(DemoReport, Vec<CountsRow>)> {
    if exact {
        let results = reconstruct_exact(scenario)?;
        Ok((DemoReport::from_results(scenario, true, &results)?, Vec::new()))
    } else {
        let rows = sample_counts(scenario)?;
        let results = reconstruct_from_counts(scenario, &rows)?;
        Ok((DemoReport::from_results(scenario, false, &results)?, rows))
    }
}

/// Rebuild the report of a scenario from externally supplied counts.
pub fn report_from_counts(scenario: &TeleportScenario, rows: &[CountsRow]) -> Result<DemoReport> {
    let results = reconstruct_from_counts(scenario, rows)?;
    DemoReport::from_results(scenario, false, &results)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub f_pr: f64,
    pub f_ms: f64,
    pub fidelity_a_forward: f64,
    pub fidelity_b_backward: f64,
    pub fidelity_c_forward: f64,
}

/// Exact-path carrier fidelities along the diagonal `f_pr = f_ms = f`.
pub fn noise_sweep(scenario: &TeleportScenario, fs: &[f64]) -> Result<Vec<SweepRow>> {
    fs.iter()
        .map(|&f| {
            let s = TeleportScenario {
                noise: NoiseModel {
                    bell_prep_f: f,
                    bell_meas_f: f,
                    ..scenario.noise.clone()
                },
                ..scenario.clone()
            };
            let results = reconstruct_exact(&s)?;
            let report = DemoReport::from_results(&s, true, &results)?;
            let (a, b, c) = report.carrier_fidelities();
            Ok(SweepRow {
                f_pr: f,
                f_ms: f,
                fidelity_a_forward: a,
                fidelity_b_backward: b,
                fidelity_c_forward: c,
            })
        })
        .collect()
}

pub fn sweep_csv(rows: &[SweepRow]) -> Result<String> {
    let mut wr = csv::Writer::from_writer(Vec::new());
    for r in rows {
        wr.serialize(r)?;
    }
    let bytes = wr.into_inner().map_err(|e| TbsfError::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv is utf-8"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rows_follow_table_order() {
        let (report, raw) = run_demo(&TeleportScenario::default(), true).unwrap();
        assert!(raw.is_empty());
        let labels: Vec<String> = report.rows.iter().map(|r| r.label()).collect();
        assert_eq!(
            labels,
            ["eta_A", "eta_A↑", "eta_A↓", "eta_B", "eta_B↑", "eta_B↓", "eta_C", "eta_C↑", "eta_C↓"]
        );
        for r in &report.rows {
            assert!((r.fidelity - 1.0).abs() < 1e-8, "{}", r.label());
        }
        assert!(report.to_text().contains("eta_B↓"));
        assert_eq!(report.rows_csv().unwrap().lines().count(), 10);
    }

    #[test]
    fn json_round_trip_is_exact() {
        let (report, _) = run_demo(&TeleportScenario::default(), true).unwrap();
        let back = DemoReport::from_json_str(&report.to_json_string()).unwrap();
        assert_eq!(back, report);
    }

    #[test]
    fn sweep_has_ordered_carriers() {
        let rows = noise_sweep(&TeleportScenario::default(), &[1.0, 0.8]).unwrap();
        assert_eq!(rows.len(), 2);
        for r in &rows {
            assert!(r.fidelity_a_forward >= r.fidelity_b_backward - 1e-9);
            assert!(r.fidelity_b_backward >= r.fidelity_c_forward - 1e-9);
        }
        assert!(sweep_csv(&rows).unwrap().starts_with("f_pr,f_ms,"));
    }
}
