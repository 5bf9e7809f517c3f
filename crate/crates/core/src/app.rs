//! Command-line front end. Every subcommand is deterministic in `--seed`.

use crate::error::{Result, TbsfError};
use crate::json::MatrixJson;
use crate::linalg::{pauli_x, pauli_y, pauli_z, CMatrix, CVector};
use crate::measurement::{mean_value, weak_value, HermitianObservable};
use crate::qcsim::{self, io::write_counts, Circuit, NoiseModel};
use crate::state::TimeBidirectionalState;
use crate::teleport::{self, BellOutcome, TeleportScenario};
use crate::tomography::{
    fidelity, linear_entropy, linear_inversion, log_likelihood, mle_reconstruct, simulate_dataset, trace_distance,
    MleOptions, Scheme, TomographyConfig,
};
use crate::weak_probe::{
    epsilon_sweep, first_order_prediction, momentum_linear_response, probe_conditional_moments, GaussianProbeConfig,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;
use std::fs;
use std::path::{Path, PathBuf};

#[derive(Debug, Parser)]
#[command(
    name = "tbsf",
    version,
    about = "Time-bidirectional states of pre- and postselected qubits"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tomography of the three particles of a postselected teleportation run.
    TeleportDemo(TeleportArgs),
    /// Simulate single-qubit tomography of a given state and reconstruct it.
    Tomography(TomographyArgs),
    /// Weak value of an observable and the exact response of a Gaussian probe.
    WeakValue(WeakValueArgs),
    /// Run a circuit given as JSON.
    Simulate(SimulateArgs),
}

#[derive(Debug, Clone, Args)]
pub struct NoiseArgs {
    /// `p1,p2,f_pr,f_ms[,readout]`; readout is `r` (symmetric flip) or `r01:r10`.
    #[arg(long, default_value = "0,0,1,1")]
    pub noise: String,
}

#[derive(Debug, Args)]
pub struct TeleportArgs {
    #[arg(long, default_value_t = 20_000)]
    pub shots: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub noise: NoiseArgs,
    /// Bell outcome to postselect on: phi+, phi-, psi+, psi- or none.
    #[arg(long, default_value = "phi+")]
    pub postselect: String,
    /// Use exact outcome distributions instead of sampling.
    #[arg(long)]
    pub exact: bool,
    /// Reconstruct from a counts CSV (`config_id` = A, B or C) instead of simulating.
    #[arg(long)]
    pub counts_in: Option<PathBuf>,
    /// Also write carrier fidelities along `f_pr = f_ms` to `sweep.csv`.
    #[arg(long)]
    pub sweep: bool,
    #[arg(long, default_value = "teleport-out")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Method {
    Mle,
    Linear,
}

#[derive(Debug, Args)]
pub struct TomographyArgs {
    #[arg(long, default_value = "sic")]
    pub scheme: String,
    #[arg(long, default_value_t = 100_000)]
    pub shots: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub noise: NoiseArgs,
    /// State JSON (`{"dim", "index_convention", "matrix"}`); defaults to `|ψ⟩⟨ψ| ⊗ 1/2`
    /// with the default teleportation target.
    #[arg(long)]
    pub state: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "mle")]
    pub method: Method,
    /// Iteration cap for the likelihood maximization.
    #[arg(long, default_value_t = MleOptions::default().max_iterations)]
    pub max_iterations: usize,
    #[arg(long, default_value = "tomography-out")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct WeakValueArgs {
    /// Preselected state as comma-separated amplitudes, e.g. `1,1` or `1,0.5+0.5i`.
    #[arg(long, allow_hyphen_values = true)]
    pub pre: Option<String>,
    /// Postselected state, same format as `--pre`.
    #[arg(long, allow_hyphen_values = true)]
    pub post: Option<String>,
    /// Full state JSON instead of `--pre`/`--post`.
    #[arg(long)]
    pub state: Option<PathBuf>,
    /// `x`, `y`, `z`, or a path to a matrix JSON (`{"dim", "matrix"}`).
    #[arg(long, default_value = "z")]
    pub observable: String,
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub epsilon: f64,
    /// Comma-separated couplings for an ε sweep.
    #[arg(long)]
    pub sweep: Option<String>,
    /// Write the JSON result here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub circuit: PathBuf,
    #[arg(long, default_value_t = 1000)]
    pub shots: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub noise: NoiseArgs,
    /// Print exact outcome probabilities instead of sampled counts.
    #[arg(long)]
    pub exact: bool,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parse `p1,p2,f_pr,f_ms[,readout]`.
pub fn parse_noise(s: &str) -> Result<NoiseModel> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if !(4..=5).contains(&parts.len()) {
        return Err(TbsfError::InvalidInput(format!(
            "--noise expects p1,p2,f_pr,f_ms[,readout], got {s:?}"
        )));
    }
    let num = |t: &str| -> Result<f64> {
        t.parse::<f64>()
            .map_err(|_| TbsfError::InvalidInput(format!("not a number in --noise: {t:?}")))
    };
    let mut model = NoiseModel {
        p1: num(parts[0])?,
        p2: num(parts[1])?,
        bell_prep_f: num(parts[2])?,
        bell_meas_f: num(parts[3])?,
        ..NoiseModel::ideal()
    };
    if let Some(r) = parts.get(4) {
        let pair = match r.split_once(':') {
            Some((a, b)) => (num(a)?, num(b)?),
            None => (num(r)?, num(r)?),
        };
        model.readout = vec![pair; qcsim::circuit::MAX_QUBITS];
    }
    model.validate()?;
    Ok(model)
}

fn parse_vector(s: &str) -> Result<CVector> {
    let amps = s
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<Complex64>()
                .map_err(|_| TbsfError::InvalidInput(format!("not a complex number: {t:?}")))
        })
        .collect::<Result<Vec<_>>>()?;
    let v = CVector::from_vec(amps);
    if v.norm() == 0.0 {
        return Err(TbsfError::InvalidInput("state vector is zero".into()));
    }
    Ok(v.normalize())
}

fn parse_observable(s: &str) -> Result<CMatrix> {
    match s {
        "x" => Ok(pauli_x()),
        "y" => Ok(pauli_y()),
        "z" => Ok(pauli_z()),
        path => {
            let json: MatrixJson = serde_json::from_str(&fs::read_to_string(path)?)?;
            json.to_matrix()
        }
    }
}

fn write(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents)?;
    Ok(())
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

/// Run a parsed command; the returned value is the process exit code.
pub fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::TeleportDemo(a) => teleport_demo(a),
        Command::Tomography(a) => tomography(a),
        Command::WeakValue(a) => weak_value_cmd(a),
        Command::Simulate(a) => simulate(a),
    }
}

const NON_CONVERGED: i32 = 3;

fn teleport_demo(a: TeleportArgs) -> Result<i32> {
    let postselect = match a.postselect.as_str() {
        "none" => None,
        s => Some(s.parse::<BellOutcome>()?),
    };
    let scenario = TeleportScenario {
        postselect,
        shots: a.shots,
        seed: a.seed,
        noise: parse_noise(&a.noise.noise)?,
        ..TeleportScenario::default()
    };
    scenario.validate()?;
    fs::create_dir_all(&a.out)?;
    let report = if let Some(path) = &a.counts_in {
        let rows = qcsim::io::read_counts(fs::File::open(path)?)?;
        teleport::report_from_counts(&scenario, &rows)?
    } else {
        let (report, rows) = teleport::run_demo(&scenario, a.exact)?;
        if !rows.is_empty() {
            write_counts(fs::File::create(a.out.join("counts.csv"))?, &rows)?;
        }
        report
    };
    write(&a.out.join("report.json"), &report.to_json_string())?;
    write(&a.out.join("table.csv"), &report.rows_csv()?)?;
    let text = report.to_text();
    write(&a.out.join("report.txt"), &text)?;
    if a.sweep {
        let fs_grid: Vec<f64> = (0..=10).map(|k| 1.0 - 0.05 * k as f64).collect();
        let rows = teleport::noise_sweep(&scenario, &fs_grid)?;
        write(&a.out.join("sweep.csv"), &teleport::report::sweep_csv(&rows)?)?;
    }
    print!("{text}");
    Ok(if report.all_converged() { 0 } else { NON_CONVERGED })
}

#[derive(Serialize)]
struct TomographyMetrics {
    scheme: Scheme,
    method: &'static str,
    shots_per_config: u64,
    seed: u64,
    postselection_passed: f64,
    survival_fraction: f64,
    log_likelihood: f64,
    iterations: usize,
    converged: bool,
    fidelity: f64,
    trace_distance: f64,
    linear_entropy: f64,
    warnings: Vec<String>,
}

fn tomography(a: TomographyArgs) -> Result<i32> {
    let scheme: Scheme = a.scheme.parse()?;
    let noise = parse_noise(&a.noise.noise)?;
    let truth = match &a.state {
        Some(path) => TimeBidirectionalState::from_json_str(&fs::read_to_string(path)?)?,
        None => teleport::ideal_prediction(&teleport::default_target_state(), None)?.a,
    };
    let config = TomographyConfig::new(scheme, a.shots, a.seed);
    let sim = simulate_dataset(&truth, &config, &noise)?;
    for w in &sim.dataset.warnings {
        eprintln!("warning: {w}");
    }
    let (eta_hat, iterations, converged, method) = match a.method {
        Method::Mle => {
            let opts = MleOptions {
                max_iterations: a.max_iterations,
                ..MleOptions::default()
            };
            let res = mle_reconstruct(&sim.dataset, &opts)?;
            (res.eta_hat, res.iterations, res.converged, "mle")
        }
        Method::Linear => {
            if scheme != Scheme::Sic {
                return Err(TbsfError::InvalidInput("linear inversion needs the SIC scheme".into()));
            }
            (linear_inversion(&sim.dataset)?.eta, 0, true, "linear")
        }
    };
    let metrics = TomographyMetrics {
        scheme,
        method,
        shots_per_config: a.shots,
        seed: a.seed,
        postselection_passed: sim.dataset.total_passed(),
        survival_fraction: sim.dataset.survival_fraction(),
        log_likelihood: log_likelihood(&sim.dataset, &eta_hat)?,
        iterations,
        converged,
        fidelity: fidelity(eta_hat.matrix(), truth.matrix()),
        trace_distance: trace_distance(eta_hat.matrix(), truth.matrix()),
        linear_entropy: linear_entropy(eta_hat.matrix()),
        warnings: sim.dataset.warnings.clone(),
    };
    fs::create_dir_all(&a.out)?;
    write(&a.out.join("eta_hat.json"), &eta_hat.to_json_string())?;
    write(&a.out.join("metrics.json"), &to_json(&metrics))?;
    write_counts(fs::File::create(a.out.join("counts.csv"))?, &sim.raw)?;
    println!(
        "fidelity {:.6}  trace distance {:.6}  iterations {}  converged {}",
        metrics.fidelity, metrics.trace_distance, metrics.iterations, metrics.converged
    );
    Ok(if converged { 0 } else { NON_CONVERGED })
}

#[derive(Serialize)]
struct ProbeReport {
    sigma: f64,
    epsilon: f64,
    exact_q: f64,
    exact_p: f64,
    predicted_q: f64,
    predicted_p: f64,
    momentum_linear_response: f64,
}

#[derive(Serialize)]
struct WeakValueReport {
    weak_value: Complex64,
    mean_value: f64,
    probe: ProbeReport,
    sweep: Vec<crate::weak_probe::SweepPoint>,
}

fn weak_value_cmd(a: WeakValueArgs) -> Result<i32> {
    let eta = match (&a.state, &a.pre, &a.post) {
        (Some(path), None, None) => TimeBidirectionalState::from_json_str(&fs::read_to_string(path)?)?,
        (None, Some(pre), Some(post)) => {
            TimeBidirectionalState::pure_two_state(&parse_vector(pre)?, &parse_vector(post)?)?
        }
        _ => {
            return Err(TbsfError::InvalidInput(
                "give either --state or both --pre and --post".into(),
            ))
        }
    };
    let obs = HermitianObservable::new(parse_observable(&a.observable)?)?;
    let cfg = GaussianProbeConfig {
        sigma: a.sigma,
        epsilon: a.epsilon,
        ..GaussianProbeConfig::default()
    };
    let moments = probe_conditional_moments(&obs, &eta, &cfg)?;
    let (pq, pp) = first_order_prediction(&obs, &eta, &cfg)?;
    let sweep = match &a.sweep {
        Some(s) => {
            let eps = s
                .split(',')
                .map(|t| {
                    t.trim()
                        .parse::<f64>()
                        .map_err(|_| TbsfError::InvalidInput(format!("not a number in --sweep: {t:?}")))
                })
                .collect::<Result<Vec<_>>>()?;
            epsilon_sweep(&obs, &eta, &cfg, &eps)?
        }
        None => Vec::new(),
    };
    let report = WeakValueReport {
        weak_value: weak_value(&obs, &eta)?,
        mean_value: mean_value(&obs, &eta)?,
        probe: ProbeReport {
            sigma: cfg.sigma,
            epsilon: cfg.epsilon,
            exact_q: moments.mean_q,
            exact_p: moments.mean_p,
            predicted_q: pq,
            predicted_p: pp,
            momentum_linear_response: momentum_linear_response(&obs, &eta, &cfg)?,
        },
        sweep,
    };
    let json = to_json(&report);
    match &a.out {
        Some(path) => write(path, &json)?,
        None => print!("{json}"),
    }
    Ok(0)
}

fn simulate(a: SimulateArgs) -> Result<i32> {
    let circuit = Circuit::from_json_str(&fs::read_to_string(&a.circuit)?)?;
    let noise = parse_noise(&a.noise.noise)?;
    let csv = if a.exact {
        let dist = qcsim::exact_outcome_distribution(&circuit, &noise)?;
        let mut wr = csv::Writer::from_writer(Vec::new());
        wr.write_record(["bits", "probability"])?;
        for (bits, p) in &dist {
            wr.write_record([bits.clone(), format!("{p:.15e}")])?;
        }
        String::from_utf8(wr.into_inner().map_err(|e| TbsfError::Io(e.into_error()))?).expect("utf-8")
    } else {
        let records = qcsim::run(&circuit, &noise, a.shots, a.seed)?;
        let rows: Vec<_> = records
            .into_iter()
            .map(|r| qcsim::CountsRow {
                config_id: "circuit".into(),
                bits: r.outcome,
                count: r.multiplicity,
            })
            .collect();
        qcsim::io::counts_to_string(&rows)
    };
    match &a.out {
        Some(path) => write(path, &csv)?,
        None => print!("{csv}"),
    }
    Ok(0)
}
