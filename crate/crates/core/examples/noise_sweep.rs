//! Carrier fidelities versus Bell-pair depolarization, with a least-squares
//! fit of `(f_pr, f_ms)` to sampled data.
//!
//! Run with `cargo run --release --example noise_sweep`.

use tbsf::qcsim::NoiseModel;
use tbsf::teleport::report::sweep_csv;
use tbsf::teleport::{noise_sweep, run_demo, TeleportScenario};
use tbsf::Result;

fn main() -> Result<()> {
    let fs: Vec<f64> = (0..=5).map(|k| 1.0 - 0.1 * k as f64).collect();
    let rows = noise_sweep(&TeleportScenario::default(), &fs)?;
    print!("{}", sweep_csv(&rows)?);

    let scenario = TeleportScenario {
        noise: NoiseModel::bell(0.85, 0.95),
        shots: 50_000,
        seed: 9,
        ..TeleportScenario::default()
    };
    let (report, _) = run_demo(&scenario, false)?;
    if let Some(fit) = report.noise_fit {
        println!(
            "fit to sampled data: f_pr = {:.3}, f_ms = {:.3}, rms residual {:.4}",
            fit.f_pr, fit.f_ms, fit.residual
        );
    }
    Ok(())
}
