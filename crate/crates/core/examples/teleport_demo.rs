//! Track `|ψ⟩` through a postselected teleportation: exact, noisy and sampled runs.
//!
//! Run with `cargo run --release --example teleport_demo`.

use tbsf::qcsim::NoiseModel;
use tbsf::teleport::{run_demo, BellOutcome, TeleportScenario};
use tbsf::Result;

fn main() -> Result<()> {
    let ideal = TeleportScenario::default();
    let (report, _) = run_demo(&ideal, true)?;
    println!("== noiseless, exact\n{}", report.to_text());

    let psi_minus = TeleportScenario {
        postselect: Some(BellOutcome::PsiMinus),
        ..TeleportScenario::default()
    };
    let (report, _) = run_demo(&psi_minus, true)?;
    println!("== Ψ⁻ postselection, exact\n{}", report.to_text());

    let noisy = TeleportScenario {
        noise: NoiseModel::bell(0.8, 0.9),
        shots: 100_000,
        seed: 4,
        ..TeleportScenario::default()
    };
    let (report, counts) = run_demo(&noisy, false)?;
    println!(
        "== f_pr = 0.8, f_ms = 0.9, sampled ({} count rows)\n{}",
        counts.len(),
        report.to_text()
    );
    let (a, b, c) = report.carrier_fidelities();
    println!(
        "carrier fidelities A↑ {a:.4} ≥ B↓ {b:.4} ≥ C↑ {c:.4}: {}",
        report.ordering_holds()
    );
    Ok(())
}
