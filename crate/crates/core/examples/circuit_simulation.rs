//! Density-matrix circuit simulation: a noisy Bell pair, exact and sampled.
//!
//! Run with `cargo run --example circuit_simulation`.

use tbsf::qcsim::{exact_outcome_distribution, run, Circuit, NoiseModel};
use tbsf::Result;

fn main() -> Result<()> {
    let mut c = Circuit::new(2);
    c.h(0).cnot(0, 1).measure(0, "a").measure(1, "b");

    let noise = NoiseModel {
        p1: 0.01,
        p2: 0.05,
        readout: vec![(0.02, 0.03); 2],
        ..NoiseModel::ideal()
    };
    println!("exact distribution:");
    for (bits, p) in exact_outcome_distribution(&c, &noise)? {
        println!("  {bits}: {p:.6}");
    }
    println!("10000 sampled shots (seed 1):");
    for r in run(&c, &noise, 10_000, 1)? {
        println!("  {}: {}", r.outcome, r.multiplicity);
    }

    // mid-circuit measurement and reset reuse a qubit
    let mut m = Circuit::new(1);
    m.h(0).measure(0, "first").reset(0).x(0).measure(0, "second");
    println!("{}", m.to_json_string());
    println!("{:?}", exact_outcome_distribution(&m, &NoiseModel::ideal())?);
    Ok(())
}
