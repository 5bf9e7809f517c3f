//! Weak values and the exact response of a Gaussian pointer.
//!
//! Run with `cargo run --example weak_value`.

use std::f64::consts::FRAC_PI_8;
use tbsf::linalg::{c, pauli_z, vector};
use tbsf::measurement::{weak_value, HermitianObservable};
use tbsf::weak_probe::{epsilon_sweep, momentum_linear_response, richardson_ratio, GaussianProbeConfig};
use tbsf::{Result, TimeBidirectionalState};

fn main() -> Result<()> {
    let s = 0.5f64.sqrt();
    let plus = vector(&[c(s, 0.0), c(s, 0.0)]);
    let post = vector(&[c(FRAC_PI_8.cos(), 0.0), c(-FRAC_PI_8.sin(), 0.0)]);
    let eta = TimeBidirectionalState::pure_two_state(&plus, &post)?;
    let z = HermitianObservable::new(pauli_z())?;

    let w = weak_value(&z, &eta)?;
    println!("weak value of σ_z: {:.12} (1 + √2 = {:.12})", w.re, 1.0 + 2f64.sqrt());

    let cfg = GaussianProbeConfig::default();
    println!("{:>8} {:>14} {:>14} {:>12}", "ε", "⟨Q⟩ exact", "ε Re O_w", "residual");
    for p in epsilon_sweep(&z, &eta, &cfg, &[1e-3, 2e-3, 4e-3, 8e-3, 1.6e-2])? {
        println!(
            "{:>8.4} {:>14.10} {:>14.10} {:>12.3e}",
            p.epsilon,
            p.exact_q,
            p.pred_q,
            p.residual_q()
        );
    }
    let (rq, _) = richardson_ratio(&z, &eta, &cfg)?;
    println!("second-order coefficient of ⟨Q⟩: {rq:.6}");

    // an imaginary weak value shifts the pointer momentum instead
    let plus_i = vector(&[c(s, 0.0), c(0.0, s)]);
    let eta_i = TimeBidirectionalState::pure_two_state(&plus, &plus_i)?;
    let wi = weak_value(&z, &eta_i)?;
    let sweep = epsilon_sweep(&z, &eta_i, &cfg, &[1e-3])?;
    println!(
        "weak value {:+.3}{:+.3}i: ⟨P⟩ = {:.6e}, linear response {:.6e}",
        wi.re,
        wi.im,
        sweep[0].exact_p,
        momentum_linear_response(&z, &eta_i, &cfg)?
    );
    Ok(())
}
