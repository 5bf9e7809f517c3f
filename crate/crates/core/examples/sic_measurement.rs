//! The doubled SIC measurement as a gate-level circuit and as Kraus operators.
//!
//! Run with `cargo run --example sic_measurement`.

use tbsf::linalg::{c, vector};
use tbsf::qcsim::fragments::sic_bit_names;
use tbsf::qcsim::{doubled_sic_measurement, exact_outcome_distribution, sic_kraus, sic_states, Circuit, NoiseModel};
use tbsf::tomography::schemes::{gram_condition_number, span_rank};
use tbsf::tomography::sic_outcome_tensors;
use tbsf::Result;

fn main() -> Result<()> {
    for (b, psi) in sic_states().iter().enumerate() {
        println!(
            "ψ_{b} = ({:.4}{:+.4}i, {:.4}{:+.4}i)",
            psi[0].re, psi[0].im, psi[1].re, psi[1].im
        );
    }
    let set = sic_outcome_tensors();
    println!("outcomes: {}, span rank: {}", set.len(), span_rank([&set]));
    println!("Gram condition number: {:.3}", gram_condition_number(&set));

    let input = vector(&[c(0.6, 0.0), c(0.0, 0.8)]);
    let theta = 2.0 * input[0].re.acos();

    let mut gates = Circuit::new(3);
    gates.rx(0, theta);
    doubled_sic_measurement(&mut gates, 0, [1, 2], sic_bit_names(""));
    let mut kraus = Circuit::new(1);
    kraus.rx(0, theta);
    sic_kraus(&mut kraus, 0, sic_bit_names(""));

    let g = exact_outcome_distribution(&gates, &NoiseModel::ideal())?;
    let k = exact_outcome_distribution(&kraus, &NoiseModel::ideal())?;
    println!("gate-level ops: {}", gates.ops.len());
    let worst = g
        .iter()
        .map(|(bits, p)| {
            // the gate-level circuit declares μ3, μ4 before μ1, μ2
            let b = bits.as_bytes();
            let reordered: String = [b[2], b[3], b[0], b[1]].iter().map(|&x| x as char).collect();
            (p - k.get(&reordered).copied().unwrap_or(0.0)).abs()
        })
        .fold(0.0, f64::max);
    println!("max |gate − Kraus| outcome probability: {worst:.2e}");
    Ok(())
}
