//! Build time-bidirectional states in several ways and inspect them.
//!
//! Run with `cargo run --example state_construction`.

use tbsf::linalg::{c, identity, kron, outer, vector, CMatrix, ONE, ZERO};
use tbsf::{Result, TimeBidirectionalState};

fn show(name: &str, m: &CMatrix) {
    println!("{name}:");
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols())
            .map(|j| format!("{:>6.3}{:+.3}i", m[(i, j)].re, m[(i, j)].im))
            .collect();
        println!("  {}", row.join("  "));
    }
}

fn main() -> Result<()> {
    let plus = vector(&[c(0.5f64.sqrt(), 0.0), c(0.5f64.sqrt(), 0.0)]);
    let zero = vector(&[ONE, ZERO]);

    // two-state vector ⟨0| |+⟩
    let eta = TimeBidirectionalState::pure_two_state(&plus, &zero)?;
    show("pure two-state η", eta.matrix());
    show("forward part", &eta.reduced_forward());
    show("postselected state", &eta.postselected_state());

    // system entangled with an ancilla at both ends: a generalized
    // two-state vector that is not a single (|ψ⟩, ⟨φ|) pair
    let s = 0.5f64.sqrt();
    let t = std::f64::consts::PI / 8.0;
    let bell = vector(&[c(s, 0.0), ZERO, ZERO, c(s, 0.0)]);
    let tilted = vector(&[c(t.cos(), 0.0), ZERO, ZERO, c(t.sin(), 0.0)]);
    let eta_ent = TimeBidirectionalState::from_pre_post(&outer(&bell), &outer(&tilted), 2)?;
    show("η from entangled pre- and postselection", eta_ent.matrix());

    // no postselection: η = ρ ⊗ 1/d
    let free = TimeBidirectionalState::no_postselection(&outer(&plus))?;
    println!("no postselection equals ρ ⊗ 1/2: {}", {
        let want = kron(&outer(&plus), &identity(2).scale(0.5));
        tbsf::linalg::max_abs(&(free.matrix() - want)) < 1e-12
    });

    // spectral decomposition into two-state density vectors, and a purification
    let dec = eta_ent.spectral_decompose();
    println!("density-vector weights: {:?}", dec.weights);
    let schmidt = dec.vectors[0].singular_values();
    println!(
        "coefficients c_i^j have singular values {:.4} and {:.4}",
        schmidt[0], schmidt[1]
    );
    let pur = eta_ent.purify();
    println!("purification reference dimension: {}", pur.reference_dim());

    let back = TimeBidirectionalState::from_json_str(&eta.to_json_string())?;
    println!("JSON round trip exact: {}", back == eta);
    Ok(())
}
