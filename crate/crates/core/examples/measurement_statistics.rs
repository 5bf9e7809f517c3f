//! Outcome probabilities of an indirect measurement between pre- and postselection,
//! compared with the direct evaluation on the full network.
//!
//! Run with `cargo run --example measurement_statistics`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tbsf::linalg::{c, pauli_z, random_density, random_effect, random_povm, random_unitary, vector};
use tbsf::measurement::{
    build_indirect, full_network_probability, mean_value, outcome_distribution, projective_set, standard_probability,
    HermitianObservable,
};
use tbsf::{Result, TimeBidirectionalState};

fn main() -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);

    // system qubit with a qubit ancilla, random probe coupling and POVM
    let rho_pre = random_density(4, 4, &mut rng);
    let e_post = random_effect(4, 0.1, &mut rng);
    let rho_probe = random_density(2, 1, &mut rng);
    let coupling = random_unitary(4, &mut rng);
    let povm = random_povm(2, 3, &mut rng);

    let eta = TimeBidirectionalState::from_pre_post(&rho_pre, &e_post, 2)?;
    let set = build_indirect(&rho_probe, &coupling, &povm)?;
    let probs = outcome_distribution(&set, &eta)?;
    println!("{:>8} {:>14} {:>14}", "outcome", "tensor", "full network");
    for (mu, p) in probs.iter().enumerate() {
        let direct = full_network_probability(&rho_pre, &rho_probe, &coupling, &povm, mu, &e_post)?;
        println!("{mu:>8} {p:>14.10} {direct:>14.10}");
    }

    // without postselection the same tensors give the textbook Born rule
    let rho = random_density(2, 2, &mut rng);
    let free = TimeBidirectionalState::no_postselection(&rho)?;
    let free_probs = outcome_distribution(&set, &free)?;
    for (mu, p) in free_probs.iter().enumerate() {
        let born = standard_probability(&rho, &rho_probe, &coupling, &povm[mu]);
        println!("Born rule, outcome {mu}: {p:.12} vs {born:.12}");
    }

    // projective σ_z between |+⟩ and a tilted postselection (ABL rule)
    let s = 0.5f64.sqrt();
    let t = std::f64::consts::PI / 8.0;
    let plus = vector(&[c(s, 0.0), c(s, 0.0)]);
    let tilted = vector(&[c(t.cos(), 0.0), c(-t.sin(), 0.0)]);
    let abl_eta = TimeBidirectionalState::pure_two_state(&plus, &tilted)?;
    let z = HermitianObservable::new(pauli_z())?;
    let abl = projective_set(&z);
    for (label, p) in abl.labels().iter().zip(outcome_distribution(&abl, &abl_eta)?) {
        println!("σ_z = {label}: {p:.6}");
    }
    println!(
        "⟨σ_z⟩ between |+⟩ and the tilted state: {:.6}",
        mean_value(&z, &abl_eta)?
    );
    Ok(())
}
