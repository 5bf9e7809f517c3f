//! Simulated SIC and MUB tomography of a random two-copy state, reconstructed
//! by maximum likelihood and by linear inversion.
//!
//! Run with `cargo run --release --example tomography`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tbsf::linalg::random_density;
use tbsf::qcsim::NoiseModel;
use tbsf::tomography::{
    fidelity, linear_inversion, mle_reconstruct, simulate_dataset, trace_distance, MleOptions, Scheme, TomographyConfig,
};
use tbsf::{Result, TimeBidirectionalState};

fn main() -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let truth = TimeBidirectionalState::from_flat(random_density(4, 2, &mut rng))?;

    for scheme in [Scheme::Sic, Scheme::Mub] {
        let cfg = TomographyConfig::new(scheme, 100_000, 11);
        let sim = simulate_dataset(&truth, &cfg, &NoiseModel::ideal())?;
        let mle = mle_reconstruct(&sim.dataset, &MleOptions::default())?;
        println!(
            "{scheme:?}: {} configs, survival {:.3}, MLE fidelity {:.5}, trace distance {:.5}, {} iterations",
            cfg.configs.len(),
            sim.dataset.survival_fraction(),
            fidelity(mle.eta_hat.matrix(), truth.matrix()),
            trace_distance(mle.eta_hat.matrix(), truth.matrix()),
            mle.iterations
        );
        if scheme == Scheme::Sic {
            let li = linear_inversion(&sim.dataset)?;
            println!(
                "     linear inversion fidelity {:.5} (PSD projection used: {})",
                fidelity(li.eta.matrix(), truth.matrix()),
                li.projected
            );
        }
    }
    Ok(())
}
