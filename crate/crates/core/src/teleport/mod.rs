//! Postselected teleportation: the time-bidirectional states of the three
//! particles, their circuit-level tomography and a table-style report.

pub mod circuits;
pub mod demo;
pub mod fit;
pub mod predictions;
pub mod report;

pub use circuits::{build_circuits, default_target_state, BellOutcome, Particle};
pub use demo::{reconstruct_exact, reconstruct_from_counts, sample_counts, ParticleResult, TeleportScenario};
pub use fit::{fit_noise, NoiseFit};
pub use predictions::{analytic_noisy_prediction, ideal_prediction, EtaTriple};
pub use report::{noise_sweep, report_from_counts, run_demo, DemoReport, MetricRow, Part};
