//! Single-qubit time-bidirectional tomography: MUB and doubled-SIC schemes,
//! dataset simulation, maximum-likelihood and linear-inversion estimators.

pub mod dataset;
pub mod inversion;
pub mod likelihood;
pub mod metrics;
pub mod schemes;

pub use dataset::{
    dataset_from_raw, exact_dataset, sample_synthetic, simulate_dataset, ConfigCounts, CountsRecord, Readout,
    SimulatedDataset, TomographyConfig, TomographyDataset,
};
pub use inversion::{linear_inversion, LinearInversion};
pub use likelihood::{log_likelihood, mle_reconstruct, MleOptions, ReconstructionResult};
pub use metrics::{fidelity, linear_entropy, trace_distance};
pub use schemes::{mub_outcome_tensors, sic_outcome_tensors, MeasurementConfig, Scheme};
