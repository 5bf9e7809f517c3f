//! Dense density-matrix circuit simulator (up to eight qubits) with
//! mid-circuit measurement, reset, gate depolarizing noise and readout flips.

pub mod circuit;
pub mod density;
pub mod fragments;
pub mod gates;
pub mod io;
pub mod noise;
pub mod sim;

pub use circuit::{Circuit, NoiseSite, Op};
pub use density::DensityMatrix;
pub use fragments::{
    doubled_sic_measurement, nondestructive_pauli, sic_kraus, sic_kraus_operators, sic_states, PauliBasis,
};
pub use gates::Gate;
pub use io::CountsRow;
pub use noise::NoiseModel;
pub use sim::{exact_branches, exact_outcome_distribution, run, ShotRecord};
