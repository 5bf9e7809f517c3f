//! Time-bidirectional states (TBS) of pre- and postselected quantum systems.
//!
//! A time-bidirectional state `η` of a `d`-level system is stored as a
//! Hermitian, positive semidefinite, unit-trace `d² × d²` matrix whose first
//! tensor factor is the forward-evolving copy and whose second is the
//! complex conjugate of the backward-evolving copy (see [`tensor`]).
//!
//! - [`state`] builds `η` from pre/postselection data and decomposes it.
//! - [`measurement`] turns instruments into outcome tensors and evaluates
//!   probabilities, mean values and weak values.
//! - [`weak_probe`] integrates a Gaussian pointer exactly.
//! - [`qcsim`] is a small density-matrix circuit simulator.
//! - [`tomography`] reconstructs single-qubit `η` from MUB or SIC data.
//! - [`teleport`] tracks a teleported state through postselection.

pub mod app;
pub mod error;
pub mod json;
pub mod linalg;
pub mod measurement;
pub mod qcsim;
pub mod rng;
pub mod state;
pub mod teleport;
pub mod tensor;
pub mod tomography;
pub mod weak_probe;

pub use error::{Result, TbsfError};
pub use state::TimeBidirectionalState;
pub use tensor::ComplexTensor4;
