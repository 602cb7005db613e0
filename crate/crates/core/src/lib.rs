//! Variational quantum solvers for the implicit heat-equation step, simulated
//! on an exact statevector backend and checked against classical oracles.
//!
//! Core math is generic over [`Real`] (`f32` or `f64`); the aliases below fix
//! `f64`, which every experiment uses.

pub mod error;
pub mod fourier;
pub mod heat;
pub mod linalg;
pub mod pauli;
pub mod scalar;
pub mod seeds;
pub mod sim;
pub mod optim;
pub mod direct_vqe;
pub mod hadamard_vqe;
pub mod ansatz_tree;
pub mod experiments;

pub use error::{Error, Result};
pub use scalar::{Real, C};

pub type Complex64 = C<f64>;
pub type Grid = heat::GridParams<f64>;
pub type Problem = heat::HeatProblem<f64>;
pub type Operator = linalg::DenseOperator<f64>;
pub type State = sim::QuantumState<f64>;
pub type Circuit = sim::Circuit<f64>;
pub type Gate = sim::Gate<f64>;

pub type Operator32 = linalg::DenseOperator<f32>;
pub type State32 = sim::QuantumState<f32>;
