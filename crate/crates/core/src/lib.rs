//! Partitioned quantum subspace expansion.
//!
//! Ground-state energy estimation from Krylov data (Hamiltonian moments or
//! real-time-evolution matrix elements) with three solvers: plain QSE,
//! thresholded QSE and partitioned QSE, which grows the subspace in small
//! blocks and keeps each block only while it lowers the energy variance.
//!
//! The [`simulator`] module supplies exact statevector data for spin models
//! up to [`simulator::MAX_DENSE_QUBITS`] qubits, [`noise`] adds reproducible
//! finite-sampling noise, and [`harness`] runs full sweeps over subspace
//! order, noise strength and instance.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod gevp;
pub mod harness;
pub mod noise;
pub mod pauli;
pub mod pqse;
pub mod report;
pub mod simulator;
pub mod subspace;

pub use error::{Error, Result};
