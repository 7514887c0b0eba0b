//! Simulator and exact classical oracle for computing two-color Ramsey
//! numbers R(m,n) by adiabatic quantum evolution.
//!
//! The crate maps N-vertex graphs onto an L = N(N-1)/2 qubit register,
//! builds the diagonal problem Hamiltonian whose eigenvalue on a graph
//! string counts m-cliques plus n-independent sets, integrates the
//! time-dependent Schrodinger equation from the uniform superposition, and
//! drives the incremental-N loop whose first positive ground-state energy
//! pins R(m,n).

pub mod cli;
pub mod cost;
pub mod driver;
pub mod error;
pub mod evolution;
pub mod graph;
pub mod hamiltonian;
mod kernels;
mod lanczos;

pub use error::{Error, Result};
