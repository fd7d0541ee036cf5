//! Worldline Hamiltonians for a charged particle in Abelian and SU(2)
//! background fields, simulated on a dense statevector.
//!
//! The crate builds the operator matrices ([`basis`], [`hamiltonian`]),
//! diagonalizes them exactly ([`operator`]), estimates ground energies with an
//! Ry variational circuit ([`circuits`], [`vqe`]), evolves states with exact
//! and Trotterized propagators ([`evolution`]), and checks everything against
//! closed-form references ([`analytic`]).

pub mod analytic;
pub mod basis;
pub mod circuits;
pub mod cli;
pub mod error;
pub mod evolution;
pub mod hamiltonian;
pub mod operator;
pub mod vqe;

pub use error::{Error, Result};
pub use operator::OperatorMatrix;
