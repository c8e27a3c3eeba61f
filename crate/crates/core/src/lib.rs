//! Exact Birkhoff normal forms for the cubic NLS Hamiltonian, expressed as
//! sums over decorated trees and checked against a direct Birkhoff iteration.
//!
//! - [`trees`]: decorated trees, validity, degree, symmetry factors
//! - [`enumeration`]: tree classes and the comb-grafting construction
//! - [`hamiltonian`]: exact Fourier-space polynomials and the Poisson bracket
//! - [`evaluator`]: tree interpretation, generators, normal forms
//! - [`oracle`]: brute-force Birkhoff iteration
//! - [`cli`]: the `birkhoff` command

pub mod cli;
pub mod enumeration;
pub mod error;
pub mod evaluator;
pub mod hamiltonian;
pub mod oracle;
pub mod trees;

pub use error::{Error, Result};
