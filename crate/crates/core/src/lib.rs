//! Exact laboratory for arithmetic functions in short intervals over F_q[T].
//!
//! The crate computes factorization-Fourier expansions of factorization
//! functions, the large-q variance and covariance predictions they imply, and
//! checks both against brute-force enumeration over small prime fields. The
//! spectral side is corroborated independently through Dirichlet characters
//! modulo T^M, their L-polynomials and unitarized zeros.

pub mod arith;
pub mod dirichlet;
pub mod error;
pub mod ffpoly;
pub mod harness;
pub mod partitions;
pub mod predictor;
pub mod rational;
pub mod symmetric;

pub use error::{Error, Result};
