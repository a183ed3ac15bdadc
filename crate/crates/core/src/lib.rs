//! Exact computation of Connes' differential graded algebra for algebraic
//! spectral triples.
//!
//! The crate models finite-dimensional even spectral triples over the
//! cyclotomic-rational fields Q(zeta_L), computes the quotient calculus
//! `Omega_D^k = pi(Omega^k) / pi(d J_0^(k-1))` with exact arithmetic, checks
//! the monoidality of the calculus under tensor products of triples, and
//! reproduces the flat-torus de Rham and noncommutative-torus computations on
//! finite Fourier windows.

pub mod calculus;
pub mod catalog;
pub mod derham;
pub mod error;
pub mod forms;
pub mod linalg;
pub mod report;
pub mod scalar;
pub mod torus;
pub mod triple;
pub mod triple_io;

pub use error::{Error, Result};
