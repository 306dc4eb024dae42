//! Exact computations with gapped cyclic filtered A∞ algebras over the
//! universal Novikov ring.

pub mod ainf;
pub mod cli;
pub mod coeff;
pub mod complete;
pub mod error;
pub mod graded;
pub mod laurent;
pub mod linalg;
pub mod mc;
pub mod models;
pub mod multilinear;
pub mod novikov;
pub mod pseudoiso;
pub mod superpotential;
pub mod transfer;
pub mod trees;
pub mod wallcross;

pub use coeff::{q, qf, Rational, TPoly};
pub use error::{Error, Result};
