//! Near-optimal random sampling for weighted least-squares approximation.
//!
//! The crate builds orthonormal polynomial bases over tensor-product
//! probability measures, evaluates the (reciprocal) Christoffel function of
//! the approximation space, draws samples from the matched sampling
//! measures (Monte Carlo, Christoffel mixture, per-basis induced and a
//! discrete leverage-score variant), solves the weighted least-squares
//! problem with stability diagnostics, and ships an experiment harness for
//! sample-complexity sweeps.

pub mod christoffel;
pub mod error;
pub mod harness;
pub mod index_sets;
pub mod least_squares;
pub mod measures;
pub mod orthopoly;
pub mod rng;
pub mod sampling;

#[cfg(test)]
pub(crate) mod test_oracles;

pub use error::{Error, Result};
