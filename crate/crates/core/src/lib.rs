//! Computational toolkit for links of parallel circles on the two-sphere.
//!
//! * [`novikov`]: truncated Novikov series and gapped monoids.
//! * [`configuration`]: link configurations `(k, B, C, a)` and their levels.
//! * [`superpotential`]: the Landau–Ginzburg potential, its leading critical
//!   points, order-by-order refinement and a numerical Newton oracle.
//! * [`estimators`]: spectral estimator values on radial Hamiltonians.
//! * [`hofer`]: flats, asymptotic-norm bounds and packing bounds.
//! * [`recurrence`]: Δ-cliques, recurrence sets and density bounds.

pub mod cli;
pub mod configuration;
pub mod error;
pub mod estimators;
pub mod hofer;
pub mod novikov;
pub mod par;
pub mod profile;
pub mod rational;
pub mod recurrence;
pub mod superpotential;

pub use error::{Error, Result};
pub use rational::{ExtRational, Rational};
