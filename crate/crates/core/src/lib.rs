//! Stein's method for non-Gaussian stable and infinitely divisible laws.
//!
//! The crate is organized bottom-up:
//!
//! * [`numerics`]: adaptive quadrature (endpoint-singular, semi-infinite and
//!   oscillatory tails), discrete Fourier inversion, seeded random streams.
//! * [`stable`]: parameterizations, Lévy measures, characteristic functions,
//!   densities and sampling of `S(alpha, beta)`.
//! * [`stein`]: Stein operators for infinitely divisible targets and the
//!   Monte Carlo check of the characterizing identity.
//! * [`semigroup`]: the self-decomposability semigroup, its generator, and the
//!   integral solution of the Stein equation.
//! * [`bounds`]: approximation bounds for normalized sums, kernels and
//!   empirical distances.
//! * [`cli`]: the `stein` experiment runner.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod cli;
pub mod error;
pub mod numerics;
pub mod semigroup;
pub mod stable;
pub mod stein;

pub use error::{Error, Result};
