//! Numerical laboratory for one-dimensional mono-atomic lattices with random
//! mass perturbations.
//!
//! The crate bundles exact solvers in the time domain ([`timedomain`]) and the
//! frequency domain ([`scattering`]), leading-order asymptotic formulas
//! ([`asymptotics`]), transmittance statistics in the diffusion regime
//! ([`stats`]) and deterministic Monte Carlo campaigns ([`ensemble`]).

// `!(x > 0.0)` is how NaN gets rejected alongside the bad values; series
// coefficients are kept as published.
#![allow(
    clippy::neg_cmp_op_on_partial_ord,
    clippy::excessive_precision,
    clippy::needless_range_loop
)]

pub mod asymptotics;
pub mod ensemble;
pub mod error;
pub mod lattice;
pub mod output;
pub mod quadrature;
pub mod scattering;
pub mod specfun;
pub mod stats;
pub mod timedomain;

pub use error::{BandEdge, Error, Result};
pub use lattice::LatticeConfig;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
