//! Explicit Wasserstein-1 error bounds for the normal approximation of
//! empirical autocovariances of causal AR(1) processes.
//!
//! For a centered stationary series the scaled empirical autocovariance
//! `sqrt(n) * (gamma_hat(k) - gamma(k))` is asymptotically normal with
//! variance `Sigma(k)` driven by the second- and fourth-order structure of
//! the process.  This crate computes a fully explicit finite-sample upper
//! bound on the Wasserstein-1 distance between the law of that statistic and
//! its Gaussian limit, specialized end to end to the causal AR(1) recursion
//! `X(t) = alpha * X(t-1) + eps(t)` with standard normal or scaled Student-t
//! innovations.
//!
//! The bound is assembled from four additive pieces: a bias term, a variance
//! mismatch term, an m-dependent approximation term, and a Stein term driven
//! by joint cumulants of the truncated moving average
//! `Y(t) = sum_{j=0..m} alpha^j eps(t-j)`.  The truncation level `m` is a
//! free parameter; [`bound::optimize_m`] minimizes the bound over
//! `m = 0..m_max`.
//!
//! Alongside the bound, [`wasserstein`] provides a seeded Monte Carlo
//! estimator of the true Wasserstein-1 distance (quantile coupling on the
//! line) so the two can be compared on the same grid.
//!
//! The crate is `no_std`-compatible (requires `alloc`); disable the default
//! `std` feature for embedded or wasm use.  All bound arithmetic is plain
//! binary64 with a fixed evaluation order, so identical inputs produce
//! identical bytes.

#![cfg_attr(not(feature = "std"), no_std)]
#![warn(missing_docs)]

extern crate alloc;

pub mod ar1;
pub mod bound;
pub mod error;
pub mod innovations;
mod math;
pub mod partitions;
pub mod qbound;
pub mod variance;
pub mod wasserstein;

pub use ar1::{Ar1Model, MDepApprox};
pub use bound::{BoundBreakdown, GeneralBoundInputs, MStarResult, QMethod};
pub use error::Error;
pub use innovations::{InnovationModel, RngHandle};
pub use wasserstein::W1Estimate;

/// Crate-wide result type.
pub type Result<T> = core::result::Result<T, Error>;
