//! Gaussian-process interpolation with conformal prediction intervals.
//!
//! The crate provides:
//!
//! - [`kernel`]: anisotropic half-integer Matérn covariances;
//! - [`gp`]: exact GP interpolation with an unknown constant mean
//!   (universal kriging), fast leave-one-out predictors, prior sampling and
//!   REML hyperparameter selection;
//! - [`conformal`]: prediction-interval constructors — plain Gaussian
//!   posterior intervals plus split-conformal, jackknife-conformal,
//!   jackknife+ for arbitrary predictors, and the GP-specific full-conformal
//!   (FCP-GP), jackknife+ (J+GP) and asymmetric jackknife+ (asymJ+GP);
//! - [`metrics`]: empirical coverage, interval width, RMSE and the IAE
//!   calibration functional;
//! - [`testbed`]: six standard optimization test functions with seeded
//!   uniform design sampling;
//! - [`exec`]: order-preserving parallel maps (rayon) with a sequential
//!   fallback behind the `parallel` feature flag.

pub mod conformal;
pub mod error;
pub mod exec;
pub mod gp;
pub mod kernel;
pub mod metrics;
pub mod testbed;

mod linalg;
mod stats;

pub use error::{Error, Result};
pub use kernel::{covariance, gram_matrix, matern_correlation, CovarianceSpec, DEFAULT_NUGGET};
