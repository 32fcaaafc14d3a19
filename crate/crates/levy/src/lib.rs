//! Simulation and validation toolkit for Lévy-process models of asset returns.
//!
//! The crate covers ten models built from independent stationary increments:
//! Brownian motion with drift, the Poisson process, compound Poisson
//! processes, the Merton and Kou jump-diffusions, and the infinite-activity
//! variance gamma, CGMY, normal inverse Gaussian, generalized hyperbolic,
//! and Meixner families.
//!
//! Each model exposes its characteristic exponent `psi` (so that the
//! characteristic function is `E[exp(i u L_t)] = exp(-t psi(u))`), exact or
//! controlled-accuracy increment samplers, Lévy triplets, closed-form
//! marginal densities where they exist, and the exponential-martingale drift
//! correction used to price under a risk-neutral measure.
//!
//! Modules:
//! - [`specfun`]: the special functions everything else leans on (modified
//!   Bessel K with complex argument, complex log-gamma, an exponential
//!   kernel transform, the regularized incomplete gamma, normal CDF).
//! - [`rng`]: deterministic seeded streams and scalar samplers (normal,
//!   gamma, Poisson, inverse Gaussian, generalized inverse Gaussian,
//!   Meixner).
//! - [`models`]: model parameterizations, validation, characteristic
//!   functions, triplets, densities, increment sampling.
//! - [`pathsim`]: discrete-grid path simulation and exponential asset paths.
//! - [`validate`]: statistical acceptance checks (empirical characteristic
//!   function distance, moment matching, martingale drift, KS and chi-square
//!   goodness of fit).

// Reference constants are written with two guard digits beyond f64
// precision so they round to the intended values.
#![allow(clippy::excessive_precision)]

pub mod error;
pub mod models;
pub mod pathsim;
pub mod rng;
pub mod specfun;
pub mod validate;

pub use error::LevyError;
pub use models::ModelSpec;
pub use rng::RngStream;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, LevyError>;
