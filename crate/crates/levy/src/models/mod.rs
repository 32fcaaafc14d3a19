//! Model parameterizations and their analytic machinery.
//!
//! [`ModelSpec`] enumerates ten Lévy models: Brownian motion with drift, the
//! Poisson process, compound Poisson with a pluggable jump law, the Merton
//! (Gaussian-jump) and Kou (double-exponential-jump) jump-diffusions, and
//! the variance gamma, CGMY, normal inverse Gaussian, generalized
//! hyperbolic, and Meixner pure-jump families.
//!
//! Submodules: [`char_fn`] (characteristic exponents/functions and the
//! martingale drift correction), [`triplet`] (Lévy triplets and jump
//! densities), [`density`] (closed-form marginal densities), and
//! [`sampling`] (exact or controlled-accuracy increment samplers).

pub mod char_fn;
pub mod density;
pub mod sampling;
pub mod triplet;

pub use char_fn::{CfCurve, Measure};
pub use sampling::IncrementSampler;
pub use triplet::LevyTriplet;

use crate::error::{ConstraintViolation, LevyError};
use crate::rng::RngStream;
use crate::Result;
use num_complex::Complex64;
use std::f64::consts::PI;
use std::sync::Arc;

// Rates (G, M) of the gamma-difference representation of the variance
// gamma process, solving 1/M - 1/G = theta nu and 1/(G M) = sigma^2 nu / 2.
pub(crate) fn vg_gamma_rates(sigma: f64, nu: f64, theta: f64) -> (f64, f64) {
    let prod = 0.5 * sigma * sigma * nu;
    let diff = theta * nu;
    let disc = (diff * diff + 4.0 * prod).sqrt();
    (2.0 / (disc - diff), 2.0 / (disc + diff))
}

/// Jump-size law for a compound Poisson process.
#[derive(Clone)]
pub enum JumpLaw {
    /// Gaussian jumps with the given mean and standard deviation.
    Normal { mean: f64, std_dev: f64 },
    /// User-supplied jump law; see [`CustomJumpLaw`].
    Custom(Arc<CustomJumpLaw>),
}

/// A user-defined jump-size law: its characteristic function (evaluated on
/// complex arguments so the martingale correction can be formed), a sampler,
/// and its first two moments.
pub struct CustomJumpLaw {
    pub cf: Box<dyn Fn(Complex64) -> Complex64 + Send + Sync>,
    pub sampler: Box<dyn Fn(&mut RngStream) -> f64 + Send + Sync>,
    pub mean: f64,
    pub variance: f64,
}

impl std::fmt::Debug for JumpLaw {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            JumpLaw::Normal { mean, std_dev } => f
                .debug_struct("Normal")
                .field("mean", mean)
                .field("std_dev", std_dev)
                .finish(),
            JumpLaw::Custom(law) => f
                .debug_struct("Custom")
                .field("mean", &law.mean)
                .field("variance", &law.variance)
                .finish(),
        }
    }
}

impl PartialEq for JumpLaw {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (
                JumpLaw::Normal { mean: m1, std_dev: s1 },
                JumpLaw::Normal { mean: m2, std_dev: s2 },
            ) => m1 == m2 && s1 == s2,
            (JumpLaw::Custom(a), JumpLaw::Custom(b)) => Arc::ptr_eq(a, b),
            _ => false,
        }
    }
}

/// A fully parameterized Lévy model.
///
/// Parameter symbols follow the standard literature for each family; all
/// constraints are enforced by [`ModelSpec::validate`].
#[derive(Debug, Clone, PartialEq)]
pub enum ModelSpec {
    /// Brownian motion with drift: `L_t = mu t + sigma W_t`.
    BrownianMotion { mu: f64, sigma: f64 },
    /// Standard Poisson process with intensity `lambda` (unit jumps).
    Poisson { lambda: f64 },
    /// Compound Poisson process: jumps at rate `lambda`, sizes iid from
    /// `jumps`.
    CompoundPoisson { lambda: f64, jumps: JumpLaw },
    /// Jump-diffusion with Gaussian jumps: drift `mu`, volatility `sigma`,
    /// jump intensity `lambda`, jump sizes `N(jump_mean, jump_std²)`.
    Merton {
        mu: f64,
        sigma: f64,
        lambda: f64,
        jump_mean: f64,
        jump_std: f64,
    },
    /// Jump-diffusion with double-exponential jumps: upward jumps
    /// `Exp(theta1)` with probability `p`, downward `Exp(theta2)` with
    /// probability `1 - p`.
    Kou {
        mu: f64,
        sigma: f64,
        lambda: f64,
        p: f64,
        theta1: f64,
        theta2: f64,
    },
    /// Variance gamma: Brownian motion with drift `theta` and volatility
    /// `sigma`, time-changed by a gamma subordinator with variance rate
    /// `nu`.
    VarianceGamma { sigma: f64, nu: f64, theta: f64 },
    /// CGMY (tempered stable): overall level `c`, tempering rates `g`
    /// (down) and `m` (up), activity index `y < 2`. The limiting cases
    /// `y = 0` and `y = 1` are supported through their analytic limits.
    Cgmy { c: f64, g: f64, m: f64, y: f64 },
    /// Normal inverse Gaussian with tail heaviness `alpha`, asymmetry
    /// `beta`, scale `delta`, location `mu`.
    NormalInverseGaussian {
        alpha: f64,
        beta: f64,
        delta: f64,
        mu: f64,
    },
    /// Generalized hyperbolic with index `lambda` (NIG is `lambda = -1/2`).
    GeneralizedHyperbolic {
        alpha: f64,
        beta: f64,
        delta: f64,
        mu: f64,
        lambda: f64,
    },
    /// Meixner process with scale `alpha`, skew `beta` (`|beta| < pi`), and
    /// shape rate `delta`.
    Meixner { alpha: f64, beta: f64, delta: f64 },
}

impl ModelSpec {
    /// Short stable identifier, as used on the command line.
    pub fn name(&self) -> &'static str {
        match self {
            ModelSpec::BrownianMotion { .. } => "bm",
            ModelSpec::Poisson { .. } => "poisson",
            ModelSpec::CompoundPoisson { .. } => "cpp",
            ModelSpec::Merton { .. } => "merton",
            ModelSpec::Kou { .. } => "kou",
            ModelSpec::VarianceGamma { .. } => "vg",
            ModelSpec::Cgmy { .. } => "cgmy",
            ModelSpec::NormalInverseGaussian { .. } => "nig",
            ModelSpec::GeneralizedHyperbolic { .. } => "gh",
            ModelSpec::Meixner { .. } => "meixner",
        }
    }

    /// Checks all parameter constraints. With `risk_neutral` set, also
    /// checks that the exponential moment `E[exp(L_1)]` exists, which the
    /// martingale drift correction requires.
    pub fn validate(&self, risk_neutral: bool) -> Result<()> {
        let mut v: Vec<ConstraintViolation> = Vec::new();
        let mut check = |parameter: &str, ok: bool, message: String| {
            if !ok {
                v.push(ConstraintViolation {
                    parameter: parameter.to_string(),
                    message,
                });
            }
        };
        let fin = f64::is_finite;
        match self {
            ModelSpec::BrownianMotion { mu, sigma } => {
                check("mu", fin(*mu), format!("must be finite (got {mu})"));
                check(
                    "sigma",
                    fin(*sigma) && *sigma > 0.0,
                    format!("must be positive (got {sigma})"),
                );
            }
            ModelSpec::Poisson { lambda } => {
                check(
                    "lambda",
                    fin(*lambda) && *lambda > 0.0,
                    format!("must be positive (got {lambda})"),
                );
            }
            ModelSpec::CompoundPoisson { lambda, jumps } => {
                check(
                    "lambda",
                    fin(*lambda) && *lambda > 0.0,
                    format!("must be positive (got {lambda})"),
                );
                if let JumpLaw::Normal { mean, std_dev } = jumps {
                    check("jump_mean", fin(*mean), format!("must be finite (got {mean})"));
                    check(
                        "jump_std",
                        fin(*std_dev) && *std_dev >= 0.0,
                        format!("must be nonnegative (got {std_dev})"),
                    );
                }
            }
            ModelSpec::Merton {
                mu,
                sigma,
                lambda,
                jump_mean,
                jump_std,
            } => {
                check("mu", fin(*mu), format!("must be finite (got {mu})"));
                check(
                    "sigma",
                    fin(*sigma) && *sigma >= 0.0,
                    format!("must be nonnegative (got {sigma})"),
                );
                check(
                    "lambda",
                    fin(*lambda) && *lambda > 0.0,
                    format!("must be positive (got {lambda})"),
                );
                check(
                    "jump_mean",
                    fin(*jump_mean),
                    format!("must be finite (got {jump_mean})"),
                );
                check(
                    "jump_std",
                    fin(*jump_std) && *jump_std >= 0.0,
                    format!("must be nonnegative (got {jump_std})"),
                );
            }
            ModelSpec::Kou {
                mu,
                sigma,
                lambda,
                p,
                theta1,
                theta2,
            } => {
                check("mu", fin(*mu), format!("must be finite (got {mu})"));
                check(
                    "sigma",
                    fin(*sigma) && *sigma >= 0.0,
                    format!("must be nonnegative (got {sigma})"),
                );
                check(
                    "lambda",
                    fin(*lambda) && *lambda > 0.0,
                    format!("must be positive (got {lambda})"),
                );
                check(
                    "p",
                    fin(*p) && (0.0..=1.0).contains(p),
                    format!("must lie in [0, 1] (got {p})"),
                );
                check(
                    "theta1",
                    fin(*theta1) && *theta1 > 0.0,
                    format!("must be positive (got {theta1})"),
                );
                check(
                    "theta2",
                    fin(*theta2) && *theta2 > 0.0,
                    format!("must be positive (got {theta2})"),
                );
                if risk_neutral {
                    check(
                        "theta1",
                        *theta1 > 1.0,
                        format!(
                            "risk-neutral use requires theta1 > 1 so that \
                             E[exp(L_1)] is finite (got {theta1})"
                        ),
                    );
                }
            }
            ModelSpec::VarianceGamma { sigma, nu, theta } => {
                check(
                    "sigma",
                    fin(*sigma) && *sigma > 0.0,
                    format!("must be positive (got {sigma})"),
                );
                check(
                    "nu",
                    fin(*nu) && *nu > 0.0,
                    format!("must be positive (got {nu})"),
                );
                check("theta", fin(*theta), format!("must be finite (got {theta})"));
                if risk_neutral {
                    let gate = 1.0 - theta * nu - 0.5 * sigma * sigma * nu;
                    check(
                        "nu",
                        gate > 0.0,
                        format!(
                            "risk-neutral use requires 1 - theta nu - sigma² nu / 2 > 0 \
                             (got {gate})"
                        ),
                    );
                }
            }
            ModelSpec::Cgmy { c, g, m, y } => {
                check(
                    "C",
                    fin(*c) && *c > 0.0,
                    format!("must be positive (got {c})"),
                );
                check(
                    "G",
                    fin(*g) && *g > 0.0,
                    format!("must be positive (got {g})"),
                );
                check(
                    "M",
                    fin(*m) && *m > 0.0,
                    format!("must be positive (got {m})"),
                );
                check(
                    "Y",
                    fin(*y) && (0.0..2.0).contains(y),
                    format!("must lie in [0, 2) (got {y})"),
                );
                if risk_neutral {
                    check(
                        "M",
                        *m > 1.0,
                        format!(
                            "risk-neutral use requires M > 1 so that E[exp(L_1)] \
                             is finite (got {m})"
                        ),
                    );
                }
            }
            ModelSpec::NormalInverseGaussian {
                alpha,
                beta,
                delta,
                mu,
            } => {
                check(
                    "alpha",
                    fin(*alpha) && *alpha > 0.0,
                    format!("must be positive (got {alpha})"),
                );
                check(
                    "beta",
                    fin(*beta) && beta.abs() < *alpha,
                    format!("must satisfy |beta| < alpha (got {beta})"),
                );
                check(
                    "delta",
                    fin(*delta) && *delta > 0.0,
                    format!("must be positive (got {delta})"),
                );
                check("mu", fin(*mu), format!("must be finite (got {mu})"));
                if risk_neutral {
                    check(
                        "alpha",
                        *alpha >= *beta + 1.0,
                        format!(
                            "risk-neutral use requires alpha >= beta + 1 \
                             (got alpha = {alpha}, beta = {beta})"
                        ),
                    );
                }
            }
            ModelSpec::GeneralizedHyperbolic {
                alpha,
                beta,
                delta,
                mu,
                lambda,
            } => {
                check(
                    "alpha",
                    fin(*alpha) && *alpha > 0.0,
                    format!("must be positive (got {alpha})"),
                );
                check(
                    "beta",
                    fin(*beta) && beta.abs() < *alpha,
                    format!("must satisfy |beta| < alpha (got {beta})"),
                );
                check(
                    "delta",
                    fin(*delta) && *delta > 0.0,
                    format!("must be positive (got {delta})"),
                );
                check("mu", fin(*mu), format!("must be finite (got {mu})"));
                check("lambda", fin(*lambda), format!("must be finite (got {lambda})"));
                if risk_neutral {
                    // E[exp(L_1)] exists iff alpha > beta + 1, or on the
                    // boundary alpha = beta + 1 when the index is negative.
                    let strict = *alpha > *beta + 1.0;
                    let boundary = *alpha == *beta + 1.0 && *lambda < 0.0;
                    check(
                        "alpha",
                        strict || boundary,
                        format!(
                            "risk-neutral use requires alpha > beta + 1 (or equality \
                             with lambda < 0); got alpha = {alpha}, beta = {beta}, \
                             lambda = {lambda}"
                        ),
                    );
                }
            }
            ModelSpec::Meixner { alpha, beta, delta } => {
                check(
                    "alpha",
                    fin(*alpha) && *alpha > 0.0,
                    format!("must be positive (got {alpha})"),
                );
                check(
                    "beta",
                    fin(*beta) && beta.abs() < PI,
                    format!("must satisfy |beta| < pi (got {beta})"),
                );
                check(
                    "delta",
                    fin(*delta) && *delta > 0.0,
                    format!("must be positive (got {delta})"),
                );
                if risk_neutral {
                    check(
                        "alpha",
                        alpha + beta < PI,
                        format!(
                            "risk-neutral use requires alpha + beta < pi \
                             (got {})",
                            alpha + beta
                        ),
                    );
                }
            }
        }
        if v.is_empty() {
            Ok(())
        } else {
            Err(LevyError::InvalidParams(v))
        }
    }
}
