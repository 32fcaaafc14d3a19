//! Lévy–Khintchine characteristics: truncated drift, diffusion
//! coefficient, and the jump measure.
//!
//! The triplet `(b, sigma, nu)` is reported relative to the truncation
//! function `1_{|x| <= 1}`, so for models with a first moment the drift is
//! `b = E[L_1] - \int_{|x| > 1} x nu(dx)`.

use super::{JumpLaw, ModelSpec};
use crate::error::LevyError;
use crate::specfun::{
    bessel_k, integrate, log_gamma_real, normal_cdf, upper_gamma, QuadratureSpec,
};
use crate::Result;

/// The characteristic triplet of a Lévy process under the truncation
/// `1_{|x| <= 1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct LevyTriplet {
    /// Drift of the truncated representation.
    pub drift: f64,
    /// Standard deviation of the Brownian component (zero for pure-jump
    /// models).
    pub diffusion: f64,
    /// Total mass of the jump measure when finite; `None` for
    /// infinite-activity models.
    pub jump_rate: Option<f64>,
    /// Point masses `(location, intensity)` of the jump measure; empty
    /// when the measure is absolutely continuous.
    pub atoms: Vec<(f64, f64)>,
}

fn std_normal_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

// E[xi 1_{|xi| <= 1}] for xi ~ N(mean, std^2); handles the degenerate
// std = 0 point mass.
fn normal_partial_mean(mean: f64, std_dev: f64) -> f64 {
    if std_dev == 0.0 {
        return if mean.abs() <= 1.0 { mean } else { 0.0 };
    }
    let lo = (-1.0 - mean) / std_dev;
    let hi = (1.0 - mean) / std_dev;
    mean * (normal_cdf(hi) - normal_cdf(lo))
        + std_dev * (std_normal_pdf(lo) - std_normal_pdf(hi))
}

// E[xi 1_{|xi| <= 1}] for the two-sided exponential jump law: an
// Exp(theta1) magnitude up with probability p, Exp(theta2) down otherwise.
fn kou_partial_mean(p: f64, theta1: f64, theta2: f64) -> f64 {
    let up = (1.0 - (-theta1).exp() * (1.0 + theta1)) / theta1;
    let down = (1.0 - (-theta2).exp() * (1.0 + theta2)) / theta2;
    p * up - (1.0 - p) * down
}

// Gamma(1 - y) for y in [0, 2), y != 1, via the recurrence when the
// argument is negative.
fn gamma_one_minus(y: f64) -> Result<f64> {
    if y < 1.0 {
        Ok(log_gamma_real(1.0 - y)?.exp())
    } else {
        Ok(log_gamma_real(2.0 - y)?.exp() / (1.0 - y))
    }
}

// Truncated drift of the tempered-stable jump measure
// nu(x) = C e^{-M x} / x^{1+Y} (x > 0), C e^{-G |x|} / |x|^{1+Y} (x < 0):
// drift = mean - C [M^{Y-1} Gamma(1-Y, M) - G^{Y-1} Gamma(1-Y, G)].
fn tempered_stable_drift(c: f64, g: f64, m: f64, y: f64) -> Result<f64> {
    let (mean, tails);
    if y == 1.0 {
        mean = c * (g / m).ln();
        tails = c * (upper_gamma(0.0, m)? - upper_gamma(0.0, g)?);
    } else {
        let gamma_1my = gamma_one_minus(y)?;
        mean = c * gamma_1my * (m.powf(y - 1.0) - g.powf(y - 1.0));
        tails = c
            * (m.powf(y - 1.0) * upper_gamma(1.0 - y, m)?
                - g.powf(y - 1.0) * upper_gamma(1.0 - y, g)?);
    }
    Ok(mean - tails)
}

// int_{|x| > 1} x nu(dx) for a density with exponential decay rates
// `rate_pos` (x > 1) and `rate_neg` (x < -1), via fixed-order quadrature
// over the effective support.
fn tail_mean(
    nu: impl Fn(f64) -> Result<f64>,
    rate_pos: f64,
    rate_neg: f64,
) -> Result<f64> {
    let quad = QuadratureSpec::default();
    let eval = |x: f64| nu(x).map(|v| x * v).unwrap_or(f64::NAN);
    let x_pos = 1.0 + 48.0 / rate_pos;
    let x_neg = 1.0 + 48.0 / rate_neg;
    let pos = integrate(eval, 1.0, x_pos, &quad);
    let neg = integrate(eval, -x_neg, -1.0, &quad);
    if !pos.is_finite() || !neg.is_finite() {
        return Err(LevyError::Domain(
            "jump-measure tail integral did not converge".to_string(),
        ));
    }
    Ok(pos + neg)
}

impl ModelSpec {
    /// The Lévy–Khintchine triplet under the truncation `1_{|x| <= 1}`.
    ///
    /// Not available for custom compound-Poisson jump laws (the truncated
    /// mean of the law is unknown) or the generalized hyperbolic family
    /// (its jump measure has no closed form).
    pub fn levy_triplet(&self) -> Result<LevyTriplet> {
        self.validate(false)?;
        match *self {
            ModelSpec::BrownianMotion { mu, sigma } => Ok(LevyTriplet {
                drift: mu,
                diffusion: sigma,
                jump_rate: Some(0.0),
                atoms: Vec::new(),
            }),
            ModelSpec::Poisson { lambda } => Ok(LevyTriplet {
                drift: lambda,
                diffusion: 0.0,
                jump_rate: Some(lambda),
                atoms: vec![(1.0, lambda)],
            }),
            ModelSpec::CompoundPoisson { lambda, ref jumps } => match jumps {
                JumpLaw::Normal { mean, std_dev } => {
                    let atoms = if *std_dev == 0.0 && *mean != 0.0 {
                        vec![(*mean, lambda)]
                    } else {
                        Vec::new()
                    };
                    Ok(LevyTriplet {
                        drift: lambda * normal_partial_mean(*mean, *std_dev),
                        diffusion: 0.0,
                        jump_rate: Some(lambda),
                        atoms,
                    })
                }
                JumpLaw::Custom(_) => Err(LevyError::NotAvailable(
                    "levy_triplet requires a closed-form truncated jump mean, \
                     which a custom jump law does not provide"
                        .to_string(),
                )),
            },
            ModelSpec::Merton {
                mu,
                sigma,
                lambda,
                jump_mean,
                jump_std,
            } => {
                let atoms = if jump_std == 0.0 && jump_mean != 0.0 {
                    vec![(jump_mean, lambda)]
                } else {
                    Vec::new()
                };
                Ok(LevyTriplet {
                    drift: mu + lambda * normal_partial_mean(jump_mean, jump_std),
                    diffusion: sigma,
                    jump_rate: Some(lambda),
                    atoms,
                })
            }
            ModelSpec::Kou {
                mu,
                sigma,
                lambda,
                p,
                theta1,
                theta2,
            } => Ok(LevyTriplet {
                drift: mu + lambda * kou_partial_mean(p, theta1, theta2),
                diffusion: sigma,
                jump_rate: Some(lambda),
                atoms: Vec::new(),
            }),
            ModelSpec::VarianceGamma { sigma, nu, theta } => {
                let (g, m) = super::vg_gamma_rates(sigma, nu, theta);
                let c = 1.0 / nu;
                Ok(LevyTriplet {
                    drift: theta - c * ((-m).exp() / m - (-g).exp() / g),
                    diffusion: 0.0,
                    jump_rate: None,
                    atoms: Vec::new(),
                })
            }
            ModelSpec::Cgmy { c, g, m, y } => Ok(LevyTriplet {
                drift: tempered_stable_drift(c, g, m, y)?,
                diffusion: 0.0,
                // infinite for every Y in [0, 2): the origin singularity
                // is at least 1/|x|
                jump_rate: None,
                atoms: Vec::new(),
            }),
            ModelSpec::NormalInverseGaussian {
                alpha,
                beta,
                delta,
                mu,
            } => {
                let gamma0 = (alpha * alpha - beta * beta).sqrt();
                let mean = mu + delta * beta / gamma0;
                let tails = tail_mean(
                    |x| self.levy_density(x),
                    alpha - beta,
                    alpha + beta,
                )?;
                Ok(LevyTriplet {
                    drift: mean - tails,
                    diffusion: 0.0,
                    jump_rate: None,
                    atoms: Vec::new(),
                })
            }
            ModelSpec::GeneralizedHyperbolic { .. } => Err(LevyError::NotAvailable(
                "the generalized hyperbolic jump measure has no closed form; \
                 no triplet is provided"
                    .to_string(),
            )),
            ModelSpec::Meixner { alpha, beta, delta } => {
                let mean = alpha * delta * (0.5 * beta).tan();
                let pi = std::f64::consts::PI;
                let tails = tail_mean(
                    |x| self.levy_density(x),
                    (pi - beta) / alpha,
                    (pi + beta) / alpha,
                )?;
                Ok(LevyTriplet {
                    drift: mean - tails,
                    diffusion: 0.0,
                    jump_rate: None,
                    atoms: Vec::new(),
                })
            }
        }
    }

    /// The Lévy (jump) density `nu(x)` at `x != 0`.
    ///
    /// Returns `Ok(0.0)` for Brownian motion (no jumps), and
    /// `NotAvailable` for atomic jump measures (Poisson), custom jump
    /// laws, and the generalized hyperbolic family.
    pub fn levy_density(&self, x: f64) -> Result<f64> {
        if x == 0.0 || !x.is_finite() {
            return Err(LevyError::Domain(format!(
                "the jump density is defined on the punctured real line, got x = {x}"
            )));
        }
        match *self {
            ModelSpec::BrownianMotion { .. } => Ok(0.0),
            ModelSpec::Poisson { .. } => Err(LevyError::NotAvailable(
                "the jump measure is atomic (unit mass at 1); see levy_triplet".to_string(),
            )),
            ModelSpec::CompoundPoisson { lambda, ref jumps } => match jumps {
                JumpLaw::Normal { mean, std_dev } => {
                    if *std_dev == 0.0 {
                        return Err(LevyError::NotAvailable(
                            "the jump measure is atomic; see levy_triplet".to_string(),
                        ));
                    }
                    Ok(lambda * std_normal_pdf((x - mean) / std_dev) / std_dev)
                }
                JumpLaw::Custom(_) => Err(LevyError::NotAvailable(
                    "custom jump laws do not expose a density".to_string(),
                )),
            },
            ModelSpec::Merton {
                lambda,
                jump_mean,
                jump_std,
                ..
            } => {
                if jump_std == 0.0 {
                    return Err(LevyError::NotAvailable(
                        "the jump measure is atomic; see levy_triplet".to_string(),
                    ));
                }
                Ok(lambda * std_normal_pdf((x - jump_mean) / jump_std) / jump_std)
            }
            ModelSpec::Kou {
                lambda,
                p,
                theta1,
                theta2,
                ..
            } => {
                if x > 0.0 {
                    Ok(lambda * p * theta1 * (-theta1 * x).exp())
                } else {
                    Ok(lambda * (1.0 - p) * theta2 * (theta2 * x).exp())
                }
            }
            ModelSpec::VarianceGamma { sigma, nu, theta } => {
                let (g, m) = super::vg_gamma_rates(sigma, nu, theta);
                let c = 1.0 / nu;
                if x > 0.0 {
                    Ok(c * (-m * x).exp() / x)
                } else {
                    Ok(c * (g * x).exp() / -x)
                }
            }
            ModelSpec::Cgmy { c, g, m, y } => {
                let ax = x.abs();
                let rate = if x > 0.0 { m } else { g };
                Ok(c * (-rate * ax).exp() / ax.powf(1.0 + y))
            }
            ModelSpec::NormalInverseGaussian {
                alpha, beta, delta, ..
            } => {
                let ax = x.abs();
                let k1 = bessel_k(1.0, alpha * ax)?;
                Ok(delta * alpha / std::f64::consts::PI * (beta * x).exp() * k1 / ax)
            }
            ModelSpec::GeneralizedHyperbolic { .. } => Err(LevyError::NotAvailable(
                "the generalized hyperbolic jump density has no closed form".to_string(),
            )),
            ModelSpec::Meixner { alpha, beta, delta } => {
                let s = x / alpha;
                Ok(delta * (beta * s).exp() / (x * (std::f64::consts::PI * s).sinh()))
            }
        }
    }
}
