//! Closed-form marginal densities, plus the auxiliary subordinator
//! densities used to verify the mixing-variable samplers.

use super::ModelSpec;
use crate::error::LevyError;
use crate::specfun::{bessel_k, bessel_k_scaled, log_gamma, log_gamma_real};
use crate::Result;
use num_complex::Complex64;
use std::f64::consts::PI;

impl ModelSpec {
    /// The marginal density of `L_t` where a closed form exists.
    ///
    /// Available for Brownian motion, normal inverse Gaussian, and Meixner
    /// at any horizon `t > 0`, and for the generalized hyperbolic family at
    /// `t = 1` only (it is not closed under convolution). All other models
    /// return `NotAvailable`.
    pub fn density(&self, x: f64, t: f64) -> Result<f64> {
        self.validate(false)?;
        if !t.is_finite() || t <= 0.0 {
            return Err(LevyError::Domain(format!(
                "density requires t > 0, got t = {t}"
            )));
        }
        if !x.is_finite() {
            return Err(LevyError::Domain(format!(
                "density requires finite x, got x = {x}"
            )));
        }
        match *self {
            ModelSpec::BrownianMotion { mu, sigma } => {
                let sd = sigma * t.sqrt();
                let z = (x - mu * t) / sd;
                Ok((-0.5 * z * z).exp() / (sd * (2.0 * PI).sqrt()))
            }
            ModelSpec::NormalInverseGaussian {
                alpha,
                beta,
                delta,
                mu,
            } => {
                let dt = delta * t;
                let loc = x - mu * t;
                let gamma0 = (alpha * alpha - beta * beta).sqrt();
                let q = (dt * dt + loc * loc).sqrt();
                let ln_k1 = bessel_k_scaled(1.0, alpha * q)?.ln() - alpha * q;
                let ln_f =
                    (alpha * dt / PI).ln() + dt * gamma0 + beta * loc + ln_k1 - q.ln();
                Ok(ln_f.exp())
            }
            ModelSpec::GeneralizedHyperbolic {
                alpha,
                beta,
                delta,
                mu,
                lambda,
            } => {
                if t != 1.0 {
                    return Err(LevyError::NotAvailable(
                        "the generalized hyperbolic marginal is closed-form only \
                         at t = 1 (the family is not closed under convolution)"
                            .to_string(),
                    ));
                }
                let gamma0 = (alpha * alpha - beta * beta).sqrt();
                let loc = x - mu;
                let q = (delta * delta + loc * loc).sqrt();
                let ln_norm = lambda * gamma0.ln()
                    - 0.5 * (2.0 * PI).ln()
                    - (lambda - 0.5) * alpha.ln()
                    - lambda * delta.ln()
                    - bessel_k(lambda, delta * gamma0)?.ln();
                let order = lambda - 0.5;
                let ln_k = bessel_k_scaled(order, alpha * q)?.ln() - alpha * q;
                Ok((ln_norm + order * q.ln() + ln_k + beta * loc).exp())
            }
            ModelSpec::Meixner { alpha, beta, delta } => {
                let r = delta * t;
                let lg_complex = log_gamma(Complex64::new(r, x / alpha))?;
                let ln_f = 2.0 * r * (2.0 * (0.5 * beta).cos()).ln()
                    - (2.0 * alpha * PI).ln()
                    - log_gamma_real(2.0 * r)?
                    + beta * x / alpha
                    + 2.0 * lg_complex.re;
                Ok(ln_f.exp())
            }
            _ => Err(LevyError::NotAvailable(format!(
                "no closed-form marginal density for model '{}'",
                self.name()
            ))),
        }
    }
}

/// Generalized inverse Gaussian density with parameters `(p, a, b)`:
/// proportional to `x^{p-1} exp(-(a x + b / x) / 2)` on `x > 0`.
pub fn gig_density(x: f64, p: f64, a: f64, b: f64) -> Result<f64> {
    if !p.is_finite() || !(a > 0.0 && a.is_finite()) || !(b > 0.0 && b.is_finite()) {
        return Err(LevyError::Domain(format!(
            "gig_density requires a > 0 and b > 0, got p = {p}, a = {a}, b = {b}"
        )));
    }
    if !x.is_finite() {
        return Err(LevyError::Domain(format!("gig_density: x = {x}")));
    }
    if x <= 0.0 {
        return Ok(0.0);
    }
    let norm = 0.5 * (a / b).powf(0.5 * p) / bessel_k(p, (a * b).sqrt())?;
    Ok(norm * x.powf(p - 1.0) * (-0.5 * (a * x + b / x)).exp())
}

/// Gamma density with the given shape and rate.
pub fn gamma_density(x: f64, shape: f64, rate: f64) -> Result<f64> {
    if !(shape > 0.0 && shape.is_finite()) || !(rate > 0.0 && rate.is_finite()) {
        return Err(LevyError::Domain(format!(
            "gamma_density requires positive shape and rate, got {shape}, {rate}"
        )));
    }
    if !x.is_finite() {
        return Err(LevyError::Domain(format!("gamma_density: x = {x}")));
    }
    if x <= 0.0 {
        return Ok(0.0);
    }
    Ok((shape * rate.ln() + (shape - 1.0) * x.ln() - rate * x - log_gamma_real(shape)?)
        .exp())
}

/// Inverse Gaussian density in the mean/shape parameterization.
pub fn inverse_gaussian_density(x: f64, mean: f64, shape: f64) -> Result<f64> {
    if !(mean > 0.0 && mean.is_finite()) || !(shape > 0.0 && shape.is_finite()) {
        return Err(LevyError::Domain(format!(
            "inverse_gaussian_density requires positive mean and shape, \
             got {mean}, {shape}"
        )));
    }
    if !x.is_finite() {
        return Err(LevyError::Domain(format!("inverse_gaussian_density: x = {x}")));
    }
    if x <= 0.0 {
        return Ok(0.0);
    }
    let dev = x - mean;
    Ok((shape / (2.0 * PI * x * x * x)).sqrt()
        * (-shape * dev * dev / (2.0 * mean * mean * x)).exp())
}
