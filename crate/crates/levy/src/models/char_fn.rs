//! Characteristic exponents, characteristic functions, and the exponential
//! martingale drift correction.
//!
//! Conventions: the characteristic exponent `psi` satisfies
//! `E[exp(i u L_t)] = exp(-t psi(u))`, so `psi(0) = 0`, `Re psi(u) >= 0`
//! for real `u`, and increments compose as a semigroup in `t`. Under the
//! risk-neutral measure with rate `r`, the log-asset drift is
//! `omega = r + psi(-i)`, which makes the discounted asset price a
//! martingale.

use super::{JumpLaw, ModelSpec};
use crate::error::LevyError;
use crate::specfun::{bessel_k, ln_bessel_k_complex, log_gamma_real};
use crate::Result;
use num_complex::Complex64;

/// Probability measure under which curves and paths are produced.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Measure {
    /// The model's own (physical) measure.
    Physical,
    /// Risk-neutral measure with continuously compounded `rate`.
    RiskNeutral { rate: f64 },
}

/// A characteristic function evaluated on a grid of real frequencies at a
/// fixed horizon.
#[derive(Debug, Clone)]
pub struct CfCurve {
    pub u: Vec<f64>,
    pub t: f64,
    pub measure: Measure,
    pub values: Vec<Complex64>,
}

fn undefined_at(u: Complex64) -> LevyError {
    LevyError::Domain(format!(
        "characteristic exponent is undefined at u = {u} for these parameters"
    ))
}

// Gamma(-y) for y in (0, 2), y not 0 or 1, via Gamma(2 - y) / (y (y - 1)).
fn gamma_neg(y: f64) -> Result<f64> {
    Ok((log_gamma_real(2.0 - y)?).exp() / (y * (y - 1.0)))
}

impl ModelSpec {
    /// The characteristic exponent `psi(u)` evaluated at complex `u`.
    ///
    /// Real `u` is always admissible for valid parameters. Complex
    /// arguments (used to form exponential moments) must lie in the strip
    /// where the defining integral converges; outside it the method
    /// returns a domain error rather than a meaningless branch value.
    pub fn char_exponent(&self, u: Complex64) -> Result<Complex64> {
        let i = Complex64::i();
        let iu = i * u;
        match *self {
            ModelSpec::BrownianMotion { mu, sigma } => {
                Ok(0.5 * sigma * sigma * u * u - iu * mu)
            }
            ModelSpec::Poisson { lambda } => Ok(lambda * (1.0 - iu.exp())),
            ModelSpec::CompoundPoisson { lambda, ref jumps } => {
                let cf = match jumps {
                    JumpLaw::Normal { mean, std_dev } => {
                        (iu * *mean - 0.5 * std_dev * std_dev * u * u).exp()
                    }
                    JumpLaw::Custom(law) => (law.cf)(u),
                };
                Ok(lambda * (1.0 - cf))
            }
            ModelSpec::Merton {
                mu,
                sigma,
                lambda,
                jump_mean,
                jump_std,
            } => {
                let jump_cf = (iu * jump_mean - 0.5 * jump_std * jump_std * u * u).exp();
                Ok(0.5 * sigma * sigma * u * u - iu * mu + lambda * (1.0 - jump_cf))
            }
            ModelSpec::Kou {
                mu,
                sigma,
                lambda,
                p,
                theta1,
                theta2,
            } => {
                // the exponential tails admit Im(u) in (-theta1, theta2)
                if u.im <= -theta1 || u.im >= theta2 {
                    return Err(undefined_at(u));
                }
                let up = Complex64::new(theta1, 0.0) / (theta1 - iu);
                let down = Complex64::new(theta2, 0.0) / (theta2 + iu);
                Ok(0.5 * sigma * sigma * u * u - iu * mu
                    + lambda * (1.0 - p * up - (1.0 - p) * down))
            }
            ModelSpec::VarianceGamma { sigma, nu, theta } => {
                let z = 1.0 - iu * (theta * nu) + 0.5 * sigma * sigma * nu * u * u;
                if z.norm() == 0.0 || (z.re <= 0.0 && z.im.abs() < 1e-14 * (1.0 + z.re.abs())) {
                    return Err(undefined_at(u));
                }
                Ok(z.ln() / nu)
            }
            ModelSpec::Cgmy { c, g, m, y } => {
                // tempered tails admit Im(u) in (-g, m)
                if m + u.im <= 0.0 || g - u.im <= 0.0 {
                    return Err(undefined_at(u));
                }
                let gc = Complex64::new(g, 0.0);
                let mc = Complex64::new(m, 0.0);
                let m_shift = mc - iu;
                let g_shift = gc + iu;
                // pair each tempered term with its shifted counterpart so
                // the exponent vanishes exactly at u = 0
                if y == 1.0 {
                    // limit of Gamma(-y)[...] as y -> 1
                    Ok(c * ((gc * gc.ln() - g_shift * g_shift.ln())
                        + (mc * mc.ln() - m_shift * m_shift.ln())))
                } else if y == 0.0 {
                    // limit as y -> 0
                    Ok(c * ((m_shift.ln() - mc.ln()) + (g_shift.ln() - gc.ln())))
                } else {
                    let gamma_my = gamma_neg(y)?;
                    Ok(c * gamma_my
                        * ((gc.powf(y) - g_shift.powf(y)) + (mc.powf(y) - m_shift.powf(y))))
                }
            }
            ModelSpec::NormalInverseGaussian {
                alpha,
                beta,
                delta,
                mu,
            } => {
                let a2 = Complex64::new(alpha * alpha, 0.0);
                let shifted = Complex64::new(beta, 0.0) + iu;
                let w2 = a2 - shifted * shifted;
                if w2.re < 0.0 && w2.im == 0.0 {
                    return Err(undefined_at(u));
                }
                let base = Complex64::new(beta, 0.0);
                let g2 = a2 - base * base;
                Ok(delta * (w2.sqrt() - g2.sqrt()) - iu * mu)
            }
            ModelSpec::GeneralizedHyperbolic {
                alpha,
                beta,
                delta,
                mu,
                lambda,
            } => {
                let a2 = Complex64::new(alpha * alpha, 0.0);
                let base = Complex64::new(beta, 0.0);
                let shifted = base + iu;
                let w2 = a2 - shifted * shifted;
                let g2 = a2 - base * base;
                if w2.re < 0.0 && w2.im == 0.0 {
                    return Err(undefined_at(u));
                }
                let ln_phi = if w2.norm() < 1e-12 * alpha * alpha {
                    // exponential-moment boundary: K_lambda(z) ~
                    // Gamma(|l|) 2^{|l|-1} z^{-|l|} collapses the ratio to a
                    // finite limit, which exists only for lambda < 0
                    if lambda >= 0.0 {
                        return Err(undefined_at(u));
                    }
                    let gamma0 = g2.sqrt().re;
                    let limit = 0.5
                        * (log_gamma_real(-lambda)?).exp()
                        * (0.5 * delta * gamma0).powf(lambda)
                        / bessel_k(lambda, delta * gamma0)?;
                    Complex64::new(limit.ln(), 0.0)
                } else {
                    let w = w2.sqrt();
                    let g0 = g2.sqrt();
                    0.5 * lambda * (g2.ln() - w2.ln())
                        + ln_bessel_k_complex(lambda, delta * w)?
                        - ln_bessel_k_complex(lambda, delta * g0)?
                };
                Ok(-ln_phi - iu * mu)
            }
            ModelSpec::Meixner { alpha, beta, delta } => {
                let half = (alpha * u - i * beta) / 2.0;
                let ch = half.cosh();
                if ch.norm() == 0.0 || (ch.re <= 0.0 && ch.im.abs() < 1e-12) {
                    return Err(undefined_at(u));
                }
                let base = Complex64::new((0.5 * beta).cos(), 0.0);
                Ok(-2.0 * delta * (base.ln() - ch.ln()))
            }
        }
    }

    /// Characteristic function `E[exp(i u X_t)]` of the increment at
    /// horizon `t`, for real frequency `u`. Under
    /// [`Measure::RiskNeutral`], `X_t` is the log-return
    /// `omega t + L_t` with `omega = mean_correction(rate)`.
    pub fn char_function(&self, u: f64, t: f64, measure: Measure) -> Result<Complex64> {
        if !t.is_finite() || t < 0.0 {
            return Err(LevyError::Domain(format!(
                "char_function requires t >= 0, got {t}"
            )));
        }
        let uc = Complex64::new(u, 0.0);
        let psi = self.char_exponent(uc)?;
        let drift = match measure {
            Measure::Physical => Complex64::new(0.0, 0.0),
            Measure::RiskNeutral { rate } => {
                Complex64::i() * uc * self.mean_correction(rate)? * t
            }
        };
        Ok((drift - t * psi).exp())
    }

    /// Evaluates the characteristic function on a frequency grid.
    pub fn cf_curve(&self, u_grid: &[f64], t: f64, measure: Measure) -> Result<CfCurve> {
        if !t.is_finite() || t < 0.0 {
            return Err(LevyError::Domain(format!(
                "cf_curve requires t >= 0, got {t}"
            )));
        }
        // resolve the drift once so the curve shares a single correction
        let omega = match measure {
            Measure::Physical => 0.0,
            Measure::RiskNeutral { rate } => self.mean_correction(rate)?,
        };
        let mut values = Vec::with_capacity(u_grid.len());
        for &u in u_grid {
            let uc = Complex64::new(u, 0.0);
            let psi = self.char_exponent(uc)?;
            let drift = Complex64::i() * uc * omega * t;
            values.push((drift - t * psi).exp());
        }
        Ok(CfCurve {
            u: u_grid.to_vec(),
            t,
            measure,
            values,
        })
    }

    /// The exponential-martingale drift correction
    /// `omega = rate + psi(-i)`: with `S_t = s0 exp(omega t + L_t)`, the
    /// discounted asset price is a martingale. Fails when the parameters
    /// do not admit a finite exponential moment.
    pub fn mean_correction(&self, rate: f64) -> Result<f64> {
        if !rate.is_finite() {
            return Err(LevyError::Domain(format!(
                "mean_correction requires a finite rate, got {rate}"
            )));
        }
        self.validate(true)?;
        let psi = self.char_exponent(Complex64::new(0.0, -1.0))?;
        if psi.im.abs() > 1e-9 * (1.0 + psi.re.abs()) {
            return Err(LevyError::Domain(format!(
                "psi(-i) should be real, got {psi}"
            )));
        }
        Ok(rate + psi.re)
    }

    /// Closed-form reference for [`ModelSpec::mean_correction`], written in
    /// real arithmetic along an independent code path. Returns `None` when
    /// no closed form is available (custom jump laws) or the parameters are
    /// not risk-neutral eligible.
    pub fn mean_correction_reference(&self, rate: f64) -> Option<f64> {
        if !rate.is_finite() || self.validate(true).is_err() {
            return None;
        }
        let psi_minus_i = match *self {
            ModelSpec::BrownianMotion { mu, sigma } => -mu - 0.5 * sigma * sigma,
            ModelSpec::Poisson { lambda } => lambda * (1.0 - std::f64::consts::E),
            ModelSpec::CompoundPoisson { lambda, ref jumps } => match jumps {
                JumpLaw::Normal { mean, std_dev } => {
                    lambda * (1.0 - (mean + 0.5 * std_dev * std_dev).exp())
                }
                JumpLaw::Custom(_) => return None,
            },
            ModelSpec::Merton {
                mu,
                sigma,
                lambda,
                jump_mean,
                jump_std,
            } => {
                -mu - 0.5 * sigma * sigma
                    + lambda * (1.0 - (jump_mean + 0.5 * jump_std * jump_std).exp())
            }
            ModelSpec::Kou {
                mu,
                sigma,
                lambda,
                p,
                theta1,
                theta2,
            } => {
                -mu - 0.5 * sigma * sigma
                    + lambda
                        * (1.0 - p * theta1 / (theta1 - 1.0)
                            - (1.0 - p) * theta2 / (theta2 + 1.0))
            }
            ModelSpec::VarianceGamma { sigma, nu, theta } => {
                (1.0 - theta * nu - 0.5 * sigma * sigma * nu).ln() / nu
            }
            ModelSpec::Cgmy { c, g, m, y } => {
                if y == 1.0 {
                    c * (g * g.ln() + m * m.ln()
                        - (m - 1.0) * (m - 1.0).ln()
                        - (g + 1.0) * (g + 1.0).ln())
                } else if y == 0.0 {
                    c * (((m - 1.0) * (g + 1.0)) / (g * m)).ln()
                } else {
                    let gamma_my = gamma_neg(y).ok()?;
                    c * gamma_my
                        * (g.powf(y) + m.powf(y) - (m - 1.0).powf(y) - (g + 1.0).powf(y))
                }
            }
            ModelSpec::NormalInverseGaussian {
                alpha,
                beta,
                delta,
                mu,
            } => {
                let g1 = (alpha * alpha - (beta + 1.0) * (beta + 1.0)).max(0.0).sqrt();
                let g0 = (alpha * alpha - beta * beta).sqrt();
                delta * (g1 - g0) - mu
            }
            ModelSpec::GeneralizedHyperbolic {
                alpha,
                beta,
                delta,
                mu,
                lambda,
            } => {
                let g0 = (alpha * alpha - beta * beta).sqrt();
                let g1sq = alpha * alpha - (beta + 1.0) * (beta + 1.0);
                let k0 = bessel_k(lambda, delta * g0).ok()?;
                let ln_phi = if g1sq <= 0.0 {
                    // boundary: the Bessel ratio has a finite limit for
                    // lambda < 0 (guaranteed by the eligibility check)
                    (0.5 * (log_gamma_real(-lambda).ok()?).exp()
                        * (0.5 * delta * g0).powf(lambda)
                        / k0)
                        .ln()
                } else {
                    let g1 = g1sq.sqrt();
                    let k1 = bessel_k(lambda, delta * g1).ok()?;
                    0.5 * lambda * ((g0 * g0).ln() - g1sq.ln()) + k1.ln() - k0.ln()
                };
                -ln_phi - mu
            }
            ModelSpec::Meixner { alpha, beta, delta } => {
                -2.0 * delta * ((0.5 * beta).cos().ln() - (0.5 * (alpha + beta)).cos().ln())
            }
        };
        Some(rate + psi_minus_i)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::JumpLaw;
    use approx::assert_relative_eq;

    // Reference values in this module were produced with an independent
    // arbitrary-precision implementation of each formula and frozen.

    fn default_specs() -> Vec<ModelSpec> {
        vec![
            ModelSpec::BrownianMotion { mu: 0.5, sigma: 0.5 },
            ModelSpec::Poisson { lambda: 2.0 },
            ModelSpec::CompoundPoisson {
                lambda: 2.0,
                jumps: JumpLaw::Normal { mean: 0.0, std_dev: 0.5 },
            },
            ModelSpec::Merton {
                mu: 0.5,
                sigma: 0.75,
                lambda: 1.5,
                jump_mean: 0.0,
                jump_std: 1.0,
            },
            ModelSpec::Kou {
                mu: 0.5,
                sigma: 0.75,
                lambda: 1.5,
                p: 0.5,
                theta1: 0.25,
                theta2: 0.5,
            },
            ModelSpec::VarianceGamma { sigma: 0.75, nu: 0.5, theta: 0.1 },
            ModelSpec::Cgmy { c: 5.0, g: 25.0, m: 25.0, y: 1.0 },
            ModelSpec::NormalInverseGaussian {
                alpha: 2.0,
                beta: 1.0,
                delta: 1.5,
                mu: 0.0,
            },
            ModelSpec::GeneralizedHyperbolic {
                alpha: 2.0,
                beta: 1.0,
                delta: 1.5,
                mu: 0.0,
                lambda: 1.0,
            },
            ModelSpec::Meixner { alpha: 0.5, beta: 0.0, delta: 4.0 },
        ]
    }

    #[test]
    fn psi_vanishes_at_zero() {
        for spec in default_specs() {
            let psi = spec.char_exponent(Complex64::new(0.0, 0.0)).unwrap();
            assert!(
                psi.norm() <= 1e-14,
                "{}: psi(0) = {psi}",
                spec.name()
            );
        }
    }

    #[test]
    fn brownian_psi_and_cf() {
        let spec = ModelSpec::BrownianMotion { mu: 0.5, sigma: 0.5 };
        let phi = spec
            .char_function(1.0, 1.0, Measure::Physical)
            .unwrap();
        // exp(-1/8) cos(1/2) + i exp(-1/8) sin(1/2)
        assert_relative_eq!(phi.re, 0.774463892630507917, max_relative = 1e-14);
        assert_relative_eq!(phi.norm(), (-0.125f64).exp(), max_relative = 1e-14);
    }

    #[test]
    fn poisson_psi_at_pi() {
        let spec = ModelSpec::Poisson { lambda: 2.0 };
        let psi = spec.char_exponent(Complex64::new(std::f64::consts::PI, 0.0)).unwrap();
        // exp(i pi) = -1 exactly, so psi = 2 (1 - (-1)) = 4
        assert_relative_eq!(psi.re, 4.0, max_relative = 1e-14);
        assert!(psi.im.abs() < 1e-14);
    }

    #[test]
    fn variance_gamma_psi_and_cf() {
        let spec = ModelSpec::VarianceGamma { sigma: 0.75, nu: 0.5, theta: 0.1 };
        let psi = spec.char_exponent(Complex64::new(1.0, 0.0)).unwrap();
        assert_relative_eq!(psi.re, 0.265072433008767791, max_relative = 1e-13);
        assert_relative_eq!(psi.im, -0.0876151423162402401, max_relative = 1e-13);
        // Phi(1;1) = (1 + sigma^2 nu / 2 - i theta nu)^{-1/nu}
        let phi = spec.char_function(1.0, 1.0, Measure::Physical).unwrap();
        let direct = Complex64::new(1.140625, -0.05).powf(-2.0);
        assert!((phi - direct).norm() < 1e-14);
        assert_relative_eq!(phi.re, 0.764207782418112058, max_relative = 1e-13);
        assert_relative_eq!(phi.im, 0.0671280290792857683, max_relative = 1e-13);
    }

    #[test]
    fn kou_psi_closed_value() {
        let spec = ModelSpec::Kou {
            mu: 0.0,
            sigma: 0.0,
            lambda: 1.5,
            p: 0.5,
            theta1: 2.0,
            theta2: 3.0,
        };
        let psi = spec.char_exponent(Complex64::new(1.0, 0.0)).unwrap();
        assert_relative_eq!(psi.re, 0.225, max_relative = 1e-14);
        assert_relative_eq!(psi.im, -0.075, max_relative = 1e-13);
    }

    #[test]
    fn merton_psi_value() {
        let spec = ModelSpec::Merton {
            mu: 0.5,
            sigma: 0.75,
            lambda: 1.5,
            jump_mean: 0.0,
            jump_std: 1.0,
        };
        let psi = spec.char_exponent(Complex64::new(1.0, 0.0)).unwrap();
        assert_relative_eq!(psi.re, 0.871454010431049865, max_relative = 1e-13);
        assert_relative_eq!(psi.im, -0.5, max_relative = 1e-13);
    }

    #[test]
    fn cgmy_psi_across_activity_indices() {
        for (y, want) in [
            (0.5, 0.0354313673530231735),
            (1.0, 0.199946700770771953),
            (1.5, 1.77227668817649818),
        ] {
            let spec = ModelSpec::Cgmy { c: 5.0, g: 25.0, m: 25.0, y };
            let psi = spec.char_exponent(Complex64::new(1.0, 0.0)).unwrap();
            assert_relative_eq!(psi.re, want, max_relative = 1e-12);
            assert!(psi.im.abs() < 1e-13, "Y={y}: Im psi = {}", psi.im);
        }
    }

    #[test]
    fn nig_psi_value() {
        let spec = ModelSpec::NormalInverseGaussian {
            alpha: 2.0,
            beta: 1.0,
            delta: 1.5,
            mu: 0.0,
        };
        let psi = spec.char_exponent(Complex64::new(1.0, 0.0)).unwrap();
        assert_relative_eq!(psi.re, 0.489180329553922435, max_relative = 1e-13);
        assert_relative_eq!(psi.im, -0.728802407634968517, max_relative = 1e-13);
    }

    #[test]
    fn gh_psi_values() {
        let spec = ModelSpec::GeneralizedHyperbolic {
            alpha: 2.0,
            beta: 1.0,
            delta: 1.5,
            mu: 0.0,
            lambda: 1.0,
        };
        let psi1 = spec.char_exponent(Complex64::new(1.0, 0.0)).unwrap();
        assert_relative_eq!(psi1.re, 0.810235780220511828, max_relative = 1e-11);
        assert_relative_eq!(psi1.im, -1.09760899499399586, max_relative = 1e-11);
        let psi2 = spec.char_exponent(Complex64::new(3.7, 0.0)).unwrap();
        assert_relative_eq!(psi2.re, 5.09609918329234952, max_relative = 1e-11);
        assert_relative_eq!(psi2.im, -1.65127586630079493, max_relative = 1e-11);
    }

    #[test]
    fn gh_with_negative_half_index_is_nig() {
        let gh = ModelSpec::GeneralizedHyperbolic {
            alpha: 2.0,
            beta: 1.0,
            delta: 1.5,
            mu: 0.0,
            lambda: -0.5,
        };
        let nig = ModelSpec::NormalInverseGaussian {
            alpha: 2.0,
            beta: 1.0,
            delta: 1.5,
            mu: 0.0,
        };
        for u in [0.4, 1.0, 2.2, -3.0] {
            let a = gh.char_exponent(Complex64::new(u, 0.0)).unwrap();
            let b = nig.char_exponent(Complex64::new(u, 0.0)).unwrap();
            assert!((a - b).norm() < 1e-10, "u={u}: {a} vs {b}");
        }
    }

    #[test]
    fn meixner_psi_values() {
        let symmetric = ModelSpec::Meixner { alpha: 0.5, beta: 0.0, delta: 4.0 };
        let psi = symmetric.char_exponent(Complex64::new(1.0, 0.0)).unwrap();
        // 2 delta ln cosh(alpha/4): 8 ln cosh(0.25)
        assert_relative_eq!(psi.re, 0.247438428961290972, max_relative = 1e-13);
        assert!(psi.im.abs() < 1e-15);

        let skewed = ModelSpec::Meixner { alpha: 0.5, beta: 0.8, delta: 4.0 };
        let psi2 = skewed.char_exponent(Complex64::new(1.3, 0.0)).unwrap();
        assert_relative_eq!(psi2.re, 0.485158196543603056, max_relative = 1e-13);
        assert_relative_eq!(psi2.im, -1.05595189235097697, max_relative = 1e-13);
    }

    #[test]
    fn cf_is_hermitian_and_bounded() {
        let grid: Vec<f64> = (-40..=40).map(|k| k as f64 * 0.25).collect();
        for spec in default_specs() {
            for &t in &[0.1, 1.0, 5.0] {
                let curve = spec.cf_curve(&grid, t, Measure::Physical).unwrap();
                for (j, &u) in grid.iter().enumerate() {
                    let phi = curve.values[j];
                    assert!(
                        phi.norm() <= 1.0 + 1e-12,
                        "{} t={t} u={u}: |phi| = {}",
                        spec.name(),
                        phi.norm()
                    );
                    let mirrored = spec
                        .char_function(-u, t, Measure::Physical)
                        .unwrap();
                    assert!(
                        (mirrored - phi.conj()).norm() <= 1e-12,
                        "{} t={t} u={u}: hermitian violation",
                        spec.name()
                    );
                }
            }
        }
    }

    #[test]
    fn cf_semigroup_property() {
        let grid: Vec<f64> = (-10..=10).map(|k| k as f64 * 0.5).collect();
        for spec in default_specs() {
            for &(s, t) in &[(0.3, 0.7), (1.0, 1.0), (0.5, 2.5)] {
                for &u in &grid {
                    let a = spec.char_function(u, s + t, Measure::Physical).unwrap();
                    let b = spec.char_function(u, s, Measure::Physical).unwrap()
                        * spec.char_function(u, t, Measure::Physical).unwrap();
                    assert!(
                        (a - b).norm() <= 1e-12,
                        "{} u={u} s={s} t={t}: {a} vs {b}",
                        spec.name()
                    );
                }
            }
        }
    }

    #[test]
    fn mean_corrections_match_frozen_values() {
        let r = 0.05;
        let cases: Vec<(ModelSpec, f64)> = vec![
            (
                ModelSpec::BrownianMotion { mu: 0.5, sigma: 0.5 },
                r - 0.625,
            ),
            (
                ModelSpec::VarianceGamma { sigma: 0.75, nu: 0.5, theta: 0.1 },
                r - 0.422985868188468970,
            ),
            (
                ModelSpec::NormalInverseGaussian {
                    alpha: 2.0,
                    beta: 1.0,
                    delta: 1.5,
                    mu: 0.0,
                },
                r - 2.59807621135331594,
            ),
            (
                ModelSpec::GeneralizedHyperbolic {
                    alpha: 2.0,
                    beta: 0.5,
                    delta: 1.5,
                    mu: 0.0,
                    lambda: 1.0,
                },
                r - 1.53509912666943486,
            ),
            (
                ModelSpec::Cgmy { c: 5.0, g: 25.0, m: 25.0, y: 1.0 },
                r - 0.200053367495952968,
            ),
            (
                ModelSpec::Cgmy { c: 5.0, g: 25.0, m: 25.0, y: 1.5 },
                r - 1.77263117906366134,
            ),
            (
                ModelSpec::Meixner { alpha: 0.5, beta: 0.0, delta: 4.0 },
                r - 0.252648409979756862,
            ),
            (
                ModelSpec::Merton {
                    mu: 0.5,
                    sigma: 0.75,
                    lambda: 1.5,
                    jump_mean: 0.0,
                    jump_std: 1.0,
                },
                r - 1.75433190605019222,
            ),
            (
                ModelSpec::Kou {
                    mu: 0.5,
                    sigma: 0.75,
                    lambda: 1.5,
                    p: 0.5,
                    theta1: 10.0,
                    theta2: 5.0,
                },
                r - 71.0 / 96.0,
            ),
        ];
        for (spec, want) in cases {
            let got = spec.mean_correction(r).unwrap();
            assert_relative_eq!(got, want, max_relative = 1e-10);
            if let Some(reference) = spec.mean_correction_reference(r) {
                assert_relative_eq!(reference, want, max_relative = 1e-10);
            } else {
                panic!("{} should have a closed-form reference", spec.name());
            }
        }
    }

    #[test]
    fn mean_correction_rejects_ineligible_models() {
        let kou = ModelSpec::Kou {
            mu: 0.5,
            sigma: 0.75,
            lambda: 1.5,
            p: 0.5,
            theta1: 0.25,
            theta2: 0.5,
        };
        assert!(kou.mean_correction(0.05).is_err());
        assert!(kou.mean_correction_reference(0.05).is_none());

        let gh = ModelSpec::GeneralizedHyperbolic {
            alpha: 2.0,
            beta: 1.0,
            delta: 1.5,
            mu: 0.0,
            lambda: 1.0,
        };
        assert!(gh.mean_correction(0.05).is_err());
    }

    #[test]
    fn risk_neutral_cf_discounts_the_exponential_moment() {
        // under the corrected drift, E[S_t]/s0 = exp(r t); the CF encodes
        // this at u = -i, but an equivalent real check is that
        // phi_rn(u) = exp(i u omega t) phi(u)
        let spec = ModelSpec::VarianceGamma { sigma: 0.75, nu: 0.5, theta: 0.1 };
        let r = 0.03;
        let omega = spec.mean_correction(r).unwrap();
        let t = 2.0;
        for u in [0.5, 1.0, -2.0] {
            let rn = spec
                .char_function(u, t, Measure::RiskNeutral { rate: r })
                .unwrap();
            let phys = spec.char_function(u, t, Measure::Physical).unwrap();
            let twist = (Complex64::i() * u * omega * t).exp();
            assert!((rn - twist * phys).norm() < 1e-13);
        }
    }

    #[test]
    fn custom_jump_law_cf_is_used() {
        let law = std::sync::Arc::new(crate::models::CustomJumpLaw {
            cf: Box::new(|u| {
                let two = Complex64::new(2.0, 0.0);
                two / (two - Complex64::i() * u)
            }),
            sampler: Box::new(|s| s.exponential(2.0).unwrap()),
            mean: 0.5,
            variance: 0.25,
        });
        let spec = ModelSpec::CompoundPoisson {
            lambda: 3.0,
            jumps: JumpLaw::Custom(law),
        };
        let u = Complex64::new(1.0, 0.0);
        let psi = spec.char_exponent(u).unwrap();
        let want = 3.0 * (1.0 - Complex64::new(2.0, 0.0) / Complex64::new(2.0, -1.0));
        assert!((psi - want).norm() < 1e-14);
    }

    #[test]
    fn kou_strip_is_enforced() {
        let spec = ModelSpec::Kou {
            mu: 0.0,
            sigma: 0.5,
            lambda: 1.0,
            p: 0.5,
            theta1: 0.25,
            theta2: 0.5,
        };
        // u = -i means Im(u) = -1 < -theta1
        assert!(spec.char_exponent(Complex64::new(0.0, -1.0)).is_err());
        assert!(spec.char_exponent(Complex64::new(1.0, 0.0)).is_ok());
    }
}
