//! Increment samplers: draw `L_{t+h} - L_t` for each model.
//!
//! A sampler is bound to a model and step size at construction, so that
//! any precomputation (envelope certification, subordinator tables) is
//! paid once and drawing is cheap. Samplers are immutable and `Sync`;
//! randomness flows through the caller-owned [`RngStream`], which keeps
//! parallel path generation deterministic.

use super::{JumpLaw, ModelSpec};
use crate::error::LevyError;
use crate::rng::{MeixnerSampler, RngStream};
use crate::specfun::{gl_rule, h_y_kernel};
use crate::Result;
use std::sync::Arc;

/// Draws i.i.d. increments of a Lévy process over a fixed step.
#[derive(Debug)]
pub struct IncrementSampler {
    step: f64,
    kind: Kind,
}

enum Kind {
    Brownian {
        mean: f64,
        std_dev: f64,
    },
    PoissonCount {
        mean_count: f64,
    },
    // Gaussian jumps collapse to a single normal conditional on the count;
    // covers compound Poisson (no diffusion) and the Gaussian jump-diffusion.
    CompoundNormal {
        drift: f64,
        diffusion_std: f64,
        mean_count: f64,
        jump_mean: f64,
        jump_std: f64,
    },
    CompoundCustom {
        mean_count: f64,
        law: Arc<super::CustomJumpLaw>,
    },
    // Double-exponential jumps: gamma sums of the up- and down-magnitudes.
    CompoundTwoSided {
        drift: f64,
        diffusion_std: f64,
        mean_count: f64,
        p_up: f64,
        rate_up: f64,
        rate_down: f64,
    },
    // Brownian motion evaluated at a gamma subordinator.
    GammaTime {
        shape: f64,
        rate: f64,
        drift_coeff: f64,
        vol: f64,
    },
    // Difference of two gamma variates with a common shape.
    GammaDifference {
        shape: f64,
        rate_up: f64,
        rate_down: f64,
    },
    // Brownian motion with drift evaluated at a tempered-stable subordinator
    // drawn from a tabulated jump measure.
    TemperedStableTime {
        table: SubordinatorTable,
        drift_coeff: f64,
    },
    // Brownian motion evaluated at an inverse Gaussian subordinator.
    InverseGaussianTime {
        time_mean: f64,
        time_shape: f64,
        drift_coeff: f64,
        shift: f64,
    },
    // Brownian motion evaluated at a generalized inverse Gaussian mixing
    // variable; exact for the whole-horizon law, approximate on subgrids
    // (the family is not closed under convolution).
    GigTime {
        p: f64,
        a: f64,
        b: f64,
        drift_coeff: f64,
        shift: f64,
    },
    Meixner(MeixnerSampler),
}

impl std::fmt::Debug for Kind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            Kind::Brownian { .. } => "Brownian",
            Kind::PoissonCount { .. } => "PoissonCount",
            Kind::CompoundNormal { .. } => "CompoundNormal",
            Kind::CompoundCustom { .. } => "CompoundCustom",
            Kind::CompoundTwoSided { .. } => "CompoundTwoSided",
            Kind::GammaTime { .. } => "GammaTime",
            Kind::GammaDifference { .. } => "GammaDifference",
            Kind::TemperedStableTime { .. } => "TemperedStableTime",
            Kind::InverseGaussianTime { .. } => "InverseGaussianTime",
            Kind::GigTime { .. } => "GigTime",
            Kind::Meixner(_) => "Meixner",
        };
        f.write_str(name)
    }
}

impl ModelSpec {
    /// Builds a sampler for increments over step `h > 0`.
    pub fn increment_sampler(&self, h: f64) -> Result<IncrementSampler> {
        if !h.is_finite() || h <= 0.0 {
            return Err(LevyError::Domain(format!(
                "increment_sampler requires h > 0, got h = {h}"
            )));
        }
        self.validate(false)?;
        let kind = match *self {
            ModelSpec::BrownianMotion { mu, sigma } => Kind::Brownian {
                mean: mu * h,
                std_dev: sigma * h.sqrt(),
            },
            ModelSpec::Poisson { lambda } => Kind::PoissonCount {
                mean_count: lambda * h,
            },
            ModelSpec::CompoundPoisson { lambda, ref jumps } => match jumps {
                JumpLaw::Normal { mean, std_dev } => Kind::CompoundNormal {
                    drift: 0.0,
                    diffusion_std: 0.0,
                    mean_count: lambda * h,
                    jump_mean: *mean,
                    jump_std: *std_dev,
                },
                JumpLaw::Custom(law) => Kind::CompoundCustom {
                    mean_count: lambda * h,
                    law: Arc::clone(law),
                },
            },
            ModelSpec::Merton {
                mu,
                sigma,
                lambda,
                jump_mean,
                jump_std,
            } => Kind::CompoundNormal {
                drift: mu * h,
                diffusion_std: sigma * h.sqrt(),
                mean_count: lambda * h,
                jump_mean,
                jump_std,
            },
            ModelSpec::Kou {
                mu,
                sigma,
                lambda,
                p,
                theta1,
                theta2,
            } => Kind::CompoundTwoSided {
                drift: mu * h,
                diffusion_std: sigma * h.sqrt(),
                mean_count: lambda * h,
                p_up: p,
                rate_up: theta1,
                rate_down: theta2,
            },
            ModelSpec::VarianceGamma { sigma, nu, theta } => Kind::GammaTime {
                shape: h / nu,
                rate: 1.0 / nu,
                drift_coeff: theta,
                vol: sigma,
            },
            ModelSpec::Cgmy { c, g, m, y } => Kind::TemperedStableTime {
                table: SubordinatorTable::build(c, g, m, y)?,
                drift_coeff: 0.5 * (g - m),
            },
            ModelSpec::NormalInverseGaussian {
                alpha,
                beta,
                delta,
                mu,
            } => {
                let gamma0 = (alpha * alpha - beta * beta).sqrt();
                let dh = delta * h;
                Kind::InverseGaussianTime {
                    time_mean: dh / gamma0,
                    time_shape: dh * dh,
                    drift_coeff: beta,
                    shift: mu * h,
                }
            }
            ModelSpec::GeneralizedHyperbolic {
                alpha,
                beta,
                delta,
                mu,
                lambda,
            } => {
                let dh = delta * h;
                Kind::GigTime {
                    p: lambda,
                    a: alpha * alpha - beta * beta,
                    b: dh * dh,
                    drift_coeff: beta,
                    shift: mu * h,
                }
            }
            ModelSpec::Meixner { alpha, beta, delta } => {
                Kind::Meixner(MeixnerSampler::new(alpha, beta, delta * h)?)
            }
        };
        Ok(IncrementSampler { step: h, kind })
    }
}

impl IncrementSampler {
    /// A variance gamma sampler over step `h` using the difference-of-gammas
    /// representation rather than Brownian subordination; an independent
    /// route through the same law, useful for cross-validation.
    pub fn vg_gamma_difference(
        sigma: f64,
        nu: f64,
        theta: f64,
        h: f64,
    ) -> Result<IncrementSampler> {
        ModelSpec::VarianceGamma { sigma, nu, theta }.validate(false)?;
        if !h.is_finite() || h <= 0.0 {
            return Err(LevyError::Domain(format!(
                "vg_gamma_difference requires h > 0, got h = {h}"
            )));
        }
        let (g, m) = super::vg_gamma_rates(sigma, nu, theta);
        Ok(IncrementSampler {
            step: h,
            kind: Kind::GammaDifference {
                shape: h / nu,
                rate_up: m,
                rate_down: g,
            },
        })
    }

    /// The step size this sampler was built for.
    pub fn step(&self) -> f64 {
        self.step
    }

    /// Draws one increment.
    pub fn draw(&self, stream: &mut RngStream) -> Result<f64> {
        match &self.kind {
            Kind::Brownian { mean, std_dev } => Ok(mean + std_dev * stream.normal()),
            Kind::PoissonCount { mean_count } => {
                Ok(stream.poisson_count(*mean_count)? as f64)
            }
            Kind::CompoundNormal {
                drift,
                diffusion_std,
                mean_count,
                jump_mean,
                jump_std,
            } => {
                let mut x = *drift;
                if *diffusion_std > 0.0 {
                    x += diffusion_std * stream.normal();
                }
                let n = stream.poisson_count(*mean_count)?;
                if n > 0 {
                    let nf = n as f64;
                    x += jump_mean * nf + jump_std * nf.sqrt() * stream.normal();
                }
                Ok(x)
            }
            Kind::CompoundCustom { mean_count, law } => {
                let n = stream.poisson_count(*mean_count)?;
                let mut x = 0.0;
                for _ in 0..n {
                    x += (law.sampler)(stream);
                }
                Ok(x)
            }
            Kind::CompoundTwoSided {
                drift,
                diffusion_std,
                mean_count,
                p_up,
                rate_up,
                rate_down,
            } => {
                let mut x = *drift;
                if *diffusion_std > 0.0 {
                    x += diffusion_std * stream.normal();
                }
                let n = stream.poisson_count(*mean_count)?;
                if n > 0 {
                    let up = stream.binomial(n, *p_up)?;
                    let down = n - up;
                    if up > 0 {
                        x += stream.gamma(up as f64, *rate_up)?;
                    }
                    if down > 0 {
                        x -= stream.gamma(down as f64, *rate_down)?;
                    }
                }
                Ok(x)
            }
            Kind::GammaTime {
                shape,
                rate,
                drift_coeff,
                vol,
            } => {
                let tau = stream.gamma(*shape, *rate)?;
                Ok(drift_coeff * tau + vol * tau.sqrt() * stream.normal())
            }
            Kind::GammaDifference {
                shape,
                rate_up,
                rate_down,
            } => Ok(stream.gamma(*shape, *rate_up)? - stream.gamma(*shape, *rate_down)?),
            Kind::TemperedStableTime { table, drift_coeff } => {
                let tau = table.draw_time(self.step, stream)?;
                Ok(drift_coeff * tau + tau.sqrt() * stream.normal())
            }
            Kind::InverseGaussianTime {
                time_mean,
                time_shape,
                drift_coeff,
                shift,
            } => {
                let tau = stream.inverse_gaussian(*time_mean, *time_shape)?;
                Ok(shift + drift_coeff * tau + tau.sqrt() * stream.normal())
            }
            Kind::GigTime {
                p,
                a,
                b,
                drift_coeff,
                shift,
            } => {
                let tau = stream.gig(*p, *a, *b)?;
                Ok(shift + drift_coeff * tau + tau.sqrt() * stream.normal())
            }
            Kind::Meixner(sampler) => sampler.draw(stream),
        }
    }
}

/// Tabulated inverse-CDF sampler for the jump measure of the one-sided
/// tempered-stable subordinator underlying the two-sided tempered-stable
/// model: jumps with intensity density
/// `k(s) = C s^{-1-Y/2} e^{-G M s / 2} h_Y(B sqrt(s))`, `B = (G + M) / 2`,
/// where `h_Y` is the exponential kernel transform from the
/// special-function module.
/// Jumps below `s_min` are replaced by their expected contribution per
/// unit time, which keeps the truncation bias far below sampling noise.
struct SubordinatorTable {
    log_s: Vec<f64>,
    cum: Vec<f64>,
    total_rate: f64,
    small_mean_rate: f64,
}

const TABLE_NODES: usize = 2049;

impl SubordinatorTable {
    fn build(c: f64, g: f64, m: f64, y: f64) -> Result<SubordinatorTable> {
        let q = 0.5 * g * m;
        let b = 0.5 * (g + m);
        let s_min = 0.03125 / q;
        let s_max = 64.0 / q;
        // Y = 0 degenerates to the gamma subordinator: the kernel tends
        // to 1 pointwise
        let kernel = |s: f64| -> Result<f64> {
            if y == 0.0 {
                Ok(1.0)
            } else {
                h_y_kernel(b * s.sqrt(), y)
            }
        };

        // log-spaced nodes with a trapezoid cumulative in ln s
        let ratio = (s_max / s_min).ln() / (TABLE_NODES - 1) as f64;
        let mut log_s = Vec::with_capacity(TABLE_NODES);
        let mut k_times_s = Vec::with_capacity(TABLE_NODES);
        for j in 0..TABLE_NODES {
            let ls = s_min.ln() + ratio * j as f64;
            let s = ls.exp();
            log_s.push(ls);
            // s k(s) = C s^{-Y/2} e^{-q s} kernel(s)
            k_times_s.push(c * s.powf(-0.5 * y) * (-q * s).exp() * kernel(s)?);
        }
        // intensity over a cell: int k(s) ds = int s k(s) d(ln s)
        let mut cum = Vec::with_capacity(TABLE_NODES);
        cum.push(0.0);
        for j in 1..TABLE_NODES {
            let inc = 0.5 * (k_times_s[j - 1] + k_times_s[j]) * ratio;
            cum.push(cum[j - 1] + inc);
        }
        let total_rate = *cum.last().unwrap();
        if !(total_rate.is_finite() && total_rate > 0.0) {
            return Err(LevyError::Domain(
                "tempered-stable jump table failed to normalize".to_string(),
            ));
        }

        // E[sum of jumps below s_min] per unit time:
        // b_small = int_0^{s_min} s k(s) ds; the substitution
        // s = s_min tau^{2/(2-Y)} removes the power singularity, leaving
        // b_small = C s_min^{1-Y/2} (2/(2-Y)) int_0^1 e^{-q s} kernel d tau
        let rule = gl_rule(256);
        let expo = 2.0 / (2.0 - y);
        let mut integral = 0.0;
        for (node, w) in rule.nodes.iter().zip(&rule.weights) {
            let tau = 0.5 * (node + 1.0);
            let s = s_min * tau.powf(expo);
            integral += w * (-q * s).exp() * kernel(s)?;
        }
        integral *= 0.5;
        let small_mean_rate = c * s_min.powf(1.0 - 0.5 * y) * expo * integral;

        Ok(SubordinatorTable {
            log_s,
            cum,
            total_rate,
            small_mean_rate,
        })
    }

    fn inv_cdf(&self, v: f64) -> f64 {
        let target = v * self.total_rate;
        // cum is strictly increasing; find the segment containing target
        let idx = match self
            .cum
            .binary_search_by(|probe| probe.partial_cmp(&target).unwrap())
        {
            Ok(i) => i.max(1),
            Err(i) => i.clamp(1, TABLE_NODES - 1),
        };
        let lo = self.cum[idx - 1];
        let hi = self.cum[idx];
        let frac = if hi > lo { (target - lo) / (hi - lo) } else { 0.5 };
        let ls = self.log_s[idx - 1] + frac * (self.log_s[idx] - self.log_s[idx - 1]);
        ls.exp()
    }

    fn draw_time(&self, h: f64, stream: &mut RngStream) -> Result<f64> {
        let mut tau = self.small_mean_rate * h;
        let n = stream.poisson_count(self.total_rate * h)?;
        for _ in 0..n {
            tau += self.inv_cdf(stream.uniform());
        }
        Ok(tau)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    // Finite-difference moments from the characteristic exponent give an
    // independent reference for every sampler's mean and variance.
    fn fd_moments(spec: &ModelSpec, t: f64) -> (f64, f64) {
        let eps = 1e-5;
        let plus = spec.char_exponent(Complex64::new(eps, 0.0)).unwrap();
        let minus = spec.char_exponent(Complex64::new(-eps, 0.0)).unwrap();
        let mean = -t * (plus - minus).im / (2.0 * eps);
        let var = t * (plus + minus).re / (eps * eps);
        (mean, var)
    }

    fn sample_stats(sampler: &IncrementSampler, n: usize, seed: u64) -> (f64, f64, f64) {
        let mut stream = RngStream::new(seed, 7);
        let xs: Vec<f64> = (0..n).map(|_| sampler.draw(&mut stream).unwrap()).collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64;
        let m4 = xs.iter().map(|x| (x - mean).powi(4)).sum::<f64>() / n as f64;
        (mean, var, m4)
    }

    fn assert_moments_match(spec: &ModelSpec, h: f64, n: usize, seed: u64) {
        let (want_mean, want_var) = fd_moments(spec, h);
        let sampler = spec.increment_sampler(h).unwrap();
        let (mean, var, m4) = sample_stats(&sampler, n, seed);
        let se_mean = (want_var / n as f64).sqrt();
        let se_var = ((m4 - var * var).max(0.0) / n as f64).sqrt();
        assert!(
            (mean - want_mean).abs() < 4.5 * se_mean,
            "{} h={h}: mean {mean} vs {want_mean} (se {se_mean})",
            spec.name()
        );
        assert!(
            (var - want_var).abs() < 4.5 * se_var + 1e-12,
            "{} h={h}: var {var} vs {want_var} (se {se_var})",
            spec.name()
        );
    }

    #[test]
    fn finite_activity_samplers_match_fd_moments() {
        let specs = [
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
        ];
        for (i, spec) in specs.iter().enumerate() {
            assert_moments_match(spec, 1.0, 60_000, 11 + i as u64);
            assert_moments_match(spec, 0.25, 60_000, 31 + i as u64);
        }
    }

    #[test]
    fn subordinated_samplers_match_fd_moments() {
        let specs = [
            ModelSpec::VarianceGamma { sigma: 0.75, nu: 0.5, theta: 0.1 },
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
            ModelSpec::Meixner { alpha: 0.5, beta: 0.8, delta: 4.0 },
        ];
        for (i, spec) in specs.iter().enumerate() {
            assert_moments_match(spec, 1.0, 60_000, 101 + i as u64);
        }
        // subgrid steps for the exactly divisible families
        assert_moments_match(&specs[0], 0.1, 60_000, 201);
        assert_moments_match(&specs[1], 0.1, 60_000, 202);
        assert_moments_match(&specs[3], 0.1, 60_000, 203);
    }

    #[test]
    fn tempered_stable_sampler_matches_fd_moments() {
        let spec = ModelSpec::Cgmy { c: 5.0, g: 25.0, m: 25.0, y: 1.0 };
        assert_moments_match(&spec, 1.0, 40_000, 301);
        let asym = ModelSpec::Cgmy { c: 2.0, g: 7.0, m: 12.0, y: 0.8 };
        assert_moments_match(&asym, 1.0, 40_000, 302);
    }

    #[test]
    fn vg_routes_share_mean_and_variance() {
        let main = ModelSpec::VarianceGamma { sigma: 0.75, nu: 0.5, theta: 0.1 }
            .increment_sampler(1.0)
            .unwrap();
        let alt = IncrementSampler::vg_gamma_difference(0.75, 0.5, 0.1, 1.0).unwrap();
        let (m1, v1, _) = sample_stats(&main, 60_000, 7);
        let (m2, v2, _) = sample_stats(&alt, 60_000, 8);
        // theoretical: mean = theta h, var = (sigma^2 + theta^2 nu) h
        for (m, v) in [(m1, v1), (m2, v2)] {
            assert!((m - 0.1).abs() < 0.02, "mean {m}");
            assert!((v - 0.5675).abs() < 0.03, "var {v}");
        }
    }

    #[test]
    fn compound_poisson_zero_inflation() {
        let spec = ModelSpec::CompoundPoisson {
            lambda: 2.0,
            jumps: JumpLaw::Normal { mean: 0.3, std_dev: 0.5 },
        };
        let sampler = spec.increment_sampler(0.5).unwrap();
        let mut stream = RngStream::new(5, 0);
        let n = 40_000;
        let zeros = (0..n)
            .filter(|_| sampler.draw(&mut stream).unwrap() == 0.0)
            .count();
        let want = (-1.0f64).exp(); // P(no jumps in half a unit at rate 2)
        let got = zeros as f64 / n as f64;
        assert!(
            (got - want).abs() < 4.0 * (want * (1.0 - want) / n as f64).sqrt(),
            "zero fraction {got} vs {want}"
        );
    }

    #[test]
    fn custom_jump_law_sampler_is_used() {
        let law = Arc::new(crate::models::CustomJumpLaw {
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
        assert_moments_match(&spec, 1.0, 60_000, 404);
        // all jumps positive: increments are nonnegative
        let sampler = spec.increment_sampler(1.0).unwrap();
        let mut stream = RngStream::new(404, 0);
        for _ in 0..1000 {
            assert!(sampler.draw(&mut stream).unwrap() >= 0.0);
        }
    }

    #[test]
    fn draws_are_reproducible_across_identical_streams() {
        let specs = [
            ModelSpec::Kou {
                mu: 0.5,
                sigma: 0.75,
                lambda: 1.5,
                p: 0.5,
                theta1: 0.25,
                theta2: 0.5,
            },
            ModelSpec::Cgmy { c: 5.0, g: 25.0, m: 25.0, y: 1.0 },
            ModelSpec::Meixner { alpha: 0.5, beta: 0.8, delta: 4.0 },
        ];
        for spec in &specs {
            let sampler = spec.increment_sampler(0.5).unwrap();
            let mut a = RngStream::new(42, 3);
            let mut b = RngStream::new(42, 3);
            for _ in 0..200 {
                let xa = sampler.draw(&mut a).unwrap();
                let xb = sampler.draw(&mut b).unwrap();
                assert_eq!(xa.to_bits(), xb.to_bits());
            }
        }
    }

    #[test]
    fn sampler_rejects_bad_steps() {
        let spec = ModelSpec::BrownianMotion { mu: 0.0, sigma: 1.0 };
        assert!(spec.increment_sampler(0.0).is_err());
        assert!(spec.increment_sampler(-1.0).is_err());
        assert!(spec.increment_sampler(f64::NAN).is_err());
    }
}
