//! Distribution and density functions of the standardized law `S(alpha, beta, 1, 0)`.
//!
//! For `alpha != 1` and `z > 0` the distribution function is a single
//! non-oscillatory integral over `(-theta0, pi/2)` of `exp(-g(theta))`, where
//! `g = z^(alpha/(alpha-1)) V(theta)` is monotone in `theta`; negative
//! arguments use the reflection `F(z; alpha, beta) = 1 - F(-z; alpha, -beta)`.
//! `alpha == 1` uses the analogous representation with `g = exp(-pi z / (2 beta)) V(theta)`.
//! `g` is evaluated in log space so shapes close to 1 do not overflow.

use std::f64::consts::{FRAC_2_PI, FRAC_PI_2, PI};

use statrs::function::erf::erfc;
use statrs::function::gamma::gamma;

use super::{NumericConfig, GAUSSIAN_ALPHA_THRESHOLD};
use crate::error::Result;
use crate::quadrature::adaptive_gk15;

pub(super) fn standard_cdf(alpha: f64, beta: f64, z: f64, cfg: &NumericConfig) -> Result<f64> {
    if z == f64::INFINITY {
        return Ok(1.0);
    }
    if z == f64::NEG_INFINITY {
        return Ok(0.0);
    }
    if alpha >= GAUSSIAN_ALPHA_THRESHOLD {
        // S(2, ., 1, 0) is N(0, 2).
        return Ok(0.5 * erfc(-z / 2.0));
    }
    let value = if alpha == 1.0 {
        if beta == 0.0 {
            0.5 + z.atan() / PI
        } else if beta > 0.0 {
            cdf_unit_shape(beta, z, cfg)?
        } else {
            1.0 - cdf_unit_shape(-beta, -z, cfg)?
        }
    } else if z > 0.0 {
        cdf_positive(alpha, beta, z, cfg)?
    } else if z == 0.0 {
        (FRAC_PI_2 - theta0(alpha, beta)) / PI
    } else {
        1.0 - cdf_positive(alpha, -beta, -z, cfg)?
    };
    Ok(value.clamp(0.0, 1.0))
}

pub(super) fn standard_pdf(alpha: f64, beta: f64, z: f64, cfg: &NumericConfig) -> Result<f64> {
    if z.is_infinite() {
        return Ok(0.0);
    }
    if alpha >= GAUSSIAN_ALPHA_THRESHOLD {
        return Ok((-z * z / 4.0).exp() / (2.0 * PI.sqrt()));
    }
    if alpha == 1.0 {
        return if beta == 0.0 {
            Ok(1.0 / (PI * (1.0 + z * z)))
        } else if beta > 0.0 {
            pdf_unit_shape(beta, z, cfg)
        } else {
            pdf_unit_shape(-beta, -z, cfg)
        };
    }
    if z == 0.0 {
        let t0 = theta0(alpha, beta);
        return Ok(gamma(1.0 + 1.0 / alpha) * t0.cos() * (alpha * t0).cos().powf(1.0 / alpha) / PI);
    }
    if z > 0.0 {
        pdf_positive(alpha, beta, z, cfg)
    } else {
        pdf_positive(alpha, -beta, -z, cfg)
    }
}

fn theta0(alpha: f64, beta: f64) -> f64 {
    (beta * (PI * alpha / 2.0).tan()).atan() / alpha
}

/// `ln g(theta)` for `alpha != 1`, `z > 0`, together with its domain.
struct ShapeKernel {
    alpha: f64,
    theta0: f64,
    ln_cos_a_theta0: f64,
    ln_z_scaled: f64,
}

impl ShapeKernel {
    fn new(alpha: f64, beta: f64, z: f64) -> Self {
        let t0 = theta0(alpha, beta);
        Self {
            alpha,
            theta0: t0,
            ln_cos_a_theta0: (alpha * t0).cos().ln(),
            ln_z_scaled: alpha / (alpha - 1.0) * z.ln(),
        }
    }

    fn domain(&self) -> (f64, f64) {
        (-self.theta0, FRAC_PI_2)
    }

    fn ln_g(&self, theta: f64) -> f64 {
        let a = self.alpha;
        let am1 = a - 1.0;
        let cos_t = theta.cos();
        let ln_v = self.ln_cos_a_theta0 / am1
            + a / am1 * (cos_t.ln() - (a * (self.theta0 + theta)).sin().ln())
            + (a * self.theta0 + am1 * theta).cos().ln()
            - cos_t.ln();
        self.ln_z_scaled + ln_v
    }
}

/// `ln g(theta)` for `alpha == 1`, `beta > 0`.
fn unit_shape_ln_g(beta: f64, z: f64, theta: f64) -> f64 {
    let lead = FRAC_PI_2 + beta * theta;
    -PI * z / (2.0 * beta) + FRAC_2_PI.ln() + lead.ln() - theta.cos().ln() + lead * theta.tan() / beta
}

/// Levels of `ln g` used as quadrature breakpoints. Where `g` is small the
/// integrands deviate from their limit by about `g`, which decays only
/// polynomially near an endpoint, so the small-`g` side is sampled densely.
const LN_G_LEVELS: [f64; 12] = [-36.0, -30.0, -24.0, -18.0, -14.0, -10.0, -6.0, -3.0, -1.0, 0.0, 1.5, 3.5];

/// Points where `ln g` crosses [`LN_G_LEVELS`]; `ln g` is monotone on `(lo, hi)`.
fn transition_points<F: Fn(f64) -> f64>(ln_g: &F, lo: f64, hi: f64) -> Vec<f64> {
    let width = hi - lo;
    let a = lo + 1e-12 * width;
    let b = hi - 1e-12 * width;
    let (ga, gb) = (ln_g(a), ln_g(b));
    let increasing = match (ga.is_nan(), gb.is_nan()) {
        (false, false) => gb > ga,
        _ => return Vec::new(),
    };
    let mut points = Vec::new();
    for level in LN_G_LEVELS {
        let inside = if increasing {
            ga < level && level < gb
        } else {
            gb < level && level < ga
        };
        if !inside {
            continue;
        }
        let (mut l, mut r) = (a, b);
        for _ in 0..80 {
            let m = 0.5 * (l + r);
            let above = ln_g(m) > level;
            if above == increasing {
                r = m;
            } else {
                l = m;
            }
            if r - l <= 1e-15 * width {
                break;
            }
        }
        points.push(0.5 * (l + r));
    }
    points.sort_by(f64::total_cmp);
    points.dedup();
    points
}

fn cdf_positive(alpha: f64, beta: f64, z: f64, cfg: &NumericConfig) -> Result<f64> {
    let kernel = ShapeKernel::new(alpha, beta, z);
    let (lo, hi) = kernel.domain();
    let integral = if lo < hi {
        let ln_g = |t: f64| kernel.ln_g(t);
        let points = transition_points(&ln_g, lo, hi);
        // quad_tol is in probability units; the integral carries a 1/pi factor.
        let mut acfg = cfg.adaptive();
        acfg.abs_tol *= PI;
        adaptive_gk15(|t| (-ln_g(t).exp()).exp(), lo, hi, &points, &acfg)?.value
    } else {
        0.0
    };
    Ok(if alpha > 1.0 {
        1.0 - integral / PI
    } else {
        (FRAC_PI_2 - kernel.theta0) / PI + integral / PI
    })
}

fn pdf_positive(alpha: f64, beta: f64, z: f64, cfg: &NumericConfig) -> Result<f64> {
    let kernel = ShapeKernel::new(alpha, beta, z);
    let (lo, hi) = kernel.domain();
    if lo >= hi {
        return Ok(0.0);
    }
    let ln_g = |t: f64| kernel.ln_g(t);
    let points = transition_points(&ln_g, lo, hi);
    let integral = adaptive_gk15(|t| peak_integrand(ln_g(t)), lo, hi, &points, &cfg.adaptive())?.value;
    Ok(alpha * integral / (PI * (alpha - 1.0).abs() * z))
}

fn cdf_unit_shape(beta: f64, z: f64, cfg: &NumericConfig) -> Result<f64> {
    let ln_g = |t: f64| unit_shape_ln_g(beta, z, t);
    let points = transition_points(&ln_g, -FRAC_PI_2, FRAC_PI_2);
    let mut acfg = cfg.adaptive();
    acfg.abs_tol *= PI;
    let integral = adaptive_gk15(|t| (-ln_g(t).exp()).exp(), -FRAC_PI_2, FRAC_PI_2, &points, &acfg)?.value;
    Ok(integral / PI)
}

fn pdf_unit_shape(beta: f64, z: f64, cfg: &NumericConfig) -> Result<f64> {
    let ln_g = |t: f64| unit_shape_ln_g(beta, z, t);
    let points = transition_points(&ln_g, -FRAC_PI_2, FRAC_PI_2);
    let integral =
        adaptive_gk15(|t| peak_integrand(ln_g(t)), -FRAC_PI_2, FRAC_PI_2, &points, &cfg.adaptive())?.value;
    Ok(integral / (2.0 * beta))
}

// g exp(-g) from ln g, zero at both ends of the range.
fn peak_integrand(ln_g: f64) -> f64 {
    if ln_g.is_nan() || ln_g == f64::INFINITY {
        0.0
    } else {
        (ln_g - ln_g.exp()).exp()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> NumericConfig {
        NumericConfig::default()
    }

    #[test]
    fn gaussian_and_cauchy_closed_forms() {
        assert_eq!(standard_cdf(2.0, 0.3, 0.0, &cfg()).unwrap(), 0.5);
        assert!((standard_cdf(1.0, 0.0, 1.0, &cfg()).unwrap() - 0.75).abs() < 1e-15);
    }

    #[test]
    fn value_at_zero_is_continuous() {
        for &(a, b) in &[(1.5, 0.7), (0.7, -0.4), (1.89, 1.0)] {
            let at = standard_cdf(a, b, 0.0, &cfg()).unwrap();
            let right = standard_cdf(a, b, 1e-9, &cfg()).unwrap();
            let left = standard_cdf(a, b, -1e-9, &cfg()).unwrap();
            assert!((at - right).abs() < 1e-7 && (at - left).abs() < 1e-7, "{a} {b}: {left} {at} {right}");
        }
    }

    #[test]
    fn pdf_agrees_with_cdf_slope() {
        for &(a, b, z) in &[(1.5, 0.5, 0.7), (1.89, 1.0, -1.3), (0.8, 0.3, 2.0), (1.0, 0.6, -0.4), (1.3, -1.0, 0.0)] {
            let h = 1e-4;
            let slope = (standard_cdf(a, b, z + h, &cfg()).unwrap() - standard_cdf(a, b, z - h, &cfg()).unwrap()) / (2.0 * h);
            let dens = standard_pdf(a, b, z, &cfg()).unwrap();
            assert!((slope - dens).abs() < 1e-6, "({a}, {b}, {z}): slope {slope} pdf {dens}");
        }
    }

    #[test]
    fn tails_approach_limits() {
        for &(a, b) in &[(1.2, 0.0), (1.89, 1.0), (0.9, -0.5), (1.0, 0.8)] {
            assert!(standard_cdf(a, b, -1e6, &cfg()).unwrap() < 1e-3);
            assert!(standard_cdf(a, b, 1e6, &cfg()).unwrap() > 1.0 - 1e-3);
        }
    }
}
