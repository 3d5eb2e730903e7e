//! Lévy alpha-stable laws in the classical "1" parameterization.
//!
//! A law `S(alpha, beta, sigma, mu)` has characteristic function
//!
//! ```text
//! alpha != 1:  exp{ i θ mu - |sigma θ|^alpha (1 - i beta sign(θ) tan(pi alpha / 2)) }
//! alpha == 1:  exp{ i θ mu - |sigma θ| (1 + i beta (2/pi) sign(θ) ln|θ|) }
//! ```
//!
//! This convention is discontinuous at `alpha = 1`; the location shifts that
//! appear in [`StableParams::affine`] and in the `alpha == 1` branches of the
//! wealth bounds assume it, so no continuous reparameterization is used
//! internally.

mod dist;
mod quantile;
mod sample;

use std::f64::consts::{FRAC_2_PI, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::AdaptiveConfig;

/// Above this shape the Gaussian closed form is used for the distribution function.
pub const GAUSSIAN_ALPHA_THRESHOLD: f64 = 2.0 - 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StableParams {
    alpha: f64,
    beta: f64,
    sigma: f64,
    mu: f64,
}

/// Ratio `mu / sigma` of a stable law.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct SharpeRatio(pub f64);

/// Tolerances of the numerical distribution routines.
#[derive(Debug, Clone, Copy)]
pub struct NumericConfig {
    /// Absolute tolerance of the distribution-function quadrature.
    pub quad_tol: f64,
    /// Target accuracy of quantiles in probability.
    pub quantile_tol: f64,
    /// Final bisection bracket width (relative to `max(1, |x|)`) for quantiles.
    pub bracket_width: f64,
    pub max_segments: usize,
}

impl Default for NumericConfig {
    fn default() -> Self {
        Self {
            quad_tol: 1e-10,
            quantile_tol: 1e-8,
            bracket_width: 1e-10,
            max_segments: 2000,
        }
    }
}

impl NumericConfig {
    pub(crate) fn adaptive(&self) -> AdaptiveConfig {
        AdaptiveConfig {
            abs_tol: self.quad_tol,
            max_segments: self.max_segments,
        }
    }
}

impl StableParams {
    pub fn new(alpha: f64, beta: f64, sigma: f64, mu: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 2.0) {
            return Err(Error::invalid(format!("alpha must lie in (0, 2], got {alpha}")));
        }
        if !(-1.0..=1.0).contains(&beta) {
            return Err(Error::invalid(format!("beta must lie in [-1, 1], got {beta}")));
        }
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::invalid(format!("sigma must be positive and finite, got {sigma}")));
        }
        if !mu.is_finite() {
            return Err(Error::invalid(format!("mu must be finite, got {mu}")));
        }
        Ok(Self { alpha, beta, sigma, mu })
    }

    /// The standardized law `S(alpha, beta, 1, 0)`.
    pub fn standard(alpha: f64, beta: f64) -> Result<Self> {
        Self::new(alpha, beta, 1.0, 0.0)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn is_cauchy_branch(&self) -> bool {
        self.alpha == 1.0
    }

    pub fn sharpe_ratio(&self) -> SharpeRatio {
        SharpeRatio(self.mu / self.sigma)
    }

    /// Same law with location `mu` replaced.
    pub fn with_mu(&self, mu: f64) -> Result<Self> {
        Self::new(self.alpha, self.beta, self.sigma, mu)
    }

    /// Same law with scale `sigma` replaced.
    pub fn with_sigma(&self, sigma: f64) -> Result<Self> {
        Self::new(self.alpha, self.beta, sigma, self.mu)
    }

    /// The law of `-A` for `A` with these parameters.
    pub fn negated(&self) -> Self {
        Self {
            beta: -self.beta,
            mu: -self.mu,
            ..*self
        }
    }

    /// The law of the log-increment over a time step of length `dt`.
    pub fn increment(&self, dt: f64) -> Result<Self> {
        if !(dt > 0.0) {
            return Err(Error::invalid(format!("time increment must be positive, got {dt}")));
        }
        Self::new(self.alpha, self.beta, self.sigma * dt.powf(1.0 / self.alpha), self.mu * dt)
    }

    pub fn char_fn(&self, theta: f64) -> Complex64 {
        if theta == 0.0 {
            return Complex64::new(1.0, 0.0);
        }
        let modulus = (self.sigma * theta).abs().powf(self.alpha);
        let sign = theta.signum();
        let skew = if self.is_cauchy_branch() {
            -self.beta * FRAC_2_PI * sign * theta.abs().ln()
        } else {
            self.beta * sign * (PI * self.alpha / 2.0).tan()
        };
        // exponent = i θ mu - modulus (1 - i skew)
        let exponent = Complex64::new(-modulus, theta * self.mu + modulus * skew);
        exponent.exp()
    }

    /// Law of `a * A + b`.
    pub fn affine(&self, a: f64, b: f64) -> Result<Self> {
        if a == 0.0 || !a.is_finite() {
            return Err(Error::invalid("affine map requires a finite nonzero multiplier"));
        }
        let mut mu = a * self.mu + b;
        if self.is_cauchy_branch() {
            mu -= FRAC_2_PI * self.beta * a * self.sigma * a.abs().ln();
        }
        Self::new(self.alpha, a.signum() * self.beta, a.abs() * self.sigma, mu)
    }

    /// Law of the sum of independent variables with laws `self` and `other`.
    pub fn convolve(&self, other: &Self) -> Result<Self> {
        if self.alpha != other.alpha {
            return Err(Error::invalid(format!(
                "convolution needs equal shapes, got {} and {}",
                self.alpha, other.alpha
            )));
        }
        if self.beta != other.beta {
            return Err(Error::invalid(format!(
                "convolution needs equal skewness, got {} and {}",
                self.beta, other.beta
            )));
        }
        let a = self.alpha;
        let sigma = (self.sigma.powf(a) + other.sigma.powf(a)).powf(1.0 / a);
        Self::new(a, self.beta, sigma, self.mu + other.mu)
    }

    /// Map a point of this law to the standardized variable `S(alpha, beta, 1, 0)`.
    fn standardize(&self, x: f64) -> f64 {
        (x - self.shift()) / self.sigma
    }

    fn destandardize(&self, z: f64) -> f64 {
        self.sigma * z + self.shift()
    }

    // X = sigma Z + shift, with the alpha == 1 scaling correction.
    fn shift(&self) -> f64 {
        if self.is_cauchy_branch() {
            self.mu + FRAC_2_PI * self.beta * self.sigma * self.sigma.ln()
        } else {
            self.mu
        }
    }

    /// Lower end of the support, when it is bounded below.
    ///
    /// Only totally right-skewed laws with `alpha < 1` are bounded below; in
    /// this parameterization the bound is the location `mu`.
    pub fn support_lower_bound(&self) -> Option<f64> {
        (self.alpha < 1.0 && self.beta == 1.0).then_some(self.mu)
    }

    pub fn support_upper_bound(&self) -> Option<f64> {
        (self.alpha < 1.0 && self.beta == -1.0).then_some(self.mu)
    }

    pub fn cdf(&self, x: f64) -> Result<f64> {
        self.cdf_with(x, &NumericConfig::default())
    }

    pub fn cdf_with(&self, x: f64, cfg: &NumericConfig) -> Result<f64> {
        if x.is_nan() {
            return Err(Error::invalid("cdf evaluated at NaN"));
        }
        dist::standard_cdf(self.alpha, self.beta, self.standardize(x), cfg)
    }

    pub fn pdf(&self, x: f64) -> Result<f64> {
        self.pdf_with(x, &NumericConfig::default())
    }

    pub fn pdf_with(&self, x: f64, cfg: &NumericConfig) -> Result<f64> {
        if x.is_nan() {
            return Err(Error::invalid("pdf evaluated at NaN"));
        }
        Ok(dist::standard_pdf(self.alpha, self.beta, self.standardize(x), cfg)? / self.sigma)
    }

    pub fn quantile(&self, q: f64) -> Result<f64> {
        self.quantile_with(q, &NumericConfig::default())
    }

    pub fn quantile_with(&self, q: f64, cfg: &NumericConfig) -> Result<f64> {
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::invalid(format!("quantile level must lie in (0, 1), got {q}")));
        }
        let z = quantile::standard_quantile(self.alpha, self.beta, q, cfg)?;
        Ok(self.destandardize(z))
    }

    /// Draw one variate.
    pub fn sample<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.destandardize(sample::standard_variate(self.alpha, self.beta, rng))
    }
}

impl std::fmt::Display for StableParams {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "S({}, {}, {}, {})", self.alpha, self.beta, self.sigma, self.mu)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn sp(a: f64, b: f64, s: f64, m: f64) -> StableParams {
        StableParams::new(a, b, s, m).unwrap()
    }

    #[test]
    fn rejects_invalid_parameters() {
        assert!(StableParams::new(0.0, 0.0, 1.0, 0.0).is_err());
        assert!(StableParams::new(2.1, 0.0, 1.0, 0.0).is_err());
        assert!(StableParams::new(1.5, 1.1, 1.0, 0.0).is_err());
        assert!(StableParams::new(1.5, 0.0, 0.0, 0.0).is_err());
        assert!(StableParams::new(1.5, 0.0, 1.0, f64::NAN).is_err());
    }

    #[test]
    fn char_fn_at_zero_is_one() {
        let v = sp(2.0, 0.0, 1.0, 0.0).char_fn(0.0);
        assert_eq!(v, Complex64::new(1.0, 0.0));
    }

    #[test]
    fn char_fn_gaussian_branch() {
        let v = sp(2.0, 0.0, 1.0, 1.0).char_fn(1.0);
        let expected = Complex64::new(-1.0, 1.0).exp();
        assert_relative_eq!(v.re, expected.re, epsilon = 1e-15);
        assert_relative_eq!(v.im, expected.im, epsilon = 1e-15);
        assert_relative_eq!(v.norm(), (-1f64).exp(), epsilon = 1e-15);
    }

    #[test]
    fn char_fn_matches_high_precision_reference() {
        // Reference values from a 50-digit evaluation of the defining formula.
        let v = sp(1.5, 0.5, 0.8, 0.1).char_fn(2.3);
        assert_relative_eq!(v.re, CF_REF_RE, epsilon = 1e-14);
        assert_relative_eq!(v.im, CF_REF_IM, epsilon = 1e-14);
        let v = sp(1.0, -0.7, 1.3, 0.4).char_fn(-0.9);
        assert_relative_eq!(v.re, CF1_REF_RE, epsilon = 1e-14);
        assert_relative_eq!(v.im, CF1_REF_IM, epsilon = 1e-14);
    }

    const CF_REF_RE: f64 = 0.043_281_080_248_917_52;
    const CF_REF_IM: f64 = -0.070_144_196_295_885_57;
    const CF1_REF_RE: f64 = 0.296_036_417_313_100_9;
    const CF1_REF_IM: f64 = -0.093_220_587_076_657_01;

    #[test]
    fn affine_examples() {
        let p = sp(1.89, 1.0, 0.110, 0.0658);
        assert_eq!(p.affine(1.0, 0.0).unwrap(), p);
        assert_eq!(p.affine(-1.0, 0.0).unwrap(), sp(1.89, -1.0, 0.110, -0.0658));
        let c = sp(1.0, 0.5, 2.0, 3.0).affine(2.0, 1.0).unwrap();
        let expected_mu = 2.0 * 3.0 + 1.0 - FRAC_2_PI * 0.5 * 2.0 * 2.0 * 2f64.ln();
        assert_relative_eq!(c.mu(), expected_mu, epsilon = 1e-15);
        assert_eq!((c.alpha(), c.beta(), c.sigma()), (1.0, 0.5, 4.0));
        assert!(p.affine(0.0, 1.0).is_err());
    }

    #[test]
    fn affine_matches_char_fn() {
        // phi_{aA+b}(t) = e^{itb} phi_A(a t)
        for &(alpha, a) in &[(1.0, -2.5), (1.0, 0.3), (1.7, -0.4), (0.6, 3.0)] {
            let p = sp(alpha, 0.6, 0.9, -0.2);
            let q = p.affine(a, 0.7).unwrap();
            for &t in &[-2.0, -0.3, 0.5, 1.7] {
                let lhs = q.char_fn(t);
                let rhs = Complex64::new(0.0, 0.7 * t).exp() * p.char_fn(a * t);
                assert!((lhs - rhs).norm() < 1e-12, "alpha {alpha} a {a} t {t}");
            }
        }
    }

    #[test]
    fn convolve_examples() {
        let g = sp(2.0, 0.0, 1.0, 0.0);
        let c = g.convolve(&g).unwrap();
        assert_relative_eq!(c.sigma(), 2f64.sqrt(), epsilon = 1e-15);
        let c = sp(1.5, 1.0, 2.0, 3.0).convolve(&sp(1.5, 1.0, 1.0, -1.0)).unwrap();
        assert_relative_eq!(c.sigma(), (2f64.powf(1.5) + 1.0).powf(2.0 / 3.0), epsilon = 1e-14);
        assert_eq!(c.mu(), 2.0);
        assert!(g.convolve(&sp(1.9, 0.0, 1.0, 0.0)).is_err());
        assert!(g.convolve(&sp(2.0, 0.5, 1.0, 0.0)).is_err());
    }

    #[test]
    fn support_bound_for_positive_stable() {
        let p = sp(0.5, 1.0, 1.0, 0.3);
        assert_eq!(p.support_lower_bound(), Some(0.3));
        assert_eq!(p.cdf(0.29).unwrap(), 0.0);
        assert!(p.cdf(0.5).unwrap() > 0.0);
        assert_eq!(sp(1.5, 1.0, 1.0, 0.0).support_lower_bound(), None);
    }

    fn params() -> impl Strategy<Value = StableParams> {
        (0.3f64..=2.0, -1.0f64..=1.0, 0.01f64..5.0, -5.0f64..5.0)
            .prop_map(|(a, b, s, m)| StableParams::new(a, b, s, m).unwrap())
    }

    proptest! {
        #[test]
        fn char_fn_modulus(p in params(), theta in -20.0f64..20.0) {
            let expected = (-(p.sigma() * theta).abs().powf(p.alpha())).exp();
            prop_assert!((p.char_fn(theta).norm() - expected).abs() < 1e-12);
        }

        #[test]
        fn affine_round_trip(p in params(), a in prop_oneof![-4.0f64..-0.1, 0.1f64..4.0], b in -3.0f64..3.0) {
            let back = p.affine(a, b).unwrap().affine(1.0 / a, -b / a).unwrap();
            prop_assert!((back.mu() - p.mu()).abs() < 1e-10 * (1.0 + p.mu().abs()));
            prop_assert!((back.sigma() - p.sigma()).abs() < 1e-12 * p.sigma());
            prop_assert_eq!(back.beta(), p.beta());
        }

        #[test]
        fn convolve_commutes_and_associates(a in 0.3f64..=2.0, b in -1.0f64..=1.0,
                s in proptest::array::uniform3(0.01f64..3.0), m in proptest::array::uniform3(-2.0f64..2.0)) {
            let p: Vec<_> = (0..3).map(|i| StableParams::new(a, b, s[i], m[i]).unwrap()).collect();
            let ab = p[0].convolve(&p[1]).unwrap();
            let ba = p[1].convolve(&p[0]).unwrap();
            prop_assert_eq!(ab, ba);
            let left = ab.convolve(&p[2]).unwrap();
            let right = p[0].convolve(&p[1].convolve(&p[2]).unwrap()).unwrap();
            prop_assert!((left.sigma() - right.sigma()).abs() < 1e-12 * left.sigma());
            prop_assert!((left.mu() - right.mu()).abs() < 1e-12);
        }
    }
}
