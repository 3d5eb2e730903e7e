//! Quantiles of the standardized law by bracketing and bisection.

use std::f64::consts::PI;

use statrs::function::gamma::gamma;

use super::{dist::standard_cdf, NumericConfig, GAUSSIAN_ALPHA_THRESHOLD};
use crate::error::{Error, Result};

const MAX_EXPANSIONS: usize = 200;
const MAX_BISECTIONS: usize = 400;

pub(super) fn standard_quantile(alpha: f64, beta: f64, q: f64, cfg: &NumericConfig) -> Result<f64> {
    let symmetric = beta == 0.0 || alpha >= GAUSSIAN_ALPHA_THRESHOLD;
    if symmetric && q == 0.5 {
        return Ok(0.0);
    }
    let cdf = |z: f64| standard_cdf(alpha, beta, z, cfg);

    let (guess_lo, guess_hi) = tail_guess(alpha, beta, q);
    let (mut lo, mut hi) = (guess_lo.min(-1.0), guess_hi.max(1.0));
    let mut f_lo = cdf(lo)?;
    let mut expansions = 0;
    while f_lo > q {
        hi = lo;
        lo = 2.0 * lo - 1.0;
        f_lo = cdf(lo)?;
        expansions += 1;
        if expansions > MAX_EXPANSIONS {
            return Err(Error::no_convergence("quantile", format!("no lower bracket for q = {q}")));
        }
    }
    let mut f_hi = cdf(hi)?;
    while f_hi < q {
        lo = hi;
        f_lo = f_hi;
        hi = 2.0 * hi + 1.0;
        f_hi = cdf(hi)?;
        expansions += 1;
        if expansions > MAX_EXPANSIONS {
            return Err(Error::no_convergence("quantile", format!("no upper bracket for q = {q}")));
        }
    }

    let mut iterations = 0;
    while hi - lo > cfg.bracket_width * lo.abs().max(hi.abs()).max(1.0) {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = cdf(mid)?;
        if f_mid < q {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
            f_hi = f_mid;
        }
        iterations += 1;
        if iterations > MAX_BISECTIONS {
            return Err(Error::no_convergence("quantile", "bisection did not shrink the bracket"));
        }
    }

    // Secant step inside the final bracket.
    if f_hi > f_lo {
        let t = ((q - f_lo) / (f_hi - f_lo)).clamp(0.0, 1.0);
        Ok(lo + t * (hi - lo))
    } else {
        Ok(0.5 * (lo + hi))
    }
}

/// Initial bracket from the power-law tails `P(Z > z) ~ C (1 + beta) z^-alpha`.
fn tail_guess(alpha: f64, beta: f64, q: f64) -> (f64, f64) {
    if alpha >= GAUSSIAN_ALPHA_THRESHOLD {
        return (-1.0, 1.0);
    }
    let c_alpha = gamma(alpha) * (PI * alpha / 2.0).sin() / PI;
    let tail = |weight: f64, p: f64| -> f64 {
        if weight <= 0.0 {
            1.0
        } else {
            (c_alpha * weight / p).powf(1.0 / alpha).min(1e12)
        }
    };
    (-tail(1.0 - beta, q), tail(1.0 + beta, 1.0 - q))
}
