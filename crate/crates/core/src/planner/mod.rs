//! Planning procedures built on the bounds: the lump-sum discount, the
//! Sharpe-ratio frontiers for discrete and continuous withdrawals, the
//! principal-versus-confidence curve, and polynomial surrogates of the
//! discrete frontier.

mod surrogate;

pub use surrogate::{fit_surrogate, k_basis, SurrogateFit, SKEWED_189_COEFFS, SYMMETRIC_95_LAMBDA};
pub(crate) use surrogate::least_squares;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numeric::expm1_over_x;
use crate::quadrature::RombergConfig;
use crate::stable::StableParams;
use crate::wealth::{profile_integral, require_closed_form};
use crate::withdrawal::{star_bound_closed_form, StandardQuantile};

/// A lump sum `x` held for time `s` whose terminal wealth is no better in
/// distribution than investing one unit continuously over unit time.
///
/// Scaling: `d` invested continuously over `t` corresponds to `x d` held for `s t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LumpSumDiscount {
    pub mu: f64,
    pub alpha: f64,
    pub x: f64,
    pub s: f64,
}

impl LumpSumDiscount {
    /// Lump sum and holding time for `amount` invested continuously over `duration`.
    pub fn scaled(&self, amount: f64, duration: f64) -> (f64, f64) {
        (self.x * amount, self.s * duration)
    }
}

/// Depends on the process only through `alpha` and `mu`.
pub fn lump_sum_discount(process: &StableParams) -> Result<LumpSumDiscount> {
    lump_sum_discount_with(process, &RombergConfig::default())
}

pub fn lump_sum_discount_with(process: &StableParams, cfg: &RombergConfig) -> Result<LumpSumDiscount> {
    require_closed_form(process)?;
    let (alpha, mu) = (process.alpha(), process.mu());
    let s = profile_integral(alpha, mu, cfg)?;
    let x = expm1_over_x(mu) * (-mu * s).exp();
    Ok(LumpSumDiscount { mu, alpha, x, s })
}

/// Descending search grid for the ratio `mu / sigma`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioGrid {
    pub start: f64,
    pub step: f64,
}

impl Default for RatioGrid {
    fn default() -> Self {
        Self { start: 20.0, step: 0.01 }
    }
}

impl RatioGrid {
    fn value(&self, j: usize) -> f64 {
        self.start - j as f64 * self.step
    }

    /// Step `j` down until `ok` holds. `ok` must become true as the ratio decreases.
    fn descend(&self, j: &mut usize, key: &'static str, value: f64, ok: impl Fn(f64) -> bool) -> Result<()> {
        while !ok(self.value(*j)) {
            *j += 1;
            if self.value(*j) <= 0.0 {
                return Err(Error::EmptyFrontier { key, value });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrontierKind {
    /// Keys are withdrawal counts `k`.
    Discrete,
    /// Keys are locations `mu`.
    Continuous,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrontierRow {
    pub key: f64,
    /// Largest surviving ratio `mu / sigma` on the grid.
    pub s: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrontierTable {
    pub kind: FrontierKind,
    pub confidence: f64,
    pub alpha: f64,
    pub beta: f64,
    pub rows: Vec<FrontierRow>,
}

impl FrontierTable {
    pub fn keys(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.key).collect()
    }

    pub fn values(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.s).collect()
    }

    /// Smallest admissible scale `mu / s_mu` for each row of a continuous table.
    pub fn min_sigma(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.key / r.s).collect()
    }
}

pub fn default_k_grid() -> Vec<usize> {
    (2..=60).collect()
}

/// `{0.001 n : n = 1..500}`.
pub fn default_discrete_mu_grid() -> Vec<f64> {
    (1..=500).map(|n| n as f64 / 1000.0).collect()
}

/// `{0.01 n : n = 1..500}`.
pub fn default_continuous_mu_grid() -> Vec<f64> {
    (1..=500).map(|n| n as f64 / 100.0).collect()
}

fn check_frontier_inputs(confidence: f64, alpha: f64, mus: &[f64]) -> Result<()> {
    if !(confidence > 0.0 && confidence < 1.0) {
        return Err(Error::invalid(format!("confidence must lie in (0, 1), got {confidence}")));
    }
    if alpha == 1.0 {
        return Err(Error::precondition("frontiers use closed forms that require alpha != 1"));
    }
    if mus.is_empty() {
        return Err(Error::invalid("mu grid is empty"));
    }
    if let Some(m) = mus.iter().find(|m| !(**m > 0.0 && m.is_finite())) {
        return Err(Error::invalid(format!("mu grid must be positive, got {m}")));
    }
    Ok(())
}

/// For each `k`, the largest grid ratio `s` such that every `mu` in the grid,
/// with `sigma = mu / s`, forces a necessary principal of at least `k` unit withdrawals.
pub fn discrete_frontier(
    confidence: f64,
    alpha: f64,
    beta: f64,
    ks: &[usize],
    mus: &[f64],
    grid: &RatioGrid,
) -> Result<FrontierTable> {
    check_frontier_inputs(confidence, alpha, mus)?;
    if ks.is_empty() || ks.iter().any(|&k| k < 1) {
        return Err(Error::invalid("k grid must be nonempty with k >= 1"));
    }
    let sq = StandardQuantile::new(alpha, beta, confidence)?;
    let q = sq.value();
    let rows = ks
        .par_iter()
        .map(|&k| {
            let target = (k as f64).ln();
            // The bound scale is linear in sigma: sigma_0 = sigma * g(mu, k).
            let unit: Vec<(f64, f64, f64)> = mus
                .iter()
                .map(|&mu| {
                    let sb = star_bound_closed_form(&StableParams::new(alpha, beta, 1.0, mu)?, k)?;
                    Ok((mu, sb.mu_0(), sb.sigma_0()))
                })
                .collect::<Result<_>>()?;
            let mut j = 0;
            for &(mu, mu_0, g) in &unit {
                grid.descend(&mut j, "k", k as f64, |s| mu_0 + (mu / s) * g * q >= target)?;
            }
            // Later descents can only help earlier grid points, but confirm.
            let s = grid.value(j);
            debug_assert!(unit.iter().all(|&(mu, mu_0, g)| mu_0 + (mu / s) * g * q >= target));
            Ok(FrontierRow { key: k as f64, s })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FrontierTable {
        kind: FrontierKind::Discrete,
        confidence,
        alpha,
        beta,
        rows,
    })
}

/// For each `mu`, the largest grid ratio `s` such that `sigma = mu / s` forces a
/// necessary principal of at least the unit continuously withdrawn.
pub fn continuous_frontier(
    confidence: f64,
    alpha: f64,
    beta: f64,
    mus: &[f64],
    grid: &RatioGrid,
) -> Result<FrontierTable> {
    check_frontier_inputs(confidence, alpha, mus)?;
    let q = StandardQuantile::new(alpha, beta, confidence)?.value();
    let rows = mus
        .par_iter()
        .map(|&mu| {
            // Continuous withdrawal bound: the continuous investment bound with mu negated.
            let mu_star = expm1_over_x(-mu).ln();
            let g = profile_integral(alpha, -mu, &RombergConfig::default())?.powf(1.0 / alpha);
            let mut j = 0;
            grid.descend(&mut j, "mu", mu, |s| mu_star + (mu / s) * g * q >= 0.0)?;
            Ok(FrontierRow { key: mu, s: grid.value(j) })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FrontierTable {
        kind: FrontierKind::Continuous,
        confidence,
        alpha,
        beta,
        rows,
    })
}

/// Necessary principal to withdraw one unit continuously over `years`, per confidence level.
///
/// `annual` is the one-year law of the log factor; time is rescaled so the
/// horizon is one unit, giving `S(alpha, beta, sigma n^{1/alpha}, mu n)`.
pub fn principal_curve(years: f64, confidences: &[f64], annual: &StableParams) -> Result<Vec<(f64, f64)>> {
    if confidences.is_empty() {
        return Err(Error::invalid("confidence grid is empty"));
    }
    let horizon = annual.increment(years)?;
    let bound = crate::withdrawal::continuous_star_bound(&horizon)?;
    confidences
        .iter()
        .map(|&c| {
            let sq = StandardQuantile::new(horizon.alpha(), horizon.beta(), c)?;
            Ok((c, crate::withdrawal::necessary_principal_with(&bound, &sq)?))
        })
        .collect()
}

/// The annual law fitted to inflation-adjusted index log-returns.
pub fn index_annual_law() -> StableParams {
    StableParams::new(1.89, 1.0, 0.110, 0.0658).expect("valid constants")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lump_sum_small_mu() {
        let d = lump_sum_discount(&StableParams::new(2.0, 0.0, 1.0, 1e-9).unwrap()).unwrap();
        assert!((d.s - 1.0 / 3.0).abs() < 1e-6);
        assert!((d.x - 1.0).abs() < 1e-6);
        assert_eq!(d.scaled(2.0, 10.0), (2.0 * d.x, 10.0 * d.s));
    }

    #[test]
    fn grid_descent_stops_at_zero() {
        let grid = RatioGrid { start: 0.05, step: 0.01 };
        let mut j = 0;
        let err = grid.descend(&mut j, "k", 3.0, |_| false).unwrap_err();
        assert!(matches!(err, Error::EmptyFrontier { .. }));
    }

    #[test]
    fn frontier_rejects_bad_inputs() {
        let g = RatioGrid::default();
        assert!(discrete_frontier(1.2, 1.5, 0.0, &[2], &[0.01], &g).is_err());
        assert!(discrete_frontier(0.9, 1.0, 0.0, &[2], &[0.01], &g).is_err());
        assert!(discrete_frontier(0.9, 1.5, 0.0, &[2], &[-0.01], &g).is_err());
        assert!(continuous_frontier(0.9, 1.5, 0.0, &[], &g).is_err());
        assert!(principal_curve(2.0, &[], &index_annual_law()).is_err());
    }

    #[test]
    fn discrete_frontier_certifies_principal() {
        let mus = [0.01, 0.05, 0.2];
        let t = discrete_frontier(0.95, 1.89, 1.0, &[2, 5, 9], &mus, &RatioGrid::default()).unwrap();
        for row in &t.rows {
            let k = row.key as usize;
            for &mu in &mus {
                let p = StableParams::new(1.89, 1.0, mu / row.s, mu).unwrap();
                let sb = star_bound_closed_form(&p, k).unwrap();
                let principal = crate::withdrawal::necessary_principal(&sb, 0.95).unwrap();
                assert!(principal >= k as f64 * (1.0 - 1e-12), "k={k} mu={mu} P={principal}");
            }
        }
    }
}
