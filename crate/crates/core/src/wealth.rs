//! Log-stable lower bounds on the terminal wealth of regular investment schedules.
//!
//! For wealth factors `X_k` with `log X_k` stable and the wealth recursion
//! `Y_1 = c_0 X_1`, `Y_k = X_k (Y_{k-1} + c_{k-1})`, the bound
//!
//! ```text
//! Z_1 = Y_1,   Z_k = X_k (a_{k-1} + c_{k-1}) (Z_{k-1} / a_{k-1})^{b_{k-1}},   b = a / (a + c)
//! ```
//!
//! satisfies `Z_k <= Y_k` pathwise (weighted power-mean inequality) and
//! `log Z_k` is again stable with the same shape and skewness.
//!
//! The first step is the exact law of `log(c_0 X_1) = log c_0 + log X_1`; the
//! amount enters as a location shift only.

use std::f64::consts::FRAC_2_PI;

use crate::error::{Error, Result};
use crate::numeric::{expm1_over_x, ln_abs_expm1, ln_add_exp};
use crate::quadrature::{romberg, RombergConfig};
use crate::stable::StableParams;

/// Investment times `t_0 = 0 < t_1 < ... < t_K` and amounts `c_0, ..., c_{K-1}`.
///
/// `c_j` is invested at `t_j`; the wealth is observed at `t_1, ..., t_K`, so
/// there is one more time than amount.
#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    times: Vec<f64>,
    amounts: Vec<f64>,
}

impl Schedule {
    pub fn new(times: Vec<f64>, amounts: Vec<f64>) -> Result<Self> {
        if amounts.is_empty() {
            return Err(Error::invalid("schedule needs at least one investment"));
        }
        if times.len() != amounts.len() + 1 {
            return Err(Error::invalid(format!(
                "schedule with {} amounts needs {} times (t_0 through t_K), got {}",
                amounts.len(),
                amounts.len() + 1,
                times.len()
            )));
        }
        if times[0] != 0.0 {
            return Err(Error::invalid(format!("schedule must start at t_0 = 0, got {}", times[0])));
        }
        if let Some(w) = times.windows(2).find(|w| !(w[1] > w[0]) || !w[1].is_finite()) {
            return Err(Error::invalid(format!("times must be strictly increasing, got {} then {}", w[0], w[1])));
        }
        if let Some(c) = amounts.iter().find(|c| !(**c > 0.0 && c.is_finite())) {
            return Err(Error::invalid(format!("amounts must be positive and finite, got {c}")));
        }
        Ok(Self { times, amounts })
    }

    /// Unit amounts at unit spacing: `t_j = j`, `c_j = 1`, observed up to `t_k`.
    pub fn dca(k: usize) -> Result<Self> {
        Self::new((0..=k).map(|j| j as f64).collect(), vec![1.0; k])
    }

    /// `n` equal amounts of `1/n` at spacing `1/n`, observed at time 1.
    pub fn uniform(n: usize) -> Result<Self> {
        let step = 1.0 / n as f64;
        Self::new((0..=n).map(|j| j as f64 * step).collect(), vec![step; n])
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn amounts(&self) -> &[f64] {
        &self.amounts
    }

    /// Number of observation steps `K`.
    pub fn len(&self) -> usize {
        self.amounts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amounts.is_empty()
    }

    /// `t_k - t_{k-1}` for `k = 1..=K`.
    pub fn increments(&self) -> Vec<f64> {
        self.times.windows(2).map(|w| w[1] - w[0]).collect()
    }

    /// Total invested before `t_k`, i.e. `c_0 + ... + c_{k-1}`.
    pub fn invested_before(&self, k: usize) -> f64 {
        self.amounts[..k].iter().sum()
    }

    /// The same schedule with every amount multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.times.clone(), self.amounts.iter().map(|c| c * factor).collect())
    }
}

/// Choice of the free constants `a_1, ..., a_{K-1}`.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum ARule {
    /// `a_{k-1} = exp(mu_{k-1})`, which maximizes the next location.
    #[default]
    MaxLocation,
    /// Explicit positive constants, `a_1` first.
    Fixed(Vec<f64>),
}

/// The constants that link step `k - 1` to step `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Link {
    pub log_a: f64,
    /// `a / (a + c)`, in `(0, 1)`.
    pub b: f64,
}

/// The law of `log Z_k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundParams {
    pub k: usize,
    pub law: StableParams,
    /// Location before the `alpha = 1` correction; equals `mu_k` otherwise.
    pub m: f64,
    /// `None` at `k = 1`.
    pub link: Option<Link>,
}

impl BoundParams {
    pub fn sigma(&self) -> f64 {
        self.law.sigma()
    }

    pub fn mu(&self) -> f64 {
        self.law.mu()
    }
}

/// Recursive lower bound for an arbitrary schedule; entry `k - 1` is the law of `log Z_k`.
pub fn bound_general(process: &StableParams, sched: &Schedule, a_rule: &ARule) -> Result<Vec<BoundParams>> {
    let fixed = match a_rule {
        ARule::MaxLocation => None,
        ARule::Fixed(a) => Some(a.as_slice()),
    };
    bound_recursion(process, &sched.increments(), sched.amounts(), fixed)
}

/// Core recursion on time increments; `amounts[j]` is invested at the start of increment `j`.
pub(crate) fn bound_recursion(
    process: &StableParams,
    increments: &[f64],
    amounts: &[f64],
    fixed_a: Option<&[f64]>,
) -> Result<Vec<BoundParams>> {
    if increments.is_empty() {
        return Err(Error::invalid("bound requires a nonempty schedule"));
    }
    debug_assert_eq!(increments.len(), amounts.len());
    let log_fixed: Option<Vec<f64>> = match fixed_a {
        None => None,
        Some(a) => {
            if a.len() != increments.len() - 1 {
                return Err(Error::invalid(format!(
                    "{} steps need {} constants a_1..a_{{K-1}}, got {}",
                    increments.len(),
                    increments.len() - 1,
                    a.len()
                )));
            }
            if let Some(bad) = a.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
                return Err(Error::invalid(format!("constants a_j must be positive, got {bad}")));
            }
            Some(a.iter().map(|v| v.ln()).collect())
        }
    };

    let (alpha, beta, sigma, mu) = (process.alpha(), process.beta(), process.sigma(), process.mu());
    let sigma_alpha = sigma.powf(alpha);
    let mut out = Vec::with_capacity(increments.len());

    let first = process.increment(increments[0])?;
    let mu1 = first.mu() + amounts[0].ln();
    out.push(BoundParams {
        k: 1,
        law: first.with_mu(mu1)?,
        m: mu1,
        link: None,
    });

    for k in 2..=increments.len() {
        let prev = out[k - 2].law;
        let log_a = match &log_fixed {
            None => prev.mu(),
            Some(v) => v[k - 2],
        };
        let ln_c = amounts[k - 1].ln();
        let ln_sum = ln_add_exp(log_a, ln_c);
        let b = (log_a - ln_sum).exp();
        let dt = increments[k - 1];
        let m = b * (prev.mu() - log_a) + ln_sum + mu * dt;
        let mu_k = if process.is_cauchy_branch() {
            m - FRAC_2_PI * beta * b * prev.sigma() * b.ln()
        } else {
            m
        };
        let sigma_k = ((b * prev.sigma()).powf(alpha) + sigma_alpha * dt).powf(1.0 / alpha);
        out.push(BoundParams {
            k,
            law: StableParams::new(alpha, beta, sigma_k, mu_k)?,
            m,
            link: Some(Link { log_a, b }),
        });
    }
    Ok(out)
}

pub(crate) fn require_closed_form(process: &StableParams) -> Result<()> {
    if process.is_cauchy_branch() {
        return Err(Error::precondition("closed-form bounds require alpha != 1"));
    }
    if process.mu() == 0.0 {
        return Err(Error::precondition("closed-form bounds require mu != 0"));
    }
    Ok(())
}

/// Closed form of the recursion for unit dollar cost averaging with the location-maximizing constants.
pub fn bound_dca_closed_form(process: &StableParams, k: usize) -> Result<BoundParams> {
    require_closed_form(process)?;
    if k == 0 {
        return Err(Error::invalid("k must be at least 1"));
    }
    let (alpha, mu) = (process.alpha(), process.mu());
    let location = |k: usize| mu + ln_abs_expm1(mu * k as f64) - ln_abs_expm1(mu);
    let mu_k = location(k);

    // 1 - (e^{mu j} - 1)/(e^{mu k} - 1) = expm1(mu (j - k)) / expm1(-mu k), evaluated in logs.
    let kf = k as f64;
    let ln_den = ln_abs_expm1(-mu * kf);
    let tail: f64 = (1..k)
        .map(|j| (alpha * (ln_abs_expm1(mu * (j as f64 - kf)) - ln_den)).exp())
        .sum();
    let sigma_k = process.sigma() * (1.0 + tail).powf(1.0 / alpha);

    let link = (k > 1).then(|| {
        let log_a = location(k - 1);
        Link {
            log_a,
            b: (log_a - ln_add_exp(log_a, 0.0)).exp(),
        }
    });
    Ok(BoundParams {
        k,
        law: StableParams::new(alpha, process.beta(), sigma_k, mu_k)?,
        m: mu_k,
        link,
    })
}

/// Law of the log lower bound on returns `R_k = Y_k / (c_0 + ... + c_{k-1})`.
pub fn returns_from_bound(b: &BoundParams, sched: &Schedule) -> Result<StableParams> {
    if b.k == 0 || b.k > sched.len() {
        return Err(Error::invalid(format!("bound step {} outside schedule of length {}", b.k, sched.len())));
    }
    b.law.with_mu(b.law.mu() - sched.invested_before(b.k).ln())
}

/// Limit bound for continuous investment of one unit over unit time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContinuousBound {
    /// Law of `log Z` with `P(Z <= x)` bounding the limiting wealth distribution from above.
    pub law: StableParams,
    pub mu_star: f64,
    pub sigma_star: f64,
    /// `+1` for `mu >= 0`, `-1` otherwise.
    pub chi: f64,
    /// `mu / (e^mu - 1)`.
    pub r: f64,
    /// `(sigma_star / sigma)^alpha`, the integral of the normalized growth profile.
    pub integral: f64,
    /// Analytic bracket of `integral`, ordered low to high.
    pub bracket: (f64, f64),
}

/// Integrand `((1 - e^{-mu x}) / (1 - e^{-mu}))^alpha`, evaluated in logs.
fn profile(alpha: f64, mu: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    (alpha * (ln_abs_expm1(-mu * x) - ln_abs_expm1(-mu))).exp()
}

/// `∫_0^1 profile(x) dx` by Romberg integration.
///
/// The profile behaves like `x^alpha` at the origin, which caps trapezoid
/// accuracy at `h^(alpha + 1)`. Integrating in `u` with `x = u^4` raises the
/// endpoint order to `4 alpha + 3`, so the extrapolation converges for small
/// `alpha` and large `|mu|` as well.
pub fn profile_integral(alpha: f64, mu: f64, cfg: &RombergConfig) -> Result<f64> {
    let integrand = |u: f64| {
        let u3 = u * u * u;
        4.0 * u3 * profile(alpha, mu, u3 * u)
    };
    Ok(romberg(integrand, 0.0, 1.0, cfg)?.value)
}

pub fn bound_continuous(process: &StableParams) -> Result<ContinuousBound> {
    bound_continuous_with(process, &RombergConfig::default())
}

pub fn bound_continuous_with(process: &StableParams, cfg: &RombergConfig) -> Result<ContinuousBound> {
    require_closed_form(process)?;
    let (alpha, mu) = (process.alpha(), process.mu());
    let integral = profile_integral(alpha, mu, cfg)?;
    let r = 1.0 / expm1_over_x(mu);
    let chi = if mu >= 0.0 { 1.0 } else { -1.0 };
    let (x, y) = (1.0 / (alpha + 1.0), 1.0 / (r * alpha + 1.0));
    let bracket = (x.min(y), x.max(y));
    let slack = 4.0 * cfg.tol;
    if integral < bracket.0 - slack || integral > bracket.1 + slack {
        return Err(Error::no_convergence(
            "romberg",
            format!("integral {integral} outside analytic bracket [{}, {}]", bracket.0, bracket.1),
        ));
    }
    let mu_star = expm1_over_x(mu).ln();
    let sigma_star = process.sigma() * integral.powf(1.0 / alpha);
    Ok(ContinuousBound {
        law: StableParams::new(alpha, process.beta(), sigma_star, mu_star)?,
        mu_star,
        sigma_star,
        chi,
        r,
        integral,
        bracket,
    })
}

/// Pointwise bounds `((1 - e^{-mu}) x, (1 - e^{-mu}) x^r)` on `1 - e^{-mu x}`.
///
/// Both orderings hold for either sign of `mu`; for `mu < 0` the common factor
/// is negative, which is what reverses the bracket of the normalized integral.
pub fn xxr_bracket(mu: f64, x: f64) -> Result<(f64, f64)> {
    if mu == 0.0 || !mu.is_finite() {
        return Err(Error::invalid(format!("mu must be finite and nonzero, got {mu}")));
    }
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::invalid(format!("x must lie in [0, 1], got {x}")));
    }
    let r = 1.0 / expm1_over_x(mu);
    let scale = -(-mu).exp_m1();
    Ok((scale * x, scale * x.powf(r)))
}
