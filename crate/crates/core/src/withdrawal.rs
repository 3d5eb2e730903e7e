//! Upper bounds on the probability that a withdrawal plan succeeds.
//!
//! With principal `P` and withdrawals `w_j` at `t_j`, the remaining wealth is
//! `W_k = W_{k-1} X_k - w_k`. Running the plan backwards gives the smallest
//! principal that survives a given path,
//!
//! ```text
//! W*_{k-1} = w_k / X_k,   W*_{j-1} = (W*_j + w_j) / X_j,   P* = W*_0
//! ```
//!
//! and `P* > P` exactly when `W_k < 0`. This is an investment recursion for
//! the reciprocal factors `1 / X_j`, whose logs follow `S(alpha, -beta, sigma, -mu)`,
//! with increments and amounts taken in reverse order. The wealth bound of
//! [`crate::wealth`] applied to it yields `Z*_0 <= P*`, hence
//! `P(W_k >= 0) <= P(Z*_0 <= P)`.

use std::f64::consts::FRAC_2_PI;

use crate::error::{Error, Result};
use crate::stable::StableParams;
use crate::wealth::{bound_continuous, bound_dca_closed_form, bound_recursion, ARule, BoundParams, ContinuousBound};

/// Principal `P` invested at `t_0 = 0`, withdrawals `w_1, ..., w_k` at `t_1, ..., t_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct WithdrawalPlan {
    principal: f64,
    times: Vec<f64>,
    amounts: Vec<f64>,
}

impl WithdrawalPlan {
    pub fn new(principal: f64, times: Vec<f64>, amounts: Vec<f64>) -> Result<Self> {
        if !(principal >= 0.0 && principal.is_finite()) {
            return Err(Error::invalid(format!("principal must be finite and nonnegative, got {principal}")));
        }
        if amounts.is_empty() {
            return Err(Error::invalid("plan needs at least one withdrawal"));
        }
        if times.len() != amounts.len() + 1 {
            return Err(Error::invalid(format!(
                "plan with {} withdrawals needs {} times (t_0 through t_k), got {}",
                amounts.len(),
                amounts.len() + 1,
                times.len()
            )));
        }
        if times[0] != 0.0 {
            return Err(Error::invalid(format!("plan must start at t_0 = 0, got {}", times[0])));
        }
        if let Some(w) = times.windows(2).find(|w| !(w[1] > w[0]) || !w[1].is_finite()) {
            return Err(Error::invalid(format!("times must be strictly increasing, got {} then {}", w[0], w[1])));
        }
        if let Some(w) = amounts.iter().find(|w| !(**w > 0.0 && w.is_finite())) {
            return Err(Error::invalid(format!("withdrawals must be positive and finite, got {w}")));
        }
        Ok(Self {
            principal,
            times,
            amounts,
        })
    }

    /// `k` unit withdrawals at `t_j = j`.
    pub fn equal(k: usize, principal: f64) -> Result<Self> {
        Self::new(principal, (0..=k).map(|j| j as f64).collect(), vec![1.0; k])
    }

    pub fn principal(&self) -> f64 {
        self.principal
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    /// `w_1, ..., w_k`.
    pub fn amounts(&self) -> &[f64] {
        &self.amounts
    }

    pub fn len(&self) -> usize {
        self.amounts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amounts.is_empty()
    }

    pub fn increments(&self) -> Vec<f64> {
        self.times.windows(2).map(|w| w[1] - w[0]).collect()
    }

    pub fn with_principal(&self, principal: f64) -> Result<Self> {
        Self::new(principal, self.times.clone(), self.amounts.clone())
    }
}

/// Law of `log Z*_0`, a pathwise lower bound on the required principal `P*`.
#[derive(Debug, Clone, PartialEq)]
pub struct StarBound {
    /// `S(alpha, -beta, sigma_0, mu_0)`.
    pub law: StableParams,
    /// Laws of `log Z*_{k-1}, ..., log Z*_0`, in the order the backward recursion produces them.
    /// Empty for the continuous and closed-form constructions.
    pub chain: Vec<BoundParams>,
}

impl StarBound {
    fn from_law(law: StableParams) -> Self {
        Self { law, chain: Vec::new() }
    }

    pub fn sigma_0(&self) -> f64 {
        self.law.sigma()
    }

    pub fn mu_0(&self) -> f64 {
        self.law.mu()
    }

    /// Skewness of the bound, the negated skewness of the asset process.
    pub fn skew(&self) -> f64 {
        self.law.beta()
    }

    /// Law of `log Z*_j` for `j = 0..k-1`, when the recursion was run.
    pub fn intermediate(&self, j: usize) -> Option<&BoundParams> {
        let n = self.chain.len();
        (j < n).then(|| &self.chain[n - 1 - j])
    }
}

/// Mirror process `S(alpha, -beta, sigma, -mu)` of the reciprocal factors.
fn mirror(process: &StableParams) -> StableParams {
    process.negated()
}

/// Backward recursion for an arbitrary plan.
///
/// Fixed constants are given in the plan's own numbering, `a_1` first.
pub fn star_bound_general(process: &StableParams, plan: &WithdrawalPlan, a_rule: &ARule) -> Result<StarBound> {
    let mut increments = plan.increments();
    increments.reverse();
    let mut amounts = plan.amounts().to_vec();
    amounts.reverse();
    let reversed_a = match a_rule {
        ARule::MaxLocation => None,
        ARule::Fixed(a) => Some(a.iter().rev().copied().collect::<Vec<_>>()),
    };
    let chain = bound_recursion(&mirror(process), &increments, &amounts, reversed_a.as_deref())?;
    let law = chain.last().expect("nonempty plan").law;
    Ok(StarBound { law, chain })
}

/// Closed form for unit withdrawals at unit spacing.
pub fn star_bound_closed_form(process: &StableParams, k: usize) -> Result<StarBound> {
    Ok(StarBound::from_law(bound_dca_closed_form(&mirror(process), k)?.law))
}

/// Bound for withdrawing one unit at a constant rate over unit time.
pub fn continuous_star_bound(process: &StableParams) -> Result<StarBound> {
    Ok(StarBound::from_law(continuous_star_details(process)?.law))
}

/// The continuous investment bound of the mirror process, which carries the law of `log Z*`.
pub fn continuous_star_details(process: &StableParams) -> Result<ContinuousBound> {
    bound_continuous(&mirror(process))
}

/// `P(Z*_0 <= P)`, an upper bound on `P(W_k >= 0)`.
pub fn success_prob_upper_bound(sb: &StarBound, principal: f64) -> Result<f64> {
    if !(principal > 0.0) {
        return Err(Error::invalid(format!("principal must be positive, got {principal}")));
    }
    if principal == f64::INFINITY {
        return Ok(1.0);
    }
    sb.law.cdf(principal.ln())
}

/// Quantile of the standardized bound law `S(alpha, -beta, 1, 0)` at a confidence level.
///
/// Computed once and reused for every `(sigma_0, mu_0)` with the same shape and skewness.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StandardQuantile {
    alpha: f64,
    skew: f64,
    confidence: f64,
    q: f64,
}

impl StandardQuantile {
    /// `alpha` and `beta` are those of the asset process.
    pub fn new(alpha: f64, beta: f64, confidence: f64) -> Result<Self> {
        if !(confidence > 0.0 && confidence < 1.0) {
            return Err(Error::invalid(format!("confidence must lie in (0, 1), got {confidence}")));
        }
        let q = StableParams::standard(alpha, -beta)?.quantile(confidence)?;
        Ok(Self {
            alpha,
            skew: -beta,
            confidence,
            q,
        })
    }

    pub fn value(&self) -> f64 {
        self.q
    }

    pub fn confidence(&self) -> f64 {
        self.confidence
    }

    /// `log` of the confidence-level quantile of a law `S(alpha, -beta, sigma_0, mu_0)`.
    pub fn ln_principal(&self, sigma_0: f64, mu_0: f64) -> f64 {
        let mut x = mu_0 + sigma_0 * self.q;
        if self.alpha == 1.0 {
            x += FRAC_2_PI * self.skew * sigma_0 * sigma_0.ln();
        }
        x
    }

    fn check(&self, sb: &StarBound) -> Result<()> {
        if sb.law.alpha() != self.alpha || sb.law.beta() != self.skew {
            return Err(Error::invalid(format!(
                "quantile computed for S({}, {}, 1, 0) cannot serve {}",
                self.alpha, self.skew, sb.law
            )));
        }
        Ok(())
    }
}

/// Smallest principal whose bound probability reaches `confidence`; any smaller
/// principal succeeds with probability below `confidence`.
pub fn necessary_principal(sb: &StarBound, confidence: f64) -> Result<f64> {
    let sq = StandardQuantile::new(sb.law.alpha(), -sb.law.beta(), confidence)?;
    necessary_principal_with(sb, &sq)
}

pub fn necessary_principal_with(sb: &StarBound, sq: &StandardQuantile) -> Result<f64> {
    sq.check(sb)?;
    Ok(sq.ln_principal(sb.sigma_0(), sb.mu_0()).exp())
}
