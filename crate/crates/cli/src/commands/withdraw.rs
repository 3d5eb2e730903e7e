use clap::Args;
use stablewealth::withdrawal::{
    continuous_star_bound, necessary_principal_with, star_bound_closed_form, star_bound_general,
    success_prob_upper_bound,
};
use stablewealth::{StandardQuantile, StarBound, WithdrawalPlan};

use super::a_rule;
use crate::{check_levels, fmt_row, Grid, ProcessArgs, Rendered};

#[derive(Debug, Args)]
pub struct WithdrawArgs {
    #[command(flatten)]
    pub process: ProcessArgs,
    /// Number of unit withdrawals at t = 1, ..., k.
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    /// Times t_0 = 0 < t_1 < ... < t_k of a general plan.
    #[arg(long, requires = "amounts")]
    pub times: Option<Grid>,
    /// Amounts w_1, ..., w_k withdrawn at t_1, ..., t_k.
    #[arg(long, requires = "times")]
    pub amounts: Option<Grid>,
    /// Fixed constants a_1, ..., a_{k-1} of the backward recursion.
    #[arg(long)]
    pub a: Option<Grid>,
    /// Closed form for unit withdrawals at unit spacing (requires alpha != 1 and mu != 0).
    #[arg(long, conflicts_with_all = ["times", "amounts", "a", "continuous"])]
    pub closed_form: bool,
    /// Confidence levels for the necessary principal.
    #[arg(long = "C", default_value = "0.95")]
    pub confidence: Grid,
    /// Principal at which to evaluate the success-probability bound (default: the necessary principal).
    #[arg(long)]
    pub principal: Option<f64>,
    /// Withdraw one unit at a constant rate over `--n` years of the annual process.
    #[arg(long, conflicts_with_all = ["times", "amounts", "a"])]
    pub continuous: bool,
    /// Horizon in years for `--continuous`.
    #[arg(long, default_value_t = 1.0, requires = "continuous")]
    pub n: f64,
}

pub(crate) fn render(args: &WithdrawArgs, mut out: String) -> anyhow::Result<Rendered> {
    let process = args.process.params()?;
    let levels = args.confidence.values();
    check_levels("confidence levels", levels)?;
    if let Some(p) = args.principal {
        anyhow::ensure!(p > 0.0, "--principal must be positive, got {p}");
    }

    let (bound, prefix): (StarBound, Option<f64>) = if args.continuous {
        anyhow::ensure!(args.n > 0.0, "--n must be positive, got {}", args.n);
        (continuous_star_bound(&process.increment(args.n)?)?, Some(args.n))
    } else if args.closed_form {
        (star_bound_closed_form(&process, args.k)?, None)
    } else {
        let plan = match (&args.times, &args.amounts) {
            (Some(t), Some(w)) => WithdrawalPlan::new(1.0, t.0.clone(), w.0.clone())?,
            _ => WithdrawalPlan::equal(args.k, 1.0)?,
        };
        (star_bound_general(&process, &plan, &a_rule(&args.a))?, None)
    };

    if args.continuous {
        out.push_str("n,");
    }
    out.push_str("C,necessary_principal,principal,success_upper_bound\n");
    for &c in levels {
        let sq = StandardQuantile::new(bound.law.alpha(), -bound.skew(), c)?;
        let needed = necessary_principal_with(&bound, &sq)?;
        let principal = args.principal.unwrap_or(needed);
        let prob = success_prob_upper_bound(&bound, principal)?;
        let mut row = Vec::with_capacity(5);
        row.extend(prefix);
        row.extend([c, needed, principal, prob]);
        out.push_str(&fmt_row(&row));
    }
    Ok(Rendered { primary: out, ..Default::default() })
}
