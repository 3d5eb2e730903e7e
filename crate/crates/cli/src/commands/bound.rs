use clap::Args;
use stablewealth::quadrature::RombergConfig;
use stablewealth::wealth::{bound_continuous_with, bound_dca_closed_form, bound_general, returns_from_bound};
use stablewealth::{BoundParams, Schedule};

use super::a_rule;
use crate::{check_levels, fmt_row, Cli, Grid, ProcessArgs, Rendered};

#[derive(Debug, Args)]
pub struct BoundArgs {
    #[command(flatten)]
    pub process: ProcessArgs,
    /// Number of unit investments at t = 0, ..., k-1 (wealth observed at t = k).
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    /// Unit dollar-cost averaging; the default when no schedule is given.
    #[arg(long, conflicts_with_all = ["times", "amounts", "continuous"])]
    pub dca: bool,
    /// Times t_0 = 0 < t_1 < ... < t_K of a general schedule.
    #[arg(long, requires = "amounts")]
    pub times: Option<Grid>,
    /// Amounts c_0, ..., c_{K-1} invested at t_0, ..., t_{K-1}.
    #[arg(long, requires = "times")]
    pub amounts: Option<Grid>,
    /// Fixed constants a_1, ..., a_{K-1}; by default each maximizes the bound location.
    #[arg(long)]
    pub a: Option<Grid>,
    /// Closed form for unit dollar-cost averaging (requires alpha != 1 and mu != 0).
    #[arg(long, conflicts_with_all = ["times", "amounts", "a", "continuous"])]
    pub closed_form: bool,
    /// One unit invested at a constant rate over unit time.
    #[arg(long, conflicts_with_all = ["times", "amounts", "a"])]
    pub continuous: bool,
    /// Quantile levels reported for log Z_k and the log returns bound.
    #[arg(long, default_value = "0.05,0.5,0.95")]
    pub quantiles: Grid,
}

pub(crate) fn render(args: &BoundArgs, cli: &Cli, mut out: String) -> anyhow::Result<Rendered> {
    let process = args.process.params()?;
    let levels = args.quantiles.values();
    check_levels("quantile levels", levels)?;

    if args.continuous {
        let cfg = romberg(cli);
        let c = bound_continuous_with(&process, &cfg)?;
        out.push_str("mu_star,sigma_star,integral,bracket_lo,bracket_hi");
        for p in levels {
            out.push_str(&format!(",zq_{p}"));
        }
        out.push('\n');
        let mut row = vec![c.mu_star, c.sigma_star, c.integral, c.bracket.0, c.bracket.1];
        for p in levels {
            row.push(c.law.quantile(*p)?);
        }
        out.push_str(&fmt_row(&row));
        return Ok(Rendered { primary: out, ..Default::default() });
    }

    let sched = match (&args.times, &args.amounts) {
        (Some(t), Some(c)) => Schedule::new(t.0.clone(), c.0.clone())?,
        _ => Schedule::dca(args.k)?,
    };
    let chain: Vec<BoundParams> = if args.closed_form {
        (1..=sched.len()).map(|k| bound_dca_closed_form(&process, k)).collect::<Result<_, _>>()?
    } else {
        bound_general(&process, &sched, &a_rule(&args.a))?
    };

    out.push_str("k,t,invested,mu,sigma");
    for p in levels {
        out.push_str(&format!(",zq_{p}"));
    }
    for p in levels {
        out.push_str(&format!(",rq_{p}"));
    }
    out.push('\n');
    for b in &chain {
        let ret = returns_from_bound(b, &sched)?;
        let mut row = vec![b.k as f64, sched.times()[b.k], sched.invested_before(b.k), b.mu(), b.sigma()];
        for p in levels {
            row.push(b.law.quantile(*p)?);
        }
        for p in levels {
            row.push(ret.quantile(*p)?);
        }
        out.push_str(&fmt_row(&row));
    }
    Ok(Rendered { primary: out, ..Default::default() })
}

pub(crate) fn romberg(cli: &Cli) -> RombergConfig {
    let mut cfg = RombergConfig::default();
    if let Some(t) = cli.tol {
        cfg.tol = t;
    }
    cfg
}
