use clap::{Args, ValueEnum};
use stablewealth::planner::{
    continuous_frontier, default_continuous_mu_grid, default_discrete_mu_grid, discrete_frontier, fit_surrogate,
    FrontierTable, RatioGrid,
};

use super::count;
use crate::{fmt_row, Grid, Rendered};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    /// Unit withdrawals at unit spacing, one row per k.
    Discrete,
    /// Continuous withdrawal of one unit over unit time, one row per mu.
    Continuous,
}

#[derive(Debug, Args)]
pub struct FrontierArgs {
    #[arg(long, value_enum, default_value_t = Kind::Discrete)]
    pub kind: Kind,
    /// Confidence level.
    #[arg(long = "C", default_value_t = 0.95)]
    pub confidence: f64,
    /// Shapes to sweep.
    #[arg(long, default_value = "1.89")]
    pub alphas: Grid,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub beta: f64,
    /// Numbers of withdrawals (discrete).
    #[arg(long, default_value = "2:60:1")]
    pub ks: Grid,
    /// Positive mu grid [default: .001n (discrete) or .01n (continuous), n = 1..500].
    #[arg(long)]
    pub mus: Option<Grid>,
    /// First ratio tried.
    #[arg(long, default_value_t = 20.0)]
    pub start: f64,
    /// Descent step of the ratio.
    #[arg(long, default_value_t = 0.01)]
    pub step: f64,
    /// Fit the polynomial surrogate in k with this degree in alpha (discrete only).
    #[arg(long)]
    pub surrogate_degree: Option<usize>,
}

pub(crate) fn render(args: &FrontierArgs, mut out: String) -> anyhow::Result<Rendered> {
    anyhow::ensure!(args.start > 0.0 && args.step > 0.0, "--start and --step must be positive");
    let grid = RatioGrid { start: args.start, step: args.step };
    let alphas = args.alphas.values();
    anyhow::ensure!(!alphas.is_empty(), "no shapes given");

    if args.kind == Kind::Continuous {
        anyhow::ensure!(args.surrogate_degree.is_none(), "surrogates are fitted to discrete frontiers only");
        let mus = args.mus.as_ref().map_or_else(default_continuous_mu_grid, |g| g.0.clone());
        out.push_str("alpha,beta,C,mu,s,min_sigma\n");
        for &alpha in alphas {
            let t = continuous_frontier(args.confidence, alpha, args.beta, &mus, &grid)?;
            for (row, min_sigma) in t.rows.iter().zip(t.min_sigma()) {
                out.push_str(&fmt_row(&[alpha, args.beta, args.confidence, row.key, row.s, min_sigma]));
            }
        }
        return Ok(Rendered { primary: out, ..Default::default() });
    }

    let ks = args.ks.values().iter().map(|&k| count("k", k)).collect::<anyhow::Result<Vec<_>>>()?;
    let mus = args.mus.as_ref().map_or_else(default_discrete_mu_grid, |g| g.0.clone());
    let tables: Vec<FrontierTable> = alphas
        .iter()
        .map(|&alpha| discrete_frontier(args.confidence, alpha, args.beta, &ks, &mus, &grid))
        .collect::<Result<_, _>>()?;

    let fit = args.surrogate_degree.map(|d| fit_surrogate(&tables, d)).transpose()?;
    if let Some(f) = &fit {
        out.push_str(&format!("# surrogate max_residual={} shift={}\n", f.max_residual, f.shift));
        for (i, row) in f.lambda.row_iter().enumerate() {
            let coeffs: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            out.push_str(&format!("# lambda[{i}]={}\n", coeffs.join(",")));
        }
        out.push_str("alpha,beta,C,k,s,fit,conservative\n");
    } else {
        out.push_str("alpha,beta,C,k,s\n");
    }
    for t in &tables {
        for row in &t.rows {
            let mut v = vec![t.alpha, args.beta, args.confidence, row.key, row.s];
            if let Some(f) = &fit {
                v.extend([f.eval(row.key, t.alpha), f.conservative(row.key, t.alpha)]);
            }
            out.push_str(&fmt_row(&v));
        }
    }
    Ok(Rendered { primary: out, ..Default::default() })
}
