use std::path::PathBuf;

use clap::Args;
use stablewealth::data::{fit_stable, load_csv, qq_points, to_returns, write_qq_csv, FitConfig};
use stablewealth::StableParams;

use crate::{fmt_row, Cli, Grid, Rendered};

#[derive(Debug, Args)]
pub struct DataArgs {
    /// CSV with header `year,I,D,C`.
    #[arg(long)]
    pub input: PathBuf,
    /// Initial estimate alpha,beta,sigma,mu for the fit.
    #[arg(long, default_value = "1.91,1,0.115,0.0658", allow_hyphen_values = true)]
    pub init: Grid,
    #[arg(long, default_value_t = 20)]
    pub max_iter: usize,
}

/// Produces `returns.csv`, `qq.csv` and `fit.csv`; the fit is also the primary output.
pub(crate) fn render(args: &DataArgs, cli: &Cli, head: String) -> anyhow::Result<Rendered> {
    let init = match args.init.values() {
        &[a, b, s, m] => StableParams::new(a, b, s, m)?,
        v => anyhow::bail!("--init needs alpha,beta,sigma,mu, got {} values", v.len()),
    };
    let raw = load_csv(&args.input)?;
    let returns = to_returns(&raw)?;
    let logs = returns.log_returns();
    let mut cfg = FitConfig { max_iter: args.max_iter, ..FitConfig::default() };
    if let Some(t) = cli.tol {
        cfg.tol = t;
    }
    let fit = fit_stable(&logs, &init, &cfg)?;
    let p = fit.params;

    let n = logs.len() as f64;
    let mean = logs.iter().sum::<f64>() / n;
    let sd = (logs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();

    let mut primary = head.clone();
    primary.push_str("alpha,beta,sigma,mu,iterations,n,mean,sd\n");
    primary.push_str(&fmt_row(&[p.alpha(), p.beta(), p.sigma(), p.mu(), fit.iterations as f64, n, mean, sd]));

    let mut buf = Vec::new();
    returns.write_csv(&mut buf)?;
    let returns_csv = head.clone() + &String::from_utf8(buf)?;
    let mut buf = Vec::new();
    write_qq_csv(&qq_points(&logs, &p)?, &mut buf)?;
    let qq_csv = head + &String::from_utf8(buf)?;

    let mut warnings = Vec::new();
    if fit.small_sample {
        warnings.push(format!("only {} returns; the fit is unreliable below 30 observations", logs.len()));
    }
    Ok(Rendered {
        primary: primary.clone(),
        files: vec![
            ("returns.csv".into(), returns_csv),
            ("qq.csv".into(), qq_csv),
            ("fit.csv".into(), primary.clone()),
        ],
        warnings,
        ..Default::default()
    })
}
