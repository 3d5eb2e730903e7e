use clap::Args;
use stablewealth::planner::lump_sum_discount_with;
use stablewealth::StableParams;

use super::bound::romberg;
use crate::{fmt_row, Cli, Grid, Rendered};

#[derive(Debug, Args)]
pub struct DiscountArgs {
    /// Shapes alpha.
    #[arg(long, default_value = "1.5,1.75,2")]
    pub alphas: Grid,
    /// Locations mu (nonzero).
    #[arg(long, default_value = "0.01:0.5:0.01", allow_hyphen_values = true)]
    pub mus: Grid,
}

pub(crate) fn render(args: &DiscountArgs, cli: &Cli, mut out: String) -> anyhow::Result<Rendered> {
    let cfg = romberg(cli);
    out.push_str("alpha,mu,x,s,bracket_lo,bracket_hi\n");
    for &alpha in args.alphas.values() {
        for &mu in args.mus.values() {
            // Scale and skewness do not enter the discount.
            let d = lump_sum_discount_with(&StableParams::new(alpha, 0.0, 1.0, mu)?, &cfg)?;
            let r = mu / mu.exp_m1();
            let (a, b) = (1.0 / (alpha + 1.0), 1.0 / (r * alpha + 1.0));
            out.push_str(&fmt_row(&[alpha, mu, d.x, d.s, a.min(b), a.max(b)]));
        }
    }
    Ok(Rendered { primary: out, ..Default::default() })
}
