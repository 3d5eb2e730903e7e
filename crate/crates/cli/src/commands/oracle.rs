use clap::{Args, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stablewealth::oracle::{
    check_bound_quantile, check_continuous_dca, check_domination, check_star_domination, check_withdrawal_duality,
    estimate_success_prob, OracleReport, Probe, SimulationConfig,
};
use stablewealth::{ARule, Schedule, StableParams, WithdrawalPlan};

use crate::{Cli, ProcessArgs, Rendered};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Check {
    /// Pathwise Z_k <= Y_k for investment schedules.
    Domination,
    /// Pathwise Z*_0 <= P* for withdrawal plans.
    StarDomination,
    /// Ruin exactly when the required principal exceeds the principal.
    Duality,
    /// Empirical success probability against its analytic upper bound.
    Success,
    /// Empirical CDF of log Z_k at the analytic quantile.
    Quantile,
    /// Continuous-investment limit ordering.
    Continuous,
    All,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[arg(long, value_enum, default_value_t = Check::All)]
    pub check: Check,
    #[command(flatten)]
    pub process: ProcessArgs,
    #[arg(long, default_value_t = 100_000)]
    pub paths: u64,
    /// Unit investments or withdrawals at unit spacing.
    #[arg(long, default_value_t = 10)]
    pub k: usize,
    /// Principal of the withdrawal plan.
    #[arg(long, default_value_t = 10.0)]
    pub principal: f64,
    /// Run this many random (process, schedule, constants) configurations drawn from the seed instead.
    #[arg(long)]
    pub random: Option<usize>,
    /// Inflate the bound scale by this factor around its location (negative control).
    #[arg(long)]
    pub inflate: Option<f64>,
    /// Level of the quantile check.
    #[arg(long, default_value_t = 0.05)]
    pub level: f64,
}

/// Process with alpha in (1, 2], |mu| in [.01, .5] of either sign.
pub fn random_process(rng: &mut impl Rng) -> StableParams {
    let mu = rng.random_range(0.01..=0.5) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
    StableParams::new(
        rng.random_range(1.01..=2.0),
        rng.random_range(-1.0..=1.0),
        rng.random_range(0.02..=0.5),
        mu,
    )
    .expect("ranges are valid")
}

/// Up to 25 steps with irregular spacing and amounts.
pub fn random_times_amounts(rng: &mut impl Rng) -> (Vec<f64>, Vec<f64>) {
    let k = rng.random_range(1..=25);
    let mut t = vec![0.0];
    for _ in 0..k {
        let last = *t.last().expect("nonempty");
        t.push(last + rng.random_range(0.1..2.0));
    }
    (t, (0..k).map(|_| rng.random_range(0.1..3.0)).collect())
}

/// Default rule or random positive constants, with equal odds.
pub fn random_a_rule(rng: &mut impl Rng, steps: usize) -> ARule {
    if steps > 1 && rng.random_bool(0.5) {
        ARule::Fixed((1..steps).map(|_| rng.random_range(0.05..20.0)).collect())
    } else {
        ARule::MaxLocation
    }
}

/// One random case: process, schedule, plan with a principal around the total withdrawn, and constants.
pub struct RandomCase {
    pub process: StableParams,
    pub schedule: Schedule,
    pub plan: WithdrawalPlan,
    pub a_rule: ARule,
}

pub fn random_case(rng: &mut impl Rng) -> RandomCase {
    let process = random_process(rng);
    let (t, c) = random_times_amounts(rng);
    let total: f64 = c.iter().sum();
    let a_rule = random_a_rule(rng, c.len());
    let principal = total * rng.random_range(0.3..1.5);
    RandomCase {
        process,
        schedule: Schedule::new(t.clone(), c.clone()).expect("valid schedule"),
        plan: WithdrawalPlan::new(principal, t, c).expect("valid plan"),
        a_rule,
    }
}

pub(crate) fn render(args: &OracleArgs, cli: &Cli, mut out: String) -> anyhow::Result<Rendered> {
    anyhow::ensure!(args.paths > 0, "--paths must be at least 1");
    let probe = match args.inflate {
        Some(f) => {
            anyhow::ensure!(f > 0.0, "--inflate must be positive");
            Probe::InflatedScale(f)
        }
        None => Probe::Exact,
    };
    let cases: Vec<RandomCase> = match args.random {
        Some(n) => {
            let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
            (0..n).map(|_| random_case(&mut rng)).collect()
        }
        None => vec![RandomCase {
            process: args.process.params()?,
            schedule: Schedule::dca(args.k)?,
            plan: WithdrawalPlan::equal(args.k, args.principal)?,
            a_rule: ARule::MaxLocation,
        }],
    };
    let checks = match args.check {
        Check::All => vec![
            Check::Domination,
            Check::StarDomination,
            Check::Duality,
            Check::Success,
            Check::Quantile,
            Check::Continuous,
        ],
        c => vec![c],
    };

    let mut violations = 0;
    for (i, case) in cases.iter().enumerate() {
        let sim = SimulationConfig::new(args.paths, cli.seed.wrapping_add(i as u64));
        out.push_str(&format!("# case={i} process={}\n", case.process));
        for check in &checks {
            let (text, v) = run_check(*check, case, probe, args.level, &sim)?;
            violations += v;
            out.push_str(&text);
            out.push_str("\n\n");
        }
    }
    out.push_str(&format!("total_violations={violations}\n"));
    Ok(Rendered {
        primary: out,
        violations,
        ..Default::default()
    })
}

fn run_check(check: Check, case: &RandomCase, probe: Probe, level: f64, sim: &SimulationConfig) -> anyhow::Result<(String, u64)> {
    let report = |r: OracleReport| {
        let v = r.violations;
        (r.to_string(), v)
    };
    Ok(match check {
        Check::Domination => report(check_domination(&case.process, &case.schedule, &case.a_rule, probe, sim)?),
        Check::StarDomination => report(check_star_domination(&case.process, &case.plan, &case.a_rule, probe, sim)?),
        Check::Duality => report(check_withdrawal_duality(&case.process, &case.plan, sim)?),
        Check::Success => report(estimate_success_prob(&case.process, &case.plan, sim)?),
        Check::Quantile => {
            let q = check_bound_quantile(&case.process, &case.schedule, &case.a_rule, level, sim)?;
            let ok = q.within(3.0);
            (
                format!(
                    "check=bound_quantile\nseed={}\nn_paths={}\nlevel={}\nanalytic_quantile={}\nempirical_cdf={}\nstandard_error={}\nviolations={}",
                    sim.seed,
                    sim.n_paths,
                    q.level,
                    q.analytic_quantile,
                    q.empirical_cdf,
                    q.standard_error,
                    u64::from(!ok)
                ),
                u64::from(!ok),
            )
        }
        Check::Continuous => {
            let c = check_continuous_dca(&case.process, &[0.01, 0.05, 0.25, 0.5], 256, &[16, 4, 1], sim)?;
            let ok = c.ordering_holds(3.0);
            let mut text = format!("check=continuous_ordering\nseed={}\nn_paths={}", sim.seed, sim.n_paths);
            for (steps, row) in c.steps.iter().zip(&c.empirical) {
                let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
                text.push_str(&format!("\nempirical_cdf_{steps}_steps={}", cells.join(",")));
            }
            let bound: Vec<String> = c.bound_cdf.iter().map(|v| v.to_string()).collect();
            text.push_str(&format!("\nbound_cdf={}\nviolations={}", bound.join(","), u64::from(!ok)));
            (text, u64::from(!ok))
        }
        Check::All => unreachable!("expanded by the caller"),
    })
}
