//! Monte Carlo oracle for the wealth and withdrawal bounds.
//!
//! Paths are generated in shards. Shard `i` draws from `ChaCha8Rng` seeded
//! with the run seed on stream `i`, so a run is reproducible from
//! `(seed, shard_size)` regardless of how shards are scheduled. Shard
//! results are merged in shard order.
//!
//! All recursions run on log factors `V_k = log X_k`. Heavy-tailed draws
//! routinely exceed the range of `exp`, and both the wealth and the bound
//! recursions stay finite in log space.

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numeric::ln_add_exp;
use crate::stable::StableParams;
use crate::wealth::{bound_general, ARule, BoundParams, Schedule};
use crate::withdrawal::{star_bound_general, success_prob_upper_bound, WithdrawalPlan};

/// Relative slack allowed when comparing a bound with the quantity it bounds.
pub const RELATIVE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimulationConfig {
    pub n_paths: u64,
    pub seed: u64,
    pub shard_size: u64,
}

impl SimulationConfig {
    pub fn new(n_paths: u64, seed: u64) -> Self {
        Self {
            n_paths,
            seed,
            shard_size: 4096,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n_paths == 0 {
            return Err(Error::invalid("n_paths must be at least 1"));
        }
        if self.shard_size == 0 {
            return Err(Error::invalid("shard_size must be at least 1"));
        }
        Ok(())
    }

    fn shards(&self) -> Vec<(u64, u64)> {
        let n = self.n_paths.div_ceil(self.shard_size);
        (0..n)
            .map(|i| (i, self.shard_size.min(self.n_paths - i * self.shard_size)))
            .collect()
    }

    fn shard_rng(&self, shard: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(shard);
        rng
    }
}

/// One sampled realization of the log factors over a time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct WealthPath {
    log_factors: Vec<f64>,
}

/// Remaining wealth after the last withdrawal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Remaining {
    Positive { ln_value: f64 },
    Zero,
    Negative,
}

impl Remaining {
    pub fn is_success(&self) -> bool {
        !matches!(self, Remaining::Negative)
    }
}

impl WealthPath {
    pub fn from_log_factors(log_factors: Vec<f64>) -> Self {
        Self { log_factors }
    }

    pub fn from_factors(factors: &[f64]) -> Result<Self> {
        if let Some(x) = factors.iter().find(|x| !(**x > 0.0)) {
            return Err(Error::invalid(format!("wealth factors must be positive, got {x}")));
        }
        Ok(Self {
            log_factors: factors.iter().map(|x| x.ln()).collect(),
        })
    }

    pub fn log_factors(&self) -> &[f64] {
        &self.log_factors
    }

    /// `X_k`; may be infinite for extreme draws.
    pub fn factors(&self) -> Vec<f64> {
        self.log_factors.iter().map(|v| v.exp()).collect()
    }

    pub fn len(&self) -> usize {
        self.log_factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.log_factors.is_empty()
    }

    fn check_len(&self, n: usize) -> Result<()> {
        if n != self.len() {
            return Err(Error::invalid(format!("path has {} steps, schedule has {n}", self.len())));
        }
        Ok(())
    }

    /// `Y_1 = c_0 X_1`, `Y_k = X_k (Y_{k-1} + c_{k-1})`, in linear space.
    pub fn wealth(&self, sched: &Schedule) -> Result<Vec<f64>> {
        self.check_len(sched.len())?;
        let mut y = 0.0;
        Ok(self
            .factors()
            .iter()
            .zip(sched.amounts())
            .map(|(x, c)| {
                y = x * (y + c);
                y
            })
            .collect())
    }

    /// `log Y_k`.
    pub fn ln_wealth(&self, sched: &Schedule) -> Result<Vec<f64>> {
        self.check_len(sched.len())?;
        Ok(ln_wealth_seq(&self.log_factors, sched.amounts()))
    }

    /// `R_k = Y_k / (c_0 + ... + c_{k-1})`.
    pub fn returns(&self, sched: &Schedule) -> Result<Vec<f64>> {
        let y = self.wealth(sched)?;
        Ok(y.iter().enumerate().map(|(i, y)| y / sched.invested_before(i + 1)).collect())
    }

    /// `log Z_k` of the lower-bound construction with constants `log a_1, ..., log a_{K-1}`.
    pub fn ln_bound(&self, sched: &Schedule, log_a: &[f64]) -> Result<Vec<f64>> {
        self.check_len(sched.len())?;
        ln_bound_seq(&self.log_factors, sched.amounts(), log_a)
    }

    /// `W_1 = P X_1 - w_1`, `W_k = W_{k-1} X_k - w_k`, in linear space.
    pub fn remaining(&self, plan: &WithdrawalPlan) -> Result<Vec<f64>> {
        self.check_len(plan.len())?;
        let mut w = plan.principal();
        Ok(self
            .factors()
            .iter()
            .zip(plan.amounts())
            .map(|(x, a)| {
                w = w * x - a;
                w
            })
            .collect())
    }

    /// Sign-exact terminal state of the withdrawal recursion.
    ///
    /// Negative wealth stays negative, so only the positive branch needs a value.
    pub fn terminal_remaining(&self, plan: &WithdrawalPlan) -> Result<Remaining> {
        self.check_len(plan.len())?;
        let mut state = if plan.principal() > 0.0 {
            Remaining::Positive {
                ln_value: plan.principal().ln(),
            }
        } else {
            Remaining::Zero
        };
        for (v, w) in self.log_factors.iter().zip(plan.amounts()) {
            state = match state {
                Remaining::Positive { ln_value } => {
                    let grown = ln_value + v;
                    let ln_w = w.ln();
                    if grown > ln_w {
                        Remaining::Positive {
                            ln_value: grown + (-(ln_w - grown).exp()).ln_1p(),
                        }
                    } else if grown == ln_w {
                        Remaining::Zero
                    } else {
                        Remaining::Negative
                    }
                }
                Remaining::Zero | Remaining::Negative => Remaining::Negative,
            };
        }
        Ok(state)
    }

    /// `log W*_{k-1}, ..., log W*_0`; the last entry is `log P*`.
    pub fn ln_required_chain(&self, plan: &WithdrawalPlan) -> Result<Vec<f64>> {
        self.check_len(plan.len())?;
        let (v, w) = reversed_mirror(&self.log_factors, plan.amounts());
        Ok(ln_wealth_seq(&v, &w))
    }

    /// `log P*`, the smallest principal for which this path funds every withdrawal.
    pub fn ln_required_principal(&self, plan: &WithdrawalPlan) -> Result<f64> {
        Ok(*self.ln_required_chain(plan)?.last().expect("nonempty plan"))
    }

    /// `log Z*_{k-1}, ..., log Z*_0` with constants `log a_1, ..., log a_{k-1}` in plan order.
    pub fn ln_star_bound(&self, plan: &WithdrawalPlan, log_a: &[f64]) -> Result<Vec<f64>> {
        self.check_len(plan.len())?;
        let (v, w) = reversed_mirror(&self.log_factors, plan.amounts());
        let reversed_a: Vec<f64> = log_a.iter().rev().copied().collect();
        ln_bound_seq(&v, &w, &reversed_a)
    }
}

/// Log factors `-V_k, ..., -V_1` and amounts `w_k, ..., w_1` of the backward recursion.
fn reversed_mirror(log_factors: &[f64], amounts: &[f64]) -> (Vec<f64>, Vec<f64>) {
    (
        log_factors.iter().rev().map(|v| -v).collect(),
        amounts.iter().rev().copied().collect(),
    )
}

fn ln_wealth_seq(log_factors: &[f64], amounts: &[f64]) -> Vec<f64> {
    let mut ln_y = f64::NEG_INFINITY;
    log_factors
        .iter()
        .zip(amounts)
        .map(|(v, c)| {
            ln_y = v + ln_add_exp(ln_y, c.ln());
            ln_y
        })
        .collect()
}

fn ln_bound_seq(log_factors: &[f64], amounts: &[f64], log_a: &[f64]) -> Result<Vec<f64>> {
    if log_a.len() + 1 != log_factors.len() {
        return Err(Error::invalid(format!(
            "{} steps need {} constants, got {}",
            log_factors.len(),
            log_factors.len() - 1,
            log_a.len()
        )));
    }
    let mut out = Vec::with_capacity(log_factors.len());
    let mut ln_z = log_factors[0] + amounts[0].ln();
    out.push(ln_z);
    for k in 1..log_factors.len() {
        let la = log_a[k - 1];
        let ln_sum = ln_add_exp(la, amounts[k].ln());
        let b = (la - ln_sum).exp();
        ln_z = log_factors[k] + ln_sum + b * (ln_z - la);
        out.push(ln_z);
    }
    Ok(out)
}

fn link_log_a(chain: &[BoundParams]) -> Vec<f64> {
    chain.iter().filter_map(|b| b.link.map(|l| l.log_a)).collect()
}

/// Draws log factors for a fixed grid of time increments.
#[derive(Debug, Clone)]
struct PathSampler {
    laws: Vec<StableParams>,
}

impl PathSampler {
    fn new(process: &StableParams, increments: &[f64]) -> Result<Self> {
        if increments.is_empty() {
            return Err(Error::invalid("path needs at least one step"));
        }
        Ok(Self {
            laws: increments.iter().map(|dt| process.increment(*dt)).collect::<Result<_>>()?,
        })
    }

    fn draw_into(&self, rng: &mut ChaCha8Rng, out: &mut Vec<f64>) {
        out.clear();
        out.extend(self.laws.iter().map(|law| law.sample(rng)));
    }
}

/// Sequential stream of paths in shard order; yields the same paths the parallel checks use.
pub struct PathStream {
    sampler: PathSampler,
    cfg: SimulationConfig,
    shard: u64,
    left_in_shard: u64,
    produced: u64,
    rng: ChaCha8Rng,
}

impl Iterator for PathStream {
    type Item = WealthPath;

    fn next(&mut self) -> Option<WealthPath> {
        if self.produced == self.cfg.n_paths {
            return None;
        }
        if self.left_in_shard == 0 {
            self.shard += 1;
            self.rng = self.cfg.shard_rng(self.shard);
            self.left_in_shard = self.cfg.shard_size;
        }
        let mut v = Vec::with_capacity(self.sampler.laws.len());
        self.sampler.draw_into(&mut self.rng, &mut v);
        self.left_in_shard -= 1;
        self.produced += 1;
        Some(WealthPath::from_log_factors(v))
    }
}

/// Independent wealth paths with `log X_k ~ S(alpha, beta, sigma dt^{1/alpha}, mu dt)`.
pub fn simulate_paths(process: &StableParams, increments: &[f64], cfg: &SimulationConfig) -> Result<PathStream> {
    cfg.validate()?;
    Ok(PathStream {
        sampler: PathSampler::new(process, increments)?,
        cfg: *cfg,
        shard: 0,
        left_in_shard: cfg.shard_size,
        produced: 0,
        rng: cfg.shard_rng(0),
    })
}

/// Parallel fold over shards, merged in shard order.
fn fold_paths<T, F, M>(sampler: &PathSampler, cfg: &SimulationConfig, init: T, per_path: F, merge: M) -> T
where
    T: Clone + Send + Sync,
    F: Fn(&mut T, &[f64]) + Sync,
    M: Fn(T, T) -> T,
{
    let parts: Vec<T> = cfg
        .shards()
        .into_par_iter()
        .map(|(shard, len)| {
            let mut rng = cfg.shard_rng(shard);
            let mut acc = init.clone();
            let mut v = Vec::with_capacity(sampler.laws.len());
            for _ in 0..len {
                sampler.draw_into(&mut rng, &mut v);
                per_path(&mut acc, &v);
            }
            acc
        })
        .collect();
    parts.into_iter().fold(init, merge)
}

/// Counts from one oracle run.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub check: String,
    pub seed: u64,
    pub n_paths: u64,
    /// Individual comparisons made (paths times steps for pathwise checks).
    pub n_checks: u64,
    pub violations: u64,
    /// Paths counted as successes, for probability estimates.
    pub successes: Option<u64>,
    pub analytic_bound: Option<f64>,
}

impl OracleReport {
    fn new(check: &str, seed: u64) -> Self {
        Self {
            check: check.to_string(),
            seed,
            n_paths: 0,
            n_checks: 0,
            violations: 0,
            successes: None,
            analytic_bound: None,
        }
    }

    /// Combine counts of two runs of the same check.
    pub fn merge(mut self, other: Self) -> Self {
        self.n_paths += other.n_paths;
        self.n_checks += other.n_checks;
        self.violations += other.violations;
        self.successes = match (self.successes, other.successes) {
            (Some(a), Some(b)) => Some(a + b),
            (a, b) => a.or(b),
        };
        self
    }

    pub fn empirical_prob(&self) -> Option<f64> {
        self.successes.map(|s| s as f64 / self.n_paths as f64)
    }

    /// Binomial standard error of [`Self::empirical_prob`].
    pub fn standard_error(&self) -> Option<f64> {
        self.empirical_prob()
            .map(|p| (p * (1.0 - p) / self.n_paths as f64).sqrt())
    }

    /// Empirical success rate does not exceed the analytic bound by more than `z` standard errors.
    pub fn ordering_holds(&self, z: f64) -> Option<bool> {
        let p = self.empirical_prob()?;
        Some(p <= self.analytic_bound? + z * self.standard_error()?)
    }
}

impl fmt::Display for OracleReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "check={}", self.check)?;
        writeln!(f, "seed={}", self.seed)?;
        writeln!(f, "n_paths={}", self.n_paths)?;
        writeln!(f, "n_checks={}", self.n_checks)?;
        write!(f, "violations={}", self.violations)?;
        if let (Some(p), Some(se)) = (self.empirical_prob(), self.standard_error()) {
            write!(f, "\nempirical_prob={p}\nstandard_error={se}")?;
        }
        if let Some(b) = self.analytic_bound {
            write!(f, "\nanalytic_bound={b}")?;
        }
        Ok(())
    }
}

/// How the recomputed bound is compared with the simulated quantity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Probe {
    /// The bound as constructed.
    Exact,
    /// Scale of the bound inflated by the given factor around its location; should be caught.
    InflatedScale(f64),
}

impl Probe {
    fn apply(&self, ln_z: f64, location: f64) -> f64 {
        match self {
            Probe::Exact => ln_z,
            Probe::InflatedScale(f) => location + f * (ln_z - location),
        }
    }
}

fn exceeds(ln_bound: f64, ln_value: f64) -> bool {
    ln_bound > ln_value + RELATIVE_TOLERANCE
}

/// Recompute `Z_k` on each path and count steps with `Z_k > Y_k (1 + 1e-12)`.
pub fn check_domination(
    process: &StableParams,
    sched: &Schedule,
    a_rule: &ARule,
    probe: Probe,
    cfg: &SimulationConfig,
) -> Result<OracleReport> {
    cfg.validate()?;
    let chain = bound_general(process, sched, a_rule)?;
    let log_a = link_log_a(&chain);
    let locations: Vec<f64> = chain.iter().map(|b| b.mu()).collect();
    let sampler = PathSampler::new(process, &sched.increments())?;
    let amounts = sched.amounts();
    let counts = fold_paths(
        &sampler,
        cfg,
        (0u64, 0u64),
        |acc, v| {
            let ln_y = ln_wealth_seq(v, amounts);
            let ln_z = ln_bound_seq(v, amounts, &log_a).expect("lengths checked");
            for k in 0..v.len() {
                acc.0 += 1;
                if exceeds(probe.apply(ln_z[k], locations[k]), ln_y[k]) {
                    acc.1 += 1;
                }
            }
        },
        |a, b| (a.0 + b.0, a.1 + b.1),
    );
    let mut report = OracleReport::new("domination", cfg.seed);
    report.n_paths = cfg.n_paths;
    report.n_checks = counts.0;
    report.violations = counts.1;
    Ok(report)
}

/// Recompute `Z*_0` on each path and count paths with `Z*_0 > P* (1 + 1e-12)`.
pub fn check_star_domination(
    process: &StableParams,
    plan: &WithdrawalPlan,
    a_rule: &ARule,
    probe: Probe,
    cfg: &SimulationConfig,
) -> Result<OracleReport> {
    cfg.validate()?;
    let sb = star_bound_general(process, plan, a_rule)?;
    // Constants in backward order, matching the mirrored sequences below.
    let log_a = link_log_a(&sb.chain);
    let location = sb.mu_0();
    let sampler = PathSampler::new(process, &plan.increments())?;
    let amounts = plan.amounts();
    let counts = fold_paths(
        &sampler,
        cfg,
        (0u64, 0u64),
        |acc, v| {
            let (mv, mw) = reversed_mirror(v, amounts);
            let ln_p = *ln_wealth_seq(&mv, &mw).last().expect("nonempty");
            let ln_z = *ln_bound_seq(&mv, &mw, &log_a).expect("lengths checked").last().expect("nonempty");
            acc.0 += 1;
            if exceeds(probe.apply(ln_z, location), ln_p) {
                acc.1 += 1;
            }
        },
        |a, b| (a.0 + b.0, a.1 + b.1),
    );
    let mut report = OracleReport::new("star_domination", cfg.seed);
    report.n_paths = cfg.n_paths;
    report.n_checks = counts.0;
    report.violations = counts.1;
    Ok(report)
}

/// Per path, `P* > P` must coincide with `W_k < 0`.
///
/// Paths with `log P*` within the relative tolerance of `log P` are not counted as violations.
pub fn check_withdrawal_duality(process: &StableParams, plan: &WithdrawalPlan, cfg: &SimulationConfig) -> Result<OracleReport> {
    cfg.validate()?;
    let sampler = PathSampler::new(process, &plan.increments())?;
    let ln_principal = plan.principal().ln();
    let counts = fold_paths(
        &sampler,
        cfg,
        (0u64, 0u64, 0u64),
        |acc, v| {
            let path = WealthPath::from_log_factors(v.to_vec());
            let ruined = !path.terminal_remaining(plan).expect("lengths match").is_success();
            let ln_p_star = path.ln_required_principal(plan).expect("lengths match");
            let needs_more = ln_p_star > ln_principal;
            acc.0 += 1;
            if !ruined {
                acc.2 += 1;
            }
            if ruined != needs_more && (ln_p_star - ln_principal).abs() > RELATIVE_TOLERANCE {
                acc.1 += 1;
            }
        },
        |a, b| (a.0 + b.0, a.1 + b.1, a.2 + b.2),
    );
    let mut report = OracleReport::new("withdrawal_duality", cfg.seed);
    report.n_paths = cfg.n_paths;
    report.n_checks = counts.0;
    report.violations = counts.1;
    report.successes = Some(counts.2);
    Ok(report)
}

/// Empirical `P(W_k >= 0)` together with the analytic upper bound.
///
/// A violation is recorded when the estimate exceeds the bound by more than
/// three standard errors.
pub fn estimate_success_prob(process: &StableParams, plan: &WithdrawalPlan, cfg: &SimulationConfig) -> Result<OracleReport> {
    cfg.validate()?;
    let sampler = PathSampler::new(process, &plan.increments())?;
    let successes = fold_paths(
        &sampler,
        cfg,
        0u64,
        |acc, v| {
            let path = WealthPath::from_log_factors(v.to_vec());
            if path.terminal_remaining(plan).expect("lengths match").is_success() {
                *acc += 1;
            }
        },
        |a, b| a + b,
    );
    let bound = if plan.principal() == 0.0 {
        0.0
    } else {
        let sb = star_bound_general(process, plan, &ARule::MaxLocation)?;
        success_prob_upper_bound(&sb, plan.principal())?
    };
    let mut report = OracleReport::new("success_probability", cfg.seed);
    report.n_paths = cfg.n_paths;
    report.n_checks = 1;
    report.successes = Some(successes);
    report.analytic_bound = Some(bound);
    report.violations = u64::from(!report.ordering_holds(3.0).unwrap_or(true));
    Ok(report)
}

/// Empirical CDF of the pathwise `log Z_k` at the analytic quantile of its law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantileCheck {
    pub level: f64,
    pub analytic_quantile: f64,
    pub empirical_cdf: f64,
    pub standard_error: f64,
}

impl QuantileCheck {
    pub fn within(&self, z: f64) -> bool {
        (self.empirical_cdf - self.level).abs() <= z * self.standard_error
    }
}

/// Compare the law of the final `log Z_K` with its simulated distribution at one level.
pub fn check_bound_quantile(
    process: &StableParams,
    sched: &Schedule,
    a_rule: &ARule,
    level: f64,
    cfg: &SimulationConfig,
) -> Result<QuantileCheck> {
    cfg.validate()?;
    let chain = bound_general(process, sched, a_rule)?;
    let law = chain.last().expect("nonempty").law;
    let x = law.quantile(level)?;
    let log_a = link_log_a(&chain);
    let sampler = PathSampler::new(process, &sched.increments())?;
    let amounts = sched.amounts();
    let below = fold_paths(
        &sampler,
        cfg,
        0u64,
        |acc, v| {
            let ln_z = ln_bound_seq(v, amounts, &log_a).expect("lengths checked");
            if *ln_z.last().expect("nonempty") <= x {
                *acc += 1;
            }
        },
        |a, b| a + b,
    );
    let n = cfg.n_paths as f64;
    Ok(QuantileCheck {
        level,
        analytic_quantile: x,
        empirical_cdf: below as f64 / n,
        standard_error: (level * (1.0 - level) / n).sqrt(),
    })
}

/// Empirical CDFs of continuous-investment wealth at probe points, per discretization.
#[derive(Debug, Clone, PartialEq)]
pub struct ContinuousCheck {
    /// Numbers of investment steps, coarse to fine.
    pub steps: Vec<usize>,
    pub probes: Vec<f64>,
    /// `P(log Z <= probe)` under the limit bound law.
    pub bound_cdf: Vec<f64>,
    /// `empirical[i][j]`: fraction of paths with log wealth `<= probes[j]` using `steps[i]` steps.
    pub empirical: Vec<Vec<f64>>,
    pub n_paths: u64,
}

impl ContinuousCheck {
    pub fn standard_error(&self, p: f64) -> f64 {
        (p * (1.0 - p) / self.n_paths as f64).sqrt().max(1.0 / self.n_paths as f64)
    }

    /// Every empirical CDF stays below the bound CDF within `z` standard errors.
    pub fn ordering_holds(&self, z: f64) -> bool {
        self.empirical.iter().all(|row| {
            row.iter()
                .zip(&self.bound_cdf)
                .all(|(e, b)| *e <= b + z * self.standard_error(*b))
        })
    }
}

/// Continuous investment of one unit over unit time, approximated by `fine_steps` equal
/// installments; coarser schedules reuse the same paths by aggregating adjacent increments.
pub fn check_continuous_dca(
    process: &StableParams,
    levels: &[f64],
    fine_steps: usize,
    coarsenings: &[usize],
    cfg: &SimulationConfig,
) -> Result<ContinuousCheck> {
    cfg.validate()?;
    if coarsenings.iter().any(|&f| f == 0 || !fine_steps.is_multiple_of(f)) {
        return Err(Error::invalid("coarsening factors must divide the fine step count"));
    }
    let bound = crate::wealth::bound_continuous(process)?;
    let probes: Vec<f64> = levels.iter().map(|&l| bound.law.quantile(l)).collect::<Result<_>>()?;
    let bound_cdf = levels.to_vec();
    let steps: Vec<usize> = coarsenings.iter().map(|f| fine_steps / f).collect();
    let sampler = PathSampler::new(process, &vec![1.0 / fine_steps as f64; fine_steps])?;
    let n_probe = probes.len();
    let counts = fold_paths(
        &sampler,
        cfg,
        vec![0u64; steps.len() * n_probe],
        |acc, v| {
            for (i, (&n, &f)) in steps.iter().zip(coarsenings).enumerate() {
                let ln_c = -(n as f64).ln();
                let mut ln_y = f64::NEG_INFINITY;
                for block in v.chunks(f) {
                    ln_y = block.iter().sum::<f64>() + ln_add_exp(ln_y, ln_c);
                }
                for (j, p) in probes.iter().enumerate() {
                    if ln_y <= *p {
                        acc[i * n_probe + j] += 1;
                    }
                }
            }
        },
        |mut a, b| {
            a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
            a
        },
    );
    let n = cfg.n_paths as f64;
    let empirical = (0..steps.len())
        .map(|i| (0..n_probe).map(|j| counts[i * n_probe + j] as f64 / n).collect())
        .collect();
    Ok(ContinuousCheck {
        steps,
        probes,
        bound_cdf,
        empirical,
        n_paths: cfg.n_paths,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sp(a: f64, b: f64, s: f64, m: f64) -> StableParams {
        StableParams::new(a, b, s, m).unwrap()
    }

    #[test]
    fn stream_matches_shard_layout() {
        let p = sp(1.7, 0.2, 0.3, 0.01);
        let cfg = SimulationConfig {
            n_paths: 10,
            seed: 9,
            shard_size: 4,
        };
        let paths: Vec<_> = simulate_paths(&p, &[1.0, 0.5], &cfg).unwrap().collect();
        assert_eq!(paths.len(), 10);
        let mut rng = cfg.shard_rng(2);
        let law = p.increment(1.0).unwrap();
        assert_eq!(paths[8].log_factors()[0], law.sample(&mut rng));
        assert!(simulate_paths(&p, &[1.0], &SimulationConfig::new(0, 1)).is_err());
    }

    #[test]
    fn single_step_bound_is_wealth() {
        let sched = Schedule::new(vec![0.0, 2.0], vec![3.0]).unwrap();
        let path = WealthPath::from_factors(&[1.7]).unwrap();
        let ln_y = path.ln_wealth(&sched).unwrap();
        assert_eq!(path.ln_bound(&sched, &[]).unwrap(), ln_y);
        assert!((ln_y[0] - (3.0f64 * 1.7).ln()).abs() < 1e-15);
    }

    #[test]
    fn single_withdrawal_duality() {
        let plan = WithdrawalPlan::new(1.0, vec![0.0, 1.0], vec![2.0]).unwrap();
        let path = WealthPath::from_factors(&[2.0]).unwrap();
        assert_eq!(path.ln_required_principal(&plan).unwrap(), 0.0);
        assert_eq!(path.remaining(&plan).unwrap(), vec![0.0]);
        assert_eq!(path.terminal_remaining(&plan).unwrap(), Remaining::Zero);
        assert!(path.terminal_remaining(&plan).unwrap().is_success());
        let poorer = plan.with_principal(0.99).unwrap();
        assert_eq!(path.terminal_remaining(&poorer).unwrap(), Remaining::Negative);
    }

    #[test]
    fn ruin_is_absorbing() {
        let plan = WithdrawalPlan::equal(3, 1.0).unwrap();
        let path = WealthPath::from_factors(&[0.5, 100.0, 100.0]).unwrap();
        assert_eq!(path.terminal_remaining(&plan).unwrap(), Remaining::Negative);
        assert!(path.remaining(&plan).unwrap()[2] < 0.0);
    }

    #[test]
    fn report_text_fields() {
        let mut r = OracleReport::new("success_probability", 5);
        r.n_paths = 4;
        r.successes = Some(3);
        r.analytic_bound = Some(0.9);
        let text = r.to_string();
        assert!(text.contains("check=success_probability"));
        assert!(text.contains("empirical_prob=0.75"));
        assert!(text.contains("analytic_bound=0.9"));
    }
}
