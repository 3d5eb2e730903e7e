mod common;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stablewealth::oracle::{
    check_bound_quantile, check_continuous_dca, check_domination, check_star_domination, check_withdrawal_duality,
    estimate_success_prob, simulate_paths, Probe, SimulationConfig,
};
use stablewealth::wealth::{ARule, Schedule};
use stablewealth::withdrawal::WithdrawalPlan;
use stablewealth::StableParams;
use statrs::distribution::{ContinuousCDF, Normal};

/// Random process with alpha in (1, 2], |mu| in [.01, .5].
fn random_process(rng: &mut impl Rng) -> StableParams {
    let mu = rng.random_range(0.01..0.5) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
    StableParams::new(
        rng.random_range(1.01..=2.0),
        rng.random_range(-1.0..=1.0),
        rng.random_range(0.02..0.5),
        mu,
    )
    .unwrap()
}

fn random_grid(rng: &mut impl Rng, k: usize) -> (Vec<f64>, Vec<f64>) {
    let mut t = vec![0.0];
    for _ in 0..k {
        let last = *t.last().unwrap();
        t.push(last + rng.random_range(0.1..2.0));
    }
    let amounts = (0..k).map(|_| rng.random_range(0.1..3.0)).collect();
    (t, amounts)
}

fn random_a_rule(rng: &mut impl Rng, k: usize) -> ARule {
    if k > 1 && rng.random_bool(0.5) {
        ARule::Fixed((1..k).map(|_| rng.random_range(0.05..20.0)).collect())
    } else {
        ARule::MaxLocation
    }
}

#[test]
fn bound_dominates_wealth_on_random_schedules() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for case in 0..16u64 {
        let p = random_process(&mut rng);
        let k = rng.random_range(1..=25);
        let (t, c) = random_grid(&mut rng, k);
        let sched = Schedule::new(t, c).unwrap();
        let rule = random_a_rule(&mut rng, k);
        let r = check_domination(&p, &sched, &rule, Probe::Exact, &SimulationConfig::new(20_000, case)).unwrap();
        assert_eq!(r.violations, 0, "case {case}: {p} k={k} {rule:?}");
        assert_eq!(r.n_checks, 20_000 * k as u64);
    }
}

#[test]
fn inflated_bound_is_caught() {
    let p = StableParams::new(1.89, 1.0, 0.110, 0.0658).unwrap();
    let cfg = SimulationConfig::new(20_000, 3);
    let sched = Schedule::dca(10).unwrap();
    let r = check_domination(&p, &sched, &ARule::MaxLocation, Probe::InflatedScale(1.01), &cfg).unwrap();
    assert!(r.violations > 0);
    let plan = WithdrawalPlan::equal(10, 10.0).unwrap();
    let r = check_star_domination(&p, &plan, &ARule::MaxLocation, Probe::InflatedScale(1.01), &cfg).unwrap();
    assert!(r.violations > 0);
}

#[test]
fn star_bound_dominated_by_required_principal() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for case in 0..16u64 {
        let p = random_process(&mut rng);
        let k = rng.random_range(1..=25);
        let (t, w) = random_grid(&mut rng, k);
        let plan = WithdrawalPlan::new(5.0, t, w).unwrap();
        let rule = random_a_rule(&mut rng, k);
        let r = check_star_domination(&p, &plan, &rule, Probe::Exact, &SimulationConfig::new(20_000, case)).unwrap();
        assert_eq!(r.violations, 0, "case {case}: {p} k={k} {rule:?}");
    }
}

#[test]
fn ruin_iff_principal_short() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for case in 0..10u64 {
        let p = random_process(&mut rng);
        let k = rng.random_range(1..=30);
        let (t, w) = random_grid(&mut rng, k);
        let total: f64 = w.iter().sum();
        let plan = WithdrawalPlan::new(total * rng.random_range(0.2..2.0), t, w).unwrap();
        let r = check_withdrawal_duality(&p, &plan, &SimulationConfig::new(10_000, case)).unwrap();
        assert_eq!(r.violations, 0, "case {case}");
    }
}

#[test]
fn success_rate_below_analytic_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for case in 0..8u64 {
        let p = random_process(&mut rng);
        let k = rng.random_range(1..=20);
        let plan = WithdrawalPlan::equal(k, k as f64 * rng.random_range(0.3..1.5)).unwrap();
        let r = estimate_success_prob(&p, &plan, &SimulationConfig::new(20_000, case)).unwrap();
        assert_eq!(r.ordering_holds(3.0), Some(true), "case {case}: {r}");
    }
    let index = StableParams::new(1.89, 1.0, 0.110, 0.0658).unwrap();
    let r = estimate_success_prob(&index, &WithdrawalPlan::equal(10, 10.0).unwrap(), &SimulationConfig::new(200_000, 7))
        .unwrap();
    assert_eq!(r.violations, 0, "{r}");
}

#[test]
fn success_probability_extremes() {
    let p = StableParams::new(1.89, 1.0, 0.110, 0.0658).unwrap();
    let rich = WithdrawalPlan::equal(2, 2e6).unwrap();
    let r = estimate_success_prob(&p, &rich, &SimulationConfig::new(10_000, 1)).unwrap();
    assert!(r.empirical_prob().unwrap() > 0.999);
    assert!(r.analytic_bound.unwrap() > 0.999);
    let broke = WithdrawalPlan::equal(3, 0.0).unwrap();
    let r = estimate_success_prob(&p, &broke, &SimulationConfig::new(10_000, 1)).unwrap();
    assert_eq!(r.empirical_prob(), Some(0.0));
    assert_eq!(r.analytic_bound, Some(0.0));
}

#[test]
fn reports_are_seed_deterministic() {
    let p = StableParams::new(1.5, -0.3, 0.3, 0.05).unwrap();
    let plan = WithdrawalPlan::equal(8, 7.0).unwrap();
    let mut cfg = SimulationConfig::new(30_000, 99);
    let a = estimate_success_prob(&p, &plan, &cfg).unwrap();
    let b = estimate_success_prob(&p, &plan, &cfg).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.to_string(), b.to_string());
    // Thread scheduling does not affect results.
    let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let c = single.install(|| estimate_success_prob(&p, &plan, &cfg).unwrap());
    assert_eq!(a, c);
    cfg.seed = 100;
    assert_ne!(a.successes, estimate_success_prob(&p, &plan, &cfg).unwrap().successes);
}

#[test]
fn stream_replays_exactly() {
    let p = StableParams::new(1.7, 0.5, 0.2, 0.03).unwrap();
    let sched = Schedule::dca(12).unwrap();
    let cfg = SimulationConfig { shard_size: 7, ..SimulationConfig::new(50, 5) };
    let a: Vec<_> = simulate_paths(&p, &sched.increments(), &cfg).unwrap().collect();
    let b: Vec<_> = simulate_paths(&p, &sched.increments(), &cfg).unwrap().collect();
    assert_eq!(a.len(), 50);
    assert_eq!(a, b);
    for path in &a {
        let y = path.wealth(&sched).unwrap();
        // Linear recursion against the stored factors, bit for bit.
        let mut prev = 0.0;
        for (k, x) in path.factors().iter().enumerate() {
            prev = x * (prev + sched.amounts()[k]);
            assert_eq!(prev, y[k]);
        }
        let ln_y = path.ln_wealth(&sched).unwrap();
        assert!(y.iter().zip(&ln_y).all(|(y, l)| (y.ln() - l).abs() < 1e-12));
    }
}

#[test]
fn near_deterministic_paths() {
    let p = StableParams::new(1.6, 0.2, 1e-12, 0.07).unwrap();
    let sched = Schedule::new(vec![0.0, 1.0, 1.5, 3.0, 4.0], vec![1.0, 2.0, 0.5, 1.5]).unwrap();
    let expected: f64 = (0..4).map(|j| sched.amounts()[j] * (0.07 * (4.0 - sched.times()[j])).exp()).sum();
    for path in simulate_paths(&p, &sched.increments(), &SimulationConfig::new(100, 2)).unwrap() {
        let y = *path.wealth(&sched).unwrap().last().unwrap();
        assert!((y - expected).abs() < 1e-6);
    }
}

#[test]
fn gaussian_first_step_distribution() {
    let p = StableParams::new(2.0, 0.0, 0.15, 0.06).unwrap();
    let c0 = 3.0;
    let sched = Schedule::new(vec![0.0, 1.0], vec![c0]).unwrap();
    let mut sample: Vec<f64> = simulate_paths(&p, &sched.increments(), &SimulationConfig::new(200_000, 4))
        .unwrap()
        .map(|path| path.ln_wealth(&sched).unwrap()[0])
        .collect();
    let normal = Normal::new(0.06 + c0.ln(), 0.15 * 2f64.sqrt()).unwrap();
    let d = common::ks_statistic_upper(&mut sample, 1, |x| normal.cdf(x));
    assert!(d < common::ks_critical_01(200_000), "D = {d}");
}

#[test]
fn bound_law_matches_pathwise_bound() {
    let p = StableParams::new(1.89, 1.0, 0.110, 0.0658).unwrap();
    let sched = Schedule::dca(12).unwrap();
    for level in [0.05, 0.5, 0.95] {
        let q = check_bound_quantile(&p, &sched, &ARule::MaxLocation, level, &SimulationConfig::new(200_000, 8)).unwrap();
        assert!(q.within(3.0), "{q:?}");
    }
}

#[test]
fn continuous_investment_ordering() {
    let p = StableParams::new(1.7, 0.0, 0.2, 0.1).unwrap();
    let levels = [0.01, 0.05, 0.25, 0.5, 0.75];
    let check = check_continuous_dca(&p, &levels, 256, &[16, 4, 1], &SimulationConfig::new(50_000, 9)).unwrap();
    assert_eq!(check.steps, vec![16, 64, 256]);
    assert!(check.ordering_holds(3.0), "{check:?}");
    // Refinement settles: the two finest schedules agree closely at every probe.
    let (a, b) = (&check.empirical[1], &check.empirical[2]);
    assert!(a.iter().zip(b).all(|(x, y)| (x - y).abs() < 0.01), "{check:?}");
}

#[test]
fn zero_paths_rejected() {
    let p = StableParams::new(1.5, 0.0, 0.2, 0.1).unwrap();
    assert!(simulate_paths(&p, &[1.0], &SimulationConfig::new(0, 1)).is_err());
}
