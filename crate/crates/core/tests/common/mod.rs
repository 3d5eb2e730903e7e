//! Independent reference routines shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;

/// Distribution function of `S(alpha, beta, 1, 0)` by direct Fourier inversion
/// of the characteristic function (Gil-Pelaez), composite Simpson in
/// `u = theta^(1/4)`. Independent of the library's integral representation.
pub fn gil_pelaez_cdf(alpha: f64, beta: f64, z: f64) -> f64 {
    let theta_max = 45f64.powf(1.0 / alpha);
    let u_max = theta_max.powf(0.25);
    let n = 200_000usize;
    let h = u_max / n as f64;
    let skew = (PI * alpha / 2.0).tan();
    let f = |u: f64| -> f64 {
        if u == 0.0 {
            return 0.0;
        }
        let t = u.powi(4);
        let phase = if alpha == 1.0 {
            -t * z - t * beta * 2.0 / PI * t.ln()
        } else {
            -t * z + t.powf(alpha) * beta * skew
        };
        (-t.powf(alpha)).exp() * phase.sin() * 4.0 / u
    };
    let mut acc = f(0.0) + f(u_max);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(i as f64 * h);
    }
    0.5 - acc * h / 3.0 / PI
}

/// Kolmogorov-Smirnov statistic of a sample against a continuous CDF.
///
/// The CDF is evaluated exactly at every `stride`-th order statistic; between
/// those knots monotonicity brackets `F`, so the returned value is an upper
/// bound on the exact statistic (tight to the knot spacing).
pub fn ks_statistic_upper<F: FnMut(f64) -> f64>(sample: &mut [f64], stride: usize, mut cdf: F) -> f64 {
    sample.sort_by(f64::total_cmp);
    let n = sample.len();
    let nf = n as f64;
    let mut knots: Vec<usize> = (0..n).step_by(stride).collect();
    if *knots.last().unwrap() != n - 1 {
        knots.push(n - 1);
    }
    let values: Vec<f64> = knots.iter().map(|&i| cdf(sample[i])).collect();
    let mut d: f64 = 0.0;
    // before the first knot
    d = d.max(values[0]);
    for w in 0..knots.len() {
        let i = knots[w];
        // exact at knot
        d = d.max((i as f64 + 1.0) / nf - values[w]).max(values[w] - i as f64 / nf);
        if w + 1 < knots.len() {
            let j = knots[w + 1];
            // points strictly between i and j: F in [values[w], values[w+1]]
            if j > i + 1 {
                d = d.max(j as f64 / nf - values[w]).max(values[w + 1] - (i as f64 + 1.0) / nf);
            }
        }
    }
    d
}

/// Critical value of the two-sided KS test at significance 0.01.
pub fn ks_critical_01(n: usize) -> f64 {
    (-(0.005f64).ln() / 2.0).sqrt() / (n as f64).sqrt()
}
