/*!
Numerical integration on finite intervals.

Two schemes are provided:

* [`romberg`]: trapezoid refinement with Richardson extrapolation. Used for
  the smooth integrands on `[0, 1]` that define the continuous-investment
  scale parameter.
* [`adaptive_gk15`]: globally adaptive Gauss-Kronrod (7/15 point) with
  bisection of the worst interval. Used by the stable distribution engine,
  whose integrands are monotone or unimodal but can be sharply peaked.

Both report failure explicitly instead of returning an unconverged value.
*/

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct RombergConfig {
    /// Maximum number of interval halvings.
    pub max_depth: usize,
    /// Absolute tolerance on successive diagonal entries.
    pub tol: f64,
    /// Halvings always performed before convergence is tested.
    pub min_depth: usize,
}

impl Default for RombergConfig {
    fn default() -> Self {
        Self {
            max_depth: 20,
            tol: 1e-12,
            min_depth: 5,
        }
    }
}

/// Romberg integration of `f` over `[a, b]`.
///
/// The tableau row `R(n, m)` is kept in a single vector; `R(n, n)` is the
/// estimate at depth `n` and `|R(n, n) - R(n-1, n-1)|` the error estimate.
pub fn romberg<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, cfg: &RombergConfig) -> Result<QuadResult> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::invalid("romberg: bounds must be finite"));
    }
    let width = b - a;
    let mut prev_row = vec![0.5 * width * (f(a) + f(b))];
    let mut evaluations = 2;
    let mut last_err = f64::INFINITY;
    for n in 1..=cfg.max_depth {
        let h = width / (1u64 << n) as f64;
        let mut mid_sum = 0.0;
        for k in 1..=(1u64 << (n - 1)) {
            mid_sum += f(a + (2 * k - 1) as f64 * h);
        }
        evaluations += 1 << (n - 1);
        let mut row = Vec::with_capacity(n + 1);
        row.push(0.5 * prev_row[0] + h * mid_sum);
        let mut factor = 1.0;
        for m in 1..=n {
            factor *= 4.0;
            let extrapolated = row[m - 1] + (row[m - 1] - prev_row[m - 1]) / (factor - 1.0);
            row.push(extrapolated);
        }
        last_err = (row[n] - prev_row[n - 1]).abs();
        if !row[n].is_finite() {
            return Err(Error::no_convergence("romberg", "non-finite integrand value"));
        }
        if n >= cfg.min_depth && last_err <= cfg.tol {
            return Ok(QuadResult {
                value: row[n],
                error_estimate: last_err,
                evaluations,
            });
        }
        prev_row = row;
    }
    Err(Error::no_convergence(
        "romberg",
        format!("error estimate {last_err:.3e} above {:.1e} at depth {}", cfg.tol, cfg.max_depth),
    ))
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    Segment {
        a,
        b,
        value: kronrod * half,
        error: ((kronrod - gauss) * half).abs(),
    }
}

#[derive(Debug, Clone, Copy)]
pub struct AdaptiveConfig {
    /// Absolute tolerance on the total integral.
    pub abs_tol: f64,
    /// Maximum number of subintervals before giving up.
    pub max_segments: usize,
}

impl Default for AdaptiveConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            max_segments: 2000,
        }
    }
}

/// Globally adaptive 15-point Gauss-Kronrod integration over `[a, b]`.
///
/// `breakpoints` strictly inside `(a, b)` seed the initial partition; place
/// them where the integrand changes rapidly.
pub fn adaptive_gk15<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    cfg: &AdaptiveConfig,
) -> Result<QuadResult> {
    if a == b {
        return Ok(QuadResult {
            value: 0.0,
            error_estimate: 0.0,
            evaluations: 0,
        });
    }
    let mut edges = vec![a];
    edges.extend(breakpoints.iter().copied().filter(|&x| x > a && x < b));
    edges.push(b);
    let mut segments: Vec<Segment> = edges.windows(2).map(|w| gk15(&f, w[0], w[1])).collect();
    let mut evaluations = 15 * segments.len();
    loop {
        let total_err: f64 = segments.iter().map(|s| s.error).sum();
        if total_err <= cfg.abs_tol {
            break;
        }
        if segments.len() >= cfg.max_segments {
            return Err(Error::no_convergence(
                "adaptive Gauss-Kronrod",
                format!("error estimate {total_err:.3e} after {} segments", segments.len()),
            ));
        }
        let (worst, _) = segments
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .expect("non-empty partition");
        let seg = segments.swap_remove(worst);
        let mid = 0.5 * (seg.a + seg.b);
        if mid <= seg.a || mid >= seg.b {
            return Err(Error::no_convergence(
                "adaptive Gauss-Kronrod",
                format!("interval [{}, {}] cannot be bisected further", seg.a, seg.b),
            ));
        }
        segments.push(gk15(&f, seg.a, mid));
        segments.push(gk15(&f, mid, seg.b));
        evaluations += 30;
    }
    let value = segments.iter().map(|s| s.value).sum::<f64>();
    if !value.is_finite() {
        return Err(Error::no_convergence("adaptive Gauss-Kronrod", "non-finite integral"));
    }
    Ok(QuadResult {
        value,
        error_estimate: segments.iter().map(|s| s.error).sum(),
        evaluations,
    })
}
