//! Annual index data: ingestion, inflation-adjusted total returns, stable fitting
//! and quantile-quantile diagnostics.
//!
//! Input files are UTF-8 CSV with header `year,I,D,C`: index level, dividend per
//! share and consumer price index. Errors carry the file line they refer to.

use std::f64::consts::PI;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::planner::least_squares;
use crate::stable::StableParams;

pub const HEADER: [&str; 4] = ["year", "I", "D", "C"];

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
pub struct RawRow {
    pub year: i32,
    #[serde(rename = "I")]
    pub index: f64,
    #[serde(rename = "D")]
    pub dividend: f64,
    #[serde(rename = "C")]
    pub cpi: f64,
}

/// Consecutive years of index, dividend and price-level observations.
#[derive(Debug, Clone, PartialEq)]
pub struct RawSeries {
    rows: Vec<RawRow>,
}

impl RawSeries {
    /// Validates the same constraints as [`load_csv`]; row numbers count from 1.
    pub fn new(rows: Vec<RawRow>) -> Result<Self> {
        for (i, row) in rows.iter().enumerate() {
            if let Err(message) = check_row(row, i.checked_sub(1).map(|j| &rows[j])) {
                return Err(Error::Validation {
                    path: PathBuf::from("<memory>"),
                    row: i + 1,
                    message,
                });
            }
        }
        Ok(Self { rows })
    }

    pub fn rows(&self) -> &[RawRow] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

fn check_row(row: &RawRow, prev: Option<&RawRow>) -> std::result::Result<(), String> {
    if !(row.index.is_finite() && row.index > 0.0) {
        return Err(format!("index level I must be positive, got {}", row.index));
    }
    if !(row.dividend.is_finite() && row.dividend >= 0.0) {
        return Err(format!("dividend D must be nonnegative, got {}", row.dividend));
    }
    if !(row.cpi.is_finite() && row.cpi > 0.0) {
        return Err(format!("price index C must be positive, got {}", row.cpi));
    }
    if let Some(p) = prev {
        if row.year != p.year + 1 {
            return Err(format!("year {} does not follow {} (gaps and reordering are rejected)", row.year, p.year));
        }
    }
    Ok(())
}

pub fn load_csv(path: impl AsRef<Path>) -> Result<RawSeries> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    read_csv(file, path)
}

/// Parse `year,I,D,C` records; `path` only labels errors.
pub fn read_csv<R: Read>(reader: R, path: &Path) -> Result<RawSeries> {
    let schema = |row: usize, message: String| Error::Schema {
        path: path.to_path_buf(),
        row,
        message,
    };
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers().map_err(|e| schema(1, e.to_string()))?.clone();
    if headers.iter().ne(HEADER) {
        return Err(schema(1, format!("expected header {}, got {}", HEADER.join(","), headers.iter().collect::<Vec<_>>().join(","))));
    }
    let mut rows: Vec<RawRow> = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            schema(line, e.to_string())
        })?;
        let line = record.position().map_or(rows.len() + 2, |p| p.line() as usize);
        let row: RawRow = record.deserialize(Some(&headers)).map_err(|e| schema(line, e.to_string()))?;
        check_row(&row, rows.last()).map_err(|message| Error::Validation {
            path: path.to_path_buf(),
            row: line,
            message,
        })?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(schema(2, "no data rows".into()));
    }
    Ok(RawSeries { rows })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReturnRow {
    pub year: i32,
    pub gross: f64,
    pub log: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReturnSeries {
    pub rows: Vec<ReturnRow>,
}

impl ReturnSeries {
    pub fn log_returns(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.log).collect()
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// `year,gross,log`.
    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["year", "gross", "log"])?;
        for r in &self.rows {
            w.write_record([r.year.to_string(), r.gross.to_string(), r.log.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Real total return for year `n`: `(I_{n+1} + D_n) / I_n * C_n / C_{n+1}`.
pub fn to_returns(raw: &RawSeries) -> Result<ReturnSeries> {
    if raw.len() < 2 {
        return Err(Error::invalid(format!("need at least two years of data, got {}", raw.len())));
    }
    let rows = raw
        .rows
        .windows(2)
        .map(|w| {
            let (a, b) = (&w[0], &w[1]);
            let log = (b.index + a.dividend).ln() - a.index.ln() + a.cpi.ln() - b.cpi.ln();
            ReturnRow {
                year: a.year,
                gross: (b.index + a.dividend) / a.index * (a.cpi / b.cpi),
                log,
            }
        })
        .collect();
    Ok(ReturnSeries { rows })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitMethod {
    /// Regression on the empirical characteristic function, re-standardizing each round.
    IterativeKoutrouvelis,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitConfig {
    /// Stop once no parameter moves by more than this.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self { tol: 1e-4, max_iter: 20 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub params: StableParams,
    pub method: FitMethod,
    pub iterations: usize,
    /// Fewer than 30 observations; the regression grids are tuned for larger samples.
    pub small_sample: bool,
}

/// The starting estimate used for the annual index returns.
pub fn index_initial_estimate() -> StableParams {
    StableParams::new(1.91, 1.0, 0.115, 0.0658).expect("valid constants")
}

// Koutrouvelis' grid sizes: rows follow the shape grid, columns n = 200, 800, 1600.
const K_ALPHAS: [f64; 8] = [1.9, 1.5, 1.3, 1.1, 0.9, 0.7, 0.5, 0.3];
const K_POINTS: [[usize; 3]; 8] = [
    [9, 9, 9],
    [11, 11, 11],
    [22, 16, 14],
    [24, 18, 15],
    [28, 22, 18],
    [30, 24, 20],
    [86, 68, 56],
    [134, 124, 118],
];
const L_ALPHAS: [f64; 7] = [1.9, 1.5, 1.1, 0.9, 0.7, 0.5, 0.3];
const L_POINTS: [[usize; 3]; 7] = [
    [9, 10, 11],
    [12, 14, 15],
    [16, 18, 17],
    [14, 14, 14],
    [24, 16, 16],
    [40, 38, 36],
    [70, 68, 66],
];

fn grid_size<const N: usize>(alphas: &[f64; N], table: &[[usize; 3]; N], alpha: f64, n: usize) -> usize {
    let row = (0..N)
        .min_by(|&i, &j| (alphas[i] - alpha).abs().total_cmp(&(alphas[j] - alpha).abs()))
        .expect("nonempty table");
    let col = match n {
        0..=499 => 0,
        500..=1199 => 1,
        _ => 2,
    };
    table[row][col]
}

fn ecf(sample: &[f64], t: f64) -> Complex64 {
    let (re, im) = sample
        .iter()
        .fold((0.0, 0.0), |(re, im), x| {
            let (s, c) = (t * x).sin_cos();
            (re + c, im + s)
        });
    let n = sample.len() as f64;
    Complex64::new(re / n, im / n)
}

/// One regression round on a sample standardized by the current scale and location.
fn koutrouvelis_step(z: &[f64], alpha_prev: f64) -> Result<StableParams> {
    let n = z.len();

    // log(-log|phi(t)|^2) = log(2 sigma^alpha) + alpha log t
    let k = grid_size(&K_ALPHAS, &K_POINTS, alpha_prev, n);
    let pts: Vec<(f64, f64)> = (1..=k)
        .filter_map(|j| {
            let t = PI * j as f64 / 25.0;
            let m2 = ecf(z, t).norm_sqr();
            (m2 > 0.0 && m2 < 1.0).then(|| (t.ln(), (-m2.ln()).ln()))
        })
        .collect();
    if pts.len() < 3 {
        return Err(Error::no_convergence("koutrouvelis", "too few usable frequencies for the shape regression"));
    }
    let design = DMatrix::from_fn(pts.len(), 2, |i, j| if j == 0 { 1.0 } else { pts[i].0 });
    let coef = least_squares(&design, &DVector::from_iterator(pts.len(), pts.iter().map(|p| p.1)))?;
    let alpha = coef[1].clamp(0.1, 2.0);
    let sigma = (coef[0].exp() / 2.0).powf(1.0 / alpha);

    // arg phi(u) = mu u + beta sigma^alpha tan(pi alpha / 2) |u|^alpha  (u > 0)
    let l = grid_size(&L_ALPHAS, &L_POINTS, alpha, n);
    let mut phase = 0.0;
    let mut prev = 0.0;
    let pts: Vec<(f64, f64)> = (1..=l)
        .map(|j| {
            let u = PI * j as f64 / 50.0;
            let arg = ecf(z, u).arg();
            // unwrap across the grid
            let mut d = arg - prev;
            d -= 2.0 * PI * (d / (2.0 * PI)).round();
            phase += d;
            prev = arg;
            (u, phase)
        })
        .collect();
    let skew_weight = sigma.powf(alpha) * (PI * alpha / 2.0).tan();
    let rhs = DVector::from_iterator(pts.len(), pts.iter().map(|p| p.1));
    let (mu, beta) = if skew_weight.abs() < 1e-6 {
        // Skewness is not identifiable at the Gaussian limit.
        let design = DMatrix::from_fn(pts.len(), 1, |i, _| pts[i].0);
        (least_squares(&design, &rhs)?[0], 0.0)
    } else {
        let design = DMatrix::from_fn(pts.len(), 2, |i, j| if j == 0 { pts[i].0 } else { skew_weight * pts[i].0.powf(alpha) });
        let c = least_squares(&design, &rhs)?;
        (c[0], c[1].clamp(-1.0, 1.0))
    };
    StableParams::new(alpha, beta, sigma, mu)
}

/// Iterative Koutrouvelis fit starting from `init`.
///
/// Each round standardizes the sample with the current scale and location and
/// regresses the empirical characteristic function on Koutrouvelis' grids.
/// Stops when no parameter moves by more than `cfg.tol`; otherwise reports
/// [`Error::FitNotConverged`] with the last iterate.
pub fn fit_stable(sample: &[f64], init: &StableParams, cfg: &FitConfig) -> Result<FitResult> {
    if sample.len() < 10 {
        return Err(Error::invalid(format!("need at least 10 observations to fit, got {}", sample.len())));
    }
    if sample.iter().any(|x| !x.is_finite()) {
        return Err(Error::invalid("sample contains non-finite values"));
    }
    let mut cur = *init;
    for iteration in 1..=cfg.max_iter {
        let (s0, m0) = (cur.sigma(), cur.mu());
        let z: Vec<f64> = sample.iter().map(|x| (x - m0) / s0).collect();
        let next = koutrouvelis_step(&z, cur.alpha())?.affine(s0, m0)?;
        let change = [
            next.alpha() - cur.alpha(),
            next.beta() - cur.beta(),
            next.sigma() - cur.sigma(),
            next.mu() - cur.mu(),
        ]
        .iter()
        .fold(0.0f64, |m, d| m.max(d.abs()));
        cur = next;
        if change < cfg.tol {
            return Ok(FitResult {
                params: cur,
                method: FitMethod::IterativeKoutrouvelis,
                iterations: iteration,
                small_sample: sample.len() < 30,
            });
        }
    }
    Err(Error::FitNotConverged {
        iterations: cfg.max_iter,
        last: cur,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QqPoint {
    /// Plotting position `(i - 0.5) / n`.
    pub p: f64,
    pub empirical: f64,
    pub model: f64,
}

/// Order statistics paired with model quantiles at positions `(i - 0.5) / n`.
pub fn qq_points(sample: &[f64], params: &StableParams) -> Result<Vec<QqPoint>> {
    if sample.is_empty() {
        return Err(Error::invalid("empty sample"));
    }
    let mut sorted = sample.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    sorted
        .par_iter()
        .enumerate()
        .map(|(i, &x)| {
            let p = (i as f64 + 0.5) / n;
            Ok(QqPoint {
                p,
                empirical: x,
                model: params.quantile(p)?,
            })
        })
        .collect()
}

/// `p,empirical,model`.
pub fn write_qq_csv<W: Write>(points: &[QqPoint], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["p", "empirical", "model"])?;
    for q in points {
        w.write_record([q.p.to_string(), q.empirical.to_string(), q.model.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<RawSeries> {
        read_csv(text.as_bytes(), Path::new("test.csv"))
    }

    #[test]
    fn two_rows_one_return() {
        let raw = parse("year,I,D,C\n1990,100,5,1\n1991,110,6,1\n").unwrap();
        let r = to_returns(&raw).unwrap();
        assert_eq!(r.len(), 1);
        assert!((r.rows[0].gross - 1.15).abs() < 1e-12);
        assert!((r.rows[0].log - 1.15f64.ln()).abs() < 1e-12);
        assert!((r.rows[0].log - 0.1398).abs() < 5e-5);
    }

    #[test]
    fn inflation_only() {
        let raw = parse("year,I,D,C\n2000,50,0,1\n2001,50,0,2\n").unwrap();
        assert!((to_returns(&raw).unwrap().rows[0].gross - 0.5).abs() < 1e-15);
    }

    #[test]
    fn errors_name_the_row() {
        let e = parse("year,I,D,C\n1990,100,5,1\n1991,110,6,0\n").unwrap_err();
        assert!(matches!(e, Error::Validation { row: 3, .. }), "{e}");
        assert!(e.to_string().contains("row 3"));
        let e = parse("year,I,D,C\n1990,100,5,1\n1992,110,6,1\n").unwrap_err();
        assert!(matches!(e, Error::Validation { row: 3, .. }), "{e}");
        let e = parse("year,I,D,C\n1990,100,5,1\n1991,abc,6,1\n").unwrap_err();
        assert!(matches!(e, Error::Schema { row: 3, .. }), "{e}");
        let e = parse("year,I,D,C\n1990,100,5\n").unwrap_err();
        assert!(matches!(e, Error::Schema { row: 2, .. }), "{e}");
        let e = parse("year,S,D,C\n1990,100,5,1\n").unwrap_err();
        assert!(matches!(e, Error::Schema { row: 1, .. }), "{e}");
        let e = parse("year,I,D,C\n1990,-1,5,1\n").unwrap_err();
        assert!(matches!(e, Error::Validation { row: 2, .. }), "{e}");
        assert!(matches!(load_csv("/nonexistent/file.csv").unwrap_err(), Error::Io { .. }));
    }

    #[test]
    fn single_row_has_no_return() {
        assert!(to_returns(&parse("year,I,D,C\n1990,100,5,1\n").unwrap()).is_err());
    }

    #[test]
    fn grid_lookup() {
        assert_eq!(grid_size(&K_ALPHAS, &K_POINTS, 1.89, 149), 9);
        assert_eq!(grid_size(&K_ALPHAS, &K_POINTS, 0.35, 100_000), 118);
        assert_eq!(grid_size(&L_ALPHAS, &L_POINTS, 1.5, 900), 14);
    }

    #[test]
    fn csv_round_trip() {
        let raw = parse("year,I,D,C\n1990,100,5,1\n1991,110,6,1\n1992,90,4,1.1\n").unwrap();
        let r = to_returns(&raw).unwrap();
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("year,gross,log\n1990,"));
        assert_eq!(text.lines().count(), 3);
    }
}
