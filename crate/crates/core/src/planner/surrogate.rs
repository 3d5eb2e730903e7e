//! Two-stage polynomial surrogate of the discrete frontier:
//!
//! ```text
//! s(k, alpha) ≈ sum_i f_i(alpha) phi_i(k),   phi = (1, k^{1/2}, k^{1/4}, k^{1/8}),
//! f_i(alpha)  = sum_j lambda_ij alpha^j
//! ```
//!
//! Least squares is solved by Householder QR on column-scaled designs. The
//! monomial basis in `alpha` is badly conditioned on `(1, 2]`, so fits are
//! compared through the values they predict, not through coefficients.

use nalgebra::{DMatrix, DVector};

use super::{FrontierKind, FrontierTable};
use crate::error::{Error, Result};

/// Reference surrogate for confidence 0.95 and symmetric laws, `alpha` in `(1, 2]`.
pub const SYMMETRIC_95_LAMBDA: [[f64; 6]; 4] = [
    [-2484.4421, 7053.6469, -7910.3438, 4425.8516, -1236.8914, 138.1989],
    [203.2079, -551.2414, 597.5744, -324.7764, 88.4613, -9.6564],
    [-2681.4779, 7442.1643, -8232.7022, 4561.2428, -1265.6221, 140.6711],
    [5061.6465, -14204.7730, 15842.4735, -8838.1550, 2467.1713, -275.6974],
];

/// Reference single-shape surrogate for confidence 0.95, `alpha = 1.89`, `beta = 1`.
pub const SKEWED_189_COEFFS: [f64; 4] = [19.8070, -0.7709, 12.9209, -29.6668];

pub fn k_basis(k: f64) -> [f64; 4] {
    let r2 = k.sqrt();
    let r4 = r2.sqrt();
    [1.0, r2, r4, r4.sqrt()]
}

#[derive(Debug, Clone, PartialEq)]
pub struct SurrogateFit {
    /// `4 x (degree + 1)`; row `i` holds the coefficients of `f_i`.
    pub lambda: DMatrix<f64>,
    /// Largest `|table - fit|` over the fitted grid.
    pub max_residual: f64,
    /// Largest amount by which the fit exceeds the table; subtracted for conservative use.
    pub shift: f64,
}

impl SurrogateFit {
    pub fn from_lambda(lambda: &[[f64; 6]; 4]) -> Self {
        Self {
            lambda: DMatrix::from_fn(4, 6, |i, j| lambda[i][j]),
            max_residual: f64::NAN,
            shift: 0.0,
        }
    }

    /// A fit that does not depend on `alpha`.
    pub fn from_k_coefficients(coeffs: &[f64; 4]) -> Self {
        Self {
            lambda: DMatrix::from_fn(4, 1, |i, _| coeffs[i]),
            max_residual: f64::NAN,
            shift: 0.0,
        }
    }

    pub fn alpha_degree(&self) -> usize {
        self.lambda.ncols() - 1
    }

    pub fn coefficients(&self, alpha: f64) -> [f64; 4] {
        let mut out = [0.0; 4];
        for (i, o) in out.iter_mut().enumerate() {
            // Horner in alpha.
            *o = (0..self.lambda.ncols()).rev().fold(0.0, |acc, j| acc * alpha + self.lambda[(i, j)]);
        }
        out
    }

    pub fn eval(&self, k: f64, alpha: f64) -> f64 {
        let f = self.coefficients(alpha);
        k_basis(k).iter().zip(f).map(|(p, c)| p * c).sum()
    }

    /// The fit lowered by `shift`, never above the fitted table.
    pub fn conservative(&self, k: f64, alpha: f64) -> f64 {
        self.eval(k, alpha) - self.shift
    }
}

/// Least squares via QR with unit-norm columns; rejects underdetermined or rank-deficient designs.
pub(crate) fn least_squares(design: &DMatrix<f64>, rhs: &DVector<f64>) -> Result<DVector<f64>> {
    let (rows, cols) = design.shape();
    if rows < cols {
        return Err(Error::invalid(format!("{rows} points cannot determine {cols} basis coefficients")));
    }
    let norms: Vec<f64> = design.column_iter().map(|c| c.norm()).collect();
    if norms.contains(&0.0) {
        return Err(Error::invalid("design has an all-zero basis column"));
    }
    let scaled = DMatrix::from_fn(rows, cols, |i, j| design[(i, j)] / norms[j]);
    let qr = scaled.qr();
    let r = qr.r();
    let diag_max = r.diagonal().amax();
    if r.diagonal().iter().any(|d| d.abs() <= 1e-13 * diag_max) {
        return Err(Error::invalid("least-squares design is rank deficient"));
    }
    let qtb = qr.q().transpose() * rhs;
    let y = r
        .solve_upper_triangular(&qtb)
        .ok_or_else(|| Error::invalid("least-squares design is rank deficient"))?;
    Ok(DVector::from_iterator(cols, y.iter().zip(&norms).map(|(v, n)| v / n)))
}

/// Fit one frontier per `alpha` in `k`, then each coefficient in `alpha` up to `alpha_degree`.
pub fn fit_surrogate(tables: &[FrontierTable], alpha_degree: usize) -> Result<SurrogateFit> {
    if tables.is_empty() {
        return Err(Error::invalid("no frontier tables to fit"));
    }
    if tables.iter().any(|t| t.kind != FrontierKind::Discrete) {
        return Err(Error::invalid("surrogates are fitted to discrete frontiers"));
    }
    let n_alpha = tables.len();
    if n_alpha < alpha_degree + 1 {
        return Err(Error::invalid(format!(
            "{n_alpha} shapes cannot determine a degree-{alpha_degree} polynomial"
        )));
    }

    // Stage 1: per-shape coefficients in the k basis.
    let mut stage1 = DMatrix::zeros(n_alpha, 4);
    for (a, t) in tables.iter().enumerate() {
        let design = DMatrix::from_fn(t.rows.len(), 4, |i, j| k_basis(t.rows[i].key)[j]);
        let coeffs = least_squares(&design, &DVector::from_vec(t.values()))?;
        stage1.set_row(a, &coeffs.transpose());
    }

    // Stage 2: each coefficient as a polynomial in alpha.
    let alphas: Vec<f64> = tables.iter().map(|t| t.alpha).collect();
    let vander = DMatrix::from_fn(n_alpha, alpha_degree + 1, |i, j| alphas[i].powi(j as i32));
    let mut lambda = DMatrix::zeros(4, alpha_degree + 1);
    for i in 0..4 {
        let row = least_squares(&vander, &stage1.column(i).into_owned())?;
        lambda.set_row(i, &row.transpose());
    }

    let mut fit = SurrogateFit {
        lambda,
        max_residual: 0.0,
        shift: 0.0,
    };
    for t in tables {
        for r in &t.rows {
            let excess = fit.eval(r.key, t.alpha) - r.s;
            fit.max_residual = fit.max_residual.max(excess.abs());
            fit.shift = fit.shift.max(excess);
        }
    }
    Ok(fit)
}
