//! Small floating-point helpers shared by the bound formulas.

/// `ln |e^x - 1|`, accurate for small `|x|` and free of overflow for large `x`.
pub fn ln_abs_expm1(x: f64) -> f64 {
    if x > 30.0 {
        x + (-(-x).exp()).ln_1p()
    } else {
        x.exp_m1().abs().ln()
    }
}

/// `ln(e^a + e^b)`.
pub fn ln_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// `(e^x - 1) / x`, continuous at zero.
pub fn expm1_over_x(x: f64) -> f64 {
    if x.abs() < 1e-300 {
        1.0
    } else {
        x.exp_m1() / x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ln_abs_expm1_matches_naive_in_safe_range() {
        for &x in &[-5.0, -0.3, -1e-9, 1e-9, 0.2, 4.0, 29.0, 31.0] {
            let naive = (f64::exp(x) - 1.0).abs().ln();
            assert!((ln_abs_expm1(x) - naive).abs() < 1e-6 * naive.abs().max(1.0), "x = {x}");
        }
        assert!((ln_abs_expm1(800.0) - 800.0).abs() < 1e-12);
        assert!((ln_abs_expm1(1e-12) - (1e-12f64).ln()).abs() < 1e-9);
    }

    #[test]
    fn ln_add_exp_handles_extremes() {
        assert!((ln_add_exp(0.0, 0.0) - 2f64.ln()).abs() < 1e-15);
        assert_eq!(ln_add_exp(1000.0, 0.0), 1000.0);
        assert_eq!(ln_add_exp(f64::NEG_INFINITY, 3.0), 3.0);
    }
}
