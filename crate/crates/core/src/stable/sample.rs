//! Stable variates by the trigonometric transformation of a uniform angle
//! and an exponential variable.

use std::f64::consts::{FRAC_2_PI, FRAC_PI_2, PI};

use rand::Rng;

pub(super) fn standard_variate<R: Rng + ?Sized>(alpha: f64, beta: f64, rng: &mut R) -> f64 {
    // Angle uniform on (-pi/2, pi/2), exponential with unit mean.
    let v = PI * (rng.random::<f64>() - 0.5);
    let w = -(1.0 - rng.random::<f64>()).ln();
    if alpha == 1.0 {
        let lead = FRAC_PI_2 + beta * v;
        FRAC_2_PI * (lead * v.tan() - beta * (FRAC_PI_2 * w * v.cos() / lead).ln())
    } else if alpha == 2.0 {
        // Gaussian case: the general formula reduces to 2 sqrt(w) sin(v).
        2.0 * w.sqrt() * v.sin()
    } else {
        let tan_term = beta * (PI * alpha / 2.0).tan();
        let b = tan_term.atan() / alpha;
        let s = (1.0 + tan_term * tan_term).powf(1.0 / (2.0 * alpha));
        let arg = alpha * (v + b);
        s * arg.sin() / v.cos().powf(1.0 / alpha) * ((v - arg).cos() / w).powf((1.0 - alpha) / alpha)
    }
}
