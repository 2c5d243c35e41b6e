//! Tanh-sinh quadrature on `[0, 1]` for integrands with endpoint singularities.
//!
//! The integrand receives both `x` and `1 - x`, each computed without
//! cancellation, so factors like `(1 - x^p)` stay accurate near `x = 1`.

use std::f64::consts::FRAC_PI_2;

#[derive(Debug, Clone, Copy)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub levels: usize,
}

/// Integrates `f(x, 1 - x)` over `(0, 1)`, halving the step until two
/// successive levels agree to `rel_tol`.
pub fn tanh_sinh<F>(f: F, rel_tol: f64) -> Estimate
where
    F: Fn(f64, f64) -> f64,
{
    const T_MAX: f64 = 6.0;
    const MAX_LEVEL: usize = 12;

    // Abscissa x = (1 + tanh(pi/2 sinh t)) / 2, weight dx/dt.
    let node = |t: f64| -> (f64, f64, f64) {
        let s = FRAC_PI_2 * t.sinh();
        let c = FRAC_PI_2 * t.cosh();
        let e = (-2.0 * s.abs()).exp();
        let small = e / (1.0 + e); // distance to the nearer endpoint
        let big = 1.0 / (1.0 + e);
        let cosh_s = s.cosh();
        let w = 0.5 * c / (cosh_s * cosh_s);
        if s >= 0.0 {
            (big, small, w)
        } else {
            (small, big, w)
        }
    };
    let eval = |t: f64| -> f64 {
        let (x, xc, w) = node(t);
        if x <= 0.0 || xc <= 0.0 || w == 0.0 {
            return 0.0;
        }
        let v = f(x, xc) * w;
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };

    let mut h = 0.5;
    let mut sum = eval(0.0);
    let mut k = 1;
    while (k as f64) * h <= T_MAX {
        let t = k as f64 * h;
        sum += eval(t) + eval(-t);
        k += 1;
    }
    let mut prev = sum * h;
    let mut error = f64::INFINITY;
    for level in 1..=MAX_LEVEL {
        h *= 0.5;
        let mut add = 0.0;
        let mut k = 1;
        while (k as f64) * h <= T_MAX {
            let t = k as f64 * h;
            add += eval(t) + eval(-t);
            k += 2;
        }
        sum += add;
        let cur = sum * h;
        error = (cur - prev).abs();
        if level >= 3 && error <= rel_tol * cur.abs() {
            return Estimate { value: cur, error, levels: level };
        }
        prev = cur;
    }
    Estimate { value: prev, error, levels: MAX_LEVEL }
}
