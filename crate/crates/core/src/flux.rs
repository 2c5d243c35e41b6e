//! Scalar flux `g -> (g^2 + reg^2)^{(p-2)/2} g` and its potential.

/// Regularized flux; `reg = 0` gives the exact `|g|^{p-2} g`.
#[inline]
pub fn flux(g: f64, p: f64, reg: f64) -> f64 {
    if reg == 0.0 {
        if g == 0.0 {
            return 0.0;
        }
        return g.abs().powf(p - 2.0) * g;
    }
    (g * g + reg * reg).powf(0.5 * (p - 2.0)) * g
}

/// `(g^2 + reg^2)^{p/2} / p`, whose derivative is [`flux`].
#[inline]
pub fn potential(g: f64, p: f64, reg: f64) -> f64 {
    (g * g + reg * reg).powf(0.5 * p) / p
}

/// Derivative of [`flux`] in `g`.
#[inline]
pub fn flux_slope(g: f64, p: f64, reg: f64) -> f64 {
    let s = g * g + reg * reg;
    if s == 0.0 {
        return if p == 2.0 { 1.0 } else if p < 2.0 { f64::INFINITY } else { 0.0 };
    }
    s.powf(0.5 * (p - 4.0)) * ((p - 1.0) * g * g + reg * reg)
}
