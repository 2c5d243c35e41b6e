//! Monotone piecewise-cubic (Fritsch-Carlson / PCHIP) interpolation on a
//! uniform knot sequence.

#[derive(Debug, Clone)]
pub struct Pchip {
    x0: f64,
    h: f64,
    y: Vec<f64>,
    slopes: Vec<f64>,
}

impl Pchip {
    /// Knots `x0 + k h`, `k = 0..y.len()`. Needs at least two samples.
    pub fn uniform(x0: f64, h: f64, y: Vec<f64>) -> Self {
        assert!(y.len() >= 2 && h > 0.0);
        let n = y.len();
        let delta: Vec<f64> = y.windows(2).map(|w| (w[1] - w[0]) / h).collect();
        let mut slopes = vec![0.0; n];
        for k in 1..n - 1 {
            let (d0, d1) = (delta[k - 1], delta[k]);
            if d0 * d1 > 0.0 {
                // harmonic mean for equal spacing
                slopes[k] = 2.0 * d0 * d1 / (d0 + d1);
            }
        }
        slopes[0] = end_slope(delta[0], if n > 2 { delta[1] } else { delta[0] });
        slopes[n - 1] = end_slope(delta[n - 2], if n > 2 { delta[n - 3] } else { delta[n - 2] });
        Pchip { x0, h, y, slopes }
    }

    pub fn x_min(&self) -> f64 {
        self.x0
    }

    pub fn x_max(&self) -> f64 {
        self.x0 + self.h * (self.y.len() - 1) as f64
    }

    /// Evaluates the interpolant; `x` is clamped to the knot range.
    pub fn eval(&self, x: f64) -> f64 {
        let n = self.y.len();
        let s = ((x - self.x0) / self.h).clamp(0.0, (n - 1) as f64);
        let k = (s.floor() as usize).min(n - 2);
        let t = s - k as f64;
        let (y0, y1) = (self.y[k], self.y[k + 1]);
        let (m0, m1) = (self.slopes[k] * self.h, self.slopes[k + 1] * self.h);
        let t2 = t * t;
        let t3 = t2 * t;
        (2.0 * t3 - 3.0 * t2 + 1.0) * y0
            + (t3 - 2.0 * t2 + t) * m0
            + (-2.0 * t3 + 3.0 * t2) * y1
            + (t3 - t2) * m1
    }
}

// Three-point end formula, limited so the end slope keeps the data's shape.
fn end_slope(d0: f64, d1: f64) -> f64 {
    let m = (3.0 * d0 - d1) / 2.0;
    if m * d0 <= 0.0 {
        0.0
    } else if d0 * d1 <= 0.0 && m.abs() > 3.0 * d0.abs() {
        3.0 * d0
    } else {
        m
    }
}
