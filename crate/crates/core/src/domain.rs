//! Intervals and axis-aligned boxes.

use serde::{Deserialize, Serialize};

/// Open interval `(a, b)` with `a < b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub a: f64,
    pub b: f64,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DomainError {
    #[error("degenerate interval ({a}, {b}): need a < b with finite endpoints")]
    Degenerate { a: f64, b: f64 },
    #[error("box must have at least one axis")]
    Empty,
    #[error("dimension mismatch: expected {expected} axes, got {got}")]
    Dimension { expected: usize, got: usize },
}

impl Interval {
    pub fn new(a: f64, b: f64) -> Result<Self, DomainError> {
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(DomainError::Degenerate { a, b });
        }
        Ok(Interval { a, b })
    }

    #[inline]
    pub fn length(&self) -> f64 {
        self.b - self.a
    }

    #[inline]
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.a + self.b)
    }

    /// Closed containment of `other` in `self`.
    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.a <= other.a && other.b <= self.b
    }

    /// `other` closure lies in the open interval `self`.
    pub fn strictly_contains_interval(&self, other: &Interval) -> bool {
        self.a < other.a && other.b < self.b
    }

    pub fn contains(&self, x: f64) -> bool {
        self.a <= x && x <= self.b
    }

    /// Distance from `x` to the nearer endpoint (negative outside).
    pub fn boundary_distance(&self, x: f64) -> f64 {
        (x - self.a).min(self.b - x)
    }

    /// Concentric interval scaled by `factor` about the midpoint.
    pub fn scaled(&self, factor: f64) -> Interval {
        let m = self.midpoint();
        let half = 0.5 * self.length() * factor;
        Interval { a: m - half, b: m + half }
    }
}

/// Tensor product of intervals, one per axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxisBox {
    axes: Vec<Interval>,
}

impl AxisBox {
    pub fn new(axes: Vec<Interval>) -> Result<Self, DomainError> {
        if axes.is_empty() {
            return Err(DomainError::Empty);
        }
        for iv in &axes {
            Interval::new(iv.a, iv.b)?;
        }
        Ok(AxisBox { axes })
    }

    pub fn from_bounds(lo: &[f64], hi: &[f64]) -> Result<Self, DomainError> {
        if lo.len() != hi.len() {
            return Err(DomainError::Dimension { expected: lo.len(), got: hi.len() });
        }
        let axes = lo
            .iter()
            .zip(hi)
            .map(|(&a, &b)| Interval::new(a, b))
            .collect::<Result<Vec<_>, _>>()?;
        AxisBox::new(axes)
    }

    /// The unit cube `(0, 1)^dim`.
    pub fn unit(dim: usize) -> Self {
        AxisBox { axes: vec![Interval { a: 0.0, b: 1.0 }; dim.max(1)] }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    #[inline]
    pub fn axis(&self, i: usize) -> &Interval {
        &self.axes[i]
    }

    pub fn axes(&self) -> &[Interval] {
        &self.axes
    }

    /// Side lengths `d^i`.
    pub fn sides(&self) -> Vec<f64> {
        self.axes.iter().map(Interval::length).collect()
    }

    pub fn contains_box(&self, other: &AxisBox) -> bool {
        self.dim() == other.dim()
            && self.axes.iter().zip(&other.axes).all(|(s, o)| s.contains_interval(o))
    }

    /// Closure of `other` inside the open box `self`.
    pub fn strictly_contains_box(&self, other: &AxisBox) -> bool {
        self.dim() == other.dim()
            && self.axes.iter().zip(&other.axes).all(|(s, o)| s.strictly_contains_interval(o))
    }

    pub fn contains_point(&self, x: &[f64]) -> bool {
        x.len() == self.dim() && self.axes.iter().zip(x).all(|(iv, &xi)| iv.contains(xi))
    }

    /// Each side grown by `fraction` of its length on both ends.
    pub fn inflated(&self, fraction: f64) -> AxisBox {
        AxisBox { axes: self.axes.iter().map(|iv| iv.scaled(1.0 + 2.0 * fraction)).collect() }
    }

    /// Concentric box with every side scaled by `factor`.
    pub fn scaled(&self, factor: f64) -> AxisBox {
        AxisBox { axes: self.axes.iter().map(|iv| iv.scaled(factor)).collect() }
    }

    pub fn permuted(&self, order: &[usize]) -> AxisBox {
        AxisBox { axes: order.iter().map(|&k| self.axes[k]).collect() }
    }
}
