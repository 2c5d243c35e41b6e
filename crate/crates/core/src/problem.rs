//! Problem data: exponents, nonlinearity, parameter and box domain.

use serde::{Deserialize, Serialize};

use crate::domain::AxisBox;

/// Position of `q` relative to the exponent vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// `q < p_1`: positive solutions exist for every `lambda > 0`.
    Sublinear,
    /// `p_1 <= q < p_N`: existence above a positive threshold.
    Intermediate,
    /// `q >= p_N`: no barrier recipe.
    OutOfTheorem,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Regime::Sublinear => "sublinear",
            Regime::Intermediate => "intermediate",
            Regime::OutOfTheorem => "out-of-theorem",
        })
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ProblemError {
    #[error("exponent p[{index}] = {value} must exceed 1")]
    Exponent { index: usize, value: f64 },
    #[error("nonlinearity exponent q = {0} must exceed 1")]
    Nonlinearity(f64),
    #[error("lambda = {0} must be finite and nonnegative")]
    Lambda(f64),
    #[error("{p} exponents but the domain has {dim} axes")]
    Dimension { p: usize, dim: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Problem {
    p: Vec<f64>,
    q: f64,
    lambda: f64,
    omega: AxisBox,
    /// `axis_order[k]` is the input axis now stored at position `k`.
    axis_order: Vec<usize>,
}

impl Problem {
    /// Builds a problem, sorting the axes so that `p` is ascending. The domain
    /// axes are permuted along with `p`.
    pub fn new(p: Vec<f64>, q: f64, lambda: f64, omega: AxisBox) -> Result<Self, ProblemError> {
        if p.len() != omega.dim() {
            return Err(ProblemError::Dimension { p: p.len(), dim: omega.dim() });
        }
        for (index, &value) in p.iter().enumerate() {
            if !(value > 1.0 && value.is_finite()) {
                return Err(ProblemError::Exponent { index, value });
            }
        }
        if !(q > 1.0 && q.is_finite()) {
            return Err(ProblemError::Nonlinearity(q));
        }
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(ProblemError::Lambda(lambda));
        }
        let mut order: Vec<usize> = (0..p.len()).collect();
        order.sort_by(|&i, &j| p[i].total_cmp(&p[j]));
        let sorted = order.iter().map(|&k| p[k]).collect();
        let omega = omega.permuted(&order);
        Ok(Problem { p: sorted, q, lambda, omega, axis_order: order })
    }

    pub fn with_lambda(&self, lambda: f64) -> Result<Self, ProblemError> {
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(ProblemError::Lambda(lambda));
        }
        Ok(Problem { lambda, ..self.clone() })
    }

    pub fn dim(&self) -> usize {
        self.p.len()
    }

    pub fn p(&self) -> &[f64] {
        &self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn omega(&self) -> &AxisBox {
        &self.omega
    }

    pub fn axis_order(&self) -> &[usize] {
        &self.axis_order
    }

    /// True when the input exponents were not already ascending.
    pub fn was_reordered(&self) -> bool {
        self.axis_order.iter().enumerate().any(|(k, &j)| k != j)
    }

    pub fn p_min(&self) -> f64 {
        self.p[0]
    }

    pub fn p_max(&self) -> f64 {
        self.p[self.p.len() - 1]
    }

    pub fn regime(&self) -> Regime {
        if self.q < self.p_min() {
            Regime::Sublinear
        } else if self.q < self.p_max() {
            Regime::Intermediate
        } else {
            Regime::OutOfTheorem
        }
    }

    /// Number of axes with `p_i <= q`.
    pub fn i0(&self) -> usize {
        self.p.iter().filter(|&&pi| pi <= self.q).count()
    }

    pub fn inverse_sum(&self) -> f64 {
        self.p.iter().map(|pi| 1.0 / pi).sum()
    }

    /// `N / (sum 1/p_i - 1)`, defined when the sum exceeds one.
    pub fn p_star(&self) -> Option<f64> {
        let s = self.inverse_sum();
        (s > 1.0).then(|| self.dim() as f64 / (s - 1.0))
    }

    pub fn p_infinity(&self) -> Option<f64> {
        self.p_star().map(|ps| ps.max(self.p_max()))
    }
}
