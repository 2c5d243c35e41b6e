//! Audit checks: discrete weak sub/supersolution inequalities, ordering,
//! the directional Poincare inequality and problem diagnostics.
//!
//! The weak pairing is assembled edge by edge (summation-by-parts form) and
//! shares nothing with the solver's node stencil except the scalar flux.

use serde::{Deserialize, Serialize};

use crate::barriers::nonexistence_bound;
use crate::flux::flux;
use crate::grid::{Grid, GridField};
use crate::problem::{Problem, Regime};

/// Slack for nodewise ordering comparisons.
pub const ORDER_SLACK: f64 = 1e-12;
/// Relative slack in the Poincare comparison.
pub const POINCARE_SLACK: f64 = 1e-6;
const WORST_NODES: usize = 10;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CheckError {
    #[error("{kind:?} check needs zero boundary values; node {node} has {value:e}")]
    Boundary { kind: CheckKind, node: usize, value: f64 },
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("Poincare exponent r = {0} must be at least 1")]
    Exponent(f64),
    #[error("axis {axis} out of range for a {dim}-dimensional grid")]
    Axis { axis: usize, dim: usize },
    #[error("problem has {p} axes, grid has {grid}")]
    Dimension { p: usize, grid: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    Sub,
    Super,
    Solution,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeResidual {
    pub node: usize,
    pub index: Vec<usize>,
    pub point: Vec<f64>,
    /// Pairing divided by the hat-function mass.
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeakCheckReport {
    pub kind: CheckKind,
    pub passed: bool,
    pub tol: f64,
    /// Largest violation in the direction the kind forbids (0 if none).
    pub worst_violation: f64,
    pub max_residual: f64,
    pub min_residual: f64,
    pub worst_nodes: Vec<NodeResidual>,
}

/// Hat-function pairings `R_j` of the weak form with the zero-order term,
/// divided by the hat mass `prod h_i`, at every interior node.
pub fn weak_residuals(u: &GridField, prob: &Problem) -> Result<Vec<f64>, CheckError> {
    let grid = u.grid();
    if grid.dim() != prob.dim() {
        return Err(CheckError::Dimension { p: prob.dim(), grid: grid.dim() });
    }
    let vals = u.values();
    let mut pairing = vec![0.0; grid.len()];
    for axis in 0..grid.dim() {
        let (h, p) = (grid.spacing()[axis], prob.p()[axis]);
        let stride = grid.strides()[axis];
        let last = grid.counts()[axis] - 1;
        for left in 0..grid.len() {
            if grid.axis_index(left, axis) == last {
                continue;
            }
            let right = left + stride;
            let f = flux((vals[right] - vals[left]) / h, p, 0.0);
            // d(phi_left)/dx_i = -1/h, d(phi_right)/dx_i = +1/h on this edge.
            pairing[left] -= f / h;
            pairing[right] += f / h;
        }
    }
    let (lambda, q) = (prob.lambda(), prob.q());
    Ok((0..grid.len())
        .map(|k| if grid.is_boundary(k) { 0.0 } else { pairing[k] - lambda * vals[k].max(0.0).powf(q - 1.0) })
        .collect())
}

fn boundary_contract(u: &GridField, kind: CheckKind) -> Result<(), CheckError> {
    let grid = u.grid();
    for k in 0..grid.len() {
        if !grid.is_boundary(k) {
            continue;
        }
        let value = u.values()[k];
        let bad = match kind {
            CheckKind::Sub | CheckKind::Solution => value != 0.0,
            CheckKind::Super => value < 0.0,
        };
        if bad {
            return Err(CheckError::Boundary { kind, node: k, value });
        }
    }
    Ok(())
}

/// Discrete weak inequality against every nonnegative nodal hat.
///
/// `tol` is in units of the pairing divided by the hat mass `prod h_i`.
pub fn weak_inequality_check(
    u: &GridField,
    prob: &Problem,
    kind: CheckKind,
    tol: f64,
) -> Result<WeakCheckReport, CheckError> {
    boundary_contract(u, kind)?;
    let grid = u.grid();
    let res = weak_residuals(u, prob)?;
    let interior: Vec<usize> = grid.interior_nodes().collect();
    let max_residual = interior.iter().map(|&k| res[k]).fold(f64::NEG_INFINITY, f64::max);
    let min_residual = interior.iter().map(|&k| res[k]).fold(f64::INFINITY, f64::min);
    let badness = |r: f64| match kind {
        CheckKind::Sub => r,
        CheckKind::Super => -r,
        CheckKind::Solution => r.abs(),
    };
    let mut ranked = interior.clone();
    ranked.sort_by(|&a, &b| badness(res[b]).total_cmp(&badness(res[a])).then(a.cmp(&b)));
    let worst_nodes = ranked
        .iter()
        .take(WORST_NODES)
        .map(|&k| NodeResidual { node: k, index: grid.multi_index(k), point: grid.point(k), value: res[k] })
        .collect();
    let worst = ranked.first().map(|&k| badness(res[k])).unwrap_or(0.0);
    Ok(WeakCheckReport {
        kind,
        passed: worst <= tol,
        tol,
        worst_violation: worst.max(0.0),
        max_residual,
        min_residual,
        worst_nodes,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SandwichReport {
    pub ok: bool,
    /// Most negative of `mid - lower` and `upper - mid` over all nodes.
    pub worst_gap: f64,
    pub worst_node: Option<usize>,
    pub violations: usize,
}

/// Nodewise `lower <= mid <= upper` up to [`ORDER_SLACK`].
pub fn sandwich_check(lower: &GridField, mid: &GridField, upper: &GridField) -> Result<SandwichReport, CheckError> {
    if !lower.same_grid(mid) || !mid.same_grid(upper) {
        return Err(CheckError::GridMismatch);
    }
    let mut worst_gap = f64::INFINITY;
    let mut worst_node = None;
    let mut violations = 0;
    for (k, ((&l, &m), &u)) in lower.values().iter().zip(mid.values()).zip(upper.values()).enumerate() {
        let gap = (m - l).min(u - m);
        if gap < -ORDER_SLACK {
            violations += 1;
        }
        if gap < worst_gap {
            worst_gap = gap;
            worst_node = Some(k);
        }
    }
    Ok(SandwichReport { ok: violations == 0, worst_gap, worst_node, violations })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoincareReport {
    pub lhs: f64,
    pub rhs: f64,
    pub ok: bool,
}

fn node_norm(u: &GridField, r: f64) -> f64 {
    let vol = u.grid().node_volume();
    (u.values().iter().map(|v| v.abs().powf(r)).sum::<f64>() * vol).powf(1.0 / r)
}

fn edge_norm(u: &GridField, r: f64, axis: usize) -> f64 {
    let grid: &Grid = u.grid();
    let (h, stride, last) = (grid.spacing()[axis], grid.strides()[axis], grid.counts()[axis] - 1);
    let vals = u.values();
    let sum: f64 = (0..grid.len())
        .filter(|&k| grid.axis_index(k, axis) != last)
        .map(|k| ((vals[k + stride] - vals[k]) / h).abs().powf(r))
        .sum();
    (sum * grid.node_volume()).powf(1.0 / r)
}

/// `||u||_r <= (d^i r / 2) ||d_i u||_r` with node and edge quadrature.
pub fn poincare_check(u: &GridField, r: f64, axis: usize) -> Result<PoincareReport, CheckError> {
    if !(r >= 1.0) {
        return Err(CheckError::Exponent(r));
    }
    let grid = u.grid();
    if axis >= grid.dim() {
        return Err(CheckError::Axis { axis, dim: grid.dim() });
    }
    boundary_contract(u, CheckKind::Solution)?;
    let lhs = node_norm(u, r);
    let d = grid.domain().axis(axis).length();
    let rhs = 0.5 * d * r * edge_norm(u, r, axis);
    Ok(PoincareReport { lhs, rhs, ok: lhs <= rhs * (1.0 + POINCARE_SLACK) })
}

/// Flags a field that passes the solution check below the nonexistence bound
/// (only meaningful when `q = p_1`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Contradiction {
    pub lambda: f64,
    pub bound: f64,
    pub norm: f64,
    pub poincare: PoincareReport,
}

pub fn nonexistence_contradiction(
    u: &GridField,
    prob: &Problem,
    tol: f64,
) -> Result<Option<Contradiction>, CheckError> {
    let Ok(bound) = nonexistence_bound(prob) else {
        return Ok(None);
    };
    let p1 = prob.p_min();
    let poincare = poincare_check(u, p1, 0)?;
    let norm = poincare.lhs;
    if norm == 0.0 || prob.lambda() >= bound {
        return Ok(None);
    }
    let check = weak_inequality_check(u, prob, CheckKind::Solution, tol)?;
    Ok(check.passed.then_some(Contradiction { lambda: prob.lambda(), bound, norm, poincare }))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub inverse_sum: f64,
    /// `sum 1/p_i > 1`.
    pub embedding_condition: bool,
    pub p_star: Option<f64>,
    pub p_infinity: Option<f64>,
    pub regime: Regime,
    /// `q < p_infinity`, when `p_infinity` is defined.
    pub compact_embedding: Option<bool>,
    pub input_sorted: bool,
    pub warnings: Vec<String>,
}

pub fn validate_problem(prob: &Problem) -> Diagnostics {
    let mut warnings = Vec::new();
    let inverse_sum = prob.inverse_sum();
    let embedding_condition = inverse_sum > 1.0;
    if !embedding_condition {
        warnings.push(format!(
            "sum 1/p_i = {inverse_sum} <= 1: p* undefined (barrier construction does not use it)"
        ));
    }
    let input_sorted = !prob.was_reordered();
    if !input_sorted {
        warnings.push(format!("exponents reordered ascending; axis order {:?}", prob.axis_order()));
    }
    if prob.regime() == Regime::OutOfTheorem {
        warnings.push(format!("q = {} >= p_N = {}: outside the existence theory", prob.q(), prob.p_max()));
    }
    let p_infinity = prob.p_infinity();
    Diagnostics {
        inverse_sum,
        embedding_condition,
        p_star: prob.p_star(),
        p_infinity,
        regime: prob.regime(),
        compact_embedding: p_infinity.map(|pi| prob.q() < pi),
        input_sorted,
        warnings,
    }
}
