//! Monotone iteration `u^{k+1} = argmin E(.; lambda (u^k)_+^{q-1})` over `[u^k, upper]`.

use serde::{Serialize, Serializer};

use crate::grid::GridField;
use crate::problem::Problem;
use crate::verification::{sandwich_check, SandwichReport, ORDER_SLACK};

use super::convex::{convex_subproblem, ConvexOptions};
use super::operator::apply_operator;
use super::SolveError;

#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneOptions {
    pub tol: f64,
    pub max_outer: usize,
    /// Flux regularization; `None` picks [`default_reg`].
    pub reg: Option<f64>,
    /// Inner projected-gradient tolerance as a fraction of `tol`.
    pub inner_fraction: f64,
    pub max_inner: usize,
}

impl Default for MonotoneOptions {
    fn default() -> Self {
        MonotoneOptions { tol: 1e-4, max_outer: 500, reg: None, inner_fraction: 0.1, max_inner: 200 }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveReport {
    #[serde(serialize_with = "field_values")]
    pub solution: GridField,
    pub iterations: usize,
    pub converged: bool,
    pub tol: f64,
    pub reg: f64,
    /// Max interior `|A_reg(u) - lambda u^{q-1}|` after each outer step.
    pub residual_history: Vec<f64>,
    /// Inner energies, outer steps concatenated; see `inner_steps`.
    pub energy_history: Vec<f64>,
    pub inner_steps: Vec<usize>,
    pub increments: Vec<f64>,
    pub monotone_ok: bool,
    /// Most negative `u^{k+1} - u^k` seen.
    pub worst_monotone_step: f64,
    pub sandwich_ok: bool,
    pub sandwich: SandwichReport,
    /// Max nodal value of the solution.
    pub positive_mass: f64,
    pub residual: f64,
    pub unregularized_residual: f64,
}

fn field_values<S: Serializer>(f: &GridField, s: S) -> Result<S::Ok, S::Error> {
    #[derive(Serialize)]
    struct Repr<'a> {
        counts: &'a [usize],
        values: &'a [f64],
    }
    Repr { counts: f.grid().counts(), values: f.values() }.serialize(s)
}

/// `1e-8` times a characteristic gradient: the largest finite bound over the
/// shortest side.
pub fn default_reg(lower: &GridField, upper: &GridField) -> f64 {
    let finite_max = |f: &GridField| f.values().iter().filter(|v| v.is_finite()).fold(0.0_f64, |m, v| m.max(v.abs()));
    let scale = match finite_max(upper) {
        s if s > 0.0 => s,
        _ => finite_max(lower),
    };
    let scale = if scale > 0.0 { scale } else { 1.0 };
    let side = lower.grid().domain().sides().into_iter().fold(f64::INFINITY, f64::min);
    1e-8 * scale / side
}

/// Max over interior nodes of `|A_reg(u) - lambda u_+^{q-1}|`.
pub fn residual_max(u: &GridField, prob: &Problem, reg: f64) -> f64 {
    let au = apply_operator(u, prob, reg);
    let grid = u.grid();
    grid.interior_nodes()
        .map(|k| (au.values()[k] - prob.lambda() * u.values()[k].max(0.0).powf(prob.q() - 1.0)).abs())
        .fold(0.0, f64::max)
}

pub(crate) fn load(u: &GridField, prob: &Problem) -> GridField {
    let mut rhs = GridField::zeros(u.grid().clone());
    let (lambda, e) = (prob.lambda(), prob.q() - 1.0);
    for (r, &v) in rhs.values_mut().iter_mut().zip(u.values()) {
        *r = lambda * v.max(0.0).powf(e);
    }
    rhs.zero_boundary();
    rhs
}

/// Iterates from `lower`; each step minimizes the energy with the load frozen
/// at the previous iterate, constrained to `[u^k, upper]`.
///
/// Stops once both the increment and the residual are `<= tol`.
pub fn monotone_iterate(
    prob: &Problem,
    lower: &GridField,
    upper: &GridField,
    opts: &MonotoneOptions,
) -> Result<SolveReport, SolveError> {
    if !lower.same_grid(upper) || lower.grid().dim() != prob.dim() {
        return Err(SolveError::GridMismatch);
    }
    if !(opts.tol > 0.0) || opts.max_outer == 0 {
        return Err(SolveError::InvalidOption(format!("tol = {}, max_outer = {}", opts.tol, opts.max_outer)));
    }
    let grid = lower.grid().clone();
    if let Some(k) = grid.interior_nodes().find(|&k| !(lower.values()[k] <= upper.values()[k])) {
        return Err(SolveError::Ordering { node: k, gap: upper.values()[k] - lower.values()[k] });
    }
    let reg = opts.reg.unwrap_or_else(|| default_reg(lower, upper));
    let inner = ConvexOptions { tol: opts.inner_fraction * opts.tol, reg, max_iter: opts.max_inner };

    let mut u = lower.clone();
    u.zero_boundary();
    let mut report = SolveReport {
        solution: u.clone(),
        iterations: 0,
        converged: false,
        tol: opts.tol,
        reg,
        residual_history: Vec::new(),
        energy_history: Vec::new(),
        inner_steps: Vec::new(),
        increments: Vec::new(),
        monotone_ok: true,
        worst_monotone_step: 0.0,
        sandwich_ok: true,
        sandwich: sandwich_check(lower, &u, upper)?,
        positive_mass: u.max(),
        residual: f64::INFINITY,
        unregularized_residual: f64::INFINITY,
    };

    for _ in 0..opts.max_outer {
        let rhs = load(&u, prob);
        let out = convex_subproblem(&rhs, prob, &u, upper, Some(&u), &inner)?;
        let next = out.solution;
        let mut incr = 0.0_f64;
        let mut step_min = f64::INFINITY;
        for (a, b) in next.values().iter().zip(u.values()) {
            incr = incr.max((a - b).abs());
            step_min = step_min.min(a - b);
        }
        report.worst_monotone_step = report.worst_monotone_step.min(step_min);
        if step_min < -ORDER_SLACK {
            report.monotone_ok = false;
        }
        let sw = sandwich_check(lower, &next, upper)?;
        report.sandwich_ok &= sw.ok;
        report.sandwich = sw;
        let residual = residual_max(&next, prob, reg);
        report.iterations += 1;
        report.energy_history.extend(out.energy_history);
        report.inner_steps.push(out.iterations);
        report.increments.push(incr);
        report.residual_history.push(residual);
        report.residual = residual;
        u = next;
        if incr <= opts.tol && residual <= opts.tol {
            report.converged = true;
            break;
        }
    }
    report.positive_mass = u.max();
    report.unregularized_residual = residual_max(&u, prob, 0.0);
    report.solution = u;
    if report.converged {
        Ok(report)
    } else {
        Err(SolveError::NonConvergence { report: Box::new(report) })
    }
}
