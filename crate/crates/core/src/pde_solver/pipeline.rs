//! Validate, build and check the barriers, iterate, verify.

use std::sync::Arc;

use serde::Serialize;

use crate::barriers::{
    build_barrier, epsilon_if_admissible, lambda_star_super, m_for_lambda, sample_to_grid, BarrierError,
    BarrierKind, BarrierSpec, SubScan, ThresholdSummary,
};
use crate::grid::{Grid, GridField};
use crate::problem::Problem;
use crate::verification::{
    poincare_check, sandwich_check, validate_problem, weak_inequality_check, CheckKind, Diagnostics,
    PoincareReport, SandwichReport, WeakCheckReport,
};

use super::monotone::{monotone_iterate, MonotoneOptions, SolveReport};
use super::SolveError;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PipelineOptions {
    pub eps: Option<f64>,
    pub alpha: Option<Vec<f64>>,
    pub m: Option<f64>,
    pub solve: MonotoneOptions,
    /// Tolerance of the barrier checks; `None` means `1e-3 * max h`.
    pub check_tol: Option<f64>,
    /// Threshold-scan resolution; `None` reuses the grid counts.
    pub resolution: Option<Vec<usize>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PipelineReport {
    pub diagnostics: Diagnostics,
    pub spec: BarrierSpec,
    pub thresholds: ThresholdSummary,
    pub check_tol: f64,
    pub lower_check: WeakCheckReport,
    pub upper_check: WeakCheckReport,
    pub barrier_order: SandwichReport,
    pub solve: SolveReport,
    pub solution_check: WeakCheckReport,
    pub poincare: Vec<PoincareReport>,
    pub passed: bool,
    #[serde(skip)]
    pub lower: GridField,
    #[serde(skip)]
    pub upper: GridField,
}

/// Barriers from the options (defaults filled by the threshold searches),
/// their weak checks, the monotone iteration, and the checks of the result.
///
/// Monotone nonconvergence is returned inside the report (`passed = false`).
pub fn solve_problem(prob: &Problem, grid: &Arc<Grid>, opts: &PipelineOptions) -> Result<PipelineReport, SolveError> {
    if grid.domain() != prob.omega() {
        return Err(SolveError::GridMismatch);
    }
    let diagnostics = validate_problem(prob);
    let resolution = opts.resolution.clone().unwrap_or_else(|| grid.counts().to_vec());
    let mut spec = BarrierSpec::default_for(prob)?;
    if let Some(a) = &opts.alpha {
        spec.alpha = a.clone();
    }
    spec.validate(prob)?;

    let template = build_barrier(BarrierKind::Sub, &spec, prob)?;
    let scan = SubScan::new(&template, prob, &resolution)?;
    spec.delta = scan.delta().to_vec();
    spec.eps = match opts.eps {
        Some(e) if e > 0.0 => e,
        Some(e) => return Err(SolveError::InvalidOption(format!("eps = {e}"))),
        None => epsilon_if_admissible(&scan, prob.lambda())
            .ok_or(BarrierError::NoAdmissibleEpsilon { lambda: prob.lambda() })?,
    };
    let sub = template.rescaled(spec.eps);
    let lower = sample_to_grid(&sub, grid);
    spec.m = match opts.m {
        Some(m) if m > 0.0 => m,
        Some(m) => return Err(SolveError::InvalidOption(format!("M = {m}"))),
        None => m_for_lambda(prob, &spec, prob.lambda(), Some(&lower), &resolution)?,
    };
    let sup = build_barrier(BarrierKind::Super, &spec, prob)?;
    let upper = sample_to_grid(&sup, grid);

    let lambda_sub = scan.threshold(spec.eps).lambda_star;
    let lambda_sup = lambda_star_super(&sup, prob, &resolution)?;
    let thresholds = ThresholdSummary::new(prob, &spec, Some(lambda_sub), Some(lambda_sup));

    let check_tol = opts.check_tol.unwrap_or_else(|| 1e-3 * grid.spacing().iter().cloned().fold(0.0, f64::max));
    let lower_check = weak_inequality_check(&lower, prob, CheckKind::Sub, check_tol)?;
    let upper_check = weak_inequality_check(&upper, prob, CheckKind::Super, check_tol)?;
    let barrier_order = sandwich_check(&lower, &lower, &upper)?;

    let solve = match monotone_iterate(prob, &lower, &upper, &opts.solve) {
        Ok(r) => r,
        Err(SolveError::NonConvergence { report }) => *report,
        Err(e) => return Err(e),
    };
    let solution_check = weak_inequality_check(&solve.solution, prob, CheckKind::Solution, opts.solve.tol)?;
    let poincare = (0..prob.dim())
        .map(|axis| poincare_check(&solve.solution, prob.p_min(), axis))
        .collect::<Result<Vec<_>, _>>()?;
    let passed = lower_check.passed
        && upper_check.passed
        && barrier_order.ok
        && solve.converged
        && solve.monotone_ok
        && solve.sandwich_ok
        && solution_check.passed
        && poincare.iter().all(|p| p.ok);
    Ok(PipelineReport {
        diagnostics,
        spec,
        thresholds,
        check_tol,
        lower_check,
        upper_check,
        barrier_order,
        solve,
        solution_check,
        poincare,
        passed,
        lower,
        upper,
    })
}
