//! Geometric lambda ladder bracketing the existence threshold.

use std::f64::consts::PI;
use std::sync::Arc;

use serde::Serialize;

use crate::barriers::{
    build_barrier, epsilon_if_admissible, m_for_lambda, nonexistence_bound, sample_to_grid, BarrierKind, BarrierSpec,
    SubScan,
};
use crate::grid::{Grid, GridField};
use crate::problem::{Problem, Regime};
use crate::verification::{weak_inequality_check, CheckKind, WeakCheckReport};

use super::convex::{convex_subproblem, ConvexOptions};
use super::monotone::{default_reg, load, monotone_iterate, residual_max, MonotoneOptions};
use super::SolveError;

#[derive(Debug, Clone, PartialEq)]
pub struct ScanOptions {
    pub lo: f64,
    pub hi: f64,
    /// Ladder points, `lo` and `hi` included.
    pub steps: usize,
    /// Geometric bisections of the bracket after the ladder.
    pub refine: usize,
    pub solve: MonotoneOptions,
    /// Positive-mass floor; `None` means `10 * tol`.
    pub mass_floor: Option<f64>,
    /// Probe start height; `None` means `10 * floor`.
    pub probe_amplitude: Option<f64>,
    /// Probe runs count as growing once the mass exceeds this multiple of the start.
    pub growth_factor: f64,
    pub probe_max_outer: usize,
    /// Threshold-scan resolution for the barriers; `None` reuses the grid counts.
    pub resolution: Option<Vec<usize>>,
    pub keep_solutions: bool,
}

impl ScanOptions {
    pub fn new(lo: f64, hi: f64, steps: usize) -> Self {
        ScanOptions {
            lo,
            hi,
            steps,
            refine: 0,
            solve: MonotoneOptions::default(),
            mass_floor: None,
            probe_amplitude: None,
            growth_factor: 4.0,
            probe_max_outer: 2000,
            resolution: None,
            keep_solutions: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    /// Converged with mass above the floor.
    Converged,
    /// Probe mass kept growing past the growth target.
    Grew,
    /// Mass fell below the floor.
    Collapsed,
    /// Neither decision reached within the iteration cap.
    Stalled,
    BarrierFailure,
}

impl Classification {
    pub fn success(self) -> bool {
        matches!(self, Classification::Converged | Classification::Grew)
    }

    /// Stalled runs are left out of the bracket.
    pub fn decisive(self) -> bool {
        self != Classification::Stalled
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Path {
    /// Monotone iteration from the certified barrier pair.
    Certified,
    /// Monotone iteration from a solution at a smaller lambda.
    Seeded,
    /// Iteration from a small bump with the lower bound relaxed to zero.
    Probe,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanPoint {
    pub lambda: f64,
    pub classification: Classification,
    pub success: bool,
    pub path: Path,
    pub positive_mass: f64,
    pub residual: f64,
    pub outer_iterations: usize,
    pub monotone_ok: Option<bool>,
    pub eps: Option<f64>,
    #[serde(rename = "M")]
    pub m: Option<f64>,
    pub seeded_from: Option<f64>,
    /// Weak subsolution check of the seed at this lambda.
    pub seed_check: Option<WeakCheckReport>,
    pub note: Option<String>,
    #[serde(skip)]
    pub solution: Option<GridField>,
}

/// `[fail, success]`; `success = None` means no ladder point succeeded.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Bracket {
    pub fail: Option<f64>,
    pub success: Option<f64>,
}

impl Bracket {
    pub fn width(&self) -> Option<f64> {
        Some(self.success? - self.fail?)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanReport {
    pub regime: Regime,
    pub mass_floor: f64,
    pub probe_amplitude: f64,
    pub nonexistence_bound: Option<f64>,
    /// Ladder points first, then refinement points.
    pub points: Vec<ScanPoint>,
    pub bracket: Bracket,
}

struct Scanner<'a> {
    template: &'a Problem,
    grid: &'a Arc<Grid>,
    opts: &'a ScanOptions,
    spec: Option<BarrierSpec>,
    sub_scan: Option<Result<SubScan, String>>,
    resolution: Vec<usize>,
    floor: f64,
    amplitude: f64,
}

impl Scanner<'_> {
    fn sub_scan(&mut self) -> Result<&SubScan, String> {
        if self.sub_scan.is_none() {
            let built = (|| {
                let spec = self.spec.as_ref().ok_or("no barrier recipe in this regime")?;
                let sub = build_barrier(BarrierKind::Sub, spec, self.template).map_err(|e| e.to_string())?;
                SubScan::new(&sub, self.template, &self.resolution).map_err(|e| e.to_string())
            })();
            self.sub_scan = Some(built);
        }
        self.sub_scan.as_ref().unwrap().as_ref().map_err(Clone::clone)
    }

    fn upper(&self, prob: &Problem, floor: Option<&GridField>) -> (GridField, Option<f64>) {
        if let Some(spec) = &self.spec {
            if let Ok(m) = m_for_lambda(prob, spec, prob.lambda(), floor, &self.resolution) {
                let mut s = spec.clone();
                s.m = m;
                if let Ok(sup) = build_barrier(BarrierKind::Super, &s, prob) {
                    return (sample_to_grid(&sup, self.grid), Some(m));
                }
            }
        }
        (GridField::from_fn(self.grid.clone(), |_| f64::INFINITY), None)
    }

    fn point(&self, lambda: f64, path: Path) -> ScanPoint {
        ScanPoint {
            lambda,
            classification: Classification::Stalled,
            success: false,
            path,
            positive_mass: 0.0,
            residual: f64::NAN,
            outer_iterations: 0,
            monotone_ok: None,
            eps: None,
            m: None,
            seeded_from: None,
            seed_check: None,
            note: None,
            solution: None,
        }
    }

    fn monotone(&self, prob: &Problem, lower: &GridField, upper: &GridField, pt: &mut ScanPoint) {
        let res = monotone_iterate(prob, lower, upper, &self.opts.solve);
        let (report, converged) = match res {
            Ok(r) => (r, true),
            Err(SolveError::NonConvergence { report }) => (*report, false),
            Err(e) => {
                pt.classification = Classification::Stalled;
                pt.note = Some(e.to_string());
                return;
            }
        };
        pt.positive_mass = report.positive_mass;
        pt.residual = report.residual;
        pt.outer_iterations = report.iterations;
        pt.monotone_ok = Some(report.monotone_ok);
        pt.classification = if report.positive_mass < self.floor {
            Classification::Collapsed
        } else if converged {
            Classification::Converged
        } else {
            Classification::Stalled
        };
        if converged {
            pt.solution = Some(report.solution);
        }
    }

    fn probe(&self, prob: &Problem, upper: &GridField, pt: &mut ScanPoint) {
        let dom = self.grid.domain().clone();
        let mut u = GridField::from_fn(self.grid.clone(), |x| {
            self.amplitude
                * x.iter()
                    .zip(dom.axes())
                    .map(|(&xi, iv)| (PI * (xi - iv.a) / iv.length()).sin().max(0.0))
                    .product::<f64>()
        });
        u.zero_boundary();
        for (v, &up) in u.values_mut().iter_mut().zip(upper.values()) {
            *v = v.min(up);
        }
        let zero = GridField::zeros(self.grid.clone());
        let reg = self.opts.solve.reg.unwrap_or_else(|| default_reg(&u, upper));
        let tol = self.opts.solve.tol;
        let inner = ConvexOptions { tol: self.opts.solve.inner_fraction * tol, reg, max_iter: self.opts.solve.max_inner };
        let start_mass = u.max();
        let capped = upper.values().iter().all(|v| v.is_finite());
        let mut grew = false;
        for it in 0..self.opts.probe_max_outer {
            let rhs = load(&u, prob);
            let next = match convex_subproblem(&rhs, prob, &zero, upper, Some(&u), &inner) {
                Ok(o) => o.solution,
                Err(e) => {
                    pt.note = Some(e.to_string());
                    return;
                }
            };
            let incr = next.max_abs_diff(&u).unwrap_or(f64::INFINITY);
            u = next;
            let mass = u.max();
            pt.outer_iterations = it + 1;
            pt.positive_mass = mass;
            if mass < self.floor {
                pt.classification = Classification::Collapsed;
                pt.residual = residual_max(&u, prob, reg);
                return;
            }
            // Relative: a slowly decaying mode has small absolute increments.
            if incr <= tol * mass {
                let residual = residual_max(&u, prob, reg);
                if residual <= tol {
                    pt.residual = residual;
                    pt.classification = Classification::Converged;
                    pt.solution = Some(u);
                    return;
                }
            }
            if mass >= self.opts.growth_factor * start_mass {
                grew = true;
                // Without a finite cap there is nothing to converge to.
                if !capped {
                    break;
                }
            }
        }
        pt.residual = residual_max(&u, prob, reg);
        if grew {
            pt.classification = Classification::Grew;
        }
    }

    fn evaluate(&mut self, lambda: f64, seed: Option<(f64, &GridField)>) -> ScanPoint {
        let prob = match self.template.with_lambda(lambda) {
            Ok(p) => p,
            Err(e) => {
                let mut pt = self.point(lambda, Path::Probe);
                pt.classification = Classification::BarrierFailure;
                pt.note = Some(e.to_string());
                return pt;
            }
        };
        let mut pt;
        if let Some((from, s)) = seed {
            pt = self.point(lambda, Path::Seeded);
            pt.seeded_from = Some(from);
            pt.seed_check = weak_inequality_check(s, &prob, CheckKind::Sub, self.opts.solve.tol).ok();
            let (upper, m) = self.upper(&prob, Some(s));
            pt.m = m;
            self.monotone(&prob, s, &upper, &mut pt);
        } else {
            let eps = self.sub_scan().ok().and_then(|scan| epsilon_if_admissible(scan, lambda));
            let (upper, m) = self.upper(&prob, None);
            match (eps, &self.spec) {
                (Some(eps), Some(spec)) => {
                    pt = self.point(lambda, Path::Certified);
                    let mut s = spec.clone();
                    s.eps = eps;
                    pt.eps = Some(eps);
                    pt.m = m;
                    match build_barrier(BarrierKind::Sub, &s, &prob) {
                        Ok(sub) => {
                            let mut lower = sample_to_grid(&sub, self.grid);
                            for (v, &up) in lower.values_mut().iter_mut().zip(upper.values()) {
                                *v = v.min(up);
                            }
                            self.monotone(&prob, &lower, &upper, &mut pt);
                        }
                        Err(e) => {
                            pt.classification = Classification::BarrierFailure;
                            pt.note = Some(e.to_string());
                        }
                    }
                }
                _ => {
                    pt = self.point(lambda, Path::Probe);
                    pt.m = m;
                    self.probe(&prob, &upper, &mut pt);
                }
            }
        }
        pt.success = pt.classification.success();
        pt
    }
}

fn bracket(points: &[ScanPoint]) -> Bracket {
    let decisive = points.iter().filter(|p| p.classification.decisive());
    let success = decisive.clone().filter(|p| p.success).map(|p| p.lambda).fold(None, |m: Option<f64>, l| {
        Some(m.map_or(l, |m| m.min(l)))
    });
    let fail = decisive
        .filter(|p| !p.success && success.is_none_or(|s| p.lambda < s))
        .map(|p| p.lambda)
        .fold(None, |m: Option<f64>, l| Some(m.map_or(l, |m| m.max(l))));
    Bracket { fail, success }
}

/// Runs the ladder `lo * (hi/lo)^{k/(steps-1)}` in increasing order, seeding each
/// point after a converged success with that solution, then bisects the bracket
/// geometrically `refine` times with cold starts.
pub fn lambda_scan(template: &Problem, grid: &Arc<Grid>, opts: &ScanOptions) -> Result<ScanReport, SolveError> {
    if !(opts.lo > 0.0) || !(opts.lo < opts.hi) || !opts.hi.is_finite() {
        return Err(SolveError::InvalidOption(format!("need 0 < lo < hi, got lo = {}, hi = {}", opts.lo, opts.hi)));
    }
    if opts.steps < 2 {
        return Err(SolveError::InvalidOption(format!("steps = {} < 2", opts.steps)));
    }
    if grid.dim() != template.dim() || grid.domain() != template.omega() {
        return Err(SolveError::GridMismatch);
    }
    let floor = opts.mass_floor.unwrap_or(10.0 * opts.solve.tol);
    let amplitude = opts.probe_amplitude.unwrap_or(10.0 * floor);
    if !(floor > 0.0) || !(amplitude > floor) {
        return Err(SolveError::InvalidOption(format!("mass floor {floor} and probe amplitude {amplitude}")));
    }
    let spec = match template.regime() {
        Regime::OutOfTheorem => None,
        _ => BarrierSpec::default_for(template).ok(),
    };
    let mut sc = Scanner {
        template,
        grid,
        opts,
        spec,
        sub_scan: None,
        resolution: opts.resolution.clone().unwrap_or_else(|| grid.counts().to_vec()),
        floor,
        amplitude,
    };

    let ratio = (opts.hi / opts.lo).powf(1.0 / (opts.steps - 1) as f64);
    let mut points: Vec<ScanPoint> = Vec::new();
    let mut seed: Option<(f64, GridField)> = None;
    for k in 0..opts.steps {
        let lambda = if k + 1 == opts.steps { opts.hi } else { opts.lo * ratio.powi(k as i32) };
        let pt = sc.evaluate(lambda, seed.as_ref().map(|(l, s)| (*l, s)));
        if pt.classification == Classification::Converged {
            if let Some(s) = &pt.solution {
                seed = Some((lambda, s.clone()));
            }
        }
        points.push(pt);
    }
    for _ in 0..opts.refine {
        let b = bracket(&points);
        let (Some(f), Some(s)) = (b.fail, b.success) else { break };
        let mid = (f * s).sqrt();
        let pt = sc.evaluate(mid, None);
        points.push(pt);
    }
    if !opts.keep_solutions {
        for p in &mut points {
            p.solution = None;
        }
    }
    let bracket = bracket(&points);
    Ok(ScanReport {
        regime: template.regime(),
        mass_floor: floor,
        probe_amplitude: amplitude,
        nonexistence_bound: nonexistence_bound(template).ok(),
        points,
        bracket,
    })
}
