//! Box-constrained minimization of the discrete energy by projected Newton.

use serde::{Deserialize, Serialize};

use crate::grid::GridField;
use crate::problem::Problem;

use super::operator::Energy;
use super::SolveError;

const ARMIJO: f64 = 1e-4;
const MAX_BACKTRACK: usize = 60;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvexOptions {
    /// Stop when the projected-gradient max-norm drops to this.
    pub tol: f64,
    pub reg: f64,
    pub max_iter: usize,
}

impl Default for ConvexOptions {
    fn default() -> Self {
        ConvexOptions { tol: 1e-8, reg: 1e-8, max_iter: 200 }
    }
}

#[derive(Debug, Clone)]
pub struct ConvexOutcome {
    pub solution: GridField,
    pub iterations: usize,
    /// Energy after every accepted step, starting point included.
    pub energy_history: Vec<f64>,
    pub pg_history: Vec<f64>,
}

/// Diagonally scaled projected gradient: `|u - P(u - r/D)| * D`, which is `|r|`
/// away from the bounds.
fn projected_gradient(u: &[f64], r: &[f64], diag: &[f64], lo: &[f64], hi: &[f64], interior: &[bool]) -> f64 {
    (0..u.len())
        .filter(|&k| interior[k])
        .map(|k| {
            let d = diag[k].max(f64::MIN_POSITIVE);
            (u[k] - (u[k] - r[k] / d).clamp(lo[k], hi[k])).abs() * d
        })
        .fold(0.0, f64::max)
}

/// Minimizes `sum_i sum_edges potential - sum rhs u` (per node volume) over
/// `lower <= u <= upper` with zero boundary values.
///
/// Free variables take a Newton step, variables pinned at an active bound a
/// diagonally scaled gradient step; the combined step is projected back into
/// the box and backtracked until the energy decreases.
pub fn convex_subproblem(
    rhs: &GridField,
    prob: &Problem,
    lower: &GridField,
    upper: &GridField,
    start: Option<&GridField>,
    opts: &ConvexOptions,
) -> Result<ConvexOutcome, SolveError> {
    if !rhs.same_grid(lower) || !rhs.same_grid(upper) || start.is_some_and(|s| !s.same_grid(rhs)) {
        return Err(SolveError::GridMismatch);
    }
    let grid = rhs.grid().clone();
    if grid.dim() != prob.dim() {
        return Err(SolveError::GridMismatch);
    }
    let n = grid.len();
    let interior: Vec<bool> = (0..n).map(|k| !grid.is_boundary(k)).collect();
    let lo: Vec<f64> = (0..n).map(|k| if interior[k] { lower.values()[k] } else { 0.0 }).collect();
    let hi: Vec<f64> = (0..n).map(|k| if interior[k] { upper.values()[k] } else { 0.0 }).collect();
    if let Some(k) = (0..n).find(|&k| interior[k] && !(lo[k] <= hi[k])) {
        return Err(SolveError::Ordering { node: k, gap: hi[k] - lo[k] });
    }

    let en = Energy { grid: &grid, p: prob.p(), reg: opts.reg, rhs: rhs.values() };
    let mut u: Vec<f64> = match start {
        Some(s) => s.values().to_vec(),
        None => lo.clone(),
    };
    for k in 0..n {
        u[k] = u[k].clamp(lo[k], hi[k]);
    }
    let mut e = en.value(&u);
    let mut energy_history = vec![e];
    let mut pg_history = Vec::new();

    for it in 0..opts.max_iter {
        let r = en.gradient(&u);
        let curv = en.curvatures(&u);
        let diag = en.diagonal(&curv);
        let pg = projected_gradient(&u, &r, &diag, &lo, &hi, &interior);
        pg_history.push(pg);
        if pg <= opts.tol {
            let solution = GridField::from_values(grid.clone(), u).expect("length matches grid");
            return Ok(ConvexOutcome { solution, iterations: it, energy_history, pg_history });
        }
        // A node is pinned when the scaled step would take it past a nearby bound.
        let scale = u.iter().fold(0.0_f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
        let free: Vec<bool> = (0..n)
            .map(|k| {
                if !interior[k] {
                    return false;
                }
                let s = r[k] / diag[k].max(f64::MIN_POSITIVE);
                let band = (1e-3 * scale).min((u[k] - (u[k] - s).clamp(lo[k], hi[k])).abs());
                !((u[k] <= lo[k] + band && r[k] > 0.0) || (u[k] >= hi[k] - band && r[k] < 0.0))
            })
            .collect();
        let h = en.hessian(&curv, &free);
        let rf: Vec<f64> = (0..n).map(|k| if free[k] { r[k] } else { 0.0 }).collect();
        let df = h.cholesky().map_err(|_| SolveError::Factorization)?.solve(&rf);
        let d: Vec<f64> = (0..n)
            .map(|k| {
                if !interior[k] {
                    0.0
                } else if free[k] {
                    -df[k]
                } else {
                    -r[k] / diag[k].max(f64::MIN_POSITIVE)
                }
            })
            .collect();

        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..MAX_BACKTRACK {
            let trial: Vec<f64> = (0..n).map(|k| (u[k] + t * d[k]).clamp(lo[k], hi[k])).collect();
            let predicted: f64 = (0..n).map(|k| r[k] * (trial[k] - u[k])).sum();
            let et = en.value(&trial);
            if et <= e + ARMIJO * predicted {
                accepted = Some((trial, et));
                break;
            }
            // At the round-off floor of the energy, fall back on the gradient.
            if (et - e).abs() <= 1e-13 * e.abs().max(1e-300) * (n as f64).sqrt() {
                let tc = en.curvatures(&trial);
                let pt = projected_gradient(&trial, &en.gradient(&trial), &en.diagonal(&tc), &lo, &hi, &interior);
                if pt < pg {
                    accepted = Some((trial, et.min(e)));
                    break;
                }
            }
            t *= 0.5;
        }
        match accepted {
            Some((trial, et)) => {
                u = trial;
                e = et;
                energy_history.push(e);
            }
            None => break,
        }
    }
    Err(SolveError::InnerNonConvergence { pg_history })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::AxisBox;
    use crate::grid::Grid;
    use std::sync::Arc;

    fn line(n: usize) -> Arc<Grid> {
        Arc::new(Grid::uniform(AxisBox::unit(1), n).unwrap())
    }

    fn open_bounds(g: &Arc<Grid>) -> (GridField, GridField) {
        (
            GridField::from_fn(g.clone(), |_| -1e6),
            GridField::from_fn(g.clone(), |_| 1e6),
        )
    }

    #[test]
    fn zero_load_gives_zero() {
        let prob = Problem::new(vec![3.0, 2.0], 1.5, 1.0, AxisBox::unit(2)).unwrap();
        let g = Arc::new(Grid::uniform(AxisBox::unit(2), 9).unwrap());
        let (lo, hi) = open_bounds(&g);
        let start = GridField::from_fn(g.clone(), |x| x[0] * (1.0 - x[0]) * x[1]);
        let out = convex_subproblem(&GridField::zeros(g), &prob, &lo, &hi, Some(&start), &ConvexOptions::default())
            .unwrap();
        assert!(out.solution.values().iter().all(|v| v.abs() < 1e-6), "{}", out.solution.max());
    }

    #[test]
    fn linear_unit_load_is_the_parabola() {
        let prob = Problem::new(vec![2.0], 1.5, 1.0, AxisBox::unit(1)).unwrap();
        let g = line(65);
        let (lo, hi) = open_bounds(&g);
        let rhs = GridField::from_fn(g.clone(), |_| 1.0);
        let out = convex_subproblem(&rhs, &prob, &lo, &hi, None, &ConvexOptions::default()).unwrap();
        for k in 0..g.len() {
            let x = g.coord(0, k);
            // The three-point stencil is exact on quadratics.
            assert!((out.solution.values()[k] - 0.5 * x * (1.0 - x)).abs() < 1e-9);
        }
    }

    #[test]
    fn p4_unit_load_matches_closed_form() {
        // -(|u'|^2 u')' = 1: u' = cbrt(1/2 - x), u = (3/4)((1/2)^{4/3} - |1/2 - x|^{4/3}).
        let prob = Problem::new(vec![4.0], 1.5, 1.0, AxisBox::unit(1)).unwrap();
        let mut errs = Vec::new();
        for n in [65, 257] {
            let g = line(n);
            let (lo, hi) = open_bounds(&g);
            let rhs = GridField::from_fn(g.clone(), |_| 1.0);
            let opts = ConvexOptions { tol: 1e-10, reg: 1e-10, max_iter: 400 };
            let out = convex_subproblem(&rhs, &prob, &lo, &hi, None, &opts).unwrap();
            let err = (0..g.len())
                .map(|k| {
                    let x = g.coord(0, k);
                    let exact = 0.75 * (0.5_f64.powf(4.0 / 3.0) - (0.5 - x).abs().powf(4.0 / 3.0));
                    (out.solution.values()[k] - exact).abs()
                })
                .fold(0.0, f64::max);
            errs.push(err);
        }
        assert!(errs[1] < errs[0], "{errs:?}");
        assert!(errs[1] < 1e-4, "{errs:?}");
    }

    #[test]
    fn bounds_hold_and_energy_descends() {
        let prob = Problem::new(vec![1.5, 3.0], 1.5, 1.0, AxisBox::unit(2)).unwrap();
        let g = Arc::new(Grid::uniform(AxisBox::unit(2), 17).unwrap());
        let rhs = GridField::from_fn(g.clone(), |_| 5.0);
        let lo = GridField::from_fn(g.clone(), |x| 0.01 * x[0] * (1.0 - x[0]));
        let hi = GridField::from_fn(g.clone(), |_| 0.05);
        let opts = ConvexOptions { tol: 1e-8, reg: 1e-6, max_iter: 300 };
        let out = convex_subproblem(&rhs, &prob, &lo, &hi, None, &opts).unwrap();
        for k in g.interior_nodes() {
            let v = out.solution.values()[k];
            assert!(v >= lo.values()[k] && v <= hi.values()[k]);
        }
        for w in out.energy_history.windows(2) {
            assert!(w[1] <= w[0]);
        }
        assert!(out.solution.max() == 0.05);
    }

    #[test]
    fn crossed_bounds_are_rejected() {
        let prob = Problem::new(vec![2.0], 1.5, 1.0, AxisBox::unit(1)).unwrap();
        let g = line(9);
        let lo = GridField::from_fn(g.clone(), |_| 1.0);
        let hi = GridField::zeros(g.clone());
        let err = convex_subproblem(&GridField::zeros(g), &prob, &lo, &hi, None, &ConvexOptions::default());
        assert!(matches!(err, Err(SolveError::Ordering { .. })));
    }

    #[test]
    fn iteration_cap_reports_history() {
        let prob = Problem::new(vec![4.0], 1.5, 1.0, AxisBox::unit(1)).unwrap();
        let g = line(65);
        let (lo, hi) = open_bounds(&g);
        let rhs = GridField::from_fn(g.clone(), |_| 1.0);
        let opts = ConvexOptions { tol: 1e-14, reg: 1e-10, max_iter: 2 };
        match convex_subproblem(&rhs, &prob, &lo, &hi, None, &opts) {
            Err(SolveError::InnerNonConvergence { pg_history }) => assert_eq!(pg_history.len(), 2),
            other => panic!("{other:?}"),
        }
    }
}
