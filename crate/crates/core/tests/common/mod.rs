#![allow(dead_code)]

use std::sync::Arc;

use aniso_core::{
    build_barrier, epsilon_for_lambda, m_for_lambda, sample_to_grid, AxisBox, BarrierKind, BarrierSpec, Grid,
    GridField, Problem,
};

pub const SCAN_RES: usize = 129;

/// Certified barrier pair sampled on a uniform grid, with M dominating the
/// sampled subsolution.
pub fn barrier_pair(prob: &Problem, n: usize) -> (Arc<Grid>, GridField, GridField, BarrierSpec) {
    let res = vec![SCAN_RES; prob.dim()];
    let mut spec = BarrierSpec::default_for(prob).unwrap();
    spec.eps = epsilon_for_lambda(prob, &spec, prob.lambda(), &res).unwrap();
    let sub = build_barrier(BarrierKind::Sub, &spec, prob).unwrap();
    let grid = Arc::new(Grid::uniform(prob.omega().clone(), n).unwrap());
    let lower = sample_to_grid(&sub, &grid);
    spec.m = m_for_lambda(prob, &spec, prob.lambda(), Some(&lower), &res).unwrap();
    let sup = build_barrier(BarrierKind::Super, &spec, prob).unwrap();
    (grid.clone(), lower, sample_to_grid(&sup, &grid), spec)
}

pub fn unit_square(p: [f64; 2], q: f64, lambda: f64) -> Problem {
    Problem::new(p.to_vec(), q, lambda, AxisBox::unit(2)).unwrap()
}

fn rk4(c: f64, lambda: f64, e: f64, steps: usize) -> Vec<f64> {
    // In s = 1/2 - x: du/ds = -u', du'/ds = lambda u_+^e, from the crest (u = c, u' = 0).
    let h = 0.5 / steps as f64;
    let f = |y: [f64; 2]| [-y[1], lambda * y[0].max(0.0).powf(e)];
    let mut y = [c, 0.0];
    let mut out = vec![c];
    for _ in 0..steps {
        let k1 = f(y);
        let k2 = f([y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]]);
        let k3 = f([y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]]);
        let k4 = f([y[0] + h * k3[0], y[1] + h * k3[1]]);
        y[0] += h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]);
        y[1] += h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]);
        out.push(y[0]);
    }
    out
}

/// Symmetric shooting for `-u'' = lambda u^e` on (0,1) with zero ends:
/// profile from the crest to x = 0 at `steps` uniform steps.
pub fn symmetric_oracle(lambda: f64, e: f64, steps: usize) -> Vec<f64> {
    let (mut lo, mut hi) = (1e-6_f64, 1e3_f64);
    for _ in 0..200 {
        let mid = (lo * hi).sqrt();
        if *rk4(mid, lambda, e, steps).last().unwrap() > 0.0 {
            // Still positive at x = 0: crest too high for sublinear growth.
            hi = mid;
        } else {
            lo = mid;
        }
        if hi / lo - 1.0 < 1e-14 {
            break;
        }
    }
    rk4((lo * hi).sqrt(), lambda, e, steps)
}
