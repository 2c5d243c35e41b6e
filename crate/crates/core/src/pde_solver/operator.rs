//! Conservative flux-difference discretization of the orthotropic p-Laplacian.

use rayon::prelude::*;

use crate::flux::{flux, flux_slope, potential};
use crate::grid::{Grid, GridField};
use crate::problem::Problem;

use super::banded::BandMatrix;

/// `-sum_i [flux(forward difference) - flux(backward difference)] / h_i` at
/// interior nodes; boundary entries are zero.
pub fn apply_operator(u: &GridField, prob: &Problem, reg: f64) -> GridField {
    let grid = u.grid().clone();
    let out = stencil(&grid, prob.p(), reg, u.values());
    GridField::from_values(grid, out).expect("length matches grid")
}

pub(crate) fn stencil(grid: &Grid, p: &[f64], reg: f64, u: &[f64]) -> Vec<f64> {
    (0..grid.len())
        .into_par_iter()
        .map(|k| {
            if grid.is_boundary(k) {
                return 0.0;
            }
            let mut acc = 0.0;
            for (axis, (&h, &pa)) in grid.spacing().iter().zip(p).enumerate() {
                let s = grid.strides()[axis];
                let fwd = flux((u[k + s] - u[k]) / h, pa, reg);
                let bwd = flux((u[k] - u[k - s]) / h, pa, reg);
                acc -= (fwd - bwd) / h;
            }
            acc
        })
        .collect()
}

/// Discrete energy `sum_edges sum_i potential(g) - sum_nodes rhs u`, per unit
/// node volume, with its gradient and Hessian.
pub(crate) struct Energy<'a> {
    pub grid: &'a Grid,
    pub p: &'a [f64],
    pub reg: f64,
    pub rhs: &'a [f64],
}

impl Energy<'_> {
    fn edges(&self, axis: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        let g = self.grid;
        let (stride, last) = (g.strides()[axis], g.counts()[axis] - 1);
        (0..g.len())
            .filter(move |&k| g.axis_index(k, axis) != last)
            .map(move |k| (k, k + stride))
            .filter(move |&(k, l)| !g.is_boundary(k) || !g.is_boundary(l))
    }

    pub fn value(&self, u: &[f64]) -> f64 {
        let mut e = 0.0;
        for axis in 0..self.grid.dim() {
            let (h, p) = (self.grid.spacing()[axis], self.p[axis]);
            e += self.edges(axis).map(|(k, l)| potential((u[l] - u[k]) / h, p, self.reg)).sum::<f64>();
        }
        let load: f64 = (0..self.grid.len()).filter(|&k| !self.grid.is_boundary(k)).map(|k| self.rhs[k] * u[k]).sum();
        e - load
    }

    /// `A(u) - rhs` at interior nodes, zero on the boundary.
    pub fn gradient(&self, u: &[f64]) -> Vec<f64> {
        let mut g = stencil(self.grid, self.p, self.reg, u);
        for (k, gk) in g.iter_mut().enumerate() {
            if !self.grid.is_boundary(k) {
                *gk -= self.rhs[k];
            }
        }
        g
    }

    /// Per-edge flux slopes over `h^2`, clamped to `[1e-10, 1e10]` times the
    /// largest finite slope on each axis.
    pub fn curvatures(&self, u: &[f64]) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::new();
        for axis in 0..self.grid.dim() {
            let (h, p) = (self.grid.spacing()[axis], self.p[axis]);
            let first = out.len();
            out.extend(self.edges(axis).map(|(k, l)| (k, l, flux_slope((u[l] - u[k]) / h, p, self.reg))));
            let finite_max = out[first..].iter().map(|e| e.2).filter(|c| c.is_finite()).fold(0.0, f64::max);
            let (floor, cap) = if finite_max > 0.0 { (1e-10 * finite_max, 1e10 * finite_max) } else { (1.0, 1.0) };
            for e in &mut out[first..] {
                e.2 = e.2.clamp(floor, cap) / (h * h);
            }
        }
        out
    }

    /// Hessian diagonal at interior nodes (zero on the boundary).
    pub fn diagonal(&self, curv: &[(usize, usize, f64)]) -> Vec<f64> {
        let mut diag = vec![0.0; self.grid.len()];
        for &(k, l, c) in curv {
            if !self.grid.is_boundary(k) {
                diag[k] += c;
            }
            if !self.grid.is_boundary(l) {
                diag[l] += c;
            }
        }
        diag
    }

    /// Hessian restricted to `free` nodes, other rows set to identity.
    pub fn hessian(&self, curv: &[(usize, usize, f64)], free: &[bool]) -> BandMatrix {
        let grid = self.grid;
        let bw = grid.strides()[grid.dim() - 1];
        let mut m = BandMatrix::zeros(grid.len(), bw);
        for &(k, l, c) in curv {
            if free[k] {
                m.add(k, k, c);
            }
            if free[l] {
                m.add(l, l, c);
            }
            if free[k] && free[l] {
                m.add(l, k, -c);
            }
        }
        for k in 0..grid.len() {
            if !free[k] {
                m.set_identity_row(k);
            }
        }
        m
    }
}
