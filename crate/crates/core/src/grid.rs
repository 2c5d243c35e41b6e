//! Uniform tensor-product grids and nodal fields.

use std::io::Write;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::domain::AxisBox;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GridError {
    #[error("axis {axis}: need at least 3 nodes, got {n}")]
    TooFew { axis: usize, n: usize },
    #[error("grid has {n} axes but the box has {dim}")]
    Dimension { n: usize, dim: usize },
    #[error("field has {got} values, grid has {expected} nodes")]
    Length { expected: usize, got: usize },
    #[error("fields live on different grids")]
    Mismatch,
}

/// Nodes `a_i + k h_i`, `k = 0..n_i`, axis 0 varying fastest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    bx: AxisBox,
    n: Vec<usize>,
    h: Vec<f64>,
    strides: Vec<usize>,
    len: usize,
}

impl Grid {
    pub fn new(bx: AxisBox, n: &[usize]) -> Result<Self, GridError> {
        if n.len() != bx.dim() {
            return Err(GridError::Dimension { n: n.len(), dim: bx.dim() });
        }
        if let Some((axis, &bad)) = n.iter().enumerate().find(|(_, &k)| k < 3) {
            return Err(GridError::TooFew { axis, n: bad });
        }
        let h = bx.sides().iter().zip(n).map(|(d, &k)| d / (k - 1) as f64).collect();
        let mut strides = Vec::with_capacity(n.len());
        let mut len = 1;
        for &k in n {
            strides.push(len);
            len *= k;
        }
        Ok(Grid { bx, n: n.to_vec(), h, strides, len })
    }

    /// Same node count on every axis.
    pub fn uniform(bx: AxisBox, n: usize) -> Result<Self, GridError> {
        let counts = vec![n; bx.dim()];
        Grid::new(bx, &counts)
    }

    pub fn domain(&self) -> &AxisBox {
        &self.bx
    }

    pub fn dim(&self) -> usize {
        self.n.len()
    }

    pub fn counts(&self) -> &[usize] {
        &self.n
    }

    pub fn spacing(&self) -> &[f64] {
        &self.h
    }

    pub fn strides(&self) -> &[usize] {
        &self.strides
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Coordinate of index `k` on `axis`; end nodes sit exactly on the box faces.
    #[inline]
    pub fn coord(&self, axis: usize, k: usize) -> f64 {
        let iv = self.bx.axis(axis);
        if k + 1 == self.n[axis] {
            iv.b
        } else {
            iv.a + k as f64 * self.h[axis]
        }
    }

    pub fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dim()];
        for (axis, slot) in idx.iter_mut().enumerate() {
            *slot = flat % self.n[axis];
            flat /= self.n[axis];
        }
        idx
    }

    #[inline]
    pub fn axis_index(&self, flat: usize, axis: usize) -> usize {
        (flat / self.strides[axis]) % self.n[axis]
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter().zip(&self.strides).map(|(k, s)| k * s).sum()
    }

    pub fn point(&self, flat: usize) -> Vec<f64> {
        (0..self.dim()).map(|axis| self.coord(axis, self.axis_index(flat, axis))).collect()
    }

    pub fn is_boundary(&self, flat: usize) -> bool {
        (0..self.dim()).any(|axis| {
            let k = self.axis_index(flat, axis);
            k == 0 || k + 1 == self.n[axis]
        })
    }

    /// Volume `prod h_i` of an interior node's dual cell (hat-function mass).
    pub fn node_volume(&self) -> f64 {
        self.h.iter().product()
    }

    pub fn interior_nodes(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(move |&k| !self.is_boundary(k))
    }
}

/// One value per grid node.
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    grid: Arc<Grid>,
    values: Vec<f64>,
}

impl GridField {
    pub fn zeros(grid: Arc<Grid>) -> Self {
        let values = vec![0.0; grid.len()];
        GridField { grid, values }
    }

    pub fn from_values(grid: Arc<Grid>, values: Vec<f64>) -> Result<Self, GridError> {
        if values.len() != grid.len() {
            return Err(GridError::Length { expected: grid.len(), got: values.len() });
        }
        Ok(GridField { grid, values })
    }

    pub fn from_fn(grid: Arc<Grid>, f: impl Fn(&[f64]) -> f64) -> Self {
        let values = (0..grid.len()).map(|k| f(&grid.point(k))).collect();
        GridField { grid, values }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn same_grid(&self, other: &GridField) -> bool {
        Arc::ptr_eq(&self.grid, &other.grid) || *self.grid == *other.grid
    }

    pub fn max(&self) -> f64 {
        self.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn max_abs_diff(&self, other: &GridField) -> Result<f64, GridError> {
        if !self.same_grid(other) {
            return Err(GridError::Mismatch);
        }
        Ok(self.values.iter().zip(&other.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
    }

    /// Sets boundary nodes to zero.
    pub fn zero_boundary(&mut self) {
        for k in 0..self.values.len() {
            if self.grid.is_boundary(k) {
                self.values[k] = 0.0;
            }
        }
    }

    /// Largest `|u|` over boundary nodes.
    pub fn boundary_max_abs(&self) -> f64 {
        (0..self.values.len())
            .filter(|&k| self.grid.is_boundary(k))
            .map(|k| self.values[k].abs())
            .fold(0.0, f64::max)
    }

    pub fn boundary_min(&self) -> f64 {
        (0..self.values.len())
            .filter(|&k| self.grid.is_boundary(k))
            .map(|k| self.values[k])
            .fold(f64::INFINITY, f64::min)
    }

    /// CSV with header `i0,..,x0,..,value`: one row per node.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let dim = self.grid.dim();
        let mut header: Vec<String> = (0..dim).map(|i| format!("i{i}")).collect();
        header.extend((0..dim).map(|i| format!("x{i}")));
        header.push("value".into());
        writeln!(out, "{}", header.join(","))?;
        for k in 0..self.values.len() {
            let idx = self.grid.multi_index(k);
            let mut row: Vec<String> = idx.iter().map(|i| i.to_string()).collect();
            row.extend(self.grid.point(k).iter().map(|x| format!("{x:.17e}")));
            row.push(format!("{:.17e}", self.values[k]));
            writeln!(out, "{}", row.join(","))?;
        }
        Ok(())
    }
}
