//! JSON run configuration.

use std::path::Path;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use serde::Deserialize;

use aniso_core::{AxisBox, Grid, MonotoneOptions, PipelineOptions, Problem};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub p: Vec<f64>,
    pub q: f64,
    #[serde(default)]
    pub lambda: Option<f64>,
    pub omega: Omega,
    pub grid: GridSpec,
    #[serde(default)]
    pub options: Options,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Omega {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub n: Vec<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Options {
    pub eps: Option<f64>,
    pub alpha: Option<Vec<f64>>,
    #[serde(rename = "M")]
    pub m: Option<f64>,
    pub tol: Option<f64>,
    pub reg: Option<f64>,
    pub max_outer: Option<usize>,
}

impl Config {
    pub fn load(path: &Path) -> Result<Config> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }

    /// Problem with axes sorted by exponent, and the grid in that axis order.
    pub fn problem(&self, lambda: f64) -> Result<(Problem, Arc<Grid>)> {
        let omega = AxisBox::from_bounds(&self.omega.a, &self.omega.b)?;
        let prob = Problem::new(self.p.clone(), self.q, lambda, omega)?;
        if self.grid.n.len() != prob.dim() {
            bail!("grid.n has {} entries for {} axes", self.grid.n.len(), prob.dim());
        }
        let counts: Vec<usize> = prob.axis_order().iter().map(|&k| self.grid.n[k]).collect();
        let grid = Grid::new(prob.omega().clone(), &counts)?;
        Ok((prob, Arc::new(grid)))
    }

    pub fn monotone(&self) -> MonotoneOptions {
        let mut m = MonotoneOptions::default();
        if let Some(t) = self.options.tol {
            m.tol = t;
        }
        if let Some(n) = self.options.max_outer {
            m.max_outer = n;
        }
        m.reg = self.options.reg;
        m
    }

    /// Exponents given in input order are permuted like the axes.
    pub fn pipeline(&self, prob: &Problem) -> Result<PipelineOptions> {
        let alpha = match &self.options.alpha {
            Some(a) if a.len() != prob.dim() => bail!("options.alpha has {} entries for {} axes", a.len(), prob.dim()),
            Some(a) => Some(prob.axis_order().iter().map(|&k| a[k]).collect()),
            None => None,
        };
        Ok(PipelineOptions {
            eps: self.options.eps,
            alpha,
            m: self.options.m,
            solve: self.monotone(),
            ..Default::default()
        })
    }
}
