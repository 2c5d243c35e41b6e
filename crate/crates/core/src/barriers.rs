//! Explicit barriers built from products of 1D eigenfunctions.
//!
//! The subsolution is `eps * prod_i v_i(x_i)^{alpha_i}` on an inner box `U`
//! (zero outside), the supersolution is `M * prod_i v_i(x_i)` with the `v_i`
//! taken on an outer box strictly containing the domain. Both thresholds come
//! from pointwise inequalities on these products:
//!
//! * the subsolution inequality holds wherever `lambda >= S(x)`, with
//!   `S = sum_i alpha_i^{p_i-1} (eps prod_{j!=i} v_j^{alpha_j})^{p_i-q}
//!   v_i^{alpha_i(p_i-q)-p_i} [(1-alpha_i)(p_i-1)|v_i'|^{p_i} + eta_i v_i^{p_i}]`;
//! * the supersolution inequality holds wherever
//!   `sum_i eta_i (M prod_j v_j)^{p_i-q} >= lambda`.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::domain::{AxisBox, Interval};
use crate::eigen1d::{solve_eigenpair, EigenError, Eigenpair1D, DEFAULT_TOL};
use crate::grid::{Grid, GridField};
use crate::problem::{Problem, Regime};

/// Multiplier applied to the strict lower bounds when choosing default exponents.
pub const ALPHA_FACTOR: f64 = 2.0;
/// Outer box: domain sides grown by this fraction on each end.
pub const OUTER_MARGIN: f64 = 0.25;
/// Default tensor resolution for threshold scans (multiple of 32, plus one).
pub const DEFAULT_SCAN_NODES: usize = 257;
/// Samples per boundary layer in the delta certificate.
const LAYER_SAMPLES: usize = 2000;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BarrierError {
    #[error("regime {regime} (q = {q}, p_N = {p_max}): no barrier recipe for this case")]
    Regime { regime: Regime, q: f64, p_max: f64 },
    #[error("the nonexistence bound needs q = p_1 (q = {q}, p_1 = {p_min})")]
    NotCriticalCase { q: f64, p_min: f64 },
    #[error("invalid barrier spec: {0}")]
    InvalidSpec(String),
    #[error("outer box does not strictly contain the domain closure")]
    Containment,
    #[error("point {x:?} is on or outside the inner box boundary")]
    EvaluationAtBoundary { x: Vec<f64> },
    #[error("axis {axis}: no boundary layer down to width {delta_min:e} makes the bracket negative")]
    CertificationFailure { axis: usize, delta_min: f64 },
    #[error(
        "axis {axis} has p = {p} < q = {q}: its summand grows like v_j^{{alpha_j (p - q)}} near the other faces, so max S is infinite"
    )]
    Unbounded { axis: usize, p: f64, q: f64 },
    #[error("lambda = {lambda} admits no subsolution scale eps with lambda_* <= lambda")]
    NoAdmissibleEpsilon { lambda: f64 },
    #[error("search for {what} did not terminate")]
    SearchExhausted { what: &'static str },
    #[error("scan resolution must list {expected} counts, each >= 3")]
    Resolution { expected: usize },
    #[error(transparent)]
    Eigen(#[from] EigenError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BarrierKind {
    Sub,
    Super,
}

/// Everything that defines the two barriers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BarrierSpec {
    /// Box `U` carrying the subsolution, inside the domain.
    pub inner: AxisBox,
    /// Box strictly containing the domain closure, carrying the supersolution.
    pub outer: AxisBox,
    pub eps: f64,
    pub alpha: Vec<f64>,
    #[serde(rename = "M")]
    pub m: f64,
    /// Certified boundary-layer widths, one per axis with `p_i <= q`.
    pub delta: Vec<Option<f64>>,
    /// Number of axes with `p_i <= q`.
    pub i0: usize,
}

/// Exponents `alpha_i = 2 p_i / (p_i - q)` where `p_i > q`, else `2`.
pub fn default_alpha(prob: &Problem) -> Result<Vec<f64>, BarrierError> {
    require_barrier_regime(prob)?;
    let q = prob.q();
    Ok(prob
        .p()
        .iter()
        .map(|&pi| if pi > q { ALPHA_FACTOR * pi / (pi - q) } else { ALPHA_FACTOR })
        .collect())
}

fn require_barrier_regime(prob: &Problem) -> Result<(), BarrierError> {
    match prob.regime() {
        Regime::OutOfTheorem => {
            Err(BarrierError::Regime { regime: prob.regime(), q: prob.q(), p_max: prob.p_max() })
        }
        _ => Ok(()),
    }
}

impl BarrierSpec {
    /// Inner box = domain, outer box = domain grown by 25% per side,
    /// `eps = M = 1`, default exponents.
    pub fn default_for(prob: &Problem) -> Result<Self, BarrierError> {
        let alpha = default_alpha(prob)?;
        Ok(BarrierSpec {
            inner: prob.omega().clone(),
            outer: prob.omega().inflated(OUTER_MARGIN),
            eps: 1.0,
            alpha,
            m: 1.0,
            delta: vec![None; prob.dim()],
            i0: prob.i0(),
        })
    }

    pub fn validate(&self, prob: &Problem) -> Result<(), BarrierError> {
        let n = prob.dim();
        if self.alpha.len() != n || self.inner.dim() != n || self.outer.dim() != n {
            return Err(BarrierError::InvalidSpec(format!("expected {n} axes")));
        }
        if !(self.eps > 0.0 && self.eps.is_finite()) {
            return Err(BarrierError::InvalidSpec(format!("eps = {} must be positive", self.eps)));
        }
        if !(self.m > 0.0 && self.m.is_finite()) {
            return Err(BarrierError::InvalidSpec(format!("M = {} must be positive", self.m)));
        }
        let q = prob.q();
        for (i, (&a, &pi)) in self.alpha.iter().zip(prob.p()).enumerate() {
            if !(a > 1.0) {
                return Err(BarrierError::InvalidSpec(format!("alpha[{i}] = {a} must exceed 1")));
            }
            if pi > q && !(a > pi / (pi - q)) {
                return Err(BarrierError::InvalidSpec(format!(
                    "alpha[{i}] = {a} must exceed p/(p-q) = {}",
                    pi / (pi - q)
                )));
            }
        }
        if !prob.omega().contains_box(&self.inner) {
            return Err(BarrierError::InvalidSpec("inner box leaves the domain".into()));
        }
        if !self.outer.strictly_contains_box(prob.omega()) {
            return Err(BarrierError::Containment);
        }
        Ok(())
    }
}

/// Evaluator for one barrier.
#[derive(Debug, Clone)]
pub struct BarrierFunction {
    kind: BarrierKind,
    spec: BarrierSpec,
    eigenpairs: Vec<Eigenpair1D>,
}

/// Builds the per-axis eigenpairs (inner intervals for `Sub`, outer for `Super`).
pub fn build_barrier(kind: BarrierKind, spec: &BarrierSpec, prob: &Problem) -> Result<BarrierFunction, BarrierError> {
    spec.validate(prob)?;
    let bx = match kind {
        BarrierKind::Sub => &spec.inner,
        BarrierKind::Super => &spec.outer,
    };
    let eigenpairs = prob
        .p()
        .par_iter()
        .zip(bx.axes().par_iter())
        .map(|(&pi, &iv)| solve_eigenpair(pi, iv, DEFAULT_TOL))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(BarrierFunction { kind, spec: spec.clone(), eigenpairs })
}

impl BarrierFunction {
    pub fn kind(&self) -> BarrierKind {
        self.kind
    }

    pub fn spec(&self) -> &BarrierSpec {
        &self.spec
    }

    pub fn eigenpairs(&self) -> &[Eigenpair1D] {
        &self.eigenpairs
    }

    fn support(&self) -> &AxisBox {
        match self.kind {
            BarrierKind::Sub => &self.spec.inner,
            BarrierKind::Super => &self.spec.outer,
        }
    }

    /// Same eigenpairs, new scale (`eps` for `Sub`, `M` for `Super`).
    pub fn rescaled(&self, scale: f64) -> BarrierFunction {
        let mut out = self.clone();
        match self.kind {
            BarrierKind::Sub => out.spec.eps = scale,
            BarrierKind::Super => out.spec.m = scale,
        }
        out
    }

    fn inside_open(&self, x: &[f64]) -> bool {
        self.support().axes().iter().zip(x).all(|(iv, &xi)| iv.a < xi && xi < iv.b)
    }

    fn v(&self, i: usize, xi: f64) -> f64 {
        self.eigenpairs[i].eval_v(xi).unwrap_or(0.0)
    }

    fn dv(&self, i: usize, xi: f64) -> f64 {
        self.eigenpairs[i].eval_dv(xi).unwrap_or(0.0)
    }

    /// Barrier value; the subsolution is exactly zero off the open inner box.
    pub fn value(&self, x: &[f64]) -> f64 {
        match self.kind {
            BarrierKind::Sub => {
                if !self.inside_open(x) {
                    return 0.0;
                }
                let prod: f64 =
                    x.iter().enumerate().map(|(i, &xi)| self.v(i, xi).powf(self.spec.alpha[i])).product();
                self.spec.eps * prod
            }
            BarrierKind::Super => {
                self.spec.m * x.iter().enumerate().map(|(i, &xi)| self.v(i, xi)).product::<f64>()
            }
        }
    }

    /// Partial derivative along `axis`.
    pub fn partial(&self, x: &[f64], axis: usize) -> f64 {
        match self.kind {
            BarrierKind::Sub => {
                if !self.inside_open(x) {
                    return 0.0;
                }
                let a = &self.spec.alpha;
                let others: f64 = x
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != axis)
                    .map(|(j, &xj)| self.v(j, xj).powf(a[j]))
                    .product();
                let xi = x[axis];
                self.spec.eps * a[axis] * others * self.v(axis, xi).powf(a[axis] - 1.0) * self.dv(axis, xi)
            }
            BarrierKind::Super => {
                let others: f64 =
                    x.iter().enumerate().filter(|&(j, _)| j != axis).map(|(j, &xj)| self.v(j, xj)).product();
                self.spec.m * others * self.dv(axis, x[axis])
            }
        }
    }
}

/// Nodal samples of a barrier.
pub fn sample_to_grid(bf: &BarrierFunction, grid: &Arc<Grid>) -> GridField {
    let values: Vec<f64> = (0..grid.len()).into_par_iter().map(|k| bf.value(&grid.point(k))).collect();
    GridField::from_values(grid.clone(), values).expect("length matches grid")
}

/// Value of `S` at a point with its split over `p_i <= q` (`s0`) and `p_i > q` (`s1`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SValue {
    pub total: f64,
    pub s0: f64,
    pub s1: f64,
    pub summands: Vec<f64>,
}

/// `(1 - alpha)(p - 1)|v'|^p + eta v^p`
#[inline]
fn bracket(alpha: f64, p: f64, eta: f64, v: f64, dv: f64) -> f64 {
    (1.0 - alpha) * (p - 1.0) * dv.abs().powf(p) + eta * v.powf(p)
}

fn summands_at(sub: &BarrierFunction, p: &[f64], q: f64, eps: f64, v: &[f64], dv: &[f64]) -> Vec<f64> {
    let alpha = &sub.spec.alpha;
    let n = p.len();
    (0..n)
        .map(|i| {
            let others: f64 = (0..n).filter(|&j| j != i).map(|j| v[j].powf(alpha[j])).product();
            let eta = sub.eigenpairs[i].eta();
            alpha[i].powf(p[i] - 1.0)
                * (eps * others).powf(p[i] - q)
                * v[i].powf(alpha[i] * (p[i] - q) - p[i])
                * bracket(alpha[i], p[i], eta, v[i], dv[i])
        })
        .collect()
}

fn split(summands: Vec<f64>, p: &[f64], q: f64) -> SValue {
    let (mut s0, mut s1) = (0.0, 0.0);
    for (s, &pi) in summands.iter().zip(p) {
        if pi <= q {
            s0 += s;
        } else {
            s1 += s;
        }
    }
    SValue { total: s0 + s1, s0, s1, summands }
}

/// Pointwise `S` for the subsolution at `x` strictly inside the inner box.
pub fn pointwise_s(sub: &BarrierFunction, prob: &Problem, x: &[f64]) -> Result<SValue, BarrierError> {
    if sub.kind != BarrierKind::Sub {
        return Err(BarrierError::InvalidSpec("pointwise S needs the subsolution".into()));
    }
    if x.len() != prob.dim() || !sub.inside_open(x) {
        return Err(BarrierError::EvaluationAtBoundary { x: x.to_vec() });
    }
    let v: Vec<f64> = x.iter().enumerate().map(|(i, &xi)| sub.v(i, xi)).collect();
    if v.iter().any(|&vi| vi <= 0.0) {
        return Err(BarrierError::EvaluationAtBoundary { x: x.to_vec() });
    }
    let dv: Vec<f64> = x.iter().enumerate().map(|(i, &xi)| sub.dv(i, xi)).collect();
    let s = summands_at(sub, prob.p(), prob.q(), sub.spec.eps, &v, &dv);
    Ok(split(s, prob.p(), prob.q()))
}

/// Halves `delta` from `d/4` until the bracket is negative on both boundary layers.
pub fn certify_layer(e: &Eigenpair1D, alpha: f64) -> Option<f64> {
    let Interval { a, b } = e.interval();
    let d = b - a;
    let (p, eta) = (e.p(), e.eta());
    let mut delta = 0.25 * d;
    while delta >= 1e-6 * d {
        let ok = (1..=LAYER_SAMPLES).all(|k| {
            let t = delta * k as f64 / LAYER_SAMPLES as f64;
            [a + t, b - t].iter().all(|&x| {
                let v = e.eval_v(x).unwrap_or(0.0);
                let dv = e.eval_dv(x).unwrap_or(0.0);
                bracket(alpha, p, eta, v, dv) < 0.0
            })
        });
        if ok {
            return Some(delta);
        }
        delta *= 0.5;
    }
    None
}

/// Summand tables of `S` at `eps = 1` over a tensor grid of the inner box.
///
/// `S(eps)` at a node is `sum_i eps^{p_i - q} base_i`, exactly.
#[derive(Debug, Clone)]
pub struct SubScan {
    exponents: Vec<f64>,
    points: Vec<Vec<f64>>,
    bases: Vec<Vec<f64>>,
    delta: Vec<Option<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubThreshold {
    pub lambda_star: f64,
    pub argmax: Vec<f64>,
    pub s0_at_max: f64,
    pub s1_at_max: f64,
    pub delta: Vec<Option<f64>>,
}

impl SubScan {
    pub fn new(sub: &BarrierFunction, prob: &Problem, resolution: &[usize]) -> Result<Self, BarrierError> {
        require_barrier_regime(prob)?;
        if sub.kind != BarrierKind::Sub {
            return Err(BarrierError::InvalidSpec("threshold scan needs the subsolution".into()));
        }
        let n = prob.dim();
        if resolution.len() != n || resolution.iter().any(|&k| k < 3) {
            return Err(BarrierError::Resolution { expected: n });
        }
        let (p, q) = (prob.p(), prob.q());
        if n >= 2 {
            if let Some(axis) = p.iter().position(|&pi| pi < q) {
                return Err(BarrierError::Unbounded { axis, p: p[axis], q });
            }
        }
        let mut delta = vec![None; n];
        for i in 0..n {
            if p[i] <= q {
                let d = certify_layer(&sub.eigenpairs[i], sub.spec.alpha[i]).ok_or(
                    BarrierError::CertificationFailure {
                        axis: i,
                        delta_min: 1e-6 * sub.spec.inner.axis(i).length(),
                    },
                )?;
                delta[i] = Some(d);
            }
        }
        let grid = Grid::new(sub.spec.inner.clone(), resolution).map_err(|_| BarrierError::Resolution { expected: n })?;
        let nodes: Vec<usize> = grid.interior_nodes().collect();
        let rows: Vec<(Vec<f64>, Vec<f64>)> = nodes
            .par_iter()
            .map(|&k| {
                let x = grid.point(k);
                let v: Vec<f64> = x.iter().enumerate().map(|(i, &xi)| sub.v(i, xi)).collect();
                let dv: Vec<f64> = x.iter().enumerate().map(|(i, &xi)| sub.dv(i, xi)).collect();
                let base = summands_at(sub, p, q, 1.0, &v, &dv);
                (x, base)
            })
            .collect();
        let (points, bases) = rows.into_iter().unzip();
        Ok(SubScan { exponents: p.iter().map(|pi| pi - q).collect(), points, bases, delta })
    }

    fn node_value(&self, k: usize, eps: f64) -> f64 {
        self.bases[k].iter().zip(&self.exponents).map(|(b, e)| eps.powf(*e) * b).sum()
    }

    /// Maximum of `S(eps)` over the scanned nodes.
    pub fn threshold(&self, eps: f64) -> SubThreshold {
        // First index wins ties, so the result is independent of partitioning.
        let (k, lambda_star) = (0..self.points.len())
            .into_par_iter()
            .map(|k| (k, self.node_value(k, eps)))
            .reduce(
                || (usize::MAX, f64::NEG_INFINITY),
                |a, b| if b.1 > a.1 || (b.1 == a.1 && b.0 < a.0) { b } else { a },
            );
        let (mut s0, mut s1) = (0.0, 0.0);
        if k != usize::MAX {
            for (i, (b, e)) in self.bases[k].iter().zip(&self.exponents).enumerate() {
                let term = eps.powf(*e) * b;
                if self.delta[i].is_some() || *e <= 0.0 {
                    s0 += term;
                } else {
                    s1 += term;
                }
            }
        }
        SubThreshold {
            lambda_star,
            argmax: self.points.get(k).cloned().unwrap_or_default(),
            s0_at_max: s0,
            s1_at_max: s1,
            delta: self.delta.clone(),
        }
    }

    pub fn delta(&self) -> &[Option<f64>] {
        &self.delta
    }
}

/// `lambda_* = max S` over the interior nodes of a tensor grid on the inner box,
/// after certifying the boundary layers of the `p_i <= q` axes.
///
/// The maximum is taken over every interior node, which contains the
/// delta-interior.
pub fn lambda_star_sub(sub: &BarrierFunction, prob: &Problem, resolution: &[usize]) -> Result<SubThreshold, BarrierError> {
    Ok(SubScan::new(sub, prob, resolution)?.threshold(sub.spec.eps))
}

/// Largest `eps <= 1` found by bisection with `lambda_*(eps) <= lambda`.
pub fn epsilon_for_lambda(
    prob: &Problem,
    template: &BarrierSpec,
    lambda: f64,
    resolution: &[usize],
) -> Result<f64, BarrierError> {
    if prob.regime() != Regime::Sublinear {
        return Err(BarrierError::Regime { regime: prob.regime(), q: prob.q(), p_max: prob.p_max() });
    }
    if !(lambda > 0.0) {
        return Err(BarrierError::NoAdmissibleEpsilon { lambda });
    }
    let mut spec = template.clone();
    spec.eps = 1.0;
    let sub = build_barrier(BarrierKind::Sub, &spec, prob)?;
    let scan = SubScan::new(&sub, prob, resolution)?;
    Ok(epsilon_from_scan(&scan, lambda)?)
}

/// Smallest `eps` tried before a lambda counts as below the `eps -> 0` limit
/// of `lambda_*` (positive in the intermediate regime).
pub(crate) const EPS_FLOOR: f64 = 1e-12;

/// [`epsilon_from_scan`] in either regime; `None` when even `EPS_FLOOR` is too large.
pub(crate) fn epsilon_if_admissible(scan: &SubScan, lambda: f64) -> Option<f64> {
    if !(lambda > 0.0) || scan.threshold(EPS_FLOOR).lambda_star > lambda {
        return None;
    }
    epsilon_from_scan(scan, lambda).ok()
}

pub(crate) fn epsilon_from_scan(scan: &SubScan, lambda: f64) -> Result<f64, BarrierError> {
    let admissible = |eps: f64| scan.threshold(eps).lambda_star <= lambda;
    if admissible(1.0) {
        return Ok(1.0);
    }
    let mut hi = 1.0_f64;
    let mut lo = 0.5_f64;
    let mut halvings = 0;
    while !admissible(lo) {
        hi = lo;
        lo *= 0.5;
        halvings += 1;
        if halvings > 2000 || lo == 0.0 {
            return Err(BarrierError::SearchExhausted { what: "eps" });
        }
    }
    for _ in 0..60 {
        let mid = (lo * hi).sqrt();
        if admissible(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi / lo - 1.0 < 1e-12 {
            break;
        }
    }
    Ok(lo)
}

/// Products `prod_j v_j` of the outer eigenfunctions over a grid of the domain closure.
#[derive(Debug, Clone)]
pub struct SuperScan {
    exponents: Vec<f64>,
    etas: Vec<f64>,
    products: Vec<f64>,
}

impl SuperScan {
    pub fn new(sup: &BarrierFunction, prob: &Problem, resolution: &[usize]) -> Result<Self, BarrierError> {
        if sup.kind != BarrierKind::Super {
            return Err(BarrierError::InvalidSpec("supersolution threshold needs the supersolution".into()));
        }
        require_barrier_regime(prob)?;
        if !sup.spec.outer.strictly_contains_box(prob.omega()) {
            return Err(BarrierError::Containment);
        }
        let n = prob.dim();
        if resolution.len() != n || resolution.iter().any(|&k| k < 3) {
            return Err(BarrierError::Resolution { expected: n });
        }
        let grid = Grid::new(prob.omega().clone(), resolution).map_err(|_| BarrierError::Resolution { expected: n })?;
        let unit = sup.rescaled(1.0);
        let products = (0..grid.len()).into_par_iter().map(|k| unit.value(&grid.point(k))).collect();
        Ok(SuperScan {
            exponents: prob.p().iter().map(|pi| pi - prob.q()).collect(),
            etas: sup.eigenpairs.iter().map(Eigenpair1D::eta).collect(),
            products,
        })
    }

    /// `min over nodes of sum_i eta_i (M P)^{p_i - q}`.
    pub fn threshold(&self, m: f64) -> f64 {
        self.products
            .par_iter()
            .map(|&pr| self.etas.iter().zip(&self.exponents).map(|(eta, e)| eta * (m * pr).powf(*e)).sum::<f64>())
            .reduce(|| f64::INFINITY, f64::min)
    }

    pub fn min_product(&self) -> f64 {
        self.products.iter().cloned().fold(f64::INFINITY, f64::min)
    }
}

/// `lambda^* = min over the domain closure of sum_i eta_i (M prod_j v_j)^{p_i - q}`.
pub fn lambda_star_super(sup: &BarrierFunction, prob: &Problem, resolution: &[usize]) -> Result<f64, BarrierError> {
    Ok(SuperScan::new(sup, prob, resolution)?.threshold(sup.spec.m))
}

/// First `M` in `1, 2, 4, ...` with `lambda^*(M) >= lambda` and, when a floor
/// is given, `M prod_j v_j >= floor` at every node of the floor's grid.
pub fn m_for_lambda(
    prob: &Problem,
    template: &BarrierSpec,
    lambda: f64,
    floor: Option<&GridField>,
    resolution: &[usize],
) -> Result<f64, BarrierError> {
    let mut spec = template.clone();
    spec.m = 1.0;
    let sup = build_barrier(BarrierKind::Super, &spec, prob)?;
    m_from_barrier(&sup, prob, lambda, floor, resolution)
}

pub(crate) fn m_from_barrier(
    sup: &BarrierFunction,
    prob: &Problem,
    lambda: f64,
    floor: Option<&GridField>,
    resolution: &[usize],
) -> Result<f64, BarrierError> {
    // q < p_N: the last term grows without bound in M.
    require_barrier_regime(prob)?;
    let scan = SuperScan::new(sup, prob, resolution)?;
    let unit = sup.rescaled(1.0);
    let floor_pairs: Vec<(f64, f64)> = match floor {
        Some(f) => {
            let g = f.grid();
            (0..g.len())
                .filter(|&k| f.values()[k] > 0.0)
                .map(|k| (unit.value(&g.point(k)), f.values()[k]))
                .collect()
        }
        None => Vec::new(),
    };
    let mut m = 1.0_f64;
    for _ in 0..2000 {
        let dominates = floor_pairs.iter().all(|&(pr, fl)| m * pr >= fl);
        if dominates && scan.threshold(m) >= lambda {
            return Ok(m);
        }
        m *= 2.0;
        if !m.is_finite() {
            break;
        }
    }
    Err(BarrierError::SearchExhausted { what: "M" })
}

/// `(2 / (d^1 p_1))^{p_1}`: below it no positive solution exists when `q = p_1`.
pub fn nonexistence_bound(prob: &Problem) -> Result<f64, BarrierError> {
    let p1 = prob.p_min();
    if (prob.q() - p1).abs() > 1e-12 * p1 {
        return Err(BarrierError::NotCriticalCase { q: prob.q(), p_min: p1 });
    }
    let d1 = prob.omega().axis(0).length();
    Ok((2.0 / (d1 * p1)).powf(p1))
}

/// Machine-readable threshold summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdSummary {
    pub regime: Regime,
    pub eps: f64,
    pub alpha: Vec<f64>,
    #[serde(rename = "M")]
    pub m: f64,
    pub delta: Option<f64>,
    pub lambda_star_sub: Option<f64>,
    pub lambda_star_super: Option<f64>,
    pub nonexistence_bound: Option<f64>,
    pub alpha_factor: f64,
}

impl ThresholdSummary {
    pub fn new(
        prob: &Problem,
        spec: &BarrierSpec,
        lambda_star_sub: Option<f64>,
        lambda_star_super: Option<f64>,
    ) -> Self {
        ThresholdSummary {
            regime: prob.regime(),
            eps: spec.eps,
            alpha: spec.alpha.clone(),
            m: spec.m,
            delta: spec.delta.iter().flatten().cloned().reduce(f64::min),
            lambda_star_sub,
            lambda_star_super,
            nonexistence_bound: nonexistence_bound(prob).ok(),
            alpha_factor: ALPHA_FACTOR,
        }
    }
}
