//! Principal Dirichlet eigenpair of the one-dimensional p-Laplacian.
//!
//! The eigenfunction is found by shooting on the flux form
//! `v' = |w|^{(2-p)/(p-1)} w`, `w' = -eta |v|^{p-2} v` from `(v, w)(a) = (0, 1)`,
//! with `eta` bisected until the first return of `v` to zero lands on `b`.
//! Samples are rescaled so that `max v = 1`.

use serde::{Deserialize, Serialize};

use crate::domain::Interval;
use crate::interp::Pchip;
use crate::quadrature::tanh_sinh;

/// Minimum RK4 steps per unit length.
pub const STEPS_PER_UNIT: usize = 8192;
pub const DEFAULT_TOL: f64 = 1e-10;
/// Admissible `|v(b)|` after normalization.
pub const ENDPOINT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EigenError {
    #[error("invalid exponent p = {p}: need p > 1")]
    InvalidExponent { p: f64 },
    #[error("invalid tolerance {tol}: need tol > 0")]
    InvalidTolerance { tol: f64 },
    #[error("invalid interval ({a}, {b})")]
    InvalidInterval { a: f64, b: f64 },
    #[error("eigenvalue search failed to bracket: scanned eta in [{lo:e}, {hi:e}]")]
    SearchFailure { lo: f64, hi: f64 },
    #[error("shooting residual {residual:e} at the right endpoint exceeds {limit:e}")]
    EndpointResidual { residual: f64, limit: f64 },
    #[error("x = {x} outside [{a}, {b}]")]
    Domain { x: f64, a: f64, b: f64 },
    #[error("malformed eigenpair record: {0}")]
    Record(String),
}

/// `sign(x) |x|^e`, with `0 -> 0` for every `e`.
#[inline]
pub(crate) fn signed_pow(x: f64, e: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x.signum() * x.abs().powf(e)
    }
}

/// Half-period `pi_p = 2 int_0^1 (1 - s^p)^{-1/p} ds` by tanh-sinh quadrature.
pub fn pi_p(p: f64) -> Result<f64, EigenError> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(EigenError::InvalidExponent { p });
    }
    let est = tanh_sinh(
        |s, sc| {
            // 1 - s^p evaluated from the complement 1 - s.
            let one_minus = if s < 0.5 { 1.0 - s.powf(p) } else { -(p * (-sc).ln_1p()).exp_m1() };
            one_minus.powf(-1.0 / p)
        },
        1e-14,
    );
    Ok(2.0 * est.value)
}

/// One tabulated node of the eigenfunction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub x: f64,
    pub v: f64,
    pub dv: f64,
}

#[derive(Debug, Clone)]
pub struct Eigenpair1D {
    p: f64,
    interval: Interval,
    eta: f64,
    h: f64,
    v: Vec<f64>,
    dv: Vec<f64>,
    flux: Vec<f64>,
    v_interp: Pchip,
    dv_interp: Pchip,
}

/// Serialized form `{p, a, b, eta, mesh: [{x, v, dv}]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EigenpairRecord {
    pub p: f64,
    pub a: f64,
    pub b: f64,
    pub eta: f64,
    pub mesh: Vec<Sample>,
}

struct Shot {
    /// First zero of `v` after the start, if reached.
    zero: Option<f64>,
}

#[inline]
fn rhs(p: f64, eta: f64, v: f64, w: f64) -> (f64, f64) {
    (signed_pow(w, 1.0 / (p - 1.0)), -eta * signed_pow(v, p - 1.0))
}

#[inline]
fn rk4(p: f64, eta: f64, h: f64, v: f64, w: f64) -> (f64, f64) {
    let (k1v, k1w) = rhs(p, eta, v, w);
    let (k2v, k2w) = rhs(p, eta, v + 0.5 * h * k1v, w + 0.5 * h * k1w);
    let (k3v, k3w) = rhs(p, eta, v + 0.5 * h * k2v, w + 0.5 * h * k2w);
    let (k4v, k4w) = rhs(p, eta, v + h * k3v, w + h * k3w);
    (
        v + h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v),
        w + h / 6.0 * (k1w + 2.0 * k2w + 2.0 * k3w + k4w),
    )
}

/// Root in `(0, 1)` of the cubic Hermite through `(y0, m0)`, `(y1, m1)`,
/// slopes given per unit parameter. Falls back to the secant root.
fn hermite_root(y0: f64, y1: f64, m0: f64, m1: f64) -> f64 {
    let eval = |t: f64| {
        let t2 = t * t;
        let t3 = t2 * t;
        (2.0 * t3 - 3.0 * t2 + 1.0) * y0 + (t3 - 2.0 * t2 + t) * m0 + (-2.0 * t3 + 3.0 * t2) * y1 + (t3 - t2) * m1
    };
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    let (flo, fhi) = (eval(lo), eval(hi));
    if flo * fhi > 0.0 {
        return (y0 / (y0 - y1)).clamp(0.0, 1.0);
    }
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if eval(mid) * flo > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn shoot(p: f64, eta: f64, h: f64, max_steps: usize) -> Shot {
    let (mut v, mut w) = (0.0_f64, 1.0_f64);
    for k in 0..max_steps {
        let (vn, wn) = rk4(p, eta, h, v, w);
        if k > 0 && vn <= 0.0 {
            let m0 = signed_pow(w, 1.0 / (p - 1.0)) * h;
            let m1 = signed_pow(wn, 1.0 / (p - 1.0)) * h;
            let t = hermite_root(v, vn, m0, m1);
            return Shot { zero: Some((k as f64 + t) * h) };
        }
        v = vn;
        w = wn;
    }
    Shot { zero: None }
}

impl Eigenpair1D {
    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn interval(&self) -> Interval {
        self.interval
    }

    /// Principal eigenvalue.
    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// Mesh spacing of the tabulation.
    pub fn spacing(&self) -> f64 {
        self.h
    }

    pub fn len(&self) -> usize {
        self.v.len()
    }

    pub fn is_empty(&self) -> bool {
        self.v.is_empty()
    }

    pub fn x_at(&self, k: usize) -> f64 {
        if k + 1 == self.v.len() {
            self.interval.b
        } else {
            self.interval.a + k as f64 * self.h
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.v
    }

    pub fn derivatives(&self) -> &[f64] {
        &self.dv
    }

    /// Flux `|v'|^{p-2} v'` at the mesh nodes.
    pub fn flux_values(&self) -> &[f64] {
        &self.flux
    }

    pub fn samples(&self) -> Vec<Sample> {
        (0..self.v.len()).map(|k| Sample { x: self.x_at(k), v: self.v[k], dv: self.dv[k] }).collect()
    }

    fn check_domain(&self, x: f64) -> Result<(), EigenError> {
        let Interval { a, b } = self.interval;
        if x < a - self.h || x > b + self.h || x.is_nan() {
            return Err(EigenError::Domain { x, a, b });
        }
        Ok(())
    }

    /// Eigenfunction value; zero at (and up to one cell outside) the endpoints.
    pub fn eval_v(&self, x: f64) -> Result<f64, EigenError> {
        self.check_domain(x)?;
        if x <= self.interval.a || x >= self.interval.b {
            return Ok(0.0);
        }
        Ok(self.v_interp.eval(x).max(0.0))
    }

    /// Eigenfunction derivative; clamped to the endpoint slopes outside `[a, b]`.
    pub fn eval_dv(&self, x: f64) -> Result<f64, EigenError> {
        self.check_domain(x)?;
        Ok(self.dv_interp.eval(x))
    }

    pub fn to_record(&self) -> EigenpairRecord {
        EigenpairRecord {
            p: self.p,
            a: self.interval.a,
            b: self.interval.b,
            eta: self.eta,
            mesh: self.samples(),
        }
    }

    pub fn from_record(rec: &EigenpairRecord) -> Result<Self, EigenError> {
        if !(rec.p > 1.0) {
            return Err(EigenError::InvalidExponent { p: rec.p });
        }
        let interval =
            Interval::new(rec.a, rec.b).map_err(|_| EigenError::InvalidInterval { a: rec.a, b: rec.b })?;
        if rec.mesh.len() < 3 {
            return Err(EigenError::Record("mesh needs at least three samples".into()));
        }
        let v: Vec<f64> = rec.mesh.iter().map(|s| s.v).collect();
        let dv: Vec<f64> = rec.mesh.iter().map(|s| s.dv).collect();
        Ok(Self::assemble(rec.p, interval, rec.eta, v, dv))
    }

    fn assemble(p: f64, interval: Interval, eta: f64, v: Vec<f64>, dv: Vec<f64>) -> Self {
        let h = interval.length() / (v.len() - 1) as f64;
        let flux = dv.iter().map(|&d| signed_pow(d, p - 1.0)).collect();
        let v_interp = Pchip::uniform(interval.a, h, v.clone());
        let dv_interp = Pchip::uniform(interval.a, h, dv.clone());
        Eigenpair1D { p, interval, eta, h, v, dv, flux, v_interp, dv_interp }
    }
}

/// `v'(a) > 0` and `v'(b) < 0`: the outward normal derivative is negative.
pub fn check_slope_sign(e: &Eigenpair1D) -> bool {
    let dv = e.derivatives();
    match (dv.first(), dv.last()) {
        (Some(&l), Some(&r)) => l > 0.0 && r < 0.0,
        _ => false,
    }
}

/// Shooting solve for the principal eigenpair on `interval`.
pub fn solve_eigenpair(p: f64, interval: Interval, tol: f64) -> Result<Eigenpair1D, EigenError> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(EigenError::InvalidExponent { p });
    }
    if !(tol > 0.0) {
        return Err(EigenError::InvalidTolerance { tol });
    }
    let len = interval.length();
    if !(len > 0.0 && len.is_finite()) {
        return Err(EigenError::InvalidInterval { a: interval.a, b: interval.b });
    }
    let mut n = ((STEPS_PER_UNIT as f64 * len).ceil() as usize).max(STEPS_PER_UNIT);
    n += n % 2; // midpoint on the mesh
    let h = len / n as f64;

    // T(eta) - L, positive when eta is too small.
    let excess = |eta: f64| -> f64 {
        match shoot(p, eta, h, 2 * n).zero {
            Some(t) => t - len,
            None => f64::INFINITY,
        }
    };

    let guess = (p - 1.0) * (std::f64::consts::PI / len).powf(p);
    let (mut lo, mut hi) = (guess, guess);
    let f0 = excess(guess);
    let mut tries = 0;
    if f0 > 0.0 {
        loop {
            hi *= 2.0;
            tries += 1;
            if excess(hi) <= 0.0 {
                break;
            }
            if tries > 200 || !hi.is_finite() {
                return Err(EigenError::SearchFailure { lo, hi });
            }
            lo = hi;
        }
    } else {
        loop {
            lo *= 0.5;
            tries += 1;
            if excess(lo) > 0.0 {
                break;
            }
            if tries > 200 || lo == 0.0 {
                return Err(EigenError::SearchFailure { lo, hi });
            }
            hi = lo;
        }
    }

    let eta_tol = (tol * 1e-3).max(4.0 * f64::EPSILON);
    for _ in 0..300 {
        if hi - lo <= eta_tol * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if excess(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let eta = 0.5 * (lo + hi);

    // Tabulate on exactly n steps so the last node is b.
    let mut v = Vec::with_capacity(n + 1);
    let mut w = Vec::with_capacity(n + 1);
    let (mut vk, mut wk) = (0.0_f64, 1.0_f64);
    v.push(vk);
    w.push(wk);
    for _ in 0..n {
        let (vn, wn) = rk4(p, eta, h, vk, wk);
        vk = vn;
        wk = wn;
        v.push(vk);
        w.push(wk);
    }
    let vmax = v.iter().cloned().fold(f64::MIN, f64::max);
    let residual = (v[n] / vmax).abs();
    if residual > ENDPOINT_TOL.max(tol) {
        return Err(EigenError::EndpointResidual { residual, limit: ENDPOINT_TOL.max(tol) });
    }
    v[n] = 0.0;
    let inv = 1.0 / vmax;
    let v: Vec<f64> = v.iter().map(|x| (x * inv).max(0.0)).collect();
    let dv: Vec<f64> = w.iter().map(|&wk| signed_pow(wk, 1.0 / (p - 1.0)) * inv).collect();
    Ok(Eigenpair1D::assemble(p, interval, eta, v, dv))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn unit() -> Interval {
        Interval::new(0.0, 1.0).unwrap()
    }

    #[test]
    fn pi_p_matches_classical_and_limit() {
        assert!((pi_p(2.0).unwrap() - PI).abs() < 1e-12);
        let big = pi_p(100.0).unwrap();
        assert!(big > 2.0 && big < 2.1);
        assert!(matches!(pi_p(1.0), Err(EigenError::InvalidExponent { .. })));
        assert!(pi_p(0.5).is_err());
    }

    #[test]
    fn pi_p_frozen_values() {
        // Frozen from 30-digit adaptive quadrature of the defining integral.
        for (p, expected) in [(4.0, 2.221441469079183), (3.0, 2.418399152312290), (1.5, 4.836798304624581)] {
            let got = pi_p(p).unwrap();
            assert!(((got - expected) / expected).abs() < 1e-10, "p={p}: {got}");
        }
    }

    #[test]
    fn linear_case_is_sine() {
        let e = solve_eigenpair(2.0, unit(), DEFAULT_TOL).unwrap();
        assert!((e.eta() - PI * PI).abs() < 1e-8, "{}", e.eta());
        for s in e.samples().iter().step_by(97) {
            assert!((s.v - (PI * s.x).sin()).abs() < 1e-8);
        }
        assert_eq!(e.eval_v(0.0).unwrap(), 0.0);
        assert!((e.eval_v(0.5).unwrap() - 1.0).abs() < 1e-12);
        assert!((e.eval_dv(0.0).unwrap() - PI).abs() < 1e-8);
    }

    #[test]
    fn linear_case_scales_with_length() {
        let e = solve_eigenpair(2.0, Interval::new(0.0, 2.0).unwrap(), DEFAULT_TOL).unwrap();
        assert!((e.eta() - PI * PI / 4.0).abs() < 1e-9);
    }

    #[test]
    fn shooting_agrees_with_quadrature_formula() {
        let e = solve_eigenpair(4.0, unit(), DEFAULT_TOL).unwrap();
        let formula = 3.0 * pi_p(4.0).unwrap().powi(4);
        assert!(((e.eta() - formula) / formula).abs() < 1e-6, "{} vs {}", e.eta(), formula);
    }

    #[test]
    fn slope_sign_holds_and_detects_flat_endpoint() {
        let e = solve_eigenpair(2.0, unit(), DEFAULT_TOL).unwrap();
        assert!(check_slope_sign(&e));
        let e4 = solve_eigenpair(4.0, Interval::new(-1.0, 3.0).unwrap(), DEFAULT_TOL).unwrap();
        assert!(check_slope_sign(&e4));
        let mut rec = e.to_record();
        rec.mesh[0].dv = 0.0;
        let flat = Eigenpair1D::from_record(&rec).unwrap();
        assert!(!check_slope_sign(&flat));
    }

    #[test]
    fn evaluation_domain_and_clamp() {
        let e = solve_eigenpair(2.0, unit(), DEFAULT_TOL).unwrap();
        let h = e.spacing();
        assert_eq!(e.eval_v(-0.5 * h).unwrap(), 0.0);
        assert_eq!(e.eval_v(1.0 + 0.5 * h).unwrap(), 0.0);
        assert!(matches!(e.eval_v(1.1), Err(EigenError::Domain { .. })));
        assert!(e.eval_dv(-0.2).is_err());
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(solve_eigenpair(1.0, unit(), 1e-10), Err(EigenError::InvalidExponent { .. })));
        assert!(matches!(solve_eigenpair(2.0, unit(), 0.0), Err(EigenError::InvalidTolerance { .. })));
    }

    #[test]
    fn record_round_trip() {
        let e = solve_eigenpair(3.0, unit(), DEFAULT_TOL).unwrap();
        let json = serde_json::to_string(&e.to_record()).unwrap();
        let back: EigenpairRecord = serde_json::from_str(&json).unwrap();
        let e2 = Eigenpair1D::from_record(&back).unwrap();
        assert_eq!(e2.eta(), e.eta());
        assert_eq!(e2.eval_v(0.3).unwrap(), e.eval_v(0.3).unwrap());
    }
}
