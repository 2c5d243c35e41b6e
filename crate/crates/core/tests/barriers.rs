mod common;

use std::f64::consts::PI;
use std::sync::{Arc, OnceLock};

use aniso_core::{
    build_barrier, epsilon_for_lambda, lambda_star_sub, lambda_star_super, m_for_lambda, pointwise_s,
    sample_to_grid, AxisBox, BarrierFunction, BarrierKind, BarrierSpec, Grid, Problem,
};
use common::{barrier_pair, unit_square};
use proptest::prelude::*;

fn line(q: f64) -> Problem {
    Problem::new(vec![2.0], q, 1.0, AxisBox::unit(1)).unwrap()
}

#[test]
fn one_dimensional_threshold_matches_closed_form() {
    // v = sin(pi x): S = 8 pi^2 (8 sin^4 - 7 sin^2), largest at the midpoint.
    let prob = line(1.5);
    let spec = BarrierSpec::default_for(&prob).unwrap();
    let sub = build_barrier(BarrierKind::Sub, &spec, &prob).unwrap();
    let t = lambda_star_sub(&sub, &prob, &[1025]).unwrap();
    assert!((t.lambda_star / (8.0 * PI * PI) - 1.0).abs() < 1e-6, "{}", t.lambda_star);
    assert!((t.argmax[0] - 0.5).abs() < 1e-12);
    let dense = (1..100_000)
        .map(|k| {
            let s = (PI * k as f64 / 100_000.0).sin().powi(2);
            8.0 * PI * PI * (8.0 * s * s - 7.0 * s)
        })
        .fold(f64::NEG_INFINITY, f64::max);
    assert!((t.lambda_star / dense - 1.0).abs() < 1e-6);
}

#[test]
fn intermediate_threshold_stays_positive_as_eps_vanishes() {
    let prob = unit_square([2.0, 4.0], 2.0, 1.0);
    let mut spec = BarrierSpec::default_for(&prob).unwrap();
    let sub = build_barrier(BarrierKind::Sub, &spec, &prob).unwrap();
    let at_one = lambda_star_sub(&sub, &prob, &[129, 129]).unwrap();
    assert!(at_one.lambda_star.is_finite() && at_one.lambda_star > 0.0);
    spec.eps = 1e-12;
    let tiny = build_barrier(BarrierKind::Sub, &spec, &prob).unwrap();
    let t = lambda_star_sub(&tiny, &prob, &[129, 129]).unwrap();
    // Only the zero-exponent axis survives: 2 (pi^2 - v'^2/v^2) peaks at 2 pi^2.
    assert!((t.lambda_star / (2.0 * PI * PI) - 1.0).abs() < 1e-3, "{}", t.lambda_star);
    assert!(t.s1_at_max.abs() < 1e-6 * t.lambda_star);
    assert!(t.delta[0].is_some() && t.delta[1].is_none());
}

#[test]
fn super_threshold_on_wide_outer_interval() {
    let prob = line(1.5);
    let mut spec = BarrierSpec::default_for(&prob).unwrap();
    spec.outer = AxisBox::from_bounds(&[-0.5], &[1.5]).unwrap();
    let sup = build_barrier(BarrierKind::Super, &spec, &prob).unwrap();
    let got = lambda_star_super(&sup, &prob, &[1001]).unwrap();
    // eta = pi^2/4 and v = sin(pi (x + 1/2) / 2) is smallest at the ends.
    let expected = PI * PI / 4.0 * (0.5_f64.sqrt()).sqrt();
    assert!((got / expected - 1.0).abs() < 1e-6, "{got} vs {expected}");
}

#[test]
fn super_threshold_grows_with_m_in_intermediate_regime() {
    let prob = unit_square([2.0, 4.0], 3.0, 1.0);
    let mut spec = BarrierSpec::default_for(&prob).unwrap();
    let values: Vec<f64> = [1.0, 10.0, 100.0]
        .iter()
        .map(|&m| {
            spec.m = m;
            let sup = build_barrier(BarrierKind::Super, &spec, &prob).unwrap();
            lambda_star_super(&sup, &prob, &[65, 65]).unwrap()
        })
        .collect();
    // The p_1 term decays like 1/M, the p_2 term grows like M.
    assert!(values[0] < values[1] && values[1] < values[2], "{values:?}");
    assert!(values[2] > 10.0 * values[0], "{values:?}");
}

#[test]
fn halving_lambda_shrinks_eps_within_scaling_bound() {
    let prob = unit_square([2.0, 4.0], 1.5, 1.0);
    let spec = BarrierSpec::default_for(&prob).unwrap();
    let res = [129, 129];
    let e1 = epsilon_for_lambda(&prob, &spec, 1.0, &res).unwrap();
    let e2 = epsilon_for_lambda(&prob, &spec, 0.5, &res).unwrap();
    let bound = 2.0_f64.powf(-1.0 / (2.0 - 1.5));
    assert!(e2 < e1);
    assert!(e2 / e1 >= bound * (1.0 - 1e-9), "{}", e2 / e1);
}

#[test]
fn eps_one_when_lambda_is_the_threshold() {
    let prob = line(1.5);
    let spec = BarrierSpec::default_for(&prob).unwrap();
    let sub = build_barrier(BarrierKind::Sub, &spec, &prob).unwrap();
    let t = lambda_star_sub(&sub, &prob, &[257]).unwrap();
    assert_eq!(epsilon_for_lambda(&prob, &spec, t.lambda_star, &[257]).unwrap(), 1.0);
}

#[test]
fn quadrupled_lambda_raises_m_within_scaling_bound() {
    let prob = line(1.5);
    let spec = BarrierSpec::default_for(&prob).unwrap();
    let m1 = m_for_lambda(&prob, &spec, 10.0, None, &[257]).unwrap();
    let m4 = m_for_lambda(&prob, &spec, 40.0, None, &[257]).unwrap();
    assert!(m4 >= m1 && m4 <= 16.0 * m1, "{m1} -> {m4}");
}

#[test]
fn barriers_are_ordered_with_correct_boundary_values() {
    let prob = unit_square([2.0, 4.0], 1.5, 3.0);
    let (grid, lower, upper, _) = barrier_pair(&prob, 33);
    for k in 0..grid.len() {
        assert!(lower.values()[k] <= upper.values()[k]);
        if grid.is_boundary(k) {
            assert_eq!(lower.values()[k], 0.0);
            assert!(upper.values()[k] > 0.0);
        }
    }
}

#[test]
fn sub_vanishes_outside_a_smaller_inner_box() {
    let prob = unit_square([2.0, 4.0], 1.5, 1.0);
    let mut spec = BarrierSpec::default_for(&prob).unwrap();
    spec.inner = AxisBox::from_bounds(&[0.25, 0.25], &[0.75, 0.75]).unwrap();
    let sub = build_barrier(BarrierKind::Sub, &spec, &prob).unwrap();
    let grid = Arc::new(Grid::uniform(AxisBox::unit(2), 17).unwrap());
    let f = sample_to_grid(&sub, &grid);
    for k in 0..grid.len() {
        let x = grid.point(k);
        let inside = x.iter().all(|&xi| 0.25 < xi && xi < 0.75);
        assert_eq!(f.values()[k] > 0.0, inside, "{x:?}");
    }
    assert!((sub.value(&[0.5, 0.5]) - 1.0).abs() < 1e-12);
}

fn square_sub() -> &'static (Problem, BarrierFunction) {
    static CELL: OnceLock<(Problem, BarrierFunction)> = OnceLock::new();
    CELL.get_or_init(|| {
        let prob = unit_square([2.0, 4.0], 1.5, 1.0);
        let spec = BarrierSpec::default_for(&prob).unwrap();
        let sub = build_barrier(BarrierKind::Sub, &spec, &prob).unwrap();
        (prob, sub)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn summands_scale_exactly_with_eps(x0 in 0.01f64..0.99, x1 in 0.01f64..0.99, c in 0.01f64..10.0) {
        let (prob, sub) = square_sub();
        let a = pointwise_s(sub, prob, &[x0, x1]).unwrap();
        let b = pointwise_s(&sub.rescaled(c), prob, &[x0, x1]).unwrap();
        for (i, (sa, sb)) in a.summands.iter().zip(&b.summands).enumerate() {
            let expected = sa * c.powf(prob.p()[i] - prob.q());
            prop_assert!((sb - expected).abs() <= 1e-12 * expected.abs().max(f64::MIN_POSITIVE), "{sb} vs {expected}");
        }
    }
}
