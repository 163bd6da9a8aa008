//! Independent brute-force checks against the exact and quadrature paths.

use hardy_factor::sample::{random_step, trial_rng};
use hardy_factor::{
    cesaro_norm, copson_norm, factorize_cesaro_l1, factorize_lebesgue, gp_norm, gstar_norm,
    hardy_p, hardy_q, lp_norm, Grid, QuadratureSpec, StepFunction, Weight, LEBESGUE_SLACK,
};

const TOTAL_POINTS: usize = 1_000_000;

/// Trapezoid rule in `s = ln x` on every cell, `points` samples per cell.
fn log_trapezoid(grid: &Grid, points: usize, f: impl Fn(f64) -> f64) -> f64 {
    let mut total = 0.0;
    for i in 0..grid.cells() {
        let (a, b) = grid.cell(i);
        let (sa, sb) = (a.ln(), b.ln());
        let ds = (sb - sa) / points as f64;
        let g = |k: usize| {
            let x = (sa + k as f64 * ds).exp();
            f(x) * x
        };
        let mut acc = 0.5 * (g(0) + g(points));
        for k in 1..points {
            acc += g(k);
        }
        total += acc * ds;
    }
    total
}

fn brute_cesaro(h: &StepFunction, alpha: f64, p: f64) -> f64 {
    let ph = hardy_p(&h.abs());
    let grid = h.grid();
    let inner = log_trapezoid(grid, TOTAL_POINTS / grid.cells(), |x| {
        ph.eval(x).unwrap().powf(p) * x.powf(alpha)
    });
    let s = h.abs().integral();
    let tail = s.powf(p) * grid.end().powf(alpha - p + 1.0) / (p - alpha - 1.0);
    (inner + tail).powf(1.0 / p)
}

fn brute_copson(h: &StepFunction, alpha: f64, p: f64) -> f64 {
    let qh = hardy_q(&h.abs());
    let grid = h.grid();
    let inner = log_trapezoid(grid, TOTAL_POINTS / grid.cells(), |x| {
        qh.eval(x).unwrap().powf(p) * x.powf(alpha)
    });
    let head =
        qh.eval(grid.start()).unwrap().powf(p) * grid.start().powf(alpha + 1.0) / (alpha + 1.0);
    (inner + head).powf(1.0 / p)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn sample_h(trial: u64) -> StepFunction {
    let grid = Grid::log_grid(1e-2, 1e2, 16).unwrap();
    random_step(&mut trial_rng(7, trial), &grid, true)
}

#[test]
fn cesaro_norm_matches_brute_force() {
    let q = QuadratureSpec::default();
    for (t, &(p, alpha)) in [(2.0, 0.0), (1.5, -0.3), (3.0, 1.2), (2.5, -0.8)]
        .iter()
        .enumerate()
    {
        let h = sample_h(t as u64);
        let ours = cesaro_norm(&h, &Weight::power(alpha).unwrap(), p, &q).unwrap();
        let brute = brute_cesaro(&h, alpha, p);
        assert!(
            rel(ours, brute) < 1e-8,
            "p={p} α={alpha}: {ours} vs {brute}"
        );
    }
}

#[test]
fn copson_norm_matches_brute_force() {
    let q = QuadratureSpec::default();
    for (t, &(p, alpha)) in [(2.0, 0.0), (1.5, -0.5), (3.0, 1.5), (4.0, 0.3)]
        .iter()
        .enumerate()
    {
        let h = sample_h(10 + t as u64);
        let ours = copson_norm(&h, &Weight::power(alpha).unwrap(), p, &q).unwrap();
        let brute = brute_copson(&h, alpha, p);
        assert!(
            rel(ours, brute) < 1e-8,
            "p={p} α={alpha}: {ours} vs {brute}"
        );
    }
}

#[test]
fn unit_box_closed_forms() {
    // h = χ_(0,1] starting at the origin is approximated by a grid from 1e-12
    let grid = Grid::new(vec![1e-12, 1.0]).unwrap();
    let h = StepFunction::constant(grid, 1.0).unwrap();
    let v = Weight::power(0.0).unwrap();
    let q = QuadratureSpec::default();
    // ∫_0^1 1 + ∫_1^∞ x^{-2} = 2
    assert!(rel(cesaro_norm(&h, &v, 2.0, &q).unwrap(), 2f64.sqrt()) < 1e-9);
    // ∫_0^1 ln(1/x)^2 = 2
    assert!(rel(copson_norm(&h, &v, 2.0, &q).unwrap(), 2f64.sqrt()) < 1e-9);
}

#[test]
fn quadrature_refinement_at_acceptance_scale() {
    let grid = Grid::log_grid(1e-3, 1e3, 256).unwrap();
    let h = random_step(&mut trial_rng(3, 0), &grid, true);
    let coarse = QuadratureSpec::default();
    let fine = QuadratureSpec {
        nodes_per_cell: 2 * coarse.nodes_per_cell,
        ..coarse
    };
    for alpha in [-0.5, 0.0, 0.7] {
        let v = Weight::power(alpha).unwrap();
        let (a, b) = (
            cesaro_norm(&h, &v, 2.0, &coarse).unwrap(),
            cesaro_norm(&h, &v, 2.0, &fine).unwrap(),
        );
        assert!(rel(a, b) < 1e-9, "cesaro α={alpha}");
        let (a, b) = (
            copson_norm(&h, &v, 2.0, &coarse).unwrap(),
            copson_norm(&h, &v, 2.0, &fine).unwrap(),
        );
        assert!(rel(a, b) < 1e-9, "copson α={alpha}");
    }
}

#[test]
fn level_example_factorization() {
    let grid = Grid::new(vec![1.0, 2.0, 3.0]).unwrap();
    let h = StepFunction::new(grid, vec![1.0, 3.0]).unwrap();
    let v = Weight::power(0.0).unwrap();
    let r = factorize_lebesgue(&h, &v, 1.0, LEBESGUE_SLACK).unwrap();
    assert_eq!(r.f.values(), &[2.0, 2.0]);
    assert_eq!(r.g.values(), &[0.5, 1.5]);
    assert!((r.norm_f - 4.0).abs() < 1e-12);
    assert!((r.norm_g - 1.0).abs() < 1e-12);
    assert!(r.passed());
}

#[test]
fn cesaro_l1_power_weight() {
    let grid = Grid::log_grid(0.1, 10.0, 8).unwrap();
    let h = random_step(&mut trial_rng(5, 0), &grid, true);
    let v = Weight::power(-0.5).unwrap();
    let r = factorize_cesaro_l1(&h, &v, &QuadratureSpec::default(), 1e-6).unwrap();
    for i in 0..grid.cells() {
        assert!((r.f.value(i) - 2.0 * h.value(i)).abs() <= 1e-14 * h.value(i).abs());
        if h.value(i) != 0.0 {
            assert!((r.g.value(i) - 0.5).abs() < 1e-14);
        }
    }
    assert!((r.norm_g - 0.5).abs() < 1e-14);
    assert!(r.passed());
}

#[test]
fn gstar_of_constant_with_sampled_weight() {
    let grid = Grid::log_grid(0.5, 8.0, 5).unwrap();
    let v =
        Weight::sampled(StepFunction::new(grid.clone(), vec![0.3, 2.0, 1.0, 7.0, 0.2]).unwrap())
            .unwrap();
    let f = StepFunction::constant(grid, -1.7).unwrap();
    assert!(rel(gstar_norm(&f, &v, 2.0).unwrap(), 1.7) < 1e-12);
    assert!(rel(gp_norm(&f, &v, 2.0).unwrap(), 1.7) < 1e-12);
    assert!(rel(lp_norm(&f, &v, f64::INFINITY).unwrap(), 1.7) < 1e-12);
}
