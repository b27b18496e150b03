mod common;

use common::*;
use dcp_core::baselines::{oracle_interval, parametric_interval};
use dcp_core::conformal::conformal_quantile;
use dcp_core::fitters::{default_lasso_lambda, fit_lasso, fit_ridge, lasso_kkt_violation, soft_threshold};
use dcp_core::simulation::true_mean;
use dcp_core::{make_grid, Dataset, Discretizer, FitterSpec, Interval, PredictionSet};
use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::Rng;

#[test]
fn quantile_equals_sort_and_index() {
    let mut r = rng(1);
    for _ in 0..1000 {
        let n = r.random_range(1..=200);
        let alpha = r.random_range(0.01..0.99);
        let res: Vec<f64> = normals(&mut r, n).into_iter().map(f64::abs).collect();
        assert_eq!(conformal_quantile(&res, alpha).unwrap(), brute_quantile(&res, alpha));
    }
}

#[test]
fn quantile_nonincreasing_in_alpha() {
    let mut r = rng(2);
    for _ in 0..100 {
        let n = r.random_range(1..=60);
        let res: Vec<f64> = normals(&mut r, n).into_iter().map(f64::abs).collect();
        let mut prev = f64::INFINITY;
        for i in 1..100 {
            let q = conformal_quantile(&res, i as f64 / 100.0).unwrap();
            assert!(q <= prev);
            prev = q;
        }
    }
}

#[test]
fn lasso_kkt_on_random_instances() {
    let mut r = rng(3);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let data = sparse_dataset(&mut r, 50, 100, 5);
        let lambda = default_lasso_lambda(1.0, 50, 100) * r.random_range(0.5..2.0);
        let spec = FitterSpec::lasso(lambda).with_tol(1e-8);
        let model = fit_lasso(&data, &spec).unwrap();
        assert!(model.metadata().converged);
        let kkt = lasso_kkt_violation(data.features(), data.responses().as_slice(), model.coefficients(), lambda);
        worst = worst.max(kkt);
    }
    assert!(worst < 1e-6, "max KKT violation {worst}");
}

#[test]
fn univariate_lasso_is_soft_threshold() {
    let mut r = rng(4);
    for _ in 0..50 {
        let n = r.random_range(2..40);
        let x = normals(&mut r, n);
        let y = normals(&mut r, n);
        let lambda = r.random_range(0.0..0.8);
        let data = Dataset::from_row_major(n, 1, &x, &y).unwrap();
        let model = fit_lasso(&data, &FitterSpec::lasso(lambda).with_tol(1e-12)).unwrap();
        let xy: f64 = x.iter().zip(&y).map(|(a, b)| a * b).sum::<f64>() / n as f64;
        let xx: f64 = x.iter().map(|a| a * a).sum::<f64>() / n as f64;
        let expected = soft_threshold(xy, lambda) / xx;
        assert!((model.coefficients()[0] - expected).abs() < 1e-8);
    }
}

#[test]
fn lasso_predictions_invariant_to_row_order() {
    let mut r = rng(5);
    let tol = 1e-9;
    for _ in 0..20 {
        let (n, p) = (40, 60);
        let data = sparse_dataset(&mut r, n, p, 4);
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut r);
        let permuted = data.subset(&order).unwrap();
        let spec = FitterSpec::lasso(default_lasso_lambda(1.0, n, p)).with_tol(tol);
        let a = fit_lasso(&data, &spec).unwrap();
        let b = fit_lasso(&permuted, &spec).unwrap();
        for _ in 0..5 {
            let x = normals(&mut r, p);
            let diff = (a.predict(&x) - b.predict(&x)).abs();
            assert!(diff < 10.0 * tol, "prediction moved by {diff}");
        }
    }
}

#[test]
fn ridge_and_lasso_agree_without_penalty_on_orthonormal_design() {
    let mut r = rng(6);
    let (n, p) = (30, 5);
    let g = DMatrix::from_row_slice(n, p, &normals(&mut r, n * p));
    let q = g.qr().q() * (n as f64).sqrt();
    let y = normals(&mut r, n);
    let rows: Vec<f64> = (0..n).flat_map(|i| (0..p).map(move |j| (i, j))).map(|(i, j)| q[(i, j)]).collect();
    let data = Dataset::from_row_major(n, p, &rows, &y).unwrap();
    let lasso = fit_lasso(&data, &FitterSpec::lasso(0.0).with_tol(1e-12)).unwrap();
    let ridge = fit_ridge(&data, &FitterSpec::ridge(0.0)).unwrap();
    for (a, b) in lasso.coefficients().iter().zip(ridge.coefficients()) {
        assert!((a - b).abs() < 1e-6);
    }
}

#[test]
fn fits_are_bitwise_deterministic() {
    let data = sparse_dataset(&mut rng(7), 50, 80, 5);
    let spec = FitterSpec::lasso(0.1);
    let a = fit_lasso(&data, &spec).unwrap();
    let b = fit_lasso(&data, &spec).unwrap();
    let bits = |m: &dcp_core::FittedModel| m.coefficients().iter().map(|c| c.to_bits()).collect::<Vec<_>>();
    assert_eq!(bits(&a), bits(&b));
}

#[test]
fn grid_points_are_evenly_spaced() {
    let mut r = rng(8);
    for _ in 0..200 {
        let lo = r.random_range(-100.0..100.0);
        let hi = lo + r.random_range(1e-3..50.0);
        let m = r.random_range(1..300);
        let g = make_grid(lo, hi, m).unwrap();
        let pts = g.points();
        assert_eq!(pts.len(), m);
        let gap = (hi - lo) / m as f64;
        for w in pts.windows(2) {
            assert!(w[1] > w[0]);
            assert!(((w[1] - w[0]) - gap).abs() <= 1e-12 * gap.max(w[1].abs()) * 8.0);
        }
    }
}

#[test]
fn nearest_cells_partition_the_line() {
    let grid = make_grid(-3.0, 5.0, 7).unwrap();
    let mut disc = Discretizer::nearest(grid.clone());
    let cells: Vec<Interval> = (0..grid.len()).map(|m| disc.preimage_cell_at(m)).collect();
    let mut r = rng(9);
    let mut ys: Vec<f64> = (0..10_000).map(|_| r.random_range(-8.0..10.0)).collect();
    ys.extend(grid.boundaries());
    for y in ys {
        let holding: Vec<usize> = (0..cells.len()).filter(|&m| cells[m].contains(y)).collect();
        assert_eq!(holding.len(), 1, "y = {y}");
        let point = disc.discretize(y);
        assert_eq!(disc.preimage_cell(point).unwrap(), cells[holding[0]]);
    }
}

#[test]
fn randomized_rounding_unbiased_inside_range() {
    let grid = make_grid(0.0, 4.0, 8).unwrap();
    let (first, last) = (grid.points()[0], grid.points()[7]);
    let mut disc = Discretizer::randomized(grid, 42);
    for y in [first + 0.01, 1.3, 2.0, 2.26, last - 0.01] {
        let draws = disc.discretize_all(&vec![y; 100_000]);
        let mean = draws.iter().sum::<f64>() / draws.len() as f64;
        let sd = (draws.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (draws.len() - 1) as f64).sqrt();
        let se = sd / (draws.len() as f64).sqrt();
        assert!((mean - y).abs() <= 3.0 * se.max(1e-12), "y {y}: mean {mean}, se {se}");
    }
}

#[test]
fn hull_contains_the_set() {
    let mut r = rng(10);
    for _ in 0..200 {
        let pieces: Vec<Interval> = (0..r.random_range(0..6))
            .map(|_| {
                let a = r.random_range(-10.0..10.0);
                let b = a + r.random_range(0.0..3.0);
                Interval::closed_open(a, b)
            })
            .collect();
        let set = PredictionSet::from_union(pieces);
        let hull = set.hull();
        for _ in 0..50 {
            let y = r.random_range(-12.0..14.0);
            assert!(!set.contains(y) || hull.contains(y));
        }
        assert!(hull.length() >= set.length());
    }
}

#[test]
fn parametric_never_narrower_than_oracle() {
    let mut r = rng(11);
    for _ in 0..20 {
        let data = sparse_dataset(&mut r, 60, 20, 3);
        let x = normals(&mut r, 20);
        let spec = FitterSpec::lasso(default_lasso_lambda(1.0, 60, 20));
        let par = parametric_interval(&data, &x, 1.0, 0.1, &spec, false).unwrap();
        let oracle = oracle_interval(&x, |_| 0.0, 1.0, 0.1).unwrap();
        assert!(par.set.length() >= oracle.length() - 1e-12);
        assert!(par.leverage >= 0.0);
    }
}

#[test]
fn oracle_covers_at_nominal_rate() {
    let mut r = rng(12);
    let p = 10;
    let hits = (0..10_000)
        .filter(|_| {
            let x = normals(&mut r, p);
            let y = true_mean(&x).unwrap() + r.sample::<f64, _>(rand_distr::StandardNormal);
            oracle_interval(&x, |v| true_mean(v).unwrap(), 1.0, 0.1).unwrap().contains(y)
        })
        .count();
    let cov = hits as f64 / 10_000.0;
    assert!((cov - 0.9).abs() <= 3.0 * (0.09f64 / 10_000.0).sqrt(), "coverage {cov}");
}
