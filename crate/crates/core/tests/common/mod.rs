//! Helpers shared by the integration suites: random inputs and brute-force
//! reference implementations that avoid the library's own building blocks.
#![allow(dead_code)]

use dcp_core::Dataset;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn normals(rng: &mut ChaCha8Rng, k: usize) -> Vec<f64> {
    (0..k).map(|_| rng.sample(StandardNormal)).collect()
}

/// Gaussian design with a sparse linear signal in the first `s` columns.
pub fn sparse_dataset(rng: &mut ChaCha8Rng, n: usize, p: usize, s: usize) -> Dataset {
    let x = normals(rng, n * p);
    let y: Vec<f64> = (0..n)
        .map(|i| {
            let signal: f64 = (0..s.min(p)).map(|j| x[i * p + j]).sum();
            signal + rng.sample::<f64, _>(StandardNormal)
        })
        .collect();
    Dataset::from_row_major(n, p, &x, &y).unwrap()
}

/// Sort and take the `ceil((1 - alpha)(n + 1))`-th smallest, `+inf` past the end.
pub fn brute_quantile(residuals: &[f64], alpha: f64) -> f64 {
    let mut r = residuals.to_vec();
    r.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let k = ((1.0 - alpha) * (r.len() as f64 + 1.0)).ceil() as usize;
    if k == 0 {
        f64::NEG_INFINITY
    } else if k > r.len() {
        f64::INFINITY
    } else {
        r[k - 1]
    }
}

/// Index of the grid cell holding `y`: cells are `[b_{m-1}, b_m)` between the
/// midpoints `b`, with unbounded end cells.
pub fn cell_of(points: &[f64], y: f64) -> usize {
    let mut m = 0;
    for w in points.windows(2) {
        if y >= 0.5 * (w[0] + w[1]) {
            m += 1;
        }
    }
    m
}

pub fn round_nearest(points: &[f64], y: f64) -> f64 {
    points[cell_of(points, y)]
}

/// Per grid point: `(mu_y, Q_y)` for the constant-mean fitter, where `mu_y`
/// averages the fitted responses together with `y` and the residuals are taken
/// against `targets`.
pub fn mean_fits(points: &[f64], fitted: &[f64], targets: &[f64], alpha: f64) -> Vec<(f64, f64)> {
    let n = fitted.len() as f64;
    let sum: f64 = fitted.iter().sum();
    points
        .iter()
        .map(|&y| {
            let mu = (sum + y) / (n + 1.0);
            let res: Vec<f64> = targets.iter().map(|t| (t - mu).abs()).collect();
            (mu, brute_quantile(&res, alpha))
        })
        .collect()
}

/// Membership in the discretized-data set, evaluated straight from its definition.
pub fn brute_cpdd_contains(points: &[f64], responses: &[f64], alpha: f64, y: f64) -> bool {
    let rounded: Vec<f64> = responses.iter().map(|&v| round_nearest(points, v)).collect();
    let fits = mean_fits(points, &rounded, &rounded, alpha);
    let m = cell_of(points, y);
    let (mu, q) = fits[m];
    (points[m] - mu).abs() <= q
}

/// Membership in the discretized-model set: the model is fitted on rounded
/// responses, residuals use the raw ones and the test value itself is compared.
pub fn brute_cpdm_contains(points: &[f64], responses: &[f64], alpha: f64, y: f64) -> bool {
    let rounded: Vec<f64> = responses.iter().map(|&v| round_nearest(points, v)).collect();
    let fits = mean_fits(points, &rounded, responses, alpha);
    let (mu, q) = fits[cell_of(points, y)];
    (y - mu).abs() <= q
}

/// Probe values that resolve a union of intervals with breakpoints in `exact`
/// and `soft`: exact marks are probed directly, all marks are straddled, and
/// midpoints between marks and far tails are added. Soft marks are not probed
/// exactly because two algebraically equal interval ends may differ by roundoff.
pub fn probes(exact: &[f64], soft: &[f64]) -> Vec<f64> {
    let mut m: Vec<f64> = exact.iter().chain(soft).copied().filter(|v| v.is_finite()).collect();
    m.sort_by(|a, b| a.partial_cmp(b).unwrap());
    m.dedup();
    let mut out: Vec<f64> = exact.iter().copied().filter(|v| v.is_finite()).collect();
    for (i, &v) in m.iter().enumerate() {
        let eps = 1e-9 * v.abs().max(1.0);
        out.extend([v - eps, v + eps]);
        if let Some(&next) = m.get(i + 1) {
            out.push(0.5 * (v + next));
        }
    }
    if let (Some(&lo), Some(&hi)) = (m.first(), m.last()) {
        out.extend([lo - 1e3, hi + 1e3]);
    }
    out
}
