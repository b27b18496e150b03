//! The simulated sparse-regression problem.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::grid::{make_grid, Discretizer, Grid, RoundingMode};

/// Number of leading features that enter the mean function.
pub const SIGNAL_FEATURES: usize = 10;

/// What a random stream is used for. Each (seed, trial, purpose, salt) key
/// gives an independent generator, so trials can run in any order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Purpose {
    Data = 1,
    Rounding = 2,
    Split = 3,
}

pub fn stream_rng(seed: u64, trial: u64, purpose: Purpose, salt: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&trial.to_le_bytes());
    key[16..24].copy_from_slice(&(purpose as u64).to_le_bytes());
    key[24..].copy_from_slice(&salt.to_le_bytes());
    ChaCha8Rng::from_seed(key)
}

/// A 64-bit seed drawn from a keyed stream, for components that seed their own generator.
pub fn stream_seed(seed: u64, trial: u64, purpose: Purpose, salt: u64) -> u64 {
    stream_rng(seed, trial, purpose, salt).random()
}

/// `(1/sqrt(10)) * sum_{j<10} (x_j + sign(x_j) sqrt|x_j|)`, with `sign(0) = 0`.
pub fn true_mean(x: &[f64]) -> Result<f64> {
    if x.len() < SIGNAL_FEATURES {
        return Err(Error::Config(format!(
            "the mean function needs p >= {SIGNAL_FEATURES}, got {}",
            x.len()
        )));
    }
    Ok(mean_unchecked(x))
}

pub(crate) fn mean_unchecked(x: &[f64]) -> f64 {
    let s: f64 = x[..SIGNAL_FEATURES]
        .iter()
        .map(|&v| {
            let sign = if v > 0.0 {
                1.0
            } else if v < 0.0 {
                -1.0
            } else {
                0.0
            };
            v + sign * v.abs().sqrt()
        })
        .sum();
    s / (SIGNAL_FEATURES as f64).sqrt()
}

/// One Monte Carlo draw: `n` training points and an independent test point.
#[derive(Debug, Clone, PartialEq)]
pub struct Trial {
    pub train: Dataset,
    pub x_test: Vec<f64>,
    pub y_test: f64,
}

/// Draws `n + 1` i.i.d. points with `X ~ N(0, I_p)` and `Y = mu(X) + N(0, sigma^2)`.
/// The result depends only on `(seed, trial)`.
pub fn generate_trial(n: usize, p: usize, sigma: f64, seed: u64, trial: u64) -> Result<Trial> {
    if p < SIGNAL_FEATURES {
        return Err(Error::Config(format!("p must be >= {SIGNAL_FEATURES}, got {p}")));
    }
    if n == 0 {
        return Err(Error::Config("n must be >= 1".into()));
    }
    let mut rng = stream_rng(seed, trial, Purpose::Data, 0);
    let mut rows = Vec::with_capacity((n + 1) * p);
    let mut ys = Vec::with_capacity(n + 1);
    for _ in 0..=n {
        let start = rows.len();
        rows.extend((0..p).map(|_| rng.sample::<f64, _>(StandardNormal)));
        let noise: f64 = rng.sample(StandardNormal);
        ys.push(mean_unchecked(&rows[start..]) + sigma * noise);
    }
    let x_test = rows.split_off(n * p);
    let y_test = ys.pop().expect("n + 1 responses");
    Ok(Trial { train: Dataset::from_row_major(n, p, &rows, &ys)?, x_test, y_test })
}

/// A grid spanning the observed training responses.
#[derive(Debug, Clone)]
pub struct RangeGrid {
    pub discretizer: Discretizer,
    /// All training responses were equal; a unit range around them was used.
    pub degenerate: bool,
}

impl RangeGrid {
    pub fn grid(&self) -> &Grid {
        self.discretizer.grid()
    }
}

/// Midpoint grid of size `m` over `[min Y_i, max Y_i]`.
pub fn data_range_grid(responses: &[f64], m: usize, mode: RoundingMode) -> Result<RangeGrid> {
    if responses.is_empty() {
        return Err(Error::InvalidInput("no training responses".into()));
    }
    let (lo, hi) = responses
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &y| (lo.min(y), hi.max(y)));
    let degenerate = !(lo < hi);
    let grid = if degenerate { make_grid(lo - 0.5, lo + 0.5, m)? } else { make_grid(lo, hi, m)? };
    Ok(RangeGrid { discretizer: Discretizer::with_mode(grid, mode), degenerate })
}
