//! The conformal engine.
//!
//! Full conformal prediction refits the model once per candidate test
//! response. Here the candidates are the points of a finite [`Grid`]:
//!
//! * [`approximate_conformal`] fits on the raw training responses and pads
//!   each accepted grid point by one grid gap. It has no coverage guarantee.
//! * [`cpdd`] rounds the training responses onto the grid, runs conformal on
//!   the rounded data and maps the accepted points back through their
//!   rounding cells.
//! * [`cpdm`] uses the same fits as [`cpdd`] but computes residuals against
//!   the raw responses, intersecting each cell with its model's band.
//!
//! [`cpdd`] and [`cpdm`] keep the finite-sample coverage guarantee of full
//! conformal prediction for any grid fixed in advance.

mod quantile;
mod split;

use rayon::prelude::*;

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::fitters::{Design, Fitter, FittedModel, FitterSpec};
use crate::grid::{Discretizer, Grid};
use crate::interval::{Interval, PredictionSet};

pub use quantile::{conformal_quantile, conformal_rank};
pub use split::{split_conformal, split_conformal_with};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Approximate,
    Cpdd,
    Cpdm,
    Split,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Approximate => "approximate",
            Method::Cpdd => "cpdd",
            Method::Cpdm => "cpdm",
            Method::Split => "split",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "approximate" => Ok(Method::Approximate),
            "cpdd" => Ok(Method::Cpdd),
            "cpdm" => Ok(Method::Cpdm),
            "split" => Ok(Method::Split),
            other => Err(Error::Config(format!("unknown conformal method `{other}`"))),
        }
    }
}

/// How the per-grid-point fits are scheduled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    /// Ascending grid order; with `warm_start` each fit starts from the
    /// previous grid point's solution.
    Sequential { warm_start: bool },
    /// Independent cold-start fits on the rayon pool.
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        Execution::Sequential { warm_start: true }
    }
}

#[derive(Debug, Clone)]
pub struct ConformalConfig {
    pub alpha: f64,
    pub fitter: FitterSpec,
    pub discretizer: Discretizer,
    pub method: Method,
    pub execution: Execution,
    /// Seed for the random split of [`Method::Split`].
    pub split_seed: u64,
}

impl ConformalConfig {
    pub fn new(alpha: f64, fitter: FitterSpec, discretizer: Discretizer, method: Method) -> Self {
        Self { alpha, fitter, discretizer, method, execution: Execution::default(), split_seed: 0 }
    }

    pub fn grid(&self) -> &Grid {
        self.discretizer.grid()
    }

    pub fn validate(&self) -> Result<()> {
        quantile::check_alpha(self.alpha)?;
        self.fitter.validate()
    }
}

/// Predictions of the grid-point models `mu_y`, one entry per grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFits {
    pub points: Vec<f64>,
    /// `mu_y(x_new)`
    pub test_predictions: Vec<f64>,
    /// `mu_y(X_i)` for the `n` training rows.
    pub train_predictions: Vec<Vec<f64>>,
    pub fit_count: usize,
    /// Fits that stopped at the iteration cap.
    pub unconverged: usize,
}

/// The training design with the test covariate appended as the last row.
pub fn augmented_design(data: &Dataset, x_new: &[f64]) -> Result<Design> {
    Ok(Design::new(data.augmented_features(x_new)?))
}

/// Fits `mu_y` on `train_responses` plus `(x_new, y)` for every grid point `y`.
/// `design` must be the augmented design from [`augmented_design`].
pub fn fit_grid<F: Fitter>(
    fitter: &F,
    design: &Design,
    train_responses: &[f64],
    grid: &Grid,
    execution: Execution,
) -> Result<GridFits> {
    let n = train_responses.len();
    if design.n() != n + 1 {
        return Err(Error::InvalidSize(format!(
            "augmented design has {} rows, expected {}",
            design.n(),
            n + 1
        )));
    }
    let fit_one = |y: f64, warm: Option<&FittedModel>| -> Result<(FittedModel, Vec<f64>)> {
        let mut responses = Vec::with_capacity(n + 1);
        responses.extend_from_slice(train_responses);
        responses.push(y);
        let model = fitter.fit(design, &responses, warm)?;
        let preds = model.predict_design(design);
        Ok((model, preds))
    };

    let results: Vec<(FittedModel, Vec<f64>)> = match execution {
        Execution::Sequential { warm_start } => {
            let mut out: Vec<(FittedModel, Vec<f64>)> = Vec::with_capacity(grid.len());
            for &y in grid.points() {
                let warm = if warm_start { out.last().map(|(m, _)| m) } else { None };
                let fitted = fit_one(y, warm)?;
                out.push(fitted);
            }
            out
        }
        Execution::Parallel => grid
            .points()
            .par_iter()
            .map(|&y| fit_one(y, None))
            .collect::<Result<Vec<_>>>()?,
    };

    let mut fits = GridFits {
        points: grid.points().to_vec(),
        test_predictions: Vec::with_capacity(grid.len()),
        train_predictions: Vec::with_capacity(grid.len()),
        fit_count: results.len(),
        unconverged: 0,
    };
    for (model, mut preds) in results {
        if !model.metadata().converged {
            fits.unconverged += 1;
        }
        fits.test_predictions.push(preds[n]);
        preds.truncate(n);
        fits.train_predictions.push(preds);
    }
    Ok(fits)
}

/// Per-grid-point quantiles `Q_y` of `|targets_i - mu_y(X_i)|`.
pub fn grid_quantiles(fits: &GridFits, targets: &[f64], alpha: f64) -> Vec<f64> {
    fits.train_predictions
        .iter()
        .map(|preds| {
            let residuals = targets.iter().zip(preds).map(|(y, m)| (y - m).abs()).collect();
            quantile::quantile_unchecked(residuals, alpha)
        })
        .collect()
}

fn accepted(y: f64, center: f64, q: f64) -> bool {
    (y - center).abs() <= q
}

/// Approximate grid conformal from precomputed fits on the raw responses.
pub fn approximate_from_fits(fits: &GridFits, responses: &[f64], alpha: f64, gap: f64) -> PredictionSet {
    let q = grid_quantiles(fits, responses, alpha);
    let pieces = fits
        .points
        .iter()
        .zip(&fits.test_predictions)
        .zip(&q)
        .filter(|((&y, &mu), &q)| accepted(y, mu, q))
        .map(|((&y, _), _)| Interval::open(y - gap, y + gap));
    PredictionSet::from_union(pieces)
}

/// The accepted grid points of the rounded-data procedure: `|y - mu_y(x_new)| <= Q_y`
/// with `Q_y` computed from the rounded responses.
pub fn cpdd_accepted(fits: &GridFits, rounded: &[f64], alpha: f64) -> Vec<bool> {
    let q = grid_quantiles(fits, rounded, alpha);
    fits.points
        .iter()
        .zip(&fits.test_predictions)
        .zip(&q)
        .map(|((&y, &mu), &q)| accepted(y, mu, q))
        .collect()
}

/// Discretized-data conformal from fits on the rounded responses.
pub fn cpdd_from_fits(fits: &GridFits, rounded: &[f64], alpha: f64, discretizer: &Discretizer) -> PredictionSet {
    let pieces = cpdd_accepted(fits, rounded, alpha)
        .into_iter()
        .enumerate()
        .filter(|(_, ok)| *ok)
        .map(|(m, _)| discretizer.preimage_cell_at(m));
    with_grid_window(PredictionSet::from_union(pieces), discretizer.grid())
}

/// Discretized-model conformal from fits on the rounded responses, residuals
/// against the raw `responses`.
pub fn cpdm_from_fits(fits: &GridFits, responses: &[f64], alpha: f64, discretizer: &Discretizer) -> PredictionSet {
    let q = grid_quantiles(fits, responses, alpha);
    let pieces = fits.test_predictions.iter().zip(&q).enumerate().map(|(m, (&mu, &q))| {
        let band = Interval::closed(mu - q, mu + q);
        discretizer.preimage_cell_at(m).intersect(&band)
    });
    with_grid_window(PredictionSet::from_union(pieces), discretizer.grid())
}

fn with_grid_window(set: PredictionSet, grid: &Grid) -> PredictionSet {
    match grid.length_window() {
        Some((lo, hi)) => set.with_length_window(lo, hi),
        None => set,
    }
}

/// Rounds the training responses once; every grid-point fit reuses them.
pub fn round_responses(discretizer: &Discretizer, responses: &[f64]) -> Vec<f64> {
    discretizer.clone().discretize_all(responses)
}

/// Approximate grid conformal: grid points accepted on the raw data, each
/// padded by one grid gap on both sides. May return an empty set.
pub fn approximate_conformal(data: &Dataset, x_new: &[f64], cfg: &ConformalConfig) -> Result<PredictionSet> {
    approximate_conformal_with(&cfg.fitter, data, x_new, cfg)
}

pub fn approximate_conformal_with<F: Fitter>(
    fitter: &F,
    data: &Dataset,
    x_new: &[f64],
    cfg: &ConformalConfig,
) -> Result<PredictionSet> {
    cfg.validate()?;
    let gap = cfg
        .grid()
        .point_gap()
        .ok_or_else(|| Error::InvalidInput("approximate conformal needs a grid spacing".into()))?;
    let design = augmented_design(data, x_new)?;
    let responses = data.responses().as_slice();
    let fits = fit_grid(fitter, &design, responses, cfg.grid(), cfg.execution)?;
    Ok(approximate_from_fits(&fits, responses, cfg.alpha, gap))
}

/// Conformal prediction with discretized data.
pub fn cpdd(data: &Dataset, x_new: &[f64], cfg: &ConformalConfig) -> Result<PredictionSet> {
    Ok(cpdd_and_cpdm_with(&cfg.fitter, data, x_new, cfg)?.cpdd)
}

/// Conformal prediction with a discretized model.
pub fn cpdm(data: &Dataset, x_new: &[f64], cfg: &ConformalConfig) -> Result<PredictionSet> {
    Ok(cpdd_and_cpdm_with(&cfg.fitter, data, x_new, cfg)?.cpdm)
}

/// Both discretized procedures from one shared set of grid fits.
#[derive(Debug, Clone)]
pub struct DiscretizedSets {
    pub cpdd: PredictionSet,
    pub cpdm: PredictionSet,
    pub fits: GridFits,
    pub rounded: Vec<f64>,
}

pub fn cpdd_and_cpdm(data: &Dataset, x_new: &[f64], cfg: &ConformalConfig) -> Result<DiscretizedSets> {
    cpdd_and_cpdm_with(&cfg.fitter, data, x_new, cfg)
}

pub fn cpdd_and_cpdm_with<F: Fitter>(
    fitter: &F,
    data: &Dataset,
    x_new: &[f64],
    cfg: &ConformalConfig,
) -> Result<DiscretizedSets> {
    cfg.validate()?;
    let design = augmented_design(data, x_new)?;
    let responses = data.responses().as_slice();
    let rounded = round_responses(&cfg.discretizer, responses);
    let fits = fit_grid(fitter, &design, &rounded, cfg.grid(), cfg.execution)?;
    Ok(DiscretizedSets {
        cpdd: cpdd_from_fits(&fits, &rounded, cfg.alpha, &cfg.discretizer),
        cpdm: cpdm_from_fits(&fits, responses, cfg.alpha, &cfg.discretizer),
        fits,
        rounded,
    })
}

/// Runs the method named in `cfg.method`.
pub fn predict(data: &Dataset, x_new: &[f64], cfg: &ConformalConfig) -> Result<PredictionSet> {
    match cfg.method {
        Method::Approximate => approximate_conformal(data, x_new, cfg),
        Method::Cpdd => cpdd(data, x_new, cfg),
        Method::Cpdm => cpdm(data, x_new, cfg),
        Method::Split => split_conformal(data, x_new, cfg.alpha, &cfg.fitter, cfg.split_seed),
    }
}
