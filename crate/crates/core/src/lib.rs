//! Discretized conformal prediction.
//!
//! Conformal prediction intervals computed over a finite grid of candidate
//! responses, with two discretized procedures that keep the finite-sample
//! coverage guarantee, the usual informal grid approximation, split
//! conformal, and a Monte Carlo harness that measures coverage and interval
//! length on a simulated sparse-regression problem.
//!
//! ```
//! use dcp_core::{conformal, fitters::FitterSpec, grid, Dataset};
//!
//! let data = Dataset::from_row_major(5, 1, &[0.0, 1.0, 2.0, 3.0, 4.0], &[0.1, 0.9, 2.2, 2.9, 4.1]).unwrap();
//! let (lo, hi) = data.response_range();
//! let disc = grid::Discretizer::nearest(grid::make_grid(lo, hi, 10).unwrap());
//! let cfg = conformal::ConformalConfig::new(0.2, FitterSpec::ridge(0.01), disc, conformal::Method::Cpdm);
//! let set = conformal::predict(&data, &[2.0], &cfg).unwrap();
//! assert!(set.contains(2.0));
//! ```

pub mod baselines;
pub mod cli;
pub mod conformal;
pub mod dataset;
pub mod error;
pub mod fitters;
pub mod grid;
pub mod interval;
pub mod normal;
pub mod simulation;

pub use dataset::Dataset;
pub use error::{Error, Result};
pub use fitters::{FittedModel, Fitter, FitterKind, FitterSpec};
pub use grid::{make_grid, Discretizer, Grid, RoundingMode};
pub use interval::{Bound, Interval, PredictionSet};
