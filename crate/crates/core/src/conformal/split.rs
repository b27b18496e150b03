//! Split conformal: one fit on a random half, calibration on the other.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::quantile::{check_alpha, quantile_unchecked};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::fitters::{Design, Fitter, FitterSpec};
use crate::interval::{Interval, PredictionSet};

pub fn split_conformal(
    data: &Dataset,
    x_new: &[f64],
    alpha: f64,
    fitter: &FitterSpec,
    split_seed: u64,
) -> Result<PredictionSet> {
    fitter.validate()?;
    split_conformal_with(fitter, data, x_new, alpha, split_seed)
}

/// Split conformal with any [`Fitter`]. The first `n / 2` shuffled rows fit
/// the model; the remaining `n - n / 2` rows calibrate the residual quantile.
pub fn split_conformal_with<F: Fitter>(
    fitter: &F,
    data: &Dataset,
    x_new: &[f64],
    alpha: f64,
    split_seed: u64,
) -> Result<PredictionSet> {
    check_alpha(alpha)?;
    data.check_covariate(x_new)?;
    let n = data.n();
    if n < 2 {
        return Err(Error::InvalidInput("split conformal needs at least two training points".into()));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(split_seed));
    let (fit_rows, calib_rows) = order.split_at(n / 2);

    let train = data.subset(fit_rows)?;
    let model = fitter.fit(&Design::new(train.features().clone()), train.responses().as_slice(), None)?;
    let residuals = calib_rows
        .iter()
        .map(|&i| (data.responses()[i] - model.predict(&data.row(i))).abs())
        .collect();
    let q = quantile_unchecked(residuals, alpha);
    let center = model.predict(x_new);
    Ok(PredictionSet::single(Interval::closed(center - q, center + q)))
}
