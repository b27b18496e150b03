//! Non-conformal comparison intervals: the oracle that knows the true mean
//! and noise level, and the naive parametric interval on the Lasso support.

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::fitters::{fit_lasso, fit_ls_on_support, FitterSpec};
use crate::interval::{Interval, PredictionSet};
use crate::normal::normal_quantile;

fn two_sided_z(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Config(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    Ok(normal_quantile(1.0 - alpha / 2.0))
}

fn check_sigma(sigma: f64) -> Result<()> {
    if sigma > 0.0 && sigma.is_finite() {
        Ok(())
    } else {
        Err(Error::Config(format!("sigma must be positive, got {sigma}")))
    }
}

/// `mu(x_new) +- z_{1 - alpha/2} sigma`.
pub fn oracle_interval(x_new: &[f64], mu: impl Fn(&[f64]) -> f64, sigma: f64, alpha: f64) -> Result<PredictionSet> {
    check_sigma(sigma)?;
    let half = two_sided_z(alpha)? * sigma;
    let center = mu(x_new);
    Ok(PredictionSet::single(Interval::closed(center - half, center + half)))
}

#[derive(Debug, Clone)]
pub struct ParametricInterval {
    pub set: PredictionSet,
    /// Lasso support used for the leverage term.
    pub support: Vec<usize>,
    pub leverage: f64,
    /// The restricted Gram matrix needed a diagonal jitter.
    pub jittered: bool,
}

/// Naive least-squares prediction interval on the Lasso-selected support,
/// ignoring the selection step:
/// `center +- z sigma sqrt(1 + x_S'(X_S'X_S)^{-1} x_S)`.
///
/// The center is the Lasso prediction, or the least-squares refit on the
/// support when `refit_center` is set.
pub fn parametric_interval(
    data: &Dataset,
    x_new: &[f64],
    sigma: f64,
    alpha: f64,
    fitter: &FitterSpec,
    refit_center: bool,
) -> Result<ParametricInterval> {
    check_sigma(sigma)?;
    let z = two_sided_z(alpha)?;
    data.check_covariate(x_new)?;
    let lasso = fit_lasso(data, fitter)?;
    let support = lasso.support();
    let refit = fit_ls_on_support(data, &support)?;
    let leverage = refit.leverage(x_new);
    let center = if refit_center { refit.model.predict(x_new) } else { lasso.predict(x_new) };
    let half = z * sigma * (1.0 + leverage).sqrt();
    Ok(ParametricInterval {
        set: PredictionSet::single(Interval::closed(center - half, center + half)),
        jittered: refit.jittered(),
        support,
        leverage,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oracle_width_at_ten_percent() {
        let set = oracle_interval(&[0.0], |_| 2.0, 1.0, 0.1).unwrap();
        let iv = set.intervals()[0];
        assert!((iv.width() - 3.29).abs() < 2e-3);
        assert!((iv.lo.value + iv.hi.value - 4.0).abs() < 1e-15);
    }

    #[test]
    fn oracle_shrinks_with_sigma() {
        let set = oracle_interval(&[0.0], |_| 1.0, 1e-9, 0.1).unwrap();
        assert!(set.length() < 1e-8);
        assert!(set.contains(1.0));
        assert!(oracle_interval(&[0.0], |_| 1.0, 0.0, 0.1).is_err());
    }

    #[test]
    fn oracle_half_alpha() {
        let set = oracle_interval(&[0.0], |_| 0.0, 1.0, 0.5).unwrap();
        assert!((set.length() - 2.0 * 0.674_489_750_196_081_7).abs() < 1e-9);
    }

    #[test]
    fn parametric_empty_support() {
        // Huge penalty: beta = 0, center 0, leverage 0.
        let d = Dataset::from_row_major(4, 2, &[1., 0., 0., 1., 1., 1., -1., 2.], &[1., 0.5, 2., -1.]).unwrap();
        let out = parametric_interval(&d, &[1.0, 1.0], 1.0, 0.1, &FitterSpec::lasso(100.0), false).unwrap();
        assert!(out.support.is_empty());
        assert_eq!(out.leverage, 0.0);
        let iv = out.set.intervals()[0];
        assert_eq!(iv.lo.value, -iv.hi.value);
        assert!((iv.width() - 2.0 * normal_quantile(0.95)).abs() < 1e-12);
    }

    #[test]
    fn parametric_ones_column() {
        // X = (1,1,1,1)', x_new = 1: leverage 1/4.
        let d = Dataset::from_row_major(4, 1, &[1.0; 4], &[3.0, 2.5, 3.5, 3.0]).unwrap();
        let out = parametric_interval(&d, &[1.0], 1.0, 0.1, &FitterSpec::lasso(0.01), false).unwrap();
        assert_eq!(out.support, vec![0]);
        assert!((out.leverage - 0.25).abs() < 1e-12);
        let width = out.set.intervals()[0].width();
        assert!((width - 2.0 * normal_quantile(0.95) * 1.25f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn parametric_zero_covariate_on_support() {
        let d = Dataset::from_row_major(4, 1, &[1.0, 2.0, -1.0, 0.5], &[1.0, 2.0, -1.0, 0.4]).unwrap();
        let out = parametric_interval(&d, &[0.0], 1.0, 0.1, &FitterSpec::lasso(0.01), false).unwrap();
        assert!((out.set.length() - 2.0 * normal_quantile(0.95)).abs() < 1e-12);
    }
}
