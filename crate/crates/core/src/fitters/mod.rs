//! Exchangeable model-fitting algorithms.
//!
//! Every fitter is a pure function of the design and responses and treats the
//! rows symmetrically, so permuting the input permutes nothing in the output
//! model (up to solver tolerance for the iterative ones).

mod lasso;
mod ridge;
mod support;

use std::borrow::Cow;

use nalgebra::DMatrix;

use crate::dataset::Dataset;
use crate::error::{Error, Result};

pub use lasso::{lasso_kkt_violation, soft_threshold};
pub use support::{fit_ls_on_support, SupportFit};

/// Default convergence tolerance on the largest coefficient update.
pub const DEFAULT_TOL: f64 = 1e-7;
/// Default cap on coordinate-descent sweeps.
pub const DEFAULT_MAX_ITER: usize = 100_000;

/// A design matrix with per-column statistics cached for repeated fits.
#[derive(Debug, Clone)]
pub struct Design {
    x: DMatrix<f64>,
    sq_norms: Vec<f64>,
}

impl Design {
    pub fn new(x: DMatrix<f64>) -> Self {
        let sq_norms = x.column_iter().map(|c| c.norm_squared()).collect();
        Self { x, sq_norms }
    }

    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    pub fn p(&self) -> usize {
        self.x.ncols()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.x
    }

    pub fn sq_norms(&self) -> &[f64] {
        &self.sq_norms
    }

    pub fn column(&self, j: usize) -> &[f64] {
        let n = self.n();
        &self.x.as_slice()[j * n..(j + 1) * n]
    }

    /// Centers (and optionally scales) the columns. Returns the transformed
    /// design with the column means and scales that were applied.
    fn standardized(&self, center: bool, scale: bool) -> (Cow<'_, Design>, Vec<f64>, Vec<f64>) {
        let (n, p) = (self.n(), self.p());
        if !center && !scale {
            return (Cow::Borrowed(self), vec![0.0; p], vec![1.0; p]);
        }
        let mut x = self.x.clone();
        let mut means = vec![0.0; p];
        let mut scales = vec![1.0; p];
        for (j, mut col) in x.column_iter_mut().enumerate() {
            if center {
                means[j] = col.sum() / n as f64;
                col.add_scalar_mut(-means[j]);
            }
            if scale {
                let sd = (col.norm_squared() / n as f64).sqrt();
                if sd > 0.0 {
                    scales[j] = sd;
                    col /= sd;
                }
            }
        }
        (Cow::Owned(Design::new(x)), means, scales)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitterKind {
    Lasso,
    Ridge,
    /// Lasso for variable selection, then least squares on the selected support.
    LeastSquaresOnSupport,
    /// Mean of all responses, ignoring the features.
    ConstantMean,
}

impl FitterKind {
    pub fn name(self) -> &'static str {
        match self {
            FitterKind::Lasso => "lasso",
            FitterKind::Ridge => "ridge",
            FitterKind::LeastSquaresOnSupport => "least-squares-on-support",
            FitterKind::ConstantMean => "constant-mean",
        }
    }
}

impl std::str::FromStr for FitterKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lasso" => Ok(FitterKind::Lasso),
            "ridge" => Ok(FitterKind::Ridge),
            "least-squares-on-support" | "ls-on-support" => Ok(FitterKind::LeastSquaresOnSupport),
            "constant-mean" | "mean" => Ok(FitterKind::ConstantMean),
            other => Err(Error::Config(format!("unknown fitter `{other}`"))),
        }
    }
}

/// Fitter choice and solver settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitterSpec {
    pub kind: FitterKind,
    pub lambda: f64,
    pub tol: f64,
    pub max_iter: usize,
    pub intercept: bool,
    pub standardize: bool,
}

impl FitterSpec {
    pub fn new(kind: FitterKind, lambda: f64) -> Self {
        Self {
            kind,
            lambda,
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
            intercept: false,
            standardize: false,
        }
    }

    pub fn lasso(lambda: f64) -> Self {
        Self::new(FitterKind::Lasso, lambda)
    }

    pub fn ridge(lambda: f64) -> Self {
        Self::new(FitterKind::Ridge, lambda)
    }

    pub fn constant_mean() -> Self {
        Self::new(FitterKind::ConstantMean, 0.0)
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }

    pub fn with_intercept(mut self, intercept: bool) -> Self {
        self.intercept = intercept;
        self
    }

    pub fn with_standardize(mut self, standardize: bool) -> Self {
        self.standardize = standardize;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda >= 0.0) || !self.lambda.is_finite() {
            return Err(Error::Config(format!("lambda must be finite and >= 0, got {}", self.lambda)));
        }
        if !(self.tol > 0.0) {
            return Err(Error::Config(format!("tol must be > 0, got {}", self.tol)));
        }
        if self.max_iter == 0 {
            return Err(Error::Config("max_iter must be >= 1".into()));
        }
        Ok(())
    }
}

/// Diagnostics attached to every fitted model.
#[derive(Debug, Clone, PartialEq)]
pub struct FitMetadata {
    pub fitter: &'static str,
    pub lambda: f64,
    /// Coordinate-descent sweeps (0 for direct solvers).
    pub iterations: usize,
    /// False when an iterative solver hit `max_iter`; the model is still usable.
    pub converged: bool,
    /// True when a singular Gram matrix was regularized with a diagonal jitter.
    pub jittered: bool,
}

/// A fitted linear predictor `x -> intercept + x . coefficients`.
#[derive(Debug, Clone, PartialEq)]
pub struct FittedModel {
    coefficients: Vec<f64>,
    intercept: f64,
    meta: FitMetadata,
}

impl FittedModel {
    pub fn new(coefficients: Vec<f64>, intercept: f64, meta: FitMetadata) -> Self {
        Self { coefficients, intercept, meta }
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn intercept(&self) -> f64 {
        self.intercept
    }

    pub fn metadata(&self) -> &FitMetadata {
        &self.meta
    }

    pub fn support(&self) -> Vec<usize> {
        self.coefficients
            .iter()
            .enumerate()
            .filter(|(_, &b)| b != 0.0)
            .map(|(j, _)| j)
            .collect()
    }

    pub fn predict(&self, x: &[f64]) -> f64 {
        self.intercept
            + self
                .coefficients
                .iter()
                .zip(x)
                .filter(|(&b, _)| b != 0.0)
                .map(|(b, v)| b * v)
                .sum::<f64>()
    }

    /// Predictions for every row of `design`.
    pub fn predict_design(&self, design: &Design) -> Vec<f64> {
        let mut out = vec![self.intercept; design.n()];
        for (j, &b) in self.coefficients.iter().enumerate() {
            if b != 0.0 {
                for (o, &x) in out.iter_mut().zip(design.column(j)) {
                    *o += b * x;
                }
            }
        }
        out
    }
}

/// A model-fitting algorithm.
pub trait Fitter: Sync {
    /// Fits `responses` on `design`. `warm_start` is a hint for iterative
    /// solvers and must not change the optimum beyond solver tolerance.
    fn fit(&self, design: &Design, responses: &[f64], warm_start: Option<&FittedModel>) -> Result<FittedModel>;
}

impl Fitter for FitterSpec {
    fn fit(&self, design: &Design, responses: &[f64], warm_start: Option<&FittedModel>) -> Result<FittedModel> {
        self.validate()?;
        if responses.len() != design.n() {
            return Err(Error::InvalidSize(format!(
                "{} design rows but {} responses",
                design.n(),
                responses.len()
            )));
        }
        match self.kind {
            FitterKind::Lasso => lasso::fit(design, responses, self, warm_start),
            FitterKind::Ridge => ridge::fit(design, responses, self),
            FitterKind::LeastSquaresOnSupport => {
                let selected = lasso::fit(design, responses, self, warm_start)?;
                let refit = support::fit_on_design(design, responses, &selected.support(), self.intercept)?;
                let mut model = refit.model;
                model.meta.iterations = selected.meta.iterations;
                model.meta.converged = selected.meta.converged;
                model.meta.lambda = self.lambda;
                model.meta.fitter = FitterKind::LeastSquaresOnSupport.name();
                Ok(model)
            }
            FitterKind::ConstantMean => {
                let mean = responses.iter().sum::<f64>() / responses.len() as f64;
                Ok(FittedModel::new(
                    vec![0.0; design.p()],
                    mean,
                    FitMetadata {
                        fitter: FitterKind::ConstantMean.name(),
                        lambda: 0.0,
                        iterations: 0,
                        converged: true,
                        jittered: false,
                    },
                ))
            }
        }
    }
}

/// Fits the Lasso `(1/2n)||Y - Xb||^2 + lambda ||b||_1` by cyclic coordinate descent.
pub fn fit_lasso(data: &Dataset, spec: &FitterSpec) -> Result<FittedModel> {
    let spec = FitterSpec { kind: FitterKind::Lasso, ..*spec };
    spec.fit(&Design::new(data.features().clone()), data.responses().as_slice(), None)
}

/// Fits ridge regression `(X'X + n lambda I) b = X'Y`.
pub fn fit_ridge(data: &Dataset, spec: &FitterSpec) -> Result<FittedModel> {
    let spec = FitterSpec { kind: FitterKind::Ridge, ..*spec };
    spec.fit(&Design::new(data.features().clone()), data.responses().as_slice(), None)
}

/// Standard Lasso penalty `sigma * sqrt(log(p) / 2n)`.
pub fn default_lasso_lambda(sigma: f64, n: usize, p: usize) -> f64 {
    sigma * ((p as f64).ln() / (2.0 * n as f64)).sqrt()
}

/// Undoes centering/scaling: returns coefficients on the original scale and the intercept.
fn unstandardize(beta: Vec<f64>, y_mean: f64, means: &[f64], scales: &[f64]) -> (Vec<f64>, f64) {
    let coef: Vec<f64> = beta.iter().zip(scales).map(|(b, s)| b / s).collect();
    let intercept = y_mean - coef.iter().zip(means).map(|(b, m)| b * m).sum::<f64>();
    (coef, intercept)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn data() -> Dataset {
        Dataset::from_row_major(4, 2, &[1., 0., 0., 1., 1., 1., 2., -1.], &[1., 2., 3., 0.5]).unwrap()
    }

    #[test]
    fn spec_validation() {
        assert!(FitterSpec::lasso(-1.0).validate().is_err());
        assert!(FitterSpec::lasso(1.0).with_tol(0.0).validate().is_err());
        assert!(FitterSpec::lasso(1.0).with_max_iter(0).validate().is_err());
        assert!(FitterSpec::lasso(0.0).validate().is_ok());
    }

    #[test]
    fn constant_mean_predicts_mean() {
        let d = data();
        let design = Design::new(d.features().clone());
        let m = FitterSpec::constant_mean().fit(&design, d.responses().as_slice(), None).unwrap();
        assert_eq!(m.predict(&[10.0, -3.0]), 6.5 / 4.0);
        assert!(m.support().is_empty());
    }

    #[test]
    fn predict_design_matches_rowwise() {
        let d = data();
        let design = Design::new(d.features().clone());
        let m = FittedModel::new(
            vec![0.5, -2.0],
            0.25,
            FitMetadata { fitter: "t", lambda: 0.0, iterations: 0, converged: true, jittered: false },
        );
        let rows = m.predict_design(&design);
        for (i, v) in rows.iter().enumerate() {
            assert_eq!(*v, m.predict(&d.row(i)));
        }
    }

    #[test]
    fn response_length_checked() {
        let design = Design::new(data().features().clone());
        assert!(FitterSpec::lasso(0.1).fit(&design, &[1.0], None).is_err());
    }

    #[test]
    fn default_lambda_formula() {
        let l = default_lasso_lambda(1.0, 100, 200);
        assert!((l - (200f64.ln() / 200.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn kind_parsing() {
        assert_eq!("lasso".parse::<FitterKind>().unwrap(), FitterKind::Lasso);
        assert_eq!("mean".parse::<FitterKind>().unwrap(), FitterKind::ConstantMean);
        assert!("svm".parse::<FitterKind>().is_err());
    }
}
