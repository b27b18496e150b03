//! Least squares restricted to a feature subset, keeping the Gram factor
//! needed for leverage terms.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use super::{Design, FitMetadata, FittedModel};
use crate::dataset::Dataset;
use crate::error::{Error, Result};

const JITTER: f64 = 1e-8;

/// A least-squares fit on a support set plus the Cholesky factor of the
/// restricted Gram matrix `X_S' X_S`.
#[derive(Debug, Clone)]
pub struct SupportFit {
    pub model: FittedModel,
    pub support: Vec<usize>,
    gram: Option<Cholesky<f64, Dyn>>,
}

impl SupportFit {
    /// `x_S' (X_S' X_S)^{-1} x_S`; zero for an empty support.
    pub fn leverage(&self, x: &[f64]) -> f64 {
        let Some(gram) = &self.gram else {
            return 0.0;
        };
        let xs = DVector::from_iterator(self.support.len(), self.support.iter().map(|&j| x[j]));
        let solved = gram.solve(&xs);
        xs.dot(&solved)
    }

    pub fn jittered(&self) -> bool {
        self.model.metadata().jittered
    }
}

/// Least squares on the columns in `support` (zero-based indices, no intercept).
pub fn fit_ls_on_support(data: &Dataset, support: &[usize]) -> Result<SupportFit> {
    if let Some(&bad) = support.iter().find(|&&j| j >= data.p()) {
        return Err(Error::InvalidInput(format!("support index {bad} out of range for p = {}", data.p())));
    }
    fit_on_design(&Design::new(data.features().clone()), data.responses().as_slice(), support, false)
}

pub(super) fn fit_on_design(design: &Design, responses: &[f64], support: &[usize], intercept: bool) -> Result<SupportFit> {
    let p = design.p();
    let n = design.n();
    let mut coef = vec![0.0; p];
    let mut meta = FitMetadata {
        fitter: "least-squares-on-support",
        lambda: 0.0,
        iterations: 0,
        converged: true,
        jittered: false,
    };
    let y_mean = if intercept { responses.iter().sum::<f64>() / n as f64 } else { 0.0 };
    if support.is_empty() {
        return Ok(SupportFit {
            model: FittedModel::new(coef, y_mean, meta),
            support: Vec::new(),
            gram: None,
        });
    }

    let mut xs = design.matrix().select_columns(support);
    let mut means = vec![0.0; support.len()];
    if intercept {
        for (k, mut col) in xs.column_iter_mut().enumerate() {
            means[k] = col.sum() / n as f64;
            col.add_scalar_mut(-means[k]);
        }
    }
    let y = DVector::from_iterator(n, responses.iter().map(|v| v - y_mean));
    let gram: DMatrix<f64> = xs.transpose() * &xs;
    let factor = match gram.clone().cholesky() {
        Some(c) => c,
        None => {
            let jitter = JITTER * gram.trace() / support.len() as f64;
            let mut g = gram;
            for k in 0..support.len() {
                g[(k, k)] += jitter;
            }
            meta.jittered = true;
            g.cholesky()
                .ok_or_else(|| Error::Singular("restricted Gram matrix is singular even after jitter".into()))?
        }
    };
    let beta = factor.solve(&(xs.transpose() * y));
    for (k, &j) in support.iter().enumerate() {
        coef[j] = beta[k];
    }
    let b0 = y_mean - beta.iter().zip(&means).map(|(b, m)| b * m).sum::<f64>();
    Ok(SupportFit {
        model: FittedModel::new(coef, b0, meta),
        support: support.to_vec(),
        gram: Some(factor),
    })
}
