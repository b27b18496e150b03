use nalgebra::{DMatrix, DVector};

use super::{unstandardize, Design, FitMetadata, FittedModel, FitterKind, FitterSpec};
use crate::error::{Error, Result};

pub(super) fn fit(design: &Design, responses: &[f64], spec: &FitterSpec) -> Result<FittedModel> {
    let (work, means, scales) = design.standardized(spec.intercept, spec.standardize);
    let n = design.n();
    let y_mean = if spec.intercept {
        responses.iter().sum::<f64>() / n as f64
    } else {
        0.0
    };
    let y = DVector::from_iterator(n, responses.iter().map(|v| v - y_mean));
    let x = work.matrix();
    let mut gram: DMatrix<f64> = x.transpose() * x;
    for j in 0..gram.ncols() {
        gram[(j, j)] += n as f64 * spec.lambda;
    }
    let rhs = x.transpose() * y;
    let chol = gram
        .cholesky()
        .ok_or_else(|| Error::Singular("ridge normal equations are not positive definite".into()))?;
    let beta = chol.solve(&rhs);
    let (coef, intercept) = unstandardize(beta.iter().copied().collect(), y_mean, &means, &scales);
    Ok(FittedModel::new(
        coef,
        intercept,
        FitMetadata {
            fitter: FitterKind::Ridge.name(),
            lambda: spec.lambda,
            iterations: 0,
            converged: true,
            jittered: false,
        },
    ))
}
