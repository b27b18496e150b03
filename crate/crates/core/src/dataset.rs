//! Training data: an `n x p` feature matrix paired with `n` responses.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// A validated regression dataset.
///
/// Features are stored column-major (one contiguous column per feature),
/// which is the access pattern of coordinate descent.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    features: DMatrix<f64>,
    responses: DVector<f64>,
}

impl Dataset {
    pub fn new(features: DMatrix<f64>, responses: DVector<f64>) -> Result<Self> {
        let (n, p) = features.shape();
        if n == 0 {
            return Err(Error::InvalidSize("dataset needs at least one row".into()));
        }
        if p == 0 {
            return Err(Error::InvalidSize("dataset needs at least one feature".into()));
        }
        if responses.len() != n {
            return Err(Error::InvalidSize(format!(
                "{n} feature rows but {} responses",
                responses.len()
            )));
        }
        if let Some(idx) = features.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "non-finite feature at row {}, column {}",
                idx % n,
                idx / n
            )));
        }
        if let Some(i) = responses.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite response at row {i}")));
        }
        Ok(Self { features, responses })
    }

    /// Builds a dataset from row-major feature storage.
    pub fn from_row_major(n: usize, p: usize, features: &[f64], responses: &[f64]) -> Result<Self> {
        if features.len() != n * p {
            return Err(Error::InvalidSize(format!(
                "expected {} feature values for {n}x{p}, got {}",
                n * p,
                features.len()
            )));
        }
        Self::new(
            DMatrix::from_row_slice(n, p, features),
            DVector::from_column_slice(responses),
        )
    }

    pub fn from_rows(rows: &[Vec<f64>], responses: &[f64]) -> Result<Self> {
        let p = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != p) {
            return Err(Error::Dimension { expected: p, got: bad.len() });
        }
        let flat: Vec<f64> = rows.iter().flatten().copied().collect();
        Self::from_row_major(rows.len(), p, &flat, responses)
    }

    pub fn n(&self) -> usize {
        self.features.nrows()
    }

    pub fn p(&self) -> usize {
        self.features.ncols()
    }

    pub fn features(&self) -> &DMatrix<f64> {
        &self.features
    }

    pub fn responses(&self) -> &DVector<f64> {
        &self.responses
    }

    pub fn row(&self, i: usize) -> Vec<f64> {
        self.features.row(i).iter().copied().collect()
    }

    /// Returns the feature matrix with `x_new` appended as row `n + 1`.
    pub fn augmented_features(&self, x_new: &[f64]) -> Result<DMatrix<f64>> {
        self.check_covariate(x_new)?;
        let n = self.n();
        let mut out = self.features.clone().insert_row(n, 0.0);
        for (j, &v) in x_new.iter().enumerate() {
            out[(n, j)] = v;
        }
        Ok(out)
    }

    /// Returns the rows at `indices`, in that order.
    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        let features = self.features.select_rows(indices);
        let responses = DVector::from_iterator(indices.len(), indices.iter().map(|&i| self.responses[i]));
        Self::new(features, responses)
    }

    pub fn check_covariate(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.p() {
            return Err(Error::Dimension { expected: self.p(), got: x.len() });
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("non-finite test covariate".into()));
        }
        Ok(())
    }

    pub fn response_range(&self) -> (f64, f64) {
        self.responses
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &y| (lo.min(y), hi.max(y)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_shape_mismatch() {
        let err = Dataset::from_row_major(2, 2, &[1.0, 2.0, 3.0, 4.0], &[1.0]).unwrap_err();
        assert!(matches!(err, Error::InvalidSize(_)));
    }

    #[test]
    fn rejects_non_finite() {
        assert!(Dataset::from_row_major(1, 1, &[f64::NAN], &[1.0]).is_err());
        assert!(Dataset::from_row_major(1, 1, &[1.0], &[f64::INFINITY]).is_err());
    }

    #[test]
    fn rejects_empty() {
        assert!(Dataset::from_row_major(0, 1, &[], &[]).is_err());
        assert!(Dataset::from_row_major(1, 0, &[], &[1.0]).is_err());
    }

    #[test]
    fn row_major_layout() {
        let d = Dataset::from_row_major(2, 3, &[1., 2., 3., 4., 5., 6.], &[0., 1.]).unwrap();
        assert_eq!(d.row(1), vec![4., 5., 6.]);
        assert_eq!(d.features()[(0, 2)], 3.0);
    }

    #[test]
    fn augmented_appends_test_row() {
        let d = Dataset::from_row_major(2, 2, &[1., 2., 3., 4.], &[0., 1.]).unwrap();
        let a = d.augmented_features(&[9., 8.]).unwrap();
        assert_eq!(a.nrows(), 3);
        assert_eq!(a[(2, 0)], 9.0);
        assert_eq!(a[(2, 1)], 8.0);
        assert_eq!(a[(1, 1)], 4.0);
        assert!(matches!(d.augmented_features(&[1.0]), Err(Error::Dimension { .. })));
    }
}
