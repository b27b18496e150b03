use crate::error::{Error, Result};

/// Rank of the conformal order statistic: `ceil((1 - alpha)(n + 1))`, at least 1.
///
/// A relative slack of 1e-12 absorbs roundoff when the product is an exact integer.
pub fn conformal_rank(n: usize, alpha: f64) -> usize {
    let level = (1.0 - alpha) * (n + 1) as f64;
    let k = (level - 1e-12 * level.abs().max(1.0)).ceil();
    (k.max(1.0)) as usize
}

/// The `ceil((1 - alpha)(n + 1))`-th smallest of the `n` residual magnitudes,
/// or `+inf` when that rank exceeds `n`.
pub fn conformal_quantile(residual_magnitudes: &[f64], alpha: f64) -> Result<f64> {
    if residual_magnitudes.is_empty() {
        return Err(Error::InvalidInput("conformal quantile of an empty residual set".into()));
    }
    check_alpha(alpha)?;
    if residual_magnitudes.iter().any(|r| !(r.is_finite() && *r >= 0.0)) {
        return Err(Error::InvalidInput("residual magnitudes must be finite and nonnegative".into()));
    }
    Ok(quantile_unchecked(residual_magnitudes.to_vec(), alpha))
}

/// Same rule without input validation; consumes the buffer.
pub(crate) fn quantile_unchecked(mut residuals: Vec<f64>, alpha: f64) -> f64 {
    let n = residuals.len();
    let k = conformal_rank(n, alpha);
    if k > n {
        return f64::INFINITY;
    }
    let (_, kth, _) = residuals.select_nth_unstable_by(k - 1, f64::total_cmp);
    *kth
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::Config(format!("alpha must lie in (0, 1), got {alpha}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rank_rule_examples() {
        assert_eq!(conformal_quantile(&[1., 2., 3., 4.], 0.2).unwrap(), 4.0);
        assert_eq!(conformal_quantile(&[5.], 0.9).unwrap(), 5.0);
        let ten: Vec<f64> = (1..=10).map(f64::from).collect();
        assert_eq!(conformal_quantile(&ten, 0.05).unwrap(), f64::INFINITY);
        assert_eq!(conformal_rank(9, 0.1), 9);
        assert_eq!(conformal_rank(4, 0.2), 4);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(conformal_quantile(&[], 0.1).is_err());
        assert!(conformal_quantile(&[1.0], 0.0).is_err());
        assert!(conformal_quantile(&[1.0], 1.0).is_err());
        assert!(conformal_quantile(&[-1.0], 0.1).is_err());
        assert!(conformal_quantile(&[f64::NAN], 0.1).is_err());
    }

    #[test]
    fn unordered_input() {
        assert_eq!(conformal_quantile(&[3., 1., 4., 1., 5.], 0.5).unwrap(), 3.0);
    }

    proptest! {
        #[test]
        fn nonincreasing_in_alpha(res in prop::collection::vec(0.0f64..10.0, 1..60)) {
            let mut prev = f64::INFINITY;
            for i in 1..99 {
                let q = conformal_quantile(&res, i as f64 / 100.0).unwrap();
                prop_assert!(q <= prev);
                prev = q;
            }
        }
    }
}
