//! Descriptive statistics and correlation, generic over the float width.

use num_traits::Float;

use super::MetricsError;

/// Mean and standard deviation of a sample.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct DescriptiveStats<F> {
    pub mean: F,
    /// Sample standard deviation (n - 1 divisor); 0 for a single value.
    pub stddev: F,
    pub n: usize,
}

/// Compute mean and sample standard deviation.
///
/// The divisor is n - 1: calibrated against the published cohort summaries,
/// where both divisors land inside the stated tolerance and the sample form
/// is adopted as the tie-break.
pub fn descriptive_stats<F: Float>(values: &[F]) -> Result<DescriptiveStats<F>, MetricsError> {
    if values.is_empty() {
        return Err(MetricsError::EmptyInput);
    }
    let n = values.len();
    let count = F::from(n).expect("usize fits the float");
    let mean = values.iter().fold(F::zero(), |acc, &v| acc + v) / count;

    let stddev = if n == 1 {
        F::zero()
    } else {
        let sum_sq = values
            .iter()
            .fold(F::zero(), |acc, &v| acc + (v - mean) * (v - mean));
        (sum_sq / (count - F::one())).sqrt()
    };

    Ok(DescriptiveStats { mean, stddev, n })
}

/// Sample Pearson product-moment correlation coefficient.
///
/// Requires two equally long, non-constant lists of at least two values.
pub fn pearson<F: Float>(xs: &[F], ys: &[F]) -> Result<F, MetricsError> {
    if xs.len() != ys.len() {
        return Err(MetricsError::LengthMismatch {
            left: xs.len(),
            right: ys.len(),
        });
    }
    if xs.len() < 2 {
        return Err(MetricsError::TooFewObservations(xs.len()));
    }

    let count = F::from(xs.len()).expect("usize fits the float");
    let mean_x = xs.iter().fold(F::zero(), |acc, &v| acc + v) / count;
    let mean_y = ys.iter().fold(F::zero(), |acc, &v| acc + v) / count;

    let mut covariance = F::zero();
    let mut var_x = F::zero();
    let mut var_y = F::zero();
    for (&x, &y) in xs.iter().zip(ys) {
        let dx = x - mean_x;
        let dy = y - mean_y;
        covariance = covariance + dx * dy;
        var_x = var_x + dx * dx;
        var_y = var_y + dy * dy;
    }

    if var_x.is_zero() || var_y.is_zero() {
        return Err(MetricsError::ConstantInput);
    }
    Ok(covariance / (var_x * var_y).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_lists_correlate_perfectly() {
        let xs = [0.2, 0.5, 0.9, 0.4];
        let r: f64 = pearson(&xs, &xs).unwrap();
        assert!((r - 1.0).abs() < 1e-12);
    }

    #[test]
    fn affine_images_correlate_with_the_slope_sign() {
        let xs: Vec<f64> = vec![1.0, 2.0, 5.0, 7.0, 11.0];
        let up: Vec<f64> = xs.iter().map(|x| 3.0 * x + 2.0).collect();
        let down: Vec<f64> = xs.iter().map(|x| -0.5 * x + 1.0).collect();
        assert!((pearson(&xs, &up).unwrap() - 1.0).abs() < 1e-12);
        assert!((pearson(&xs, &down).unwrap() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn constant_input_is_an_error() {
        let xs = [1.0, 2.0, 3.0];
        let ys = [4.0, 4.0, 4.0];
        assert_eq!(pearson(&xs, &ys).unwrap_err(), MetricsError::ConstantInput);
    }

    #[test]
    fn length_mismatch_and_short_input_are_errors() {
        assert!(matches!(
            pearson(&[1.0, 2.0], &[1.0]),
            Err(MetricsError::LengthMismatch { .. })
        ));
        assert!(matches!(
            pearson(&[1.0], &[1.0]),
            Err(MetricsError::TooFewObservations(1))
        ));
    }

    #[test]
    fn single_value_mean_is_the_value() {
        let stats = descriptive_stats(&[0.42f64]).unwrap();
        assert_eq!(stats.mean, 0.42);
        assert_eq!(stats.stddev, 0.0);
        assert_eq!(stats.n, 1);
    }

    #[test]
    fn sample_stddev_uses_n_minus_one() {
        // variance of {2,4,4,4,5,5,7,9} is 32/7 with the sample divisor
        let values = [2.0f64, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0];
        let stats = descriptive_stats(&values).unwrap();
        assert_eq!(stats.mean, 5.0);
        assert!((stats.stddev - (32.0f64 / 7.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn empty_input_is_an_error() {
        assert_eq!(
            descriptive_stats::<f64>(&[]).unwrap_err(),
            MetricsError::EmptyInput
        );
    }

    #[test]
    fn works_in_single_precision_too() {
        let xs: Vec<f32> = vec![1.0, 2.0, 3.0];
        let ys: Vec<f32> = vec![2.0, 4.0, 6.0];
        assert!((pearson(&xs, &ys).unwrap() - 1.0).abs() < 1e-6);
    }
}
