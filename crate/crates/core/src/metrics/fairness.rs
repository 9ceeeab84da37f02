//! Contribution fairness indices.
//!
//! The unfairness index sums, over all ordered pairs of contribution counts
//! where one exceeds the other, the excess of the larger over the smaller,
//! normalized by `(n - 1)` times the total:
//!
//! ```text
//! unfairness(C) = sum over c, x in C with c > x of (c - x)
//!                 -----------------------------------------
//!                        (|C| - 1) * sum over C
//! ```
//!
//! 0 means equal work, 1 means one contributor did everything, and values in
//! between give the proportion of work that could have moved to someone who
//! did less. Fairness is the complement, `1 - unfairness`. Pairs range over
//! multiset *positions*, so duplicate counts each contribute.
//!
//! Both indices are computed as exact integer ratios; the scalar type chosen
//! by the caller only affects the final division.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use super::MetricsError;

/// Multiset of nonnegative contribution counts, one per contributor (or per
/// day, for time fairness). Never empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContributionMultiset {
    counts: Vec<u64>,
    labels: Option<Vec<String>>,
}

impl ContributionMultiset {
    pub fn new(counts: Vec<u64>) -> Result<Self, MetricsError> {
        if counts.is_empty() {
            return Err(MetricsError::EmptyMultiset);
        }
        Ok(Self {
            counts,
            labels: None,
        })
    }

    pub fn with_labels(counts: Vec<u64>, labels: Vec<String>) -> Result<Self, MetricsError> {
        if counts.is_empty() {
            return Err(MetricsError::EmptyMultiset);
        }
        if labels.len() != counts.len() {
            return Err(MetricsError::LabelMismatch {
                counts: counts.len(),
                labels: labels.len(),
            });
        }
        Ok(Self {
            counts,
            labels: Some(labels),
        })
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    #[must_use]
    pub fn is_empty(&self) -> bool {
        false // nonempty by construction
    }

    pub fn total(&self) -> u128 {
        self.counts.iter().map(|&c| c as u128).sum()
    }

    /// Labeled counts, when labels are present.
    pub fn labeled(&self) -> Option<impl Iterator<Item = (&str, u64)>> {
        self.labels.as_ref().map(|labels| {
            labels
                .iter()
                .map(String::as_str)
                .zip(self.counts.iter().copied())
        })
    }
}

/// Output scalar of the fairness kernel.
///
/// `f64`/`f32` round at the final division; `BigRational` keeps the exact
/// value. Crate-root aliases pick the common instantiations.
pub trait Scalar: Clone + PartialOrd + Zero + One + std::ops::Sub<Output = Self> {
    fn from_ratio(ratio: &BigRational) -> Self;

    /// `1 - self`, the fairness complement.
    fn complement(&self) -> Self {
        Self::one() - self.clone()
    }
}

impl Scalar for f64 {
    fn from_ratio(ratio: &BigRational) -> Self {
        ratio.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {
    fn from_ratio(ratio: &BigRational) -> Self {
        ratio.to_f32().unwrap_or(f32::NAN)
    }
}

impl Scalar for BigRational {
    fn from_ratio(ratio: &BigRational) -> Self {
        ratio.clone()
    }
}

/// Paired unfairness/fairness values.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct FairnessResult<T> {
    pub unfairness: T,
    pub fairness: T,
    /// True when the index denominator is zero: a single contributor, or an
    /// all-zero multiset. Unfairness is reported as 0 in that case.
    pub degenerate: bool,
}

impl<T: Scalar> FairnessResult<T> {
    fn degenerate() -> Self {
        Self {
            unfairness: T::zero(),
            fairness: T::one(),
            degenerate: true,
        }
    }
}

/// Exact numerator and denominator of the unfairness index.
///
/// The numerator is the summed pairwise excess over ordered position pairs,
/// computed by the sorted prefix-sum identity; the denominator is
/// `(n - 1) * total`.
fn unfairness_ratio(counts: &[u64]) -> (BigUint, BigUint) {
    let n = counts.len();
    let mut sorted: Vec<u64> = counts.to_vec();
    sorted.sort_unstable();

    // sum over i < j of (sorted[j] - sorted[i]) == sum_j (j * c_j - prefix_j)
    let mut numerator = BigUint::zero();
    let mut prefix = BigUint::zero();
    for (j, &value) in sorted.iter().enumerate() {
        let value = BigUint::from(value);
        numerator += &value * BigUint::from(j) - &prefix;
        prefix += value;
    }

    let denominator = BigUint::from(n as u64 - 1) * &prefix;
    (numerator, denominator)
}

fn ratio(numerator: BigUint, denominator: BigUint) -> BigRational {
    BigRational::new(BigInt::from(numerator), BigInt::from(denominator))
}

/// Compute the unfairness index and its fairness complement.
///
/// Degenerate inputs (a single contributor, or all-zero counts) make the
/// denominator zero; they yield unfairness 0 with the flag set rather than
/// an error, so batch pipelines stay total.
pub fn unfairness<T: Scalar>(c: &ContributionMultiset) -> FairnessResult<T> {
    let (numerator, denominator) = unfairness_ratio(c.counts());
    if denominator.is_zero() {
        return FairnessResult::degenerate();
    }
    let unfairness = T::from_ratio(&ratio(numerator, denominator));
    FairnessResult {
        fairness: unfairness.complement(),
        unfairness,
        degenerate: false,
    }
}

/// Jain's fairness index, `(sum c)^2 / (n * sum c^2)`.
///
/// Ranges from `1/n` (one-hot) to 1 (equal allocation); undefined when every
/// count is zero.
pub fn jain_index<T: Scalar>(c: &ContributionMultiset) -> Result<T, MetricsError> {
    let sum: BigUint = c.counts().iter().map(|&v| BigUint::from(v)).sum();
    if sum.is_zero() {
        return Err(MetricsError::JainAllZero);
    }
    let sum_sq: BigUint = c
        .counts()
        .iter()
        .map(|&v| {
            let v = BigUint::from(v);
            &v * &v
        })
        .sum();
    let numerator = &sum * &sum;
    let denominator = BigUint::from(c.len() as u64) * sum_sq;
    Ok(T::from_ratio(&ratio(numerator, denominator)))
}
