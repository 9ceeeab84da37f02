//! Quantitative measures: fairness indices, per-member counts, daily series,
//! time-spread proportions and descriptive statistics.
//!
//! All operations here are pure and deterministic; fairness numerators and
//! denominators are accumulated in exact integer arithmetic and divided only
//! when converting to the caller's scalar type.

mod counts;
mod fairness;
mod series;
mod stats;

pub use counts::{meeting_attendance, member_commit_counts, work_event_counts, Attendance, WorkEventCounts};
pub use fairness::{jain_index, unfairness, ContributionMultiset, FairnessResult, Scalar};
pub use series::{
    daily_commit_series, time_fairness, time_spread_summary, DailyBinning, DailySeries,
    TimeSpreadSummary,
};
pub use stats::{descriptive_stats, pearson, DescriptiveStats};

use thiserror::Error;

/// Errors raised by metric computations.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum MetricsError {
    #[error("contribution multiset must be nonempty")]
    EmptyMultiset,

    #[error("labels length {labels} does not match counts length {counts}")]
    LabelMismatch { counts: usize, labels: usize },

    #[error("Jain index is undefined for an all-zero multiset")]
    JainAllZero,

    #[error("milestone mark index {index} out of range for a {len}-day series")]
    MarkOutOfRange { index: usize, len: usize },

    #[error("input lists have different lengths ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },

    #[error("need at least two paired observations, got {0}")]
    TooFewObservations(usize),

    #[error("correlation is undefined for constant input")]
    ConstantInput,

    #[error("need at least one observation")]
    EmptyInput,
}
