//! Mining and analytics for student team repositories.
//!
//! The crate ingests git-log exports and project-event files, attributes
//! commits to roster members, computes contribution-fairness and time-spread
//! metrics, evaluates team-charter rules, renders report artifacts, generates
//! the capstone template tree, and simulates synthetic team histories for
//! controlled comparisons.
//!
//! The numeric kernel is generic over the output scalar: every fairness
//! computation is carried out in exact integer arithmetic and only converted
//! at the final division, so the same code path yields `f64` values for
//! reports and exact rationals for tests. See [`metrics::Scalar`].

pub mod charter;
pub mod config;
pub mod ingest;
pub mod metrics;
pub mod report;
pub mod scaffold;
pub mod simulate;

pub use config::{CourseConfig, DateRange, Member, Milestone, MilestoneKind};
pub use ingest::{AttributedCommit, CommitRecord, EventKind, MeetingKind, MergePolicy, WorkEvent};
pub use metrics::{ContributionMultiset, DailySeries, FairnessResult, TimeSpreadSummary};

/// Exact-rational scalar used where results must be bit-for-bit reproducible.
pub type Exact = num_rational::BigRational;

/// Fairness result in the default reporting precision.
pub type Fairness = metrics::FairnessResult<f64>;

/// Fairness result in exact rational arithmetic.
pub type ExactFairness = metrics::FairnessResult<Exact>;
