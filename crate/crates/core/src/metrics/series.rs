//! Daily commit series and time-spread metrics.

use std::collections::{BTreeMap, BTreeSet};

use chrono::NaiveDate;
use serde::Serialize;

use crate::config::{CourseConfig, MilestoneKind};
use crate::ingest::{AttributedCommit, MergePolicy};

use super::fairness::{unfairness, ContributionMultiset, FairnessResult, Scalar};
use super::MetricsError;

/// Days before a due date (inclusive of the due date itself) that count as
/// the deadline-proximity window.
pub const DEADLINE_WINDOW_DAYS: usize = 2;

/// Commits per calendar day over a fixed period, with milestone annotations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DailySeries {
    start_date: NaiveDate,
    values: Vec<u64>,
    milestone_marks: BTreeMap<usize, MilestoneKind>,
}

impl DailySeries {
    /// Build a series; every marked index must be in range.
    pub fn new(
        start_date: NaiveDate,
        values: Vec<u64>,
        milestone_marks: BTreeMap<usize, MilestoneKind>,
    ) -> Result<Self, MetricsError> {
        if let Some((&index, _)) = milestone_marks.range(values.len()..).next() {
            return Err(MetricsError::MarkOutOfRange {
                index,
                len: values.len(),
            });
        }
        Ok(Self {
            start_date,
            values,
            milestone_marks,
        })
    }

    pub fn start_date(&self) -> NaiveDate {
        self.start_date
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn milestone_marks(&self) -> &BTreeMap<usize, MilestoneKind> {
        &self.milestone_marks
    }

    pub fn date_at(&self, index: usize) -> NaiveDate {
        self.start_date + chrono::Days::new(index as u64)
    }

    pub fn total_commits(&self) -> u64 {
        self.values.iter().sum()
    }

    /// (date, commits, mark) triples in day order.
    pub fn days(&self) -> impl Iterator<Item = (NaiveDate, u64, Option<MilestoneKind>)> + '_ {
        self.values.iter().enumerate().map(|(i, &count)| {
            (
                self.date_at(i),
                count,
                self.milestone_marks.get(&i).copied(),
            )
        })
    }

    /// Sub-series covering `window`; marks outside it drop out.
    ///
    /// Returns None when the window is not fully inside the series.
    pub fn slice(&self, window: crate::config::DateRange) -> Option<DailySeries> {
        if self.values.is_empty() {
            return None;
        }
        let offset = (window.from - self.start_date).num_days();
        if offset < 0 {
            return None;
        }
        let offset = offset as usize;
        let len = window.day_count();
        if offset + len > self.values.len() {
            return None;
        }
        let marks = self
            .milestone_marks
            .iter()
            .filter_map(|(&index, &kind)| {
                index
                    .checked_sub(offset)
                    .filter(|&i| i < len)
                    .map(|i| (i, kind))
            })
            .collect();
        Some(DailySeries {
            start_date: window.from,
            values: self.values[offset..offset + len].to_vec(),
            milestone_marks: marks,
        })
    }
}

/// A built series plus the number of commits that fell outside the period.
#[derive(Debug, Clone)]
pub struct DailyBinning {
    pub series: DailySeries,
    pub outside_period: u64,
}

/// Bin commits into calendar days of the course period.
///
/// Each commit lands on the calendar date of its author timestamp converted
/// to the course timezone; one commit is one count regardless of how many
/// members it credits. Days without commits stay present as zeros, and
/// milestone marks come from the config. When a day carries both a due date
/// and a presentation, the due date wins.
pub fn daily_commit_series(
    commits: &[AttributedCommit],
    config: &CourseConfig,
    policy: MergePolicy,
) -> DailyBinning {
    let period = config.period();
    let mut values = vec![0u64; period.day_count()];
    let mut outside = 0u64;

    for commit in commits {
        if !policy.counts(&commit.record) {
            continue;
        }
        let local_date = commit
            .record
            .timestamp
            .with_timezone(&config.timezone)
            .date_naive();
        if period.contains(local_date) {
            let index = (local_date - period.from).num_days() as usize;
            values[index] += 1;
        } else {
            outside += 1;
        }
    }

    let mut marks = BTreeMap::new();
    for milestone in &config.milestones {
        let index = (milestone.date - period.from).num_days() as usize;
        match marks.get(&index) {
            // due date beats presentation on shared days
            Some(MilestoneKind::DueDate) => {}
            _ => {
                marks.insert(index, milestone.kind);
            }
        }
    }

    let series = DailySeries::new(period.from, values, marks)
        .expect("milestone dates are validated against the period");
    DailyBinning {
        series,
        outside_period: outside,
    }
}

/// Aggregate deadline-proximity statistics for one series.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimeSpreadSummary {
    pub total_commits: u64,
    pub total_days: usize,
    /// Days marked as due dates.
    pub t0_days: usize,
    pub t0_commits: u64,
    pub t0_commit_proportion: f64,
    /// Days on or within two days before a due date, deduplicated.
    pub t2_t0_days: usize,
    pub t2_t0_commits: u64,
    pub t2_t0_commit_proportion: f64,
    /// True when the series holds no commits, making proportions undefined
    /// (reported as 0).
    pub degenerate: bool,
}

/// Compute the proportion of commits made on due dates and in the two days
/// prior, from a milestone-annotated series.
pub fn time_spread_summary(series: &DailySeries) -> TimeSpreadSummary {
    let due_days: Vec<usize> = series
        .milestone_marks()
        .iter()
        .filter(|(_, kind)| **kind == MilestoneKind::DueDate)
        .map(|(&index, _)| index)
        .collect();

    let mut window_days: BTreeSet<usize> = BTreeSet::new();
    for &day in &due_days {
        for offset in 0..=DEADLINE_WINDOW_DAYS {
            if let Some(index) = day.checked_sub(offset) {
                window_days.insert(index);
            }
        }
    }

    let values = series.values();
    let total_commits: u64 = values.iter().sum();
    let t0_commits: u64 = due_days.iter().map(|&i| values[i]).sum();
    let t2_t0_commits: u64 = window_days.iter().map(|&i| values[i]).sum();

    let degenerate = total_commits == 0;
    let proportion = |commits: u64| {
        if degenerate {
            0.0
        } else {
            commits as f64 / total_commits as f64
        }
    };

    TimeSpreadSummary {
        total_commits,
        total_days: series.len(),
        t0_days: due_days.len(),
        t0_commits,
        t0_commit_proportion: proportion(t0_commits),
        t2_t0_days: window_days.len(),
        t2_t0_commits,
        t2_t0_commit_proportion: proportion(t2_t0_commits),
        degenerate,
    }
}

/// Fairness of the daily commit distribution across the whole period.
///
/// Zero-commit days stay in the multiset; dropping them would overstate how
/// spread out the work was.
pub fn time_fairness<T: Scalar>(series: &DailySeries) -> Result<FairnessResult<T>, MetricsError> {
    let multiset = ContributionMultiset::new(series.values().to_vec())?;
    Ok(unfairness(&multiset))
}
