//! Per-member counting of commits, work events and meeting attendance.

use std::collections::BTreeMap;

use chrono::NaiveDate;
use serde::Serialize;

use crate::config::{CourseConfig, DateRange};
use crate::ingest::{AttributedCommit, EventKind, MeetingKind, MergePolicy, WorkEvent};

use super::fairness::ContributionMultiset;

fn local_date(
    timestamp: &chrono::DateTime<chrono::FixedOffset>,
    config: &CourseConfig,
) -> NaiveDate {
    timestamp.with_timezone(&config.timezone).date_naive()
}

/// Count commits per roster member inside a window.
///
/// Every roster member gets a count (zero included) and a commit increments
/// each credited member, so jointly authored work gives full credit to each
/// co-author. Merges follow the given policy. With no window, the whole
/// course period counts.
pub fn member_commit_counts(
    commits: &[AttributedCommit],
    config: &CourseConfig,
    window: Option<DateRange>,
    policy: MergePolicy,
) -> ContributionMultiset {
    let window = window.unwrap_or_else(|| config.period());
    let mut counts: BTreeMap<&str, u64> = config.member_ids().map(|id| (id, 0)).collect();

    for commit in commits {
        if !policy.counts(&commit.record) {
            continue;
        }
        if !window.contains(local_date(&commit.record.timestamp, config)) {
            continue;
        }
        for member in &commit.credited_members {
            if let Some(count) = counts.get_mut(member.as_str()) {
                *count += 1;
            }
        }
    }

    let (labels, values): (Vec<String>, Vec<u64>) = config
        .member_ids()
        .map(|id| (id.to_string(), counts[id]))
        .unzip();
    ContributionMultiset::with_labels(values, labels)
        .expect("roster is validated nonempty")
}

/// Per-member work-event counts plus the actors that resolved to nobody.
#[derive(Debug, Clone)]
pub struct WorkEventCounts {
    pub counts: ContributionMultiset,
    /// Distinct unresolved actor logins, sorted.
    pub unresolved_actors: Vec<String>,
}

/// Count work events (push, merged PR, issue comment, opened PR) per member.
///
/// Actors resolve through the roster login aliases; meeting events and the
/// issue-open/close kinds are not work events and never count here.
pub fn work_event_counts(
    events: &[WorkEvent],
    config: &CourseConfig,
    window: Option<DateRange>,
) -> WorkEventCounts {
    let window = window.unwrap_or_else(|| config.period());
    let mut counts: BTreeMap<&str, u64> = config.member_ids().map(|id| (id, 0)).collect();
    let mut unresolved: Vec<String> = Vec::new();

    for event in events {
        if !event.kind.is_work_event() {
            continue;
        }
        if !window.contains(local_date(&event.timestamp, config)) {
            continue;
        }
        match config.resolve_login(&event.actor) {
            Some(member) => *counts.get_mut(member).expect("resolved ids are roster ids") += 1,
            None => {
                if !unresolved.contains(&event.actor) {
                    unresolved.push(event.actor.clone());
                }
            }
        }
    }
    unresolved.sort();

    let (labels, values): (Vec<String>, Vec<u64>) = config
        .member_ids()
        .map(|id| (id.to_string(), counts[id]))
        .unzip();
    WorkEventCounts {
        counts: ContributionMultiset::with_labels(values, labels)
            .expect("roster is validated nonempty"),
        unresolved_actors: unresolved,
    }
}

/// Meetings attended out of meetings held.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Attendance {
    pub attended: u64,
    pub held: u64,
}

impl Attendance {
    /// Attendance rate; undefined (None) when no meetings were held.
    pub fn rate(&self) -> Option<f64> {
        (self.held > 0).then(|| self.attended as f64 / self.held as f64)
    }
}

/// Count meeting attendance per roster member.
///
/// `held` is the number of meeting events matching the filters; `attended`
/// counts the meetings listing the member among the attendees.
pub fn meeting_attendance(
    events: &[WorkEvent],
    config: &CourseConfig,
    kind_filter: Option<MeetingKind>,
    window: Option<DateRange>,
) -> BTreeMap<String, Attendance> {
    let window = window.unwrap_or_else(|| config.period());
    let mut result: BTreeMap<String, Attendance> = config
        .member_ids()
        .map(|id| {
            (
                id.to_string(),
                Attendance {
                    attended: 0,
                    held: 0,
                },
            )
        })
        .collect();

    for event in events {
        if event.kind != EventKind::Meeting {
            continue;
        }
        if let Some(kind) = kind_filter {
            if event.meeting_kind != Some(kind) {
                continue;
            }
        }
        if !window.contains(local_date(&event.timestamp, config)) {
            continue;
        }
        for attendance in result.values_mut() {
            attendance.held += 1;
        }
        for attendee in &event.attendees {
            if let Some(attendance) = result.get_mut(attendee) {
                attendance.attended += 1;
            }
        }
    }

    result
}
