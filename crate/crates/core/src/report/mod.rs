//! Performance reports and chart-data exports.
//!
//! Emitters here are pure and deterministic: identical inputs yield
//! byte-identical text. File writing stays in the CLI layer.

mod export;
mod markdown;
mod svg;

pub use export::{fairness_chart_export, histogram_export, parse_histogram_csv, TeamFairnessRow};
pub use markdown::{render_markdown, render_verdicts_markdown, REPORT_LAYOUT_VERSION};
pub use svg::render_svg_histogram;

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::charter::{evaluate_rules, CharterRule, EvaluationContext, Verdict};
use crate::config::{CourseConfig, DateRange};
use crate::ingest::{AttributedCommit, EventKind, MeetingKind, MergePolicy, WorkEvent};
use crate::metrics::{
    daily_commit_series, meeting_attendance, member_commit_counts, time_fairness,
    time_spread_summary, unfairness, work_event_counts, FairnessResult, TimeSpreadSummary,
};

/// Errors raised while parsing exported chart data back in.
#[derive(Debug, Error)]
pub enum ReportError {
    #[error("line {line}: {message}")]
    Csv { line: usize, message: String },
}

/// One member's row in the performance summary table.
#[derive(Debug, Clone, Serialize)]
pub struct MemberRow {
    pub member_id: String,
    pub commits: u64,
    /// Share of the summed member-credited commits; rows sum to 1 when the
    /// team made any commits.
    pub commit_share: f64,
    /// Attendance per meeting kind, keyed `team`/`ta`/`supervisor`/`lecture`.
    pub meetings_attended_by_kind: BTreeMap<String, crate::metrics::Attendance>,
    pub issues_closed: u64,
    pub work_events: u64,
    pub explanation: Option<String>,
}

/// Everything the summary table reports for one team and window.
#[derive(Debug, Clone, Serialize)]
pub struct PerformanceReport {
    pub team_id: String,
    pub window: DateRange,
    pub rows: Vec<MemberRow>,
    pub team_fairness: FairnessResult<f64>,
    pub time_fairness: FairnessResult<f64>,
    pub time_spread: TimeSpreadSummary,
    pub verdicts: Vec<Verdict>,
}

/// Inputs for building a performance report.
#[derive(Debug, Clone, Copy)]
pub struct ReportContext<'a> {
    pub team_id: &'a str,
    pub commits: &'a [AttributedCommit],
    pub events: &'a [WorkEvent],
    pub config: &'a CourseConfig,
    pub rules: &'a [CharterRule],
    /// Optional sidecar text explaining apparent poor performance, keyed by
    /// member id.
    pub explanations: &'a BTreeMap<String, String>,
    pub merge_policy: MergePolicy,
}

/// Aggregate metrics and verdicts for a window into one report.
///
/// Time metrics are computed over the window's daily sub-series, so a report
/// for the whole course matches the course-wide definitions.
pub fn build_performance_report(ctx: &ReportContext<'_>, window: DateRange) -> PerformanceReport {
    let config = ctx.config;
    let counts = member_commit_counts(ctx.commits, config, Some(window), ctx.merge_policy);
    let total: u128 = counts.total();

    let events_by_member = work_event_counts(ctx.events, config, Some(window));
    let work_events: BTreeMap<&str, u64> = events_by_member
        .counts
        .labeled()
        .expect("work event counts are labeled")
        .collect();

    let attendance_by_kind: BTreeMap<MeetingKind, BTreeMap<String, crate::metrics::Attendance>> = [
        MeetingKind::Team,
        MeetingKind::Ta,
        MeetingKind::Supervisor,
        MeetingKind::Lecture,
    ]
    .into_iter()
    .map(|kind| {
        (
            kind,
            meeting_attendance(ctx.events, config, Some(kind), Some(window)),
        )
    })
    .collect();

    let issues_closed: BTreeMap<&str, u64> = {
        let mut map: BTreeMap<&str, u64> = config.member_ids().map(|id| (id, 0)).collect();
        for event in ctx.events {
            if event.kind != EventKind::IssueClosed {
                continue;
            }
            let date = event.timestamp.with_timezone(&config.timezone).date_naive();
            if !window.contains(date) {
                continue;
            }
            if let Some(member) = config.resolve_login(&event.actor) {
                *map.get_mut(member).expect("resolved ids are roster ids") += 1;
            }
        }
        map
    };

    let rows: Vec<MemberRow> = counts
        .labeled()
        .expect("member counts are labeled")
        .map(|(member_id, commits)| MemberRow {
            member_id: member_id.to_string(),
            commits,
            commit_share: if total == 0 {
                0.0
            } else {
                commits as f64 / total as f64
            },
            meetings_attended_by_kind: attendance_by_kind
                .iter()
                .map(|(kind, per_member)| {
                    (kind.as_str().to_string(), per_member[member_id])
                })
                .collect(),
            issues_closed: issues_closed[member_id],
            work_events: work_events[member_id],
            explanation: ctx.explanations.get(member_id).cloned(),
        })
        .collect();

    // Restrict the series to the window; milestones outside it drop out.
    let windowed = daily_commit_series(ctx.commits, config, ctx.merge_policy)
        .series
        .slice(window)
        .expect("window is validated against the course period");
    let time_spread = time_spread_summary(&windowed);
    let time_fairness =
        time_fairness::<f64>(&windowed).expect("window spans at least one day");

    let charter_ctx = EvaluationContext {
        commits: ctx.commits,
        events: ctx.events,
        config,
        merge_policy: ctx.merge_policy,
    };

    PerformanceReport {
        team_id: ctx.team_id.to_string(),
        window,
        rows,
        team_fairness: unfairness(&counts),
        time_fairness,
        time_spread,
        verdicts: evaluate_rules(ctx.rules, &charter_ctx),
    }
}
