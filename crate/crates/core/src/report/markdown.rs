//! Markdown rendering of the performance report.
//!
//! The table layout is fixed and versioned (see `REPORT_LAYOUT_VERSION`) so
//! that reports generated before each demo stay diffable.

use super::PerformanceReport;

/// Bumped whenever the rendered layout changes shape.
pub const REPORT_LAYOUT_VERSION: &str = "1";

fn pct(value: f64) -> String {
    format!("{:.2}%", value * 100.0)
}

/// Render the report as CommonMark.
pub fn render_markdown(report: &PerformanceReport) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "# Performance report: {}\n\n(layout v{REPORT_LAYOUT_VERSION}, window {})\n\n",
        report.team_id, report.window
    ));

    out.push_str("## Member summary\n\n");
    out.push_str(
        "| Member | Commits | Commit share | Team | TA | Supervisor | Lecture | Issues closed | Work events | Explanation |\n",
    );
    out.push_str("|---|---:|---:|---:|---:|---:|---:|---:|---:|---|\n");
    for row in &report.rows {
        let meeting = |kind: &str| {
            let attendance = &row.meetings_attended_by_kind[kind];
            format!("{}/{}", attendance.attended, attendance.held)
        };
        out.push_str(&format!(
            "| {} | {} | {} | {} | {} | {} | {} | {} | {} | {} |\n",
            row.member_id,
            row.commits,
            pct(row.commit_share),
            meeting("team"),
            meeting("ta"),
            meeting("supervisor"),
            meeting("lecture"),
            row.issues_closed,
            row.work_events,
            row.explanation.as_deref().unwrap_or(""),
        ));
    }

    out.push_str("\n## Fairness\n\n");
    out.push_str(&format!(
        "- Team fairness: {:.6} (unfairness {:.6}{})\n",
        report.team_fairness.fairness,
        report.team_fairness.unfairness,
        if report.team_fairness.degenerate {
            ", degenerate"
        } else {
            ""
        }
    ));
    out.push_str(&format!(
        "- Time fairness: {:.6} (unfairness {:.6}{})\n",
        report.time_fairness.fairness,
        report.time_fairness.unfairness,
        if report.time_fairness.degenerate {
            ", degenerate"
        } else {
            ""
        }
    ));

    let spread = &report.time_spread;
    out.push_str("\n## Time spread\n\n");
    out.push_str("| Metric | Value |\n|---|---:|\n");
    out.push_str(&format!("| Total commits | {} |\n", spread.total_commits));
    out.push_str(&format!("| Total days | {} |\n", spread.total_days));
    out.push_str(&format!(
        "| T-0 days | {} |\n| T-0 commits | {} ({}) |\n",
        spread.t0_days,
        spread.t0_commits,
        pct(spread.t0_commit_proportion)
    ));
    out.push_str(&format!(
        "| T-2...T-0 days | {} |\n| T-2...T-0 commits | {} ({}) |\n",
        spread.t2_t0_days,
        spread.t2_t0_commits,
        pct(spread.t2_t0_commit_proportion)
    ));
    if spread.degenerate {
        out.push_str("\nNo commits in the window; proportions are reported as 0.\n");
    }

    if !report.verdicts.is_empty() {
        out.push_str("\n## Charter verdicts\n\n");
        out.push_str(&render_verdicts_markdown(&report.verdicts));
    }

    out
}

/// Render a verdict list as a Markdown table.
pub fn render_verdicts_markdown(verdicts: &[crate::charter::Verdict]) -> String {
    let mut out = String::new();
    out.push_str("| Rule | Member | Window | Observed | Threshold | Triggered | Severity | Consequence |\n");
    out.push_str("|---|---|---|---:|---:|---|---|---|\n");
    for verdict in verdicts {
        out.push_str(&format!(
            "| {} | {} | {} | {:.6} | {:.6} | {} | {:?} | {} |\n",
            verdict.rule_id,
            verdict.member_id,
            verdict.window_resolved,
            verdict.observed,
            verdict.threshold,
            if verdict.degenerate {
                "n/a"
            } else if verdict.triggered {
                "yes"
            } else {
                "no"
            },
            verdict.severity,
            verdict.consequence,
        ));
    }
    out
}
