//! CSV exports for the daily histogram and the per-team fairness chart.

use std::collections::BTreeMap;

use chrono::NaiveDate;

use crate::config::MilestoneKind;
use crate::metrics::{descriptive_stats, pearson, DailySeries};

use super::ReportError;

const HISTOGRAM_HEADER: &str = "Date,Commits,Highlight";

fn highlight(kind: Option<MilestoneKind>) -> &'static str {
    match kind {
        Some(MilestoneKind::DueDate) => "Red",
        Some(MilestoneKind::Presentation) => "Orange",
        None => "None",
    }
}

/// Render a daily series as CSV with one row per day.
///
/// Columns are exactly `Date,Commits,Highlight`; due dates highlight `Red`,
/// presentation days `Orange`, everything else `None`.
pub fn histogram_export(series: &DailySeries) -> String {
    let mut out = String::from(HISTOGRAM_HEADER);
    out.push('\n');
    for (date, commits, mark) in series.days() {
        out.push_str(&format!("{date},{commits},{}\n", highlight(mark)));
    }
    out
}

/// Parse histogram CSV back into a series; the round-trip is exact.
pub fn parse_histogram_csv(text: &str) -> Result<DailySeries, ReportError> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header.trim() == HISTOGRAM_HEADER => {}
        other => {
            return Err(ReportError::Csv {
                line: 1,
                message: format!(
                    "expected header {HISTOGRAM_HEADER:?}, found {:?}",
                    other.map(|(_, l)| l).unwrap_or_default()
                ),
            })
        }
    }

    let mut start: Option<NaiveDate> = None;
    let mut values = Vec::new();
    let mut marks: BTreeMap<usize, MilestoneKind> = BTreeMap::new();

    for (i, row) in lines {
        let line = i + 1;
        if row.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = row.split(',').collect();
        if fields.len() != 3 {
            return Err(ReportError::Csv {
                line,
                message: format!("expected 3 fields, found {}", fields.len()),
            });
        }
        let date = NaiveDate::parse_from_str(fields[0], "%Y-%m-%d").map_err(|_| ReportError::Csv {
            line,
            message: format!("bad date {:?}", fields[0]),
        })?;
        let commits: u64 = fields[1].parse().map_err(|_| ReportError::Csv {
            line,
            message: format!("bad commit count {:?}", fields[1]),
        })?;

        let index = values.len();
        match start {
            None => start = Some(date),
            Some(start) => {
                let expected = start + chrono::Days::new(index as u64);
                if date != expected {
                    return Err(ReportError::Csv {
                        line,
                        message: format!("expected consecutive date {expected}, found {date}"),
                    });
                }
            }
        }

        match fields[2] {
            "None" => {}
            "Red" => {
                marks.insert(index, MilestoneKind::DueDate);
            }
            "Orange" => {
                marks.insert(index, MilestoneKind::Presentation);
            }
            other => {
                return Err(ReportError::Csv {
                    line,
                    message: format!("unknown highlight {other:?}"),
                })
            }
        }
        values.push(commits);
    }

    let start = start.unwrap_or(NaiveDate::from_ymd_opt(1970, 1, 1).expect("epoch"));
    DailySeries::new(start, values, marks).map_err(|e| ReportError::Csv {
        line: 0,
        message: e.to_string(),
    })
}

/// One team's fairness pair for the cohort chart.
#[derive(Debug, Clone, PartialEq)]
pub struct TeamFairnessRow {
    pub team_id: String,
    pub team_fairness: f64,
    pub time_fairness: f64,
}

fn csv_quote(field: &str) -> String {
    if field.contains([',', '"', '\n']) {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

/// Render the per-team fairness chart data as CSV.
///
/// Teams are sorted ascending by team fairness, matching the chart
/// presentation, followed by Mean and Stddev rows and a Correlation row. A
/// cohort of one (or constant values) gets the correlation omitted with a
/// reason instead.
pub fn fairness_chart_export(per_team: &[TeamFairnessRow]) -> String {
    let mut rows = per_team.to_vec();
    rows.sort_by(|a, b| {
        a.team_fairness
            .partial_cmp(&b.team_fairness)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| a.team_id.cmp(&b.team_id))
    });

    let mut out = String::from("Team,TeamFairness,TimeFairness\n");
    for row in &rows {
        out.push_str(&format!(
            "{},{:.6},{:.6}\n",
            csv_quote(&row.team_id),
            row.team_fairness,
            row.time_fairness
        ));
    }

    let team: Vec<f64> = rows.iter().map(|r| r.team_fairness).collect();
    let time: Vec<f64> = rows.iter().map(|r| r.time_fairness).collect();
    if let (Ok(team_stats), Ok(time_stats)) = (descriptive_stats(&team), descriptive_stats(&time)) {
        out.push_str(&format!(
            "Mean,{:.6},{:.6}\n",
            team_stats.mean, time_stats.mean
        ));
        out.push_str(&format!(
            "Stddev,{:.6},{:.6}\n",
            team_stats.stddev, time_stats.stddev
        ));
    }
    match pearson(&team, &time) {
        Ok(r) => out.push_str(&format!("Correlation,{r:.6}\n")),
        Err(reason) => out.push_str(&format!("Correlation,omitted: {reason}\n")),
    }
    out
}
