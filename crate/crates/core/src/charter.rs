//! Team-charter rules and their evaluation against computed metrics.
//!
//! A charter quantifies the expectations a team agreed on up front: each rule
//! names a metric, a comparator, a threshold, a milestone-bounded window and
//! the consequence the team chose. Evaluation only reports; consequences are
//! social contracts and are never enforced here.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::{ConfigError, CourseConfig, DateRange};
use crate::ingest::{AttributedCommit, EventKind, MergePolicy, WorkEvent};
use crate::metrics::{meeting_attendance, member_commit_counts, work_event_counts};

/// Errors raised while loading or validating a charter.
#[derive(Debug, Error)]
pub enum CharterError {
    #[error("failed to read {path}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("failed to parse {path}: {message}")]
    Parse { path: PathBuf, message: String },

    #[error("rule {rule}: duplicate rule id")]
    DuplicateRuleId { rule: String },

    #[error("rule {rule}: {source}")]
    Window {
        rule: String,
        source: ConfigError,
    },

    #[error("rule {rule}: threshold {value} out of range for {metric} (expected {range})")]
    ThresholdOutOfRange {
        rule: String,
        value: f64,
        metric: String,
        range: &'static str,
    },

    #[error("rule {rule}: unknown member {member:?}")]
    UnknownMember { rule: String, member: String },
}

/// The metric a rule constrains.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricKind {
    /// Member commits divided by the summed member commits in the window.
    CommitShare,
    CommitCount,
    /// Meetings attended over meetings held (all meeting kinds).
    MeetingAttendanceRate,
    WorkEventCount,
    IssuesClosed,
}

impl MetricKind {
    fn name(&self) -> &'static str {
        match self {
            Self::CommitShare => "commit_share",
            Self::CommitCount => "commit_count",
            Self::MeetingAttendanceRate => "meeting_attendance_rate",
            Self::WorkEventCount => "work_event_count",
            Self::IssuesClosed => "issues_closed",
        }
    }

    /// Share and rate metrics live in [0,1]; count metrics are any
    /// nonnegative number.
    fn threshold_range(&self) -> (f64, f64, &'static str) {
        match self {
            Self::CommitShare | Self::MeetingAttendanceRate => (0.0, 1.0, "[0, 1]"),
            Self::CommitCount | Self::WorkEventCount | Self::IssuesClosed => {
                (0.0, f64::INFINITY, ">= 0")
            }
        }
    }
}

/// Who a rule applies to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Scope {
    EachMember,
    NamedMember(String),
}

/// Comparison direction; the comparator is evaluated exactly as written, so
/// "less than 5%" is a strict `<`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparator {
    Lt,
    Le,
    Gt,
    Ge,
}

impl Comparator {
    pub fn holds(&self, observed: f64, threshold: f64) -> bool {
        match self {
            Self::Lt => observed < threshold,
            Self::Le => observed <= threshold,
            Self::Gt => observed > threshold,
            Self::Ge => observed >= threshold,
        }
    }

    pub fn symbol(&self) -> &'static str {
        match self {
            Self::Lt => "<",
            Self::Le => "<=",
            Self::Gt => ">",
            Self::Ge => ">=",
        }
    }
}

/// How serious a triggered rule is.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Severity {
    Info,
    Warn,
    Escalate,
}

/// One validated charter rule with its window resolved to concrete dates.
#[derive(Debug, Clone, PartialEq)]
pub struct CharterRule {
    pub rule_id: String,
    pub metric: MetricKind,
    pub scope: Scope,
    pub comparator: Comparator,
    pub threshold: f64,
    pub window: DateRange,
    pub consequence: String,
    pub severity: Severity,
}

/// Outcome of checking one rule for one member.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub rule_id: String,
    pub member_id: String,
    pub triggered: bool,
    /// The exact metric value the comparison used.
    pub observed: f64,
    pub threshold: f64,
    pub window_resolved: DateRange,
    /// The rule's consequence, copied when triggered, empty otherwise.
    pub consequence: String,
    pub severity: Severity,
    /// True when the metric's denominator was zero (no commits, no meetings);
    /// degenerate observations never trigger.
    pub degenerate: bool,
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCharter {
    #[serde(default)]
    rules: Vec<RawRule>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRule {
    id: String,
    metric: MetricKind,
    #[serde(default = "default_scope")]
    scope: String,
    comparator: String,
    threshold: f64,
    #[serde(default)]
    window: RawWindow,
    #[serde(default)]
    consequence: String,
    severity: Severity,
}

fn default_scope() -> String {
    "each_member".to_string()
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawWindow {
    from: Option<String>,
    to: Option<String>,
}

fn parse_comparator(rule: &str, text: &str) -> Result<Comparator, CharterError> {
    match text.trim() {
        "<" => Ok(Comparator::Lt),
        "<=" => Ok(Comparator::Le),
        ">" => Ok(Comparator::Gt),
        ">=" => Ok(Comparator::Ge),
        other => Err(CharterError::Parse {
            path: PathBuf::from(rule),
            message: format!("unknown comparator {other:?} (expected <, <=, >, >=)"),
        }),
    }
}

/// Parse and validate charter rules from TOML text.
pub fn parse_charter_str(
    text: &str,
    origin: &Path,
    config: &CourseConfig,
) -> Result<Vec<CharterRule>, CharterError> {
    let raw: RawCharter = toml::from_str(text).map_err(|e| CharterError::Parse {
        path: origin.to_path_buf(),
        message: e.to_string(),
    })?;

    let mut seen = BTreeMap::new();
    let mut rules = Vec::with_capacity(raw.rules.len());
    for rule in raw.rules {
        if seen.insert(rule.id.clone(), ()).is_some() {
            return Err(CharterError::DuplicateRuleId { rule: rule.id });
        }

        let resolve = |value: Option<&String>, fallback: &str| -> Result<_, CharterError> {
            config
                .resolve_endpoint(value.map(String::as_str).unwrap_or(fallback))
                .map_err(|source| CharterError::Window {
                    rule: rule.id.clone(),
                    source,
                })
        };
        let from = resolve(rule.window.from.as_ref(), "start")?;
        let to = resolve(rule.window.to.as_ref(), "end")?;
        let window = DateRange::new(from, to).map_err(|source| CharterError::Window {
            rule: rule.id.clone(),
            source,
        })?;

        let (lo, hi, range) = rule.metric.threshold_range();
        if !(rule.threshold >= lo && rule.threshold <= hi) {
            return Err(CharterError::ThresholdOutOfRange {
                rule: rule.id,
                value: rule.threshold,
                metric: rule.metric.name().to_string(),
                range,
            });
        }

        let scope = match rule.scope.as_str() {
            "each_member" => Scope::EachMember,
            other => {
                let member = other.strip_prefix("member:").unwrap_or(other).trim();
                if !config.member_ids().any(|id| id == member) {
                    return Err(CharterError::UnknownMember {
                        rule: rule.id,
                        member: member.to_string(),
                    });
                }
                Scope::NamedMember(member.to_string())
            }
        };

        let comparator = parse_comparator(&rule.id, &rule.comparator)?;
        rules.push(CharterRule {
            rule_id: rule.id,
            metric: rule.metric,
            scope,
            comparator,
            threshold: rule.threshold,
            window,
            consequence: rule.consequence,
            severity: rule.severity,
        });
    }

    Ok(rules)
}

/// Load a charter file and validate it against the course config.
pub fn parse_charter(path: &Path, config: &CourseConfig) -> Result<Vec<CharterRule>, CharterError> {
    let text = std::fs::read_to_string(path).map_err(|source| CharterError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_charter_str(&text, path, config)
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

/// Everything rule evaluation needs.
#[derive(Debug, Clone, Copy)]
pub struct EvaluationContext<'a> {
    pub commits: &'a [AttributedCommit],
    pub events: &'a [WorkEvent],
    pub config: &'a CourseConfig,
    pub merge_policy: MergePolicy,
}

/// Observed value for one member, with the degenerate flag.
struct Observation {
    value: f64,
    degenerate: bool,
}

fn observe(
    metric: MetricKind,
    member: &str,
    window: DateRange,
    ctx: &EvaluationContext<'_>,
) -> Observation {
    let member_count = |member: &str| -> u64 {
        let counts = member_commit_counts(ctx.commits, ctx.config, Some(window), ctx.merge_policy);
        let own = counts
            .labeled()
            .expect("member counts are labeled")
            .find(|(id, _)| *id == member)
            .map(|(_, count)| count);
        own.unwrap_or(0)
    };

    match metric {
        MetricKind::CommitShare => {
            let counts = member_commit_counts(ctx.commits, ctx.config, Some(window), ctx.merge_policy);
            let total = counts.total();
            if total == 0 {
                return Observation {
                    value: 0.0,
                    degenerate: true,
                };
            }
            let own = counts
                .labeled()
                .expect("member counts are labeled")
                .find(|(id, _)| *id == member)
                .map(|(_, count)| count)
                .unwrap_or(0);
            Observation {
                value: own as f64 / total as f64,
                degenerate: false,
            }
        }
        MetricKind::CommitCount => Observation {
            value: member_count(member) as f64,
            degenerate: false,
        },
        MetricKind::MeetingAttendanceRate => {
            let attendance = meeting_attendance(ctx.events, ctx.config, None, Some(window));
            match attendance.get(member).and_then(|a| a.rate()) {
                Some(rate) => Observation {
                    value: rate,
                    degenerate: false,
                },
                None => Observation {
                    value: 0.0,
                    degenerate: true,
                },
            }
        }
        MetricKind::WorkEventCount => {
            let counts = work_event_counts(ctx.events, ctx.config, Some(window));
            let own = counts
                .counts
                .labeled()
                .expect("work event counts are labeled")
                .find(|(id, _)| *id == member)
                .map(|(_, count)| count)
                .unwrap_or(0);
            Observation {
                value: own as f64,
                degenerate: false,
            }
        }
        MetricKind::IssuesClosed => {
            let closed = ctx
                .events
                .iter()
                .filter(|e| e.kind == EventKind::IssueClosed)
                .filter(|e| {
                    window.contains(
                        e.timestamp
                            .with_timezone(&ctx.config.timezone)
                            .date_naive(),
                    )
                })
                .filter(|e| ctx.config.resolve_login(&e.actor) == Some(member))
                .count();
            Observation {
                value: closed as f64,
                degenerate: false,
            }
        }
    }
}

/// Evaluate every rule for every member in scope.
///
/// Output order is deterministic: rule order, then roster order. Identical
/// inputs always give identical verdict lists.
pub fn evaluate_rules(rules: &[CharterRule], ctx: &EvaluationContext<'_>) -> Vec<Verdict> {
    let mut verdicts = Vec::new();

    for rule in rules {
        let members: Vec<&str> = match &rule.scope {
            Scope::EachMember => ctx.config.member_ids().collect(),
            Scope::NamedMember(member) => vec![member.as_str()],
        };

        for member in members {
            let observation = observe(rule.metric, member, rule.window, ctx);
            let triggered =
                !observation.degenerate && rule.comparator.holds(observation.value, rule.threshold);
            verdicts.push(Verdict {
                rule_id: rule.rule_id.clone(),
                member_id: member.to_string(),
                triggered,
                observed: observation.value,
                threshold: rule.threshold,
                window_resolved: rule.window,
                consequence: if triggered {
                    rule.consequence.clone()
                } else {
                    String::new()
                },
                severity: rule.severity,
                degenerate: observation.degenerate,
            });
        }
    }

    verdicts
}

/// True when any triggered verdict carries escalate severity.
pub fn any_escalation(verdicts: &[Verdict]) -> bool {
    verdicts
        .iter()
        .any(|v| v.triggered && v.severity == Severity::Escalate)
}
