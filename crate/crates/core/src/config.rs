//! Course configuration: period, timezone, roster and milestones.
//!
//! The config file is TOML; dates are ISO `YYYY-MM-DD` strings and the
//! timezone is an IANA name. The full grammar is documented in
//! `docs/formats.md` at the repository root.

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use chrono_tz::Tz;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Errors raised while loading or validating configuration.
#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("failed to read {path}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("failed to parse {path}: {message}")]
    Parse { path: PathBuf, message: String },

    #[error("{field}: invalid date {value:?} (expected YYYY-MM-DD)")]
    InvalidDate { field: String, value: String },

    #[error("timezone: unknown IANA timezone {0:?}")]
    UnknownTimezone(String),

    #[error("course_start {start} is after course_end {end}")]
    PeriodInverted { start: NaiveDate, end: NaiveDate },

    #[error("members: roster must contain at least one member")]
    EmptyRoster,

    #[error("members: duplicate member_id {0:?}")]
    DuplicateMemberId(String),

    #[error("{field}: alias {alias:?} is claimed by both {first:?} and {second:?}")]
    DuplicateAlias {
        field: String,
        alias: String,
        first: String,
        second: String,
    },

    #[error("milestones: duplicate milestone name {0:?}")]
    DuplicateMilestone(String),

    #[error("milestone {name:?} dated {date} lies outside the course period {start}..{end}")]
    MilestoneOutsidePeriod {
        name: String,
        date: NaiveDate,
        start: NaiveDate,
        end: NaiveDate,
    },

    #[error("unknown milestone or date {0:?} in window")]
    UnknownEndpoint(String),

    #[error("window from {from} is after window to {to}")]
    WindowInverted { from: NaiveDate, to: NaiveDate },

    #[error("window {from}..{to} lies outside the course period {start}..{end}")]
    WindowOutsidePeriod {
        from: NaiveDate,
        to: NaiveDate,
        start: NaiveDate,
        end: NaiveDate,
    },
}

/// Inclusive calendar-date range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DateRange {
    pub from: NaiveDate,
    pub to: NaiveDate,
}

impl DateRange {
    pub fn new(from: NaiveDate, to: NaiveDate) -> Result<Self, ConfigError> {
        if from > to {
            return Err(ConfigError::WindowInverted { from, to });
        }
        Ok(Self { from, to })
    }

    pub fn contains(&self, date: NaiveDate) -> bool {
        self.from <= date && date <= self.to
    }

    /// Number of calendar days, both endpoints included.
    pub fn day_count(&self) -> usize {
        (self.to - self.from).num_days() as usize + 1
    }

    pub fn iter_days(&self) -> impl Iterator<Item = NaiveDate> + '_ {
        self.from.iter_days().take(self.day_count())
    }
}

impl std::fmt::Display for DateRange {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}..{}", self.from, self.to)
    }
}

/// Kind of a course milestone.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MilestoneKind {
    DueDate,
    Presentation,
}

/// A named course milestone.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Milestone {
    pub name: String,
    pub date: NaiveDate,
    pub kind: MilestoneKind,
}

/// One roster member with the identity aliases used for attribution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Member {
    pub member_id: String,
    pub display_name: String,
    pub email_aliases: Vec<String>,
    pub login_aliases: Vec<String>,
}

/// Validated course configuration.
#[derive(Debug, Clone)]
pub struct CourseConfig {
    pub course_start: NaiveDate,
    pub course_end: NaiveDate,
    pub timezone: Tz,
    pub members: Vec<Member>,
    pub milestones: Vec<Milestone>,
    // lowercase alias -> member_id, built once at validation time
    email_index: HashMap<String, String>,
    login_index: HashMap<String, String>,
}

impl CourseConfig {
    /// Build and validate a config from its parts.
    pub fn new(
        course_start: NaiveDate,
        course_end: NaiveDate,
        timezone: Tz,
        members: Vec<Member>,
        milestones: Vec<Milestone>,
    ) -> Result<Self, ConfigError> {
        if course_start > course_end {
            return Err(ConfigError::PeriodInverted {
                start: course_start,
                end: course_end,
            });
        }
        if members.is_empty() {
            return Err(ConfigError::EmptyRoster);
        }

        let mut ids = HashMap::new();
        for member in &members {
            if ids.insert(member.member_id.clone(), ()).is_some() {
                return Err(ConfigError::DuplicateMemberId(member.member_id.clone()));
            }
        }

        let email_index = build_alias_index(&members, "email_aliases", |m| &m.email_aliases)?;
        let login_index = build_alias_index(&members, "login_aliases", |m| &m.login_aliases)?;

        let mut names = HashMap::new();
        for milestone in &milestones {
            let key = milestone.name.to_lowercase();
            if names.insert(key, ()).is_some() {
                return Err(ConfigError::DuplicateMilestone(milestone.name.clone()));
            }
            if milestone.date < course_start || milestone.date > course_end {
                return Err(ConfigError::MilestoneOutsidePeriod {
                    name: milestone.name.clone(),
                    date: milestone.date,
                    start: course_start,
                    end: course_end,
                });
            }
        }

        Ok(Self {
            course_start,
            course_end,
            timezone,
            members,
            milestones,
            email_index,
            login_index,
        })
    }

    /// The whole course period as an inclusive range.
    pub fn period(&self) -> DateRange {
        DateRange {
            from: self.course_start,
            to: self.course_end,
        }
    }

    pub fn member_ids(&self) -> impl Iterator<Item = &str> {
        self.members.iter().map(|m| m.member_id.as_str())
    }

    pub fn milestone(&self, name: &str) -> Option<&Milestone> {
        let needle = name.to_lowercase();
        self.milestones
            .iter()
            .find(|m| m.name.to_lowercase() == needle)
    }

    /// Dates of all `due_date` milestones, in declaration order.
    pub fn due_dates(&self) -> Vec<NaiveDate> {
        self.milestones
            .iter()
            .filter(|m| m.kind == MilestoneKind::DueDate)
            .map(|m| m.date)
            .collect()
    }

    /// Map an email to a member id via the roster aliases (case-insensitive).
    pub fn resolve_email(&self, email: &str) -> Option<&str> {
        self.email_index
            .get(&email.to_lowercase())
            .map(String::as_str)
    }

    /// Map a platform login to a member id (case-insensitive).
    pub fn resolve_login(&self, login: &str) -> Option<&str> {
        self.login_index
            .get(&login.to_lowercase())
            .map(String::as_str)
    }

    /// Resolve one window endpoint: `start`, `end`, a milestone name, or an
    /// ISO date.
    pub fn resolve_endpoint(&self, value: &str) -> Result<NaiveDate, ConfigError> {
        let value = value.trim();
        match value.to_lowercase().as_str() {
            "start" | "course_start" => return Ok(self.course_start),
            "end" | "course_end" => return Ok(self.course_end),
            _ => {}
        }
        if let Some(milestone) = self.milestone(value) {
            return Ok(milestone.date);
        }
        if let Ok(date) = NaiveDate::parse_from_str(value, "%Y-%m-%d") {
            return Ok(date);
        }
        Err(ConfigError::UnknownEndpoint(value.to_string()))
    }

    /// Resolve a window expression to a validated, in-period range.
    ///
    /// `a..b` resolves both endpoints; an empty side falls back to the course
    /// boundary. A bare `x` is shorthand for `start..x`.
    pub fn resolve_window(&self, expr: &str) -> Result<DateRange, ConfigError> {
        let expr = expr.trim();
        let (from, to) = match expr.split_once("..") {
            Some((lhs, rhs)) => {
                let from = if lhs.trim().is_empty() {
                    self.course_start
                } else {
                    self.resolve_endpoint(lhs)?
                };
                let to = if rhs.trim().is_empty() {
                    self.course_end
                } else {
                    self.resolve_endpoint(rhs)?
                };
                (from, to)
            }
            None => (self.course_start, self.resolve_endpoint(expr)?),
        };
        if from > to {
            return Err(ConfigError::WindowInverted { from, to });
        }
        if from < self.course_start || to > self.course_end {
            return Err(ConfigError::WindowOutsidePeriod {
                from,
                to,
                start: self.course_start,
                end: self.course_end,
            });
        }
        Ok(DateRange { from, to })
    }
}

fn build_alias_index(
    members: &[Member],
    field: &str,
    get: impl Fn(&Member) -> &Vec<String>,
) -> Result<HashMap<String, String>, ConfigError> {
    let mut index: HashMap<String, String> = HashMap::new();
    for member in members {
        for alias in get(member) {
            let key = alias.to_lowercase();
            if let Some(existing) = index.get(&key) {
                if existing != &member.member_id {
                    return Err(ConfigError::DuplicateAlias {
                        field: field.to_string(),
                        alias: alias.clone(),
                        first: existing.clone(),
                        second: member.member_id.clone(),
                    });
                }
            } else {
                index.insert(key, member.member_id.clone());
            }
        }
    }
    Ok(index)
}

// ---------------------------------------------------------------------------
// TOML loading
// ---------------------------------------------------------------------------

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    course_start: String,
    course_end: String,
    timezone: String,
    #[serde(default)]
    members: Vec<RawMember>,
    #[serde(default)]
    milestones: Vec<RawMilestone>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMember {
    member_id: String,
    #[serde(default)]
    display_name: Option<String>,
    #[serde(default)]
    email_aliases: Vec<String>,
    #[serde(default)]
    login_aliases: Vec<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMilestone {
    name: String,
    date: String,
    kind: MilestoneKind,
}

fn parse_date(field: &str, value: &str) -> Result<NaiveDate, ConfigError> {
    NaiveDate::parse_from_str(value, "%Y-%m-%d").map_err(|_| ConfigError::InvalidDate {
        field: field.to_string(),
        value: value.to_string(),
    })
}

/// Parse and validate a course config from TOML text.
pub fn parse_course_config(text: &str, origin: &Path) -> Result<CourseConfig, ConfigError> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| ConfigError::Parse {
        path: origin.to_path_buf(),
        message: e.to_string(),
    })?;

    let course_start = parse_date("course_start", &raw.course_start)?;
    let course_end = parse_date("course_end", &raw.course_end)?;
    let timezone: Tz = raw
        .timezone
        .parse()
        .map_err(|_| ConfigError::UnknownTimezone(raw.timezone.clone()))?;

    let members = raw
        .members
        .into_iter()
        .map(|m| Member {
            display_name: m.display_name.unwrap_or_else(|| m.member_id.clone()),
            member_id: m.member_id,
            email_aliases: m.email_aliases,
            login_aliases: m.login_aliases,
        })
        .collect();

    let milestones = raw
        .milestones
        .into_iter()
        .enumerate()
        .map(|(i, m)| {
            Ok(Milestone {
                date: parse_date(&format!("milestones[{i}].date"), &m.date)?,
                name: m.name,
                kind: m.kind,
            })
        })
        .collect::<Result<Vec<_>, ConfigError>>()?;

    CourseConfig::new(course_start, course_end, timezone, members, milestones)
}

/// Load a course config file.
pub fn load_course_config(path: &Path) -> Result<CourseConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_course_config(&text, path)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn date(s: &str) -> NaiveDate {
        NaiveDate::parse_from_str(s, "%Y-%m-%d").unwrap()
    }

    const FIXTURE: &str = r#"
course_start = "2022-09-01"
course_end = "2023-05-01"
timezone = "America/Toronto"

[[members]]
member_id = "m1"
display_name = "Alice"
email_aliases = ["alice@example.edu", "alice@alt.example"]
login_aliases = ["al"]

[[members]]
member_id = "m2"
email_aliases = ["bob@example.edu"]
login_aliases = ["bee"]

[[milestones]]
name = "SRS"
date = "2022-10-24"
kind = "due_date"

[[milestones]]
name = "PoC"
date = "2022-11-21"
kind = "presentation"
"#;

    #[test]
    fn parses_fixture_and_spans_243_days() {
        let config = parse_course_config(FIXTURE, Path::new("test")).unwrap();
        assert_eq!(config.period().day_count(), 243);
        assert_eq!(config.members.len(), 2);
        assert_eq!(config.resolve_email("ALICE@EXAMPLE.EDU"), Some("m1"));
        assert_eq!(config.resolve_login("bee"), Some("m2"));
        assert_eq!(config.resolve_email("stranger@example.edu"), None);
    }

    #[test]
    fn milestone_outside_period_is_rejected() {
        let text = FIXTURE.replace("2022-11-21", "2023-06-01");
        let err = parse_course_config(&text, Path::new("test")).unwrap_err();
        match err {
            ConfigError::MilestoneOutsidePeriod { name, .. } => assert_eq!(name, "PoC"),
            other => panic!("unexpected error: {other}"),
        }
    }

    #[test]
    fn duplicate_alias_names_both_members() {
        let text = FIXTURE.replace("bob@example.edu", "alice@example.edu");
        let err = parse_course_config(&text, Path::new("test")).unwrap_err();
        match err {
            ConfigError::DuplicateAlias { first, second, .. } => {
                assert_eq!((first.as_str(), second.as_str()), ("m1", "m2"));
            }
            other => panic!("unexpected error: {other}"),
        }
    }

    #[test]
    fn same_member_may_repeat_an_alias() {
        let text = FIXTURE.replace("alice@alt.example", "alice@example.edu");
        assert!(parse_course_config(&text, Path::new("test")).is_ok());
    }

    #[test]
    fn inverted_period_is_rejected() {
        let text = FIXTURE.replace("course_end = \"2023-05-01\"", "course_end = \"2022-08-01\"");
        assert!(matches!(
            parse_course_config(&text, Path::new("test")),
            Err(ConfigError::PeriodInverted { .. })
        ));
    }

    #[test]
    fn window_expressions_resolve() {
        let config = parse_course_config(FIXTURE, Path::new("test")).unwrap();
        let whole = config.resolve_window("..").unwrap();
        assert_eq!(whole, config.period());

        let to_poc = config.resolve_window("poc").unwrap();
        assert_eq!(to_poc.from, date("2022-09-01"));
        assert_eq!(to_poc.to, date("2022-11-21"));

        let explicit = config.resolve_window("srs..poc").unwrap();
        assert_eq!(explicit.from, date("2022-10-24"));

        let dates = config.resolve_window("2022-10-01..2022-10-31").unwrap();
        assert_eq!(dates.day_count(), 31);

        assert!(matches!(
            config.resolve_window("rev9"),
            Err(ConfigError::UnknownEndpoint(_))
        ));
        assert!(matches!(
            config.resolve_window("2021-01-01.."),
            Err(ConfigError::WindowOutsidePeriod { .. })
        ));
        assert!(matches!(
            config.resolve_window("poc..srs"),
            Err(ConfigError::WindowInverted { .. })
        ));
    }

    #[test]
    fn leap_year_period_spans_244_days() {
        let text = FIXTURE
            .replace("2022-09-01", "2023-09-01")
            .replace("2023-05-01", "2024-05-01")
            .replace("2022-10-24", "2023-10-24")
            .replace("2022-11-21", "2023-11-21");
        let config = parse_course_config(&text, Path::new("test")).unwrap();
        assert_eq!(config.period().day_count(), 244);
    }
}
