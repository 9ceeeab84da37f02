//! Work-event ingestion from newline-delimited JSON exports.

use chrono::{DateTime, FixedOffset};
use serde::Deserialize;

use super::IngestError;

/// Kind of a project event.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum EventKind {
    Push,
    PrOpened,
    PrMerged,
    IssueOpened,
    IssueClosed,
    IssueComment,
    Meeting,
}

impl EventKind {
    fn from_str(value: &str) -> Option<Self> {
        Some(match value {
            "push" => Self::Push,
            "pr_opened" => Self::PrOpened,
            "pr_merged" => Self::PrMerged,
            "issue_opened" => Self::IssueOpened,
            "issue_closed" => Self::IssueClosed,
            "issue_comment" => Self::IssueComment,
            "meeting" => Self::Meeting,
            _ => return None,
        })
    }

    /// The four kinds that count as productivity work events: a push, a
    /// merged pull request, an issue comment, or an opened pull request.
    pub fn is_work_event(&self) -> bool {
        matches!(
            self,
            Self::Push | Self::PrMerged | Self::IssueComment | Self::PrOpened
        )
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Push => "push",
            Self::PrOpened => "pr_opened",
            Self::PrMerged => "pr_merged",
            Self::IssueOpened => "issue_opened",
            Self::IssueClosed => "issue_closed",
            Self::IssueComment => "issue_comment",
            Self::Meeting => "meeting",
        }
    }
}

/// Meeting category, mirroring the four issue templates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum MeetingKind {
    Team,
    Ta,
    Supervisor,
    Lecture,
}

impl MeetingKind {
    fn from_str(value: &str) -> Option<Self> {
        Some(match value {
            "team" => Self::Team,
            "ta" => Self::Ta,
            "supervisor" => Self::Supervisor,
            "lecture" => Self::Lecture,
            _ => return None,
        })
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Team => "team",
            Self::Ta => "ta",
            Self::Supervisor => "supervisor",
            Self::Lecture => "lecture",
        }
    }
}

/// One project event.
///
/// `attendees` is nonempty exactly when `kind` is `Meeting`, and
/// `meeting_kind` is present exactly then too; both are enforced at parse
/// time.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WorkEvent {
    pub kind: EventKind,
    /// Platform login of the acting user.
    pub actor: String,
    pub timestamp: DateTime<FixedOffset>,
    pub id: String,
    /// Member ids present, meetings only.
    pub attendees: Vec<String>,
    pub meeting_kind: Option<MeetingKind>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEvent {
    kind: String,
    actor: String,
    timestamp: String,
    id: String,
    #[serde(default)]
    attendees: Vec<String>,
    #[serde(default)]
    meeting_kind: Option<String>,
}

/// Parse a newline-delimited JSON event export, preserving input order.
///
/// Blank lines are skipped; anything else must be one JSON object per line.
pub fn parse_events(jsonl: &str) -> Result<Vec<WorkEvent>, IngestError> {
    let mut events = Vec::new();

    for (i, text) in jsonl.lines().enumerate() {
        let line = i + 1;
        if text.trim().is_empty() {
            continue;
        }
        let raw: RawEvent =
            serde_json::from_str(text).map_err(|e| IngestError::EventJson {
                line,
                message: e.to_string(),
            })?;

        let kind = EventKind::from_str(&raw.kind).ok_or(IngestError::UnknownEventKind {
            line,
            value: raw.kind.clone(),
        })?;

        let timestamp = DateTime::parse_from_rfc3339(raw.timestamp.trim()).map_err(|_| {
            IngestError::EventInvariant {
                line,
                message: format!("unparseable timestamp {:?}", raw.timestamp),
            }
        })?;

        let meeting_kind = raw
            .meeting_kind
            .as_deref()
            .map(|value| {
                MeetingKind::from_str(value).ok_or(IngestError::UnknownMeetingKind {
                    line,
                    value: value.to_string(),
                })
            })
            .transpose()?;

        if kind == EventKind::Meeting {
            if raw.attendees.is_empty() {
                return Err(IngestError::EventInvariant {
                    line,
                    message: "meeting event has no attendees".to_string(),
                });
            }
            if meeting_kind.is_none() {
                return Err(IngestError::EventInvariant {
                    line,
                    message: "meeting event has no meeting_kind".to_string(),
                });
            }
        } else {
            if !raw.attendees.is_empty() {
                return Err(IngestError::EventInvariant {
                    line,
                    message: format!("attendees given for non-meeting kind {:?}", raw.kind),
                });
            }
            if meeting_kind.is_some() {
                return Err(IngestError::EventInvariant {
                    line,
                    message: format!("meeting_kind given for non-meeting kind {:?}", raw.kind),
                });
            }
        }

        events.push(WorkEvent {
            kind,
            actor: raw.actor,
            timestamp,
            id: raw.id,
            attendees: raw.attendees,
            meeting_kind,
        });
    }

    Ok(events)
}

/// Read and parse an event file.
pub fn load_events(path: &std::path::Path) -> Result<Vec<WorkEvent>, IngestError> {
    let text = std::fs::read_to_string(path).map_err(|source| IngestError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_events(&text)
}
