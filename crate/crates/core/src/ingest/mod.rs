//! Parsing of canonical git-log exports and project-event files, and
//! attribution of commits to roster members.
//!
//! The canonical export is produced by one documented `git log` invocation
//! (see `docs/export.md`): records separated by byte `0x1E`, seven fields
//! separated by byte `0x1F` — sha, author name, author email, author date
//! (ISO-8601 with offset), parent sha list, subject, body.

mod events;
mod identity;

pub use events::{load_events, parse_events, EventKind, MeetingKind, WorkEvent};
pub use identity::{distinct_unresolved, resolve_identities, AttributedCommit};

use std::path::PathBuf;

use chrono::{DateTime, FixedOffset};
use thiserror::Error;

/// Byte separating records in the canonical export.
pub const RECORD_SEPARATOR: char = '\u{1e}';
/// Byte separating fields within a record.
pub const FIELD_SEPARATOR: char = '\u{1f}';

const FIELD_COUNT: usize = 7;

/// Errors raised while parsing commit logs or event files.
#[derive(Debug, Error)]
pub enum IngestError {
    #[error("failed to read {path}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("record {index}: expected {expected} fields, found {found}")]
    FieldCount {
        index: usize,
        expected: usize,
        found: usize,
    },

    #[error("record {index}: field sha: not a 40-char hex sha: {value:?}")]
    InvalidSha { index: usize, value: String },

    #[error("record {index}: field author_date: unparseable timestamp {value:?}")]
    InvalidTimestamp { index: usize, value: String },

    #[error("record {index}: field parents: not a hex sha token: {token:?}")]
    InvalidParent { index: usize, token: String },

    #[error("record {index}: duplicate sha {sha}")]
    DuplicateSha { index: usize, sha: String },

    #[error("line {line}: malformed JSON: {message}")]
    EventJson { line: usize, message: String },

    #[error("line {line}: unknown event kind {value:?}")]
    UnknownEventKind { line: usize, value: String },

    #[error("line {line}: unknown meeting kind {value:?}")]
    UnknownMeetingKind { line: usize, value: String },

    #[error("line {line}: {message}")]
    EventInvariant { line: usize, message: String },
}

/// One attributed commit from the canonical export.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommitRecord {
    pub sha: String,
    pub author_name: String,
    pub author_email: String,
    /// Author timestamp, offset preserved. The author date (not the committer
    /// date) is authoritative throughout: it reflects when the work was done.
    pub timestamp: DateTime<FixedOffset>,
    pub parent_count: usize,
    pub subject: String,
    /// Lowercased emails from `Co-authored-by:` trailers, deduplicated, never
    /// containing the author's own email.
    pub co_author_emails: Vec<String>,
}

impl CommitRecord {
    /// A commit with two or more parents is a merge.
    pub fn is_merge(&self) -> bool {
        self.parent_count >= 2
    }
}

/// Whether merge commits participate in counting.
///
/// The default mirrors the platform insights counter: merges are excluded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MergePolicy {
    #[default]
    ExcludeMerges,
    IncludeMerges,
}

impl MergePolicy {
    pub fn counts(&self, record: &CommitRecord) -> bool {
        match self {
            MergePolicy::ExcludeMerges => !record.is_merge(),
            MergePolicy::IncludeMerges => true,
        }
    }
}

fn is_hex_sha(token: &str) -> bool {
    token.len() == 40 && token.bytes().all(|b| b.is_ascii_hexdigit())
}

/// Parse a canonical commit export into records, preserving input order.
///
/// Empty (or whitespace-only) input yields an empty list.
pub fn parse_commit_log(text: &str) -> Result<Vec<CommitRecord>, IngestError> {
    let mut records = Vec::new();
    let mut seen = std::collections::HashSet::new();

    for chunk in text.split(RECORD_SEPARATOR) {
        // `git log --pretty=format:` joins entries with a newline, so every
        // chunk after the first starts with one.
        let chunk = chunk.trim_start_matches(['\n', '\r']);
        if chunk.trim().is_empty() {
            continue;
        }
        let index = records.len();

        let fields: Vec<&str> = chunk.split(FIELD_SEPARATOR).collect();
        if fields.len() != FIELD_COUNT {
            return Err(IngestError::FieldCount {
                index,
                expected: FIELD_COUNT,
                found: fields.len(),
            });
        }

        let sha = fields[0].trim().to_string();
        if !is_hex_sha(&sha) {
            return Err(IngestError::InvalidSha { index, value: sha });
        }
        if !seen.insert(sha.to_lowercase()) {
            return Err(IngestError::DuplicateSha { index, sha });
        }

        let timestamp = DateTime::parse_from_rfc3339(fields[3].trim()).map_err(|_| {
            IngestError::InvalidTimestamp {
                index,
                value: fields[3].trim().to_string(),
            }
        })?;

        let mut parent_count = 0;
        for token in fields[4].split_whitespace() {
            if !is_hex_sha(token) {
                return Err(IngestError::InvalidParent {
                    index,
                    token: token.to_string(),
                });
            }
            parent_count += 1;
        }

        let author_email = fields[2].trim().to_string();
        let co_author_emails = extract_co_authors(fields[6], &author_email);

        records.push(CommitRecord {
            sha,
            author_name: fields[1].trim().to_string(),
            author_email,
            timestamp,
            parent_count,
            subject: fields[5].to_string(),
            co_author_emails,
        });
    }

    Ok(records)
}

/// Pull co-author emails out of a commit body.
///
/// Matches `Co-authored-by: Name <email>` lines case-insensitively, lowercases
/// the emails, drops duplicates and the author's own address.
fn extract_co_authors(body: &str, author_email: &str) -> Vec<String> {
    const TRAILER: &str = "co-authored-by:";
    let author_lower = author_email.to_lowercase();
    let mut emails = Vec::new();

    for line in body.lines() {
        let line = line.trim();
        if line.len() < TRAILER.len() || !line[..TRAILER.len()].eq_ignore_ascii_case(TRAILER) {
            continue;
        }
        let rest = &line[TRAILER.len()..];
        let (Some(open), Some(close)) = (rest.rfind('<'), rest.rfind('>')) else {
            continue;
        };
        if open + 1 >= close {
            continue;
        }
        let email = rest[open + 1..close].trim().to_lowercase();
        if email.is_empty() || email == author_lower || emails.contains(&email) {
            continue;
        }
        emails.push(email);
    }

    emails
}

/// Serialize records back to the canonical export format.
///
/// The body field is synthesized from the stored co-author list and parent
/// shas are placeholders with the right token count, so parsing the output
/// recovers an identical record list.
pub fn to_canonical_log(records: &[CommitRecord]) -> String {
    let mut out = String::new();
    for (i, record) in records.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        let parents = vec!["0".repeat(40); record.parent_count].join(" ");
        let body = record
            .co_author_emails
            .iter()
            .map(|email| format!("Co-authored-by: {email} <{email}>\n"))
            .collect::<String>();
        out.push_str(&format!(
            "{sha}{fs}{name}{fs}{email}{fs}{date}{fs}{parents}{fs}{subject}{fs}{body}{rs}",
            sha = record.sha,
            name = record.author_name,
            email = record.author_email,
            date = record.timestamp.to_rfc3339(),
            parents = parents,
            subject = record.subject,
            body = body,
            fs = FIELD_SEPARATOR,
            rs = RECORD_SEPARATOR,
        ));
    }
    out
}

/// Read and parse a commit log file.
pub fn load_commit_log(path: &std::path::Path) -> Result<Vec<CommitRecord>, IngestError> {
    let text = std::fs::read_to_string(path).map_err(|source| IngestError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_commit_log(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record_text(sha_fill: char, body: &str) -> String {
        let sha: String = std::iter::repeat(sha_fill).take(40).collect();
        format!(
            "{sha}\u{1f}Alice\u{1f}alice@example.edu\u{1f}2022-10-24T14:30:00-04:00\u{1f}{parent}\u{1f}add srs section\u{1f}{body}\u{1e}",
            parent = "b".repeat(40),
        )
    }

    #[test]
    fn parses_two_records_with_a_trailer() {
        let text = format!(
            "{}\n{}",
            record_text('1', ""),
            record_text('2', "Detail line\n\nCo-authored-by: A <a@x.com>\n")
        );
        let records = parse_commit_log(&text).unwrap();
        assert_eq!(records.len(), 2);
        assert!(records[0].co_author_emails.is_empty());
        assert_eq!(records[1].co_author_emails, vec!["a@x.com"]);
        assert_eq!(records[1].parent_count, 1);
        assert!(!records[1].is_merge());
    }

    #[test]
    fn empty_input_is_empty_list() {
        assert_eq!(parse_commit_log("").unwrap(), vec![]);
        assert_eq!(parse_commit_log("\n  \n").unwrap(), vec![]);
    }

    #[test]
    fn lowercase_trailer_is_extracted() {
        // stock git treats trailer keys case-insensitively; mirror that
        let text = record_text('3', "co-authored-by: B <B@X.com>\n");
        let records = parse_commit_log(&text).unwrap();
        assert_eq!(records[0].co_author_emails, vec!["b@x.com"]);
    }

    #[test]
    fn author_email_never_appears_as_co_author() {
        let text = record_text(
            '4',
            "Co-authored-by: Self <Alice@Example.edu>\nCo-authored-by: C <c@x.com>\nCo-authored-by: C again <c@x.com>\n",
        );
        let records = parse_commit_log(&text).unwrap();
        assert_eq!(records[0].co_author_emails, vec!["c@x.com"]);
    }

    #[test]
    fn merge_commits_are_flagged_and_policy_filters_them() {
        let sha = "5".repeat(40);
        let parents = format!("{} {}", "a".repeat(40), "b".repeat(40));
        let text = format!(
            "{sha}\u{1f}A\u{1f}a@x.com\u{1f}2022-10-24T14:30:00-04:00\u{1f}{parents}\u{1f}Merge branch\u{1f}\u{1e}"
        );
        let records = parse_commit_log(&text).unwrap();
        assert_eq!(records[0].parent_count, 2);
        assert!(records[0].is_merge());
        assert!(!MergePolicy::ExcludeMerges.counts(&records[0]));
        assert!(MergePolicy::IncludeMerges.counts(&records[0]));
    }

    #[test]
    fn wrong_field_count_names_the_record() {
        let text = format!("{}\u{1f}only-two\u{1e}", "6".repeat(40));
        match parse_commit_log(&text) {
            Err(IngestError::FieldCount { index: 0, found: 2, .. }) => {}
            other => panic!("unexpected: {other:?}"),
        }
    }

    #[test]
    fn bad_date_names_record_and_field() {
        let text = record_text('7', "").replace("2022-10-24T14:30:00-04:00", "yesterday");
        let err = parse_commit_log(&text).unwrap_err();
        assert!(err.to_string().contains("record 0"));
        assert!(err.to_string().contains("author_date"));
    }

    #[test]
    fn duplicate_sha_is_rejected() {
        let text = format!("{}\n{}", record_text('8', ""), record_text('8', ""));
        assert!(matches!(
            parse_commit_log(&text),
            Err(IngestError::DuplicateSha { index: 1, .. })
        ));
    }

    #[test]
    fn round_trip_preserves_records() {
        let text = format!(
            "{}\n{}",
            record_text('a', "Co-authored-by: X <x@x.com>\nCo-authored-by: Y <y@x.com>\n"),
            record_text('b', "")
        );
        let records = parse_commit_log(&text).unwrap();
        let reparsed = parse_commit_log(&to_canonical_log(&records)).unwrap();
        assert_eq!(records, reparsed);
    }

    #[test]
    fn offset_timestamps_survive_round_trip() {
        let text = record_text('c', "").replace("2022-10-24T14:30:00-04:00", "2023-01-02T01:30:00+05:00");
        let records = parse_commit_log(&text).unwrap();
        let reparsed = parse_commit_log(&to_canonical_log(&records)).unwrap();
        assert_eq!(records[0].timestamp, reparsed[0].timestamp);
        assert_eq!(records[0].timestamp.offset().local_minus_utc(), 5 * 3600);
    }
}
