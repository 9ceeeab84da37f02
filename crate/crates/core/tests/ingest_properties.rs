//! Property tests for ingestion invariants: canonical-format round-trip,
//! total attribution and the meeting/attendee correspondence.

use chrono::{DateTime, FixedOffset, TimeZone};
use proptest::prelude::*;

use capmetrics_core::config::{parse_course_config, CourseConfig};
use capmetrics_core::ingest::{
    parse_commit_log, parse_events, resolve_identities, to_canonical_log, CommitRecord, EventKind,
};

fn email_strategy() -> impl Strategy<Value = String> {
    "[a-z][a-z0-9]{0,7}@[a-z]{1,6}\\.edu"
}

fn timestamp_strategy() -> impl Strategy<Value = DateTime<FixedOffset>> {
    // 2022-09-01..2023-05-01 plus offsets in quarter hours
    (1661990400i64..1682899200, -48i32..=48).prop_map(|(secs, quarter_hours)| {
        let offset = FixedOffset::east_opt(quarter_hours * 900).unwrap();
        offset.timestamp_opt(secs, 0).unwrap()
    })
}

prop_compose! {
    fn record_strategy(serial: usize)(
        author in email_strategy(),
        name in "[A-Za-z ]{1,12}",
        timestamp in timestamp_strategy(),
        parent_count in 0usize..3,
        subject in "[a-zA-Z0-9 .,-]{0,40}",
        co_authors in proptest::collection::btree_set(email_strategy(), 0..3),
    ) -> CommitRecord {
        let co_author_emails: Vec<String> = co_authors
            .into_iter()
            .filter(|e| *e != author)
            .collect();
        CommitRecord {
            sha: format!("{serial:040x}"),
            author_name: name.trim().to_string(),
            author_email: author,
            timestamp,
            parent_count,
            subject,
            co_author_emails,
        }
    }
}

fn records_strategy() -> impl Strategy<Value = Vec<CommitRecord>> {
    proptest::collection::vec(any::<u8>(), 0..12).prop_flat_map(|tags| {
        tags.into_iter()
            .enumerate()
            .map(|(i, _)| record_strategy(i + 1))
            .collect::<Vec<_>>()
    })
}

fn roster() -> CourseConfig {
    parse_course_config(
        r#"
course_start = "2022-09-01"
course_end = "2023-05-01"
timezone = "UTC"

[[members]]
member_id = "m1"
email_aliases = ["aa@x.edu", "ab@x.edu"]

[[members]]
member_id = "m2"
email_aliases = ["ba@x.edu"]
"#,
        std::path::Path::new("test"),
    )
    .unwrap()
}

proptest! {
    /// Serializing then re-parsing recovers the identical record list.
    #[test]
    fn canonical_round_trip(records in records_strategy()) {
        let reparsed = parse_commit_log(&to_canonical_log(&records)).unwrap();
        prop_assert_eq!(records, reparsed);
    }

    /// Every email on a commit is either credited through the roster or
    /// reported unresolved, and each exactly once.
    #[test]
    fn attribution_is_total(records in records_strategy()) {
        let config = roster();
        for commit in resolve_identities(&records, &config) {
            let emails: Vec<&str> = std::iter::once(commit.record.author_email.as_str())
                .chain(commit.record.co_author_emails.iter().map(String::as_str))
                .collect();
            let mut unresolved = commit.unresolved.iter();
            for email in &emails {
                match config.resolve_email(email) {
                    Some(member) => prop_assert!(
                        commit.credited_members.iter().any(|m| m == member)
                    ),
                    None => prop_assert_eq!(unresolved.next().map(String::as_str), Some(*email)),
                }
            }
            prop_assert!(unresolved.next().is_none());

            // no duplicate credit
            let mut seen = std::collections::HashSet::new();
            for member in &commit.credited_members {
                prop_assert!(seen.insert(member.clone()));
            }
        }
    }
}

#[test]
fn meeting_events_are_exactly_those_with_attendees() {
    let text = r#"{"kind":"meeting","actor":"al","timestamp":"2022-10-01T10:00:00Z","id":"1","attendees":["m1"],"meeting_kind":"team"}
{"kind":"push","actor":"al","timestamp":"2022-10-01T11:00:00Z","id":"2"}
{"kind":"meeting","actor":"bee","timestamp":"2022-10-02T10:00:00Z","id":"3","attendees":["m2","m1"],"meeting_kind":"lecture"}
{"kind":"issue_comment","actor":"bee","timestamp":"2022-10-03T10:00:00Z","id":"4"}"#;
    let events = parse_events(text).unwrap();
    let meetings: Vec<_> = events.iter().filter(|e| e.kind == EventKind::Meeting).collect();
    assert_eq!(meetings.len(), 2);
    for event in &events {
        assert_eq!(event.kind == EventKind::Meeting, !event.attendees.is_empty());
        assert_eq!(event.kind == EventKind::Meeting, event.meeting_kind.is_some());
    }
}
