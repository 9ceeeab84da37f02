//! Attribution of commits to roster members via configured identity aliases.

use std::collections::BTreeSet;

use crate::config::CourseConfig;

use super::CommitRecord;

/// A commit with its author and co-authors resolved against the roster.
///
/// Attribution is total: the author email and every co-author email ends up
/// either credited (via `credited_members`) or listed in `unresolved`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttributedCommit {
    pub record: CommitRecord,
    /// Distinct member ids credited with this commit: the author plus each
    /// resolved co-author, full credit each.
    pub credited_members: Vec<String>,
    /// Emails on the commit that matched no roster alias.
    pub unresolved: Vec<String>,
}

/// Resolve author and co-author emails for each record.
///
/// Matching is exact and case-insensitive against the roster email aliases;
/// unresolved identities are data, not failures.
pub fn resolve_identities(records: &[CommitRecord], config: &CourseConfig) -> Vec<AttributedCommit> {
    records
        .iter()
        .map(|record| {
            let mut credited: Vec<String> = Vec::new();
            let mut unresolved = Vec::new();

            let emails =
                std::iter::once(record.author_email.as_str()).chain(record.co_author_emails.iter().map(String::as_str));
            for email in emails {
                match config.resolve_email(email) {
                    Some(member_id) => {
                        if !credited.iter().any(|m| m == member_id) {
                            credited.push(member_id.to_string());
                        }
                    }
                    None => unresolved.push(email.to_string()),
                }
            }

            AttributedCommit {
                record: record.clone(),
                credited_members: credited,
                unresolved,
            }
        })
        .collect()
}

/// Distinct unresolved emails across a batch, sorted.
pub fn distinct_unresolved(commits: &[AttributedCommit]) -> Vec<String> {
    commits
        .iter()
        .flat_map(|c| c.unresolved.iter().cloned())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_course_config;
    use chrono::DateTime;

    fn config() -> CourseConfig {
        parse_course_config(
            r#"
course_start = "2022-09-01"
course_end = "2023-05-01"
timezone = "UTC"

[[members]]
member_id = "m1"
email_aliases = ["a@x.com", "a2@x.com"]

[[members]]
member_id = "m2"
email_aliases = ["b@x.com"]
"#,
            std::path::Path::new("test"),
        )
        .unwrap()
    }

    fn record(author: &str, co_authors: &[&str]) -> CommitRecord {
        CommitRecord {
            sha: "a".repeat(40),
            author_name: "A".to_string(),
            author_email: author.to_string(),
            timestamp: DateTime::parse_from_rfc3339("2022-10-01T10:00:00Z").unwrap(),
            parent_count: 1,
            subject: "s".to_string(),
            co_author_emails: co_authors.iter().map(|s| s.to_string()).collect(),
        }
    }

    #[test]
    fn author_alias_resolves() {
        let out = resolve_identities(&[record("a@x.com", &[])], &config());
        assert_eq!(out[0].credited_members, vec!["m1"]);
        assert!(out[0].unresolved.is_empty());
    }

    #[test]
    fn two_emails_of_one_person_deduplicate() {
        let out = resolve_identities(&[record("a@x.com", &["a2@x.com"])], &config());
        assert_eq!(out[0].credited_members, vec!["m1"]);
    }

    #[test]
    fn unknown_author_with_known_co_author() {
        // hand-trace: unknown@x.com matches nothing, b@x.com -> m2
        let out = resolve_identities(&[record("unknown@x.com", &["b@x.com"])], &config());
        assert_eq!(out[0].credited_members, vec!["m2"]);
        assert_eq!(out[0].unresolved, vec!["unknown@x.com"]);
    }

    #[test]
    fn attribution_accounts_for_every_email() {
        let commits = resolve_identities(
            &[
                record("a@x.com", &["b@x.com", "nobody@x.com"]),
                record("ghost@x.com", &[]),
            ],
            &config(),
        );
        for commit in &commits {
            let total_emails = 1 + commit.record.co_author_emails.len();
            let resolved: usize = std::iter::once(commit.record.author_email.as_str())
                .chain(commit.record.co_author_emails.iter().map(String::as_str))
                .filter(|e| config().resolve_email(e).is_some())
                .count();
            assert_eq!(resolved + commit.unresolved.len(), total_emails);
        }
        assert_eq!(distinct_unresolved(&commits), vec!["ghost@x.com", "nobody@x.com"]);
    }
}
