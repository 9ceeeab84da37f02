//! Generation and verification of the capstone template repository tree.
//!
//! The tree carries one folder per course deliverable under `docs/`, empty
//! `src/`, `test/` and `refs/` folders, Markdown stubs with section headings
//! only, and the four meeting issue templates. Folder names are fixed:
//! standardizing the arbitrary choices is the point, so they are never
//! silently changed.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;
use walkdir::WalkDir;

/// Errors raised while generating or verifying a template tree.
#[derive(Debug, Error)]
pub enum ScaffoldError {
    #[error("cannot write {path}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("target already contains {} generated path(s): {}", .0.len(), .0.join(", "))]
    Collisions(Vec<String>),
}

/// Which SRS template folder(s) to generate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SrsVariant {
    #[default]
    Default,
    Meyer,
    Volere,
    All,
}

impl SrsVariant {
    fn folders(&self) -> Vec<&'static str> {
        match self {
            Self::Default => vec!["SRS"],
            Self::Meyer => vec!["SRS-Meyer"],
            Self::Volere => vec!["SRS-Volere"],
            Self::All => vec!["SRS", "SRS-Meyer", "SRS-Volere"],
        }
    }
}

/// Options for [`generate_template`].
#[derive(Debug, Clone, Copy, Default)]
pub struct ScaffoldOptions {
    pub srs_variant: SrsVariant,
    pub overwrite: bool,
}

/// The four meeting issue templates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IssueKind {
    TeamMeeting,
    TaMeeting,
    SupervisorMeeting,
    LectureAttendance,
}

/// A generated file and the hash of its content.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileEntry {
    /// Relative, normalized, `/`-separated path.
    pub path: String,
    /// `sha256:<hex>` of the file bytes.
    pub content_id: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IssueTemplateEntry {
    pub name: String,
    pub kind: IssueKind,
}

/// Everything a generation run wrote.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TemplateManifest {
    pub directories: Vec<String>,
    pub files: Vec<FileEntry>,
    pub issue_templates: Vec<IssueTemplateEntry>,
}

/// A difference between a manifest and a target tree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Discrepancy {
    pub kind: DiscrepancyKind,
    pub path: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DiscrepancyKind {
    Missing,
    Extra,
    Modified,
}

const ISSUE_TEMPLATE_DIR: &str = ".github/ISSUE_TEMPLATE";

/// Deliverable folders under docs/, besides the SRS variant(s).
const DOC_FOLDERS: &[&str] = &[
    "ProblemStatementAndGoals",
    "DevelopmentPlan",
    "HazardAnalysis",
    "VnVPlan",
    "Design",
    "VnVReport",
    "Reflection",
    "ProjMngmnt",
];

fn doc_stub(title: &str, sections: &[&str]) -> String {
    let mut out = format!("# {title}\n");
    for section in sections {
        out.push_str(&format!("\n## {section}\n"));
    }
    out
}

fn issue_template(kind: IssueKind) -> (&'static str, &'static str, String) {
    let (file, name, body_sections): (&str, &str, &[&str]) = match kind {
        IssueKind::TeamMeeting => (
            "team_meeting.md",
            "Team Meeting",
            &["Attendees", "Agenda", "Decisions", "Action Items"],
        ),
        IssueKind::TaMeeting => (
            "ta_meeting.md",
            "TA Meeting",
            &["Attendees", "Questions for the TA", "Feedback Received", "Action Items"],
        ),
        IssueKind::SupervisorMeeting => (
            "supervisor_meeting.md",
            "Supervisor Meeting",
            &["Attendees", "Project Status", "Questions for the Supervisor", "Action Items"],
        ),
        IssueKind::LectureAttendance => (
            "lecture_attendance.md",
            "Lecture Attendance",
            &["Lecture", "Attendees", "Key Takeaways"],
        ),
    };
    let label = file.trim_end_matches(".md").replace('_', "-");
    let mut body = format!(
        "---\nname: {name}\nabout: {name} record\ntitle: \"{name} - [date]\"\nlabels: {label}\n---\n"
    );
    for section in body_sections {
        body.push_str(&format!("\n## {section}\n"));
    }
    (file, name, body)
}

fn content_id(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    format!("sha256:{:x}", digest)
}

/// The full generation plan for a set of options: directories and
/// (path, content) pairs, both sorted.
fn plan(options: &ScaffoldOptions) -> (Vec<String>, Vec<(String, String)>, Vec<IssueTemplateEntry>) {
    let mut directories: BTreeSet<String> = [
        ".github".to_string(),
        ISSUE_TEMPLATE_DIR.to_string(),
        "docs".to_string(),
        "src".to_string(),
        "test".to_string(),
        "refs".to_string(),
    ]
    .into();

    let mut files: Vec<(String, String)> = vec![(
        "README.md".to_string(),
        doc_stub(
            "Project Template",
            &[
                "Team",
                "Project Overview",
                "Folder Structure",
                "How We Work",
            ],
        ),
    )];

    for folder in DOC_FOLDERS {
        directories.insert(format!("docs/{folder}"));
        files.push((
            format!("docs/{folder}/{folder}.md"),
            doc_stub(
                folder,
                &["Purpose", "Revision History", "Content", "Appendix"],
            ),
        ));
    }

    for srs in options.srs_variant.folders() {
        directories.insert(format!("docs/{srs}"));
        files.push((
            format!("docs/{srs}/{srs}.md"),
            doc_stub(
                srs,
                &[
                    "Purpose",
                    "Revision History",
                    "Project Drivers",
                    "Functional Requirements",
                    "Nonfunctional Requirements",
                    "Traceability",
                ],
            ),
        ));
    }

    let mut issue_templates = Vec::new();
    for kind in [
        IssueKind::TeamMeeting,
        IssueKind::TaMeeting,
        IssueKind::SupervisorMeeting,
        IssueKind::LectureAttendance,
    ] {
        let (file, name, body) = issue_template(kind);
        files.push((format!("{ISSUE_TEMPLATE_DIR}/{file}"), body));
        issue_templates.push(IssueTemplateEntry {
            name: name.to_string(),
            kind,
        });
    }

    files.sort_by(|a, b| a.0.cmp(&b.0));
    (directories.into_iter().collect(), files, issue_templates)
}

/// Generate the template tree under `target` and return its manifest.
///
/// Without `overwrite`, any manifest file that already exists under the
/// target aborts the run before anything is written, listing every
/// colliding path.
pub fn generate_template(
    target: &Path,
    options: &ScaffoldOptions,
) -> Result<TemplateManifest, ScaffoldError> {
    let (directories, files, issue_templates) = plan(options);

    if !options.overwrite {
        let collisions: Vec<String> = files
            .iter()
            .map(|(path, _)| path)
            .filter(|path| target.join(path).exists())
            .cloned()
            .collect();
        if !collisions.is_empty() {
            return Err(ScaffoldError::Collisions(collisions));
        }
    }

    let io_err = |path: &Path| {
        let path = path.to_path_buf();
        move |source: std::io::Error| ScaffoldError::Io { path, source }
    };

    for dir in &directories {
        let path = target.join(dir);
        std::fs::create_dir_all(&path).map_err(io_err(&path))?;
    }

    let mut entries = Vec::with_capacity(files.len());
    for (rel, content) in &files {
        let path = target.join(rel);
        std::fs::write(&path, content).map_err(io_err(&path))?;
        entries.push(FileEntry {
            path: rel.clone(),
            content_id: content_id(content.as_bytes()),
        });
    }

    Ok(TemplateManifest {
        directories,
        files: entries,
        issue_templates,
    })
}

/// Compare a target tree against a manifest.
///
/// Reports manifest paths that are missing, files whose bytes changed, and
/// files present under the target that the manifest does not know. An empty
/// list means the tree conforms.
pub fn verify_template(
    target: &Path,
    manifest: &TemplateManifest,
) -> Result<Vec<Discrepancy>, ScaffoldError> {
    let mut discrepancies = Vec::new();

    for dir in &manifest.directories {
        if !target.join(dir).is_dir() {
            discrepancies.push(Discrepancy {
                kind: DiscrepancyKind::Missing,
                path: dir.clone(),
            });
        }
    }

    let mut known = BTreeSet::new();
    for entry in &manifest.files {
        known.insert(entry.path.clone());
        let path = target.join(&entry.path);
        match std::fs::read(&path) {
            Ok(bytes) => {
                if content_id(&bytes) != entry.content_id {
                    discrepancies.push(Discrepancy {
                        kind: DiscrepancyKind::Modified,
                        path: entry.path.clone(),
                    });
                }
            }
            Err(_) => discrepancies.push(Discrepancy {
                kind: DiscrepancyKind::Missing,
                path: entry.path.clone(),
            }),
        }
    }

    for entry in WalkDir::new(target).sort_by_file_name() {
        let entry = entry.map_err(|e| ScaffoldError::Io {
            path: target.to_path_buf(),
            source: e.into(),
        })?;
        if !entry.file_type().is_file() {
            continue;
        }
        let rel = entry
            .path()
            .strip_prefix(target)
            .expect("walkdir stays under target")
            .components()
            .map(|c| c.as_os_str().to_string_lossy())
            .collect::<Vec<_>>()
            .join("/");
        if !known.contains(&rel) {
            discrepancies.push(Discrepancy {
                kind: DiscrepancyKind::Extra,
                path: rel,
            });
        }
    }

    discrepancies.sort_by(|a, b| a.path.cmp(&b.path).then(a.kind.cmp(&b.kind)));
    Ok(discrepancies)
}

impl Ord for DiscrepancyKind {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (*self as u8).cmp(&(*other as u8))
    }
}

impl PartialOrd for DiscrepancyKind {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
