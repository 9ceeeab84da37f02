//! Seeded simulation of synthetic team commit histories.
//!
//! Each member draws a commit count per course day from a Poisson
//! distribution sampled by CDF inversion, with the rate scaled up inside the
//! deadline window (the same day-before-due-date convention the time-spread
//! metric uses). Everything is driven by ChaCha8 streams derived from the
//! cohort seed, so identical (spec, seed) reproduce identical histories on
//! any platform:
//!
//! - team stream seed  = first 8 LE bytes of SHA-256(seed_le || team_id)
//! - member stream seed = first 8 LE bytes of SHA-256(team_seed_le || member_id)
//! - per active day, in order: one uniform for activity, one uniform for the
//!   Poisson inversion, then per commit one uniform for the second-of-day and
//!   20 bytes for the sha.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use chrono::{NaiveDate, TimeZone};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::config::{parse_course_config, CourseConfig};
use crate::ingest::CommitRecord;

/// Errors raised while loading or validating a cohort spec.
#[derive(Debug, Error)]
pub enum SimulateError {
    #[error("failed to read {path}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("failed to parse {path}: {message}")]
    Parse { path: PathBuf, message: String },

    #[error("config: {0}")]
    Config(#[from] crate::config::ConfigError),

    #[error("profile {name}: {message}")]
    InvalidProfile { name: String, message: String },

    #[error("duplicate profile name {0:?}")]
    DuplicateProfile(String),

    #[error("team {team}: member {member}: unknown profile {profile:?}")]
    UnknownProfile {
        team: String,
        member: String,
        profile: String,
    },

    #[error("team {team}: duplicate member_id {member:?}")]
    DuplicateMember { team: String, member: String },

    #[error("duplicate team_id {0:?}")]
    DuplicateTeam(String),
}

/// How one simulated member behaves.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BehaviorProfile {
    pub name: String,
    /// Expected commits per active day outside deadline windows.
    pub base_rate: f64,
    /// Rate multiplier on days inside a deadline window (>= 1).
    #[serde(default = "one")]
    pub deadline_multiplier: f64,
    /// Days before (and including) a due date that count as the window.
    #[serde(default)]
    pub deadline_window_days: u32,
    /// Chance the member does anything at all on a given day.
    #[serde(default = "one")]
    pub activity_probability: f64,
}

fn one() -> f64 {
    1.0
}

impl BehaviorProfile {
    pub fn validate(&self) -> Result<(), SimulateError> {
        let fail = |message: &str| {
            Err(SimulateError::InvalidProfile {
                name: self.name.clone(),
                message: message.to_string(),
            })
        };
        if !(self.base_rate >= 0.0 && self.base_rate.is_finite()) {
            return fail("base_rate must be a finite number >= 0");
        }
        if !(self.deadline_multiplier >= 1.0 && self.deadline_multiplier.is_finite()) {
            return fail("deadline_multiplier must be a finite number >= 1");
        }
        if !(0.0..=1.0).contains(&self.activity_probability) {
            return fail("activity_probability must lie in [0, 1]");
        }
        Ok(())
    }
}

/// One simulated team: members with their profile names.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TeamSpec {
    pub team_id: String,
    pub members: Vec<MemberSpec>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MemberSpec {
    pub member_id: String,
    pub profile: String,
}

/// A full simulated cohort: profiles, teams, course config and master seed.
#[derive(Debug, Clone)]
pub struct CohortSpec {
    pub profiles: Vec<BehaviorProfile>,
    pub teams: Vec<TeamSpec>,
    pub config: CourseConfig,
    pub seed: u64,
}

impl CohortSpec {
    pub fn validate(&self) -> Result<(), SimulateError> {
        let mut names = std::collections::HashSet::new();
        for profile in &self.profiles {
            profile.validate()?;
            if !names.insert(profile.name.as_str()) {
                return Err(SimulateError::DuplicateProfile(profile.name.clone()));
            }
        }
        let mut team_ids = std::collections::HashSet::new();
        for team in &self.teams {
            if !team_ids.insert(team.team_id.as_str()) {
                return Err(SimulateError::DuplicateTeam(team.team_id.clone()));
            }
            let mut member_ids = std::collections::HashSet::new();
            for member in &team.members {
                if !member_ids.insert(member.member_id.as_str()) {
                    return Err(SimulateError::DuplicateMember {
                        team: team.team_id.clone(),
                        member: member.member_id.clone(),
                    });
                }
                if !self.profiles.iter().any(|p| p.name == member.profile) {
                    return Err(SimulateError::UnknownProfile {
                        team: team.team_id.clone(),
                        member: member.member_id.clone(),
                        profile: member.profile.clone(),
                    });
                }
            }
        }
        Ok(())
    }
}

/// Synthetic author email for a simulated member.
pub fn sim_author_email(member_id: &str) -> String {
    format!("{member_id}@sim.invalid")
}

/// Stable sub-seed for a team: SHA-256 over the master seed and team id.
pub fn team_subseed(seed: u64, team_id: &str) -> u64 {
    derive_seed(seed, team_id.as_bytes())
}

fn derive_seed(seed: u64, salt: &[u8]) -> u64 {
    let mut hasher = Sha256::new();
    hasher.update(seed.to_le_bytes());
    hasher.update(salt);
    let digest = hasher.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("digest has 32 bytes"))
}

/// Poisson sample by CDF inversion from one uniform draw.
fn poisson_inverse(u: f64, lambda: f64) -> u64 {
    if lambda <= 0.0 {
        return 0;
    }
    let mut k = 0u64;
    let mut p = (-lambda).exp();
    let mut cumulative = p;
    // cap guards against float-tail stalls for u ~ 1
    let cap = (10.0 * lambda + 100.0) as u64;
    while u > cumulative && k < cap {
        k += 1;
        p *= lambda / k as f64;
        cumulative += p;
        if p == 0.0 {
            break;
        }
    }
    k
}

fn deadline_days(config: &CourseConfig, window_days: u32) -> Vec<bool> {
    let period = config.period();
    let mut flags = vec![false; period.day_count()];
    for due in config.due_dates() {
        let index = (due - period.from).num_days() as usize;
        for offset in 0..=window_days as usize {
            if let Some(i) = index.checked_sub(offset) {
                flags[i] = true;
            }
        }
    }
    flags
}

/// Author email for a member: the first roster email alias when the member
/// is on the roster, a synthetic address otherwise.
fn author_email(config: &CourseConfig, member_id: &str) -> String {
    config
        .members
        .iter()
        .find(|m| m.member_id == member_id)
        .and_then(|m| m.email_aliases.first().cloned())
        .unwrap_or_else(|| sim_author_email(member_id))
}

fn local_timestamp(
    config: &CourseConfig,
    date: NaiveDate,
    second_of_day: u32,
) -> chrono::DateTime<chrono::FixedOffset> {
    let naive = date
        .and_hms_opt(second_of_day / 3600, (second_of_day / 60) % 60, second_of_day % 60)
        .expect("second_of_day < 86400");
    // spring-forward gaps have no local representation; slide by an hour
    let mut candidate = naive;
    loop {
        match config.timezone.from_local_datetime(&candidate) {
            chrono::LocalResult::Single(t) => return t.fixed_offset(),
            chrono::LocalResult::Ambiguous(earliest, _) => return earliest.fixed_offset(),
            chrono::LocalResult::None => {
                candidate += chrono::Duration::hours(1);
            }
        }
    }
}

/// Simulate one team's commit history.
///
/// Fully determined by (members, config, seed); output sorted by timestamp
/// with the sha as tie-break.
pub fn simulate_team(
    team: &TeamSpec,
    profiles: &[BehaviorProfile],
    config: &CourseConfig,
    seed: u64,
) -> Result<Vec<CommitRecord>, SimulateError> {
    let mut records = Vec::new();

    for member in &team.members {
        let profile = profiles
            .iter()
            .find(|p| p.name == member.profile)
            .ok_or_else(|| SimulateError::UnknownProfile {
                team: team.team_id.clone(),
                member: member.member_id.clone(),
                profile: member.profile.clone(),
            })?;
        profile.validate()?;

        let mut rng =
            ChaCha8Rng::seed_from_u64(derive_seed(seed, member.member_id.as_bytes()));
        let email = author_email(config, &member.member_id);
        let in_window = deadline_days(config, profile.deadline_window_days);

        for (day_index, date) in config.period().iter_days().enumerate() {
            let active: f64 = rng.gen();
            if active >= profile.activity_probability {
                continue;
            }
            let rate = profile.base_rate
                * if in_window[day_index] {
                    profile.deadline_multiplier
                } else {
                    1.0
                };
            let commit_count = poisson_inverse(rng.gen(), rate);

            for serial in 0..commit_count {
                let second_of_day = rng.gen_range(0..86_400u32);
                let mut sha_bytes = [0u8; 20];
                rng.fill_bytes(&mut sha_bytes);
                let sha: String = sha_bytes.iter().map(|b| format!("{b:02x}")).collect();

                records.push(CommitRecord {
                    sha,
                    author_name: member.member_id.clone(),
                    author_email: email.clone(),
                    timestamp: local_timestamp(config, date, second_of_day),
                    parent_count: 1,
                    subject: format!("work: {} item {} on {}", member.member_id, serial + 1, date),
                    co_author_emails: Vec::new(),
                });
            }
        }
    }

    records.sort_by(|a, b| a.timestamp.cmp(&b.timestamp).then_with(|| a.sha.cmp(&b.sha)));
    Ok(records)
}

/// Simulate every team in a cohort.
///
/// Teams run from independent sub-seeds, so results do not depend on team
/// order or parallel scheduling.
pub fn simulate_cohort(
    spec: &CohortSpec,
) -> Result<BTreeMap<String, Vec<CommitRecord>>, SimulateError> {
    spec.validate()?;
    let mut histories = BTreeMap::new();
    for team in &spec.teams {
        let sub_seed = team_subseed(spec.seed, &team.team_id);
        let records = simulate_team(team, &spec.profiles, &spec.config, sub_seed)?;
        histories.insert(team.team_id.clone(), records);
    }
    Ok(histories)
}

// ---------------------------------------------------------------------------
// Cohort spec file
// ---------------------------------------------------------------------------

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCohort {
    seed: u64,
    #[serde(default)]
    profiles: Vec<BehaviorProfile>,
    #[serde(default)]
    teams: Vec<TeamSpec>,
    config: toml::Value,
}

/// Parse a cohort spec from TOML text; the course config is embedded under
/// `[config]`.
pub fn parse_cohort_spec(text: &str, origin: &Path) -> Result<CohortSpec, SimulateError> {
    let raw: RawCohort = toml::from_str(text).map_err(|e| SimulateError::Parse {
        path: origin.to_path_buf(),
        message: e.to_string(),
    })?;
    let config_text = toml::to_string(&raw.config).map_err(|e| SimulateError::Parse {
        path: origin.to_path_buf(),
        message: e.to_string(),
    })?;
    let config = parse_course_config(&config_text, origin)?;
    let spec = CohortSpec {
        profiles: raw.profiles,
        teams: raw.teams,
        config,
        seed: raw.seed,
    };
    spec.validate()?;
    Ok(spec)
}

/// Load a cohort spec file.
pub fn load_cohort_spec(path: &Path) -> Result<CohortSpec, SimulateError> {
    let text = std::fs::read_to_string(path).map_err(|source| SimulateError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_cohort_spec(&text, path)
}
