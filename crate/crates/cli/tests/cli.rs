//! End-to-end CLI behavior on the shipped fixtures.

use std::path::{Path, PathBuf};
use std::process::Command;

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_capmetrics"))
}

fn temp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!(
        "capmetrics-cli-{tag}-{}-{:?}",
        std::process::id(),
        std::thread::current().id()
    ));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn analyze(extra: &[&str], out: &Path) -> std::process::Output {
    let fixtures = fixtures();
    bin()
        .args([
            "analyze",
            "--log",
            fixtures.join("team_alpha.log").to_str().unwrap(),
            "--events",
            fixtures.join("events_alpha.jsonl").to_str().unwrap(),
            "--config",
            fixtures.join("course.toml").to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
            "--reproducible",
        ])
        .args(extra)
        .output()
        .expect("binary runs")
}

#[test]
fn analyze_summary_matches_hand_enumeration() {
    let out = temp_dir("analyze");
    let output = analyze(&[], &out);
    assert!(output.status.success());

    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();

    // fixture oracle, enumerated by hand from fixtures/team_alpha.log:
    // m1 authors 8 countable commits, m2 authors 5 plus 1 co-authored,
    // m3 authors 4; one merge excluded, one commit after the course period,
    // one email off the roster
    assert_eq!(summary["member_commit_counts"]["m1"], 8);
    assert_eq!(summary["member_commit_counts"]["m2"], 6);
    assert_eq!(summary["member_commit_counts"]["m3"], 4);
    assert_eq!(summary["commits_parsed"], 20);
    assert_eq!(summary["commits_outside_period"], 1);
    assert_eq!(summary["unresolved_emails"][0], "dave@example.edu");
    assert_eq!(summary["time_spread"]["total_commits"], 18);
    assert_eq!(summary["time_spread"]["t0_commits"], 8);
    assert_eq!(summary["time_spread"]["t2_t0_commits"], 13);
    assert_eq!(summary["time_spread"]["t0_days"], 10);
    assert_eq!(summary["time_spread"]["t2_t0_days"], 30);
    // 8 of 18 commits landed on due dates
    let t0 = summary["time_spread"]["t0_commit_proportion"].as_f64().unwrap();
    assert!((t0 - 8.0 / 18.0).abs() < 1e-12);
    // counts {8,6,4}: pairwise excess 8 over denominator 2*18
    let unfairness = summary["team_fairness"]["unfairness"].as_f64().unwrap();
    assert!((unfairness - 8.0 / 36.0).abs() < 1e-12);
    // work events: m1 push+pr_merged, m2 pr_opened+pr_merged, m3 issue_comment
    assert_eq!(summary["work_event_counts"]["m1"], 2);
    assert_eq!(summary["work_event_counts"]["m2"], 2);
    assert_eq!(summary["work_event_counts"]["m3"], 1);
    assert_eq!(summary["unresolved_actors"][0], "zed");

    let _ = std::fs::remove_dir_all(&out);
}

#[test]
fn window_flag_restricts_the_analysis() {
    let full_dir = temp_dir("full");
    let windowed_dir = temp_dir("windowed");
    assert!(analyze(&[], &full_dir).status.success());
    assert!(analyze(&["--window", "poc demo"], &windowed_dir).status.success());

    let full: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(full_dir.join("summary.json")).unwrap())
            .unwrap();
    let windowed: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(windowed_dir.join("summary.json")).unwrap())
            .unwrap();

    // before the PoC demo: m1 6, m2 4, m3 2 (hand count)
    assert_eq!(windowed["member_commit_counts"]["m1"], 6);
    assert_eq!(windowed["member_commit_counts"]["m2"], 4);
    assert_eq!(windowed["member_commit_counts"]["m3"], 2);
    assert_eq!(windowed["window"]["to"], "2022-11-21");
    assert_eq!(full["member_commit_counts"]["m1"], 8);
    assert!(
        windowed["time_spread"]["total_commits"].as_u64()
            < full["time_spread"]["total_commits"].as_u64()
    );

    // the daily CSV covers exactly the window
    let csv = std::fs::read_to_string(windowed_dir.join("daily_series.csv")).unwrap();
    let rows = csv.lines().count() - 1;
    assert_eq!(rows, 82); // 2022-09-01 ..= 2022-11-21

    let _ = std::fs::remove_dir_all(&full_dir);
    let _ = std::fs::remove_dir_all(&windowed_dir);
}

#[test]
fn include_merges_flag_adds_the_merge_commit() {
    let out = temp_dir("merges");
    assert!(analyze(&["--include-merges"], &out).status.success());
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    // the merge on 2022-10-25 belongs to m2
    assert_eq!(summary["member_commit_counts"]["m2"], 7);
    assert_eq!(summary["time_spread"]["total_commits"], 19);
    let _ = std::fs::remove_dir_all(&out);
}

#[test]
fn missing_config_exits_one_and_names_the_path() {
    let out = temp_dir("missing");
    let output = bin()
        .args([
            "analyze",
            "--log",
            fixtures().join("team_alpha.log").to_str().unwrap(),
            "--config",
            "/nonexistent/course.toml",
            "--out",
            out.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("/nonexistent/course.toml"), "{stderr}");
    let _ = std::fs::remove_dir_all(&out);
}

#[test]
fn unknown_flag_exits_one() {
    let output = bin().args(["analyze", "--frobnicate"]).output().unwrap();
    assert_eq!(output.status.code(), Some(1));
    let output = bin().args(["--help"]).output().unwrap();
    assert_eq!(output.status.code(), Some(0));
}

#[test]
fn fairness_prints_six_decimal_json() {
    let output = bin().args(["fairness", "10", "5", "5"]).output().unwrap();
    assert!(output.status.success());
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(stdout.contains("\"unfairness\": 0.250000"), "{stdout}");
    assert!(stdout.contains("\"fairness\": 0.750000"));
    assert!(stdout.contains("\"degenerate\": false"));

    let degenerate = bin().args(["fairness", "7"]).output().unwrap();
    assert!(String::from_utf8_lossy(&degenerate.stdout).contains("\"degenerate\": true"));

    let staircase = bin().args(["fairness", "4", "3", "2", "1"]).output().unwrap();
    assert!(String::from_utf8_lossy(&staircase.stdout).contains("\"unfairness\": 0.333333"));

    let bad = bin().args(["fairness", "ten"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn fairness_reads_counts_from_a_file() {
    let dir = temp_dir("counts");
    let path = dir.join("counts.csv");
    std::fs::write(&path, "10,5\n5\n").unwrap();
    let output = bin()
        .args(["fairness", "--csv", path.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(String::from_utf8_lossy(&output.stdout).contains("\"unfairness\": 0.250000"));
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn report_embeds_verdicts_and_explanations() {
    let out = temp_dir("report");
    let fixtures = fixtures();
    let status = bin()
        .args([
            "report",
            "--log",
            fixtures.join("team_alpha.log").to_str().unwrap(),
            "--events",
            fixtures.join("events_alpha.jsonl").to_str().unwrap(),
            "--config",
            fixtures.join("course.toml").to_str().unwrap(),
            "--charter",
            fixtures.join("charter.toml").to_str().unwrap(),
            "--explanations",
            fixtures.join("explanations.toml").to_str().unwrap(),
            "--team-id",
            "alpha",
            "--out",
            out.to_str().unwrap(),
            "--reproducible",
        ])
        .status()
        .unwrap();
    assert!(status.success());

    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["team_id"], "alpha");
    assert_eq!(report["rows"].as_array().unwrap().len(), 3);
    let share_sum: f64 = report["rows"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["commit_share"].as_f64().unwrap())
        .sum();
    assert!((share_sum - 1.0).abs() < 1e-9);
    assert!(report["verdicts"].as_array().unwrap().len() >= 6);
    assert!(report["rows"][2]["explanation"]
        .as_str()
        .unwrap()
        .contains("not merged"));

    let markdown = std::fs::read_to_string(out.join("report.md")).unwrap();
    assert!(markdown.contains("| m1 |"));
    assert!(markdown.contains("## Charter verdicts"));
    let _ = std::fs::remove_dir_all(&out);
}

#[test]
fn simulated_logs_feed_back_through_analyze() {
    let sim_out = temp_dir("sim");
    let fixtures = fixtures();
    let status = bin()
        .args([
            "simulate",
            "--cohort",
            fixtures.join("cohort.toml").to_str().unwrap(),
            "--out",
            sim_out.to_str().unwrap(),
            "--reproducible",
        ])
        .status()
        .unwrap();
    assert!(status.success());

    // strip the [config] table out of the cohort spec to get a standalone config
    let cohort_text = std::fs::read_to_string(fixtures.join("cohort.toml")).unwrap();
    let config_text = cohort_text[cohort_text.find("[config]").unwrap()..]
        .replace("[config]\n", "")
        .replace("[[config.members]]", "[[members]]")
        .replace("[[config.milestones]]", "[[milestones]]");
    let config_path = sim_out.join("config.toml");
    std::fs::write(&config_path, config_text).unwrap();

    let analyze_out = temp_dir("sim-analyze");
    let status = bin()
        .args([
            "analyze",
            "--log",
            sim_out.join("steady-team.log").to_str().unwrap(),
            "--config",
            config_path.to_str().unwrap(),
            "--out",
            analyze_out.to_str().unwrap(),
            "--reproducible",
        ])
        .status()
        .unwrap();
    assert!(status.success());

    let summary: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(analyze_out.join("summary.json")).unwrap(),
    )
    .unwrap();
    // every simulated email resolves against the cohort roster
    assert!(summary["unresolved_emails"].as_array().unwrap().is_empty());
    assert!(summary["time_spread"]["total_commits"].as_u64().unwrap() > 500);

    let _ = std::fs::remove_dir_all(&sim_out);
    let _ = std::fs::remove_dir_all(&analyze_out);
}

#[test]
fn invalid_charter_exits_one_with_a_grammar_error() {
    let dir = temp_dir("bad-charter");
    let charter = dir.join("charter.toml");
    std::fs::write(
        &charter,
        "[[rules]]\nid = \"x\"\nmetric = \"lines_of_code\"\ncomparator = \"<\"\nthreshold = 1\nseverity = \"warn\"\n",
    )
    .unwrap();
    let out = dir.join("out");
    let fixtures = fixtures();
    let output = bin()
        .args([
            "charter-check",
            "--charter",
            charter.to_str().unwrap(),
            "--log",
            fixtures.join("team_balanced.log").to_str().unwrap(),
            "--config",
            fixtures.join("course.toml").to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("lines_of_code") || stderr.contains("metric"), "{stderr}");
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn scaffold_collision_without_overwrite_exits_one() {
    let target = temp_dir("scaffold-collide");
    let run = |extra: &[&str]| {
        bin()
            .args(["scaffold", "--target", target.to_str().unwrap()])
            .args(extra)
            .output()
            .unwrap()
    };
    assert!(run(&[]).status.success());
    let second = run(&[]);
    assert_eq!(second.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&second.stderr).contains("README.md"));
    assert!(run(&["--overwrite"]).status.success());
    let _ = std::fs::remove_dir_all(&target);
}
