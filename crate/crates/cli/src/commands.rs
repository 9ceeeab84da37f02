//! Subcommand implementations.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::Serialize;

use capmetrics_core::charter::{any_escalation, parse_charter, CharterRule, EvaluationContext, Verdict};
use capmetrics_core::config::{load_course_config, CourseConfig, DateRange};
use capmetrics_core::ingest::{
    distinct_unresolved, load_commit_log, load_events, resolve_identities, AttributedCommit,
    MergePolicy, WorkEvent,
};
use capmetrics_core::metrics::{
    daily_commit_series, member_commit_counts, time_fairness, time_spread_summary, unfairness,
    work_event_counts, ContributionMultiset, FairnessResult, TimeSpreadSummary,
};
use capmetrics_core::report::{
    build_performance_report, histogram_export, render_markdown, render_svg_histogram,
    render_verdicts_markdown, ReportContext,
};
use capmetrics_core::scaffold::{
    generate_template, verify_template, ScaffoldOptions, SrsVariant, TemplateManifest,
};
use capmetrics_core::simulate::{load_cohort_spec, simulate_cohort};

use crate::output::{generated_at, with_output_dir};
use crate::{
    AnalyzeArgs, CharterCheckArgs, FairnessArgs, ReportArgs, ScaffoldArgs, SimulateArgs,
    SrsVariantArg,
};

fn merge_policy(include_merges: bool) -> MergePolicy {
    if include_merges {
        MergePolicy::IncludeMerges
    } else {
        MergePolicy::ExcludeMerges
    }
}

fn resolve_window(config: &CourseConfig, expr: Option<&str>) -> Result<DateRange> {
    match expr {
        Some(expr) => config
            .resolve_window(expr)
            .with_context(|| format!("invalid --window {expr:?}")),
        None => Ok(config.period()),
    }
}

struct LoadedInputs {
    config: CourseConfig,
    commits: Vec<AttributedCommit>,
    events: Vec<WorkEvent>,
}

fn load_inputs(
    config_path: &Path,
    log_path: &Path,
    events_path: Option<&Path>,
) -> Result<LoadedInputs> {
    let config = load_course_config(config_path)
        .with_context(|| format!("config {}", config_path.display()))?;
    let records =
        load_commit_log(log_path).with_context(|| format!("commit log {}", log_path.display()))?;
    let commits = resolve_identities(&records, &config);
    let events = match events_path {
        Some(path) => load_events(path).with_context(|| format!("events {}", path.display()))?,
        None => Vec::new(),
    };
    Ok(LoadedInputs {
        config,
        commits,
        events,
    })
}

fn counts_map(counts: &ContributionMultiset) -> BTreeMap<String, u64> {
    counts
        .labeled()
        .expect("member counts are labeled")
        .map(|(id, count)| (id.to_string(), count))
        .collect()
}

// ---------------------------------------------------------------------------
// analyze
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct AnalyzeSummary {
    team_id: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    generated_at: Option<String>,
    window: DateRange,
    include_merges: bool,
    commits_parsed: usize,
    commits_outside_period: u64,
    member_commit_counts: BTreeMap<String, u64>,
    unresolved_emails: Vec<String>,
    team_fairness: FairnessResult<f64>,
    time_fairness: FairnessResult<f64>,
    time_spread: TimeSpreadSummary,
    #[serde(skip_serializing_if = "Option::is_none")]
    work_event_counts: Option<BTreeMap<String, u64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    unresolved_actors: Option<Vec<String>>,
}

fn analyze_summary_markdown(summary: &AnalyzeSummary) -> String {
    let mut out = String::new();
    out.push_str(&format!("# Analysis: {}\n\n", summary.team_id));
    if let Some(stamp) = &summary.generated_at {
        out.push_str(&format!("Generated: {stamp}\n\n"));
    }
    out.push_str(&format!(
        "Window: {} | merges {} | {} commits parsed ({} outside the period)\n\n",
        summary.window,
        if summary.include_merges {
            "included"
        } else {
            "excluded"
        },
        summary.commits_parsed,
        summary.commits_outside_period,
    ));

    out.push_str("## Commits per member\n\n| Member | Commits |\n|---|---:|\n");
    for (member, count) in &summary.member_commit_counts {
        out.push_str(&format!("| {member} | {count} |\n"));
    }

    out.push_str(&format!(
        "\n## Fairness\n\n- Team fairness: {:.6} (unfairness {:.6}{})\n- Time fairness: {:.6} (unfairness {:.6}{})\n",
        summary.team_fairness.fairness,
        summary.team_fairness.unfairness,
        if summary.team_fairness.degenerate { ", degenerate" } else { "" },
        summary.time_fairness.fairness,
        summary.time_fairness.unfairness,
        if summary.time_fairness.degenerate { ", degenerate" } else { "" },
    ));

    let spread = &summary.time_spread;
    out.push_str(&format!(
        "\n## Time spread\n\n| Metric | Value |\n|---|---:|\n| Total commits | {} |\n| Total days | {} |\n| T-0 days | {} |\n| T-0 commits | {} ({:.2}%) |\n| T-2...T-0 days | {} |\n| T-2...T-0 commits | {} ({:.2}%) |\n",
        spread.total_commits,
        spread.total_days,
        spread.t0_days,
        spread.t0_commits,
        spread.t0_commit_proportion * 100.0,
        spread.t2_t0_days,
        spread.t2_t0_commits,
        spread.t2_t0_commit_proportion * 100.0,
    ));

    if let Some(events) = &summary.work_event_counts {
        out.push_str("\n## Work events per member\n\n| Member | Events |\n|---|---:|\n");
        for (member, count) in events {
            out.push_str(&format!("| {member} | {count} |\n"));
        }
    }
    if !summary.unresolved_emails.is_empty() {
        out.push_str("\n## Unresolved emails\n\n");
        for email in &summary.unresolved_emails {
            out.push_str(&format!("- {email}\n"));
        }
    }
    out
}

pub fn analyze(args: &AnalyzeArgs) -> Result<u8> {
    let inputs = load_inputs(&args.config, &args.log, args.events.as_deref())?;
    let policy = merge_policy(args.include_merges);
    let window = resolve_window(&inputs.config, args.window.as_deref())?;

    let binning = daily_commit_series(&inputs.commits, &inputs.config, policy);
    let series = binning
        .series
        .slice(window)
        .expect("window validated against the period");
    let counts = member_commit_counts(&inputs.commits, &inputs.config, Some(window), policy);

    let (event_counts, unresolved_actors) = if args.events.is_some() {
        let result = work_event_counts(&inputs.events, &inputs.config, Some(window));
        (
            Some(counts_map(&result.counts)),
            Some(result.unresolved_actors),
        )
    } else {
        (None, None)
    };

    let summary = AnalyzeSummary {
        team_id: args.team_id.clone(),
        generated_at: generated_at(args.reproducible),
        window,
        include_merges: args.include_merges,
        commits_parsed: inputs.commits.len(),
        commits_outside_period: binning.outside_period,
        member_commit_counts: counts_map(&counts),
        unresolved_emails: distinct_unresolved(&inputs.commits),
        team_fairness: unfairness(&counts),
        time_fairness: time_fairness(&series).expect("window spans at least one day"),
        time_spread: time_spread_summary(&series),
        work_event_counts: event_counts,
        unresolved_actors,
    };

    let json = serde_json::to_string_pretty(&summary)?;
    let markdown = analyze_summary_markdown(&summary);
    let csv = histogram_export(&series);
    let svg = args.svg.then(|| render_svg_histogram(&series));

    with_output_dir(&args.out, |out| {
        out.write("summary.json", &json)?;
        out.write("summary.md", &markdown)?;
        out.write("daily_series.csv", &csv)?;
        if let Some(svg) = &svg {
            out.write("histogram.svg", svg)?;
        }
        Ok(())
    })?;

    Ok(0)
}

// ---------------------------------------------------------------------------
// report
// ---------------------------------------------------------------------------

fn load_explanations(path: Option<&Path>) -> Result<BTreeMap<String, String>> {
    match path {
        None => Ok(BTreeMap::new()),
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("explanations {}", path.display()))?;
            toml::from_str(&text)
                .with_context(|| format!("explanations {} is not a member->text table", path.display()))
        }
    }
}

#[derive(Serialize)]
struct ReportEnvelope<'a> {
    #[serde(skip_serializing_if = "Option::is_none")]
    generated_at: Option<String>,
    #[serde(flatten)]
    report: &'a capmetrics_core::report::PerformanceReport,
}

pub fn report(args: &ReportArgs) -> Result<u8> {
    let inputs = load_inputs(&args.config, &args.log, args.events.as_deref())?;
    let policy = merge_policy(args.include_merges);
    let window = resolve_window(&inputs.config, args.window.as_deref())?;
    let rules: Vec<CharterRule> = match &args.charter {
        Some(path) => parse_charter(path, &inputs.config)
            .with_context(|| format!("charter {}", path.display()))?,
        None => Vec::new(),
    };
    let explanations = load_explanations(args.explanations.as_deref())?;

    let ctx = ReportContext {
        team_id: &args.team_id,
        commits: &inputs.commits,
        events: &inputs.events,
        config: &inputs.config,
        rules: &rules,
        explanations: &explanations,
        merge_policy: policy,
    };
    let report = build_performance_report(&ctx, window);

    let stamp = generated_at(args.reproducible);
    let json = serde_json::to_string_pretty(&ReportEnvelope {
        generated_at: stamp.clone(),
        report: &report,
    })?;
    let mut markdown = render_markdown(&report);
    if let Some(stamp) = &stamp {
        markdown.push_str(&format!("\nGenerated: {stamp}\n"));
    }

    with_output_dir(&args.out, |out| {
        out.write("report.json", &json)?;
        out.write("report.md", &markdown)?;
        Ok(())
    })?;

    Ok(0)
}

// ---------------------------------------------------------------------------
// charter-check
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct VerdictsSummary {
    #[serde(skip_serializing_if = "Option::is_none")]
    generated_at: Option<String>,
    escalation: bool,
    verdicts: Vec<Verdict>,
}

pub fn charter_check(args: &CharterCheckArgs) -> Result<u8> {
    let inputs = load_inputs(&args.config, &args.log, args.events.as_deref())?;
    let rules = parse_charter(&args.charter, &inputs.config)
        .with_context(|| format!("charter {}", args.charter.display()))?;

    let ctx = EvaluationContext {
        commits: &inputs.commits,
        events: &inputs.events,
        config: &inputs.config,
        merge_policy: merge_policy(args.include_merges),
    };
    let verdicts = capmetrics_core::charter::evaluate_rules(&rules, &ctx);
    let escalation = any_escalation(&verdicts);

    let stamp = generated_at(args.reproducible);
    let summary = VerdictsSummary {
        generated_at: stamp.clone(),
        escalation,
        verdicts,
    };
    let json = serde_json::to_string_pretty(&summary)?;
    let mut markdown = String::from("# Charter verdicts\n\n");
    if let Some(stamp) = &stamp {
        markdown.push_str(&format!("Generated: {stamp}\n\n"));
    }
    markdown.push_str(&render_verdicts_markdown(&summary.verdicts));

    with_output_dir(&args.out, |out| {
        out.write("verdicts.json", &json)?;
        out.write("verdicts.md", &markdown)?;
        Ok(())
    })?;

    for verdict in summary.verdicts.iter().filter(|v| v.triggered) {
        eprintln!(
            "triggered: rule {} for {} (observed {:.6} {} {:.6})",
            verdict.rule_id,
            verdict.member_id,
            verdict.observed,
            "vs",
            verdict.threshold
        );
    }

    Ok(if escalation { 2 } else { 0 })
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

fn sanitize_filename(team_id: &str) -> String {
    team_id
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || matches!(c, '.' | '_' | '-') {
                c
            } else {
                '_'
            }
        })
        .collect()
}

#[derive(Serialize)]
struct SimulateSummary {
    #[serde(skip_serializing_if = "Option::is_none")]
    generated_at: Option<String>,
    seed: u64,
    teams: BTreeMap<String, TeamSimSummary>,
}

#[derive(Serialize)]
struct TeamSimSummary {
    commits: usize,
    log_file: String,
}

pub fn simulate(args: &SimulateArgs) -> Result<u8> {
    let spec = load_cohort_spec(&args.cohort)
        .with_context(|| format!("cohort spec {}", args.cohort.display()))?;
    let histories = simulate_cohort(&spec)?;

    let mut teams = BTreeMap::new();
    let mut files: Vec<(String, String)> = Vec::new();
    for (team_id, records) in &histories {
        let file = format!("{}.log", sanitize_filename(team_id));
        files.push((
            file.clone(),
            capmetrics_core::ingest::to_canonical_log(records),
        ));
        teams.insert(
            team_id.clone(),
            TeamSimSummary {
                commits: records.len(),
                log_file: file,
            },
        );
    }

    let summary = SimulateSummary {
        generated_at: generated_at(args.reproducible),
        seed: spec.seed,
        teams,
    };
    let json = serde_json::to_string_pretty(&summary)?;

    with_output_dir(&args.out, |out| {
        for (name, content) in &files {
            out.write(name, content)?;
        }
        out.write("cohort_summary.json", &json)?;
        Ok(())
    })?;

    Ok(0)
}

// ---------------------------------------------------------------------------
// scaffold
// ---------------------------------------------------------------------------

pub fn scaffold(args: &ScaffoldArgs) -> Result<u8> {
    if let Some(manifest_path) = &args.verify {
        let text = std::fs::read_to_string(manifest_path)
            .with_context(|| format!("manifest {}", manifest_path.display()))?;
        let manifest: TemplateManifest = serde_json::from_str(&text)
            .with_context(|| format!("manifest {}", manifest_path.display()))?;
        let discrepancies = verify_template(&args.target, &manifest)?;
        println!("{}", serde_json::to_string_pretty(&discrepancies)?);
        if discrepancies.is_empty() {
            eprintln!("template conforms to the manifest");
        } else {
            eprintln!("{} discrepancy(ies) found", discrepancies.len());
        }
        return Ok(0);
    }

    let options = ScaffoldOptions {
        srs_variant: match args.srs_variant {
            SrsVariantArg::Default => SrsVariant::Default,
            SrsVariantArg::Meyer => SrsVariant::Meyer,
            SrsVariantArg::Volere => SrsVariant::Volere,
            SrsVariantArg::All => SrsVariant::All,
        },
        overwrite: args.overwrite,
    };
    std::fs::create_dir_all(&args.target)
        .with_context(|| format!("cannot create target {}", args.target.display()))?;
    let manifest = generate_template(&args.target, &options)?;
    let json = serde_json::to_string_pretty(&manifest)?;

    match &args.manifest_out {
        Some(path) => std::fs::write(path, &json)
            .with_context(|| format!("cannot write manifest {}", path.display()))?,
        None => println!("{json}"),
    }
    Ok(0)
}

// ---------------------------------------------------------------------------
// fairness
// ---------------------------------------------------------------------------

fn parse_counts(args: &FairnessArgs) -> Result<Vec<u64>> {
    let tokens: Vec<String> = match &args.csv {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("counts file {}", path.display()))?;
            text.split([',', '\n', '\r', ' ', '\t'])
                .filter(|t| !t.trim().is_empty())
                .map(|t| t.trim().to_string())
                .collect()
        }
        None => args.counts.clone(),
    };
    if tokens.is_empty() {
        bail!("no counts given: pass counts inline (fairness 10 5 5) or via --csv");
    }
    tokens
        .iter()
        .map(|t| {
            t.parse::<u64>()
                .with_context(|| format!("not a nonnegative integer count: {t:?}"))
        })
        .collect()
}

pub fn fairness(args: &FairnessArgs) -> Result<u8> {
    let counts = parse_counts(args)?;
    let multiset = ContributionMultiset::new(counts)?;
    let result: FairnessResult<f64> = unfairness(&multiset);

    // fixed six decimal places
    println!(
        "{{\n  \"unfairness\": {:.6},\n  \"fairness\": {:.6},\n  \"degenerate\": {}\n}}",
        result.unfairness, result.fairness, result.degenerate
    );
    Ok(0)
}
