//! `capmetrics` — mine team repositories, score fairness, check charters.
//!
//! Exit codes are stable: 0 success, 1 input or usage error, 2 when a
//! triggered charter rule carries escalate severity.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "capmetrics",
    version,
    about = "Repository mining, contribution fairness and charter checks for student team projects"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze a commit log: time spread, fairness and daily series
    Analyze(AnalyzeArgs),
    /// Build the performance report for a demo window
    Report(ReportArgs),
    /// Evaluate team-charter rules; exits 2 when an escalation triggers
    CharterCheck(CharterCheckArgs),
    /// Generate synthetic cohort commit histories from a spec
    Simulate(SimulateArgs),
    /// Generate (or verify) the capstone template tree
    Scaffold(ScaffoldArgs),
    /// Compute the fairness index for a list of counts
    Fairness(FairnessArgs),
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Canonical commit export (see docs/export.md)
    #[arg(long)]
    log: PathBuf,

    /// Optional newline-delimited JSON event export
    #[arg(long)]
    events: Option<PathBuf>,

    /// Course config file
    #[arg(long)]
    config: PathBuf,

    /// Output directory (created if absent)
    #[arg(long)]
    out: PathBuf,

    /// Team identifier used in the outputs
    #[arg(long, default_value = "team")]
    team_id: String,

    /// Restrict metrics to a window: a milestone name, `from..to`, or `..to`
    #[arg(long)]
    window: Option<String>,

    /// Count merge commits too (excluded by default)
    #[arg(long)]
    include_merges: bool,

    /// Also render the daily histogram as SVG
    #[arg(long)]
    svg: bool,

    /// Omit generation timestamps so outputs are byte-reproducible
    #[arg(long)]
    reproducible: bool,
}

#[derive(Args)]
struct ReportArgs {
    #[arg(long)]
    log: PathBuf,

    #[arg(long)]
    events: Option<PathBuf>,

    #[arg(long)]
    config: PathBuf,

    /// Optional charter whose verdicts are embedded in the report
    #[arg(long)]
    charter: Option<PathBuf>,

    /// Optional TOML sidecar mapping member ids to explanations
    #[arg(long)]
    explanations: Option<PathBuf>,

    #[arg(long)]
    out: PathBuf,

    #[arg(long, default_value = "team")]
    team_id: String,

    #[arg(long)]
    window: Option<String>,

    #[arg(long)]
    include_merges: bool,

    #[arg(long)]
    reproducible: bool,
}

#[derive(Args)]
struct CharterCheckArgs {
    /// Charter rule file
    #[arg(long)]
    charter: PathBuf,

    #[arg(long)]
    log: PathBuf,

    #[arg(long)]
    events: Option<PathBuf>,

    #[arg(long)]
    config: PathBuf,

    #[arg(long)]
    out: PathBuf,

    #[arg(long)]
    include_merges: bool,

    #[arg(long)]
    reproducible: bool,
}

#[derive(Args)]
struct SimulateArgs {
    /// Cohort spec file (profiles, teams, embedded course config, seed)
    #[arg(long)]
    cohort: PathBuf,

    #[arg(long)]
    out: PathBuf,

    #[arg(long)]
    reproducible: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum SrsVariantArg {
    Default,
    Meyer,
    Volere,
    All,
}

#[derive(Args)]
struct ScaffoldArgs {
    /// Directory to generate into
    #[arg(long)]
    target: PathBuf,

    /// Which SRS template folder(s) to include
    #[arg(long, value_enum, default_value = "default")]
    srs_variant: SrsVariantArg,

    /// Overwrite files that already exist
    #[arg(long)]
    overwrite: bool,

    /// Write the manifest JSON here instead of stdout
    #[arg(long)]
    manifest_out: Option<PathBuf>,

    /// Verify the target against this manifest instead of generating
    #[arg(long)]
    verify: Option<PathBuf>,
}

#[derive(Args)]
struct FairnessArgs {
    /// Counts given inline, e.g. `fairness 10 5 5`
    counts: Vec<String>,

    /// Read counts from a file instead (comma/whitespace separated)
    #[arg(long)]
    csv: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            if matches!(err.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{err}");
                return ExitCode::SUCCESS;
            }
            eprint!("{err}");
            return ExitCode::from(1);
        }
    };

    let result = match cli.command {
        Command::Analyze(args) => commands::analyze(&args),
        Command::Report(args) => commands::report(&args),
        Command::CharterCheck(args) => commands::charter_check(&args),
        Command::Simulate(args) => commands::simulate(&args),
        Command::Scaffold(args) => commands::scaffold(&args),
        Command::Fairness(args) => commands::fairness(&args),
    };

    match result {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}
