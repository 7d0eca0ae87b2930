use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use linguistic_decision::markov::export_dot;
use linguistic_decision::pipeline::{run_pipeline, Options, Stage};
use linguistic_decision::report;
use linguistic_decision::scenario::{Scenario, ScenarioError, Scheme};

const VALIDATION: u8 = 1;
const PARSE: u8 = 2;
const NUMERICAL: u8 = 3;

#[derive(Clone, Copy, ValueEnum)]
enum StageArg {
    Markov,
    Weights,
    Priorities,
    Aggregate,
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportArg {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemeArg {
    Power,
    Reshape,
}

/// Ranks alternatives from a multi-period, multi-expert linguistic scenario.
#[derive(Parser)]
#[command(name = "decide", version)]
struct Cli {
    /// Scenario file (JSON, "format": 1).
    scenario: PathBuf,
    /// Last stage to run.
    #[arg(long, value_enum, default_value = "all")]
    stage: StageArg,
    /// Report format written to stdout.
    #[arg(long, value_enum, default_value = "text")]
    report: ReportArg,
    /// Also write the transition network as a Graphviz DOT file.
    #[arg(long, value_name = "PATH")]
    export_dot: Option<PathBuf>,
    /// Use the printed inner-deviation constant m(m-1)/2 instead of the
    /// per-triple constant.
    #[arg(long)]
    paper_literal: bool,
    /// Period-weight scheme; defaults to the scenario's.
    #[arg(long, value_enum)]
    scheme: Option<SchemeArg>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let scenario = match Scenario::load(&cli.scenario) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(match e {
                ScenarioError::Validation(_) => VALIDATION,
                ScenarioError::Io(_) | ScenarioError::Parse { .. } => PARSE,
            });
        }
    };
    let options = Options {
        stage: match cli.stage {
            StageArg::Markov => Stage::Markov,
            StageArg::Weights => Stage::Weights,
            StageArg::Priorities => Stage::Priorities,
            StageArg::Aggregate => Stage::Aggregate,
            StageArg::All => Stage::All,
        },
        paper_literal: cli.paper_literal,
        scheme: cli.scheme.map(|s| match s {
            SchemeArg::Power => Scheme::Power,
            SchemeArg::Reshape => Scheme::Reshape,
        }),
    };
    let result = match run_pipeline(&scenario, &options) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(NUMERICAL);
        }
    };

    if let Some(path) = &cli.export_dot {
        let Some(matrix) = &result.transition_matrix else {
            eprintln!("error: no transition matrix to export (period weights are overridden)");
            return ExitCode::from(VALIDATION);
        };
        let dot = match export_dot(matrix, &scenario.attributes) {
            Ok(d) => d,
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(VALIDATION);
            }
        };
        if let Err(e) = std::fs::write(path, dot) {
            eprintln!("error: cannot write {}: {e}", path.display());
            return ExitCode::from(PARSE);
        }
    }

    match cli.report {
        ReportArg::Text => print!("{}", report::to_text(&result)),
        ReportArg::Json => print!("{}", report::to_json(&result)),
    }
    ExitCode::SUCCESS
}
