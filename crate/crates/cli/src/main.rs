use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use stance_scope::entailment::BackendKind;
use stance_scope::pipeline::{self, IngestSummary, ReportSummary, ScoreSummary};
use stance_scope::{PipelineError, RunConfig, RunOptions};

/// Score the policy stance of central-bank documents.
#[derive(Parser)]
#[command(name = "stance-scope", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Clean and segment the documents listed in the manifest.
    Ingest(Common),
    /// Topic-gate every sentence and compute stance scores.
    Score(Common),
    /// Build time series, phase averages and t-tests.
    Report(Common),
    /// Run ingest, score and report in sequence.
    Pipeline(Common),
}

#[derive(Args)]
struct Common {
    /// Run configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Entailment threshold for both stages (overrides the config).
    #[arg(long)]
    threshold: Option<f64>,
    /// Entailment backend (overrides the config).
    #[arg(long, value_enum)]
    backend: Option<Backend>,
    /// Output directory (overrides the config).
    #[arg(long)]
    output: Option<PathBuf>,
    /// Use cached scores only; never contact the backend.
    #[arg(long)]
    offline: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Backend {
    Lexical,
    Remote,
}

fn load(common: &Common) -> Result<RunConfig, PipelineError> {
    let mut config = RunConfig::load(&common.config)?;
    if let Some(t) = common.threshold {
        config.set_threshold(t)?;
    }
    if let Some(b) = common.backend {
        config.set_backend(match b {
            Backend::Lexical => BackendKind::LexicalOracle,
            Backend::Remote => BackendKind::Remote,
        })?;
    }
    if let Some(dir) = &common.output {
        config.set_output_dir(dir.clone());
    }
    Ok(config)
}

fn print_ingest(s: &IngestSummary) {
    println!("ingested {} documents, {} sentences", s.documents, s.sentences);
    for (doc_type, (docs, sentences)) in &s.by_type {
        println!("  {doc_type}: {docs} documents, {sentences} sentences");
    }
    for (doc_id, err) in &s.failures {
        eprintln!("warning: skipped {doc_id}: {err}");
    }
}

fn print_score(s: &ScoreSummary) {
    println!(
        "scored {} documents ({} sentences); {} defined and {} undefined stance scores; {} backend batches",
        s.documents, s.sentences, s.defined_scores, s.undefined_scores, s.backend_calls
    );
    for (topic, n) in &s.topic_sentences {
        println!("  {topic}: {n} sentences");
    }
}

fn print_report(s: &ReportSummary) {
    println!(
        "report: {} series points, {} phase-summary rows, {} t-tests",
        s.series_points, s.summary_rows, s.ttests
    );
}

fn run(cli: Cli) -> Result<(), PipelineError> {
    let (common, stage) = match &cli.command {
        Command::Ingest(c) => (c, 0),
        Command::Score(c) => (c, 1),
        Command::Report(c) => (c, 2),
        Command::Pipeline(c) => (c, 3),
    };
    let config = load(common)?;
    let options = RunOptions {
        offline: common.offline,
    };
    match stage {
        0 => print_ingest(&pipeline::ingest(&config)?),
        1 => print_score(&pipeline::score(&config, options)?),
        2 => print_report(&pipeline::report(&config)?),
        _ => {
            print_ingest(&pipeline::ingest(&config)?);
            print_score(&pipeline::score(&config, options)?);
            print_report(&pipeline::report(&config)?);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
