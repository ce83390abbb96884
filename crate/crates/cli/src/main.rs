//! Command-line front end: solve one question, evaluate a dataset, or
//! inspect a recorded trace.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use veriprompt::harness::{self, DatasetFormat};
use veriprompt::provider::{Backend, HttpBackend, ReplayBackend};
use veriprompt::verifier::{self, ConsensusStatus};
use veriprompt::{Question, SolveTrace, VerifyConfig};

#[derive(Parser)]
#[command(name = "veriprompt", version, about = "Verified math-prompting engine")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a single question and print the answer with its vote tally.
    Solve(SolveArgs),
    /// Evaluate a dataset and write a summary report.
    Eval(EvalArgs),
    /// Pretty-print one question's trace from a trace file.
    Inspect(InspectArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ProviderKind {
    /// Canned completions from a fixture file; fully offline.
    Replay,
    /// Live completions over HTTP (VERIPROMPT_ENDPOINT / VERIPROMPT_API_KEY).
    Http,
}

#[derive(Args)]
struct ProviderOpts {
    #[arg(long, value_enum, default_value_t = ProviderKind::Replay)]
    provider: ProviderKind,
    /// Fixture file (JSON Lines) for the replay provider.
    #[arg(long)]
    fixtures: Option<PathBuf>,
}

#[derive(Args)]
struct ConfigOpts {
    /// Base seed for the randomized verification assignments.
    #[arg(long)]
    seed: Option<u64>,
    /// Rounds to vote over.
    #[arg(long)]
    rounds: Option<u64>,
    /// Random assignments per consensus check.
    #[arg(long)]
    assignments: Option<usize>,
}

#[derive(Args)]
struct SolveArgs {
    /// The word problem, as plain text.
    #[arg(long)]
    question: String,
    #[command(flatten)]
    provider: ProviderOpts,
    #[command(flatten)]
    config: ConfigOpts,
    /// Also write the full trace (JSON Lines) here.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatKind {
    Native,
    Multiarith,
}

#[derive(Args)]
struct EvalArgs {
    /// Dataset file (a JSON array of question records).
    #[arg(long)]
    dataset: PathBuf,
    #[arg(long, value_enum, default_value_t = FormatKind::Native)]
    format: FormatKind,
    #[command(flatten)]
    provider: ProviderOpts,
    #[command(flatten)]
    config: ConfigOpts,
    /// Worker threads for fanning out questions.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Write the summary report (JSON) here.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write per-question traces (JSON Lines) here.
    #[arg(long)]
    traces: Option<PathBuf>,
}

#[derive(Args)]
struct InspectArgs {
    /// Trace file written by `solve --trace` or `eval --traces`.
    #[arg(long)]
    trace: PathBuf,
    /// Question id to show.
    #[arg(long)]
    id: String,
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve(args) => cmd_solve(args),
        Command::Eval(args) => cmd_eval(args),
        Command::Inspect(args) => cmd_inspect(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn build_backend(opts: &ProviderOpts) -> Result<(Box<dyn Backend>, String)> {
    match opts.provider {
        ProviderKind::Replay => {
            let path = opts
                .fixtures
                .as_ref()
                .context("the replay provider requires --fixtures <path>")?;
            let backend = ReplayBackend::from_path(path)
                .with_context(|| format!("loading fixtures from {}", path.display()))?;
            Ok((Box::new(backend), format!("replay:{}", path.display())))
        }
        ProviderKind::Http => {
            let backend = HttpBackend::from_env().map_err(|e| anyhow!("{e}"))?;
            Ok((Box::new(backend), "http".to_string()))
        }
    }
}

fn build_config(opts: &ConfigOpts) -> Result<VerifyConfig> {
    let mut config = VerifyConfig::default();
    if let Some(seed) = opts.seed {
        config.seed = seed;
    }
    if let Some(rounds) = opts.rounds {
        config.rounds = rounds;
    }
    if let Some(assignments) = opts.assignments {
        config.assignments_per_round = assignments;
    }
    config.validate().map_err(|e| anyhow!("{e}"))?;
    Ok(config)
}

fn cmd_solve(args: SolveArgs) -> Result<()> {
    let (backend, _) = build_backend(&args.provider)?;
    let config = build_config(&args.config)?;
    let question = Question::new("cli", args.question);
    let (answer, trace) = verifier::solve(&question, backend.as_ref(), &config);

    match answer {
        Some(v) => println!("answer = {v}"),
        None => println!(
            "answer = unsolved ({})",
            trace.unsolved_reason.as_deref().unwrap_or("no reason recorded")
        ),
    }
    println!("tally:");
    if trace.tally.is_empty() {
        println!("  (no round reached consensus)");
    }
    for group in &trace.tally {
        println!(
            "  {} — {} round(s): {:?}",
            group.representative, group.count, group.rounds
        );
    }

    if let Some(path) = args.trace {
        harness::write_traces(&path, std::slice::from_ref(&trace))
            .with_context(|| format!("writing trace to {}", path.display()))?;
    }
    Ok(())
}

fn cmd_eval(args: EvalArgs) -> Result<()> {
    let format = match args.format {
        FormatKind::Native => DatasetFormat::Native,
        FormatKind::Multiarith => DatasetFormat::MultiArith,
    };
    let records = harness::load_dataset(&args.dataset, format)
        .with_context(|| format!("loading dataset from {}", args.dataset.display()))?;
    let (backend, label) = build_backend(&args.provider)?;
    let config = build_config(&args.config)?;

    let output = harness::evaluate(&records, backend.as_ref(), &config, &label, args.jobs)?;

    // Flush all outputs before reporting success.
    if let Some(path) = &args.traces {
        harness::write_traces(path, &output.traces)
            .with_context(|| format!("writing traces to {}", path.display()))?;
    }
    if let Some(path) = &args.out {
        harness::write_report(path, &output.report)
            .with_context(|| format!("writing report to {}", path.display()))?;
    }

    let r = &output.report;
    println!(
        "questions: {}  correct: {}  unsolved: {}  accuracy: {:.4}",
        r.total, r.correct_count, r.unsolved_count, r.accuracy
    );
    Ok(())
}

fn cmd_inspect(args: InspectArgs) -> Result<()> {
    let traces: Vec<SolveTrace> = harness::load_traces(&args.trace)
        .with_context(|| format!("loading traces from {}", args.trace.display()))?;
    let trace = traces
        .iter()
        .find(|t| t.id == args.id)
        .with_context(|| format!("no trace with id {:?} in {}", args.id, args.trace.display()))?;
    print_trace(trace);
    Ok(())
}

fn indented(text: &str, prefix: &str) -> String {
    text.lines()
        .map(|l| format!("{prefix}{l}"))
        .collect::<Vec<_>>()
        .join("\n")
}

fn print_trace(trace: &SolveTrace) {
    println!("question: {}", trace.id);
    match &trace.template {
        Some(t) => println!("template: {t}"),
        None => println!("template: (templating failed)"),
    }
    if let Some(mapping) = &trace.mapping {
        println!("mapping: {mapping}");
    }

    for round in &trace.rounds {
        println!("round {}:", round.round);
        for attempt in &round.attempts {
            println!("  attempt {} (temperature {}):", attempt.attempt, attempt.temperature);
            for exchange in &attempt.exchanges {
                println!("    [{:?}] prompt:", exchange.strategy);
                println!("{}", indented(&exchange.prompt, "      | "));
                match &exchange.completion {
                    Some(c) => {
                        println!("    [{:?}] completion:", exchange.strategy);
                        println!("{}", indented(c, "      | "));
                    }
                    None => println!("    [{:?}] completion: (backend error)", exchange.strategy),
                }
            }
            for candidate in &attempt.candidates {
                println!("    candidate [{:?}]:", candidate.strategy);
                println!("{}", indented(&candidate.source, "      | "));
            }
            match &attempt.outcome {
                Some(outcome) => {
                    for (i, assignment) in outcome.assignments.iter().enumerate() {
                        let values: Vec<String> =
                            outcome.values[i].iter().map(|v| v.to_string()).collect();
                        println!("    assignment {assignment} -> [{}]", values.join(", "));
                    }
                    match &outcome.status {
                        ConsensusStatus::Agreed { .. } => println!("    consensus: agreed"),
                        ConsensusStatus::Disagreed {
                            assignment,
                            left_candidate,
                            right_candidate,
                            left_value,
                            right_value,
                        } => println!(
                            "    consensus: disagreed on assignment {assignment} (candidate {left_candidate} = {left_value}, candidate {right_candidate} = {right_value})"
                        ),
                        ConsensusStatus::Insufficient => {
                            println!("    consensus: insufficient candidates")
                        }
                    }
                }
                None => println!("    consensus: (not reached)"),
            }
            if let Some(e) = &attempt.error {
                println!("    error: {e}");
            }
        }
        match round.answer {
            Some(v) => println!("  round answer: {v}"),
            None => println!("  round answer: none"),
        }
    }

    println!("vote:");
    if trace.tally.is_empty() {
        println!("  (empty)");
    }
    for group in &trace.tally {
        println!(
            "  {} — {} round(s): {:?}",
            group.representative, group.count, group.rounds
        );
    }
    match trace.final_answer {
        Some(v) => println!("final = {v}"),
        None => println!(
            "final = unsolved ({})",
            trace.unsolved_reason.as_deref().unwrap_or("no reason recorded")
        ),
    }
    if let (Some(gold), Some(correct)) = (trace.gold, trace.correct) {
        println!("gold = {gold} ({})", if correct { "correct" } else { "incorrect" });
    }
}
