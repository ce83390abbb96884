//! Dataset ingestion, grading, batch evaluation, and report assembly.
//!
//! Two dataset formats load into the same record shape: the native format
//! (an array of `{id, question, answer}` objects) and an adapter for the
//! MultiArith benchmark's field names. Evaluation solves every record —
//! optionally across a worker pool — and produces a summary report plus one
//! trace per question.

use std::fs;
use std::io::Write as _;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::num::{values_equal, Real, Value};
use crate::provider::Backend;
use crate::template::Question;
use crate::verifier::{solve, SolveTrace, VerifyConfig, VerifyError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct QuestionRecord<R: Real> {
    pub id: String,
    pub question: String,
    #[serde(rename = "answer")]
    pub gold: Value<R>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DatasetFormat {
    Native,
    MultiArith,
}

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("cannot read dataset: {0}")]
    Io(#[from] std::io::Error),
    #[error("dataset is not a JSON array: {0}")]
    Json(#[from] serde_json::Error),
    #[error("record {index}: {reason}")]
    MalformedRecord { index: usize, reason: String },
    #[error("duplicate question id {id:?} (records {first} and {second})")]
    DuplicateId { id: String, first: usize, second: usize },
}

/// MultiArith's upstream field names.
#[derive(Deserialize)]
struct MultiArithRecord {
    #[serde(rename = "iIndex")]
    index: serde_json::Value,
    #[serde(rename = "sQuestion")]
    question: String,
    #[serde(rename = "lSolutions")]
    solutions: Vec<serde_json::Value>,
}

fn json_number<R: Real>(v: &serde_json::Value) -> Result<Value<R>, String> {
    match v {
        serde_json::Value::Number(_) => {
            serde_json::from_value(v.clone()).map_err(|e| e.to_string())
        }
        serde_json::Value::String(s) => {
            Value::parse(s.trim()).ok_or_else(|| format!("cannot parse {s:?} as a number"))
        }
        other => Err(format!("expected a number or numeric string, got {other}")),
    }
}

fn check_finite<R: Real>(gold: Value<R>) -> Result<Value<R>, String> {
    match gold {
        Value::Real(r) if !r.is_finite() => Err("gold answer is not finite".to_string()),
        v => Ok(v),
    }
}

fn parse_native<R: Real>(item: &serde_json::Value) -> Result<QuestionRecord<R>, String> {
    let record: QuestionRecord<R> =
        serde_json::from_value(item.clone()).map_err(|e| e.to_string())?;
    check_finite(record.gold)?;
    Ok(record)
}

fn parse_multiarith<R: Real>(item: &serde_json::Value) -> Result<QuestionRecord<R>, String> {
    let record: MultiArithRecord =
        serde_json::from_value(item.clone()).map_err(|e| e.to_string())?;
    let id = match &record.index {
        serde_json::Value::String(s) => s.clone(),
        serde_json::Value::Number(n) => n.to_string(),
        other => return Err(format!("iIndex must be a number or string, got {other}")),
    };
    let first = record.solutions.first().ok_or("lSolutions is empty")?;
    let gold = check_finite(json_number(first)?)?;
    Ok(QuestionRecord { id, question: record.question, gold })
}

/// Loads a dataset file, preserving record order and rejecting duplicates.
pub fn load_dataset<R: Real>(
    path: &Path,
    format: DatasetFormat,
) -> Result<Vec<QuestionRecord<R>>, DatasetError> {
    let text = fs::read_to_string(path)?;
    let raw: Vec<serde_json::Value> = serde_json::from_str(&text)?;
    let mut records = Vec::with_capacity(raw.len());
    for (index, item) in raw.iter().enumerate() {
        let record = match format {
            DatasetFormat::Native => parse_native(item),
            DatasetFormat::MultiArith => parse_multiarith(item),
        }
        .map_err(|reason| DatasetError::MalformedRecord { index, reason })?;
        records.push(record);
    }
    for (second, record) in records.iter().enumerate() {
        if let Some(first) = records[..second].iter().position(|r| r.id == record.id) {
            return Err(DatasetError::DuplicateId { id: record.id.clone(), first, second });
        }
    }
    Ok(records)
}

/// Unsolved never grades correct; otherwise numeric equality within tolerance.
pub fn grade<R: Real>(final_answer: Option<Value<R>>, gold: Value<R>, tolerance: R) -> bool {
    final_answer.is_some_and(|v| values_equal(v, gold, tolerance))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct QuestionResult<R: Real> {
    pub id: String,
    #[serde(rename = "final")]
    pub final_answer: Option<Value<R>>,
    pub gold: Value<R>,
    pub correct: bool,
    pub rounds_used: usize,
    /// Fraction of executed rounds that reached consensus.
    pub consensus_rate: f64,
    pub unsolved_reason: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct Report<R: Real> {
    pub config: VerifyConfig<R>,
    pub provider: String,
    pub results: Vec<QuestionResult<R>>,
    pub total: usize,
    pub correct_count: usize,
    /// Questions with no final answer; a subset of the incorrect ones.
    pub unsolved_count: usize,
    pub accuracy: f64,
}

#[derive(Debug)]
pub struct EvalOutput<R: Real> {
    pub report: Report<R>,
    /// One trace per record, in dataset order.
    pub traces: Vec<SolveTrace<R>>,
}

#[derive(Debug, Error)]
pub enum EvalError {
    #[error(transparent)]
    Config(#[from] VerifyError),
    #[error("cannot build worker pool: {0}")]
    Pool(String),
}

/// Solves every record and assembles the report. `jobs` > 1 fans questions
/// out over that many workers; per-question rng streams keep the outcome
/// identical to a serial run.
pub fn evaluate<R: Real>(
    records: &[QuestionRecord<R>],
    backend: &dyn Backend,
    config: &VerifyConfig<R>,
    provider_label: &str,
    jobs: usize,
) -> Result<EvalOutput<R>, EvalError> {
    config.validate()?;
    let solve_one = |r: &QuestionRecord<R>| {
        let q = Question {
            id: r.id.clone(),
            text: r.question.clone(),
            gold_answer: Some(r.gold),
        };
        solve(&q, backend, config)
    };
    let outcomes: Vec<(Option<Value<R>>, SolveTrace<R>)> = if jobs > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| EvalError::Pool(e.to_string()))?;
        pool.install(|| records.par_iter().map(solve_one).collect())
    } else {
        records.iter().map(solve_one).collect()
    };

    let mut results = Vec::with_capacity(records.len());
    let mut traces = Vec::with_capacity(records.len());
    let mut correct_count = 0;
    let mut unsolved_count = 0;
    for (record, (final_answer, trace)) in records.iter().zip(outcomes) {
        let correct = grade(final_answer, record.gold, config.tolerance);
        if correct {
            correct_count += 1;
        }
        if final_answer.is_none() {
            unsolved_count += 1;
        }
        let rounds_used = trace.rounds.len();
        let consensus_rounds = trace.rounds.iter().filter(|r| r.answer.is_some()).count();
        let consensus_rate = if rounds_used == 0 {
            0.0
        } else {
            consensus_rounds as f64 / rounds_used as f64
        };
        results.push(QuestionResult {
            id: record.id.clone(),
            final_answer,
            gold: record.gold,
            correct,
            rounds_used,
            consensus_rate,
            unsolved_reason: trace.unsolved_reason.clone(),
        });
        traces.push(trace);
    }

    let total = records.len();
    let accuracy = if total == 0 { 0.0 } else { correct_count as f64 / total as f64 };
    let report = Report {
        config: config.clone(),
        provider: provider_label.to_string(),
        results,
        total,
        correct_count,
        unsolved_count,
        accuracy,
    };
    Ok(EvalOutput { report, traces })
}

/// Writes traces as JSON Lines, one record per question.
pub fn write_traces<R: Real>(path: &Path, traces: &[SolveTrace<R>]) -> std::io::Result<()> {
    let mut out = Vec::new();
    for t in traces {
        serde_json::to_writer(&mut out, t)
            .map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidData, e))?;
        out.push(b'\n');
    }
    let mut f = fs::File::create(path)?;
    f.write_all(&out)
}

/// Reads a JSON Lines trace file back; blank lines are skipped.
pub fn load_traces<R: Real>(path: &Path) -> Result<Vec<SolveTrace<R>>, DatasetError> {
    let text = fs::read_to_string(path)?;
    let mut traces = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let trace: SolveTrace<R> = serde_json::from_str(line)
            .map_err(|e| DatasetError::MalformedRecord { index: i, reason: e.to_string() })?;
        traces.push(trace);
    }
    Ok(traces)
}

/// Writes the summary report as a single pretty-printed JSON document.
pub fn write_report<R: Real>(path: &Path, report: &Report<R>) -> std::io::Result<()> {
    let text = serde_json::to_string_pretty(report)
        .map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidData, e))?;
    fs::write(path, text + "\n")
}
