//! Deterministic replay backend: completions keyed by prompt digest.
//!
//! A fixture file is JSON Lines, one record per completion. The lookup key
//! is a sha256 over the exact prompt text and the round index, so any drift
//! in prompt construction surfaces as a fixture miss instead of a silently
//! different run.

use std::collections::HashMap;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use super::{Backend, CompletionRequest, ProviderError, StrategyKind};

/// Digest of (prompt, round), hex-encoded. Retries within a round reuse the
/// round's key, so a replayed retry returns the same completion.
pub fn fixture_key(prompt: &str, round: u64) -> String {
    let payload = serde_json::to_string(&(prompt, round)).expect("serializing a (str, u64) tuple");
    hex::encode(Sha256::digest(payload.as_bytes()))
}

/// One stored completion. `strategy` and `round` are denormalized for human
/// inspection of fixture files; lookups go through `key` alone.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixtureRecord {
    pub key: String,
    pub strategy: StrategyKind,
    pub round: u64,
    pub completion: String,
}

#[derive(Debug, Error)]
pub enum ReplayLoadError {
    #[error("cannot read fixture file: {0}")]
    Io(#[from] std::io::Error),
    #[error("fixture line {line} is not a valid record: {source}")]
    Json { line: usize, source: serde_json::Error },
    #[error("fixture line {line} repeats key {key}")]
    DuplicateKey { key: String, line: usize },
}

/// Reads a JSONL fixture file; blank lines are skipped.
pub fn load_fixtures(path: &Path) -> Result<Vec<FixtureRecord>, ReplayLoadError> {
    let text = fs::read_to_string(path)?;
    let mut records = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let record: FixtureRecord = serde_json::from_str(line)
            .map_err(|source| ReplayLoadError::Json { line: i + 1, source })?;
        records.push(record);
    }
    Ok(records)
}

/// Writes records as JSONL, one per line.
pub fn save_fixtures(path: &Path, records: &[FixtureRecord]) -> std::io::Result<()> {
    let mut out = Vec::new();
    for r in records {
        serde_json::to_writer(&mut out, r).expect("fixture records serialize");
        out.push(b'\n');
    }
    let mut f = fs::File::create(path)?;
    f.write_all(&out)
}

/// Serves completions from an in-memory key → completion map.
#[derive(Debug, Default)]
pub struct ReplayBackend {
    completions: HashMap<String, String>,
}

impl ReplayBackend {
    pub fn from_records(records: &[FixtureRecord]) -> Result<Self, ReplayLoadError> {
        let mut completions = HashMap::with_capacity(records.len());
        for (i, r) in records.iter().enumerate() {
            if completions.insert(r.key.clone(), r.completion.clone()).is_some() {
                return Err(ReplayLoadError::DuplicateKey { key: r.key.clone(), line: i + 1 });
            }
        }
        Ok(ReplayBackend { completions })
    }

    pub fn from_path(path: &Path) -> Result<Self, ReplayLoadError> {
        Self::from_records(&load_fixtures(path)?)
    }

    pub fn empty() -> Self {
        ReplayBackend { completions: HashMap::new() }
    }

    /// Registers a completion under the derived key; later inserts win.
    pub fn insert(&mut self, prompt: &str, round: u64, completion: &str) {
        self.completions.insert(fixture_key(prompt, round), completion.to_string());
    }

    pub fn len(&self) -> usize {
        self.completions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.completions.is_empty()
    }
}

impl Backend for ReplayBackend {
    fn complete(&self, req: &CompletionRequest) -> Result<String, ProviderError> {
        let round = req.seed_hint.unwrap_or(0);
        let key = fixture_key(&req.prompt, round);
        self.completions
            .get(&key)
            .cloned()
            .ok_or(ProviderError::FixtureMiss { key, round })
    }
}
