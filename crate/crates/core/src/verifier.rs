//! The consensus engine: randomized compute verification of candidate
//! solutions, retry on disagreement, and a majority vote across rounds.
//!
//! A round prompts each strategy once, parses the completions into
//! candidates, and checks whether all candidates agree (within tolerance) on
//! a batch of random variable assignments. Agreement makes the round's
//! answer the equation-style candidate evaluated on the question's original
//! values; disagreement re-queries with fresh completions up to the retry
//! cap. The final answer is the most frequent round answer.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::expr::eval_expr;
use crate::funclang::run_program;
use crate::num::{values_equal, EvalError, Mapping, Real, Value};
use crate::provider::{
    build_prompt, parse_candidates, Backend, CandidateSolution, CompletionRequest, Parsed,
    PromptStrategy, ProviderError, StrategyKind,
};
use crate::template::{make_template, AlgebraicTemplate, Question};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct VerifyConfig<R: Real> {
    /// Rounds the majority vote runs over.
    pub rounds: u64,
    /// Random assignments a round's candidates must agree on.
    pub assignments_per_round: usize,
    /// Fresh-completion retries after a round fails to reach consensus.
    /// May be zero: one attempt per round, no retries.
    pub max_retries_per_round: u32,
    /// Inclusive range random assignment values are drawn from.
    pub random_range: (i64, i64),
    /// Total mapping draws allowed per consensus check, counting discards.
    pub resample_cap: usize,
    /// Relative tolerance for comparing candidate values.
    pub tolerance: R,
    /// Base seed; each question derives its own stream from (seed, id).
    pub seed: u64,
    pub max_tokens: u32,
    /// Sampling temperature for round 0's first attempt.
    pub initial_temperature: f64,
    /// Sampling temperature for retries and later rounds.
    pub retry_temperature: f64,
}

impl<R: Real> Default for VerifyConfig<R> {
    fn default() -> Self {
        VerifyConfig {
            rounds: 5,
            assignments_per_round: 5,
            max_retries_per_round: 2,
            random_range: (1, 20),
            resample_cap: 100,
            tolerance: R::from_f64(1e-6).expect("1e-6 fits any float"),
            seed: 0,
            max_tokens: 256,
            initial_temperature: 0.0,
            retry_temperature: 0.5,
        }
    }
}

impl<R: Real> VerifyConfig<R> {
    pub fn validate(&self) -> Result<(), VerifyError> {
        let fail = |msg: String| Err(VerifyError::InvalidConfig(msg));
        if self.rounds < 1 {
            return fail("rounds must be at least 1".to_string());
        }
        if self.assignments_per_round < 1 {
            return fail("assignments_per_round must be at least 1".to_string());
        }
        if self.resample_cap < self.assignments_per_round {
            return fail(format!(
                "resample_cap ({}) cannot be below assignments_per_round ({})",
                self.resample_cap, self.assignments_per_round
            ));
        }
        if self.random_range.0 > self.random_range.1 {
            return fail(format!(
                "random_range [{}, {}] is empty",
                self.random_range.0, self.random_range.1
            ));
        }
        if self.tolerance <= R::zero() {
            return fail("tolerance must be positive".to_string());
        }
        for (name, t) in [
            ("initial_temperature", self.initial_temperature),
            ("retry_temperature", self.retry_temperature),
        ] {
            if !(0.0..=2.0).contains(&t) {
                return fail(format!("{name} {t} is outside [0, 2]"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("resample cap exhausted after {draws} draws without enough clean assignments")]
    ResampleExhausted { draws: usize },
}

/// Result of one consensus check over randomized assignments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct ConsensusOutcome<R: Real> {
    pub status: ConsensusStatus<R>,
    /// The retained (clean) assignments, in draw order.
    pub assignments: Vec<Mapping<R>>,
    /// `values[i][j]` is candidate `j`'s value on assignment `i`.
    pub values: Vec<Vec<Value<R>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
#[serde(bound = "")]
pub enum ConsensusStatus<R: Real> {
    /// All candidates agreed pairwise on every assignment; `common` is the
    /// shared value per assignment.
    Agreed { common: Vec<Value<R>> },
    /// First conflicting pair found, in scan order.
    Disagreed {
        assignment: usize,
        left_candidate: usize,
        right_candidate: usize,
        left_value: Value<R>,
        right_value: Value<R>,
    },
    /// Fewer than two live candidates — nothing to cross-check.
    Insufficient,
}

impl<R: Real> ConsensusOutcome<R> {
    pub fn agreed(&self) -> bool {
        matches!(self.status, ConsensusStatus::Agreed { .. })
    }
}

/// Per-question rng stream: parallel and serial batch runs see identical
/// draws because the stream depends only on (seed, question id).
pub fn derive_rng(seed: u64, question_id: &str) -> ChaCha20Rng {
    let mut hasher = Sha256::new();
    hasher.update(seed.to_le_bytes());
    hasher.update(question_id.as_bytes());
    ChaCha20Rng::from_seed(hasher.finalize().into())
}

/// Draws one uniform integer from `range` (inclusive) per variable.
pub fn random_mapping<R: Real>(
    vars: &[String],
    rng: &mut impl Rng,
    range: (i64, i64),
) -> Mapping<R> {
    vars.iter()
        .map(|v| (v.clone(), Value::Int(rng.gen_range(range.0..=range.1))))
        .collect()
}

/// Evaluates a candidate on a mapping; programs take the mapping's values as
/// positional arguments in template-variable order.
pub fn evaluate_candidate<R: Real>(
    c: &CandidateSolution<R>,
    m: &Mapping<R>,
) -> Result<Value<R>, EvalError> {
    match &c.parsed {
        Parsed::Expr(ast) => eval_expr(ast, m),
        Parsed::Program(program) => {
            let args: Vec<Value<R>> = m.iter().map(|(_, v)| v).collect();
            run_program(program, &args)
        }
    }
}

/// Draws `assignments_per_round` clean assignments and checks pairwise
/// agreement. A draw on which any candidate errors (zero divisor, arity
/// mismatch, overflow, ...) says nothing about agreement, so it is discarded
/// and redrawn; `resample_cap` bounds the total draws.
pub fn check_consensus<R: Real>(
    candidates: &[CandidateSolution<R>],
    vars: &[String],
    config: &VerifyConfig<R>,
    rng: &mut impl Rng,
) -> Result<ConsensusOutcome<R>, VerifyError> {
    if candidates.len() < 2 {
        return Ok(ConsensusOutcome {
            status: ConsensusStatus::Insufficient,
            assignments: Vec::new(),
            values: Vec::new(),
        });
    }

    let mut draws = 0;
    let mut assignments = Vec::with_capacity(config.assignments_per_round);
    let mut values: Vec<Vec<Value<R>>> = Vec::with_capacity(config.assignments_per_round);
    while assignments.len() < config.assignments_per_round {
        if draws >= config.resample_cap {
            return Err(VerifyError::ResampleExhausted { draws });
        }
        let mapping = random_mapping::<R>(vars, rng, config.random_range);
        draws += 1;
        let mut row = Vec::with_capacity(candidates.len());
        let mut discard = None;
        for (i, c) in candidates.iter().enumerate() {
            match evaluate_candidate(c, &mapping) {
                Ok(v) => row.push(v),
                Err(e) => {
                    discard = Some((i, e));
                    break;
                }
            }
        }
        if let Some((i, e)) = discard {
            log::trace!("discarding assignment {mapping}: candidate {i} failed: {e}");
            continue;
        }
        assignments.push(mapping);
        values.push(row);
    }

    for (ai, row) in values.iter().enumerate() {
        for i in 0..row.len() {
            for j in (i + 1)..row.len() {
                if !values_equal(row[i], row[j], config.tolerance) {
                    let status = ConsensusStatus::Disagreed {
                        assignment: ai,
                        left_candidate: i,
                        right_candidate: j,
                        left_value: row[i],
                        right_value: row[j],
                    };
                    return Ok(ConsensusOutcome { status, assignments, values });
                }
            }
        }
    }
    let common = values.iter().map(|row| row[0]).collect();
    Ok(ConsensusOutcome { status: ConsensusStatus::Agreed { common }, assignments, values })
}

/// One prompt→completion pair within an attempt.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExchangeRecord {
    pub strategy: StrategyKind,
    pub prompt: String,
    /// None when the backend call failed.
    pub completion: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateRecord {
    pub strategy: StrategyKind,
    pub source: String,
}

/// One prompt→verify cycle; a round re-attempts after a non-agreed outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct AttemptRecord<R: Real> {
    pub attempt: u32,
    pub temperature: f64,
    pub exchanges: Vec<ExchangeRecord>,
    pub candidates: Vec<CandidateRecord>,
    /// None when the attempt never reached the consensus check.
    pub outcome: Option<ConsensusOutcome<R>>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct RoundRecord<R: Real> {
    pub round: u64,
    pub attempts: Vec<AttemptRecord<R>>,
    /// The round's vote: set only when an attempt agreed and the chosen
    /// candidate evaluated cleanly on the original values.
    pub answer: Option<Value<R>>,
}

/// One entry in the vote tally: round answers equal within tolerance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct TallyGroup<R: Real> {
    pub representative: Value<R>,
    pub count: usize,
    /// Rounds that voted for this group, in execution order.
    pub rounds: Vec<u64>,
}

/// Full account of one solve, serializable as a single JSON record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct SolveTrace<R: Real> {
    pub id: String,
    /// The question with literals replaced by variables; None when
    /// templating failed.
    pub template: Option<String>,
    /// Original variable → value mapping.
    pub mapping: Option<Mapping<R>>,
    pub rounds: Vec<RoundRecord<R>>,
    pub tally: Vec<TallyGroup<R>>,
    #[serde(rename = "final")]
    pub final_answer: Option<Value<R>>,
    pub gold: Option<Value<R>>,
    /// None when the question carries no gold answer.
    pub correct: Option<bool>,
    /// Why no answer was produced, when `final` is None.
    pub unsolved_reason: Option<String>,
}

/// Groups round answers by numeric equality, in round order.
pub fn tally_votes<R: Real>(rounds: &[RoundRecord<R>], tolerance: R) -> Vec<TallyGroup<R>> {
    let mut groups: Vec<TallyGroup<R>> = Vec::new();
    for r in rounds {
        let Some(v) = r.answer else { continue };
        match groups.iter_mut().find(|g| values_equal(g.representative, v, tolerance)) {
            Some(g) => {
                g.count += 1;
                g.rounds.push(r.round);
            }
            None => groups.push(TallyGroup { representative: v, count: 1, rounds: vec![r.round] }),
        }
    }
    groups
}

/// The most frequent round answer. Groups arrive in earliest-round order,
/// so requiring a strictly greater count breaks ties toward the earliest.
pub fn majority<R: Real>(groups: &[TallyGroup<R>]) -> Option<Value<R>> {
    let mut best: Option<&TallyGroup<R>> = None;
    for g in groups {
        if best.map_or(true, |b| g.count > b.count) {
            best = Some(g);
        }
    }
    best.map(|g| g.representative)
}

struct RoundOutput<R: Real> {
    record: RoundRecord<R>,
    /// Set when the backend failure is deterministic (a replay fixture
    /// miss): retrying or continuing cannot change anything, so the whole
    /// solve aborts.
    fatal: Option<String>,
}

fn run_round<R: Real>(
    template: &AlgebraicTemplate<R>,
    backend: &dyn Backend,
    config: &VerifyConfig<R>,
    strategies: &[PromptStrategy],
    round: u64,
    rng: &mut impl Rng,
) -> RoundOutput<R> {
    let bound_vars = template.vars();
    let var_names: Vec<String> = bound_vars.iter().map(|v| v.to_string()).collect();
    let mut attempts = Vec::new();

    for attempt in 0..=config.max_retries_per_round {
        let temperature = if round == 0 && attempt == 0 {
            config.initial_temperature
        } else {
            config.retry_temperature
        };

        let mut exchanges = Vec::with_capacity(strategies.len());
        let mut completions = Vec::with_capacity(strategies.len());
        let mut backend_error: Option<String> = None;
        let mut fatal: Option<String> = None;
        for strategy in strategies {
            let prompt = build_prompt(template, strategy);
            let request = CompletionRequest {
                prompt: prompt.clone(),
                max_tokens: config.max_tokens,
                temperature,
                seed_hint: Some(round),
            };
            match backend.complete(&request) {
                Ok(text) => {
                    completions.push((strategy.kind, text.clone()));
                    exchanges.push(ExchangeRecord {
                        strategy: strategy.kind,
                        prompt,
                        completion: Some(text),
                    });
                }
                Err(e) => {
                    exchanges.push(ExchangeRecord { strategy: strategy.kind, prompt, completion: None });
                    let message = e.to_string();
                    if matches!(e, ProviderError::FixtureMiss { .. }) {
                        fatal = Some(message);
                        break;
                    }
                    log::warn!("round {round} attempt {attempt}: {message}");
                    backend_error = Some(message);
                }
            }
        }

        if let Some(reason) = fatal {
            attempts.push(AttemptRecord {
                attempt,
                temperature,
                exchanges,
                candidates: Vec::new(),
                outcome: None,
                error: Some(reason.clone()),
            });
            return RoundOutput {
                record: RoundRecord { round, attempts, answer: None },
                fatal: Some(reason),
            };
        }

        let candidates = parse_candidates::<R>(&completions, round, &bound_vars);
        let candidate_records = candidates
            .iter()
            .map(|c| CandidateRecord { strategy: c.strategy, source: c.source.clone() })
            .collect();

        match check_consensus(&candidates, &var_names, config, rng) {
            Err(e) => {
                attempts.push(AttemptRecord {
                    attempt,
                    temperature,
                    exchanges,
                    candidates: candidate_records,
                    outcome: None,
                    error: Some(e.to_string()),
                });
            }
            Ok(outcome) if outcome.agreed() => {
                // Substitute the original values. Prefer the equation-style
                // candidate; all candidates agree, so the preference only
                // stabilizes traces.
                let chosen = candidates
                    .iter()
                    .find(|c| c.strategy == StrategyKind::Equation)
                    .or_else(|| candidates.first())
                    .expect("agreement implies candidates");
                match evaluate_candidate(chosen, template.mapping()) {
                    Ok(answer) => {
                        attempts.push(AttemptRecord {
                            attempt,
                            temperature,
                            exchanges,
                            candidates: candidate_records,
                            outcome: Some(outcome),
                            error: None,
                        });
                        return RoundOutput {
                            record: RoundRecord { round, attempts, answer: Some(answer) },
                            fatal: None,
                        };
                    }
                    Err(e) => {
                        attempts.push(AttemptRecord {
                            attempt,
                            temperature,
                            exchanges,
                            candidates: candidate_records,
                            outcome: Some(outcome),
                            error: Some(format!("evaluating on the original values: {e}")),
                        });
                    }
                }
            }
            Ok(outcome) => {
                attempts.push(AttemptRecord {
                    attempt,
                    temperature,
                    exchanges,
                    candidates: candidate_records,
                    outcome: Some(outcome),
                    error: backend_error,
                });
            }
        }
    }

    RoundOutput { record: RoundRecord { round, attempts, answer: None }, fatal: None }
}

/// Runs the full pipeline for one question with the shipped strategy pair.
pub fn solve<R: Real>(
    question: &Question<R>,
    backend: &dyn Backend,
    config: &VerifyConfig<R>,
) -> (Option<Value<R>>, SolveTrace<R>) {
    solve_with_strategies(question, backend, config, &PromptStrategy::defaults())
}

/// As `solve`, with an explicit strategy list.
pub fn solve_with_strategies<R: Real>(
    question: &Question<R>,
    backend: &dyn Backend,
    config: &VerifyConfig<R>,
    strategies: &[PromptStrategy],
) -> (Option<Value<R>>, SolveTrace<R>) {
    let mut trace = SolveTrace {
        id: question.id.clone(),
        template: None,
        mapping: None,
        rounds: Vec::new(),
        tally: Vec::new(),
        final_answer: None,
        gold: question.gold_answer,
        correct: None,
        unsolved_reason: None,
    };

    let grade_into = |trace: &mut SolveTrace<R>| {
        trace.correct = question.gold_answer.map(|gold| {
            trace
                .final_answer
                .is_some_and(|v| values_equal(v, gold, config.tolerance))
        });
    };

    if let Err(e) = config.validate() {
        trace.unsolved_reason = Some(e.to_string());
        grade_into(&mut trace);
        return (None, trace);
    }
    let template = match make_template(question) {
        Ok(t) => t,
        Err(e) => {
            trace.unsolved_reason = Some(e.to_string());
            grade_into(&mut trace);
            return (None, trace);
        }
    };
    trace.template = Some(template.template_text().to_string());
    trace.mapping = Some(template.mapping().clone());

    let mut rng = derive_rng(config.seed, &question.id);
    let mut fatal = None;
    for round in 0..config.rounds {
        let output = run_round(&template, backend, config, strategies, round, &mut rng);
        trace.rounds.push(output.record);
        if let Some(reason) = output.fatal {
            fatal = Some(reason);
            break;
        }
    }

    trace.tally = tally_votes(&trace.rounds, config.tolerance);
    if let Some(reason) = fatal {
        trace.unsolved_reason = Some(reason);
    } else {
        trace.final_answer = majority(&trace.tally);
        if trace.final_answer.is_none() {
            trace.unsolved_reason = Some("no round reached consensus".to_string());
        }
    }
    grade_into(&mut trace);
    (trace.final_answer, trace)
}
