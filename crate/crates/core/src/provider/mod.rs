//! Prompt construction, completion backends, and candidate extraction.
//!
//! A round asks the backend for one completion per prompt strategy, then
//! pulls an analytical solution out of each raw completion: the last
//! "Answer = ..." line for the equation style, the first `def` block for the
//! function style. Completions that fail extraction or parsing are dropped
//! (logged, never fatal) — the round's retry loop compensates.

mod http;
mod replay;

pub use http::HttpBackend;
pub use replay::{fixture_key, load_fixtures, save_fixtures, FixtureRecord, ReplayBackend, ReplayLoadError};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::{parse_source, Ast};
use crate::funclang::{parse_program, Program};
use crate::num::Real;
use crate::template::AlgebraicTemplate;

/// The equation-style instruction, verbatim.
pub const EQUATION_INSTRUCTION: &str =
    "Write a mathematical equation and generate the answer format starting with 'Answer ='";
/// The function-style instruction, verbatim.
pub const FUNCTION_INSTRUCTION: &str = "Write a Python function that returns the answer.";
/// Placeholder replaced by the templated question when building a prompt.
pub const QUESTION_SLOT: &str = "{question}";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StrategyKind {
    Equation,
    Function,
}

impl StrategyKind {
    pub fn label(self) -> &'static str {
        match self {
            StrategyKind::Equation => "equation",
            StrategyKind::Function => "function",
        }
    }
}

/// One way of asking for an analytical solution: an instruction template
/// with a single slot for the templated question.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PromptStrategy {
    pub kind: StrategyKind,
    pub template: String,
}

impl PromptStrategy {
    /// Instruction then question, separated by a blank line.
    fn from_instruction(kind: StrategyKind, instruction: &str) -> Self {
        PromptStrategy { kind, template: format!("{instruction}\n\n{QUESTION_SLOT}") }
    }

    pub fn equation() -> Self {
        Self::from_instruction(StrategyKind::Equation, EQUATION_INSTRUCTION)
    }

    pub fn function() -> Self {
        Self::from_instruction(StrategyKind::Function, FUNCTION_INSTRUCTION)
    }

    /// The shipped pair: equation style then function style.
    pub fn defaults() -> Vec<Self> {
        vec![Self::equation(), Self::function()]
    }
}

/// Wire-level completion request handed to a backend.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompletionRequest {
    pub prompt: String,
    pub max_tokens: u32,
    pub temperature: f64,
    /// Round index; the replay backend keys fixtures on it so different
    /// rounds can serve different completions.
    pub seed_hint: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProviderError {
    #[error("transport failure after {attempts} attempt(s): {message}")]
    Transport { attempts: u32, message: String },
    #[error("no replay fixture for key {key} (round {round})")]
    FixtureMiss { key: String, round: u64 },
    #[error("malformed completion response: {0}")]
    MalformedResponse(String),
    #[error("backend configuration error: {0}")]
    Config(String),
}

/// A completion source. Implementations must be safe for concurrent calls.
pub trait Backend: Send + Sync {
    fn complete(&self, req: &CompletionRequest) -> Result<String, ProviderError>;
}

/// Inserts the templated question into the strategy's slot.
pub fn build_prompt<R: Real>(t: &AlgebraicTemplate<R>, s: &PromptStrategy) -> String {
    s.template.replacen(QUESTION_SLOT, t.template_text(), 1)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExtractError {
    #[error("completion has no line starting with `Answer =`")]
    NoAnswerLine,
    #[error("completion has no function definition")]
    NoFunctionFound,
}

/// Drops markdown code-fence lines, keeping everything between them.
fn strip_fences(completion: &str) -> Vec<&str> {
    completion
        .lines()
        .filter(|l| !l.trim_start().starts_with("```"))
        .collect()
}

fn answer_payload(line: &str) -> Option<&str> {
    let rest = line.trim_start().strip_prefix("Answer")?;
    let rest = rest.trim_start().strip_prefix('=')?;
    Some(rest.trim())
}

/// Pulls the expression source out of an equation-style completion: the LAST
/// line whose trimmed prefix is `Answer` `=` wins (models often restate; the
/// final statement is the committed answer). A completion that is nothing
/// but a single expression is accepted as-is, which makes extraction
/// idempotent on its own output.
pub fn extract_algebraic(completion: &str) -> Result<String, ExtractError> {
    let lines = strip_fences(completion);
    if let Some(payload) = lines.iter().rev().find_map(|l| answer_payload(l)) {
        return Ok(payload.to_string());
    }
    let mut nonempty = lines.iter().filter(|l| !l.trim().is_empty());
    if let (Some(only), None) = (nonempty.next(), nonempty.next()) {
        let only = only.trim();
        if parse_source::<f64>(only, &[]).is_ok() {
            return Ok(only.to_string());
        }
    }
    Err(ExtractError::NoAnswerLine)
}

/// Pulls the program source out of a function-style completion: from the
/// first `def ` line through the end of its indented block, dedented by the
/// `def` line's own indentation.
pub fn extract_function(completion: &str) -> Result<String, ExtractError> {
    let lines = strip_fences(completion);
    let def_at = lines
        .iter()
        .position(|l| l.trim_start().starts_with("def "))
        .ok_or(ExtractError::NoFunctionFound)?;
    let def_indent = indent_width(lines[def_at]);

    let mut block: Vec<String> = vec![lines[def_at][def_indent..].to_string()];
    for line in &lines[def_at + 1..] {
        if line.trim().is_empty() {
            block.push(String::new());
            continue;
        }
        if indent_width(line) <= def_indent {
            break;
        }
        block.push(line[def_indent.min(indent_width(line))..].to_string());
    }
    while block.last().is_some_and(|l| l.is_empty()) {
        block.pop();
    }
    Ok(block.join("\n"))
}

fn indent_width(line: &str) -> usize {
    line.len() - line.trim_start_matches([' ', '\t']).len()
}

/// A parsed analytical solution from one strategy in one round.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateSolution<R: Real> {
    pub strategy: StrategyKind,
    /// The extracted source the parse came from.
    pub source: String,
    pub parsed: Parsed<R>,
    pub origin_round: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Parsed<R: Real> {
    Expr(Ast<R>),
    Program(Program<R>),
}

/// Extracts and parses each completion; failures are logged and dropped so
/// they can never contribute a value to consensus.
pub fn parse_candidates<R: Real>(
    completions: &[(StrategyKind, String)],
    round: u64,
    bound_vars: &[&str],
) -> Vec<CandidateSolution<R>> {
    let mut out = Vec::new();
    for (kind, text) in completions {
        match parse_candidate::<R>(*kind, text, round, bound_vars) {
            Ok(c) => out.push(c),
            Err(reason) => {
                log::debug!("dropping {} candidate from round {round}: {reason}", kind.label());
            }
        }
    }
    out
}

fn parse_candidate<R: Real>(
    kind: StrategyKind,
    completion: &str,
    round: u64,
    bound_vars: &[&str],
) -> Result<CandidateSolution<R>, String> {
    match kind {
        StrategyKind::Equation => {
            let source = extract_algebraic(completion).map_err(|e| e.to_string())?;
            let ast = parse_source::<R>(&source, bound_vars).map_err(|e| e.to_string())?;
            Ok(CandidateSolution { strategy: kind, source, parsed: Parsed::Expr(ast), origin_round: round })
        }
        StrategyKind::Function => {
            let source = extract_function(completion).map_err(|e| e.to_string())?;
            let program = parse_program::<R>(&source).map_err(|e| e.to_string())?;
            Ok(CandidateSolution {
                strategy: kind,
                source,
                parsed: Parsed::Program(program),
                origin_round: round,
            })
        }
    }
}
