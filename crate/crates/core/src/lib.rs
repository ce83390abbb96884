//! VeriPrompt: an engine that answers arithmetic word problems by rewriting
//! the question with symbolic variables, asking a completion backend for
//! several analytical solutions (an algebraic expression and a small function
//! program), checking that the candidates agree on randomized variable
//! assignments, and majority-voting the per-round answers.
//!
//! The crate is organized around the pipeline stages:
//!
//! - [`template`]: question -> algebraic template (numbers replaced by `A`, `B`, ...)
//! - [`provider`]: prompt construction, completion backends (HTTP or replay
//!   fixtures), and candidate extraction
//! - [`expr`]: the algebraic expression language (lexer, parser, evaluator)
//! - [`funclang`]: the restricted function language accepted from
//!   function-style completions (single `def`, assignments, `if`, `return`)
//! - [`verifier`]: randomized compute verification, retries, and voting
//! - [`harness`]: dataset loading, grading, batch evaluation, reports
//!
//! Numeric evaluation is generic over the real scalar via [`num::Real`]
//! (`f32` or `f64`); the exact integer leg is always `i64`. The aliases below
//! pin the pipeline to `f64`.

pub mod expr;
pub mod funclang;
pub mod harness;
pub mod num;
pub mod provider;
pub mod template;
pub mod verifier;

/// A computed value with `f64` as the real scalar.
pub type Value = num::Value<f64>;
/// An ordered variable binding with `f64` values.
pub type Mapping = num::Mapping<f64>;
/// An algebraic expression tree over `f64`.
pub type ExprAst = expr::Ast<f64>;
/// A parsed function program over `f64`.
pub type ProgramAst = funclang::Program<f64>;

/// A word problem with an optional gold answer, over `f64`.
pub type Question = template::Question<f64>;
/// A templated question plus its original variable values, over `f64`.
pub type AlgebraicTemplate = template::AlgebraicTemplate<f64>;
/// Verifier knobs (rounds, assignments, tolerance, seed), over `f64`.
pub type VerifyConfig = verifier::VerifyConfig<f64>;
/// Full per-question solve record, over `f64`.
pub type SolveTrace = verifier::SolveTrace<f64>;
/// Batch evaluation summary, over `f64`.
pub type Report = harness::Report<f64>;
