//! The algebraic expression language: lexer, recursive-descent parser, and
//! evaluator. Equation-style candidates ("Answer = A*(B-C)") are parsed and
//! run here instead of being handed to a host-language `eval`.
//!
//! The function language reuses this lexer and the expression grammar for its
//! right-hand sides and conditions, so the token set also carries comparison,
//! assignment, and punctuation kinds that plain expressions reject.

mod ast;
mod eval;
mod parse;
mod token;

pub use ast::{format_expr, Ast, BinaryOp};
pub use eval::{eval_expr, eval_expr_flagged};
pub use parse::{parse_expression, IdentMode, ParseError, Parser};
pub use token::{tokenize, LexError, Token, TokenKind};

use crate::num::Real;
use thiserror::Error;

/// Lex or parse failure for a one-shot source parse.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExprError {
    #[error(transparent)]
    Lex(#[from] LexError),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

/// Parses expression source in strict algebraic mode (variables must be
/// single uppercase letters). `bound_vars` feeds the lexer's decision on
/// whether a standalone `x` is an identifier or multiplication.
pub fn parse_source<R: Real>(src: &str, bound_vars: &[&str]) -> Result<Ast<R>, ExprError> {
    let tokens = tokenize(src, bound_vars)?;
    Ok(parse_expression(&tokens, src.len())?)
}
