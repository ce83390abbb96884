use std::marker::PhantomData;

use thiserror::Error;

use super::ast::{Ast, BinaryOp};
use super::token::{Token, TokenKind};
use crate::num::{Real, Value};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{message} at byte {offset}")]
pub struct ParseError {
    pub offset: usize,
    pub message: String,
}

/// Which identifiers may act as variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IdentMode {
    /// Algebraic candidates: variables are single uppercase letters.
    SingleUppercase,
    /// Function bodies: any identifier (parameters and locals).
    Any,
}

/// Recursive-descent expression parser over a token slice. Precedence from
/// loosest to tightest: additive, multiplicative, unary minus, power; power
/// is right-associative, the rest left-associative.
pub struct Parser<'t, R: Real> {
    tokens: &'t [Token],
    pos: usize,
    mode: IdentMode,
    /// Error offset to report when input ends too early.
    end_offset: usize,
    _scalar: PhantomData<R>,
}

/// Parses a complete expression in strict algebraic mode, requiring every
/// token to be consumed.
pub fn parse_expression<R: Real>(
    tokens: &[Token],
    end_offset: usize,
) -> Result<Ast<R>, ParseError> {
    let mut p = Parser::new(tokens, IdentMode::SingleUppercase, end_offset);
    let ast = p.parse_expr()?;
    p.expect_end()?;
    Ok(ast)
}

impl<'t, R: Real> Parser<'t, R> {
    pub fn new(tokens: &'t [Token], mode: IdentMode, end_offset: usize) -> Self {
        Parser { tokens, pos: 0, mode, end_offset, _scalar: PhantomData }
    }

    pub fn at_end(&self) -> bool {
        self.pos >= self.tokens.len()
    }

    pub fn peek_kind(&self) -> Option<TokenKind> {
        self.tokens.get(self.pos).map(|t| t.kind)
    }

    /// Offset of the next token, or of the input end when exhausted.
    pub fn offset(&self) -> usize {
        self.tokens
            .get(self.pos)
            .map_or(self.end_offset, |t| t.offset)
    }

    pub fn bump(&mut self) -> Option<&'t Token> {
        let tok = self.tokens.get(self.pos);
        if tok.is_some() {
            self.pos += 1;
        }
        tok
    }

    pub fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError { offset: self.offset(), message: message.into() }
    }

    pub fn expect(&mut self, kind: TokenKind, what: &str) -> Result<&'t Token, ParseError> {
        match self.tokens.get(self.pos) {
            Some(t) if t.kind == kind => {
                self.pos += 1;
                Ok(t)
            }
            Some(t) => Err(ParseError {
                offset: t.offset,
                message: format!("expected {what}, found `{}`", t.text),
            }),
            None => Err(ParseError {
                offset: self.end_offset,
                message: format!("expected {what}, found end of input"),
            }),
        }
    }

    pub fn expect_end(&self) -> Result<(), ParseError> {
        match self.tokens.get(self.pos) {
            None => Ok(()),
            Some(t) => Err(ParseError {
                offset: t.offset,
                message: format!("unexpected trailing input `{}`", t.text),
            }),
        }
    }

    pub fn parse_expr(&mut self) -> Result<Ast<R>, ParseError> {
        let mut left = self.parse_term()?;
        loop {
            let op = match self.peek_kind() {
                Some(TokenKind::Plus) => BinaryOp::Add,
                Some(TokenKind::Minus) => BinaryOp::Sub,
                _ => return Ok(left),
            };
            self.bump();
            let right = self.parse_term()?;
            left = Ast::binary(op, left, right);
        }
    }

    fn parse_term(&mut self) -> Result<Ast<R>, ParseError> {
        let mut left = self.parse_unary()?;
        loop {
            let op = match self.peek_kind() {
                Some(TokenKind::Star) => BinaryOp::Mul,
                Some(TokenKind::Slash) => BinaryOp::Div,
                Some(TokenKind::DoubleSlash) => BinaryOp::FloorDiv,
                Some(TokenKind::Percent) => BinaryOp::Mod,
                _ => return Ok(left),
            };
            self.bump();
            let right = self.parse_unary()?;
            left = Ast::binary(op, left, right);
        }
    }

    fn parse_unary(&mut self) -> Result<Ast<R>, ParseError> {
        if self.peek_kind() == Some(TokenKind::Minus) {
            self.bump();
            return Ok(Ast::neg(self.parse_unary()?));
        }
        self.parse_power()
    }

    fn parse_power(&mut self) -> Result<Ast<R>, ParseError> {
        let base = self.parse_atom()?;
        if self.peek_kind() == Some(TokenKind::Caret) {
            self.bump();
            // Right-associative, and the exponent may carry its own sign.
            let exp = self.parse_unary()?;
            return Ok(Ast::binary(BinaryOp::Pow, base, exp));
        }
        Ok(base)
    }

    fn parse_atom(&mut self) -> Result<Ast<R>, ParseError> {
        match self.tokens.get(self.pos) {
            Some(t) if t.kind == TokenKind::Number => {
                self.pos += 1;
                match Value::parse(&t.text) {
                    Some(v) => Ok(Ast::Num(v)),
                    None => Err(ParseError {
                        offset: t.offset,
                        message: format!("invalid numeric literal `{}`", t.text),
                    }),
                }
            }
            Some(t) if t.kind == TokenKind::Ident => {
                self.pos += 1;
                if self.mode == IdentMode::SingleUppercase
                    && !(t.text.len() == 1 && t.text.chars().all(|c| c.is_ascii_uppercase()))
                {
                    return Err(ParseError {
                        offset: t.offset,
                        message: format!(
                            "`{}` is not a variable (single uppercase letter expected)",
                            t.text
                        ),
                    });
                }
                Ok(Ast::var(&t.text))
            }
            Some(t) if t.kind == TokenKind::LParen => {
                self.pos += 1;
                let inner = self.parse_expr()?;
                self.expect(TokenKind::RParen, "`)`")?;
                Ok(inner)
            }
            Some(t) => Err(ParseError {
                offset: t.offset,
                message: format!("expected an expression, found `{}`", t.text),
            }),
            None => Err(ParseError {
                offset: self.end_offset,
                message: "expected an expression, found end of input".to_string(),
            }),
        }
    }
}
