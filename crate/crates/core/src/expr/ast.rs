use std::fmt;

use crate::num::{Real, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    FloorDiv,
    Mod,
    Pow,
}

impl BinaryOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinaryOp::Add => "+",
            BinaryOp::Sub => "-",
            BinaryOp::Mul => "*",
            BinaryOp::Div => "/",
            BinaryOp::FloorDiv => "//",
            BinaryOp::Mod => "%",
            BinaryOp::Pow => "^",
        }
    }
}

/// Expression tree. `Unary` is negation; variables hold their source name
/// (single uppercase letters in algebraic candidates, arbitrary names inside
/// function bodies).
#[derive(Debug, Clone, PartialEq)]
pub enum Ast<R: Real> {
    Num(Value<R>),
    Var(String),
    Unary(Box<Ast<R>>),
    Binary(BinaryOp, Box<Ast<R>>, Box<Ast<R>>),
}

impl<R: Real> Ast<R> {
    pub fn num(v: Value<R>) -> Self {
        Ast::Num(v)
    }

    pub fn var(name: impl Into<String>) -> Self {
        Ast::Var(name.into())
    }

    pub fn neg(child: Ast<R>) -> Self {
        Ast::Unary(Box::new(child))
    }

    pub fn binary(op: BinaryOp, left: Ast<R>, right: Ast<R>) -> Self {
        Ast::Binary(op, Box::new(left), Box::new(right))
    }
}

/// Fully parenthesized canonical rendering; parsing it back yields a
/// structurally equal tree. Real literals print in `Debug` form so the
/// Int/Real tag survives the round trip ("2.0" stays Real).
pub fn format_expr<R: Real>(ast: &Ast<R>) -> String {
    ast.to_string()
}

impl<R: Real> fmt::Display for Ast<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ast::Num(Value::Int(i)) => {
                if *i < 0 {
                    // Negative literals only arise from programmatic trees;
                    // rendered as negation since the grammar has no signed
                    // literals.
                    write!(f, "({i})")
                } else {
                    write!(f, "{i}")
                }
            }
            Ast::Num(Value::Real(r)) => {
                if *r < R::zero() {
                    write!(f, "({r:?})")
                } else {
                    write!(f, "{r:?}")
                }
            }
            Ast::Var(name) => write!(f, "{name}"),
            Ast::Unary(child) => write!(f, "(-{child})"),
            Ast::Binary(op, left, right) => write!(f, "({left} {} {right})", op.symbol()),
        }
    }
}
