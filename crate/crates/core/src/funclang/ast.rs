use crate::expr::Ast;
use crate::num::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CmpOp {
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
            CmpOp::Eq => "==",
            CmpOp::Ne => "!=",
        }
    }
}

/// Branch condition: a single comparison, or bare-number truthiness
/// (nonzero means true).
#[derive(Debug, Clone, PartialEq)]
pub enum Cond<R: Real> {
    Compare(CmpOp, Ast<R>, Ast<R>),
    Truthy(Ast<R>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AugOp {
    Add,
    Sub,
    Mul,
    FloorDiv,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Stmt<R: Real> {
    Assign(String, Ast<R>),
    AugAssign(String, AugOp, Ast<R>),
    If {
        /// `if`/`elif` arms in order.
        branches: Vec<(Cond<R>, Vec<Stmt<R>>)>,
        else_block: Option<Vec<Stmt<R>>>,
    },
    Return(Ast<R>),
}

/// A parsed function: the single definition a function-style completion is
/// allowed to contain.
#[derive(Debug, Clone, PartialEq)]
pub struct Program<R: Real> {
    pub name: String,
    pub params: Vec<String>,
    pub body: Vec<Stmt<R>>,
}
