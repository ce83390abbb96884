//! "FuncLang": the restricted imperative language accepted from
//! function-style completions. A program is a single `def` with an indented
//! body of assignments, augmented assignments, `if`/`elif`/`else`, and
//! `return` — exactly the shapes those completions produce and nothing that
//! could make running untrusted output unsafe (no loops, calls, imports, or
//! attribute access). Arithmetic reuses the expression language's value
//! rules, so both interpreters agree on every shared input.

mod ast;
mod interp;
mod parse;

pub use ast::{AugOp, CmpOp, Cond, Program, Stmt};
pub use interp::{run_program, run_program_flagged, MAX_STEPS};
pub use parse::{parse_program, ParseError};
