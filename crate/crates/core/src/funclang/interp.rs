use super::ast::{AugOp, CmpOp, Cond, Program, Stmt};
use crate::expr::{eval_expr_flagged, Ast};
use crate::num::{ArithFlags, EvalError, Mapping, Real, Value};

/// Defensive bound on executed statements. Without loops or calls the
/// statement count already bounds execution, so this is unreachable for
/// parsed programs.
pub const MAX_STEPS: usize = 10_000;

/// Runs a program on positional arguments.
pub fn run_program<R: Real>(p: &Program<R>, args: &[Value<R>]) -> Result<Value<R>, EvalError> {
    let mut flags = ArithFlags::default();
    run_program_flagged(p, args, &mut flags)
}

/// As [`run_program`], accumulating arithmetic side conditions into `flags`.
pub fn run_program_flagged<R: Real>(
    p: &Program<R>,
    args: &[Value<R>],
    flags: &mut ArithFlags,
) -> Result<Value<R>, EvalError> {
    if args.len() != p.params.len() {
        return Err(EvalError::ArityMismatch { expected: p.params.len(), got: args.len() });
    }
    let mut env: Mapping<R> = p
        .params
        .iter()
        .zip(args)
        .map(|(n, &v)| (n.clone(), v))
        .collect();
    let mut steps = 0usize;
    match exec_block(&p.body, &mut env, &mut steps, flags)? {
        Some(v) => Ok(v),
        None => Err(EvalError::NoReturn),
    }
}

fn eval_in_env<R: Real>(
    e: &Ast<R>,
    env: &Mapping<R>,
    flags: &mut ArithFlags,
) -> Result<Value<R>, EvalError> {
    eval_expr_flagged(e, env, flags).map_err(|err| match err {
        EvalError::UnboundVariable(n) => EvalError::UnboundName(n),
        other => other,
    })
}

fn eval_cond<R: Real>(
    cond: &Cond<R>,
    env: &Mapping<R>,
    flags: &mut ArithFlags,
) -> Result<bool, EvalError> {
    match cond {
        Cond::Truthy(e) => Ok(eval_in_env(e, env, flags)?.truthy()),
        Cond::Compare(op, l, r) => {
            let a = eval_in_env(l, env, flags)?;
            let b = eval_in_env(r, env, flags)?;
            let ord = a.compare(b);
            Ok(match op {
                CmpOp::Lt => ord.is_lt(),
                CmpOp::Le => ord.is_le(),
                CmpOp::Gt => ord.is_gt(),
                CmpOp::Ge => ord.is_ge(),
                CmpOp::Eq => ord.is_eq(),
                CmpOp::Ne => ord.is_ne(),
            })
        }
    }
}

/// Executes statements in order; `Some(value)` means a `return` fired.
fn exec_block<R: Real>(
    block: &[Stmt<R>],
    env: &mut Mapping<R>,
    steps: &mut usize,
    flags: &mut ArithFlags,
) -> Result<Option<Value<R>>, EvalError> {
    for stmt in block {
        *steps += 1;
        if *steps > MAX_STEPS {
            return Err(EvalError::StepLimit);
        }
        match stmt {
            Stmt::Assign(name, e) => {
                let v = eval_in_env(e, env, flags)?;
                env.set(name, v);
            }
            Stmt::AugAssign(name, op, e) => {
                let cur = env
                    .get(name)
                    .ok_or_else(|| EvalError::UnboundName(name.clone()))?;
                let rhs = eval_in_env(e, env, flags)?;
                let v = match op {
                    AugOp::Add => cur.add(rhs, flags)?,
                    AugOp::Sub => cur.sub(rhs, flags)?,
                    AugOp::Mul => cur.mul(rhs, flags)?,
                    AugOp::FloorDiv => cur.floordiv(rhs, flags)?,
                };
                env.set(name, v);
            }
            Stmt::If { branches, else_block } => {
                let mut taken = false;
                for (cond, arm) in branches {
                    if eval_cond(cond, env, flags)? {
                        if let Some(v) = exec_block(arm, env, steps, flags)? {
                            return Ok(Some(v));
                        }
                        taken = true;
                        break;
                    }
                }
                if !taken {
                    if let Some(arm) = else_block {
                        if let Some(v) = exec_block(arm, env, steps, flags)? {
                            return Ok(Some(v));
                        }
                    }
                }
            }
            Stmt::Return(e) => return Ok(Some(eval_in_env(e, env, flags)?)),
        }
    }
    Ok(None)
}
