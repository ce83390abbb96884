use super::ast::{Ast, BinaryOp};
use crate::num::{ArithFlags, EvalError, Mapping, Real, Value};

/// Evaluates an expression under the given bindings.
pub fn eval_expr<R: Real>(ast: &Ast<R>, m: &Mapping<R>) -> Result<Value<R>, EvalError> {
    let mut flags = ArithFlags::default();
    eval_expr_flagged(ast, m, &mut flags)
}

/// As [`eval_expr`], also accumulating arithmetic side conditions (integer
/// overflow promotion, exponentiation use) into `flags`.
pub fn eval_expr_flagged<R: Real>(
    ast: &Ast<R>,
    m: &Mapping<R>,
    flags: &mut ArithFlags,
) -> Result<Value<R>, EvalError> {
    match ast {
        Ast::Num(v) => Ok(*v),
        Ast::Var(name) => m
            .get(name)
            .ok_or_else(|| EvalError::UnboundVariable(name.clone())),
        Ast::Unary(child) => eval_expr_flagged(child, m, flags)?.neg(flags),
        Ast::Binary(op, left, right) => {
            let l = eval_expr_flagged(left, m, flags)?;
            let r = eval_expr_flagged(right, m, flags)?;
            match op {
                BinaryOp::Add => l.add(r, flags),
                BinaryOp::Sub => l.sub(r, flags),
                BinaryOp::Mul => l.mul(r, flags),
                BinaryOp::Div => l.div(r, flags),
                BinaryOp::FloorDiv => l.floordiv(r, flags),
                BinaryOp::Mod => l.rem(r, flags),
                BinaryOp::Pow => l.pow(r, flags),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_source;

    type V = Value<f64>;

    fn eval(src: &str, binds: &[(&str, i64)]) -> Result<V, EvalError> {
        let ast = parse_source::<f64>(src, &binds.iter().map(|&(n, _)| n).collect::<Vec<_>>())
            .expect("test source parses");
        let m: Mapping<f64> = binds.iter().map(|&(n, v)| (n, V::Int(v))).collect();
        eval_expr(&ast, &m)
    }

    #[test]
    fn restaurant_expression_evaluates_exactly() {
        assert_eq!(
            eval("A*(B-C)", &[("A", 5), ("B", 15), ("C", 8)]).unwrap(),
            V::Int(35)
        );
    }

    #[test]
    fn exact_division_stays_integer() {
        assert_eq!(
            eval("(B+C)/A", &[("A", 8), ("B", 9), ("C", 7)]).unwrap(),
            V::Int(2)
        );
        assert_eq!(
            eval("(B+C)/A", &[("A", 8), ("B", 9), ("C", 8)]).unwrap(),
            V::Real(17.0 / 8.0)
        );
    }

    #[test]
    fn consensus_yet_wrong_expression_evaluates_to_its_own_answer() {
        assert_eq!(
            eval("A*C - B", &[("A", 14), ("B", 5), ("C", 6)]).unwrap(),
            V::Int(79)
        );
    }

    #[test]
    fn division_by_zero_is_an_error() {
        assert_eq!(
            eval("A/B", &[("A", 1), ("B", 0)]),
            Err(EvalError::DivisionByZero)
        );
    }

    #[test]
    fn unbound_variable_is_an_error() {
        assert_eq!(
            eval("A+D", &[("A", 1), ("B", 2)]),
            Err(EvalError::UnboundVariable("D".to_string()))
        );
    }

    #[test]
    fn flags_surface_overflow_and_pow() {
        let ast = parse_source::<f64>("A^B", &[]).unwrap();
        let m: Mapping<f64> = [("A", V::Int(2)), ("B", V::Int(3))].into_iter().collect();
        let mut flags = ArithFlags::default();
        assert_eq!(eval_expr_flagged(&ast, &m, &mut flags).unwrap(), V::Int(8));
        assert!(flags.pow_used);
        assert!(!flags.int_overflow);

        let ast = parse_source::<f64>("A*A", &[]).unwrap();
        let m: Mapping<f64> = [("A", V::Int(i64::MAX))].into_iter().collect();
        let mut flags = ArithFlags::default();
        let v = eval_expr_flagged(&ast, &m, &mut flags).unwrap();
        assert!(matches!(v, V::Real(_)));
        assert!(flags.int_overflow);
    }

    #[test]
    fn evaluation_is_deterministic() {
        let binds = [("A", 14), ("B", 5), ("C", 6)];
        let first = eval("A*C - B % (A - C)", &binds).unwrap();
        for _ in 0..10 {
            assert_eq!(eval("A*C - B % (A - C)", &binds).unwrap(), first);
        }
    }
}
