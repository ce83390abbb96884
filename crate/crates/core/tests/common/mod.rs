//! Shared machinery for the integration suites: random tree and program
//! generators, an independently formulated arithmetic oracle, and the
//! builders behind the committed question/fixture files under `data/`.
//!
//! The oracle deliberately restates the numeric semantics with different
//! mechanics than the production evaluator (wide `i128` arithmetic with
//! range checks instead of checked `i64` ops, `rem_euclid`-based floor
//! operations instead of sign fixups, a multiply loop instead of
//! `checked_pow`) so a shared bug would have to be made twice.

#![allow(dead_code)]

use std::path::PathBuf;

use rand::Rng;
use rand_chacha::ChaCha20Rng;

use veriprompt::expr::{eval_expr, format_expr, Ast, BinaryOp};
use veriprompt::harness::QuestionRecord;
use veriprompt::num::EvalError;
use veriprompt::provider::{build_prompt, fixture_key, FixtureRecord, PromptStrategy, StrategyKind};
use veriprompt::template::make_template;
use veriprompt::{ExprAst, Mapping, Question, Value};

pub const VAR_POOL: [&str; 4] = ["A", "B", "C", "D"];

// ---------------------------------------------------------------------------
// Random expression trees

/// Random tree over the full operator set, drawing variables from `pool`.
/// `depth` bounds the tree height; literals are nonnegative (the grammar has
/// no signed literals, negation is a node).
pub fn gen_ast_from(rng: &mut ChaCha20Rng, depth: u32, pool: &[&str]) -> ExprAst {
    if depth == 0 || rng.gen_range(0..100) < 35 {
        return gen_leaf(rng, pool);
    }
    if rng.gen_range(0..100) < 10 {
        return ExprAst::neg(gen_ast_from(rng, depth - 1, pool));
    }
    let op = match rng.gen_range(0..100) {
        0..=21 => BinaryOp::Add,
        22..=43 => BinaryOp::Sub,
        44..=63 => BinaryOp::Mul,
        64..=75 => BinaryOp::Div,
        76..=85 => BinaryOp::FloorDiv,
        86..=95 => BinaryOp::Mod,
        _ => BinaryOp::Pow,
    };
    ExprAst::binary(
        op,
        gen_ast_from(rng, depth - 1, pool),
        gen_ast_from(rng, depth - 1, pool),
    )
}

fn gen_leaf(rng: &mut ChaCha20Rng, pool: &[&str]) -> ExprAst {
    match rng.gen_range(0..100) {
        0..=49 => ExprAst::var(pool[rng.gen_range(0..pool.len())]),
        50..=79 => ExprAst::num(Value::Int(rng.gen_range(0..=20))),
        80..=91 => ExprAst::num(Value::Int(rng.gen_range(0..=100))),
        // Two-decimal reals; any finite f64 survives the Debug print/parse
        // round trip, the rounding just keeps printed sources short.
        _ => ExprAst::num(Value::Real(rng.gen_range(0..=10_000) as f64 / 100.0)),
    }
}

pub fn gen_ast(rng: &mut ChaCha20Rng, depth: u32) -> ExprAst {
    gen_ast_from(rng, depth, &VAR_POOL)
}

/// Tree restricted to total operators (`+ - *` and negation), so every
/// evaluation succeeds. `lit_max` caps literal size to control magnitudes.
pub fn gen_total_ast(rng: &mut ChaCha20Rng, depth: u32, lit_max: i64, pool: &[&str]) -> ExprAst {
    if depth == 0 || rng.gen_range(0..100) < 35 {
        return if rng.gen_bool(0.6) {
            ExprAst::var(pool[rng.gen_range(0..pool.len())])
        } else {
            ExprAst::num(Value::Int(rng.gen_range(0..=lit_max)))
        };
    }
    if rng.gen_range(0..100) < 10 {
        return ExprAst::neg(gen_total_ast(rng, depth - 1, lit_max, pool));
    }
    let op = [BinaryOp::Add, BinaryOp::Sub, BinaryOp::Mul][rng.gen_range(0..3)];
    ExprAst::binary(
        op,
        gen_total_ast(rng, depth - 1, lit_max, pool),
        gen_total_ast(rng, depth - 1, lit_max, pool),
    )
}

/// Integer bindings for the whole pool; negatives and zeros included so the
/// floor/remainder sign rules and the division guards get exercised.
pub fn gen_bindings(rng: &mut ChaCha20Rng) -> Mapping {
    VAR_POOL
        .iter()
        .map(|v| (*v, Value::Int(rng.gen_range(-50..=50))))
        .collect()
}

// ---------------------------------------------------------------------------
// The differential oracle

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OValue {
    I(i128),
    F(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OFail {
    DivZero,
    NonFinite,
    Unbound,
}

const I64_RANGE: std::ops::RangeInclusive<i128> = (i64::MIN as i128)..=(i64::MAX as i128);

fn fits(v: i128) -> bool {
    I64_RANGE.contains(&v)
}

fn widen(v: i128) -> f64 {
    v as f64
}

fn fin(x: f64) -> Result<OValue, OFail> {
    if x.is_finite() {
        Ok(OValue::F(x))
    } else {
        Err(OFail::NonFinite)
    }
}

fn to_f(v: OValue) -> f64 {
    match v {
        OValue::I(i) => widen(i),
        OValue::F(x) => x,
    }
}

fn is_zero(v: OValue) -> bool {
    match v {
        OValue::I(i) => i == 0,
        OValue::F(x) => x == 0.0,
    }
}

/// Remainder with the divisor's sign, via Euclidean remainder.
fn floor_mod_i(a: i128, b: i128) -> i128 {
    let e = a.rem_euclid(b);
    if b < 0 && e != 0 {
        e + b
    } else {
        e
    }
}

fn floor_div_i(a: i128, b: i128) -> i128 {
    (a - floor_mod_i(a, b)) / b
}

/// Integer power by repeated multiplication; None when the result leaves the
/// `i64` range (or the exponent is too large to bother, which for |base| >= 2
/// is far past overflow anyway — 0 and ±1 are handled by the caller).
fn pow_i(base: i128, exp: i128) -> Option<i128> {
    if exp > 512 {
        return None;
    }
    let mut acc: i128 = 1;
    for _ in 0..exp {
        acc = acc.checked_mul(base)?;
    }
    fits(acc).then_some(acc)
}

/// Reference evaluation. Integer arithmetic runs wide and falls back to the
/// same `f64`-of-both-operands computation the engine uses at the exact
/// points the engine leaves `i64`, so agreement is checkable bit-for-bit on
/// the float leg and exactly on the integer leg.
pub fn oracle_eval(ast: &ExprAst, m: &Mapping) -> Result<OValue, OFail> {
    match ast {
        Ast::Num(Value::Int(i)) => Ok(OValue::I(*i as i128)),
        Ast::Num(Value::Real(r)) => Ok(OValue::F(*r)),
        Ast::Var(name) => match m.get(name) {
            Some(Value::Int(i)) => Ok(OValue::I(i as i128)),
            Some(Value::Real(r)) => Ok(OValue::F(r)),
            None => Err(OFail::Unbound),
        },
        Ast::Unary(child) => match oracle_eval(child, m)? {
            OValue::I(a) if fits(-a) => Ok(OValue::I(-a)),
            OValue::I(a) => Ok(OValue::F(-widen(a))),
            OValue::F(x) => Ok(OValue::F(-x)),
        },
        Ast::Binary(op, left, right) => {
            let l = oracle_eval(left, m)?;
            let r = oracle_eval(right, m)?;
            oracle_binary(*op, l, r)
        }
    }
}

fn oracle_binary(op: BinaryOp, l: OValue, r: OValue) -> Result<OValue, OFail> {
    use OValue::{F, I};
    match op {
        BinaryOp::Add | BinaryOp::Sub | BinaryOp::Mul => match (l, r) {
            (I(a), I(b)) => {
                // i128 cannot overflow on one step over i64-range inputs.
                let wide = match op {
                    BinaryOp::Add => a + b,
                    BinaryOp::Sub => a - b,
                    _ => a * b,
                };
                if fits(wide) {
                    Ok(I(wide))
                } else {
                    let (x, y) = (widen(a), widen(b));
                    fin(match op {
                        BinaryOp::Add => x + y,
                        BinaryOp::Sub => x - y,
                        _ => x * y,
                    })
                }
            }
            (a, b) => {
                let (x, y) = (to_f(a), to_f(b));
                fin(match op {
                    BinaryOp::Add => x + y,
                    BinaryOp::Sub => x - y,
                    _ => x * y,
                })
            }
        },
        BinaryOp::Div => {
            if is_zero(r) {
                return Err(OFail::DivZero);
            }
            match (l, r) {
                (I(a), I(b)) if a % b == 0 && fits(a / b) => Ok(I(a / b)),
                (a, b) => fin(to_f(a) / to_f(b)),
            }
        }
        BinaryOp::FloorDiv => {
            if is_zero(r) {
                return Err(OFail::DivZero);
            }
            match (l, r) {
                (I(a), I(b)) if fits(floor_div_i(a, b)) => Ok(I(floor_div_i(a, b))),
                (a, b) => fin((to_f(a) / to_f(b)).floor()),
            }
        }
        BinaryOp::Mod => {
            if is_zero(r) {
                return Err(OFail::DivZero);
            }
            match (l, r) {
                // i64::MIN % -1 is exactly 0, but the engine's checked op
                // trips there and completes in floating point; mirror that.
                (I(a), I(b)) if a == i64::MIN as i128 && b == -1 => Ok(F(0.0)),
                (I(a), I(b)) => Ok(I(floor_mod_i(a, b))),
                (a, b) => {
                    let (x, y) = (to_f(a), to_f(b));
                    let rem = x % y;
                    if rem != 0.0 && (rem < 0.0) != (y < 0.0) {
                        fin(rem + y)
                    } else {
                        fin(rem)
                    }
                }
            }
        }
        BinaryOp::Pow => match (l, r) {
            (I(a), I(b)) if b >= 0 => match pow_i(a, b) {
                Some(v) => Ok(I(v)),
                None => match a {
                    0 => Ok(I(0)),
                    1 => Ok(I(1)),
                    -1 => Ok(I(if b % 2 == 0 { 1 } else { -1 })),
                    _ => fin(widen(a).powf(widen(b))),
                },
            },
            (I(0), I(_)) => Err(OFail::DivZero),
            (I(a), I(b)) if a == 1 || a == -1 => {
                Ok(I(if a == 1 || b % 2 == 0 { 1 } else { -1 }))
            }
            (I(a), I(b)) => fin(widen(a).powf(widen(b))),
            (a, b) => {
                let (x, y) = (to_f(a), to_f(b));
                if x == 0.0 && y < 0.0 {
                    return Err(OFail::DivZero);
                }
                fin(x.powf(y))
            }
        },
    }
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * 1f64.max(a.abs()).max(b.abs())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleCase {
    IntExact,
    RealClose,
    BothErr,
}

/// Evaluates `ast` both ways and asserts agreement: exact on integers,
/// 1e-9 relative on reals, matching failure class on errors.
pub fn check_against_oracle(ast: &ExprAst, m: &Mapping) -> OracleCase {
    let got = eval_expr(ast, m);
    let want = oracle_eval(ast, m);
    match (&got, &want) {
        (Ok(Value::Int(x)), Ok(OValue::I(y))) => {
            assert_eq!(*x as i128, *y, "integer mismatch on {ast} with {m:?}");
            OracleCase::IntExact
        }
        (Ok(Value::Real(x)), Ok(OValue::F(y))) => {
            assert!(
                rel_close(*x, *y, 1e-9),
                "real mismatch on {ast} with {m:?}: {x} vs {y}"
            );
            OracleCase::RealClose
        }
        (Err(e), Err(o)) => {
            let class_matches = matches!(
                (e, o),
                (EvalError::DivisionByZero, OFail::DivZero)
                    | (EvalError::NumericOverflow, OFail::NonFinite)
                    | (EvalError::UnboundVariable(_), OFail::Unbound)
            );
            assert!(class_matches, "error class mismatch on {ast} with {m:?}: {e:?} vs {o:?}");
            OracleCase::BothErr
        }
        _ => panic!("divergence on {ast} with {m:?}: {got:?} vs {want:?}"),
    }
}

// ---------------------------------------------------------------------------
// Random straight-line programs with a known-equivalent expression

/// Replaces assigned names by their defining trees; params stay variables.
fn subst(ast: &ExprAst, env: &[(String, ExprAst)]) -> ExprAst {
    match ast {
        Ast::Num(v) => Ast::Num(*v),
        Ast::Var(n) => env
            .iter()
            .rev()
            .find(|(name, _)| name == n)
            .map(|(_, tree)| tree.clone())
            .unwrap_or_else(|| ExprAst::var(n.clone())),
        Ast::Unary(c) => ExprAst::neg(subst(c, env)),
        Ast::Binary(op, l, r) => ExprAst::binary(*op, subst(l, env), subst(r, env)),
    }
}

/// Builds a random straight-line function (assignments, augmented
/// assignments, one return) together with the expression it denotes.
///
/// Every assignment target is folded into the returned expression in
/// statement order, and plain `=` only ever introduces fresh names, so no
/// store is dead: the program and the substituted expression evaluate the
/// same operations in the same order and agree exactly — including on which
/// error fires first.
pub fn gen_program(rng: &mut ChaCha20Rng) -> (String, ExprAst) {
    let mut defined: Vec<String> = ["A", "B", "C"].map(String::from).to_vec();
    let mut env: Vec<(String, ExprAst)> = Vec::new();
    let mut targets: Vec<String> = Vec::new();
    let mut lines = vec!["def calc(A, B, C):".to_string()];

    for k in 0..rng.gen_range(0..=3u32) {
        let pool: Vec<&str> = defined.iter().map(String::as_str).collect();
        let rhs_src = gen_ast_from(rng, 3, &pool);
        let rhs = subst(&rhs_src, &env);
        if rng.gen_bool(0.3) {
            // Augmented op on an existing name; reads the current value, so
            // the previous definition stays live.
            let name = defined[rng.gen_range(0..defined.len())].clone();
            let (sym, op) = [
                ("+=", BinaryOp::Add),
                ("-=", BinaryOp::Sub),
                ("*=", BinaryOp::Mul),
                ("//=", BinaryOp::FloorDiv),
            ][rng.gen_range(0..4)];
            lines.push(format!("    {name} {sym} {}", format_expr(&rhs_src)));
            let current = subst(&ExprAst::var(name.clone()), &env);
            env.push((name.clone(), ExprAst::binary(op, current, rhs)));
            if !targets.contains(&name) {
                targets.push(name);
            }
        } else {
            let name = format!("t{k}");
            lines.push(format!("    {name} = {}", format_expr(&rhs_src)));
            env.push((name.clone(), rhs));
            defined.push(name.clone());
            targets.push(name);
        }
    }

    let pool: Vec<&str> = defined.iter().map(String::as_str).collect();
    let tail = gen_ast_from(rng, 2, &pool);
    let mut ret_src = match targets.first() {
        Some(first) => ExprAst::var(first.clone()),
        None => tail.clone(),
    };
    if !targets.is_empty() {
        let spine_ops = [BinaryOp::Add, BinaryOp::Sub, BinaryOp::Mul];
        for name in &targets[1..] {
            let op = spine_ops[rng.gen_range(0..3)];
            ret_src = ExprAst::binary(op, ret_src, ExprAst::var(name.clone()));
        }
        let op = spine_ops[rng.gen_range(0..3)];
        ret_src = ExprAst::binary(op, ret_src, tail);
    }
    lines.push(format!("    return {}", format_expr(&ret_src)));

    (lines.join("\n"), subst(&ret_src, &env))
}

// ---------------------------------------------------------------------------
// Committed data: worked examples

pub struct Example {
    pub id: &'static str,
    pub text: &'static str,
    pub gold: i64,
    pub equation: &'static str,
    pub function: &'static str,
}

/// The five end-to-end examples with hand-written completions: a fully
/// correct solve, three stylistic variants (spelled-out `x` multiplication,
/// mixed exact/real division, unusual indentation), and one where the
/// candidates reach confident consensus on a wrong answer.
pub fn worked_examples() -> Vec<Example> {
    vec![
        Example {
            id: "restaurant",
            text: "At a restaurant, each adult meal costs $5 and kids eat free. If a group of 15 people came in and 8 were kids, how much would it cost for the group to eat?",
            gold: 35,
            equation: "Answer = A*(B-C)",
            function: "def total_price(A, B, C):\n    return A * (B-C)",
        },
        Example {
            id: "adam-tickets",
            text: "At the fair Adam bought 13 tickets. After riding the ferris wheel he had 4 tickets left. If each ticket cost 9 dollars, how much money did Adam spend riding the ferris wheel?",
            gold: 81,
            equation: "Answer = C*(A-B)",
            function: "def money_spent(A, B, C):\n    return C * (A - B)",
        },
        Example {
            id: "wendy-chocolate",
            text: "Each chocolate bar in a box cost $3. If a box had 9 bars total and Wendy sold all but 3 bars, how much money would she have made?",
            gold: 18,
            equation: "Answer = A x (B - C)",
            function: "def money_made(A, B, C):\n  return (B-C)*A",
        },
        Example {
            id: "jerry-trays",
            text: "Jerry was helping the cafeteria workers pick up lunch trays, but he could only carry 8 trays at a time. If he had to pick up 9 trays from one table and 7 trays from another, how many trips will he make?",
            gold: 2,
            equation: "Answer = (B+C)/A",
            function: "def numTrips(A, B, C):\n  return (B + C) * 1.0 / A",
        },
        Example {
            id: "kaleb-candy",
            text: "Kaleb bought 14 boxes of chocolate candy and gave 5 to his little brother. If each box has 6 pieces inside it, how many pieces did Kaleb still have?",
            gold: 54,
            equation: "Answer = A*C - B",
            function: "def candy_pieces(A, B, C):\n return A*C - B",
        },
    ]
}

/// Fixture records serving `equation`/`function` for every round of one
/// question, keyed exactly as the replay backend will look them up.
pub fn fixtures_for(text: &str, equation: &str, function: &str, rounds: u64) -> Vec<FixtureRecord> {
    let template = make_template(&Question::new("fixture-gen", text)).expect("example templates");
    let mut records = Vec::new();
    for (strategy, kind, completion) in [
        (PromptStrategy::equation(), StrategyKind::Equation, equation),
        (PromptStrategy::function(), StrategyKind::Function, function),
    ] {
        let prompt = build_prompt(&template, &strategy);
        for round in 0..rounds {
            records.push(FixtureRecord {
                key: fixture_key(&prompt, round),
                strategy: kind,
                round,
                completion: completion.to_string(),
            });
        }
    }
    records
}

pub fn worked_example_records() -> Vec<QuestionRecord<f64>> {
    worked_examples()
        .iter()
        .map(|e| QuestionRecord {
            id: e.id.to_string(),
            question: e.text.to_string(),
            gold: Value::Int(e.gold),
        })
        .collect()
}

pub fn worked_example_fixtures() -> Vec<FixtureRecord> {
    worked_examples()
        .iter()
        .flat_map(|e| fixtures_for(e.text, e.equation, e.function, 5))
        .collect()
}

// ---------------------------------------------------------------------------
// Committed data: the scripted synthetic dataset

struct Scripted {
    id: &'static str,
    text: &'static str,
    gold: i64,
    equation: &'static str,
    function: &'static str,
}

/// Twenty questions scripted to land on a known report: fifteen solve
/// correctly, three reach consensus on a wrong expression, and two produce
/// completions that yield no usable candidate at all. Every question has
/// distinct wording — templating erases the numerals, so questions that
/// differ only in numbers would collide on the same prompts and fixtures.
fn scripted_questions() -> Vec<Scripted> {
    vec![
        // Fifteen solvable-correct questions over a spread of shapes.
        Scripted {
            id: "q01",
            text: "A farmer collected 12 eggs in the morning and 7 more in the evening. How many eggs did the farmer collect that day?",
            gold: 19,
            equation: "The day's count is the morning eggs plus the evening eggs.\nAnswer = A + B",
            function: "def eggs(A, B):\n    return A + B",
        },
        Scripted {
            id: "q02",
            text: "Maria had 45 stickers and gave 18 to her cousin. How many stickers does Maria have left?",
            gold: 27,
            equation: "Answer = A - B",
            function: "def stickers_left(A, B):\n    remaining = A - B\n    return remaining",
        },
        Scripted {
            id: "q03",
            text: "Each crate holds 24 bottles. How many bottles are in 6 crates?",
            gold: 144,
            equation: "```\nAnswer = A * B\n```",
            function: "```python\ndef bottles(A, B):\n    return A * B\n```",
        },
        Scripted {
            id: "q04",
            text: "A rope 96 inches long is cut into 8 equal pieces. How long is each piece?",
            gold: 12,
            equation: "Answer = A / B",
            function: "def piece_length(A, B):\n    return A / B",
        },
        Scripted {
            id: "q05",
            text: "Liam read 14 pages on Monday, 9 pages on Tuesday, and 11 pages on Wednesday. How many pages did he read in total?",
            gold: 34,
            equation: "Answer = A + B + C",
            function: "def pages(A, B, C):\n    total = A\n    total += B\n    total += C\n    return total",
        },
        Scripted {
            id: "q06",
            text: "A theater has 15 rows with 20 seats each, and 37 seats are broken. How many usable seats are there?",
            gold: 263,
            equation: "Answer = A * B - C",
            function: "def usable_seats(A, B, C):\n    return A * B - C",
        },
        Scripted {
            id: "q07",
            text: "Noah bought 3 packs of 10 trading cards and gave away 5 cards. How many cards does he keep?",
            gold: 25,
            equation: "Answer = A * B - C",
            function: "def cards(A, B, C):\n    kept = A * B\n    kept -= C\n    return kept",
        },
        Scripted {
            id: "q08",
            text: "A bakery made 60 muffins and packed them equally into 5 boxes. After selling 2 boxes, how many boxes remain?",
            gold: 3,
            equation: "Answer = B - C",
            function: "def boxes_remaining(A, B, C):\n    return B - C",
        },
        Scripted {
            id: "q09",
            text: "Ava planted 4 rows of 9 tulips. How many tulips did she plant?",
            gold: 36,
            equation: "Answer = A * B",
            function: "def tulips(A, B):\n    return A * B",
        },
        Scripted {
            id: "q10",
            text: "A school bought 7 boxes of 12 pencils and 3 boxes of 10 erasers. How many items did the school buy?",
            gold: 114,
            equation: "Answer = A * B + C * D",
            function: "def items(A, B, C, D):\n    return A * B + C * D",
        },
        Scripted {
            id: "q11",
            text: "Ethan saves 5 dollars each week. How much money will he have saved after 8 weeks if he already has 17 dollars?",
            gold: 57,
            equation: "Answer = A * B + C",
            function: "def savings(A, B, C):\n    base = A * B\n    return base + C",
        },
        Scripted {
            id: "q12",
            text: "A chef divides 72 dumplings evenly among 9 plates. How many dumplings go on each plate?",
            gold: 8,
            equation: "Answer = A / B",
            function: "def per_plate(A, B):\n    return A / B",
        },
        Scripted {
            id: "q13",
            text: "Sophia's garden has 5 rows of 6 pepper plants, and each plant grew 2 peppers. How many peppers grew in the garden?",
            gold: 60,
            equation: "Answer = A * B * C",
            function: "def peppers(A, B, C):\n    count = A * B\n    count *= C\n    return count",
        },
        Scripted {
            id: "q14",
            text: "A train ticket costs 13 dollars for each of 4 adults, and the group has a 6 dollar voucher. What do they pay?",
            gold: 46,
            equation: "Answer = A * B - C",
            function: "def fare(A, B, C):\n    return A * B - C",
        },
        Scripted {
            id: "q15",
            text: "Mia shares 36 grapes between herself and 3 friends equally. How many grapes does each person get?",
            gold: 9,
            equation: "Answer = A / (B + 1)",
            function: "def grapes_each(A, B):\n    people = B + 1\n    return A / people",
        },
        // Three questions whose candidates agree with each other on every
        // assignment and are still wrong: consensus measures consistency,
        // not correctness.
        Scripted {
            id: "q16",
            text: "Oliver had 50 marbles and lost 12 of them on the playground. How many marbles does Oliver still have?",
            gold: 38,
            equation: "Answer = A + B",
            function: "def marbles(A, B):\n    return A + B",
        },
        Scripted {
            id: "q17",
            text: "A library lent out 26 books on Friday and 14 books on Saturday. How many books were lent in total over the two days?",
            gold: 40,
            equation: "Answer = A - B",
            function: "def books(A, B):\n    return A - B",
        },
        Scripted {
            id: "q18",
            text: "Lucas packs 4 shelves with 11 jars each. How many jars did Lucas pack altogether?",
            gold: 44,
            equation: "Answer = A + B",
            function: "def jars(A, B):\n    return A + B",
        },
        // Two questions whose completions never produce a candidate: one
        // fails at extraction, one parses to rejected shapes. Both end
        // unsolved after every round.
        Scripted {
            id: "q19",
            text: "A painter mixed 3 cans of blue paint with 2 cans of yellow paint. How many cans of paint were mixed?",
            gold: 5,
            equation: "The painter clearly mixed several cans.\nIt is hard to say more without measuring.",
            function: "x = 5",
        },
        Scripted {
            id: "q20",
            text: "Harper arranged 18 chairs into 3 equal circles for the assembly. How many chairs were in each circle?",
            gold: 6,
            equation: "Answer = A circles of chairs",
            function: "def chairs(A, B):\n    while A > 0:\n        A -= B\n    return A",
        },
    ]
}

pub fn synthetic_records() -> Vec<QuestionRecord<f64>> {
    scripted_questions()
        .iter()
        .map(|s| QuestionRecord {
            id: s.id.to_string(),
            question: s.text.to_string(),
            gold: Value::Int(s.gold),
        })
        .collect()
}

pub fn synthetic_fixtures() -> Vec<FixtureRecord> {
    scripted_questions()
        .iter()
        .flat_map(|s| fixtures_for(s.text, s.equation, s.function, 5))
        .collect()
}

// ---------------------------------------------------------------------------
// Committed data: file locations and serialization

pub fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

pub fn questions_json(records: &[QuestionRecord<f64>]) -> String {
    let mut text = serde_json::to_string_pretty(records).expect("question records serialize");
    text.push('\n');
    text
}

pub fn fixtures_jsonl(records: &[FixtureRecord]) -> String {
    let mut text = String::new();
    for r in records {
        text.push_str(&serde_json::to_string(r).expect("fixture records serialize"));
        text.push('\n');
    }
    text
}
