//! Numeric value model shared by the expression and function interpreters.
//!
//! Arithmetic is int-preserving: operations on two `Int`s stay exact `i64`
//! wherever possible, `/` falls back to a real only when the division is
//! inexact, and checked `i64` overflow promotes the operation to the real
//! type (recorded in [`ArithFlags`]) instead of wrapping or aborting.

use std::fmt;
use std::str::FromStr;

use num_traits::{Float, FromPrimitive};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Floating-point scalar the interpreters are generic over.
pub trait Real:
    Float
    + FromPrimitive
    + FromStr
    + fmt::Display
    + fmt::Debug
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
    + 'static
{
}

impl Real for f32 {}
impl Real for f64 {}

/// Result of evaluating a candidate: exact integer or floating-point real.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
#[serde(bound = "")]
pub enum Value<R: Real> {
    Int(i64),
    Real(R),
}

/// Side conditions observed while evaluating, carried alongside the value.
#[derive(Debug, Default, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArithFlags {
    /// An integer operation overflowed i64 and was completed in floating point.
    pub int_overflow: bool,
    /// Exponentiation was exercised (never appears in the shipped prompt
    /// outputs; worth surfacing when a live provider produces it).
    pub pow_used: bool,
}

impl ArithFlags {
    pub fn merge(&mut self, other: ArithFlags) {
        self.int_overflow |= other.int_overflow;
        self.pow_used |= other.pow_used;
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("unbound name `{0}`")]
    UnboundName(String),
    #[error("numeric overflow")]
    NumericOverflow,
    #[error("arity mismatch: function takes {expected} arguments, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("execution step limit exceeded")]
    StepLimit,
    /// Unreachable for parsed programs (the parser proves every path
    /// returns); guards hand-built trees.
    #[error("function ended without returning a value")]
    NoReturn,
}

fn int_to_real<R: Real>(i: i64) -> R {
    R::from_i64(i).expect("i64 converts to any float")
}

fn finite<R: Real>(x: R) -> Result<R, EvalError> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(EvalError::NumericOverflow)
    }
}

impl<R: Real> Value<R> {
    pub fn as_real(self) -> R {
        match self {
            Value::Int(i) => int_to_real(i),
            Value::Real(r) => r,
        }
    }

    pub fn is_zero(self) -> bool {
        match self {
            Value::Int(i) => i == 0,
            Value::Real(r) => r == R::zero(),
        }
    }

    /// Nonzero numbers are true (conditional semantics of the function language).
    pub fn truthy(self) -> bool {
        !self.is_zero()
    }

    /// Parses a plain numeric literal: digits with an optional decimal point.
    /// Integer-looking literals too large for i64 fall back to the real type.
    pub fn parse(text: &str) -> Option<Self> {
        if text.is_empty() {
            return None;
        }
        if text.contains('.') {
            let r: R = text.parse().ok()?;
            r.is_finite().then_some(Value::Real(r))
        } else if let Ok(i) = text.parse::<i64>() {
            Some(Value::Int(i))
        } else {
            let r: R = text.parse().ok()?;
            r.is_finite().then_some(Value::Real(r))
        }
    }

    pub fn add(self, rhs: Self, flags: &mut ArithFlags) -> Result<Self, EvalError> {
        match (self, rhs) {
            (Value::Int(a), Value::Int(b)) => match a.checked_add(b) {
                Some(v) => Ok(Value::Int(v)),
                None => {
                    flags.int_overflow = true;
                    Ok(Value::Real(finite(int_to_real::<R>(a) + int_to_real(b))?))
                }
            },
            (a, b) => Ok(Value::Real(finite(a.as_real() + b.as_real())?)),
        }
    }

    pub fn sub(self, rhs: Self, flags: &mut ArithFlags) -> Result<Self, EvalError> {
        match (self, rhs) {
            (Value::Int(a), Value::Int(b)) => match a.checked_sub(b) {
                Some(v) => Ok(Value::Int(v)),
                None => {
                    flags.int_overflow = true;
                    Ok(Value::Real(finite(int_to_real::<R>(a) - int_to_real(b))?))
                }
            },
            (a, b) => Ok(Value::Real(finite(a.as_real() - b.as_real())?)),
        }
    }

    pub fn mul(self, rhs: Self, flags: &mut ArithFlags) -> Result<Self, EvalError> {
        match (self, rhs) {
            (Value::Int(a), Value::Int(b)) => match a.checked_mul(b) {
                Some(v) => Ok(Value::Int(v)),
                None => {
                    flags.int_overflow = true;
                    Ok(Value::Real(finite(int_to_real::<R>(a) * int_to_real(b))?))
                }
            },
            (a, b) => Ok(Value::Real(finite(a.as_real() * b.as_real())?)),
        }
    }

    /// True division: exact Int when both sides are Int and divide evenly,
    /// Real otherwise.
    pub fn div(self, rhs: Self, flags: &mut ArithFlags) -> Result<Self, EvalError> {
        if rhs.is_zero() {
            return Err(EvalError::DivisionByZero);
        }
        match (self, rhs) {
            (Value::Int(a), Value::Int(b)) => match (a.checked_div(b), a.checked_rem(b)) {
                (Some(q), Some(0)) => Ok(Value::Int(q)),
                (Some(_), Some(_)) => {
                    Ok(Value::Real(finite(int_to_real::<R>(a) / int_to_real(b))?))
                }
                // i64::MIN / -1: the exact quotient exceeds i64.
                _ => {
                    flags.int_overflow = true;
                    Ok(Value::Real(finite(int_to_real::<R>(a) / int_to_real(b))?))
                }
            },
            (a, b) => Ok(Value::Real(finite(a.as_real() / b.as_real())?)),
        }
    }

    /// Floor division; the result sign follows the divisor on inexact
    /// quotients, so both interpreters agree with each other on negatives.
    pub fn floordiv(self, rhs: Self, flags: &mut ArithFlags) -> Result<Self, EvalError> {
        if rhs.is_zero() {
            return Err(EvalError::DivisionByZero);
        }
        match (self, rhs) {
            (Value::Int(a), Value::Int(b)) => match (a.checked_div(b), a.checked_rem(b)) {
                (Some(q), Some(r)) => {
                    if r != 0 && (r < 0) != (b < 0) {
                        Ok(Value::Int(q - 1))
                    } else {
                        Ok(Value::Int(q))
                    }
                }
                _ => {
                    flags.int_overflow = true;
                    Ok(Value::Real(finite(
                        (int_to_real::<R>(a) / int_to_real(b)).floor(),
                    )?))
                }
            },
            (a, b) => Ok(Value::Real(finite((a.as_real() / b.as_real()).floor())?)),
        }
    }

    /// Floor modulo (sign follows the divisor), the companion of `floordiv`.
    pub fn rem(self, rhs: Self, flags: &mut ArithFlags) -> Result<Self, EvalError> {
        if rhs.is_zero() {
            return Err(EvalError::DivisionByZero);
        }
        match (self, rhs) {
            (Value::Int(a), Value::Int(b)) => match a.checked_rem(b) {
                Some(r) => {
                    if r != 0 && (r < 0) != (b < 0) {
                        Ok(Value::Int(r + b))
                    } else {
                        Ok(Value::Int(r))
                    }
                }
                // i64::MIN % -1 is exactly 0 but trips the checked op.
                None => {
                    flags.int_overflow = true;
                    Ok(Value::Real(R::zero()))
                }
            },
            (a, b) => {
                let (a, b) = (a.as_real(), b.as_real());
                let r = a % b;
                if r != R::zero() && (r < R::zero()) != (b < R::zero()) {
                    Ok(Value::Real(finite(r + b)?))
                } else {
                    Ok(Value::Real(finite(r)?))
                }
            }
        }
    }

    pub fn pow(self, rhs: Self, flags: &mut ArithFlags) -> Result<Self, EvalError> {
        flags.pow_used = true;
        if let (Value::Int(base), Value::Int(exp)) = (self, rhs) {
            if exp >= 0 {
                return match u32::try_from(exp).ok().and_then(|e| base.checked_pow(e)) {
                    Some(v) => Ok(Value::Int(v)),
                    None => match base {
                        0 => Ok(Value::Int(0)),
                        1 => Ok(Value::Int(1)),
                        -1 => Ok(Value::Int(if exp % 2 == 0 { 1 } else { -1 })),
                        _ => {
                            flags.int_overflow = true;
                            Ok(Value::Real(finite(
                                int_to_real::<R>(base).powf(int_to_real(exp)),
                            )?))
                        }
                    },
                };
            }
            if base == 0 {
                return Err(EvalError::DivisionByZero);
            }
            if base == 1 || base == -1 {
                return Ok(Value::Int(if base == 1 || exp % 2 == 0 { 1 } else { -1 }));
            }
            return Ok(Value::Real(finite(
                int_to_real::<R>(base).powf(int_to_real(exp)),
            )?));
        }
        let (base, exp) = (self.as_real(), rhs.as_real());
        if base == R::zero() && exp < R::zero() {
            return Err(EvalError::DivisionByZero);
        }
        Ok(Value::Real(finite(base.powf(exp))?))
    }

    pub fn neg(self, flags: &mut ArithFlags) -> Result<Self, EvalError> {
        match self {
            Value::Int(i) => match i.checked_neg() {
                Some(v) => Ok(Value::Int(v)),
                None => {
                    flags.int_overflow = true;
                    Ok(Value::Real(-int_to_real::<R>(i)))
                }
            },
            Value::Real(r) => Ok(Value::Real(-r)),
        }
    }

    /// Numeric ordering with Int promoted to the real type; used by the
    /// function language's comparison operators (exact, no tolerance).
    pub fn compare(self, rhs: Self) -> std::cmp::Ordering {
        match (self, rhs) {
            (Value::Int(a), Value::Int(b)) => a.cmp(&b),
            (a, b) => a
                .as_real()
                .partial_cmp(&b.as_real())
                .expect("evaluated values are never NaN"),
        }
    }
}

/// Equality used for consensus and grading: exact on Int/Int, relative
/// tolerance `|a - b| <= tol * max(1, |a|, |b|)` when a real is involved.
pub fn values_equal<R: Real>(a: Value<R>, b: Value<R>, tol: R) -> bool {
    match (a, b) {
        (Value::Int(x), Value::Int(y)) => x == y,
        _ => {
            let (x, y) = (a.as_real(), b.as_real());
            let scale = R::one().max(x.abs()).max(y.abs());
            (x - y).abs() <= tol * scale
        }
    }
}

impl<R: Real> fmt::Display for Value<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(i) => write!(f, "{i}"),
            Value::Real(r) => write!(f, "{r}"),
        }
    }
}

/// Ordered variable bindings; doubles as the interpreter environment.
/// Order is first-bind order, which for templates means A, B, C, ...
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
#[serde(bound = "")]
pub struct Mapping<R: Real> {
    bindings: Vec<(String, Value<R>)>,
}

impl<R: Real> Mapping<R> {
    pub fn new() -> Self {
        Mapping { bindings: Vec::new() }
    }

    pub fn get(&self, name: &str) -> Option<Value<R>> {
        self.bindings
            .iter()
            .find(|(n, _)| n == name)
            .map(|&(_, v)| v)
    }

    /// Binds `name`, replacing an existing binding in place so the original
    /// order is preserved.
    pub fn set(&mut self, name: &str, value: Value<R>) {
        match self.bindings.iter_mut().find(|(n, _)| n == name) {
            Some(slot) => slot.1 = value,
            None => self.bindings.push((name.to_string(), value)),
        }
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.bindings.iter().map(|(n, _)| n.as_str())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, Value<R>)> {
        self.bindings.iter().map(|(n, v)| (n.as_str(), *v))
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }
}

impl<R: Real> Default for Mapping<R> {
    fn default() -> Self {
        Self::new()
    }
}

impl<R: Real> FromIterator<(String, Value<R>)> for Mapping<R> {
    fn from_iter<I: IntoIterator<Item = (String, Value<R>)>>(iter: I) -> Self {
        let mut m = Mapping::new();
        for (n, v) in iter {
            m.set(&n, v);
        }
        m
    }
}

impl<'a, R: Real> FromIterator<(&'a str, Value<R>)> for Mapping<R> {
    fn from_iter<I: IntoIterator<Item = (&'a str, Value<R>)>>(iter: I) -> Self {
        iter.into_iter()
            .map(|(n, v)| (n.to_string(), v))
            .collect()
    }
}

impl<R: Real> fmt::Display for Mapping<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (n, v)) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{n}:{v}")?;
        }
        write!(f, "}}")
    }
}
