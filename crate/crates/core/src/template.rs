//! Turns a word problem into its algebraic template: each numeric literal is
//! replaced by a fresh variable (A, B, C, ... in document order) and the
//! original values are kept in a mapping, so candidates can be verified on
//! randomized assignments and the real answer recovered by substituting the
//! originals back.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::num::{Mapping, Real, Value};

/// A word problem to solve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct Question<R: Real> {
    pub id: String,
    pub text: String,
    pub gold_answer: Option<Value<R>>,
}

impl<R: Real> Question<R> {
    pub fn new(id: impl Into<String>, text: impl Into<String>) -> Self {
        Question { id: id.into(), text: text.into(), gold_answer: None }
    }

    pub fn with_gold(id: impl Into<String>, text: impl Into<String>, gold: Value<R>) -> Self {
        Question { id: id.into(), text: text.into(), gold_answer: Some(gold) }
    }
}

/// One numeric literal found in question text.
#[derive(Debug, Clone, PartialEq)]
pub struct NumericSpan<R: Real> {
    /// Byte range of the literal, including an absorbed currency prefix.
    pub start: usize,
    pub end: usize,
    pub literal: String,
    pub value: Value<R>,
    /// A `$` immediately before the digits is folded into the span, so the
    /// variable replaces "$5" wholesale ("costs A", not "costs $A").
    pub absorbed_prefix: Option<char>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TemplateError {
    #[error("the question contains no numeric literals")]
    NoNumbersFound,
    #[error("the question contains {0} numeric literals; at most 26 are supported")]
    TooManyVariables(usize),
    #[error("unbound variable `{0}` in substitution")]
    UnboundVariable(String),
}

/// Question text with literals replaced by variables, plus the original
/// variable values. Substitution works on recorded byte positions, never by
/// string matching, so prose that happens to contain "A" or "I" is safe.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraicTemplate<R: Real> {
    template_text: String,
    mapping: Mapping<R>,
    source: Question<R>,
    /// Byte offset of each variable token in `template_text`, mapping order.
    slots: Vec<usize>,
}

impl<R: Real> AlgebraicTemplate<R> {
    pub fn template_text(&self) -> &str {
        &self.template_text
    }

    /// Original variable -> value mapping, in first-occurrence order.
    pub fn mapping(&self) -> &Mapping<R> {
        &self.mapping
    }

    pub fn source(&self) -> &Question<R> {
        &self.source
    }

    pub fn vars(&self) -> Vec<&str> {
        self.mapping.names().collect()
    }

    /// Replaces every variable with the decimal rendering of its value in
    /// `m` (integers plain, reals in shortest round-trip form). Extra
    /// bindings are ignored; missing ones are an error.
    pub fn substitute(&self, m: &Mapping<R>) -> Result<String, TemplateError> {
        let mut out = String::with_capacity(self.template_text.len());
        let mut cursor = 0usize;
        for (&at, name) in self.slots.iter().zip(self.mapping.names()) {
            out.push_str(&self.template_text[cursor..at]);
            let v = m
                .get(name)
                .ok_or_else(|| TemplateError::UnboundVariable(name.to_string()))?;
            out.push_str(&v.to_string());
            cursor = at + name.len();
        }
        out.push_str(&self.template_text[cursor..]);
        Ok(out)
    }
}

const VAR_LETTERS: [&str; 26] = [
    "A", "B", "C", "D", "E", "F", "G", "H", "I", "J", "K", "L", "M", "N", "O", "P", "Q", "R", "S",
    "T", "U", "V", "W", "X", "Y", "Z",
];

/// Scans for maximal numeric literals: digits with optional digit-grouping
/// commas and one decimal fraction. Digits embedded in alphanumeric words
/// ("4th", "B2") are not literals. Returns spans in document order.
pub fn extract_numbers<R: Real>(text: &str) -> Vec<NumericSpan<R>> {
    let bytes = text.as_bytes();
    let mut spans = Vec::new();
    let mut i = 0usize;

    while i < bytes.len() {
        if !bytes[i].is_ascii_digit() {
            i += 1;
            continue;
        }

        // A preceding alphanumeric character makes this a word, not a number.
        let prev = text[..i].chars().next_back();
        if prev.is_some_and(|c| c.is_alphanumeric()) {
            i = skip_word(bytes, i);
            continue;
        }

        let digits_start = i;
        let mut end = i;
        while end < bytes.len() && bytes[end].is_ascii_digit() {
            end += 1;
        }
        // Digit-grouping commas: a comma followed by exactly three digits.
        while end + 4 <= bytes.len()
            && bytes[end] == b','
            && bytes[end + 1..end + 4].iter().all(u8::is_ascii_digit)
            && !bytes.get(end + 4).is_some_and(u8::is_ascii_digit)
        {
            end += 4;
        }
        // One fraction part: a dot followed by at least one digit.
        if end + 1 < bytes.len() && bytes[end] == b'.' && bytes[end + 1].is_ascii_digit() {
            end += 1;
            while end < bytes.len() && bytes[end].is_ascii_digit() {
                end += 1;
            }
        }

        // A trailing alphanumeric character also disqualifies the literal.
        if text[end..].chars().next().is_some_and(char::is_alphanumeric) {
            i = skip_word(bytes, end);
            continue;
        }

        let absorbed = prev == Some('$');
        let start = if absorbed { digits_start - 1 } else { digits_start };
        let literal = &text[start..end];
        let numeric: String = literal
            .chars()
            .filter(|c| c.is_ascii_digit() || *c == '.')
            .collect();
        let value = Value::parse(&numeric).expect("scanned literal parses");
        spans.push(NumericSpan {
            start,
            end,
            literal: literal.to_string(),
            value,
            absorbed_prefix: absorbed.then_some('$'),
        });
        i = end;
    }

    spans
}

fn skip_word(bytes: &[u8], mut i: usize) -> usize {
    while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
        i += 1;
    }
    i
}

/// Builds the algebraic template for a question: every literal becomes the
/// next unused letter; duplicated values get distinct variables.
pub fn make_template<R: Real>(q: &Question<R>) -> Result<AlgebraicTemplate<R>, TemplateError> {
    let spans = extract_numbers::<R>(&q.text);
    if spans.is_empty() {
        return Err(TemplateError::NoNumbersFound);
    }
    if spans.len() > VAR_LETTERS.len() {
        return Err(TemplateError::TooManyVariables(spans.len()));
    }

    let mut template_text = String::with_capacity(q.text.len());
    let mut mapping = Mapping::new();
    let mut slots = Vec::with_capacity(spans.len());
    let mut cursor = 0usize;
    for (span, letter) in spans.iter().zip(VAR_LETTERS) {
        template_text.push_str(&q.text[cursor..span.start]);
        slots.push(template_text.len());
        template_text.push_str(letter);
        cursor = span.end;
        mapping.set(letter, span.value);
    }
    template_text.push_str(&q.text[cursor..]);

    Ok(AlgebraicTemplate { template_text, mapping, source: q.clone(), slots })
}
