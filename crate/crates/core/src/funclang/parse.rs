use thiserror::Error;

use super::ast::{AugOp, CmpOp, Cond, Program, Stmt};
use crate::expr::{tokenize, IdentMode, Parser, Token, TokenKind};
use crate::num::Real;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {col}: {message}")]
pub struct ParseError {
    /// 1-based source line.
    pub line: usize,
    /// 1-based column in the tab-expanded line.
    pub col: usize,
    pub message: String,
}

const TAB_STOP: usize = 4;

/// One significant source line, tab-expanded and comment-stripped.
struct Line {
    number: usize,
    indent: usize,
    tokens: Vec<Token>,
    len: usize,
}

fn err(line: usize, col: usize, message: impl Into<String>) -> ParseError {
    ParseError { line, col, message: message.into() }
}

fn expand_tabs(raw: &str) -> String {
    let mut out = String::with_capacity(raw.len());
    let mut col = 0usize;
    for c in raw.chars() {
        if c == '\t' {
            let next = (col / TAB_STOP + 1) * TAB_STOP;
            while col < next {
                out.push(' ');
                col += 1;
            }
        } else {
            out.push(c);
            col += 1;
        }
    }
    out
}

fn scan_lines(src: &str) -> Result<Vec<Line>, ParseError> {
    let mut prepared: Vec<(usize, String, usize)> = Vec::new();
    for (idx, raw) in src.lines().enumerate() {
        let mut text = expand_tabs(raw);
        if let Some(hash) = text.find('#') {
            text.truncate(hash);
        }
        if text.trim().is_empty() {
            continue;
        }
        let indent = text.len() - text.trim_start_matches(' ').len();
        prepared.push((idx + 1, text, indent));
    }

    // Names that are parameters or assignment targets stay identifiers even
    // when the tokenizer would otherwise read them as a multiplication sign
    // (a bare infix `x`).
    let bound = collect_bound_names(prepared.iter().map(|(_, text, _)| text.as_str()));
    let bound: Vec<&str> = bound.iter().map(|s| s.as_str()).collect();

    let mut lines = Vec::new();
    for (number, text, indent) in prepared {
        let tokens = tokenize(&text, &bound)
            .map_err(|e| err(number, e.offset + 1, format!("unrecognized character `{}`", e.ch)))?;
        lines.push(Line { number, indent, tokens, len: text.len() });
    }
    Ok(lines)
}

/// Leading identifier of `s`, or "" if it does not start with one.
fn leading_ident(s: &str) -> &str {
    let bytes = s.as_bytes();
    if !bytes.first().is_some_and(|b| b.is_ascii_alphabetic() || *b == b'_') {
        return "";
    }
    let end = bytes
        .iter()
        .position(|b| !(b.is_ascii_alphanumeric() || *b == b'_'))
        .unwrap_or(bytes.len());
    &s[..end]
}

fn collect_bound_names<'a>(lines: impl Iterator<Item = &'a str>) -> Vec<String> {
    let mut names: Vec<String> = Vec::new();
    let mut add = |name: &str| {
        if !name.is_empty() && !names.iter().any(|n| n == name) {
            names.push(name.to_string());
        }
    };
    for line in lines {
        let line = line.trim_start();
        if let Some(rest) = line.strip_prefix("def ") {
            if let Some(open) = rest.find('(') {
                let close = rest.find(')').unwrap_or(rest.len());
                if open < close {
                    for param in rest[open + 1..close].split(',') {
                        add(leading_ident(param.trim()));
                    }
                }
            }
            continue;
        }
        let name = leading_ident(line);
        if name.is_empty() {
            continue;
        }
        let after = line[name.len()..].trim_start();
        let assigned = ["+=", "-=", "*=", "//="].iter().any(|op| after.starts_with(op))
            || (after.starts_with('=') && !after.starts_with("=="));
        if assigned {
            add(name);
        }
    }
    names
}

fn ident_text(line: &Line, idx: usize) -> Option<&str> {
    match line.tokens.get(idx) {
        Some(t) if t.kind == TokenKind::Ident => Some(&t.text),
        _ => None,
    }
}

/// Parses a function-style candidate: one `def name(params):` header and an
/// indented body built from assignments, augmented assignments, `if`/`elif`/
/// `else`, and `return`. Anything else — loops, calls, imports, further
/// definitions — is rejected, and every control path must end in `return`.
pub fn parse_program<R: Real>(src: &str) -> Result<Program<R>, ParseError> {
    let lines = scan_lines(src)?;
    let mut pos = 0usize;

    let header = match lines.first() {
        Some(line) => line,
        None => return Err(err(1, 1, "expected a function definition")),
    };
    pos += 1;
    if ident_text(header, 0) != Some("def") {
        return Err(err(header.number, header.indent + 1, "expected `def`"));
    }
    if header.indent != 0 {
        return Err(err(header.number, 1, "`def` must not be indented"));
    }
    let header_number = header.number;
    let (name, params) = parse_header::<R>(header)?;

    let body = parse_block(&lines, &mut pos, 0)?;

    if let Some(extra) = lines.get(pos) {
        let msg = if ident_text(extra, 0) == Some("def") {
            "only one function definition is allowed"
        } else {
            "unexpected statement outside the function"
        };
        return Err(err(extra.number, extra.indent + 1, msg));
    }

    if !always_returns(&body) {
        return Err(err(
            header_number,
            1,
            format!("not every control path through `{name}` returns a value"),
        ));
    }

    Ok(Program { name, params, body })
}

fn parse_header<R: Real>(line: &Line) -> Result<(String, Vec<String>), ParseError> {
    let number = line.number;
    let to_err = move |e: crate::expr::ParseError| err(number, e.offset + 1, e.message);
    let mut p = Parser::<R>::new(&line.tokens, IdentMode::Any, line.len);

    p.expect(TokenKind::Ident, "`def`").map_err(to_err)?;
    let name = p.expect(TokenKind::Ident, "a function name").map_err(to_err)?.text.clone();
    p.expect(TokenKind::LParen, "`(`").map_err(to_err)?;
    let mut params: Vec<String> = Vec::new();
    if p.peek_kind() != Some(TokenKind::RParen) {
        loop {
            let param = p.expect(TokenKind::Ident, "a parameter name").map_err(to_err)?;
            if params.contains(&param.text) {
                return Err(err(
                    number,
                    param.offset + 1,
                    format!("duplicate parameter `{}`", param.text),
                ));
            }
            params.push(param.text.clone());
            if p.peek_kind() == Some(TokenKind::Comma) {
                p.bump();
            } else {
                break;
            }
        }
    }
    p.expect(TokenKind::RParen, "`)`").map_err(to_err)?;
    p.expect(TokenKind::Colon, "`:`").map_err(to_err)?;
    p.expect_end().map_err(to_err)?;
    Ok((name, params))
}

/// Parses the block opened above `enclosing_indent`; all lines of the block
/// must share the indentation of its first line.
fn parse_block<R: Real>(
    lines: &[Line],
    pos: &mut usize,
    enclosing_indent: usize,
) -> Result<Vec<Stmt<R>>, ParseError> {
    let first = match lines.get(*pos) {
        Some(l) => l,
        None => {
            let last = lines.last().map_or(1, |l| l.number);
            return Err(err(last, 1, "expected an indented block"));
        }
    };
    if first.indent <= enclosing_indent {
        return Err(err(first.number, first.indent + 1, "expected an indented block"));
    }
    let block_indent = first.indent;

    let mut stmts = Vec::new();
    while let Some(line) = lines.get(*pos) {
        if line.indent < block_indent {
            if line.indent > enclosing_indent {
                return Err(err(line.number, line.indent + 1, "inconsistent indentation"));
            }
            break;
        }
        if line.indent > block_indent {
            return Err(err(line.number, line.indent + 1, "inconsistent indentation"));
        }
        stmts.push(parse_stmt(lines, pos)?);
    }
    Ok(stmts)
}

fn parse_stmt<R: Real>(lines: &[Line], pos: &mut usize) -> Result<Stmt<R>, ParseError> {
    let line = &lines[*pos];
    *pos += 1;
    let number = line.number;
    let indent = line.indent;
    let to_err = move |e: crate::expr::ParseError| err(number, e.offset + 1, e.message);
    let mut p = Parser::<R>::new(&line.tokens, IdentMode::Any, line.len);

    let head = match ident_text(line, 0) {
        Some(text) => text,
        None => {
            let t = &line.tokens[0];
            return Err(err(number, t.offset + 1, format!("unsupported statement `{}`", t.text)));
        }
    };

    match head {
        "if" => {
            p.bump();
            let cond = parse_cond(&mut p).map_err(to_err)?;
            p.expect(TokenKind::Colon, "`:`").map_err(to_err)?;
            p.expect_end().map_err(to_err)?;
            let block = parse_block(lines, pos, indent)?;
            let mut branches = vec![(cond, block)];
            let mut else_block = None;

            while let Some(next) = lines.get(*pos) {
                if next.indent != indent {
                    break;
                }
                match ident_text(next, 0) {
                    Some("elif") => {
                        *pos += 1;
                        let elif_number = next.number;
                        let elif_err =
                            move |e: crate::expr::ParseError| err(elif_number, e.offset + 1, e.message);
                        let mut ep = Parser::<R>::new(&next.tokens, IdentMode::Any, next.len);
                        ep.bump();
                        let cond = parse_cond(&mut ep).map_err(elif_err)?;
                        ep.expect(TokenKind::Colon, "`:`").map_err(elif_err)?;
                        ep.expect_end().map_err(elif_err)?;
                        let block = parse_block(lines, pos, indent)?;
                        branches.push((cond, block));
                    }
                    Some("else") => {
                        *pos += 1;
                        let else_number = next.number;
                        let else_err =
                            move |e: crate::expr::ParseError| err(else_number, e.offset + 1, e.message);
                        let mut ep = Parser::<R>::new(&next.tokens, IdentMode::Any, next.len);
                        ep.bump();
                        ep.expect(TokenKind::Colon, "`:`").map_err(else_err)?;
                        ep.expect_end().map_err(else_err)?;
                        else_block = Some(parse_block(lines, pos, indent)?);
                        break;
                    }
                    _ => break,
                }
            }
            Ok(Stmt::If { branches, else_block })
        }
        "return" => {
            p.bump();
            let expr = p.parse_expr().map_err(to_err)?;
            p.expect_end().map_err(to_err)?;
            Ok(Stmt::Return(expr))
        }
        "while" | "for" => Err(err(number, line.tokens[0].offset + 1, "loops are not allowed")),
        "import" | "from" => Err(err(number, line.tokens[0].offset + 1, "imports are not allowed")),
        "def" => Err(err(
            number,
            line.tokens[0].offset + 1,
            "only one function definition is allowed",
        )),
        "elif" => Err(err(number, line.tokens[0].offset + 1, "`elif` without a preceding `if`")),
        "else" => Err(err(number, line.tokens[0].offset + 1, "`else` without a preceding `if`")),
        name => {
            p.bump();
            let op = match p.peek_kind() {
                Some(TokenKind::Assign) => None,
                Some(TokenKind::PlusAssign) => Some(AugOp::Add),
                Some(TokenKind::MinusAssign) => Some(AugOp::Sub),
                Some(TokenKind::StarAssign) => Some(AugOp::Mul),
                Some(TokenKind::FloorDivAssign) => Some(AugOp::FloorDiv),
                Some(TokenKind::LParen) => {
                    return Err(err(number, p.offset() + 1, "calls are not allowed"))
                }
                _ => {
                    return Err(err(
                        number,
                        line.tokens[0].offset + 1,
                        format!("unsupported statement `{name}`"),
                    ))
                }
            };
            p.bump();
            let expr = p.parse_expr().map_err(to_err)?;
            p.expect_end().map_err(to_err)?;
            Ok(match op {
                None => Stmt::Assign(name.to_string(), expr),
                Some(op) => Stmt::AugAssign(name.to_string(), op, expr),
            })
        }
    }
}

fn parse_cond<R: Real>(p: &mut Parser<R>) -> Result<Cond<R>, crate::expr::ParseError> {
    let left = p.parse_expr()?;
    let op = match p.peek_kind() {
        Some(TokenKind::Lt) => CmpOp::Lt,
        Some(TokenKind::Le) => CmpOp::Le,
        Some(TokenKind::Gt) => CmpOp::Gt,
        Some(TokenKind::Ge) => CmpOp::Ge,
        Some(TokenKind::EqEq) => CmpOp::Eq,
        Some(TokenKind::NotEq) => CmpOp::Ne,
        _ => return Ok(Cond::Truthy(left)),
    };
    p.bump();
    let right = p.parse_expr()?;
    if matches!(
        p.peek_kind(),
        Some(
            TokenKind::Lt
                | TokenKind::Le
                | TokenKind::Gt
                | TokenKind::Ge
                | TokenKind::EqEq
                | TokenKind::NotEq
        )
    ) {
        return Err(p.error("chained comparisons are not supported"));
    }
    Ok(Cond::Compare(op, left, right))
}

/// True when every control path through the block hits a `return`.
fn always_returns<R: Real>(block: &[Stmt<R>]) -> bool {
    block.iter().any(|s| match s {
        Stmt::Return(_) => true,
        Stmt::If { branches, else_block } => {
            else_block.as_deref().is_some_and(always_returns)
                && branches.iter().all(|(_, b)| always_returns(b))
        }
        _ => false,
    })
}
