use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenKind {
    Ident,
    Number,
    Plus,
    Minus,
    Star,
    Slash,
    DoubleSlash,
    Percent,
    Caret,
    LParen,
    RParen,
    // The kinds below never appear in a well-formed plain expression; they
    // exist for the function language, which lexes statements with this lexer.
    Lt,
    Le,
    Gt,
    Ge,
    EqEq,
    NotEq,
    Assign,
    PlusAssign,
    MinusAssign,
    StarAssign,
    FloorDivAssign,
    Comma,
    Colon,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub text: String,
    /// Byte offset of the token's first character in the scanned source.
    pub offset: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unrecognized character `{ch}` at byte {offset}")]
pub struct LexError {
    pub offset: usize,
    pub ch: char,
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_continue(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

/// Maximal-munch scan. Completions write multiplication several ways; `×` is
/// always a star, and a standalone `x` is a star too when it appears in infix
/// position (right after a value) and no variable named `x` is in scope.
pub fn tokenize(src: &str, bound_vars: &[&str]) -> Result<Vec<Token>, LexError> {
    let mut tokens: Vec<Token> = Vec::new();
    let mut chars = src.char_indices().peekable();

    let push = |tokens: &mut Vec<Token>, kind, text: &str, offset| {
        tokens.push(Token { kind, text: text.to_string(), offset });
    };

    while let Some(&(offset, c)) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
            continue;
        }

        if c.is_ascii_digit() || (c == '.' && matches!(peek_second(src, offset), Some(d) if d.is_ascii_digit())) {
            let end = scan_number(src, offset);
            push(&mut tokens, TokenKind::Number, &src[offset..end], offset);
            while matches!(chars.peek(), Some(&(i, _)) if i < end) {
                chars.next();
            }
            continue;
        }

        if is_ident_start(c) {
            let mut end = offset + c.len_utf8();
            while let Some(d) = src[end..].chars().next() {
                if is_ident_continue(d) {
                    end += d.len_utf8();
                } else {
                    break;
                }
            }
            let text = &src[offset..end];
            let infix = matches!(
                tokens.last().map(|t| t.kind),
                Some(TokenKind::Number | TokenKind::Ident | TokenKind::RParen)
            );
            let kind = if text == "x" && infix && !bound_vars.contains(&"x") {
                TokenKind::Star
            } else {
                TokenKind::Ident
            };
            push(&mut tokens, kind, text, offset);
            while matches!(chars.peek(), Some(&(i, _)) if i < end) {
                chars.next();
            }
            continue;
        }

        chars.next();
        let next = chars.peek().map(|&(_, d)| d);
        let (kind, len) = match (c, next) {
            ('+', Some('=')) => (TokenKind::PlusAssign, 2),
            ('+', _) => (TokenKind::Plus, 1),
            ('-', Some('=')) => (TokenKind::MinusAssign, 2),
            ('-', _) => (TokenKind::Minus, 1),
            ('*', Some('*')) => (TokenKind::Caret, 2),
            ('*', Some('=')) => (TokenKind::StarAssign, 2),
            ('*', _) => (TokenKind::Star, 1),
            ('/', Some('/')) => {
                if src[offset + 2..].starts_with('=') {
                    (TokenKind::FloorDivAssign, 3)
                } else {
                    (TokenKind::DoubleSlash, 2)
                }
            }
            ('/', _) => (TokenKind::Slash, 1),
            ('%', _) => (TokenKind::Percent, 1),
            ('^', _) => (TokenKind::Caret, 1),
            ('(', _) => (TokenKind::LParen, 1),
            (')', _) => (TokenKind::RParen, 1),
            ('<', Some('=')) => (TokenKind::Le, 2),
            ('<', _) => (TokenKind::Lt, 1),
            ('>', Some('=')) => (TokenKind::Ge, 2),
            ('>', _) => (TokenKind::Gt, 1),
            ('=', Some('=')) => (TokenKind::EqEq, 2),
            ('=', _) => (TokenKind::Assign, 1),
            ('!', Some('=')) => (TokenKind::NotEq, 2),
            (',', _) => (TokenKind::Comma, 1),
            (':', _) => (TokenKind::Colon, 1),
            ('×', _) => (TokenKind::Star, 1),
            ('÷', _) => (TokenKind::Slash, 1),
            _ => return Err(LexError { offset, ch: c }),
        };
        let byte_len = if len == 1 { c.len_utf8() } else { len };
        for _ in 1..len {
            chars.next();
        }
        push(&mut tokens, kind, &src[offset..offset + byte_len], offset);
    }

    Ok(tokens)
}

fn peek_second(src: &str, offset: usize) -> Option<char> {
    let mut it = src[offset..].chars();
    it.next();
    it.next()
}

/// Scans digits with at most one decimal point; returns the end offset.
fn scan_number(src: &str, start: usize) -> usize {
    let mut end = start;
    let mut seen_dot = false;
    for c in src[start..].chars() {
        match c {
            '0'..='9' => end += 1,
            '.' if !seen_dot => {
                seen_dot = true;
                end += 1;
            }
            _ => break,
        }
    }
    end
}
