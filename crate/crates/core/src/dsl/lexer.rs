use super::{Diagnostic, Location};

#[derive(Clone, Debug, PartialEq, Eq)]
pub(super) enum Tok {
    Ident(String),
    Nat(usize),
    Sym(char),
    Colon,
    Assign,
    Arrow,
    Comma,
    Semi,
    LParen,
    RParen,
    Eof,
}

impl Tok {
    pub(super) fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Nat(n) => format!("`{n}`"),
            Tok::Sym(c) => format!("symbol '{c}'"),
            Tok::Colon => "`:`".into(),
            Tok::Assign => "`:=`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Semi => "`;`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Clone, Debug)]
pub(super) struct Token {
    pub tok: Tok,
    pub at: Location,
}

pub(super) fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

pub(super) fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '.'
}

pub(super) fn tokenize(src: &str) -> Result<Vec<Token>, Diagnostic> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    let advance = |i: &mut usize, line: &mut usize, col: &mut usize, n: usize| {
        for _ in 0..n {
            if chars[*i] == '\n' {
                *line += 1;
                *col = 1;
            } else {
                *col += 1;
            }
            *i += 1;
        }
    };
    while i < chars.len() {
        let c = chars[i];
        let at = Location { line, col };
        if c.is_whitespace() {
            advance(&mut i, &mut line, &mut col, 1);
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                advance(&mut i, &mut line, &mut col, 1);
            }
            continue;
        }
        let (tok, len) = match c {
            ':' if chars.get(i + 1) == Some(&'=') => (Tok::Assign, 2),
            ':' => (Tok::Colon, 1),
            '-' if chars.get(i + 1) == Some(&'>') => (Tok::Arrow, 2),
            ',' => (Tok::Comma, 1),
            ';' => (Tok::Semi, 1),
            '(' => (Tok::LParen, 1),
            ')' => (Tok::RParen, 1),
            '\'' => {
                let (sym, len) = match (chars.get(i + 1), chars.get(i + 2), chars.get(i + 3)) {
                    (Some('\\'), Some(e @ ('\'' | '\\')), Some('\'')) => (*e, 4),
                    (Some(s), Some('\''), _) if *s != '\n' && *s != '\\' => (*s, 3),
                    _ => {
                        return Err(Diagnostic::error(
                            "syntax",
                            "malformed symbol literal",
                            Some(at),
                        ))
                    }
                };
                (Tok::Sym(sym), len)
            }
            c if c.is_ascii_digit() => {
                let len = chars[i..].iter().take_while(|c| c.is_ascii_digit()).count();
                let text: String = chars[i..i + len].iter().collect();
                let n = text.parse().map_err(|_| {
                    Diagnostic::error("syntax", format!("number `{text}` is too large"), Some(at))
                })?;
                (Tok::Nat(n), len)
            }
            c if is_ident_start(c) => {
                let len = chars[i..].iter().take_while(|c| is_ident_char(**c)).count();
                (Tok::Ident(chars[i..i + len].iter().collect()), len)
            }
            other => {
                return Err(Diagnostic::error(
                    "syntax",
                    format!("unexpected character `{other}`"),
                    Some(at),
                ));
            }
        };
        out.push(Token { tok, at });
        advance(&mut i, &mut line, &mut col, len);
    }
    out.push(Token {
        tok: Tok::Eof,
        at: Location { line, col },
    });
    Ok(out)
}
