//! Text format for machines.
//!
//! ```text
//! machine adder;
//! tapes 0:real, 1:real, 2:real;
//! inputs 2;
//! blank '_';
//! labels start, final done;
//! start: 0 := real.add(1, 2) -> done;
//! ```
//!
//! Statements: `right N`, `left N`, `write N 'c'`, `N := fn(N, …)` (each
//! followed by `-> LABEL`), `if N is 'c' then L else L` and
//! `if fn(N, …) then L else L`. The first declared label is initial; the one
//! marked `final` is final (the last one if none is marked). `inputs`
//! defaults to 0. Without a `work` section the work alphabet is the blank
//! (default `'_'`) plus every symbol the statements use. Semicolons are
//! optional and `//` starts a comment.

mod lexer;
mod parser;
mod render;
mod validate;

use std::fmt;

use serde::Serialize;

pub use parser::parse;
pub use render::render;
pub use validate::{reachable, validate};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Location {
    pub line: usize,
    pub col: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub code: String,
    pub message: String,
    pub location: Option<Location>,
}

impl Diagnostic {
    pub fn error(code: &str, message: impl Into<String>, location: Option<Location>) -> Self {
        Self {
            severity: Severity::Error,
            code: code.into(),
            message: message.into(),
            location,
        }
    }

    pub fn warning(code: &str, message: impl Into<String>, location: Option<Location>) -> Self {
        Self {
            severity: Severity::Warning,
            ..Self::error(code, message, location)
        }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let severity = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{severity}[{}]", self.code)?;
        if let Some(at) = self.location {
            write!(f, " {}:{}", at.line, at.col)?;
        }
        write!(f, ": {}", self.message)
    }
}

/// A parsed machine with any warnings found on the way.
#[derive(Debug)]
pub struct Parsed {
    pub machine: crate::machine::Machine,
    pub warnings: Vec<Diagnostic>,
}

const RESERVED: &[&str] = &[
    "machine", "tapes", "inputs", "work", "blank", "labels", "final", "if", "then", "else", "is",
    "right", "left", "write",
];

pub fn is_reserved(word: &str) -> bool {
    RESERVED.contains(&word)
}

/// Whether `s` can be written as a label, machine or function name.
pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    chars.next().is_some_and(lexer::is_ident_start)
        && chars.all(lexer::is_ident_char)
        && !is_reserved(s)
}

#[cfg(test)]
mod tests;
