//! The `.roc` text format: a line-oriented language for nets, goal
//! graphs, component catalogs, alias maps and stored cases.

mod lexer;
mod parser;
mod printer;

use std::fmt;

pub use lexer::is_ident;

use crate::workspace::Workspace;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Severity {
    Error,
    Warning,
}

impl Severity {
    pub fn as_str(self) -> &'static str {
        match self {
            Severity::Error => "error",
            Severity::Warning => "warning",
        }
    }
}

/// A positioned parse or validation message. Lines and columns are 1-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl Diagnostic {
    pub fn error(line: usize, column: usize, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Error,
            line,
            column,
            message: message.into(),
        }
    }

    pub fn warning(line: usize, column: usize, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Warning,
            ..Diagnostic::error(line, column, message)
        }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }

    /// `file:line:col: severity: message`
    pub fn render(&self, file: &str) -> String {
        format!("{file}:{self}")
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}: {}", self.line, self.column, self.severity.as_str(), self.message)
    }
}

/// Parses and validates a document. Any error-severity diagnostic fails
/// the parse; the returned list then holds warnings too.
pub fn parse(text: &str) -> Result<Workspace, Vec<Diagnostic>> {
    match parse_with_diagnostics(text) {
        (Some(ws), _) => Ok(ws),
        (None, diags) => Err(diags),
    }
}

/// Like [`parse`], but also hands back warnings on success.
pub fn parse_with_diagnostics(text: &str) -> (Option<Workspace>, Vec<Diagnostic>) {
    let (ws, diags) = parser::parse_text(text);
    if diags.iter().any(Diagnostic::is_error) {
        (None, diags)
    } else {
        (Some(ws), diags)
    }
}

/// Canonical text for a workspace. `parse(print(ws)) == ws` for any
/// workspace whose ids are identifiers.
pub fn print(ws: &Workspace) -> String {
    printer::print(ws)
}
