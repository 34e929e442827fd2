//! Text format for control problems (lexer, parser, pretty-printer) and
//! report serialization.
//!
//! The format is a small declarative DSL: `plant` blocks declare states,
//! marked/initial states, event lists split by controllability, and
//! transitions; `requirement` lines state which condition must hold for an
//! event to be allowed. Files use the `.dcp` extension, UTF-8, LF or CRLF;
//! canonical output is LF.
//!
//! Parsing is total: every input yields either a problem or at least one
//! error diagnostic, never a panic. Names may not be the reserved words
//! (`plant`, `states`, `marked`, `initial`, `controllable`,
//! `uncontrollable`, `trans`, `requirement`, `needs`, `or`, `and`, `not`);
//! `T` and `F` act as the constant literals inside conditions but stay legal
//! as ordinary names elsewhere.

mod lexer;
mod parser;
mod printer;
mod report;

pub use parser::parse_model;
pub use printer::{export_supervisor, pretty_print};
pub use report::{
    emit_report, ClassSummary, ReductionSummary, ReportFormat, RunReport, SynthesisRow,
};

use serde::Serialize;

/// Byte range in the source text plus the 1-based line/column of its start.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
    pub line: usize,
    pub column: usize,
}

impl Span {
    pub(crate) fn new(start: usize, end: usize, line: usize, column: usize) -> Self {
        Span { start, end, line, column }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
    Info,
}

impl std::fmt::Display for Severity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Severity::Error => write!(f, "error"),
            Severity::Warning => write!(f, "warning"),
            Severity::Info => write!(f, "info"),
        }
    }
}

/// One parser or validator finding, tied to a source span and a stable code.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub span: Span,
    pub code: String,
    pub message: String,
}

impl Diagnostic {
    pub(crate) fn new(
        severity: Severity,
        span: Span,
        code: &str,
        message: impl Into<String>,
    ) -> Self {
        Diagnostic { severity, span, code: code.to_string(), message: message.into() }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl std::fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{}[{}] {}:{}: {}",
            self.severity, self.code, self.span.line, self.span.column, self.message
        )
    }
}

/// Result of [`parse_model`]: a problem exactly when no error-severity
/// diagnostic was produced; info/warning diagnostics may accompany a
/// successful parse.
#[derive(Debug)]
pub struct ParseOutcome {
    pub problem: Option<crate::problem::ControlProblem>,
    pub diagnostics: Vec<Diagnostic>,
}

impl ParseOutcome {
    pub fn has_errors(&self) -> bool {
        self.diagnostics.iter().any(Diagnostic::is_error)
    }

    /// The problem, or every diagnostic when errors prevented construction.
    pub fn into_result(self) -> Result<crate::problem::ControlProblem, Vec<Diagnostic>> {
        match self.problem {
            Some(cp) => Ok(cp),
            None => Err(self.diagnostics),
        }
    }
}
