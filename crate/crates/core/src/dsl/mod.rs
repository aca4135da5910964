//! Text format for super-surfaces, metrics and binding sets.
//!
//! A file is a sequence of `[section]` headers and `key = value` lines.
//! Expressions are single-line and use `+ - *`, `^` with integer exponents,
//! `d(e, var, k)`, `inv(e)`, `hbar`, rational literals and declared names.

mod ast;
mod document;
mod elaborate;
mod lexer;
mod parser;
mod spec;

use std::fmt;

use thiserror::Error;

pub use ast::{Expr, ExprKind};
pub use document::{Document, Entry, Section};
pub use elaborate::{
    bindings, elaborate_exact, elaborate_symbolic, eval_exact, eval_symbolic, infer_parity,
    to_expr, Bindings,
};
pub use parser::parse_expr;
pub use spec::{
    Backend, BindingSet, FunctionDecl, MetricEntry, Name, ParamDecl, SurfaceSpec,
};

/// 1-based line and column.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorKind {
    Lexical,
    Syntax,
    /// Undeclared, duplicate or misplaced names.
    Declaration,
    Parity,
    /// Failures while building values (non-invertible inverse, bad binding).
    Evaluation,
    /// The metric's body matrix is singular.
    Singular,
}

impl fmt::Display for ErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ErrorKind::Lexical => "lexical error",
            ErrorKind::Syntax => "syntax error",
            ErrorKind::Declaration => "declaration error",
            ErrorKind::Parity => "parity error",
            ErrorKind::Evaluation => "evaluation error",
            ErrorKind::Singular => "singular metric",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{pos}: {kind}: {message}")]
pub struct DslError {
    pub kind: ErrorKind,
    pub pos: Pos,
    pub message: String,
}

impl DslError {
    pub fn new(kind: ErrorKind, pos: Pos, message: impl Into<String>) -> Self {
        DslError {
            kind,
            pos,
            message: message.into(),
        }
    }
}

/// Reserved words that cannot be declared.
pub const KEYWORDS: [&str; 3] = ["hbar", "d", "inv"];
