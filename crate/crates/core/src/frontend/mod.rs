//! Reading Prolog source: lexing, parsing and clause normalization.

pub(crate) mod ast;
mod lexer;
mod normalize;
mod parser;

use thiserror::Error;

pub use ast::{Assertion, Goal, PredKey, SourceClause, SourceProgram, Term};
pub use normalize::{normalize, normalize_clause, BodyAtom, Equation, FlatTerm, NormClause};
pub use parser::{parse_program, parse_term};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FrontendError {
    #[error("{line}:{col}: syntax error: {message}")]
    Syntax {
        line: usize,
        col: usize,
        message: String,
    },
    #[error("{line}:{col}: unsupported construct: {construct}")]
    Unsupported {
        construct: String,
        line: usize,
        col: usize,
    },
}

impl FrontendError {
    pub fn line(&self) -> usize {
        match self {
            FrontendError::Syntax { line, .. } | FrontendError::Unsupported { line, .. } => *line,
        }
    }
}
