//! Source text to inferred modes, with per-phase timings.

use std::time::{Duration, Instant};

use thiserror::Error;

use crate::abstraction::{abstract_source, AbstractProgram, AbstractionError, AbstractionOptions, BuiltinTable, PredKind};
use crate::fixpoint::{analyze, gfp, lfp, AnalysisResult, FixpointOptions};
use crate::frontend::{parse_program, FrontendError, PredKey, SourceProgram};
use crate::pos::BoolFn;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AnalysisError {
    #[error(transparent)]
    Frontend(#[from] FrontendError),
    #[error(transparent)]
    Abstraction(#[from] AbstractionError),
}

impl AnalysisError {
    pub fn line(&self) -> Option<usize> {
        match self {
            AnalysisError::Frontend(e) => Some(e.line()),
            AnalysisError::Abstraction(AbstractionError::UnknownBuiltin { line, .. })
            | AnalysisError::Abstraction(AbstractionError::Assertion { line, .. }) => Some(*line),
            AnalysisError::Abstraction(AbstractionError::BuiltinSpec { .. }) => None,
        }
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct AnalysisOptions {
    pub abstraction: AbstractionOptions,
    pub fixpoint: FixpointOptions,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Timings {
    /// Reading, parsing, normalizing and abstracting.
    pub abs: Duration,
    pub lfp: Duration,
    pub gfp: Duration,
}

impl Timings {
    pub fn sum(&self) -> Duration {
        self.abs + self.lfp + self.gfp
    }
}

#[derive(Clone, Debug)]
pub struct Analysis {
    pub source: SourceProgram,
    pub program: AbstractProgram,
    pub result: AnalysisResult,
    pub timings: Timings,
}

impl Analysis {
    /// Inferred call mode (over `x1..xN`).
    pub fn call_mode(&self, key: &PredKey) -> BoolFn {
        self.result.calls.table.get(key)
    }

    pub fn success_mode(&self, key: &PredKey) -> BoolFn {
        self.result.success.table.get(key)
    }

    /// User-defined predicates in order of first definition.
    pub fn user_preds(&self) -> &[PredKey] {
        &self.program.user_order
    }

    pub fn is_user_pred(&self, key: &PredKey) -> bool {
        self.program.kind(key) == Some(PredKind::User)
    }
}

pub fn analyze_source(
    text: &str,
    builtins: &BuiltinTable,
    opts: &AnalysisOptions,
) -> Result<Analysis, AnalysisError> {
    let t0 = Instant::now();
    let source = parse_program(text)?;
    let program = abstract_source(&source, builtins, &opts.abstraction)?;
    let t1 = Instant::now();
    let success = lfp(&program, &opts.fixpoint);
    let t2 = Instant::now();
    let calls = gfp(&program, &success.table, &opts.fixpoint);
    let t3 = Instant::now();
    Ok(Analysis {
        source,
        program,
        result: AnalysisResult { success, calls },
        timings: Timings {
            abs: t1 - t0,
            lfp: t2 - t1,
            gfp: t3 - t2,
        },
    })
}

/// Analysis with the shipped builtin table and default options.
pub fn analyze_text(text: &str) -> Result<Analysis, AnalysisError> {
    analyze_source(text, &BuiltinTable::standard(), &AnalysisOptions::default())
}

/// Re-runs the fixpoints on an already abstracted program.
pub fn reanalyze(program: &AbstractProgram, opts: &FixpointOptions) -> AnalysisResult {
    analyze(program, opts)
}
