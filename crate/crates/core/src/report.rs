//! Printable and machine-readable results of an analysis.

use std::fmt::Write as _;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::fixpoint::FixpointRun;
use crate::frontend::PredKey;
use crate::pipeline::{Analysis, Timings};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredicateReport {
    pub name: String,
    pub arity: usize,
    pub call_mode: String,
    pub success_mode: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Iterations {
    pub lfp: usize,
    pub gfp: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimingsMs {
    pub abs: f64,
    pub lfp: f64,
    pub gfp: f64,
    pub sum: f64,
}

impl From<&Timings> for TimingsMs {
    fn from(t: &Timings) -> TimingsMs {
        TimingsMs {
            abs: ms(t.abs),
            lfp: ms(t.lfp),
            gfp: ms(t.gfp),
            sum: ms(t.sum()),
        }
    }
}

fn ms(d: Duration) -> f64 {
    d.as_secs_f64() * 1000.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub predicates: Vec<PredicateReport>,
    pub iterations: Iterations,
    pub timings_ms: TimingsMs,
}

impl Report {
    /// One row per user predicate, in order of first definition.
    pub fn new(a: &Analysis) -> Report {
        let predicates = a
            .user_preds()
            .iter()
            .map(|k| PredicateReport {
                name: k.name.clone(),
                arity: k.arity,
                call_mode: a.call_mode(k).to_string(),
                success_mode: a.success_mode(k).to_string(),
            })
            .collect();
        Report {
            predicates,
            iterations: Iterations {
                lfp: a.result.success.iterations,
                gfp: a.result.calls.iterations,
            },
            timings_ms: TimingsMs::from(&a.timings),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Aligned table of modes, then iteration counts, then (if asked) the
    /// timing row.
    pub fn to_text(&self, timing: bool) -> String {
        let rows: Vec<(String, &str, &str)> = self
            .predicates
            .iter()
            .map(|p| (format!("{}/{}", p.name, p.arity), p.call_mode.as_str(), p.success_mode.as_str()))
            .collect();
        let w0 = rows.iter().map(|r| r.0.len()).max().unwrap_or(0).max("predicate".len());
        let w1 = rows.iter().map(|r| r.1.len()).max().unwrap_or(0).max("call mode".len());
        let mut out = String::new();
        let _ = writeln!(out, "{:w0$}  {:w1$}  success mode", "predicate", "call mode");
        for (k, c, s) in &rows {
            let _ = writeln!(out, "{k:w0$}  {c:w1$}  {s}");
        }
        let _ = writeln!(out, "\niterations: lfp {}, gfp {}", self.iterations.lfp, self.iterations.gfp);
        if timing {
            out.push('\n');
            out.push_str(&timing_table(&[("", &self.timings_ms)]));
        }
        out.trim_end().to_string() + "\n"
    }
}

/// Rows of `abs lfp gfp sum` in milliseconds under a program column.
pub fn timing_table(rows: &[(&str, &TimingsMs)]) -> String {
    let w = rows.iter().map(|r| r.0.len()).max().unwrap_or(0).max("program".len());
    let mut out = format!("{:w$}  {:>9}  {:>9}  {:>9}  {:>9}\n", "program", "abs", "lfp", "gfp", "sum");
    for (name, t) in rows {
        let _ = writeln!(
            out,
            "{name:w$}  {:>9.3}  {:>9.3}  {:>9.3}  {:>9.3}",
            t.abs, t.lfp, t.gfp, t.sum
        );
    }
    out
}

/// Every recorded iterate, labelled `<prefix><k>`, restricted to `keys`.
pub fn dump_iterates(run: &FixpointRun, prefix: &str, keys: &[PredKey]) -> String {
    let mut out = String::new();
    for (k, table) in run.trace.iter().enumerate() {
        let _ = writeln!(out, "{prefix}{k}:");
        for line in table.render(keys).lines() {
            let _ = writeln!(out, "  {line}");
        }
    }
    out
}
