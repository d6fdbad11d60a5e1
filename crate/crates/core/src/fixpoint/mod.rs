//! Success patterns by least fixpoint and safe call patterns by greatest
//! fixpoint over an [`AbstractProgram`].

mod table;

use std::collections::{BTreeSet, HashMap, VecDeque};

use crate::abstraction::{AbstractClause, AbstractProgram};
use crate::frontend::PredKey;
use crate::pos::{BoolFn, Quantifier, Renaming, VarId};

pub use table::{Absent, PatternTable};

/// How clauses are revisited until the tables stabilise.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Schedule {
    /// Every clause once per iteration against the previous table.
    #[default]
    RoundRobin,
    /// Re-evaluate a predicate only when something it calls changed.
    Worklist,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct FixpointOptions {
    pub schedule: Schedule,
    /// Visit clauses last to first.
    pub reverse_clauses: bool,
}

#[derive(Clone, Debug)]
pub struct FixpointRun {
    pub table: PatternTable,
    /// Successive tables starting from the initial one. Round-robin runs
    /// record every iterate; worklist runs only the first and last.
    pub trace: Vec<PatternTable>,
    /// Number of times the transformer was applied (round-robin) or
    /// predicates were re-evaluated (worklist).
    pub iterations: usize,
}

impl FixpointRun {
    /// Index `k` of the first iterate with `X_k = X_{k+1}`.
    pub fn fixpoint_index(&self) -> usize {
        self.trace.len().saturating_sub(2)
    }
}

#[derive(Clone, Debug)]
pub struct AnalysisResult {
    pub success: FixpointRun,
    pub calls: FixpointRun,
}

/// Predicates in report order: user predicates by first definition, then
/// the rest by name.
pub fn pred_order(prog: &AbstractProgram) -> Vec<PredKey> {
    let mut out = prog.user_order.clone();
    let seen: BTreeSet<&PredKey> = prog.user_order.iter().collect();
    out.extend(prog.preds.keys().filter(|k| !seen.contains(k)).cloned());
    out
}

fn positions(args: &[VarId]) -> Renaming {
    Renaming::from_positions(args).expect("atom arguments are distinct")
}

/// Maps a formula over clause variables back to `x1..xN` of the head.
fn to_canonical(f: &BoolFn, head: &[VarId]) -> BoolFn {
    if head.iter().enumerate().all(|(i, v)| v.index() == i) {
        return f.clone();
    }
    f.rename(&positions(head).inverse())
}

fn head_set(cl: &AbstractClause) -> BTreeSet<VarId> {
    cl.args.iter().copied().collect()
}

fn clauses_by_pred(prog: &AbstractProgram, reverse: bool) -> HashMap<&PredKey, Vec<&AbstractClause>> {
    let mut out: HashMap<&PredKey, Vec<&AbstractClause>> = HashMap::new();
    for c in &prog.clauses {
        out.entry(&c.head).or_default().push(c);
    }
    if reverse {
        out.values_mut().for_each(|cs| cs.reverse());
    }
    out
}

/// Success contribution of one clause: the constraint conjoined with the
/// body atoms' success patterns, existentially projected onto the head.
/// Required modes play no part.
pub fn clause_success(cl: &AbstractClause, success: &PatternTable) -> BoolFn {
    let mut g = cl.constraint.clone();
    for b in &cl.body {
        if g.is_false() {
            return g;
        }
        g = g.conj(&success.get(&b.pred).rename(&positions(&b.args)));
    }
    to_canonical(&g.project_onto(&head_set(cl), Quantifier::Exists), &cl.args)
}

/// Demand of one clause: right to left, `e_i = d_i ∧ (f_i ⇒ e_{i+1})`,
/// then `e_0 = d ∧ (f ⇒ e_1)`, universally projected onto the head.
pub fn clause_demand(cl: &AbstractClause, success: &PatternTable, calls: &PatternTable) -> BoolFn {
    let mut e = BoolFn::top();
    for b in cl.body.iter().rev() {
        let r = positions(&b.args);
        let d = calls.get(&b.pred).rename(&r);
        let f = success.get(&b.pred).rename(&r);
        let next = d.conj(&f.pseudo_complement(&e));
        debug_assert_eq!(next, d.conj(&d.conj(&f).pseudo_complement(&e)));
        e = next;
    }
    let e0 = cl.required.conj(&cl.constraint.pseudo_complement(&e));
    let g = e0.project_onto(&head_set(cl), Quantifier::Forall);
    debug_assert!(g.entails(&e0));
    to_canonical(&g, &cl.args)
}

/// Bound on the number of round-robin iterations: each predicate's entry
/// can change at most once per element of a chain in Pos over its arity.
fn iteration_bound(prog: &AbstractProgram) -> usize {
    let chain = 1usize << prog.max_arity().min(20);
    prog.preds.len().max(1) * (chain + 1) + 1
}

enum Direction {
    Up,
    Down,
}

fn round_robin(
    prog: &AbstractProgram,
    opts: &FixpointOptions,
    start: PatternTable,
    dir: Direction,
    step: impl Fn(&PredKey, &[&AbstractClause], &PatternTable) -> BoolFn,
) -> FixpointRun {
    let by_pred = clauses_by_pred(prog, opts.reverse_clauses);
    let order = pred_order(prog);
    let bound = iteration_bound(prog);
    let mut trace = vec![start];
    loop {
        let prev = trace.last().expect("trace starts with the initial table");
        let mut next = prev.clone();
        for key in &order {
            let cls = by_pred.get(key).map(Vec::as_slice).unwrap_or(&[]);
            let new = step(key, cls, prev);
            let old = prev.get(key);
            match dir {
                Direction::Up => assert!(old.entails(&new), "ascending chain broken at {key}"),
                Direction::Down => assert!(new.entails(&old), "descending chain broken at {key}"),
            }
            next.set(key.clone(), new);
        }
        let done = &next == prev;
        trace.push(next);
        assert!(trace.len() <= bound + 1, "fixpoint iteration exceeded its bound");
        if done {
            break;
        }
    }
    FixpointRun {
        table: trace.last().cloned().expect("non-empty trace"),
        iterations: trace.len() - 1,
        trace,
    }
}

fn worklist(
    prog: &AbstractProgram,
    opts: &FixpointOptions,
    start: PatternTable,
    step: impl Fn(&PredKey, &[&AbstractClause], &PatternTable) -> BoolFn,
) -> FixpointRun {
    let by_pred = clauses_by_pred(prog, opts.reverse_clauses);
    let callers = prog.callers();
    let order = pred_order(prog);
    let mut queue: VecDeque<PredKey> = order.iter().cloned().collect();
    let mut queued: BTreeSet<PredKey> = order.iter().cloned().collect();
    let mut table = start.clone();
    let mut evaluations = 0;
    while let Some(key) = queue.pop_front() {
        queued.remove(&key);
        evaluations += 1;
        let cls = by_pred.get(&key).map(Vec::as_slice).unwrap_or(&[]);
        let new = step(&key, cls, &table);
        if new != table.get(&key) {
            table.set(key.clone(), new);
            for caller in callers.get(&key).into_iter().flatten() {
                if queued.insert(caller.clone()) {
                    queue.push_back(caller.clone());
                }
            }
        }
    }
    FixpointRun {
        trace: vec![start, table.clone()],
        table,
        iterations: evaluations,
    }
}

/// Least fixpoint of the success-pattern transformer, starting from the
/// empty table.
pub fn lfp(prog: &AbstractProgram, opts: &FixpointOptions) -> FixpointRun {
    match opts.schedule {
        Schedule::RoundRobin => round_robin(
            prog,
            opts,
            PatternTable::success(),
            Direction::Up,
            |_, cls, table| BoolFn::disj_all(&cls.iter().map(|c| clause_success(c, table)).collect::<Vec<_>>()),
        ),
        Schedule::Worklist => worklist(prog, opts, PatternTable::success(), |key, cls, table| {
            // Joining with the current entry keeps chaotic iteration monotone.
            cls.iter()
                .fold(table.get(key), |acc, c| acc.disj(&clause_success(c, table)))
        }),
    }
}

/// Greatest fixpoint of the demand transformer, starting from the table
/// mapping every predicate to `true`.
pub fn gfp(prog: &AbstractProgram, success: &PatternTable, opts: &FixpointOptions) -> FixpointRun {
    let step = |key: &PredKey, cls: &[&AbstractClause], table: &PatternTable| {
        cls.iter()
            .fold(table.get(key), |acc, c| acc.conj(&clause_demand(c, success, table)))
    };
    match opts.schedule {
        Schedule::RoundRobin => round_robin(prog, opts, PatternTable::calls(), Direction::Down, step),
        Schedule::Worklist => worklist(prog, opts, PatternTable::calls(), step),
    }
}

pub fn analyze(prog: &AbstractProgram, opts: &FixpointOptions) -> AnalysisResult {
    let success = lfp(prog, opts);
    let calls = gfp(prog, &success.table, opts);
    AnalysisResult { success, calls }
}
