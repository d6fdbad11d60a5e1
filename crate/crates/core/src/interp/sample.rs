//! Random queries for differential testing: queries whose argument
//! groundness satisfies a mode, run to look for error states or to
//! collect answers.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use super::term::Value;
use super::{store_abstraction, Limits, Outcome, Program, Violation};
use crate::frontend::{Goal, PredKey, SourceClause, Term};
use crate::pos::BoolFn;

/// Constants and function symbols the generator builds terms from.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Signature {
    pub atoms: Vec<Value>,
    pub ints: Vec<i64>,
    pub functors: Vec<(Arc<str>, usize)>,
    /// Compound argument terms of the clauses, variables numbered from 0.
    pub patterns: Vec<Value>,
}

impl Signature {
    /// Symbols occurring in argument positions of the clauses, plus the
    /// integers 0 to 9 and the list constructors.
    pub fn of(clauses: &[SourceClause]) -> Signature {
        fn walk(t: &Term, atoms: &mut BTreeSet<String>, ints: &mut BTreeSet<i64>, fs: &mut BTreeSet<(String, usize)>) {
            match t {
                Term::Var(_) => {}
                Term::Atom(a) => {
                    atoms.insert(a.clone());
                }
                Term::Int(i) => {
                    ints.insert(*i);
                }
                Term::Compound(f, args) => {
                    fs.insert((f.clone(), args.len()));
                    args.iter().for_each(|a| walk(a, atoms, ints, fs));
                }
            }
        }
        let mut atoms = BTreeSet::from(["[]".to_string()]);
        let mut ints: BTreeSet<i64> = (0..10).collect();
        let mut fs = BTreeSet::from([(".".to_string(), 2)]);
        let mut patterns = Vec::new();
        for c in clauses {
            let goals = c.body.iter().flat_map(|g| match g {
                Goal::Call(t) => t.args().iter().collect::<Vec<_>>(),
                Goal::Eq(a, b) => vec![a, b],
            });
            for t in c.head.args().iter().chain(goals) {
                walk(t, &mut atoms, &mut ints, &mut fs);
                if matches!(t, Term::Compound(..)) {
                    let p = Value::from_term(t, &mut HashMap::new(), &mut 0);
                    if !patterns.contains(&p) {
                        patterns.push(p);
                    }
                }
            }
        }
        Signature {
            atoms: atoms.iter().map(|a| Value::atom(a)).collect(),
            ints: ints.into_iter().collect(),
            functors: fs.into_iter().map(|(f, n)| (Arc::from(f.as_str()), n)).collect(),
            patterns,
        }
    }
}

struct Gen<'a> {
    sig: &'a Signature,
    rng: ChaCha8Rng,
    next_var: u32,
}

const TERM_DEPTH: u32 = 3;
const MAX_LIST: usize = 5;
/// Proposals per accepted query when the mode depends on sharing.
const MAX_PROPOSALS: usize = 1000;

impl Gen<'_> {
    fn constant(&mut self) -> Value {
        if self.rng.gen_bool(0.5) {
            if let Some(a) = self.sig.atoms.choose(&mut self.rng) {
                return a.clone();
            }
        }
        Value::Int(*self.sig.ints.choose(&mut self.rng).unwrap_or(&0))
    }

    fn fresh(&mut self) -> Value {
        self.next_var += 1;
        Value::Var(self.next_var - 1)
    }

    fn ground(&mut self, depth: u32) -> Value {
        if depth == 0 || self.rng.gen_bool(0.2) {
            return self.constant();
        }
        if self.rng.gen_bool(0.4) && !self.sig.patterns.is_empty() {
            return self.instance(depth);
        }
        if self.rng.gen_bool(0.5) {
            let n = self.rng.gen_range(0..=MAX_LIST);
            let items = (0..n).map(|_| self.element(depth - 1)).collect();
            return Value::list(items);
        }
        let (f, n) = self.sig.functors.choose(&mut self.rng).cloned().expect("signature has '.'/2");
        let args = (0..n).map(|_| self.ground(depth - 1)).collect();
        Value::compound(&f, args)
    }

    /// A clause argument pattern with its variables filled in, so terms
    /// resemble what the program takes apart.
    fn instance(&mut self, depth: u32) -> Value {
        let p = self.sig.patterns.choose(&mut self.rng).expect("non-empty").clone();
        let mut vs = Vec::new();
        p.vars(&mut vs);
        let fill: HashMap<u32, Value> = vs.into_iter().map(|v| (v, self.element(depth - 1))).collect();
        substitute(&p, &fill)
    }

    /// List elements lean towards small integers so arithmetic succeeds.
    fn element(&mut self, depth: u32) -> Value {
        if self.rng.gen_bool(0.6) {
            Value::Int(self.rng.gen_range(0..10))
        } else {
            self.ground(depth)
        }
    }

    /// A term with at least one variable. `shared` variables may recur
    /// across argument positions.
    fn open(&mut self, shared: &[Value]) -> Value {
        match self.rng.gen_range(0..20) {
            0..=7 => self.fresh(),
            8..=14 => shared.choose(&mut self.rng).cloned().unwrap_or_else(|| self.fresh()),
            15..=17 => {
                // Partial list.
                let n = self.rng.gen_range(0..=3);
                let tail = self.fresh();
                (0..n).fold(tail, |t, _| {
                    let h = self.element(1);
                    Value::cons(h, t)
                })
            }
            _ => {
                let n = self.rng.gen_range(1..=3);
                let items: Vec<Value> = (0..n)
                    .map(|_| match self.rng.gen_range(0..3) {
                        0 => self.fresh(),
                        1 => shared.choose(&mut self.rng).cloned().unwrap_or_else(|| self.fresh()),
                        _ => self.element(1),
                    })
                    .collect();
                let t = Value::list(items);
                if t.is_ground() {
                    self.fresh()
                } else {
                    t
                }
            }
        }
    }

    fn propose(&mut self, pred: &PredKey, bits: &[bool]) -> Value {
        self.next_var = 0;
        let pool = self.rng.gen_range(1..=2);
        let shared: Vec<Value> = (0..pool).map(|_| self.fresh()).collect();
        let args = bits
            .iter()
            .map(|&g| if g { self.ground(TERM_DEPTH) } else { self.open(&shared) })
            .collect();
        Value::compound(&pred.name, args)
    }

    /// A query whose arguments' abstraction entails `mode`. Proposals
    /// follow the models of `mode`; for a monotone mode the groundness of
    /// the arguments decides and the first proposal is taken.
    fn query(&mut self, pred: &PredKey, mode: &BoolFn, rows: &[Vec<bool>]) -> Option<Value> {
        let monotone = mode.is_monotone();
        for _ in 0..MAX_PROPOSALS {
            let bits = rows.choose(&mut self.rng).expect("non-empty").clone();
            let q = self.propose(pred, &bits);
            if monotone || store_abstraction(q.args()).entails(mode) {
                return Some(q);
            }
        }
        None
    }
}

fn substitute(t: &Value, fill: &HashMap<u32, Value>) -> Value {
    match t {
        Value::Var(v) => fill[v].clone(),
        Value::Struct(f, args) => Value::Struct(f.clone(), args.iter().map(|a| substitute(a, fill)).collect()),
        other => other.clone(),
    }
}

/// Models of `mode` over `arity` variables.
fn models(mode: &BoolFn, arity: usize) -> Vec<Vec<bool>> {
    assert!(arity <= 16, "arity {arity} too large to enumerate");
    (0u32..1 << arity)
        .map(|row| (0..arity).map(|i| row >> i & 1 == 1).collect::<Vec<bool>>())
        .filter(|bits| mode.eval_with(|v| bits[v.index()]))
        .collect()
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum SampleError {
    #[error("mode of {0} is false: no query satisfies it")]
    EmptyMode(PredKey),
    #[error("no query to {0} satisfying its mode was generated")]
    NoQuery(PredKey),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    pub query: Value,
    pub violation: Violation,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CheckReport {
    pub samples: usize,
    pub successes: usize,
    pub failures: usize,
    /// Runs cut off by the depth bound or the step budget before finding
    /// an error.
    pub incomplete: usize,
    pub counterexamples: Vec<Counterexample>,
}

fn rng_for(pred: &PredKey, seed: u64) -> ChaCha8Rng {
    // Mix the predicate in so each gets its own stream.
    let h = pred
        .name
        .bytes()
        .chain((pred.arity as u64).to_le_bytes())
        .fold(0xcbf29ce484222325u64, |h, b| (h ^ u64::from(b)).wrapping_mul(0x100000001b3));
    ChaCha8Rng::seed_from_u64(seed ^ h)
}

/// Runs `n` random queries to `pred` whose argument groundness satisfies
/// `mode` and collects those that reach the error state.
pub fn sample_and_check(
    prog: &Program,
    pred: &PredKey,
    mode: &BoolFn,
    n: usize,
    seed: u64,
    limits: &Limits,
) -> Result<CheckReport, SampleError> {
    let rows = models(mode, pred.arity);
    if rows.is_empty() {
        return Err(SampleError::EmptyMode(pred.clone()));
    }
    let mut g = Gen {
        sig: prog.signature(),
        rng: rng_for(pred, seed),
        next_var: 0,
    };
    let mut report = CheckReport::default();
    for _ in 0..n {
        let query = g.query(pred, mode, &rows).ok_or_else(|| SampleError::NoQuery(pred.clone()))?;
        let run = prog.run_with(&query, limits);
        report.samples += 1;
        if run.incomplete && run.violation().is_none() {
            report.incomplete += 1;
        }
        match run.outcome {
            Outcome::Error(v) => report.counterexamples.push(Counterexample { query, violation: *v }),
            Outcome::Success(_) => report.successes += 1,
            Outcome::Failure => report.failures += 1,
            Outcome::DepthExceeded => {}
        }
    }
    Ok(report)
}

/// An atom from a successful derivation whose abstraction does not
/// entail its predicate's success pattern.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuccessViolation {
    pub query: Value,
    pub atom: Value,
    pub success: BoolFn,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SoundnessReport {
    pub queries: usize,
    /// Atoms checked per predicate.
    pub checked: BTreeMap<PredKey, usize>,
    pub violations: Vec<SuccessViolation>,
}

impl SoundnessReport {
    pub fn checked(&self, pred: &PredKey) -> usize {
        self.checked.get(pred).copied().unwrap_or(0)
    }
}

/// Runs random queries to each root (whose arguments satisfy the paired
/// mode) and, in every successful derivation, checks each selected call
/// to a predicate with a known success pattern: the call under the answer
/// substitution is an instance of that call's own answer, so its
/// abstraction must entail the pattern. Stops once every predicate of the
/// program has `wanted` checks or after `max_queries` queries.
pub fn sample_success(
    prog: &Program,
    roots: &[(PredKey, BoolFn)],
    success: impl Fn(&PredKey) -> Option<BoolFn>,
    wanted: usize,
    max_queries: usize,
    seed: u64,
    limits: &Limits,
) -> Result<SoundnessReport, SampleError> {
    let mut report = SoundnessReport::default();
    let mut gens = Vec::new();
    for (pred, mode) in roots {
        let rows = models(mode, pred.arity);
        if rows.is_empty() {
            return Err(SampleError::EmptyMode(pred.clone()));
        }
        let g = Gen {
            sig: prog.signature(),
            rng: rng_for(pred, seed),
            next_var: 0,
        };
        gens.push((pred, mode, rows, g));
    }
    let done = |r: &SoundnessReport| prog.preds().iter().all(|p| r.checked(p) >= wanted);
    while report.queries < max_queries && !done(&report) && !gens.is_empty() {
        for (pred, mode, rows, g) in gens.iter_mut() {
            if report.queries >= max_queries {
                break;
            }
            let query = g.query(pred, mode, rows).ok_or_else(|| SampleError::NoQuery((*pred).clone()))?;
            report.queries += 1;
            let run = prog.run_with(&query, limits);
            for answer in run.answers() {
                for atom in &answer.derivation {
                    let Some((name, arity)) = atom.functor() else { continue };
                    let key = PredKey::new(name, arity);
                    if prog.clauses(&key).is_empty() {
                        continue;
                    }
                    let Some(f) = success(&key) else { continue };
                    *report.checked.entry(key).or_default() += 1;
                    if !store_abstraction(atom.args()).entails(&f) {
                        report.violations.push(SuccessViolation {
                            query: query.clone(),
                            atom: atom.clone(),
                            success: f,
                        });
                    }
                }
            }
        }
    }
    Ok(report)
}
