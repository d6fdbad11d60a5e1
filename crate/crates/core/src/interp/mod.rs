//! Concrete execution with mode assertions. Resolution selects the leftmost
//! goal; before a call is resolved, the groundness of its arguments must
//! satisfy the callee's required mode, otherwise execution stops in the
//! error state. Used to test the analysis against real derivations.

mod builtins;
mod sample;
mod term;

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::abstraction::{assertion_modes, is_known_unlisted, AbstractionError, BuiltinTable};
use crate::frontend::{Assertion, Goal, PredKey, SourceClause, SourceProgram, Term};
use crate::pos::{BoolFn, VarId};

pub use sample::{
    sample_and_check, sample_success, CheckReport, Counterexample, SampleError, Signature, SoundnessReport, SuccessViolation,
};
pub use term::{is_idempotent, unify, Substitution, Value};

/// A clause with its variables numbered `0..nvars`.
#[derive(Clone, Debug)]
pub struct Clause {
    pub head: Value,
    pub body: Vec<Value>,
    pub nvars: u32,
    pub line: usize,
}

impl Clause {
    fn compile(c: &SourceClause) -> Clause {
        let mut names = HashMap::new();
        let mut next = 0;
        let head = Value::from_term(&c.head, &mut names, &mut next);
        let body = c
            .body
            .iter()
            .map(|g| match g {
                Goal::Call(t) => Value::from_term(t, &mut names, &mut next),
                Goal::Eq(a, b) => {
                    let eq = Term::Compound("=".into(), vec![a.clone(), b.clone()]);
                    Value::from_term(&eq, &mut names, &mut next)
                }
            })
            .collect();
        Clause {
            head,
            body,
            nvars: next,
            line: c.line,
        }
    }
}

/// What a call resolves against.
enum Callee<'a> {
    User(&'a [Clause], Option<&'a BoolFn>),
    Builtin(BoolFn),
    Undefined,
}

#[derive(Clone, Debug)]
pub struct Program {
    clauses: HashMap<PredKey, Vec<Clause>>,
    order: Vec<PredKey>,
    required: HashMap<PredKey, BoolFn>,
    builtins: BuiltinTable,
    signature: Signature,
}

impl Program {
    pub fn new(src: &SourceProgram, builtins: &BuiltinTable) -> Result<Program, AbstractionError> {
        Program::from_clauses(&src.clauses, &src.assertions, builtins)
    }

    pub fn from_clauses(
        clauses: &[SourceClause],
        assertions: &[Assertion],
        builtins: &BuiltinTable,
    ) -> Result<Program, AbstractionError> {
        let mut by_pred: HashMap<PredKey, Vec<Clause>> = HashMap::new();
        let mut order = Vec::new();
        for c in clauses {
            let key = c.pred_key();
            if !by_pred.contains_key(&key) {
                order.push(key.clone());
            }
            by_pred.entry(key).or_default().push(Clause::compile(c));
        }
        let defined = by_pred.keys().map(|k| (k.clone(), ())).collect();
        let required = assertion_modes(assertions, &defined)?;
        Ok(Program {
            clauses: by_pred,
            order,
            required,
            builtins: builtins.clone(),
            signature: Signature::of(clauses),
        })
    }

    /// Defined predicates in order of first clause.
    pub fn preds(&self) -> &[PredKey] {
        &self.order
    }

    pub fn clauses(&self, key: &PredKey) -> &[Clause] {
        self.clauses.get(key).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    fn callee(&self, key: &PredKey) -> Callee<'_> {
        if let Some(cs) = self.clauses.get(key) {
            return Callee::User(cs, self.required.get(key));
        }
        if let Some(spec) = self.builtins.lookup(key) {
            return Callee::Builtin(spec.required);
        }
        if is_known_unlisted(key) {
            // No specification: nothing is known to be safe.
            return Callee::Builtin(BoolFn::bottom());
        }
        Callee::Undefined
    }

    /// One derivation step from `st`.
    pub fn step(&self, st: &ConcreteState) -> Step {
        self.step_with(st, true)
    }

    /// Like [`step`](Self::step); without `check_modes` calls never enter
    /// the error state and builtins lacking instantiation just fail.
    pub fn step_with(&self, st: &ConcreteState, check_modes: bool) -> Step {
        let Some((goal, depth, rest)) = st.goals.split_first() else {
            return Step::Success;
        };
        let goal = st.subst.walk(goal);
        let path = st.path.push(goal.clone());
        let Some((name, arity)) = goal.functor() else {
            return Step::Successors(Vec::new());
        };
        let key = PredKey::new(name, arity);
        let args = goal.args();
        let successor = |subst: Substitution, next_var: u32, body: Vec<Value>| {
            let mut goals = rest.clone();
            for g in body.into_iter().rev() {
                goals = goals.push(g, depth + 1);
            }
            ConcreteState {
                goals,
                subst,
                next_var,
                path: path.clone(),
            }
        };
        if name == builtins::LENGTH_FROM {
            let branches = builtins::call(name, args, &st.subst, st.next_var).unwrap_or_default();
            return Step::Successors(
                branches
                    .into_iter()
                    .map(|b| successor(b.subst, b.next_var, b.goals))
                    .collect(),
            );
        }
        let callee = self.callee(&key);
        let required = match &callee {
            Callee::User(_, req) => *req,
            Callee::Builtin(req) => Some(req),
            Callee::Undefined => None,
        };
        if let Some(req) = required.filter(|_| check_modes) {
            let bits: Vec<bool> = args.iter().map(|a| st.subst.is_ground(a)).collect();
            // For monotone modes the groundness of each argument decides;
            // otherwise sharing between arguments matters too.
            let holds = if req.is_monotone() {
                req.eval_with(|v| bits[v.index()])
            } else {
                let resolved: Vec<Value> = args.iter().map(|a| st.subst.resolve(a)).collect();
                store_abstraction(&resolved).entails(req)
            };
            if !holds {
                return Step::Error(Violation {
                    pred: key,
                    call: st.subst.resolve(&goal),
                    required: req.clone(),
                    groundness: bits,
                    trace: path.to_vec().iter().map(|g| st.subst.resolve(g)).collect(),
                });
            }
        }
        let next = match callee {
            Callee::User(clauses, _) => clauses
                .iter()
                .filter_map(|c| {
                    let base = st.next_var;
                    let subst = unify(&goal, &c.head.shift(base), &st.subst)?;
                    let body = c.body.iter().map(|g| g.shift(base)).collect();
                    Some(successor(subst, base + c.nvars, body))
                })
                .collect(),
            Callee::Builtin(_) => builtins::call(name, args, &st.subst, st.next_var)
                .unwrap_or_default()
                .into_iter()
                .map(|b| successor(b.subst, b.next_var, b.goals))
                .collect(),
            Callee::Undefined => Vec::new(),
        };
        Step::Successors(next)
    }

    /// Depth-first search for answers to `query`.
    pub fn run(&self, query: &Value, max_depth: u32, max_solutions: usize) -> Run {
        self.run_with(
            query,
            &Limits {
                max_depth,
                max_solutions,
                ..Limits::default()
            },
        )
    }

    pub fn run_with(&self, query: &Value, limits: &Limits) -> Run {
        let mut stack = vec![ConcreteState::initial(query)];
        let mut answers = Vec::new();
        let mut incomplete = false;
        let mut steps = 0;
        while let Some(st) = stack.pop() {
            if steps >= limits.max_steps {
                incomplete = true;
                break;
            }
            steps += 1;
            if let Some((_, depth, _)) = st.goals.split_first() {
                if depth >= limits.max_depth {
                    incomplete = true;
                    continue;
                }
            }
            match self.step_with(&st, limits.check_modes) {
                Step::Success => {
                    if answers.len() < limits.max_solutions {
                        answers.push(Answer {
                            args: query.args().iter().map(|a| st.subst.resolve(a)).collect(),
                            derivation: st.path.to_vec().iter().map(|g| st.subst.resolve(g)).collect(),
                        });
                    }
                    if answers.len() >= limits.max_solutions && !limits.exhaustive {
                        break;
                    }
                }
                Step::Successors(next) => stack.extend(next.into_iter().rev()),
                Step::Error(v) => {
                    return Run {
                        outcome: Outcome::Error(Box::new(v)),
                        incomplete,
                        steps,
                    }
                }
            }
        }
        let outcome = if !answers.is_empty() {
            Outcome::Success(answers)
        } else if incomplete {
            Outcome::DepthExceeded
        } else {
            Outcome::Failure
        };
        Run {
            outcome,
            incomplete,
            steps,
        }
    }
}

/// Groundness dependencies among `args` as a formula over `x1..xN`:
/// each argument is ground exactly when all of its variables are, with
/// the variables themselves projected away.
pub fn store_abstraction(args: &[Value]) -> BoolFn {
    let mut vars = Vec::new();
    args.iter().for_each(|a| a.vars(&mut vars));
    let n = args.len() as u32;
    let id = |v: u32| VarId(n + vars.iter().position(|&w| w == v).expect("collected") as u32);
    let parts: Vec<BoolFn> = args
        .iter()
        .enumerate()
        .map(|(i, a)| {
            let mut vs = Vec::new();
            a.vars(&mut vs);
            BoolFn::var(VarId(i as u32)).iff(&BoolFn::all_of(vs.into_iter().map(id)))
        })
        .collect();
    BoolFn::conj_all(&parts).exists_set((0..vars.len() as u32).map(|k| VarId(n + k)))
}

/// Persistent goal sequence with a depth per goal.
#[derive(Clone, Debug, Default)]
pub struct Goals(Option<Arc<GoalNode>>);

#[derive(Debug)]
struct GoalNode {
    goal: Value,
    depth: u32,
    rest: Goals,
}

impl Goals {
    pub fn push(&self, goal: Value, depth: u32) -> Goals {
        Goals(Some(Arc::new(GoalNode {
            goal,
            depth,
            rest: self.clone(),
        })))
    }

    pub fn split_first(&self) -> Option<(&Value, u32, &Goals)> {
        self.0.as_deref().map(|n| (&n.goal, n.depth, &n.rest))
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_none()
    }

    /// Goals with their depths, leftmost first.
    pub fn to_vec(&self) -> Vec<(Value, u32)> {
        let mut out = Vec::new();
        let mut g = self;
        while let Some((v, d, rest)) = g.split_first() {
            out.push((v.clone(), d));
            g = rest;
        }
        out
    }
}

/// Selected goals from the root, most recent first.
#[derive(Clone, Debug, Default)]
struct Path(Option<Arc<(Value, Path)>>);

impl Path {
    fn push(&self, v: Value) -> Path {
        Path(Some(Arc::new((v, self.clone()))))
    }

    fn to_vec(&self) -> Vec<Value> {
        let mut out = Vec::new();
        let mut p = self;
        while let Some(node) = &p.0 {
            out.push(node.0.clone());
            p = &node.1;
        }
        out.reverse();
        out
    }
}

#[derive(Clone, Debug)]
pub struct ConcreteState {
    pub goals: Goals,
    pub subst: Substitution,
    /// First variable number not used anywhere in the state.
    pub next_var: u32,
    path: Path,
}

impl ConcreteState {
    /// `query` alone at depth 0 with the empty substitution.
    pub fn initial(query: &Value) -> ConcreteState {
        let mut vs = Vec::new();
        query.vars(&mut vs);
        ConcreteState {
            goals: Goals::default().push(query.clone(), 0),
            subst: Substitution::new(),
            next_var: vs.iter().max().map_or(0, |m| m + 1),
            path: Path::default(),
        }
    }
}

#[derive(Clone, Debug)]
pub enum Step {
    /// The goal sequence is empty.
    Success,
    Successors(Vec<ConcreteState>),
    Error(Violation),
}

/// A call whose argument groundness does not satisfy the callee's
/// required mode.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub pred: PredKey,
    pub call: Value,
    pub required: BoolFn,
    /// Groundness of each argument at the call.
    pub groundness: Vec<bool>,
    /// Selected goals from the query to the offending call.
    pub trace: Vec<Value>,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let bits: String = self.groundness.iter().map(|&g| if g { '1' } else { '0' }).collect();
        write!(
            f,
            "call {} violates required mode {} of {} (groundness {bits})",
            self.call, self.required, self.pred
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Answer {
    /// The query's arguments under the answer substitution.
    pub args: Vec<Value>,
    /// Goals selected on the way, under the answer substitution.
    pub derivation: Vec<Value>,
}

impl Answer {
    pub fn groundness(&self) -> Vec<bool> {
        self.args.iter().map(Value::is_ground).collect()
    }

    pub fn abstraction(&self) -> BoolFn {
        store_abstraction(&self.args)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Success(Vec<Answer>),
    Failure,
    Error(Box<Violation>),
    DepthExceeded,
}

#[derive(Clone, Copy, Debug)]
pub struct Limits {
    pub max_depth: u32,
    /// Answers kept.
    pub max_solutions: usize,
    /// Keep searching after `max_solutions` answers, for errors.
    pub exhaustive: bool,
    /// Derivation steps before the search gives up.
    pub max_steps: usize,
    /// Enforce required modes (the error state).
    pub check_modes: bool,
}

impl Default for Limits {
    fn default() -> Limits {
        Limits {
            max_depth: 128,
            max_solutions: 1,
            exhaustive: true,
            max_steps: 100_000,
            check_modes: true,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Run {
    pub outcome: Outcome,
    /// Some branch was cut by the depth bound or the step budget.
    pub incomplete: bool,
    pub steps: usize,
}

impl Run {
    pub fn violation(&self) -> Option<&Violation> {
        match &self.outcome {
            Outcome::Error(v) => Some(v),
            _ => None,
        }
    }

    pub fn answers(&self) -> &[Answer] {
        match &self.outcome {
            Outcome::Success(a) => a,
            _ => &[],
        }
    }
}

/// Parses a query such as `qs([2,1], S, T)`.
pub fn parse_query(text: &str) -> Result<Value, crate::frontend::FrontendError> {
    let t = crate::frontend::parse_term(text)?;
    Ok(Value::from_term(&t, &mut HashMap::new(), &mut 0))
}
