//! From normalized clauses to abstract clauses `p(x⃗) :- d ⋄ f, body` over
//! Pos, with builtins replaced by one-clause predicates carrying their
//! required and success modes.

mod builtins;

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use thiserror::Error;

use crate::frontend::{
    normalize, Assertion, BodyAtom, Equation, NormClause, PredKey, SourceProgram, Term,
};
use crate::pos::{parse_formula, parse_positional, BoolFn, VarId};

pub use builtins::{equality_spec, is_known_unlisted, BuiltinSpec, BuiltinTable, STANDARD_SPEC};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AbstractionError {
    #[error("builtin spec line {line}: {message}")]
    BuiltinSpec { line: usize, message: String },
    #[error("{line}: call to builtin {key} which has no mode specification")]
    UnknownBuiltin { key: PredKey, line: usize },
    #[error("{line}: bad assertion: {message}")]
    Assertion { line: usize, message: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Warning {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: warning: {}", self.line, self.message)
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct AbstractionOptions {
    /// Treat builtins without a spec as `0 ⋄ 0` instead of failing.
    pub allow_unknown_builtins: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PredKind {
    User,
    /// Stand-in for a builtin, named `name'`.
    Builtin,
    /// Called but never defined.
    Undefined,
}

/// `head(x1..xN) :- required ⋄ constraint, body`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbstractClause {
    pub head: PredKey,
    pub args: Vec<VarId>,
    pub required: BoolFn,
    pub constraint: BoolFn,
    pub body: Vec<BodyAtom>,
    pub var_names: Vec<String>,
    pub line: usize,
}

impl AbstractClause {
    pub fn var_name(&self, v: VarId) -> String {
        self.var_names
            .get(v.index())
            .cloned()
            .unwrap_or_else(|| v.to_string())
    }
}

impl fmt::Display for AbstractClause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = |v: VarId| self.var_name(v);
        let atom = |pred: &PredKey, args: &[VarId]| {
            if args.is_empty() {
                pred.name.clone()
            } else {
                let a: Vec<String> = args.iter().map(|&v| name(v)).collect();
                format!("{}({})", pred.name, a.join(", "))
            }
        };
        write!(
            f,
            "{} :- {} <> {}",
            atom(&self.head, &self.args),
            crate::pos::format_formula(&self.required, &name),
            crate::pos::format_formula(&self.constraint, &name)
        )?;
        for b in &self.body {
            write!(f, ", {}", atom(&b.pred, &b.args))?;
        }
        f.write_str(".")
    }
}

#[derive(Clone, Debug, Default)]
pub struct AbstractProgram {
    pub clauses: Vec<AbstractClause>,
    /// Every predicate that is defined or called.
    pub preds: BTreeMap<PredKey, PredKind>,
    /// User predicates in order of first definition.
    pub user_order: Vec<PredKey>,
    pub warnings: Vec<Warning>,
}

impl AbstractProgram {
    pub fn clauses_of(&self, key: &PredKey) -> impl Iterator<Item = &AbstractClause> + '_ {
        let key = key.clone();
        self.clauses.iter().filter(move |c| c.head == key)
    }

    pub fn kind(&self, key: &PredKey) -> Option<PredKind> {
        self.preds.get(key).copied()
    }

    pub fn max_arity(&self) -> usize {
        self.preds.keys().map(|k| k.arity).max().unwrap_or(0)
    }

    /// For each predicate, the predicates whose clauses call it.
    pub fn callers(&self) -> HashMap<PredKey, Vec<PredKey>> {
        let mut out: HashMap<PredKey, Vec<PredKey>> = HashMap::new();
        for c in &self.clauses {
            for b in &c.body {
                let callers = out.entry(b.pred.clone()).or_default();
                if !callers.contains(&c.head) {
                    callers.push(c.head.clone());
                }
            }
        }
        out
    }
}

/// Name of the stand-in predicate for a builtin.
pub fn builtin_pred(key: &PredKey) -> PredKey {
    PredKey::new(format!("{}'", key.name), key.arity)
}

/// `x ⟺ ∧vars(t)`; constants give `x`.
pub fn abstract_equation(eq: &Equation) -> BoolFn {
    BoolFn::var(eq.lhs).iff(&BoolFn::all_of(eq.rhs.vars().iter().copied()))
}

/// Required modes from `:- assertion(...)` directives, over x1..xN.
pub(crate) fn assertion_modes(
    assertions: &[Assertion],
    defined: &HashMap<PredKey, ()>,
) -> Result<HashMap<PredKey, BoolFn>, AbstractionError> {
    let mut out: HashMap<PredKey, BoolFn> = HashMap::new();
    for a in assertions {
        let err = |message: String| AbstractionError::Assertion {
            line: a.line,
            message,
        };
        let key = a.head.pred_key().expect("assertion heads are callable");
        if !defined.contains_key(&key) {
            return Err(err(format!("{key} is not defined by the program")));
        }
        let mut names = Vec::new();
        for arg in a.head.args() {
            match arg {
                Term::Var(n) if n != "_" && !names.contains(n) => names.push(n.clone()),
                other => {
                    return Err(err(format!(
                        "head arguments must be distinct named variables, found `{other}`"
                    )))
                }
            }
        }
        let mut resolve = |n: &str| {
            names
                .iter()
                .position(|m| m == n)
                .map(|i| VarId(i as u32))
                .or_else(|| {
                    parse_positional(n)
                        .ok()
                        .and_then(|f| f.support().into_iter().next())
                        .filter(|v| v.index() < names.len())
                })
        };
        let f = parse_formula(&a.formula, &mut resolve).map_err(|e| err(e.to_string()))?;
        if !f.is_positive() {
            return Err(err(format!("`{}` is not a positive formula", a.formula)));
        }
        let entry = out.entry(key).or_insert_with(BoolFn::top);
        *entry = entry.conj(&f);
    }
    Ok(out)
}

pub fn abstract_program(
    norm: &[NormClause],
    assertions: &[Assertion],
    table: &BuiltinTable,
    opts: &AbstractionOptions,
) -> Result<AbstractProgram, AbstractionError> {
    let mut prog = AbstractProgram::default();
    let defined: HashMap<PredKey, ()> = norm.iter().map(|c| (c.head.clone(), ())).collect();
    for c in norm {
        if !prog.preds.contains_key(&c.head) {
            prog.preds.insert(c.head.clone(), PredKind::User);
            prog.user_order.push(c.head.clone());
        }
    }
    let required = assertion_modes(assertions, &defined)?;
    let mut builtin_clauses: Vec<AbstractClause> = Vec::new();

    for c in norm {
        let constraint = BoolFn::conj_all(&c.eqns.iter().map(abstract_equation).collect::<Vec<_>>());
        let mut body = Vec::with_capacity(c.body.len());
        for atom in &c.body {
            if defined.contains_key(&atom.pred) {
                body.push(atom.clone());
                continue;
            }
            let spec = match table.lookup(&atom.pred) {
                Some(spec) => Some(spec),
                None if is_known_unlisted(&atom.pred) => {
                    if !opts.allow_unknown_builtins {
                        return Err(AbstractionError::UnknownBuiltin {
                            key: atom.pred.clone(),
                            line: c.line,
                        });
                    }
                    prog.warnings.push(Warning {
                        line: c.line,
                        message: format!("builtin {} has no mode specification; assuming 0 <> 0", atom.pred),
                    });
                    Some(BuiltinSpec {
                        key: atom.pred.clone(),
                        required: BoolFn::bottom(),
                        success: BoolFn::bottom(),
                    })
                }
                None => None,
            };
            match spec {
                Some(spec) => {
                    let stand_in = builtin_pred(&atom.pred);
                    if !prog.preds.contains_key(&stand_in) {
                        prog.preds.insert(stand_in.clone(), PredKind::Builtin);
                        let arity = atom.pred.arity as u32;
                        builtin_clauses.push(AbstractClause {
                            head: stand_in.clone(),
                            args: (0..arity).map(VarId).collect(),
                            required: spec.required,
                            constraint: spec.success,
                            body: Vec::new(),
                            var_names: (1..=arity).map(|i| format!("x{i}")).collect(),
                            line: 0,
                        });
                    }
                    body.push(BodyAtom {
                        pred: stand_in,
                        args: atom.args.clone(),
                    });
                }
                None => {
                    if !prog.preds.contains_key(&atom.pred) {
                        prog.preds.insert(atom.pred.clone(), PredKind::Undefined);
                        prog.warnings.push(Warning {
                            line: c.line,
                            message: format!("{} is called but never defined", atom.pred),
                        });
                    }
                    body.push(atom.clone());
                }
            }
        }
        prog.clauses.push(AbstractClause {
            head: c.head.clone(),
            args: c.head_args.clone(),
            required: required.get(&c.head).cloned().unwrap_or_else(BoolFn::top),
            constraint,
            body,
            var_names: c.var_names.clone(),
            line: c.line,
        });
    }
    prog.clauses.extend(builtin_clauses);
    Ok(prog)
}

/// Normalizes and abstracts a parsed program.
pub fn abstract_source(
    src: &SourceProgram,
    table: &BuiltinTable,
    opts: &AbstractionOptions,
) -> Result<AbstractProgram, AbstractionError> {
    abstract_program(&normalize(&src.clauses), &src.assertions, table, opts)
}
