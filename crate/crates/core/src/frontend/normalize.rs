//! Rewriting clauses so that every head and body atom has pairwise distinct
//! variable arguments, with explicit flat equations at the neck.

use std::collections::HashSet;
use std::fmt;

use crate::pos::VarId;

use super::ast::{Goal, PredKey, SourceClause, Term};

/// Right-hand side of a flat equation `x = t`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum FlatTerm {
    Var(VarId),
    Atom(String),
    Int(i64),
    Struct(String, Vec<VarId>),
}

impl FlatTerm {
    /// Variables of the term, in order (with repeats).
    pub fn vars(&self) -> &[VarId] {
        match self {
            FlatTerm::Var(v) => std::slice::from_ref(v),
            FlatTerm::Struct(_, vs) => vs,
            _ => &[],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Equation {
    pub lhs: VarId,
    pub rhs: FlatTerm,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BodyAtom {
    pub pred: PredKey,
    pub args: Vec<VarId>,
}

/// A normalized clause. Variables are numbered by first occurrence with the
/// head arguments first, so `head_args[i] == VarId(i)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormClause {
    pub head: PredKey,
    pub head_args: Vec<VarId>,
    pub eqns: Vec<Equation>,
    pub body: Vec<BodyAtom>,
    pub var_names: Vec<String>,
    pub line: usize,
}

impl NormClause {
    pub fn num_vars(&self) -> usize {
        self.var_names.len()
    }

    pub fn var_name(&self, v: VarId) -> &str {
        &self.var_names[v.index()]
    }

    fn var_term(&self, v: VarId) -> Term {
        Term::Var(self.var_name(v).to_string())
    }

    fn atom_term(&self, pred: &PredKey, args: &[VarId]) -> Term {
        if args.is_empty() {
            Term::Atom(pred.name.clone())
        } else {
            Term::Compound(pred.name.clone(), args.iter().map(|&v| self.var_term(v)).collect())
        }
    }

    pub fn flat_to_term(&self, t: &FlatTerm) -> Term {
        match t {
            FlatTerm::Var(v) => self.var_term(*v),
            FlatTerm::Atom(a) => Term::Atom(a.clone()),
            FlatTerm::Int(i) => Term::Int(*i),
            FlatTerm::Struct(f, args) => {
                Term::Compound(f.clone(), args.iter().map(|&v| self.var_term(v)).collect())
            }
        }
    }

    /// The clause written back as source, equations first.
    pub fn to_source(&self) -> SourceClause {
        let mut body: Vec<Goal> = self
            .eqns
            .iter()
            .map(|e| Goal::Eq(self.var_term(e.lhs), self.flat_to_term(&e.rhs)))
            .collect();
        body.extend(
            self.body
                .iter()
                .map(|a| Goal::Call(self.atom_term(&a.pred, &a.args))),
        );
        SourceClause {
            head: self.atom_term(&self.head, &self.head_args),
            body,
            line: self.line,
        }
    }

    /// Every atom has distinct variable arguments and every variable is
    /// in range.
    pub fn is_normal(&self) -> bool {
        let distinct = |vs: &[VarId]| {
            let set: HashSet<_> = vs.iter().collect();
            set.len() == vs.len() && vs.iter().all(|v| v.index() < self.num_vars())
        };
        distinct(&self.head_args)
            && self.head_args.len() == self.head.arity
            && self.body.iter().all(|a| distinct(&a.args) && a.args.len() == a.pred.arity)
    }
}

impl fmt::Display for NormClause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_source())
    }
}

fn is_equation(g: &Goal) -> Option<(&Term, &Term)> {
    match g {
        Goal::Eq(a, b) => Some((a, b)),
        Goal::Call(Term::Compound(f, args)) if f == "=" && args.len() == 2 => Some((&args[0], &args[1])),
        _ => None,
    }
}

fn goal_term(g: &Goal) -> Term {
    match g {
        Goal::Call(t) => t.clone(),
        Goal::Eq(a, b) => Term::Compound("=".into(), vec![a.clone(), b.clone()]),
    }
}

/// Per-clause state: fresh names and the equations gathered so far.
struct ClauseBuilder {
    taken: HashSet<String>,
    counter: usize,
    eqns: Vec<(String, Term)>,
}

impl ClauseBuilder {
    fn fresh(&mut self, prefix: &str) -> String {
        loop {
            self.counter += 1;
            let name = format!("{prefix}{}", self.counter);
            if self.taken.insert(name.clone()) {
                return name;
            }
        }
    }

    fn var_or_fresh(&mut self, name: &str) -> String {
        if name == "_" {
            self.fresh("_G")
        } else {
            name.to_string()
        }
    }

    /// Distinct variable arguments for one atom, adding equations for
    /// non-variables and repeats.
    fn atom_args(&mut self, args: &[Term]) -> Vec<String> {
        let mut out: Vec<String> = Vec::with_capacity(args.len());
        for a in args {
            match a {
                Term::Var(n) if n == "_" => out.push(self.fresh("_G")),
                Term::Var(n) if !out.contains(n) => out.push(n.clone()),
                other => {
                    let t = self.fresh("_T");
                    self.eqns.push((t.clone(), other.clone()));
                    out.push(t);
                }
            }
        }
        out
    }

    fn equation(&mut self, s: &Term, t: &Term) {
        match (s, t) {
            (Term::Var(x), _) => {
                let x = self.var_or_fresh(x);
                self.eqns.push((x, t.clone()));
            }
            (_, Term::Var(y)) => {
                let y = self.var_or_fresh(y);
                self.eqns.push((y, s.clone()));
            }
            _ => {
                let v = self.fresh("_T");
                self.eqns.push((v.clone(), s.clone()));
                self.eqns.push((v, t.clone()));
            }
        }
    }

    /// One functor per equation; nested arguments chain after their parent.
    fn flatten(&mut self, eqns: Vec<(String, Term)>) -> Vec<(String, NamedFlat)> {
        let mut out = Vec::new();
        for (lhs, rhs) in eqns {
            self.flatten_one(lhs, rhs, &mut out);
        }
        out
    }

    fn flatten_one(&mut self, lhs: String, rhs: Term, out: &mut Vec<(String, NamedFlat)>) {
        match rhs {
            Term::Var(n) => {
                let n = self.var_or_fresh(&n);
                out.push((lhs, NamedFlat::Var(n)));
            }
            Term::Atom(a) => out.push((lhs, NamedFlat::Atom(a))),
            Term::Int(i) => out.push((lhs, NamedFlat::Int(i))),
            Term::Compound(f, args) => {
                let mut names = Vec::with_capacity(args.len());
                let mut nested = Vec::new();
                for a in args {
                    match a {
                        Term::Var(n) => names.push(self.var_or_fresh(&n)),
                        other => {
                            let t = self.fresh("_T");
                            names.push(t.clone());
                            nested.push((t, other));
                        }
                    }
                }
                out.push((lhs, NamedFlat::Struct(f, names)));
                for (t, sub) in nested {
                    self.flatten_one(t, sub, out);
                }
            }
        }
    }
}

enum NamedFlat {
    Var(String),
    Atom(String),
    Int(i64),
    Struct(String, Vec<String>),
}

struct Interner {
    names: Vec<String>,
}

impl Interner {
    fn id(&mut self, name: &str) -> VarId {
        match self.names.iter().position(|n| n == name) {
            Some(i) => VarId(i as u32),
            None => {
                self.names.push(name.to_string());
                VarId(self.names.len() as u32 - 1)
            }
        }
    }
}

fn source_var_names(c: &SourceClause) -> HashSet<String> {
    let mut names: HashSet<String> = c.head.variables().into_iter().collect();
    for g in &c.body {
        names.extend(goal_term(g).variables());
    }
    names
}

pub fn normalize_clause(c: &SourceClause) -> NormClause {
    let mut b = ClauseBuilder {
        taken: source_var_names(c),
        counter: 0,
        eqns: Vec::new(),
    };
    let head_key = c.pred_key();
    let head_args = b.atom_args(c.head.args());

    // Explicit equations before the first call belong to the neck; later
    // ones are calls to the builtin `=/2`.
    let leading = c.body.iter().take_while(|g| is_equation(g).is_some()).count();
    for g in &c.body[..leading] {
        let (s, t) = is_equation(g).expect("leading goals are equations");
        b.equation(s, t);
    }
    let mut calls = Vec::new();
    for g in &c.body[leading..] {
        let t = goal_term(g);
        let key = t.pred_key().expect("goals are callable");
        let args = b.atom_args(t.args());
        calls.push((key, args));
    }
    let raw = std::mem::take(&mut b.eqns);
    let flat = b.flatten(raw);

    let mut int = Interner { names: Vec::new() };
    let head_ids: Vec<VarId> = head_args.iter().map(|n| int.id(n)).collect();
    let eqns = flat
        .into_iter()
        .map(|(lhs, rhs)| {
            let lhs = int.id(&lhs);
            let rhs = match rhs {
                NamedFlat::Var(n) => FlatTerm::Var(int.id(&n)),
                NamedFlat::Atom(a) => FlatTerm::Atom(a),
                NamedFlat::Int(i) => FlatTerm::Int(i),
                NamedFlat::Struct(f, args) => {
                    FlatTerm::Struct(f, args.iter().map(|n| int.id(n)).collect())
                }
            };
            Equation { lhs, rhs }
        })
        .collect();
    let body = calls
        .into_iter()
        .map(|(pred, args)| BodyAtom {
            pred,
            args: args.iter().map(|n| int.id(n)).collect(),
        })
        .collect();
    NormClause {
        head: head_key,
        head_args: head_ids,
        eqns,
        body,
        var_names: int.names,
        line: c.line,
    }
}

pub fn normalize(clauses: &[SourceClause]) -> Vec<NormClause> {
    clauses.iter().map(normalize_clause).collect()
}
