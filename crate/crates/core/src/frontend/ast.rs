use std::fmt;

use serde::Serialize;

/// Predicate symbol: name and arity.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct PredKey {
    pub name: String,
    pub arity: usize,
}

impl PredKey {
    pub fn new(name: impl Into<String>, arity: usize) -> PredKey {
        PredKey {
            name: name.into(),
            arity,
        }
    }
}

impl fmt::Display for PredKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.name, self.arity)
    }
}

/// Source-level term. Lists are `'.'/2` cells ending in `[]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Var(String),
    Atom(String),
    Int(i64),
    Compound(String, Vec<Term>),
}

impl Term {
    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }

    pub fn is_anonymous(&self) -> bool {
        matches!(self, Term::Var(n) if n == "_")
    }

    /// Predicate key when the term is used as a goal or head.
    pub fn pred_key(&self) -> Option<PredKey> {
        match self {
            Term::Atom(a) => Some(PredKey::new(a.clone(), 0)),
            Term::Compound(f, args) => Some(PredKey::new(f.clone(), args.len())),
            _ => None,
        }
    }

    pub fn args(&self) -> &[Term] {
        match self {
            Term::Compound(_, args) => args,
            _ => &[],
        }
    }

    pub fn cons(head: Term, tail: Term) -> Term {
        Term::Compound(".".into(), vec![head, tail])
    }

    pub fn nil() -> Term {
        Term::Atom("[]".into())
    }

    /// Variable names in left-to-right order of first occurrence.
    pub fn variables(&self) -> Vec<String> {
        fn walk(t: &Term, out: &mut Vec<String>) {
            match t {
                Term::Var(n) => {
                    if !out.contains(n) {
                        out.push(n.clone());
                    }
                }
                Term::Compound(_, args) => args.iter().for_each(|a| walk(a, out)),
                _ => {}
            }
        }
        let mut out = Vec::new();
        walk(self, &mut out);
        out
    }
}

pub(crate) fn atom_needs_quotes(a: &str) -> bool {
    let mut chars = a.chars();
    match chars.next() {
        None => true,
        Some(c) if c.is_ascii_lowercase() => !a.chars().all(|c| c.is_ascii_alphanumeric() || c == '_'),
        Some(_) => {
            let symbolic = a.chars().all(|c| "+-*/\\^<>=~:.?@#&$".contains(c));
            !(symbolic || a == "[]" || a == "!" || a == ";" || a == "{}")
        }
    }
}

pub(crate) fn write_atom(f: &mut fmt::Formatter<'_>, a: &str) -> fmt::Result {
    if atom_needs_quotes(a) {
        write!(f, "'{}'", a.replace('\'', "''"))
    } else {
        f.write_str(a)
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(n) => f.write_str(n),
            Term::Atom(a) => write_atom(f, a),
            Term::Int(i) => write!(f, "{i}"),
            Term::Compound(name, args) if name == "." && args.len() == 2 => {
                write!(f, "[{}", args[0])?;
                let mut tail = &args[1];
                loop {
                    match tail {
                        Term::Compound(n, a) if n == "." && a.len() == 2 => {
                            write!(f, ",{}", a[0])?;
                            tail = &a[1];
                        }
                        Term::Atom(n) if n == "[]" => break,
                        other => {
                            write!(f, "|{other}")?;
                            break;
                        }
                    }
                }
                f.write_str("]")
            }
            Term::Compound(name, args) => {
                write_atom(f, name)?;
                f.write_str("(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

/// A body goal: an explicit Herbrand equation or a call.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Goal {
    Call(Term),
    Eq(Term, Term),
}

impl fmt::Display for Goal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Goal::Call(t) => write!(f, "{t}"),
            Goal::Eq(a, b) => write!(f, "{a} = {b}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SourceClause {
    pub head: Term,
    pub body: Vec<Goal>,
    pub line: usize,
}

impl SourceClause {
    pub fn pred_key(&self) -> PredKey {
        self.head.pred_key().expect("clause heads are callable")
    }
}

impl fmt::Display for SourceClause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.head)?;
        for (i, g) in self.body.iter().enumerate() {
            f.write_str(if i == 0 { " :- " } else { ", " })?;
            write!(f, "{g}")?;
        }
        f.write_str(".")
    }
}

/// `:- assertion(Head, 'Formula').` gives a required mode for every clause of
/// the head's predicate. The formula names the head's variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Assertion {
    pub head: Term,
    pub formula: String,
    pub line: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SourceProgram {
    pub clauses: Vec<SourceClause>,
    pub assertions: Vec<Assertion>,
}
