use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::hash::BuildHasherDefault;
use std::sync::Arc;

use rustc_hash::FxHasher;

use crate::frontend::ast::{write_atom, Term};

/// Runtime term. Variables are numbered per run.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Value {
    Var(u32),
    Atom(Arc<str>),
    Int(i64),
    Struct(Arc<str>, Arc<[Value]>),
}

impl Value {
    pub fn atom(name: &str) -> Value {
        Value::Atom(name.into())
    }

    pub fn compound(name: &str, args: Vec<Value>) -> Value {
        if args.is_empty() {
            Value::atom(name)
        } else {
            Value::Struct(name.into(), args.into())
        }
    }

    pub fn nil() -> Value {
        Value::atom("[]")
    }

    pub fn cons(head: Value, tail: Value) -> Value {
        Value::compound(".", vec![head, tail])
    }

    pub fn list(items: Vec<Value>) -> Value {
        items.into_iter().rev().fold(Value::nil(), |t, h| Value::cons(h, t))
    }

    pub fn args(&self) -> &[Value] {
        match self {
            Value::Struct(_, args) => args,
            _ => &[],
        }
    }

    pub fn functor(&self) -> Option<(&str, usize)> {
        match self {
            Value::Atom(a) => Some((a, 0)),
            Value::Struct(f, args) => Some((f, args.len())),
            _ => None,
        }
    }

    /// Converts a source term, numbering its variables from `*next` on.
    /// Every `_` gets its own variable.
    pub fn from_term(t: &Term, names: &mut HashMap<String, u32>, next: &mut u32) -> Value {
        match t {
            Term::Var(n) if n == "_" => {
                *next += 1;
                Value::Var(*next - 1)
            }
            Term::Var(n) => {
                let v = *names.entry(n.clone()).or_insert_with(|| {
                    *next += 1;
                    *next - 1
                });
                Value::Var(v)
            }
            Term::Atom(a) => Value::atom(a),
            Term::Int(i) => Value::Int(*i),
            Term::Compound(f, args) => Value::compound(
                f,
                args.iter().map(|a| Value::from_term(a, names, next)).collect(),
            ),
        }
    }

    /// Adds `base` to every variable.
    pub fn shift(&self, base: u32) -> Value {
        match self {
            Value::Var(v) => Value::Var(v + base),
            Value::Struct(f, args) => Value::Struct(f.clone(), args.iter().map(|a| a.shift(base)).collect()),
            other => other.clone(),
        }
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Value::Var(_) => false,
            Value::Struct(_, args) => args.iter().all(Value::is_ground),
            _ => true,
        }
    }

    pub fn vars(&self, out: &mut Vec<u32>) {
        match self {
            Value::Var(v) => {
                if !out.contains(v) {
                    out.push(*v);
                }
            }
            Value::Struct(_, args) => args.iter().for_each(|a| a.vars(out)),
            _ => {}
        }
    }

    /// Elements of a proper list.
    pub fn list_items(&self) -> Option<Vec<Value>> {
        let mut out = Vec::new();
        let mut t = self;
        loop {
            match t {
                Value::Atom(a) if &**a == "[]" => return Some(out),
                Value::Struct(f, args) if &**f == "." && args.len() == 2 => {
                    out.push(args[0].clone());
                    t = &args[1];
                }
                _ => return None,
            }
        }
    }

    /// Standard order: variables, numbers, atoms, compounds (by arity,
    /// name, then arguments).
    pub fn standard_cmp(&self, other: &Value) -> Ordering {
        fn rank(v: &Value) -> u8 {
            match v {
                Value::Var(_) => 0,
                Value::Int(_) => 1,
                Value::Atom(_) => 2,
                Value::Struct(..) => 3,
            }
        }
        match (self, other) {
            (Value::Var(a), Value::Var(b)) => a.cmp(b),
            (Value::Int(a), Value::Int(b)) => a.cmp(b),
            (Value::Atom(a), Value::Atom(b)) => a.cmp(b),
            (Value::Struct(f, xs), Value::Struct(g, ys)) => xs
                .len()
                .cmp(&ys.len())
                .then_with(|| f.cmp(g))
                .then_with(|| {
                    xs.iter()
                        .zip(ys.iter())
                        .map(|(x, y)| x.standard_cmp(y))
                        .find(|o| o.is_ne())
                        .unwrap_or(Ordering::Equal)
                }),
            _ => rank(self).cmp(&rank(other)),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Var(v) => write!(f, "_{v}"),
            Value::Atom(a) => write_atom(f, a),
            Value::Int(i) => write!(f, "{i}"),
            Value::Struct(name, args) if &**name == "." && args.len() == 2 => {
                write!(f, "[{}", args[0])?;
                let mut tail = &args[1];
                loop {
                    match tail {
                        Value::Struct(n, a) if &**n == "." && a.len() == 2 => {
                            write!(f, ",{}", a[0])?;
                            tail = &a[1];
                        }
                        Value::Atom(n) if &**n == "[]" => break,
                        other => {
                            write!(f, "|{other}")?;
                            break;
                        }
                    }
                }
                f.write_str("]")
            }
            Value::Struct(name, args) => {
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

/// Bindings in triangular form: a bound variable may map to a term that
/// mentions other bound variables, never (through any chain) to itself.
/// [`solved`](Substitution::solved) gives the equivalent idempotent map.
#[derive(Clone, Debug, Default)]
pub struct Substitution {
    bindings: im::HashMap<u32, Value, BuildHasherDefault<FxHasher>>,
}

impl Substitution {
    pub fn new() -> Substitution {
        Substitution::default()
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    pub fn lookup(&self, v: u32) -> Option<&Value> {
        self.bindings.get(&v)
    }

    /// Follows variable bindings at the top of `t`.
    pub fn walk(&self, t: &Value) -> Value {
        let mut t = t.clone();
        while let Value::Var(v) = t {
            match self.bindings.get(&v) {
                Some(b) => t = b.clone(),
                None => break,
            }
        }
        t
    }

    /// `t` with every bound variable replaced, all the way down.
    pub fn resolve(&self, t: &Value) -> Value {
        match self.walk(t) {
            Value::Struct(f, args) => Value::Struct(f, args.iter().map(|a| self.resolve(a)).collect()),
            other => other,
        }
    }

    pub fn is_ground(&self, t: &Value) -> bool {
        match self.walk(t) {
            Value::Var(_) => false,
            Value::Struct(_, args) => args.iter().all(|a| self.is_ground(a)),
            _ => true,
        }
    }

    fn occurs(&self, v: u32, t: &Value) -> bool {
        match self.walk(t) {
            Value::Var(w) => v == w,
            Value::Struct(_, args) => args.iter().any(|a| self.occurs(v, a)),
            _ => false,
        }
    }

    /// Binds an unbound variable. The caller guarantees `v` is unbound and
    /// does not occur in `t`.
    fn bind(&mut self, v: u32, t: Value) {
        debug_assert!(!self.bindings.contains_key(&v));
        self.bindings.insert(v, t);
    }

    /// Idempotent form: every binding fully resolved.
    pub fn solved(&self) -> BTreeMap<u32, Value> {
        self.bindings.keys().map(|&v| (v, self.resolve(&Value::Var(v)))).collect()
    }
}

/// Most general unifier of `a` and `b` composed with `s`, with the occurs
/// check. `None` on a clash or a cyclic binding.
pub fn unify(a: &Value, b: &Value, s: &Substitution) -> Option<Substitution> {
    let mut s = s.clone();
    let mut stack = vec![(a.clone(), b.clone())];
    while let Some((x, y)) = stack.pop() {
        let x = s.walk(&x);
        let y = s.walk(&y);
        match (x, y) {
            (Value::Var(v), Value::Var(w)) if v == w => {}
            // Newer variables point at older ones so chains stay short.
            (Value::Var(v), Value::Var(w)) => s.bind(v.max(w), Value::Var(v.min(w))),
            (Value::Var(v), t) | (t, Value::Var(v)) => {
                if s.occurs(v, &t) {
                    return None;
                }
                s.bind(v, t);
            }
            (Value::Int(i), Value::Int(j)) if i == j => {}
            (Value::Atom(p), Value::Atom(q)) if p == q => {}
            (Value::Struct(f, xs), Value::Struct(g, ys)) if f == g && xs.len() == ys.len() => {
                stack.extend(xs.iter().cloned().zip(ys.iter().cloned()));
            }
            _ => return None,
        }
    }
    Some(s)
}

/// Whether an idempotent map really is idempotent: no bound variable
/// occurs in any binding.
pub fn is_idempotent(m: &BTreeMap<u32, Value>) -> bool {
    m.values().all(|t| {
        let mut vs = Vec::new();
        t.vars(&mut vs);
        vs.iter().all(|v| !m.contains_key(v))
    })
}
