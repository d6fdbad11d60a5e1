//! The Pos domain of groundness dependencies.
//!
//! A [`BoolFn`] is a Boolean function over [`VarId`]s stored as a reduced
//! ordered decision diagram (variables ordered by index). Elements of Pos are
//! the functions that are true when every variable is true, plus the bottom
//! element `false`. The type itself can hold any Boolean function because
//! cofactors of positive functions need not be positive; every operation that
//! is closed in Pos documents so.

mod bdd;
mod syntax;
pub mod truth_table;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rustc_hash::FxHashMap;
use thiserror::Error;

use bdd::{Arena, Diagram, NodeRef, Op};

pub use syntax::{format_formula, parse_formula, parse_positional, FormulaSyntaxError};

/// A logical variable inside one analysis universe.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId(pub u32);

impl VarId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}", self.0 + 1)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PosError {
    #[error("assignment covers {got} variables but the function depends on variable {needed}")]
    AssignmentTooShort { needed: VarId, got: usize },
    #[error("renaming is not injective: {0} has two images or two sources share image {1}")]
    NonInjective(VarId, VarId),
    #[error(transparent)]
    Syntax(#[from] FormulaSyntaxError),
}

/// Quantifier used when projecting variables away.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Quantifier {
    Exists,
    Forall,
}

/// A conjunction of literals, sorted by variable. `true` marks a positive
/// literal.
pub type Cube = Vec<(VarId, bool)>;

/// A Boolean function in canonical decision-diagram form.
///
/// Values are immutable and cheap to clone; equality is semantic equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BoolFn {
    d: Diagram,
}

impl BoolFn {
    pub fn top() -> BoolFn {
        BoolFn {
            d: Diagram::constant(true),
        }
    }

    pub fn bottom() -> BoolFn {
        BoolFn {
            d: Diagram::constant(false),
        }
    }

    pub fn constant(value: bool) -> BoolFn {
        if value {
            BoolFn::top()
        } else {
            BoolFn::bottom()
        }
    }

    pub fn var(v: VarId) -> BoolFn {
        BoolFn::literal(v, true)
    }

    /// `v` or `¬v`. Negative literals are not in Pos.
    pub fn literal(v: VarId, positive: bool) -> BoolFn {
        let mut arena = Arena::new();
        let r = arena.literal(v, positive);
        BoolFn {
            d: arena.export(r),
        }
    }

    pub fn is_true(&self) -> bool {
        self.d.root == NodeRef::TRUE
    }

    pub fn is_false(&self) -> bool {
        self.d.root == NodeRef::FALSE
    }

    /// Number of decision nodes.
    pub fn size(&self) -> usize {
        self.d.nodes.len()
    }

    fn binary(&self, op: Op, other: &BoolFn) -> BoolFn {
        let mut arena = Arena::new();
        let a = arena.import(&self.d);
        let b = arena.import(&other.d);
        let r = arena.apply(op, a, b);
        BoolFn {
            d: arena.export(r),
        }
    }

    /// Meet: logical conjunction.
    pub fn conj(&self, other: &BoolFn) -> BoolFn {
        if self.is_true() || other.is_false() {
            return other.clone();
        }
        if other.is_true() || self.is_false() {
            return self.clone();
        }
        self.binary(Op::And, other)
    }

    /// Join: logical disjunction.
    pub fn disj(&self, other: &BoolFn) -> BoolFn {
        if self.is_false() || other.is_true() {
            return other.clone();
        }
        if other.is_false() || self.is_true() {
            return self.clone();
        }
        self.binary(Op::Or, other)
    }

    /// The weakest positive `h` with `self ∧ h ⊨ other`. This is classical
    /// implication whenever `other` is positive; for `other = false` the only
    /// candidate in Pos is `false` itself (unless `self` is `false`).
    pub fn pseudo_complement(&self, other: &BoolFn) -> BoolFn {
        if self.is_false() || other.is_true() {
            return BoolFn::top();
        }
        if other.is_false() {
            return BoolFn::bottom();
        }
        self.implies(other)
    }

    /// Classical implication `¬self ∨ other`.
    pub fn implies(&self, other: &BoolFn) -> BoolFn {
        if self.is_false() || other.is_true() {
            return BoolFn::top();
        }
        if self.is_true() {
            return other.clone();
        }
        self.binary(Op::Implies, other)
    }

    pub fn iff(&self, other: &BoolFn) -> BoolFn {
        self.binary(Op::Iff, other)
    }

    /// Classical negation. Never positive unless the input is `false`.
    pub fn negate(&self) -> BoolFn {
        let mut arena = Arena::new();
        let a = arena.import(&self.d);
        let r = arena.not(a);
        BoolFn {
            d: arena.export(r),
        }
    }

    pub fn conj_all<'a>(fs: impl IntoIterator<Item = &'a BoolFn>) -> BoolFn {
        let mut arena = Arena::new();
        let mut acc = NodeRef::TRUE;
        for f in fs {
            let r = arena.import(&f.d);
            acc = arena.apply(Op::And, acc, r);
            if acc == NodeRef::FALSE {
                break;
            }
        }
        BoolFn {
            d: arena.export(acc),
        }
    }

    pub fn disj_all<'a>(fs: impl IntoIterator<Item = &'a BoolFn>) -> BoolFn {
        let mut arena = Arena::new();
        let mut acc = NodeRef::FALSE;
        for f in fs {
            let r = arena.import(&f.d);
            acc = arena.apply(Op::Or, acc, r);
        }
        BoolFn {
            d: arena.export(acc),
        }
    }

    /// Cofactor `f[v ↦ value]`. The result may leave Pos.
    pub fn restrict(&self, v: VarId, value: bool) -> BoolFn {
        let mut arena = Arena::new();
        let a = arena.import(&self.d);
        let r = arena.restrict(a, v, value);
        BoolFn {
            d: arena.export(r),
        }
    }

    /// Schröder elimination `f[v ↦ 1] ∨ f[v ↦ 0]`.
    pub fn exists(&self, v: VarId) -> BoolFn {
        let mut arena = Arena::new();
        let a = arena.import(&self.d);
        let r = exists_in(&mut arena, a, v);
        BoolFn {
            d: arena.export(r),
        }
    }

    /// `f[v ↦ 0] ∧ f[v ↦ 1]` when that is positive, `false` otherwise.
    pub fn forall(&self, v: VarId) -> BoolFn {
        let mut arena = Arena::new();
        let a = arena.import(&self.d);
        let r = forall_in(&mut arena, a, v);
        BoolFn {
            d: arena.export(r),
        }
    }

    /// Classical universal quantification, without the Pos membership test.
    pub fn forall_classical(&self, v: VarId) -> BoolFn {
        let mut arena = Arena::new();
        let a = arena.import(&self.d);
        let lo = arena.restrict(a, v, false);
        let hi = arena.restrict(a, v, true);
        let r = arena.apply(Op::And, lo, hi);
        BoolFn {
            d: arena.export(r),
        }
    }

    pub fn exists_set(&self, vs: impl IntoIterator<Item = VarId>) -> BoolFn {
        let mut arena = Arena::new();
        let mut a = arena.import(&self.d);
        for v in vs {
            a = exists_in(&mut arena, a, v);
        }
        BoolFn {
            d: arena.export(a),
        }
    }

    pub fn forall_set(&self, vs: impl IntoIterator<Item = VarId>) -> BoolFn {
        let mut arena = Arena::new();
        let mut a = arena.import(&self.d);
        for v in vs {
            a = forall_in(&mut arena, a, v);
            if a == NodeRef::FALSE {
                break;
            }
        }
        BoolFn {
            d: arena.export(a),
        }
    }

    /// Eliminates every variable of the support that is not in `keep`.
    pub fn project_onto(&self, keep: &BTreeSet<VarId>, quantifier: Quantifier) -> BoolFn {
        let drop: Vec<VarId> = self
            .support()
            .into_iter()
            .filter(|v| !keep.contains(v))
            .collect();
        match quantifier {
            Quantifier::Exists => self.exists_set(drop),
            Quantifier::Forall => self.forall_set(drop),
        }
    }

    /// Simultaneous substitution of variables by variables.
    pub fn rename(&self, r: &Renaming) -> BoolFn {
        if self.d.root.is_terminal() || r.is_identity() {
            return self.clone();
        }
        let mut arena = Arena::new();
        // Nodes are stored children-first, so one forward pass suffices.
        let mut built: Vec<NodeRef> = Vec::with_capacity(self.d.nodes.len());
        let fix = |built: &Vec<NodeRef>, x: NodeRef| if x.is_terminal() { x } else { built[x.index()] };
        for n in self.d.nodes.iter() {
            let low = fix(&built, n.low);
            let high = fix(&built, n.high);
            let r = arena.ite_var(r.apply(n.var), high, low);
            built.push(r);
        }
        let root = fix(&built, self.d.root);
        BoolFn {
            d: arena.export(root),
        }
    }

    /// `self ⊨ other`.
    pub fn entails(&self, other: &BoolFn) -> bool {
        self.d.entails(&other.d)
    }

    pub fn equiv(&self, other: &BoolFn) -> bool {
        self == other
    }

    /// Evaluates under `assignment[i]` for variable `VarId(i)`.
    pub fn eval(&self, assignment: &[bool]) -> Result<bool, PosError> {
        if let Some(&max) = self.support().iter().next_back() {
            if max.index() >= assignment.len() {
                return Err(PosError::AssignmentTooShort {
                    needed: max,
                    got: assignment.len(),
                });
            }
        }
        Ok(self.d.eval(&|v| assignment[v.index()]))
    }

    pub fn eval_with(&self, value_of: impl Fn(VarId) -> bool) -> bool {
        self.d.eval(&value_of)
    }

    /// Value at the all-ones assignment.
    pub fn holds_at_top(&self) -> bool {
        self.d.eval(&|_| true)
    }

    /// `false`, or true at the all-ones assignment.
    pub fn is_positive(&self) -> bool {
        self.is_false() || self.holds_at_top()
    }

    /// Upward closed: raising any variable from 0 to 1 preserves truth.
    pub fn is_monotone(&self) -> bool {
        self.support()
            .into_iter()
            .all(|v| self.restrict(v, false).entails(&self.restrict(v, true)))
    }

    pub fn support(&self) -> BTreeSet<VarId> {
        self.d.nodes.iter().map(|n| n.var).collect()
    }

    /// The conjunction `∧ vs`.
    /// Builds the function over `x1..x{nvars}` whose value on the row with
    /// bit `i` set for true `x{i+1}` is `value(row)`.
    pub fn from_rows(nvars: u32, value: impl Fn(u64) -> bool) -> BoolFn {
        fn build(
            arena: &mut Arena,
            var: u32,
            nvars: u32,
            row: u64,
            value: &dyn Fn(u64) -> bool,
        ) -> NodeRef {
            if var == nvars {
                return NodeRef::terminal(value(row));
            }
            let low = build(arena, var + 1, nvars, row, value);
            let high = build(arena, var + 1, nvars, row | 1 << var, value);
            arena.mk(VarId(var), low, high)
        }
        assert!(nvars < 64, "row index must fit in 64 bits");
        let mut arena = Arena::new();
        let r = build(&mut arena, 0, nvars, 0, &value);
        BoolFn {
            d: arena.export(r),
        }
    }

    pub fn all_of(vs: impl IntoIterator<Item = VarId>) -> BoolFn {
        let mut vars: Vec<VarId> = vs.into_iter().collect();
        vars.sort();
        vars.dedup();
        let mut arena = Arena::new();
        let mut acc = NodeRef::TRUE;
        for v in vars.into_iter().rev() {
            acc = arena.mk(v, NodeRef::FALSE, acc);
        }
        BoolFn {
            d: arena.export(acc),
        }
    }

    /// All prime implicants, each sorted by variable; shorter cubes first, ties
    /// broken lexicographically.
    pub fn prime_implicants(&self) -> Vec<Cube> {
        let mut memo = FxHashMap::default();
        let mut primes = primes_rec(self, &mut memo);
        primes.sort_by(|a, b| {
            a.len()
                .cmp(&b.len())
                .then_with(|| a.iter().map(lit_key).cmp(b.iter().map(lit_key)))
        });
        primes
    }
}

fn lit_key(l: &(VarId, bool)) -> (VarId, bool) {
    // Positive literal before its negation.
    (l.0, !l.1)
}

fn exists_in(arena: &mut Arena, a: NodeRef, v: VarId) -> NodeRef {
    let lo = arena.restrict(a, v, false);
    let hi = arena.restrict(a, v, true);
    arena.apply(Op::Or, lo, hi)
}

fn forall_in(arena: &mut Arena, a: NodeRef, v: VarId) -> NodeRef {
    let lo = arena.restrict(a, v, false);
    let hi = arena.restrict(a, v, true);
    let r = arena.apply(Op::And, lo, hi);
    // Pos membership: the all-ones assignment must satisfy the result.
    if arena.holds_at_top(r) {
        r
    } else {
        NodeRef::FALSE
    }
}

fn primes_rec(f: &BoolFn, memo: &mut FxHashMap<BoolFn, Vec<Cube>>) -> Vec<Cube> {
    if f.is_false() {
        return Vec::new();
    }
    if f.is_true() {
        return vec![Vec::new()];
    }
    if let Some(p) = memo.get(f) {
        return p.clone();
    }
    let top = f.d.node(f.d.root).var;
    let f0 = f.restrict(top, false);
    let f1 = f.restrict(top, true);
    let shared = primes_rec(&f0.conj(&f1), memo);
    let shared_set: BTreeSet<&Cube> = shared.iter().collect();
    let mut out = shared.clone();
    for (cof, positive) in [(&f0, false), (&f1, true)] {
        for cube in primes_rec(cof, memo) {
            if shared_set.contains(&cube) {
                continue;
            }
            let mut c = cube.clone();
            c.push((top, positive));
            c.sort();
            out.push(c);
        }
    }
    memo.insert(f.clone(), out.clone());
    out
}

impl fmt::Debug for BoolFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BoolFn({self})")
    }
}

impl fmt::Display for BoolFn {
    /// Sum of prime implicants over positional names `x1, x2, ...`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_formula(self, &|v| v.to_string()))
    }
}

/// An injective variable-to-variable map applied as a simultaneous
/// substitution. Variables outside the domain map to themselves.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Renaming {
    map: BTreeMap<VarId, VarId>,
}

impl Renaming {
    pub fn new(pairs: impl IntoIterator<Item = (VarId, VarId)>) -> Result<Renaming, PosError> {
        let mut map = BTreeMap::new();
        let mut images = BTreeMap::new();
        for (from, to) in pairs {
            if let Some(&prev) = map.get(&from) {
                if prev != to {
                    return Err(PosError::NonInjective(from, to));
                }
                continue;
            }
            if let Some(&other) = images.get(&to) {
                if other != from {
                    return Err(PosError::NonInjective(from, to));
                }
            }
            map.insert(from, to);
            images.insert(to, from);
        }
        Ok(Renaming { map })
    }

    pub fn identity() -> Renaming {
        Renaming::default()
    }

    /// Maps positional variables `x1..xN` onto `targets`.
    pub fn from_positions(targets: &[VarId]) -> Result<Renaming, PosError> {
        Renaming::new(
            targets
                .iter()
                .enumerate()
                .map(|(i, &t)| (VarId(i as u32), t)),
        )
    }

    pub fn apply(&self, v: VarId) -> VarId {
        self.map.get(&v).copied().unwrap_or(v)
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().all(|(a, b)| a == b)
    }

    pub fn inverse(&self) -> Renaming {
        Renaming {
            map: self.map.iter().map(|(&a, &b)| (b, a)).collect(),
        }
    }

    pub fn pairs(&self) -> impl Iterator<Item = (VarId, VarId)> + '_ {
        self.map.iter().map(|(&a, &b)| (a, b))
    }
}
