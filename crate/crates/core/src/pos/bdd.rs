//! Reduced ordered decision diagrams backing [`BoolFn`](super::BoolFn).
//!
//! Every `BoolFn` owns its nodes in a flat array laid out in post-order
//! (low child before high child), so two functions are semantically equal
//! exactly when their arrays are equal. Operations import their operands into
//! a scratch [`Arena`] with a unique table, combine them there and export the
//! result back into the canonical layout.

use rustc_hash::{FxHashMap, FxHashSet};
use std::sync::Arc;

use super::VarId;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) struct NodeRef(u32);

impl NodeRef {
    pub(crate) const FALSE: NodeRef = NodeRef(0);
    pub(crate) const TRUE: NodeRef = NodeRef(1);

    fn from_index(index: usize) -> NodeRef {
        NodeRef(index as u32 + 2)
    }

    pub(crate) fn is_terminal(self) -> bool {
        self.0 < 2
    }

    pub(crate) fn index(self) -> usize {
        debug_assert!(!self.is_terminal());
        (self.0 - 2) as usize
    }

    pub(crate) fn terminal(value: bool) -> NodeRef {
        if value {
            NodeRef::TRUE
        } else {
            NodeRef::FALSE
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub(crate) struct Node {
    pub(crate) var: VarId,
    pub(crate) low: NodeRef,
    pub(crate) high: NodeRef,
}

/// Canonical node storage of one function.
#[derive(Clone, PartialEq, Eq, Hash)]
pub(crate) struct Diagram {
    pub(crate) root: NodeRef,
    pub(crate) nodes: Arc<[Node]>,
}

impl Diagram {
    pub(crate) fn constant(value: bool) -> Diagram {
        Diagram {
            root: NodeRef::terminal(value),
            nodes: Arc::from(Vec::new()),
        }
    }

    pub(crate) fn node(&self, r: NodeRef) -> Node {
        self.nodes[r.index()]
    }

    /// Variable labelling `r`, or `u32::MAX` for terminals so that terminals
    /// sort below every decision variable.
    pub(crate) fn level(&self, r: NodeRef) -> u32 {
        if r.is_terminal() {
            u32::MAX
        } else {
            self.node(r).var.0
        }
    }

    pub(crate) fn eval(&self, value_of: &dyn Fn(VarId) -> bool) -> bool {
        let mut r = self.root;
        while !r.is_terminal() {
            let n = self.node(r);
            r = if value_of(n.var) { n.high } else { n.low };
        }
        r == NodeRef::TRUE
    }

    /// Decides `self ⊨ other` without building `self ⇒ other`.
    pub(crate) fn entails(&self, other: &Diagram) -> bool {
        let mut seen = FxHashSet::default();
        entails_rec(self, self.root, other, other.root, &mut seen)
    }
}

fn entails_rec(
    f: &Diagram,
    a: NodeRef,
    g: &Diagram,
    b: NodeRef,
    seen: &mut FxHashSet<(NodeRef, NodeRef)>,
) -> bool {
    if a == NodeRef::FALSE || b == NodeRef::TRUE {
        return true;
    }
    // Reduced non-terminal nodes are never constant.
    if a == NodeRef::TRUE || b == NodeRef::FALSE {
        return false;
    }
    if !seen.insert((a, b)) {
        return true;
    }
    let (la, lb) = (f.level(a), g.level(b));
    let top = la.min(lb);
    let (a0, a1) = if la == top {
        let n = f.node(a);
        (n.low, n.high)
    } else {
        (a, a)
    };
    let (b0, b1) = if lb == top {
        let n = g.node(b);
        (n.low, n.high)
    } else {
        (b, b)
    };
    entails_rec(f, a0, g, b0, seen) && entails_rec(f, a1, g, b1, seen)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub(crate) enum Op {
    And,
    Or,
    Implies,
    Iff,
}

impl Op {
    fn eval(self, a: bool, b: bool) -> bool {
        match self {
            Op::And => a && b,
            Op::Or => a || b,
            Op::Implies => !a || b,
            Op::Iff => a == b,
        }
    }

    fn commutative(self) -> bool {
        !matches!(self, Op::Implies)
    }
}

/// Scratch space with a unique table; lives for one operation.
#[derive(Default)]
pub(crate) struct Arena {
    nodes: Vec<Node>,
    unique: FxHashMap<Node, NodeRef>,
    memo: FxHashMap<(Op, NodeRef, NodeRef), NodeRef>,
}

impl Arena {
    pub(crate) fn new() -> Arena {
        Arena::default()
    }

    fn node(&self, r: NodeRef) -> Node {
        self.nodes[r.index()]
    }

    fn level(&self, r: NodeRef) -> u32 {
        if r.is_terminal() {
            u32::MAX
        } else {
            self.node(r).var.0
        }
    }

    pub(crate) fn mk(&mut self, var: VarId, low: NodeRef, high: NodeRef) -> NodeRef {
        if low == high {
            return low;
        }
        let node = Node { var, low, high };
        if let Some(&r) = self.unique.get(&node) {
            return r;
        }
        let r = NodeRef::from_index(self.nodes.len());
        self.nodes.push(node);
        self.unique.insert(node, r);
        r
    }

    pub(crate) fn literal(&mut self, var: VarId, positive: bool) -> NodeRef {
        if positive {
            self.mk(var, NodeRef::FALSE, NodeRef::TRUE)
        } else {
            self.mk(var, NodeRef::TRUE, NodeRef::FALSE)
        }
    }

    pub(crate) fn import(&mut self, d: &Diagram) -> NodeRef {
        if d.root.is_terminal() {
            return d.root;
        }
        let mut local = Vec::with_capacity(d.nodes.len());
        let map = |local: &Vec<NodeRef>, r: NodeRef| {
            if r.is_terminal() {
                r
            } else {
                local[r.index()]
            }
        };
        for n in d.nodes.iter() {
            let low = map(&local, n.low);
            let high = map(&local, n.high);
            let r = self.mk(n.var, low, high);
            local.push(r);
        }
        map(&local, d.root)
    }

    pub(crate) fn export(&self, root: NodeRef) -> Diagram {
        if root.is_terminal() {
            return Diagram::constant(root == NodeRef::TRUE);
        }
        let mut out: Vec<Node> = Vec::new();
        let mut placed: FxHashMap<NodeRef, NodeRef> = FxHashMap::default();
        // Iterative post-order walk: (node, children_done).
        let mut stack = vec![(root, false)];
        while let Some((r, expanded)) = stack.pop() {
            if r.is_terminal() || placed.contains_key(&r) {
                continue;
            }
            let n = self.node(r);
            if expanded {
                let fix = |x: NodeRef| if x.is_terminal() { x } else { placed[&x] };
                let node = Node {
                    var: n.var,
                    low: fix(n.low),
                    high: fix(n.high),
                };
                placed.insert(r, NodeRef::from_index(out.len()));
                out.push(node);
            } else {
                stack.push((r, true));
                stack.push((n.high, false));
                stack.push((n.low, false));
            }
        }
        Diagram {
            root: placed[&root],
            nodes: Arc::from(out),
        }
    }

    pub(crate) fn apply(&mut self, op: Op, a: NodeRef, b: NodeRef) -> NodeRef {
        if a.is_terminal() && b.is_terminal() {
            return NodeRef::terminal(op.eval(a == NodeRef::TRUE, b == NodeRef::TRUE));
        }
        match op {
            Op::And => {
                if a == NodeRef::FALSE || b == NodeRef::FALSE {
                    return NodeRef::FALSE;
                }
                if a == NodeRef::TRUE || a == b {
                    return b;
                }
                if b == NodeRef::TRUE {
                    return a;
                }
            }
            Op::Or => {
                if a == NodeRef::TRUE || b == NodeRef::TRUE {
                    return NodeRef::TRUE;
                }
                if a == NodeRef::FALSE || a == b {
                    return b;
                }
                if b == NodeRef::FALSE {
                    return a;
                }
            }
            Op::Implies => {
                if a == NodeRef::FALSE || b == NodeRef::TRUE || a == b {
                    return NodeRef::TRUE;
                }
                if a == NodeRef::TRUE {
                    return b;
                }
            }
            Op::Iff => {
                if a == b {
                    return NodeRef::TRUE;
                }
                if a == NodeRef::TRUE {
                    return b;
                }
                if b == NodeRef::TRUE {
                    return a;
                }
            }
        }
        let key = if op.commutative() && b < a {
            (op, b, a)
        } else {
            (op, a, b)
        };
        if let Some(&r) = self.memo.get(&key) {
            return r;
        }
        let (la, lb) = (self.level(a), self.level(b));
        let top = la.min(lb);
        let (a0, a1) = if la == top {
            let n = self.node(a);
            (n.low, n.high)
        } else {
            (a, a)
        };
        let (b0, b1) = if lb == top {
            let n = self.node(b);
            (n.low, n.high)
        } else {
            (b, b)
        };
        let low = self.apply(op, a0, b0);
        let high = self.apply(op, a1, b1);
        let r = self.mk(VarId(top), low, high);
        self.memo.insert(key, r);
        r
    }

    /// Value at the all-ones assignment.
    pub(crate) fn holds_at_top(&self, mut r: NodeRef) -> bool {
        while !r.is_terminal() {
            r = self.node(r).high;
        }
        r == NodeRef::TRUE
    }

    pub(crate) fn not(&mut self, a: NodeRef) -> NodeRef {
        self.apply(Op::Implies, a, NodeRef::FALSE)
    }

    /// Cofactor of `a` at `var = value`.
    pub(crate) fn restrict(&mut self, a: NodeRef, var: VarId, value: bool) -> NodeRef {
        let mut memo = FxHashMap::default();
        self.restrict_rec(a, var, value, &mut memo)
    }

    fn restrict_rec(
        &mut self,
        a: NodeRef,
        var: VarId,
        value: bool,
        memo: &mut FxHashMap<NodeRef, NodeRef>,
    ) -> NodeRef {
        if a.is_terminal() || self.level(a) > var.0 {
            return a;
        }
        if let Some(&r) = memo.get(&a) {
            return r;
        }
        let n = self.node(a);
        let r = if n.var == var {
            if value {
                n.high
            } else {
                n.low
            }
        } else {
            let low = self.restrict_rec(n.low, var, value, memo);
            let high = self.restrict_rec(n.high, var, value, memo);
            self.mk(n.var, low, high)
        };
        memo.insert(a, r);
        r
    }

    /// `(var ∧ high) ∨ (¬var ∧ low)` for operands that may mention variables
    /// ordered above `var`.
    pub(crate) fn ite_var(&mut self, var: VarId, high: NodeRef, low: NodeRef) -> NodeRef {
        let pos = self.literal(var, true);
        let neg = self.literal(var, false);
        let t = self.apply(Op::And, pos, high);
        let e = self.apply(Op::And, neg, low);
        self.apply(Op::Or, t, e)
    }
}
