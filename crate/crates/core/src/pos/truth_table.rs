//! Explicit truth tables over at most six variables.
//!
//! This is a reference implementation of every Pos operation, written
//! independently of the decision diagrams so the two can be compared
//! exhaustively. Row `r` assigns variable `i` the value of bit `i` of `r`.

use super::{BoolFn, PosError, VarId};

pub const MAX_VARS: u32 = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TruthTable {
    nvars: u32,
    bits: u64,
}

fn mask(nvars: u32) -> u64 {
    let rows = 1u32 << nvars;
    if rows == 64 {
        u64::MAX
    } else {
        (1u64 << rows) - 1
    }
}

impl TruthTable {
    pub fn new(nvars: u32, bits: u64) -> TruthTable {
        assert!(nvars <= MAX_VARS, "truth tables hold at most {MAX_VARS} variables");
        TruthTable {
            nvars,
            bits: bits & mask(nvars),
        }
    }

    pub fn nvars(&self) -> u32 {
        self.nvars
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    fn rows(&self) -> u32 {
        1 << self.nvars
    }

    fn top_row(&self) -> u32 {
        self.rows() - 1
    }

    pub fn constant(nvars: u32, value: bool) -> TruthTable {
        TruthTable::new(nvars, if value { u64::MAX } else { 0 })
    }

    pub fn var(nvars: u32, v: u32) -> TruthTable {
        TruthTable::from_fn(nvars, |row| row[v as usize])
    }

    pub fn from_fn(nvars: u32, f: impl Fn(&[bool]) -> bool) -> TruthTable {
        let mut bits = 0u64;
        let mut row = vec![false; nvars as usize];
        for r in 0..(1u32 << nvars) {
            for (i, slot) in row.iter_mut().enumerate() {
                *slot = (r >> i) & 1 == 1;
            }
            if f(&row) {
                bits |= 1 << r;
            }
        }
        TruthTable::new(nvars, bits)
    }

    /// Tabulates a decision diagram by evaluating it on every row.
    pub fn from_bool_fn(f: &BoolFn, nvars: u32) -> TruthTable {
        TruthTable::from_fn(nvars, |row| f.eval_with(|v| row[v.index()]))
    }

    pub fn to_bool_fn(&self) -> BoolFn {
        BoolFn::from_rows(self.nvars, |r| self.row(r as u32))
    }

    /// Builds the diagram as a disjunction of minterms, using only the
    /// public lattice operations.
    pub fn to_bool_fn_by_minterms(&self) -> BoolFn {
        let mut terms = Vec::new();
        for r in 0..self.rows() {
            if self.row(r) {
                let lits: Vec<BoolFn> = (0..self.nvars)
                    .map(|i| BoolFn::literal(VarId(i), (r >> i) & 1 == 1))
                    .collect();
                terms.push(BoolFn::conj_all(&lits));
            }
        }
        BoolFn::disj_all(&terms)
    }

    fn row(&self, r: u32) -> bool {
        (self.bits >> r) & 1 == 1
    }

    pub fn reference_eval(&self, assignment: &[bool]) -> Result<bool, PosError> {
        if assignment.len() < self.nvars as usize {
            return Err(PosError::AssignmentTooShort {
                needed: VarId(self.nvars - 1),
                got: assignment.len(),
            });
        }
        let r = assignment
            .iter()
            .take(self.nvars as usize)
            .enumerate()
            .fold(0u32, |acc, (i, &b)| acc | ((b as u32) << i));
        Ok(self.row(r))
    }

    pub fn and(&self, o: &TruthTable) -> TruthTable {
        TruthTable::new(self.nvars, self.bits & o.bits)
    }

    pub fn or(&self, o: &TruthTable) -> TruthTable {
        TruthTable::new(self.nvars, self.bits | o.bits)
    }

    pub fn not(&self) -> TruthTable {
        TruthTable::new(self.nvars, !self.bits)
    }

    pub fn implies(&self, o: &TruthTable) -> TruthTable {
        TruthTable::new(self.nvars, !self.bits | o.bits)
    }

    /// Implication closed in Pos: `false` when the classical result is not
    /// positive.
    pub fn pseudo_complement(&self, o: &TruthTable) -> TruthTable {
        let f = self.implies(o);
        if f.is_positive() {
            f
        } else {
            TruthTable::constant(self.nvars, false)
        }
    }

    pub fn restrict(&self, v: u32, value: bool) -> TruthTable {
        let mut bits = 0u64;
        for r in 0..self.rows() {
            let src = if value { r | (1 << v) } else { r & !(1 << v) };
            if self.row(src) {
                bits |= 1 << r;
            }
        }
        TruthTable::new(self.nvars, bits)
    }

    pub fn exists(&self, v: u32) -> TruthTable {
        self.restrict(v, false).or(&self.restrict(v, true))
    }

    /// Universal projection with the Pos membership test.
    pub fn forall(&self, v: u32) -> TruthTable {
        let f = self.restrict(v, false).and(&self.restrict(v, true));
        if f.row(f.top_row()) {
            f
        } else {
            TruthTable::constant(self.nvars, false)
        }
    }

    /// `g(a) = f(b)` with `b[i] = a[map[i]]`: variable `i` renamed to `map[i]`.
    pub fn rename(&self, map: &[u32]) -> TruthTable {
        TruthTable::from_fn(self.nvars, |row| {
            let r = (0..self.nvars as usize)
                .fold(0u32, |acc, i| acc | ((row[map[i] as usize] as u32) << i));
            self.row(r)
        })
    }

    pub fn entails(&self, o: &TruthTable) -> bool {
        self.bits & !o.bits == 0
    }

    pub fn is_positive(&self) -> bool {
        self.bits == 0 || self.row(self.top_row())
    }

    /// `false` followed by every function true on the all-ones row.
    pub fn all_positive(nvars: u32) -> impl Iterator<Item = TruthTable> {
        let rows = 1u32 << nvars;
        let top = 1u64 << (rows - 1);
        let free = rows - 1;
        std::iter::once(TruthTable::new(nvars, 0)).chain(
            (0..(1u64 << free)).map(move |low| TruthTable::new(nvars, top | low)),
        )
    }
}
