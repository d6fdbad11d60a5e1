use std::collections::BTreeMap;

use crate::frontend::PredKey;
use crate::pos::BoolFn;

/// Value of predicates without an entry.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Absent {
    Bottom,
    Top,
}

/// One formula per predicate, over `x1..xN` for a predicate of arity N.
/// Entries equal to the default are not stored, so two tables are equal
/// exactly when they map every predicate to the same function.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PatternTable {
    absent: Absent,
    entries: BTreeMap<PredKey, BoolFn>,
}

impl PatternTable {
    /// Success patterns: absent means `false`.
    pub fn success() -> PatternTable {
        PatternTable {
            absent: Absent::Bottom,
            entries: BTreeMap::new(),
        }
    }

    /// Call patterns: absent means `true`.
    pub fn calls() -> PatternTable {
        PatternTable {
            absent: Absent::Top,
            entries: BTreeMap::new(),
        }
    }

    pub fn absent(&self) -> Absent {
        self.absent
    }

    fn default_value(&self) -> BoolFn {
        match self.absent {
            Absent::Bottom => BoolFn::bottom(),
            Absent::Top => BoolFn::top(),
        }
    }

    fn is_default(&self, f: &BoolFn) -> bool {
        match self.absent {
            Absent::Bottom => f.is_false(),
            Absent::Top => f.is_true(),
        }
    }

    pub fn get(&self, key: &PredKey) -> BoolFn {
        self.entries
            .get(key)
            .cloned()
            .unwrap_or_else(|| self.default_value())
    }

    pub fn set(&mut self, key: PredKey, f: BoolFn) {
        if self.is_default(&f) {
            self.entries.remove(&key);
        } else {
            self.entries.insert(key, f);
        }
    }

    /// Stored (non-default) entries.
    pub fn entries(&self) -> impl Iterator<Item = (&PredKey, &BoolFn)> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `name/arity: formula` lines for the given predicates.
    pub fn render(&self, keys: &[PredKey]) -> String {
        keys.iter()
            .map(|k| format!("{k}: {}\n", self.get(k)))
            .collect()
    }
}
