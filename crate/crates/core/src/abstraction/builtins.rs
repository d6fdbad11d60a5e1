//! Required and success modes of builtins, and their textual file format.
//!
//! One entry per line: `builtin(Name/Arity, Required, Success).` with both
//! formulas over `a1..aN`. Blank lines and `%` comments are ignored.

use std::collections::HashMap;

use crate::frontend::PredKey;
use crate::pos::{format_formula, parse_positional, BoolFn, VarId};

use super::AbstractionError;

pub const STANDARD_SPEC: &str = include_str!("builtins.pl");

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BuiltinSpec {
    pub key: PredKey,
    pub required: BoolFn,
    pub success: BoolFn,
}

impl BuiltinSpec {
    pub fn to_line(&self) -> String {
        let name = |v: VarId| format!("a{}", v.0 + 1);
        format!(
            "builtin({}/{}, {}, {}).",
            quote_name(&self.key.name),
            self.key.arity,
            format_formula(&self.required, &name),
            format_formula(&self.success, &name)
        )
    }
}

/// The unification builtin used for explicit `=` goals after the first
/// call of a body.
pub fn equality_spec() -> BuiltinSpec {
    BuiltinSpec {
        key: PredKey::new("=", 2),
        required: BoolFn::top(),
        success: BoolFn::var(VarId(0)).iff(&BoolFn::var(VarId(1))),
    }
}

fn quote_name(name: &str) -> String {
    let plain = name.chars().next().is_some_and(|c| c.is_ascii_lowercase())
        && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
    if plain {
        name.to_string()
    } else {
        format!("'{}'", name.replace('\'', "''"))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BuiltinTable {
    entries: Vec<BuiltinSpec>,
    index: HashMap<PredKey, usize>,
}

impl BuiltinTable {
    /// The shipped table.
    pub fn standard() -> BuiltinTable {
        BuiltinTable::parse(STANDARD_SPEC).expect("shipped builtin table parses")
    }

    pub fn get(&self, key: &PredKey) -> Option<&BuiltinSpec> {
        self.index.get(key).map(|&i| &self.entries[i])
    }

    /// Like [`get`](Self::get) but also knows `=/2`.
    pub fn lookup(&self, key: &PredKey) -> Option<BuiltinSpec> {
        self.get(key).cloned().or_else(|| {
            let eq = equality_spec();
            (eq.key == *key).then_some(eq)
        })
    }

    /// Adds an entry, replacing any previous entry for the same key.
    pub fn insert(&mut self, spec: BuiltinSpec) {
        match self.index.get(&spec.key) {
            Some(&i) => self.entries[i] = spec,
            None => {
                self.index.insert(spec.key.clone(), self.entries.len());
                self.entries.push(spec);
            }
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = &BuiltinSpec> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn to_text(&self) -> String {
        self.entries.iter().map(|e| e.to_line() + "\n").collect()
    }

    pub fn parse(text: &str) -> Result<BuiltinTable, AbstractionError> {
        let mut table = BuiltinTable::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('%') {
                continue;
            }
            let spec = parse_line(line).map_err(|message| AbstractionError::BuiltinSpec {
                line: i + 1,
                message,
            })?;
            table.insert(spec);
        }
        Ok(table)
    }
}

fn parse_line(line: &str) -> Result<BuiltinSpec, String> {
    let inner = line
        .strip_prefix("builtin(")
        .and_then(|s| s.strip_suffix(")."))
        .ok_or("expected `builtin(Name/Arity, Required, Success).`")?;
    let (name, rest) = if let Some(quoted) = inner.strip_prefix('\'') {
        let mut name = String::new();
        let mut chars = quoted.char_indices().peekable();
        let mut end = None;
        while let Some((i, c)) = chars.next() {
            if c == '\'' {
                if chars.peek().map(|&(_, n)| n) == Some('\'') {
                    chars.next();
                    name.push('\'');
                } else {
                    end = Some(i + 1);
                    break;
                }
            } else {
                name.push(c);
            }
        }
        let end = end.ok_or("unterminated quoted name")?;
        (name, &quoted[end..])
    } else {
        let slash = inner.find('/').ok_or("missing `/Arity`")?;
        (inner[..slash].trim().to_string(), &inner[slash..])
    };
    if name.is_empty() {
        return Err("empty builtin name".into());
    }
    let rest = rest.trim_start().strip_prefix('/').ok_or("missing `/Arity`")?;
    let mut parts = rest.splitn(3, ',');
    let arity: usize = parts
        .next()
        .map(str::trim)
        .and_then(|a| a.parse().ok())
        .ok_or("arity must be a natural number")?;
    let (req, succ) = match (parts.next(), parts.next()) {
        (Some(r), Some(s)) => (r.trim(), s.trim()),
        _ => return Err("expected two formulas".into()),
    };
    let formula = |text: &str| -> Result<BoolFn, String> {
        let f = parse_positional(text).map_err(|e| e.to_string())?;
        if let Some(v) = f.support().into_iter().find(|v| v.index() >= arity) {
            return Err(format!("formula `{text}` mentions a{} beyond arity {arity}", v.0 + 1));
        }
        if !f.is_positive() {
            return Err(format!("formula `{text}` is not positive"));
        }
        Ok(f)
    };
    Ok(BuiltinSpec {
        key: PredKey::new(name, arity),
        required: formula(req)?,
        success: formula(succ)?,
    })
}

/// Builtins of standard Prolog that the shipped table does not cover. A call
/// to one of these is reported instead of being treated as an undefined
/// predicate.
pub fn is_known_unlisted(key: &PredKey) -> bool {
    const NAMES: &[(&str, usize)] = &[
        ("atom_codes", 2),
        ("atom_chars", 2),
        ("atom_length", 2),
        ("atom_number", 2),
        ("atom_to_term", 3),
        ("char_code", 2),
        ("number_codes", 2),
        ("number_chars", 2),
        ("sub_atom", 5),
        ("findall", 3),
        ("bagof", 3),
        ("setof", 3),
        ("forall", 2),
        ("not", 1),
        ("assert", 1),
        ("asserta", 1),
        ("assertz", 1),
        ("retract", 1),
        ("abolish", 1),
        ("copy_term", 2),
        ("between", 3),
        ("succ", 2),
        ("plus", 3),
        ("msort", 2),
        ("format", 1),
        ("format", 2),
        ("format", 3),
        ("write", 2),
        ("nl", 1),
        ("halt", 0),
        ("halt", 1),
        ("throw", 1),
        ("catch", 3),
        ("tab", 2),
        ("get_char", 1),
        ("put_char", 1),
        ("number_vars", 3),
        ("numbervars", 3),
        ("op", 3),
    ];
    key.name == "call" || NAMES.iter().any(|&(n, a)| n == key.name && a == key.arity)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_file_round_trips() {
        let t = BuiltinTable::standard();
        assert_eq!(t.to_text(), STANDARD_SPEC);
        assert_eq!(BuiltinTable::parse(&t.to_text()).unwrap(), t);
    }

    #[test]
    fn lookups() {
        let t = BuiltinTable::standard();
        let is = t.get(&PredKey::new("is", 2)).unwrap();
        assert_eq!(is.required, parse_positional("x2").unwrap());
        assert_eq!(is.success, parse_positional("x1 & x2").unwrap());
        assert!(t.get(&PredKey::new("=", 2)).is_none());
        assert!(t.lookup(&PredKey::new("=", 2)).is_some());
    }

    #[test]
    fn comments_and_overrides() {
        let t = BuiltinTable::parse("% c\n\nbuiltin(foo/2, a1, a1 & a2).\nbuiltin(foo/2, true, a2).\n").unwrap();
        assert_eq!(t.len(), 1);
        assert!(t.get(&PredKey::new("foo", 2)).unwrap().required.is_true());
    }

    #[test]
    fn errors() {
        for bad in [
            "builtin(foo/2, a1).",
            "builtin(foo/1, a2, true).",
            "builtin(foo/x, true, true).",
            "builtin('foo/1, true, true).",
            "foo(bar).",
            "builtin(foo/1, ~a1, true).",
        ] {
            assert!(BuiltinTable::parse(bad).is_err(), "{bad}");
        }
    }
}
