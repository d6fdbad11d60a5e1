//! Native behaviour of the builtins in the mode table. Instantiation
//! errors are the callers' business (the required-mode check runs
//! first); type errors simply fail.

use std::cmp::Ordering;

use super::term::{unify, Substitution, Value};

/// One way a builtin call can succeed: new bindings, the next free
/// variable, and goals to run before the rest of the continuation.
pub(super) struct Branch {
    pub subst: Substitution,
    pub next_var: u32,
    pub goals: Vec<Value>,
}

/// Internal continuation goal used to enumerate list lengths lazily.
pub(super) const LENGTH_FROM: &str = "$length_from";

struct Ctx<'a> {
    s: &'a Substitution,
    next_var: u32,
}

impl Ctx<'_> {
    fn ok(&self) -> Vec<Branch> {
        vec![Branch {
            subst: self.s.clone(),
            next_var: self.next_var,
            goals: Vec::new(),
        }]
    }

    fn test(&self, cond: bool) -> Vec<Branch> {
        if cond {
            self.ok()
        } else {
            Vec::new()
        }
    }

    fn unify(&self, a: &Value, b: &Value) -> Vec<Branch> {
        self.unify_with(a, b, self.next_var)
    }

    fn unify_with(&self, a: &Value, b: &Value, next_var: u32) -> Vec<Branch> {
        unify(a, b, self.s)
            .map(|subst| Branch {
                subst,
                next_var,
                goals: Vec::new(),
            })
            .into_iter()
            .collect()
    }

    fn fresh(&mut self, n: usize) -> Vec<Value> {
        let out = (0..n as u32).map(|i| Value::Var(self.next_var + i)).collect();
        self.next_var += n as u32;
        out
    }
}

fn eval(t: &Value, s: &Substitution) -> Option<i64> {
    match s.walk(t) {
        Value::Int(i) => Some(i),
        Value::Struct(f, args) if args.len() == 1 => {
            let x = eval(&args[0], s)?;
            match &*f {
                "-" => x.checked_neg(),
                "+" => Some(x),
                "abs" => x.checked_abs(),
                "sign" => Some(x.signum()),
                "\\" => Some(!x),
                _ => None,
            }
        }
        Value::Struct(f, args) if args.len() == 2 => {
            let x = eval(&args[0], s)?;
            let y = eval(&args[1], s)?;
            match &*f {
                "+" => x.checked_add(y),
                "-" => x.checked_sub(y),
                "*" => x.checked_mul(y),
                "//" => x.checked_div(y),
                "/" => (y != 0 && x % y == 0).then(|| x / y),
                "mod" => x.checked_rem_euclid(y).map(|r| if y < 0 && r != 0 { r + y } else { r }),
                "rem" => x.checked_rem(y),
                "min" => Some(x.min(y)),
                "max" => Some(x.max(y)),
                ">>" => u32::try_from(y).ok().and_then(|y| x.checked_shr(y)),
                "<<" => u32::try_from(y).ok().and_then(|y| x.checked_shl(y)),
                "/\\" => Some(x & y),
                "\\/" => Some(x | y),
                "xor" => Some(x ^ y),
                "**" | "^" => u32::try_from(y).ok().and_then(|y| x.checked_pow(y)),
                _ => None,
            }
        }
        _ => None,
    }
}

fn compare_with(name: &str, a: &Value, b: &Value, s: &Substitution) -> Option<bool> {
    let (x, y) = (eval(a, s)?, eval(b, s)?);
    Some(match name {
        "=:=" => x == y,
        "=\\=" => x != y,
        "<" => x < y,
        ">" => x > y,
        "=<" => x <= y,
        ">=" => x >= y,
        _ => unreachable!("not an arithmetic comparison: {name}"),
    })
}

fn text_of(t: &Value) -> Option<String> {
    match t {
        Value::Atom(a) => Some(a.to_string()),
        Value::Int(i) => Some(i.to_string()),
        _ => None,
    }
}

/// Walks the list prefix of `t`: number of cells and the tail.
fn prefix(t: &Value, s: &Substitution) -> (usize, Value) {
    let mut n = 0;
    let mut t = s.walk(t);
    loop {
        match &t {
            Value::Struct(f, args) if &**f == "." && args.len() == 2 => {
                n += 1;
                t = s.walk(&args[1]);
            }
            _ => return (n, t),
        }
    }
}

/// `length(L, N)` where L has at least `min` elements.
fn length(cx: &mut Ctx, list: &Value, n: &Value, min: usize) -> Vec<Branch> {
    let (count, tail) = prefix(list, cx.s);
    let nv = cx.s.walk(n);
    match (&tail, &nv) {
        (Value::Atom(a), _) if &**a == "[]" => {
            if count < min {
                return Vec::new();
            }
            cx.unify(&nv, &Value::Int(count as i64))
        }
        (Value::Var(_), Value::Int(k)) => {
            let Ok(k) = usize::try_from(*k) else {
                return Vec::new();
            };
            if k < count.max(min) {
                return Vec::new();
            }
            let cells = cx.fresh(k - count);
            cx.unify(&tail, &Value::list(cells))
        }
        (Value::Var(_), Value::Var(_)) => {
            let k = count.max(min);
            let cells = cx.fresh(k - count);
            let mut out = cx.unify(&tail, &Value::list(cells));
            out.retain_mut(|b| match unify(&nv, &Value::Int(k as i64), &b.subst) {
                Some(s) => {
                    b.subst = s;
                    true
                }
                None => false,
            });
            let more = Value::compound(LENGTH_FROM, vec![list.clone(), n.clone(), Value::Int(k as i64 + 1)]);
            out.push(Branch {
                subst: cx.s.clone(),
                next_var: cx.next_var,
                goals: vec![more],
            });
            out
        }
        _ => Vec::new(),
    }
}

fn sort_list(cx: &Ctx, a: &Value, b: &Value, keyed: bool) -> Vec<Branch> {
    let Some(mut items) = cx.s.resolve(a).list_items() else {
        return Vec::new();
    };
    if keyed {
        let mut keys = Vec::with_capacity(items.len());
        for it in &items {
            match it {
                Value::Struct(f, kv) if &**f == "-" && kv.len() == 2 => keys.push(kv[0].clone()),
                _ => return Vec::new(),
            }
        }
        let mut idx: Vec<usize> = (0..items.len()).collect();
        idx.sort_by(|&i, &j| keys[i].standard_cmp(&keys[j]));
        items = idx.into_iter().map(|i| items[i].clone()).collect();
    } else {
        items.sort_by(|x, y| x.standard_cmp(y));
        items.dedup_by(|x, y| x.standard_cmp(y) == Ordering::Equal);
    }
    cx.unify(b, &Value::list(items))
}

/// Runs builtin `name/args.len()`. `None` when there is no native
/// implementation.
pub(super) fn call(name: &str, args: &[Value], s: &Substitution, next_var: u32) -> Option<Vec<Branch>> {
    let mut cx = Ctx { s, next_var };
    let w = |i: usize| s.walk(&args[i]);
    let out = match (name, args.len()) {
        ("=", 2) => cx.unify(&args[0], &args[1]),
        ("\\=", 2) => cx.test(unify(&args[0], &args[1], s).is_none()),
        ("==", 2) => cx.test(s.resolve(&args[0]) == s.resolve(&args[1])),
        ("\\==", 2) => cx.test(s.resolve(&args[0]) != s.resolve(&args[1])),
        ("@<" | "@>" | "@=<" | "@>=", 2) => {
            let o = s.resolve(&args[0]).standard_cmp(&s.resolve(&args[1]));
            cx.test(match name {
                "@<" => o.is_lt(),
                "@>" => o.is_gt(),
                "@=<" => o.is_le(),
                _ => o.is_ge(),
            })
        }
        ("!" | "true" | "nl" | "listing" | "repeat", 0) => cx.ok(),
        ("fail" | "false" | "abort", 0) => Vec::new(),
        ("display" | "print" | "write" | "writeq" | "portray_clause" | "listing", 1) => cx.ok(),
        ("tab", 1) => cx.test(eval(&args[0], s).is_some()),
        ("put", 1) => cx.test(matches!(w(0), Value::Int(_))),
        ("var", 1) => cx.test(matches!(w(0), Value::Var(_))),
        ("nonvar", 1) => cx.test(!matches!(w(0), Value::Var(_))),
        ("compound", 1) => cx.test(matches!(w(0), Value::Struct(..))),
        ("atom", 1) => cx.test(matches!(w(0), Value::Atom(_))),
        ("atomic", 1) => cx.test(matches!(w(0), Value::Atom(_) | Value::Int(_))),
        ("integer" | "number", 1) => cx.test(matches!(w(0), Value::Int(_))),
        ("float", 1) => Vec::new(),
        ("ground", 1) => cx.test(s.is_ground(&args[0])),
        ("read", 1) => {
            // A stand-in for input: some ground term.
            let t = match next_var % 3 {
                0 => Value::atom("end_of_file"),
                1 => Value::Int(i64::from(next_var % 10)),
                _ => Value::atom("a"),
            };
            cx.unify(&args[0], &t)
        }
        ("statistics", 2) => {
            let mut vs = Vec::new();
            s.resolve(&args[0]).vars(&mut vs);
            s.resolve(&args[1]).vars(&mut vs);
            let mut sub = s.clone();
            for v in vs {
                sub = unify(&Value::Var(v), &Value::Int(0), &sub).expect("unbound variable");
            }
            vec![Branch {
                subst: sub,
                next_var,
                goals: Vec::new(),
            }]
        }
        ("compare", 3) => {
            let o = match s.resolve(&args[1]).standard_cmp(&s.resolve(&args[2])) {
                Ordering::Less => "<",
                Ordering::Equal => "=",
                Ordering::Greater => ">",
            };
            cx.unify(&args[0], &Value::atom(o))
        }
        ("length", 2) => length(&mut cx, &args[0], &args[1], 0),
        (LENGTH_FROM, 3) => match w(2) {
            Value::Int(k) => length(&mut cx, &args[0], &args[1], k as usize),
            _ => Vec::new(),
        },
        ("sort", 2) => sort_list(&cx, &args[0], &args[1], false),
        ("keysort", 2) => sort_list(&cx, &args[0], &args[1], true),
        ("is", 2) => match eval(&args[1], s) {
            Some(v) => cx.unify(&args[0], &Value::Int(v)),
            None => Vec::new(),
        },
        ("=:=" | "=\\=" | "<" | ">" | "=<" | ">=", 2) => {
            cx.test(compare_with(name, &args[0], &args[1], s).unwrap_or(false))
        }
        ("arg", 3) => match (w(0), w(1)) {
            (Value::Int(n), Value::Struct(_, xs)) if n >= 1 && (n as usize) <= xs.len() => {
                cx.unify(&args[2], &xs[n as usize - 1])
            }
            _ => Vec::new(),
        },
        ("functor", 3) => match w(0) {
            Value::Var(_) => match (w(1), w(2)) {
                (f @ (Value::Atom(_) | Value::Int(_)), Value::Int(0)) => cx.unify(&args[0], &f),
                (Value::Atom(f), Value::Int(n)) if n > 0 => {
                    let xs = cx.fresh(n as usize);
                    let t = Value::compound(&f, xs);
                    cx.unify_with(&args[0], &t, cx.next_var)
                }
                _ => Vec::new(),
            },
            t => {
                let (f, n) = match &t {
                    Value::Struct(f, xs) => (Value::Atom(f.clone()), xs.len()),
                    other => (other.clone(), 0),
                };
                let pair = Value::compound("-", vec![f, Value::Int(n as i64)]);
                let target = Value::compound("-", vec![args[1].clone(), args[2].clone()]);
                cx.unify(&target, &pair)
            }
        },
        ("=..", 2) => match w(0) {
            Value::Var(_) => match s.resolve(&args[1]).list_items() {
                Some(items) => match items.split_first() {
                    Some((f @ (Value::Atom(_) | Value::Int(_)), [])) => cx.unify(&args[0], f),
                    Some((Value::Atom(f), rest)) => cx.unify(&args[0], &Value::compound(f, rest.to_vec())),
                    _ => Vec::new(),
                },
                None => Vec::new(),
            },
            Value::Struct(f, xs) => {
                let mut items = vec![Value::Atom(f)];
                items.extend(xs.iter().cloned());
                cx.unify(&args[1], &Value::list(items))
            }
            atomic => cx.unify(&args[1], &Value::list(vec![atomic])),
        },
        ("name", 2) => match w(0) {
            Value::Var(_) => {
                let codes = s.resolve(&args[1]).list_items();
                let text: Option<String> = codes.and_then(|cs| {
                    cs.iter()
                        .map(|c| match c {
                            Value::Int(i) => u32::try_from(*i).ok().and_then(char::from_u32),
                            _ => None,
                        })
                        .collect()
                });
                match text {
                    Some(t) => {
                        let v = t.parse::<i64>().map(Value::Int).unwrap_or_else(|_| Value::atom(&t));
                        cx.unify(&args[0], &v)
                    }
                    None => Vec::new(),
                }
            }
            t => match text_of(&t) {
                Some(text) => {
                    let codes = text.chars().map(|c| Value::Int(c as i64)).collect();
                    cx.unify(&args[1], &Value::list(codes))
                }
                None => Vec::new(),
            },
        },
        _ => return None,
    };
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run1(name: &str, args: &[Value]) -> Vec<Branch> {
        call(name, args, &Substitution::new(), 100).expect("native")
    }

    fn int(i: i64) -> Value {
        Value::Int(i)
    }

    fn expr(op: &str, a: Value, b: Value) -> Value {
        Value::compound(op, vec![a, b])
    }

    #[test]
    fn arithmetic() {
        let e = expr("+", int(2), expr("*", int(3), int(4)));
        let b = run1("is", &[Value::Var(0), e]);
        assert_eq!(b[0].subst.resolve(&Value::Var(0)), int(14));
        assert_eq!(run1("<", &[int(1), int(2)]).len(), 1);
        assert!(run1(">", &[int(1), int(2)]).is_empty());
        assert!(run1("is", &[Value::Var(0), expr("+", Value::atom("a"), int(1))]).is_empty());
        assert!(run1("is", &[Value::Var(0), expr("//", int(1), int(0))]).is_empty());
        let m = run1("is", &[Value::Var(0), expr("mod", int(-7), int(3))]);
        assert_eq!(m[0].subst.resolve(&Value::Var(0)), int(2));
        assert!(run1("is", &[Value::Var(0), expr("*", int(i64::MAX), int(2))]).is_empty());
    }

    #[test]
    fn length_enumerates_lazily() {
        let b = run1("length", &[Value::Var(0), Value::Var(1)]);
        assert_eq!(b.len(), 2);
        assert_eq!(b[0].subst.resolve(&Value::Var(0)), Value::nil());
        assert_eq!(b[0].subst.resolve(&Value::Var(1)), int(0));
        assert_eq!(b[1].goals[0].functor(), Some((LENGTH_FROM, 3)));
        let b = run1("length", &[Value::Var(0), int(2)]);
        assert_eq!(b[0].subst.resolve(&Value::Var(0)).to_string(), "[_100,_101]");
        let l = Value::list(vec![int(1), int(2), int(3)]);
        let b = run1("length", &[l, Value::Var(0)]);
        assert_eq!(b[0].subst.resolve(&Value::Var(0)), int(3));
    }

    #[test]
    fn sorting() {
        let l = Value::list(vec![int(3), int(1), int(3), int(2)]);
        let b = run1("sort", &[l, Value::Var(0)]);
        assert_eq!(b[0].subst.resolve(&Value::Var(0)).to_string(), "[1,2,3]");
        let kv = |k: i64, v: &str| expr("-", int(k), Value::atom(v));
        let l = Value::list(vec![kv(2, "a"), kv(1, "b"), kv(2, "c")]);
        let b = run1("keysort", &[l, Value::Var(0)]);
        assert_eq!(b[0].subst.resolve(&Value::Var(0)).to_string(), "[-(1,b),-(2,a),-(2,c)]");
    }

    #[test]
    fn term_construction() {
        let b = run1("functor", &[Value::Var(0), Value::atom("f"), int(2)]);
        assert_eq!(b[0].subst.resolve(&Value::Var(0)).to_string(), "f(_100,_101)");
        assert_eq!(b[0].next_var, 102);
        let t = Value::compound("g", vec![Value::atom("a"), int(1)]);
        let b = run1("=..", &[t.clone(), Value::Var(0)]);
        assert_eq!(b[0].subst.resolve(&Value::Var(0)).to_string(), "[g,a,1]");
        let b = run1("arg", &[int(2), t, Value::Var(0)]);
        assert_eq!(b[0].subst.resolve(&Value::Var(0)), int(1));
        let b = run1("name", &[Value::Var(0), Value::list(vec![int(52), int(50)])]);
        assert_eq!(b[0].subst.resolve(&Value::Var(0)), int(42));
    }
}
