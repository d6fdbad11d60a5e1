//! Normalization keeps the meaning of programs: normal clauses stay put
//! when normalized again, and original and normalized programs answer the
//! same queries the same way.

use std::collections::HashMap;

use modewise::abstraction::BuiltinTable;
use modewise::frontend::{normalize, normalize_clause, parse_program, SourceClause, SourceProgram};
use modewise::interp::{parse_query, Limits, Outcome, Program, Run, Value};

const CORPUS: [&str; 9] = [
    "dl_quicksort",
    "bubblesort",
    "dnf",
    "heapify",
    "permSort",
    "queens",
    "quicksort",
    "treeorder",
    "treesort",
];

fn corpus(name: &str) -> SourceProgram {
    let text = std::fs::read_to_string(format!("{}/corpus/{name}.pl", env!("CARGO_MANIFEST_DIR"))).unwrap();
    parse_program(&text).unwrap()
}

fn normalized(src: &SourceProgram) -> Vec<SourceClause> {
    normalize(&src.clauses).iter().map(|c| c.to_source()).collect()
}

#[test]
fn normal_form_is_a_fixpoint() {
    for name in CORPUS {
        for c in normalize(&corpus(name).clauses) {
            assert!(c.is_normal(), "{name}: {c}");
            let again = normalize_clause(&c.to_source());
            assert_eq!(again.head_args, c.head_args, "{name}: {c}");
            assert_eq!(again.eqns, c.eqns, "{name}: {c}");
            assert_eq!(again.body, c.body, "{name}: {c}");
            assert_eq!(again.to_source().to_string(), c.to_source().to_string());
        }
    }
}

#[test]
fn head_arguments_come_first() {
    for name in CORPUS {
        for c in normalize(&corpus(name).clauses) {
            for (i, v) in c.head_args.iter().enumerate() {
                assert_eq!(v.index(), i, "{name}: {c}");
            }
        }
    }
}

/// Variables renamed to 0, 1, ... by first occurrence across `ts`.
fn canonical(ts: &[Value]) -> String {
    fn go(t: &Value, names: &mut HashMap<u32, usize>, out: &mut String) {
        match t {
            Value::Var(v) => {
                let n = names.len();
                let k = *names.entry(*v).or_insert(n);
                out.push_str(&format!("V{k}"));
            }
            Value::Struct(f, args) => {
                out.push_str(f);
                out.push('(');
                for a in args.iter() {
                    go(a, names, out);
                    out.push(',');
                }
                out.push(')');
            }
            other => out.push_str(&other.to_string()),
        }
    }
    let mut names = HashMap::new();
    let mut out = String::new();
    for t in ts {
        go(t, &mut names, &mut out);
        out.push(' ');
    }
    out
}

#[derive(Debug, PartialEq)]
enum Summary {
    Answers(Vec<String>),
    Failure,
    Error(String),
    Cut,
}

fn summary(r: &Run) -> Summary {
    match &r.outcome {
        Outcome::Success(answers) => Summary::Answers(answers.iter().map(|a| canonical(&a.args)).collect()),
        Outcome::Failure => Summary::Failure,
        Outcome::Error(v) => Summary::Error(format!("{} {}", v.pred, canonical(std::slice::from_ref(&v.call)))),
        Outcome::DepthExceeded => Summary::Cut,
    }
}

/// Same answers in the same order; when either run was cut off, the
/// shorter answer list must be a prefix of the longer one.
fn agree(query: &Value, a: &Run, b: &Run) {
    let (sa, sb) = (summary(a), summary(b));
    if !a.incomplete && !b.incomplete {
        assert_eq!(sa, sb, "{query}");
        return;
    }
    let answers = |s: &Summary| match s {
        Summary::Answers(xs) => xs.clone(),
        _ => Vec::new(),
    };
    let (xa, xb) = (answers(&sa), answers(&sb));
    let n = xa.len().min(xb.len());
    assert_eq!(xa[..n], xb[..n], "{query}");
}

fn queries(prog: &Program) -> Vec<Value> {
    let mut out = Vec::new();
    for key in prog.preds() {
        let vars: Vec<Value> = (0..key.arity as u32).map(Value::Var).collect();
        out.push(Value::compound(&key.name, vars));
    }
    out
}

#[test]
fn original_and_normalized_programs_agree() {
    let b = BuiltinTable::standard();
    for name in CORPUS {
        let src = corpus(name);
        let orig = Program::new(&src, &b).unwrap();
        let norm = Program::from_clauses(&normalized(&src), &src.assertions, &b).unwrap();
        for check_modes in [true, false] {
            // Normal clauses add a level per equation, so depth is left to
            // the step budget.
            let lim = Limits {
                max_depth: 100_000,
                max_solutions: 6,
                exhaustive: false,
                max_steps: 5_000,
                check_modes,
            };
            for query in queries(&orig) {
                agree(&query, &orig.run_with(&query, &lim), &norm.run_with(&query, &lim));
            }
        }
    }
}

#[test]
fn ground_queries_agree() {
    let b = BuiltinTable::standard();
    let cases = [
        ("dl_quicksort", "qs([3,1,4,1,5],S,[])"),
        ("quicksort", "qsort([3,1,4,1,5],S)"),
        ("bubblesort", "sort([3,1,4,1,5],S)"),
        ("permSort", "sort([3,1,4],S)"),
        ("treesort", "treesort([3,1,4,1,5],S)"),
        ("heapify", "heapify(tree(tree(void,1,void),5,tree(tree(void,9,void),2,void)),H)"),
        ("queens", "queens([1,2,3,4,5],Q)"),
        ("treeorder", "visits2tree([4,2,1,3,6,5,7],[1,2,3,4,5,6,7],T)"),
        ("dnf", "dnf(and(or(p,q),or(r,not(s))),D)"),
    ];
    let lim = Limits {
        max_depth: 100_000,
        max_solutions: 50,
        exhaustive: true,
        max_steps: 200_000,
        check_modes: true,
    };
    for (name, text) in cases {
        let src = corpus(name);
        let orig = Program::new(&src, &b).unwrap();
        let norm = Program::from_clauses(&normalized(&src), &src.assertions, &b).unwrap();
        let query = parse_query(text).unwrap();
        let (a, n) = (orig.run_with(&query, &lim), norm.run_with(&query, &lim));
        assert!(!a.incomplete && !n.incomplete, "{name}");
        assert!(matches!(a.outcome, Outcome::Success(_)), "{name}: {:?}", summary(&a));
        assert_eq!(summary(&a), summary(&n), "{name}");
    }
}
