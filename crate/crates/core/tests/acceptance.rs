//! Acceptance suite: one PASS/FAIL line per criterion. Runs without the
//! test harness so the lines always show; exits non-zero if any fails.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use modewise::abstraction::BuiltinTable;
use modewise::fixpoint::PatternTable;
use modewise::frontend::PredKey;
use modewise::interp::{parse_query, sample_and_check, sample_success, Limits, Program};
use modewise::pipeline::{analyze_text, Analysis};
use modewise::pos::truth_table::TruthTable;
use modewise::pos::{parse_positional, BoolFn, VarId};
use modewise::report::{timing_table, TimingsMs};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($msg)+));
        }
    };
}

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

const SEED: u64 = 42;

fn source(name: &str) -> String {
    std::fs::read_to_string(format!("{}/corpus/{name}.pl", env!("CARGO_MANIFEST_DIR"))).unwrap()
}

fn pos(s: &str) -> BoolFn {
    parse_positional(s).unwrap()
}

fn key(name: &str, arity: usize) -> PredKey {
    PredKey::new(name, arity)
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let t = Instant::now();
    let out = f();
    (out, t.elapsed())
}

fn table(entries: &[(&str, usize, &str)], calls: bool) -> PatternTable {
    let mut t = if calls { PatternTable::calls() } else { PatternTable::success() };
    for &(n, a, f) in entries {
        t.set(key(n, a), pos(f));
    }
    t
}

fn quicksort_golden() -> Outcome {
    let (a, took) = timed(|| analyze_text(&source("dl_quicksort")).unwrap());
    let (qs, pt) = (key("qs", 3), key("pt", 4));
    ensure!(a.call_mode(&qs) == pos("x1"), "qs mode {}", a.call_mode(&qs));
    ensure!(
        a.call_mode(&pt) == pos("x2 & (x1 | x3 & x4)"),
        "pt mode {}",
        a.call_mode(&pt)
    );
    let cmp = [("=<'", 2, "x1 & x2"), (">'", 2, "x1 & x2")];
    let with = |extra: &[(&str, usize, &str)], calls: bool| {
        let mut all = cmp.to_vec();
        all.extend_from_slice(extra);
        table(&all, calls)
    };
    let f = &a.result.success.trace;
    let f1 = with(&[("qs", 3, "x1 & (x2 <=> x3)"), ("pt", 4, "x1 & x3 & x4")], false);
    let f2 = with(&[("qs", 3, "x2 <=> x1 & x3"), ("pt", 4, "x1 & x3 & x4")], false);
    ensure!(f.len() == 4, "{} success iterates", f.len());
    ensure!(f[0] == PatternTable::success() && f[1] == f1 && f[2] == f2 && f[3] == f2, "success iterates differ");
    let d = &a.result.calls.trace;
    let d3 = with(&[("qs", 3, "x1"), ("pt", 4, "x2 & (x1 | x3 & x4)")], true);
    let expected = [
        PatternTable::calls(),
        with(&[("qs", 3, "true"), ("pt", 4, "true")], true),
        with(&[("qs", 3, "true"), ("pt", 4, "x2 & (x1 | x3 & x4)")], true),
        d3.clone(),
        d3,
    ];
    ensure!(d.as_slice() == expected.as_slice(), "call iterates differ");
    ensure!(took < Duration::from_secs(1), "took {took:?}");
    Ok(format!(
        "qs: x1, pt: {}; lfp stable at F3 = F2, gfp at D4 = D3; {took:.2?}",
        a.call_mode(&pt)
    ))
}

/// Published modes; every corpus predicate is listed.
fn expected_modes(name: &str) -> Vec<(&'static str, usize, &'static str)> {
    match name {
        "dl_quicksort" => vec![("qs", 3, "x1"), ("pt", 4, "x2 & (x1 | x3 & x4)")],
        "bubblesort" => vec![("sort", 2, "x1"), ("ordered", 1, "x1"), ("append", 3, "true")],
        "dnf" => vec![("go", 0, "true"), ("dnf", 2, "true"), ("norm", 2, "true"), ("literal", 1, "true")],
        "heapify" => vec![
            ("greater", 2, "x1 & x2"),
            ("adjust", 4, "x1 & x4 | x1 & x2 & x3 | ~x2 & ~x3 & x4"),
            ("heapify", 2, "x1"),
        ],
        "permSort" => vec![
            ("select", 3, "true"),
            ("ordered", 1, "x1"),
            ("permutation", 2, "true"),
            ("sort", 2, "x1 | x2"),
        ],
        "queens" => vec![
            ("noattack", 3, "x1 & x2 & x3"),
            ("safe", 1, "x1"),
            ("delete", 3, "true"),
            ("perm", 2, "true"),
            ("queens", 2, "x1 | x2"),
        ],
        "quicksort" => vec![
            ("append", 3, "true"),
            ("qsort", 2, "x1"),
            ("partition", 4, "x2 & (x1 | x3 & x4)"),
        ],
        "treeorder" => vec![
            ("member", 2, "true"),
            ("select", 3, "true"),
            ("split", 4, "true"),
            ("split", 7, "true"),
            ("visits2tree", 3, "true"),
            ("v2t", 3, "true"),
        ],
        "treesort" => vec![
            ("tree_to_list_aux", 3, "true"),
            ("tree_to_list", 2, "true"),
            ("list_to_tree", 2, "x1"),
            ("insert_list", 3, "x1 & x2"),
            ("insert", 3, "x1 & (x2 | x3)"),
            ("treesort", 2, "x1"),
        ],
        _ => unreachable!(),
    }
}

fn published_modes(analyses: &[(&str, Analysis)]) -> Outcome {
    let mut total = Duration::ZERO;
    let mut count = 0;
    for (name, a) in analyses {
        total += a.timings.sum();
        let expected = expected_modes(name);
        let listed: BTreeSet<PredKey> = expected.iter().map(|&(n, k, _)| key(n, k)).collect();
        let found: BTreeSet<PredKey> = a.user_preds().iter().cloned().collect();
        ensure!(listed == found, "{name}: predicates {found:?}");
        for (n, k, m) in expected {
            let got = a.call_mode(&key(n, k));
            ensure!(got == pos(m), "{name}: {n}/{k} is {got}, expected {m}");
            count += 1;
        }
    }
    ensure!(total < Duration::from_secs(5), "suite took {total:?}");
    Ok(format!("{count} predicates in {} programs equal; {total:.2?}", analyses.len()))
}

fn positive_tables(nvars: u32) -> Vec<(TruthTable, BoolFn)> {
    TruthTable::all_positive(nvars).map(|t| (t, t.to_bool_fn())).collect()
}

fn pos_or_false(f: &BoolFn) -> bool {
    f.is_false() || f.holds_at_top()
}

/// Operator laws on one pair, each also checked against the oracle.
fn laws(n: u32, (ta, f): (&TruthTable, &BoolFn), (tb, g): (&TruthTable, &BoolFn)) -> Result<(), String> {
    let tt = |x: &BoolFn| TruthTable::from_bool_fn(x, n);
    let (conj, disj, pc) = (f.conj(g), f.disj(g), f.pseudo_complement(g));
    ensure!(tt(&conj) == ta.and(tb), "conj {f} {g}");
    ensure!(tt(&disj) == ta.or(tb), "disj {f} {g}");
    ensure!(tt(&pc) == ta.pseudo_complement(tb), "pseudo-complement {f} {g}");
    ensure!(f.conj(&pc) == conj, "cHa law {f} {g}");
    ensure!(f.entails(g) == ta.entails(tb), "entailment {f} {g}");
    ensure!((f == g) == (ta == tb), "canonical form {f} {g}");
    ensure!([&conj, &disj, &pc].iter().all(|r| pos_or_false(r)), "positivity {f} {g}");
    Ok(())
}

fn projection_laws(n: u32, t: &TruthTable, f: &BoolFn) -> Result<(), String> {
    for v in 0..n {
        let x = VarId(v);
        let (ex, fa) = (f.exists(x), f.forall(x));
        ensure!(TruthTable::from_bool_fn(&ex, n) == t.exists(v), "exists {f} {x}");
        ensure!(TruthTable::from_bool_fn(&fa, n) == t.forall(v), "forall {f} {x}");
        ensure!(fa.entails(f) && f.entails(&ex), "duality {f} {x}");
        ensure!(fa.exists(x).entails(f) && f.entails(&ex.forall(x)), "adjunction {f} {x}");
        ensure!(pos_or_false(&ex) && pos_or_false(&fa), "positivity {f} {x}");
    }
    Ok(())
}

fn domain_laws() -> Outcome {
    let mut cases = 0u64;
    for n in 1..=3 {
        let u = positive_tables(n);
        for (ta, f) in &u {
            projection_laws(n, ta, f)?;
            for (tb, g) in &u {
                laws(n, (ta, f), (tb, g))?;
                cases += 1;
            }
        }
    }
    // Weakest pseudo-complement, over all triples on three variables.
    let u = positive_tables(3);
    let pairs = |op: fn(&BoolFn, &BoolFn) -> BoolFn| -> Vec<Vec<BoolFn>> {
        u.iter().map(|(_, f)| u.iter().map(|(_, g)| op(f, g)).collect()).collect()
    };
    let pcs = pairs(BoolFn::pseudo_complement);
    let meets = pairs(BoolFn::conj);
    for (i, (_, f)) in u.iter().enumerate() {
        for (j, (_, g)) in u.iter().enumerate() {
            for (k, (th, h)) in u.iter().enumerate() {
                let lhs = meets[i][k].entails(g);
                ensure!(lhs == h.entails(&pcs[i][j]), "weakest {f} {g} {h}");
                ensure!(lhs == u[i].0.and(th).entails(&u[j].0), "oracle {f} {g} {h}");
                cases += 1;
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let random = |rng: &mut ChaCha8Rng| {
        let t = if rng.gen_ratio(1, 50) {
            TruthTable::constant(4, false)
        } else {
            TruthTable::new(4, rng.gen::<u64>() | 1 << 15)
        };
        (t, t.to_bool_fn())
    };
    for _ in 0..100_000 {
        let (a, b, c) = (random(&mut rng), random(&mut rng), random(&mut rng));
        laws(4, (&a.0, &a.1), (&b.0, &b.1))?;
        projection_laws(4, &a.0, &a.1)?;
        let pc = a.1.pseudo_complement(&b.1);
        ensure!(a.1.conj(&c.1).entails(&b.1) == c.1.entails(&pc), "weakest at 4 variables");
        cases += 1;
    }
    Ok(format!("{cases} cases, none failing"))
}

fn safety(analyses: &[(&str, Analysis)]) -> Outcome {
    let limits = Limits {
        max_depth: 128,
        max_steps: 5_000,
        ..Limits::default()
    };
    let b = BuiltinTable::standard();
    let (mut samples, mut preds, mut cut) = (0, 0, 0);
    for (name, a) in analyses {
        let prog = Program::new(&a.source, &b).unwrap();
        for k in a.user_preds() {
            let r = sample_and_check(&prog, k, &a.call_mode(k), 100, SEED, &limits).map_err(|e| e.to_string())?;
            ensure!(r.samples == 100, "{name}: {k} ran {} queries", r.samples);
            if let Some(c) = r.counterexamples.first() {
                return Err(format!("{name}: ?- {} gives {}", c.query, c.violation));
            }
            samples += r.samples;
            cut += r.incomplete;
            preds += 1;
        }
    }

    // Probes that must go wrong.
    let dl = &analyses.iter().find(|(n, _)| *n == "dl_quicksort").unwrap().1;
    let prog = Program::new(&dl.source, &b).unwrap();
    for q in ["pt([1],M,L,H)", "qs(L,S,[1])"] {
        let r = prog.run(&parse_query(q).unwrap(), 128, 1);
        ensure!(r.violation().is_some(), "{q} did not go wrong");
    }
    let mut caught = 0;
    for (k, weaker, pos_of_missing) in [(key("pt", 4), "x1", 1), (key("qs", 3), "true", 0)] {
        let r = sample_and_check(&prog, &k, &pos(weaker), 100, SEED, &limits).map_err(|e| e.to_string())?;
        ensure!(!r.counterexamples.is_empty(), "{k} under {weaker}: no error found");
        for c in &r.counterexamples {
            ensure!(!c.query.args()[pos_of_missing].is_ground(), "{k}: error from a safe query {}", c.query);
        }
        caught += r.counterexamples.len();
    }
    Ok(format!(
        "{samples} queries over {preds} predicates, 0 errors ({cut} cut off by the step budget); probes raised {caught} errors"
    ))
}

fn success_soundness(analyses: &[(&str, Analysis)]) -> Outcome {
    let limits = Limits {
        max_depth: 128,
        max_solutions: 3,
        exhaustive: false,
        max_steps: 2_000,
        check_modes: false,
    };
    let b = BuiltinTable::standard();
    let mut lines = Vec::new();
    let mut atoms = 0;
    for (name, a) in analyses {
        let prog = Program::new(&a.source, &b).unwrap();
        let roots: Vec<(PredKey, BoolFn)> = a.user_preds().iter().map(|k| (k.clone(), BoolFn::top())).collect();
        let r = sample_success(&prog, &roots, |k| Some(a.success_mode(k)), 50, 3000, SEED, &limits)
            .map_err(|e| e.to_string())?;
        if let Some(v) = r.violations.first() {
            return Err(format!("{name}: {} from ?- {} breaks {}", v.atom, v.query, v.success));
        }
        for k in a.user_preds() {
            let n = r.checked(k);
            if n < 50 {
                lines.push(format!("{name}: {k} only {n}"));
            }
            atoms += n;
        }
    }
    ensure!(lines.is_empty(), "{}", lines.join(", "));
    Ok(format!("{atoms} derivation atoms checked, at least 50 per predicate"))
}

fn timings(analyses: &[(&str, Analysis)]) -> Outcome {
    let rows: Vec<(&str, TimingsMs)> = analyses.iter().map(|(n, a)| (*n, TimingsMs::from(&a.timings))).collect();
    let refs: Vec<(&str, &TimingsMs)> = rows.iter().map(|(n, t)| (*n, t)).collect();
    print!("{}", timing_table(&refs));
    let total: f64 = rows.iter().map(|r| r.1.sum).sum();
    let slowest = rows.iter().map(|r| r.1.sum).fold(0.0, f64::max);
    ensure!(slowest < 1000.0, "slowest program {slowest:.1} ms");
    ensure!(total < 10_000.0, "corpus {total:.1} ms");
    Ok(format!("slowest {slowest:.1} ms, corpus {total:.1} ms"))
}

fn main() -> ExitCode {
    // Nothing to list: the suite is a single program.
    if std::env::args().any(|a| a == "--list") {
        return ExitCode::SUCCESS;
    }
    let analyses: Vec<(&str, Analysis)> = CORPUS.iter().map(|n| (*n, analyze_text(&source(n)).unwrap())).collect();
    let criteria: [Criterion; 6] = [
        ("quicksort golden run", Box::new(quicksort_golden)),
        ("published modes for the corpus", Box::new(|| published_modes(&analyses))),
        ("domain laws against the truth-table oracle", Box::new(domain_laws)),
        ("safety of inferred modes", Box::new(|| safety(&analyses))),
        ("soundness of success patterns", Box::new(|| success_soundness(&analyses))),
        ("analysis timings", Box::new(|| timings(&analyses))),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let (result, took) = timed(check);
        match result {
            Ok(detail) => println!("PASS {} {name}: {detail} [{took:.1?}]", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {} {name}: {why} [{took:.1?}]", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
