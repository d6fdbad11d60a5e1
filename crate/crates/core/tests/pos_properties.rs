//! Exhaustive and randomized law checks for the Pos domain, comparing the
//! decision diagrams against the truth-table oracle.

use modewise::pos::truth_table::TruthTable;
use modewise::pos::{BoolFn, Quantifier, Renaming, VarId};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;

struct Elem {
    table: TruthTable,
    diagram: BoolFn,
}

fn universe(nvars: u32) -> Vec<Elem> {
    TruthTable::all_positive(nvars)
        .map(|table| Elem {
            diagram: table.to_bool_fn(),
            table,
        })
        .collect()
}

fn table(f: &BoolFn, nvars: u32) -> TruthTable {
    TruthTable::from_bool_fn(f, nvars)
}

fn permutations(items: &[u32]) -> Vec<Vec<u32>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let x = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, x);
            out.push(p);
        }
    }
    out
}

#[test]
fn binary_operations_match_oracle_on_three_variables() {
    let u = universe(3);
    assert_eq!(u.len(), 129);
    for a in &u {
        for b in &u {
            let (f, g) = (&a.diagram, &b.diagram);
            let conj = f.conj(g);
            let disj = f.disj(g);
            let pc = f.pseudo_complement(g);
            assert_eq!(table(&conj, 3), a.table.and(&b.table));
            assert_eq!(table(&disj, 3), a.table.or(&b.table));
            assert_eq!(table(&pc, 3), a.table.pseudo_complement(&b.table));
            for r in [&conj, &disj, &pc] {
                assert!(r.is_positive(), "positivity lost: {r}");
            }
            // cHa law.
            assert_eq!(f.conj(&pc), conj);
            assert_eq!(f.entails(g), a.table.entails(&b.table));
            assert_eq!(f.equiv(g), a.table == b.table);
            assert_eq!(f == g, a.table == b.table);
        }
    }
}

#[test]
fn pseudo_complement_is_weakest_on_three_variables() {
    let u = universe(3);
    let n = u.len();
    let mut meet = vec![Vec::with_capacity(n); n];
    let mut pc = vec![Vec::with_capacity(n); n];
    for (i, a) in u.iter().enumerate() {
        for b in &u {
            meet[i].push(a.diagram.conj(&b.diagram));
            pc[i].push(a.diagram.pseudo_complement(&b.diagram));
        }
    }
    let mut checked = 0u64;
    for f in 0..n {
        for g in 0..n {
            for h in 0..n {
                let lhs = meet[f][h].entails(&u[g].diagram);
                let rhs = u[h].diagram.entails(&pc[f][g]);
                assert_eq!(lhs, rhs, "f={} g={} h={}", u[f].diagram, u[g].diagram, u[h].diagram);
                let oracle = u[f].table.and(&u[h].table).entails(&u[g].table);
                assert_eq!(lhs, oracle);
                checked += 1;
            }
        }
    }
    assert_eq!(checked, 129 * 129 * 129);
}

#[test]
fn projections_on_three_variables() {
    for a in universe(3) {
        let f = &a.diagram;
        for v in 0..3 {
            let x = VarId(v);
            let ex = f.exists(x);
            let fa = f.forall(x);
            assert_eq!(table(&ex, 3), a.table.exists(v));
            assert_eq!(table(&fa, 3), a.table.forall(v));
            assert_eq!(table(&f.restrict(x, false), 3), a.table.restrict(v, false));
            assert_eq!(table(&f.restrict(x, true), 3), a.table.restrict(v, true));
            assert!(ex.is_positive() && fa.is_positive());
            assert!(!ex.support().contains(&x) && !fa.support().contains(&x));
            // Duality.
            assert!(fa.entails(f));
            assert!(f.entails(&ex));
            // Adjunction.
            assert!(fa.exists(x).entails(f));
            assert!(f.entails(&ex.forall(x)));
        }
    }
}

#[test]
fn renaming_matches_oracle_on_three_variables() {
    let perms = permutations(&[0, 1, 2]);
    for a in universe(3) {
        for p in &perms {
            let targets: Vec<VarId> = p.iter().map(|&i| VarId(i)).collect();
            let r = Renaming::from_positions(&targets).unwrap();
            let renamed = a.diagram.rename(&r);
            // Variable i becomes p[i]: g(row) = f(row permuted back).
            let expected = TruthTable::from_fn(3, |row| {
                let back: Vec<bool> = (0..3).map(|i| row[p[i] as usize]).collect();
                a.table.reference_eval(&back).unwrap()
            });
            assert_eq!(table(&renamed, 3), expected);
            assert!(renamed.is_positive());
            assert_eq!(renamed.rename(&r.inverse()), a.diagram);
        }
    }
}

#[test]
fn unary_operations_match_oracle_on_four_variables() {
    for a in universe(4) {
        let f = &a.diagram;
        assert_eq!(table(f, 4), a.table);
        for v in 0..4 {
            let x = VarId(v);
            let ex = f.exists(x);
            let fa = f.forall(x);
            assert_eq!(table(&ex, 4), a.table.exists(v));
            assert_eq!(table(&fa, 4), a.table.forall(v));
            assert!(fa.entails(f) && f.entails(&ex));
            assert!(fa.exists(x).entails(f) && f.entails(&ex.forall(x)));
        }
    }
}

#[test]
fn projection_order_is_irrelevant_on_four_variables() {
    let orders = permutations(&[0, 1, 2, 3]);
    let subsets: Vec<Vec<u32>> = (1u32..16)
        .map(|mask| (0..4).filter(|i| mask >> i & 1 == 1).collect())
        .collect();
    for (k, a) in universe(4).into_iter().enumerate() {
        // Every third function keeps the run short; the rest are covered by
        // the subset checks against the oracle below.
        let full = k % 3 == 0;
        for set in &subsets {
            let mut expect_ex = a.table;
            let mut expect_fa = a.table;
            for &v in set {
                expect_ex = expect_ex.exists(v);
                expect_fa = expect_fa.forall(v);
            }
            let ex = a.diagram.exists_set(set.iter().map(|&v| VarId(v)));
            let fa = a.diagram.forall_set(set.iter().map(|&v| VarId(v)));
            assert_eq!(table(&ex, 4), expect_ex);
            assert_eq!(table(&fa, 4), expect_fa);
            let keep: BTreeSet<VarId> = (0..4).filter(|v| !set.contains(v)).map(VarId).collect();
            assert_eq!(a.diagram.project_onto(&keep, Quantifier::Exists), ex);
            assert_eq!(a.diagram.project_onto(&keep, Quantifier::Forall), fa);
            if full && set.len() == 4 {
                for order in &orders {
                    let vs: Vec<VarId> = order.iter().map(|&v| VarId(v)).collect();
                    assert_eq!(a.diagram.exists_set(vs.iter().copied()), ex);
                    assert_eq!(a.diagram.forall_set(vs.iter().copied()), fa);
                }
            }
        }
    }
}

fn random_positive(rng: &mut ChaCha8Rng, nvars: u32) -> TruthTable {
    if rng.gen_ratio(1, 50) {
        return TruthTable::constant(nvars, false);
    }
    let top = 1u64 << ((1u32 << nvars) - 1);
    TruthTable::new(nvars, rng.gen::<u64>() | top)
}

#[test]
fn randomized_laws_on_four_variables() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x9e37_79b9);
    let cases = 100_000;
    for _ in 0..cases {
        let (ta, tb, tc) = (
            random_positive(&mut rng, 4),
            random_positive(&mut rng, 4),
            random_positive(&mut rng, 4),
        );
        let (f, g, h) = (ta.to_bool_fn(), tb.to_bool_fn(), tc.to_bool_fn());
        let pc = f.pseudo_complement(&g);
        assert_eq!(table(&f.conj(&g), 4), ta.and(&tb));
        assert_eq!(table(&f.disj(&g), 4), ta.or(&tb));
        assert_eq!(table(&pc, 4), ta.pseudo_complement(&tb));
        assert_eq!(f.conj(&pc), f.conj(&g));
        assert_eq!(f.conj(&h).entails(&g), h.entails(&pc));
        let v = rng.gen_range(0..4);
        let fa = f.forall(VarId(v));
        let ex = f.exists(VarId(v));
        assert_eq!(table(&fa, 4), ta.forall(v));
        assert_eq!(table(&ex, 4), ta.exists(v));
        assert!(fa.is_positive() && ex.is_positive() && pc.is_positive());
        assert!(fa.entails(&f) && f.entails(&ex));
        assert!(fa.exists(VarId(v)).entails(&f));
        assert!(f.entails(&ex.forall(VarId(v))));
    }
}
