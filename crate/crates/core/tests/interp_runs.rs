//! Concrete runs over the corpus: invariants of derivation states and the
//! documented example queries.

use modewise::abstraction::BuiltinTable;
use modewise::frontend::{parse_program, PredKey};
use modewise::interp::{
    is_idempotent, parse_query, unify, ConcreteState, Outcome, Program, Step, Substitution, Value,
};

fn corpus(name: &str) -> String {
    std::fs::read_to_string(format!("{}/corpus/{name}.pl", env!("CARGO_MANIFEST_DIR"))).unwrap()
}

fn program(text: &str) -> Program {
    Program::new(&parse_program(text).unwrap(), &BuiltinTable::standard()).unwrap()
}

fn q(text: &str) -> Value {
    parse_query(text).unwrap()
}

fn ground_args(st: &ConcreteState, query: &Value) -> Vec<bool> {
    query.args().iter().map(|a| st.subst.is_ground(a)).collect()
}

/// Walks up to `limit` states depth first and checks, for every edge, that
/// the substitution stays idempotent, query arguments never lose
/// groundness, and new goals sit one level below the goal they replace.
fn walk(prog: &Program, query: &Value, limit: usize) -> usize {
    let mut stack = vec![ConcreteState::initial(query)];
    let mut seen = 0;
    while let Some(st) = stack.pop() {
        seen += 1;
        if seen > limit {
            break;
        }
        assert!(is_idempotent(&st.subst.solved()));
        let Some((_, depth, rest)) = st.goals.split_first() else { continue };
        let before = ground_args(&st, query);
        let rest_len = rest.to_vec().len();
        if let Step::Successors(next) = prog.step(&st) {
            for child in &next {
                let after = ground_args(child, query);
                assert!(before.iter().zip(&after).all(|(b, a)| !b || *a), "{query}: groundness lost");
                let goals = child.goals.to_vec();
                assert!(goals.len() >= rest_len);
                let added = goals.len() - rest_len;
                assert!(goals[..added].iter().all(|(_, d)| *d == depth + 1));
                assert!(goals[added..].iter().zip(rest.to_vec()).all(|(a, b)| a.1 == b.1));
                assert!(child.next_var >= st.next_var);
            }
            stack.extend(next.into_iter().rev());
        }
    }
    seen
}

#[test]
fn derivation_states_keep_their_invariants() {
    let cases = [
        ("dl_quicksort", "qs([3,1,2,5],S,[])"),
        ("quicksort", "qsort([4,2,9,1],S)"),
        ("quicksort", "append(X,Y,[1,2,3])"),
        ("treesort", "treesort([5,3,8,1],S)"),
        ("heapify", "heapify(tree(tree(void,4,void),9,tree(void,2,void)),H)"),
        ("queens", "queens([1,2,3,4],Q)"),
        ("permSort", "sort([3,1,2],S)"),
        ("treeorder", "visits2tree([2,1,3],[1,2,3],T)"),
        ("dnf", "go"),
        ("bubblesort", "sort([2,3,1],S)"),
    ];
    for (name, query) in cases {
        let n = walk(&program(&corpus(name)), &q(query), 3000);
        assert!(n > 5, "{name}: only {n} states");
    }
}

#[test]
fn unify_examples() {
    // X is variable 0, Y variable 1.
    let fby = Value::compound("f", vec![Value::atom("b"), Value::Var(1)]);
    let s = unify(&q("f(X,a)"), &fby, &Substitution::new()).unwrap();
    let m = s.solved();
    assert_eq!(m[&0], Value::atom("b"));
    assert_eq!(m[&1], Value::atom("a"));
    assert!(unify(&q("a"), &q("b"), &Substitution::new()).is_none());
    assert!(unify(&Value::Var(0), &q("f(X)"), &Substitution::new()).is_none());
}

#[test]
fn empty_list_sorts_to_the_tail() {
    let p = program(&corpus("dl_quicksort"));
    let r = p.run(&q("qs([],S,T)"), 64, 1);
    let a = &r.answers()[0];
    assert_eq!(a.args[1], a.args[2]);
    assert!(matches!(a.args[1], Value::Var(_)));
}

#[test]
fn two_element_list() {
    let p = program(&corpus("dl_quicksort"));
    let r = p.run(&q("qs([2,1],S,T)"), 64, 1);
    let a = &r.answers()[0];
    let Value::Var(t) = a.args[2] else { panic!("tail bound: {}", a.args[2]) };
    assert_eq!(a.args[1].to_string(), format!("[2,1|_{t}]"));
    assert!(!r.incomplete);
}

#[test]
fn unbound_pivot_comparison_errors() {
    let p = program(&corpus("dl_quicksort"));
    let r = p.run(&q("pt([1],M,L,H)"), 64, 1);
    let v = r.violation().expect("error");
    assert_eq!(v.pred, PredKey::new("=<", 2));
    assert_eq!(v.groundness, [false, true]);
}

#[test]
fn unbound_list_errors() {
    let p = program(&corpus("dl_quicksort"));
    let r = p.run(&q("qs(L,S,[1])"), 64, 1);
    assert!(r.violation().is_some(), "{:?}", r.outcome);
}

#[test]
fn self_loop_hits_depth_bound() {
    let p = program("p :- p.");
    let r = p.run(&q("p"), 10, 1);
    assert!(matches!(r.outcome, Outcome::DepthExceeded));
    assert!(r.incomplete);
}

#[test]
fn empty_goal_is_terminal() {
    let p = program("p.");
    let st = ConcreteState::initial(&q("p"));
    let Step::Successors(next) = p.step(&st) else { panic!() };
    assert_eq!(next.len(), 1);
    assert!(next[0].goals.is_empty());
    assert!(matches!(p.step(&next[0]), Step::Success));
}

#[test]
fn sorting_and_queens_answers() {
    let p = program(&corpus("treesort"));
    let r = p.run(&q("treesort([9,8,7,6,5,4,3,2,1],S)"), 128, 1);
    assert_eq!(r.answers()[0].args[1].to_string(), "[1,2,3,4,5,6,7,8,9]");
    let p = program(&corpus("queens"));
    let r = p.run(&q("queens([1,2,3,4],Q)"), 128, 5);
    let sols: Vec<String> = r.answers().iter().map(|a| a.args[1].to_string()).collect();
    assert_eq!(sols, ["[2,4,1,3]", "[3,1,4,2]"]);
}
