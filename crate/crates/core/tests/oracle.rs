mod common;

use std::collections::HashSet;

use proptest::prelude::*;
use tdt_core::error::Error;
use tdt_core::oracle::{
    enumerate_trees, refute_small_transducers, verify_uniformizer, FailureKind, Refutation,
};
use tdt_core::terms::{print_term, RankedAlphabet, Tree};
use tdt_core::transducers::parse_transducer;

use common::*;

fn printed(a: &RankedAlphabet, d: usize) -> Vec<String> {
    enumerate_trees(a, d).map(|t| print_term(&t, a)).collect()
}

fn height(t: &Tree) -> usize {
    t.children.iter().map(|c| 1 + height(c)).max().unwrap_or(0)
}

#[test]
fn enumeration_examples() {
    assert_eq!(printed(&alphabet(&[("a", 0)]), 2), ["a"]);
    assert_eq!(
        printed(&alphabet(&[("f", 2), ("a", 0)]), 1),
        ["a", "f(a,a)"]
    );
    assert_eq!(
        printed(&alphabet(&[("g", 1), ("a", 0)]), 3),
        ["a", "g(a)", "g(g(a))", "g(g(g(a)))"]
    );
    assert_eq!(
        printed(&alphabet(&[("f", 2), ("a", 0), ("b", 0)]), 0),
        ["a", "b"]
    );
    let two = printed(&alphabet(&[("f", 2), ("a", 0)]), 2);
    assert_eq!(two.len(), 5);
    assert_eq!(
        &two[2..],
        ["f(a,f(a,a))", "f(f(a,a),a)", "f(f(a,a),f(a,a))"]
    );
}

/// Number of trees of height at most `d`.
fn count_upto(arities: &[usize], d: usize) -> u64 {
    let leaves = arities.iter().filter(|&&n| n == 0).count() as u64;
    (0..d).fold(leaves, |n, _| {
        leaves
            + arities
                .iter()
                .filter(|&&a| a > 0)
                .map(|&a| n.pow(a as u32))
                .sum::<u64>()
    })
}

proptest! {
    #[test]
    fn enumeration_counts(arities in proptest::collection::vec(0usize..3, 1..4), d in 0usize..4) {
        let mut syms: Vec<(String, usize)> = arities.iter().enumerate().map(|(i, &a)| (format!("s{i}"), a)).collect();
        syms.push(("z".into(), 0));
        let a = RankedAlphabet::new(syms.clone()).unwrap();
        let all: Vec<usize> = syms.iter().map(|s| s.1).collect();
        prop_assume!(count_upto(&all, d) < 20_000);
        let trees: Vec<Tree> = enumerate_trees(&a, d).collect();
        prop_assert_eq!(trees.len() as u64, count_upto(&all, d));
        prop_assert!(trees.windows(2).all(|w| height(&w[0]) <= height(&w[1])));
        prop_assert!(trees.iter().all(|t| height(t) <= d));
        let distinct: HashSet<&Tree> = trees.iter().collect();
        prop_assert_eq!(distinct.len(), trees.len());
    }
}

const ALL_G: &str = "input f:2 a:0\noutput f:2 g:2 b:0\nstates q\ninitial q\nq a -> b\nq f(x1,x2) -> g(q x1, q x2)\n";
const COPY_F: &str = "input f:2 a:0\noutput f:2 g:2 b:0\nstates q\ninitial q\nq a -> b\nq f(x1,x2) -> f(q x1, q x2)\n";

#[test]
fn verify_reports_failures() {
    let s = spec("SPEC1");
    let t = parse_transducer(ALL_G).unwrap();
    let r = verify_uniformizer(&s, &t, 2, None).unwrap();
    assert_eq!(r.checked, 5);
    // Every non-leaf input gets an all-g output.
    assert_eq!(r.failures.len(), 4);
    assert!(r
        .failures
        .iter()
        .all(|f| matches!(f.kind, FailureKind::Rejected(_))));
    let lines = r.to_lines(&s.signature().input, &s.signature().output);
    assert_eq!(lines.lines().next().unwrap(), "f(a,a)\trejected g(b,b)");
    assert_eq!(lines.lines().count(), 4);

    let ok = parse_transducer(COPY_F).unwrap();
    assert!(verify_uniformizer(&s, &ok, 4, None).unwrap().is_clean());
}

#[test]
fn verify_reports_stuck_runs() {
    let s = spec("SPEC1");
    let partial =
        parse_transducer("input f:2 a:0\noutput f:2 g:2 b:0\nstates q\ninitial q\nq a -> b\n")
            .unwrap();
    let r = verify_uniformizer(&s, &partial, 1, None).unwrap();
    assert_eq!(r.failures.len(), 1);
    assert!(matches!(r.failures[0].kind, FailureKind::Stuck(_)));
    assert!(r
        .to_lines(&s.signature().input, &s.signature().output)
        .ends_with("\tstuck\n"));
}

#[test]
fn verify_rejects_foreign_alphabets() {
    let s = spec("SPEC1");
    let t = parse_transducer(&corpus("DELG.tdt")).unwrap();
    assert!(matches!(
        verify_uniformizer(&s, &t, 1, None),
        Err(Error::AlphabetMismatch(_))
    ));
}

#[test]
fn full_relation_accepts_anything() {
    let s = spec("FULL");
    let t = parse_transducer(
        "input f:2 a:0\noutput g:1 b:0\nstates q\ninitial q\nq a -> g(b)\nq f(x1,x2) -> q x2\n",
    )
    .unwrap();
    let r = verify_uniformizer(&s, &t, 4, None).unwrap();
    assert!(r.is_clean());
    // N(d) = 1 + N(d-1)^2 from N(0) = 1.
    assert_eq!(r.checked, 677);
    // The first candidate emits the first output leaf everywhere.
    match refute_small_transducers(&s, 1, 0, 3, None, 1000).unwrap() {
        Refutation::Survivor(t) => assert_eq!(
            t.to_string()
                .lines()
                .filter(|l| l.ends_with("-> b"))
                .count(),
            2
        ),
        Refutation::AllFail { .. } => panic!("FULL has a survivor"),
    }
}

#[test]
fn refutation_finds_spec1_survivor() {
    let s = spec("SPEC1");
    let Refutation::Survivor(t) = refute_small_transducers(&s, 1, 1, 3, None, 100_000).unwrap()
    else {
        panic!("SPEC1 is realizable by a one-state transducer");
    };
    assert!(verify_uniformizer(&s, &t, 4, None).unwrap().is_clean());
}

#[test]
fn refutation_budget() {
    let s = spec("SPEC1");
    assert!(
        matches!(refute_small_transducers(&s, 2, 2, 3, None, 1000), Err(Error::CandidateBudget(n)) if n > 1000)
    );
}

#[test]
fn refutation_of_par_lists_failures() {
    let s = spec("PAR");
    let Refutation::AllFail {
        candidates,
        failing_inputs,
    } = refute_small_transducers(&s, 1, 1, 4, None, 10_000).unwrap()
    else {
        panic!("PAR has no uniformizer");
    };
    assert_eq!(failing_inputs.len() as u128, candidates);
    for (i, input) in failing_inputs.iter().enumerate() {
        assert!(height(input) <= 4, "candidate {i}");
    }
}
