mod common;

use std::collections::BTreeSet;

use tdt_core::automata::parse_spec;
use tdt_core::oracle::{enumerate_trees, verify_uniformizer};
use tdt_core::synth::{build_arena_bounded, synthesize_bounded, Outcome, SynthOptions, Vertex};
use tdt_core::transducers::{Lhs, RhsLabel, Transducer};

use common::*;

fn opts() -> SynthOptions {
    SynthOptions::default()
}

fn rule_set(t: &Transducer) -> BTreeSet<String> {
    t.rules().iter().map(|r| t.rule_to_string(r)).collect()
}

const CORPUS: [&str; 7] = ["SPEC1", "ID", "PAR", "HB", "LOOK1", "TWO", "FULL"];

/// Largest depth at which exhaustive verification stays cheap for each alphabet.
fn verify_depth(name: &str) -> usize {
    match name {
        "ID" | "EX5" => 4,
        _ => 5,
    }
}

#[test]
fn spec1_arena_and_rules() {
    let s = spec("SPEC1");
    let g = build_arena_bounded(&s, 1, None, opts()).unwrap();
    assert_eq!(g.solution.num_vertices(), 10);
    assert_eq!(g.solution.num_edges(), 14);
    let syn = g.synthesis().unwrap();
    let t = syn.outcome.transducer().unwrap();
    let want: BTreeSet<String> = [
        "q0 a -> b",
        "q0 f(x1,x2) -> f(qf x1, qf x2)",
        "qf a -> b",
        "qf f(x1,x2) -> f(qf x1, qf x2)",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    assert_eq!(rule_set(t), want);
    // No delay edges, so no relay states.
    assert_eq!(t.state_names(), &["q0".to_string(), "qf".to_string()]);
    assert!(syn.fragment_states.is_empty());
}

#[test]
fn identity_is_copied() {
    let s = spec("ID");
    let syn = synthesize_bounded(&s, 1, None, opts()).unwrap();
    let t = syn.outcome.transducer().unwrap();
    assert_eq!(t.num_states(), 1);
    for r in t.rules() {
        let Lhs::Symbol(f) = r.lhs else {
            panic!("epsilon rule")
        };
        assert_eq!(
            t.output().name(match r.rhs.label {
                RhsLabel::Out(g) => g,
                RhsLabel::Call(..) => panic!("bare call"),
            }),
            t.input().name(f)
        );
        let calls: Vec<usize> = r.calls().iter().map(|&(_, j)| j).collect();
        assert_eq!(calls, (1..=t.input().arity(f)).collect::<Vec<_>>());
    }
}

#[test]
fn one_relay_state_and_one_splice_rule() {
    let s = spec("LOOK1");
    assert!(!synthesize_bounded(&s, 1, None, opts())
        .unwrap()
        .outcome
        .is_realizable());
    let syn = synthesize_bounded(&s, 2, None, opts()).unwrap();
    let t = syn.outcome.transducer().unwrap();
    // By hand: q0 reads g, delays into direction 1, then answers G twice in
    // one rule once the second symbol is known.
    let want: BTreeSet<String> = [
        "q0 a -> b",
        "q0 g(x1) -> q0_g_1 x1",
        "q0_g_1 a -> H(b)",
        "q0_g_1 g(x1) -> G(G(qc x1))",
        "qc a -> b",
        "qc g(x1) -> G(qc x1)",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    assert_eq!(rule_set(t), want);
    let relays: Vec<&String> = t
        .state_names()
        .iter()
        .filter(|n| n.contains("_g_"))
        .collect();
    assert_eq!(relays.len(), 1);
}

#[test]
fn dead_initial_out_vertex() {
    let s = parse_spec("input f:2 a:0\noutput b:0\nstates q0\ninitial q0\nq0 a|b\n").unwrap();
    let g = build_arena_bounded(&s, 1, None, opts()).unwrap();
    assert!(!g.solution.initial_winning());
    let syn = g.synthesis().unwrap();
    let Outcome::Unrealizable(cex) = syn.outcome else {
        panic!("realizable")
    };
    assert_eq!(cex.play, vec!["{q0}".to_string(), "(q0, f)".to_string()]);
}

#[test]
fn nondeterministic_spec_is_rejected() {
    let s = parse_spec("input a:0\noutput b:0\nstates q\ninitial q\nq a|b\nq a|b\n").unwrap();
    assert!(matches!(
        synthesize_bounded(&s, 1, None, opts()),
        Err(tdt_core::Error::Nondeterministic)
    ));
}

#[test]
fn par_counterexample_reads_the_word() {
    let s = spec("PAR");
    let syn = synthesize_bounded(&s, 3, None, opts()).unwrap();
    let Outcome::Unrealizable(cex) = syn.outcome else {
        panic!("realizable")
    };
    assert_eq!(cex.play.first().map(String::as_str), Some("{q0}"));
    assert!(cex.play.len() > 2);
}

#[test]
fn arena_size_bound() {
    for name in CORPUS {
        let s = spec(name);
        let sig = s.signature();
        let q = s.num_states() as f64;
        let sigma = sig.input.len() as f64;
        let dirs = sig.input.max_arity().max(1) as f64;
        for k in 1..=3 {
            let g = build_arena_bounded(&s, k, None, opts()).unwrap();
            let bound = q * (sigma * dirs).powi(k as i32 - 1) * sigma + 2f64.powf(q);
            let n = g.solution.num_vertices() as f64;
            assert!(n <= bound, "{name}, k = {k}: {n} vertices, bound {bound}");
        }
    }
}

#[test]
fn realizable_answers_verify_with_bounded_delay() {
    for name in CORPUS {
        let s = spec(name);
        let mut seen = BTreeSet::new();
        for k in 0..=3 {
            let syn = synthesize_bounded(&s, k, None, opts()).unwrap();
            let Some(t) = syn.outcome.transducer() else {
                continue;
            };
            let depth = verify_depth(name);
            if seen.insert(t.to_string()) {
                let r = verify_uniformizer(&s, t, depth, None).unwrap();
                assert!(r.is_clean(), "{name}, k = {k}: {:?}", r.failures.first());
            }
            for input in enumerate_trees(&s.signature().input, depth.min(4)) {
                let d = t.max_delay(&input).unwrap();
                assert!(d <= k, "{name}, k = {k}: delay {d}");
            }
        }
    }
}

#[test]
fn domain_mode_verifies_on_the_domain() {
    let s = spec("EX5");
    let dom = domain("EX5dom.ta");
    let syn = synthesize_bounded(&s, 1, Some(&dom), opts()).unwrap();
    let t = syn.outcome.transducer().unwrap();
    assert!(verify_uniformizer(&s, t, 4, Some(&dom)).unwrap().is_clean());
    // Without the domain the relation is not total, so In wins.
    assert!(!synthesize_bounded(&s, 1, None, opts())
        .unwrap()
        .outcome
        .is_realizable());
}

#[test]
fn monotone_in_k() {
    for name in CORPUS {
        let s = spec(name);
        let v: Vec<bool> = (0..=3)
            .map(|k| {
                synthesize_bounded(&s, k, None, opts())
                    .unwrap()
                    .outcome
                    .is_realizable()
            })
            .collect();
        assert!(v.windows(2).all(|w| !w[0] || w[1]), "{name}: {v:?}");
    }
}

#[test]
fn branch_vertices_are_sets() {
    let s = spec("SPEC1");
    let g = build_arena_bounded(&s, 2, None, opts()).unwrap();
    for v in g.solution.vertices() {
        if let Vertex::Branch(entries) = v {
            let mut sorted = entries.clone();
            sorted.sort();
            sorted.dedup();
            assert_eq!(&sorted, entries);
        }
    }
}
