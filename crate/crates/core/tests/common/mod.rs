#![allow(dead_code)]

use std::path::PathBuf;

use rand::rngs::StdRng;
use rand::Rng;
use tdt_core::automata::{
    parse_spec, parse_tree_automaton, SpecAutomaton, StateId, Transition, TreeAutomaton,
};
use tdt_core::oracle::enumerate_trees;
use tdt_core::terms::{
    convolution, convolve_bot, ConvolutionAlphabet, Pair, RankedAlphabet, Side, Tree,
};

pub fn corpus_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../corpus")
        .join(name)
}

pub fn corpus(name: &str) -> String {
    std::fs::read_to_string(corpus_path(name)).unwrap()
}

pub fn spec(name: &str) -> SpecAutomaton {
    parse_spec(&corpus(&format!("{name}.tap"))).unwrap()
}

pub fn domain(name: &str) -> TreeAutomaton {
    parse_tree_automaton(&corpus(name)).unwrap()
}

pub fn alphabet(syms: &[(&str, usize)]) -> RankedAlphabet {
    RankedAlphabet::new(syms.iter().map(|&(n, a)| (n.to_string(), a))).unwrap()
}

pub fn accepts_pair(spec: &SpecAutomaton, q: StateId, t: &Tree, o: &Tree) -> bool {
    spec.accepts_from(q, &convolution(t, o)).unwrap()
}

// Brute-force versions of the three predicates, by enumeration.

pub fn brute_univ_input(spec: &SpecAutomaton, q: StateId, depth: usize) -> bool {
    enumerate_trees(&spec.signature().input, depth).all(|t| {
        spec.accepts_from(q, &convolve_bot(&t, Side::Input))
            .unwrap()
    })
}

pub fn brute_exists_output(spec: &SpecAutomaton, q: StateId, depth: usize) -> Option<Tree> {
    enumerate_trees(&spec.signature().output, depth).find(|o| {
        spec.accepts_from(q, &convolve_bot(o, Side::Output))
            .unwrap()
    })
}

/// Some output of height at most `out_depth` fitting every input, by
/// enumeration. Below the output, inputs are enumerated node by node; past
/// its leaves the remaining input is checked against ⊥ to `univ_depth`,
/// which is exact once `univ_depth + 1` reaches the number of states.
pub fn brute_uniform(
    spec: &SpecAutomaton,
    q: StateId,
    univ_depth: usize,
    out_depth: usize,
) -> Option<Tree> {
    let univ: Vec<bool> = spec
        .states()
        .map(|p| brute_univ_input(spec, p, univ_depth))
        .collect();
    enumerate_trees(&spec.signature().output, out_depth)
        .find(|o| fits_all_inputs(spec, &univ, q, o))
}

fn fits_all_inputs(spec: &SpecAutomaton, univ: &[bool], q: StateId, o: &Tree) -> bool {
    let sig = spec.signature();
    sig.input.symbols().all(|f| {
        let Some(to) = spec.delta(q, Pair::both(f, o.label)) else {
            return false;
        };
        to.iter().enumerate().all(
            |(i, &p)| match (i < sig.input.arity(f), o.children.get(i)) {
                (true, Some(c)) => fits_all_inputs(spec, univ, p, c),
                (false, Some(c)) => spec
                    .accepts_from(p, &convolve_bot(c, Side::Output))
                    .unwrap(),
                (true, None) => univ[p.index()],
                (false, None) => unreachable!("a child on neither side"),
            },
        )
    })
}

/// Direct check of one output against every input up to `depth`.
pub fn fits_inputs_to(spec: &SpecAutomaton, q: StateId, o: &Tree, depth: usize) -> bool {
    enumerate_trees(&spec.signature().input, depth).all(|t| accepts_pair(spec, q, &t, o))
}

/// A random deterministic convolution automaton: each (state, pair) gets a
/// transition with probability `density`.
pub fn random_spec(
    rng: &mut StdRng,
    sigma: &RankedAlphabet,
    gamma: &RankedAlphabet,
    states: usize,
    density: f64,
) -> SpecAutomaton {
    let conv = ConvolutionAlphabet::new(sigma.clone(), gamma.clone());
    let mut transitions = Vec::new();
    for q in 0..states {
        for p in conv.pairs() {
            if rng.gen_bool(density) {
                let arity = conv.input_arity(p.input).max(conv.output_arity(p.output));
                let to = (0..arity)
                    .map(|_| StateId(rng.gen_range(0..states) as u32))
                    .collect();
                transitions.push(Transition {
                    from: StateId(q as u32),
                    label: p,
                    to,
                });
            }
        }
    }
    let names = (0..states).map(|i| format!("s{i}")).collect();
    SpecAutomaton::new(conv, names, vec![StateId(0)], transitions).unwrap()
}

pub fn pair(spec: &SpecAutomaton, i: Option<&str>, o: Option<&str>) -> Pair {
    let sig = spec.signature();
    let i = i.map(|n| sig.input.by_name(n)[0]);
    let o = o.map(|n| sig.output.by_name(n)[0]);
    Pair::new(i, o)
}

/// Random trees over `alphabet` of height at most `depth`.
pub fn arb_tree(
    alphabet: RankedAlphabet,
    depth: u32,
) -> impl proptest::strategy::Strategy<Value = Tree> {
    use proptest::prelude::*;
    let leaves: Vec<_> = alphabet.leaves().collect();
    let inner_syms: Vec<_> = alphabet
        .symbols()
        .filter(|&s| alphabet.arity(s) > 0)
        .collect();
    let leaf = proptest::sample::select(leaves).prop_map(Tree::leaf);
    leaf.prop_recursive(depth, 64, 4, move |inner| {
        let alphabet = alphabet.clone();
        proptest::sample::select(inner_syms.clone()).prop_flat_map(move |f| {
            proptest::collection::vec(inner.clone(), alphabet.arity(f))
                .prop_map(move |cs| Tree::new(f, cs))
        })
    })
}
