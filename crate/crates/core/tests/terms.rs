mod common;

use proptest::prelude::*;
use tdt_core::terms::*;
use tdt_core::Error;

use common::{alphabet, arb_tree};

fn ex1() -> RankedAlphabet {
    alphabet(&[("f", 2), ("g", 1), ("h", 1), ("a", 0)])
}

fn pairs() -> ConvolutionAlphabet {
    ConvolutionAlphabet::new(
        alphabet(&[("f", 2), ("a", 0)]),
        alphabet(&[("f", 2), ("g", 2), ("b", 0)]),
    )
}

#[test]
fn parses_example_tree() {
    let s = ex1();
    let t = parse_term("f(g(h(a)),a)", &s).unwrap();
    assert_eq!(s.name(t.label), "f");
    assert_eq!(t.children.len(), 2);
    assert_eq!(s.name(*t.label_at(&[1, 1, 1]).unwrap()), "a");
    assert_eq!(t.height(), 3);
    assert_eq!(t.size(), 5);
    assert_eq!(print_term(&t, &s), "f(g(h(a)),a)");
}

#[test]
fn parses_single_leaf() {
    let t = parse_term("a", &ex1()).unwrap();
    assert!(t.is_leaf());
    assert_eq!(t.height(), 0);
}

#[test]
fn rejects_wrong_arity() {
    let err = parse_term("f(a)", &ex1()).unwrap_err();
    assert!(
        matches!(err, Error::ArityMismatch { ref name, arity: 1 } if name == "f"),
        "{err}"
    );
    assert!(matches!(
        parse_term("k(a)", &ex1()),
        Err(Error::UnknownSymbol(_) | Error::ArityMismatch { .. })
    ));
    assert!(matches!(
        parse_term("f(a,", &ex1()),
        Err(Error::Syntax { .. })
    ));
}

#[test]
fn rejects_bad_alphabets() {
    assert!(RankedAlphabet::new([("a".to_string(), 0), ("a".to_string(), 0)]).is_err());
    assert!(RankedAlphabet::new(Vec::<(String, usize)>::new()).is_err());
}

#[test]
fn convolution_examples() {
    let sig = pairs();
    let a = parse_term("a", &sig.input).unwrap();
    let b = parse_term("b", &sig.output).unwrap();
    let c = convolution(&a, &b);
    assert_eq!(print_term(&c, &sig), "a|b");

    let faa = parse_term("f(a,a)", &sig.input).unwrap();
    let c = convolution(&faa, &b);
    assert_eq!(print_term(&c, &sig), "f|b(a|_,a|_)");
    assert_eq!(c, parse_pair_term("f|b(a|_,a|_)", &sig).unwrap());

    assert_eq!(print_term(&convolve_bot(&a, Side::Input), &sig), "a|_");
    assert_eq!(
        print_term(&convolve_bot(&faa, Side::Input), &sig),
        "f|_(a|_,a|_)"
    );
    assert_eq!(print_term(&convolve_bot(&b, Side::Output), &sig), "_|b");
}

#[test]
fn open_term_splice() {
    let s = ex1();
    let t = parse_open_term("f(*,a)", &s).unwrap();
    let u = parse_open_term("h(*)", &s).unwrap();
    assert_eq!(
        splice(&t, &u).unwrap(),
        parse_open_term("f(h(*),a)", &s).unwrap()
    );
    assert_eq!(splice(&hole(), &u).unwrap(), u);
    let b = close(&parse_term("a", &s).unwrap());
    assert_eq!(
        to_closed(&splice(&t, &b).unwrap()).unwrap(),
        parse_term("f(a,a)", &s).unwrap()
    );
    let closed = close(&parse_term("f(a,a)", &s).unwrap());
    assert!(matches!(splice(&closed, &u), Err(Error::NoHole)));
}

#[test]
fn special_tree_rejects_two_holes() {
    let s = ex1();
    assert!(SpecialTree::new(parse_open_term("f(*,*)", &s).unwrap()).is_err());
    assert!(SpecialTree::new(parse_open_term("f(a,a)", &s).unwrap()).is_err());
    let st = SpecialTree::new(parse_open_term("f(a,g(*))", &s).unwrap()).unwrap();
    assert_eq!(st.hole_address(), vec![2, 1]);
}

#[test]
fn context_substitution() {
    let s = alphabet(&[("f", 2), ("g", 1), ("a", 0), ("b", 0)]);
    let sub = |c: &str, parts: &[&str]| {
        let ctx = Context::new(parse_open_term(c, &s).unwrap()).unwrap();
        let parts: Vec<Tree> = parts.iter().map(|p| parse_term(p, &s).unwrap()).collect();
        print_term(&ctx.substitute(&parts).unwrap(), &s)
    };
    assert_eq!(sub("x1", &["a"]), "a");
    assert_eq!(sub("f(x1,x2)", &["a", "b"]), "f(a,b)");
    assert_eq!(sub("g(x1)", &["f(a,a)"]), "g(f(a,a))");
    let ctx = Context::new(parse_open_term("f(x1,x2)", &s).unwrap()).unwrap();
    assert!(matches!(
        ctx.substitute(&[]),
        Err(Error::VariableCount {
            expected: 2,
            got: 0
        })
    ));
    assert!(Context::new(parse_open_term("f(x2,x1)", &s).unwrap()).is_err());
}

/// Oracle: the longest address in the domain comparable with `u`.
fn max_comparable(t: &Tree, u: &[usize]) -> usize {
    t.domain()
        .iter()
        .filter(|v| u.starts_with(v) || v.starts_with(u))
        .map(|v| v.len())
        .max()
        .unwrap_or(0)
}

#[test]
fn max_path_len_examples() {
    let s = ex1();
    let a = parse_term("a", &s).unwrap();
    assert_eq!(max_path_len_along(&a, &[]), 0);
    let t = parse_term("f(h(a),a)", &s).unwrap();
    assert_eq!(max_path_len_along(&t, &[1]), 2);
    assert_eq!(max_comparable(&t, &[1]), 2);
    assert_eq!(max_path_len_along(&t, &[2, 2, 2, 2]), 1);
    assert_eq!(max_comparable(&t, &[2, 2, 2, 2]), 1);
}

proptest! {
    #[test]
    fn print_parse_round_trip(t in arb_tree(ex1(), 5)) {
        let s = ex1();
        prop_assert_eq!(parse_term(&print_term(&t, &s), &s).unwrap(), t);
    }

    #[test]
    fn convolution_projects_back(
        t1 in arb_tree(alphabet(&[("f", 2), ("a", 0)]), 4),
        t2 in arb_tree(alphabet(&[("f", 2), ("g", 2), ("b", 0)]), 4),
    ) {
        let c = convolution(&t1, &t2);
        prop_assert_eq!(project(&c, Side::Input).unwrap(), t1.clone());
        prop_assert_eq!(project(&c, Side::Output).unwrap(), t2.clone());
        prop_assert_eq!(c.height(), t1.height().max(t2.height()));
        check_tree(&pairs(), &c).unwrap();
    }

    #[test]
    fn self_convolution_is_diagonal(t in arb_tree(ex1(), 4)) {
        let c = convolution(&t, &t);
        prop_assert_eq!(c.domain(), t.domain());
        prop_assert!(c.nodes().iter().all(|(_, p)| p.input.is_some() && p.input == p.output));
    }

    #[test]
    fn cut_and_plug_restore(t in arb_tree(ex1(), 4), pick in any::<prop::sample::Index>()) {
        let dom = t.domain();
        let u = pick.get(&dom).clone();
        let st = SpecialTree::cut(&t, &u).unwrap();
        prop_assert_eq!(st.hole_address(), u.clone());
        prop_assert_eq!(st.plug(t.subtree(&u).unwrap()), t.clone());
        prop_assert_eq!(SpecialTree::identity().splice(&st), st.clone());
    }

    #[test]
    fn max_path_len_matches_domain(t in arb_tree(ex1(), 4), u in prop::collection::vec(1usize..=2, 0..6)) {
        prop_assert_eq!(max_path_len_along(&t, &u), max_comparable(&t, &u));
    }
}
