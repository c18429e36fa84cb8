use std::cell::RefCell;
use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::automata::{GuardState, Predicates, SpecAutomaton, StateId};
use crate::error::{Error, Result};
use crate::terms::{Pair, Sym};

use super::{Factorization, LabeledPath};

/// A partial function on automaton states, stored as its graph.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PartialMap(pub Vec<Option<StateId>>);

impl PartialMap {
    pub fn identity(n: usize) -> Self {
        PartialMap((0..n as u32).map(|i| Some(StateId(i))).collect())
    }

    pub fn apply(&self, q: StateId) -> Option<StateId> {
        self.0[q.index()]
    }

    /// `g ∘ self`.
    pub fn then(&self, g: &PartialMap) -> PartialMap {
        PartialMap(self.0.iter().map(|q| q.and_then(|q| g.apply(q))).collect())
    }
}

impl fmt::Display for PartialMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            match v {
                Some(q) => write!(f, "{i}>{}", q.0)?,
                None => write!(f, "{i}>-")?,
            }
        }
        write!(f, "]")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ObligationKind {
    /// Both sides continue: one output must fit every input.
    Uniform,
    /// Only the input continues: every input with ⊥ output.
    UnivInput,
    /// Only the output continues: some output against ⊥.
    ExistsOutput,
}

/// An off-path child requirement met while computing τ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Obligation {
    pub node: usize,
    pub child: usize,
    pub state: StateId,
    pub kind: ObligationKind,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tau {
    pub map: PartialMap,
    /// Obligations encountered from each start state, up to the first failure.
    pub obligations: Vec<Vec<Obligation>>,
}

/// `τ_{xi,y}`: the state reached at direction `i` after `x ⊗ y`, defined only
/// where every off-path child obligation holds.
pub fn tau(preds: &Predicates<'_>, x: &LabeledPath, i: usize, y: &LabeledPath) -> Result<Tau> {
    let spec = preds.spec();
    let sigma = &spec.signature().input;
    let gamma = &spec.signature().output;
    let last = x
        .last_symbol()
        .ok_or_else(|| Error::InvalidPath("x is empty".into()))?;
    if x.ends_in_direction() || i == 0 || i > sigma.arity(last) {
        return Err(Error::InvalidPath(
            "x must end in a symbol with i within its arity".into(),
        ));
    }
    x.check(|s| sigma.arity(s))?;
    if y.len() > x.len() || y.ends_in_direction() || y.dirs() != &x.dirs()[..y.dirs().len()] {
        return Err(Error::InvalidPath(
            "path(y) is not a prefix of path(x)".into(),
        ));
    }
    y.check(|s| gamma.arity(s))?;

    let mut map = Vec::with_capacity(spec.num_states());
    let mut obligations = Vec::with_capacity(spec.num_states());
    for q in spec.states() {
        let mut s = q;
        let mut obs = Vec::new();
        let mut defined = true;
        for r in 0..x.len() {
            let f = x.labels()[r];
            let g = y.labels().get(r).copied();
            let d = if r + 1 < x.len() { x.dirs()[r] } else { i };
            let Some(to) = spec.delta(s, Pair::new(Some(f), g)) else {
                defined = false;
                break;
            };
            let rf = sigma.arity(f);
            let rg = g.map_or(0, |g| gamma.arity(g));
            for l in (1..=rf.max(rg)).filter(|&l| l != d) {
                let state = to[l - 1];
                let (kind, holds) = if l <= rf && l <= rg {
                    (
                        ObligationKind::Uniform,
                        preds.uniform_single(state, GuardState::ANY).is_some(),
                    )
                } else if l <= rf {
                    (
                        ObligationKind::UnivInput,
                        preds.univ_input(state, GuardState::ANY),
                    )
                } else {
                    (ObligationKind::ExistsOutput, preds.has_output(state))
                };
                obs.push(Obligation {
                    node: r,
                    child: l,
                    state,
                    kind,
                    holds,
                });
                defined &= holds;
            }
            if !defined {
                break;
            }
            s = to[d - 1];
        }
        map.push(defined.then_some(s));
        obligations.push(obs);
    }
    Ok(Tau {
        map: PartialMap(map),
        obligations,
    })
}

/// The three τ-sets of a segment: overlays covering it and continuing past
/// its end (`eq`), non-empty overlays ending inside it (`lt`), and the empty overlay (`eps`).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Profile {
    pub eq: BTreeSet<PartialMap>,
    pub lt: BTreeSet<PartialMap>,
    pub eps: BTreeSet<PartialMap>,
}

impl Profile {
    /// Profile of the empty segment.
    pub fn identity(n: usize) -> Self {
        let id: BTreeSet<_> = [PartialMap::identity(n)].into();
        Profile {
            eq: id.clone(),
            lt: BTreeSet::new(),
            eps: id,
        }
    }
}

fn compose_sets(
    a: &BTreeSet<PartialMap>,
    b: &BTreeSet<PartialMap>,
    into: &mut BTreeSet<PartialMap>,
) {
    for f in a {
        for g in b {
            into.insert(f.then(g));
        }
    }
}

/// Profile of the concatenation of two segments.
pub fn compose_profiles(p1: &Profile, p2: &Profile) -> Profile {
    let mut out = Profile::default();
    compose_sets(&p1.eq, &p2.eq, &mut out.eq);
    compose_sets(&p1.eq, &p2.lt, &mut out.lt);
    compose_sets(&p1.lt, &p2.eps, &mut out.lt);
    compose_sets(&p1.eps, &p2.eps, &mut out.eps);
    out
}

/// Profile of `x·i` by enumerating every output overlay.
pub fn profile(preds: &Predicates<'_>, x: &LabeledPath, i: usize) -> Result<Profile> {
    let gamma = &preds.spec().signature().output;
    let m = x.len();
    if m == 0 {
        return Err(Error::InvalidPath("profile of an empty segment".into()));
    }
    let dir = |r: usize| if r + 1 < m { x.dirs()[r] } else { i };
    let mut out = Profile::default();
    let mut stack: Vec<Vec<Sym>> = vec![Vec::new()];
    while let Some(ys) = stack.pop() {
        let p = ys.len();
        let set = match ys.last() {
            None => Some(&mut out.eps),
            Some(&g) if gamma.arity(g) < dir(p - 1) => Some(&mut out.lt),
            Some(_) if p == m => Some(&mut out.eq),
            Some(_) => None,
        };
        if let Some(set) = set {
            let y = LabeledPath::new(ys.clone(), x.dirs()[..p.saturating_sub(1)].to_vec())?;
            set.extend(tau(preds, x, i, &y).map(|t| t.map));
        }
        let can_extend = p < m && ys.last().is_none_or(|&g| gamma.arity(g) >= dir(p - 1));
        if can_extend {
            for g in gamma.symbols() {
                let mut next = ys.clone();
                next.push(g);
                stack.push(next);
            }
        }
    }
    Ok(out)
}

/// Profile of the one-symbol segment `f·d`.
pub fn letter_profile(preds: &Predicates<'_>, f: Sym, d: usize) -> Result<Profile> {
    profile(preds, &LabeledPath::single(f), d)
}

/// `P == P·P`, with `P` the directly computed profile of `y·j`.
pub fn is_idempotent(preds: &Predicates<'_>, y: &LabeledPath, j: usize) -> Result<bool> {
    let p = profile(preds, y, j)?;
    Ok(compose_profiles(&p, &p) == p)
}

/// Single-letter profiles over the total input domain, computed once each.
pub struct ProfileCache<'a> {
    preds: Predicates<'a>,
    letters: RefCell<HashMap<(Sym, usize), Profile>>,
}

impl<'a> ProfileCache<'a> {
    pub fn new(spec: &'a SpecAutomaton) -> Self {
        ProfileCache {
            preds: Predicates::total(spec),
            letters: RefCell::new(HashMap::new()),
        }
    }

    pub fn predicates(&self) -> &Predicates<'a> {
        &self.preds
    }

    pub fn letter(&self, f: Sym, d: usize) -> Profile {
        if let Some(p) = self.letters.borrow().get(&(f, d)) {
            return p.clone();
        }
        let p = letter_profile(&self.preds, f, d).expect("direction within arity");
        self.letters.borrow_mut().insert((f, d), p.clone());
        p
    }
}

/// Profile of a segment ending in a direction, folded from single letters.
pub fn segment_profile(cache: &ProfileCache<'_>, segment: &LabeledPath) -> Profile {
    let n = cache.preds.spec().num_states();
    let mut p = Profile::identity(n);
    for (r, &f) in segment.labels().iter().enumerate() {
        p = compose_profiles(&p, &cache.letter(f, segment.dirs()[r]));
    }
    p
}

/// Finds `π = x·i·y·j·z` with `y·j` idempotent and `z` non-empty; shortest `y` first, then leftmost.
pub fn find_idempotent_factorization(
    cache: &ProfileCache<'_>,
    pi: &LabeledPath,
) -> Option<Factorization> {
    let n = pi.len();
    let states = cache.preds.spec().num_states();
    // prefix[s][m-1] = profile of the m symbols starting at s
    let mut prefix: Vec<Vec<Profile>> = Vec::new();
    for s in 0..n {
        let mut row = Vec::new();
        let mut p = Profile::identity(states);
        for r in s..n.saturating_sub(1) {
            p = compose_profiles(&p, &cache.letter(pi.labels()[r], pi.dirs()[r]));
            row.push(p.clone());
        }
        prefix.push(row);
    }
    for len in 1..n {
        for start in 0..n - len {
            let p = &prefix[start][len - 1];
            if compose_profiles(p, p) == *p {
                return Some(Factorization { start, len });
            }
        }
    }
    None
}
