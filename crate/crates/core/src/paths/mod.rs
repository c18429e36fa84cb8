//! Labeled paths, runs along them, state-transformation profiles and pumping.

mod profile;

use std::fmt::Write;

use crate::automata::{SpecAutomaton, StateId};
use crate::error::{Error, Result};
use crate::terms::{Pair, RankedAlphabet, Signature, SpecialTree, Sym, Tree};

pub use profile::{
    compose_profiles, find_idempotent_factorization, is_idempotent, letter_profile, profile,
    segment_profile, tau, Obligation, ObligationKind, PartialMap, Profile, ProfileCache, Tau,
};

/// Alternating symbols and directions `f1 j1 f2 j2 …`, ending in either.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct LabeledPath<L = Sym> {
    labels: Vec<L>,
    dirs: Vec<usize>,
}

impl<L: Copy> LabeledPath<L> {
    pub fn empty() -> Self {
        LabeledPath {
            labels: Vec::new(),
            dirs: Vec::new(),
        }
    }

    pub fn new(labels: Vec<L>, dirs: Vec<usize>) -> Result<Self> {
        let ok = dirs.len() == labels.len() || dirs.len() + 1 == labels.len();
        if !ok {
            return Err(Error::InvalidPath(format!(
                "{} symbols with {} directions",
                labels.len(),
                dirs.len()
            )));
        }
        if dirs.contains(&0) {
            return Err(Error::InvalidPath("directions are 1-based".into()));
        }
        Ok(LabeledPath { labels, dirs })
    }

    pub fn single(f: L) -> Self {
        LabeledPath {
            labels: vec![f],
            dirs: Vec::new(),
        }
    }

    /// Checks every direction against the arity of the symbol before it.
    pub fn check(&self, arity: impl Fn(L) -> usize) -> Result<()> {
        for (r, &d) in self.dirs.iter().enumerate() {
            if d > arity(self.labels[r]) {
                return Err(Error::InvalidPath(format!(
                    "direction {d} exceeds the arity of symbol {}",
                    r + 1
                )));
            }
        }
        Ok(())
    }

    pub fn labels(&self) -> &[L] {
        &self.labels
    }

    pub fn dirs(&self) -> &[usize] {
        &self.dirs
    }

    /// `‖π‖`, the number of symbols.
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn ends_in_direction(&self) -> bool {
        !self.labels.is_empty() && self.dirs.len() == self.labels.len()
    }

    pub fn last_symbol(&self) -> Option<L> {
        self.labels.last().copied()
    }

    /// `path(π)`: the address of the last symbol's node.
    pub fn node_path(&self) -> &[usize] {
        &self.dirs[..self.labels.len().saturating_sub(1)]
    }

    /// Address of the `r`-th symbol's node.
    pub fn address(&self, r: usize) -> &[usize] {
        &self.dirs[..r]
    }

    pub fn push_symbol(&self, f: L) -> Self {
        assert!(
            self.labels.is_empty() || self.ends_in_direction(),
            "path must end in a direction"
        );
        let mut p = self.clone();
        p.labels.push(f);
        p
    }

    pub fn push_direction(&self, j: usize) -> Self {
        assert!(
            !self.labels.is_empty() && !self.ends_in_direction(),
            "path must end in a symbol"
        );
        let mut p = self.clone();
        p.dirs.push(j);
        p
    }

    /// Drops the first symbol and its direction.
    pub fn tail(&self) -> Self {
        LabeledPath {
            labels: self.labels[1..].to_vec(),
            dirs: self.dirs.get(1..).unwrap_or(&[]).to_vec(),
        }
    }

    /// Symbols `from..to` with the directions following each of them that exist.
    pub fn slice(&self, from: usize, to: usize) -> Self {
        let end = to.min(self.dirs.len());
        LabeledPath {
            labels: self.labels[from..to].to_vec(),
            dirs: self.dirs[from.min(end)..end].to_vec(),
        }
    }

    pub fn concat(&self, other: &Self) -> Self {
        assert!(
            self.labels.is_empty() || self.ends_in_direction(),
            "path must end in a direction"
        );
        let mut p = self.clone();
        p.labels.extend_from_slice(&other.labels);
        p.dirs.extend_from_slice(&other.dirs);
        p
    }
}

impl LabeledPath<Sym> {
    /// Parses `f.1.g.1.a`; a symbol may be written `name:arity` to disambiguate.
    pub fn parse(text: &str, alphabet: &RankedAlphabet) -> Result<Self> {
        let mut labels = Vec::new();
        let mut dirs = Vec::new();
        if !text.trim().is_empty() {
            for (k, tok) in text.trim().split('.').enumerate() {
                let tok = tok.trim();
                if k % 2 == 1 {
                    let d = tok
                        .parse::<usize>()
                        .map_err(|_| Error::InvalidPath(format!("`{tok}` is not a direction")))?;
                    dirs.push(d);
                    continue;
                }
                let sym = match tok.split_once(':') {
                    Some((name, a)) => {
                        let a = a
                            .parse::<usize>()
                            .map_err(|_| Error::InvalidPath(format!("bad arity in `{tok}`")))?;
                        alphabet.resolve(name, a)?
                    }
                    None => match alphabet.by_name(tok).as_slice() {
                        [s] => *s,
                        [] => return Err(Error::UnknownSymbol(tok.to_string())),
                        _ => {
                            return Err(Error::InvalidPath(format!(
                                "`{tok}` is ambiguous; write name:arity"
                            )))
                        }
                    },
                };
                labels.push(sym);
            }
        }
        let p = LabeledPath::new(labels, dirs)?;
        p.check(|s| alphabet.arity(s))?;
        Ok(p)
    }

    pub fn display(&self, alphabet: &RankedAlphabet) -> String {
        self.display_with(|s| alphabet.name(s).to_string())
    }

    /// `T_Σ^π`: whether `t` carries the labels of `π` along its directions.
    pub fn matches(&self, t: &Tree) -> bool {
        (0..self.labels.len()).all(|r| t.label_at(self.address(r)) == Some(&self.labels[r]))
    }
}

impl<L: Copy> LabeledPath<L> {
    pub fn display_with(&self, mut name: impl FnMut(L) -> String) -> String {
        let mut s = String::new();
        for (r, &l) in self.labels.iter().enumerate() {
            if r > 0 {
                s.push('.');
            }
            s.push_str(&name(l));
            if let Some(d) = self.dirs.get(r) {
                let _ = write!(s, ".{d}");
            }
        }
        s
    }
}

/// `t ∈ T_Σ^π`.
pub fn trees_with_path(pi: &LabeledPath, t: &Tree) -> bool {
    pi.matches(t)
}

/// `x ⊗ y`: union of both path domains with ⊥ padding.
pub fn path_convolution(x: &LabeledPath, y: &LabeledPath) -> Result<LabeledPath<Pair>> {
    let n = x.len().max(y.len());
    let labels = (0..n)
        .map(|r| Pair::new(x.labels.get(r).copied(), y.labels.get(r).copied()))
        .collect();
    let mut dirs = Vec::new();
    for r in 0..x.dirs.len().max(y.dirs.len()) {
        match (x.dirs.get(r), y.dirs.get(r)) {
            (Some(a), Some(b)) if a != b => return Err(Error::DivergentPaths(r)),
            (Some(a), _) | (None, Some(a)) => dirs.push(*a),
            (None, None) => unreachable!(),
        }
    }
    LabeledPath::new(labels, dirs).map_err(|_| Error::DivergentPaths(n))
}

/// A partial run along a convolved path.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathRun {
    /// States of the nodes reached, starting with the root.
    pub states: Vec<StateId>,
    /// Every symbol on the path has a transition.
    pub complete: bool,
    /// The state at the position after the path (at `path·i`), or at the
    /// last node when the path ends in a symbol; `None` unless complete.
    pub end: Option<StateId>,
    /// Complete, ending in a leaf symbol whose transition exists.
    pub accepting: bool,
}

pub fn run_on_path(spec: &SpecAutomaton, q: StateId, xy: &LabeledPath<Pair>) -> PathRun {
    let mut states = vec![q];
    let mut s = q;
    let mut complete = true;
    for (r, &label) in xy.labels().iter().enumerate() {
        let Some(to) = spec.delta(s, label) else {
            complete = false;
            break;
        };
        if let Some(&d) = xy.dirs().get(r) {
            let Some(&next) = to.get(d - 1) else {
                complete = false;
                break;
            };
            s = next;
            states.push(s);
        }
    }
    let end = complete.then_some(s);
    let accepting = complete
        && !xy.ends_in_direction()
        && xy
            .last_symbol()
            .is_some_and(|l| spec.signature().label_arity(l) == 0);
    PathRun {
        states,
        complete,
        end,
        accepting,
    }
}

/// Replaces the subtree at `start` by `n` copies of the slice between `start` and `end`.
pub fn pump(t: &Tree, start: &[usize], end: &[usize], n: usize) -> Result<Tree> {
    if end.len() <= start.len() || !end.starts_with(start) {
        return Err(Error::InvalidPath(
            "the second cut must lie strictly below the first".into(),
        ));
    }
    let sx = SpecialTree::cut(t, start)?;
    let below = t
        .subtree(start)
        .ok_or_else(|| Error::MissingNode(start.to_vec()))?;
    let sy = SpecialTree::cut(below, &end[start.len()..])?;
    let that = t
        .subtree(end)
        .ok_or_else(|| Error::MissingNode(end.to_vec()))?;
    let mut s = sx;
    for _ in 0..n {
        s = s.splice(&sy);
    }
    Ok(s.plug(that))
}

/// A split `π = x·i·y·j·z`, by symbol positions: `x` has `start` symbols, `y` has `len`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Factorization {
    pub start: usize,
    pub len: usize,
}

impl Factorization {
    pub fn x<L: Copy>(&self, pi: &LabeledPath<L>) -> LabeledPath<L> {
        LabeledPath {
            labels: pi.labels[..self.start].to_vec(),
            dirs: pi.dirs[..self.start.saturating_sub(1)].to_vec(),
        }
    }

    pub fn i<L: Copy>(&self, pi: &LabeledPath<L>) -> Option<usize> {
        self.start.checked_sub(1).map(|k| pi.dirs[k])
    }

    pub fn y<L: Copy>(&self, pi: &LabeledPath<L>) -> LabeledPath<L> {
        let end = self.start + self.len;
        LabeledPath {
            labels: pi.labels[self.start..end].to_vec(),
            dirs: pi.dirs[self.start..end - 1].to_vec(),
        }
    }

    pub fn j<L: Copy>(&self, pi: &LabeledPath<L>) -> usize {
        pi.dirs[self.start + self.len - 1]
    }

    /// `y·j`.
    pub fn segment<L: Copy>(&self, pi: &LabeledPath<L>) -> LabeledPath<L> {
        pi.slice(self.start, self.start + self.len)
    }

    pub fn z<L: Copy>(&self, pi: &LabeledPath<L>) -> LabeledPath<L> {
        pi.slice(self.start + self.len, pi.len())
    }

    /// Addresses of the first node of `y` and of the node after `y·j`.
    pub fn cuts<L: Copy>(&self, pi: &LabeledPath<L>) -> (Vec<usize>, Vec<usize>) {
        (
            pi.dirs[..self.start].to_vec(),
            pi.dirs[..self.start + self.len].to_vec(),
        )
    }
}

/// `t^n = s_x · s_y^n · t̂` for the cut nodes of a factorization of a path of `t`.
pub fn pump_factorization<L: Copy>(
    t: &Tree,
    pi: &LabeledPath<L>,
    f: Factorization,
    n: usize,
) -> Result<Tree> {
    let (a, b) = f.cuts(pi);
    pump(t, &a, &b, n)
}
