//! Deciding whether a pending state can be finished by a path-recognizable fragment.
//!
//! The fragment reads one path below the pending input, relaying from node
//! to child, and emits a single closed output tree when it stops. Out picks
//! the direction at each node; every off-path subtree must be covered by an
//! input-independent output. Output guesses still open are kept as a set of
//! tracks, so the choice between them is made at the end.

use crate::automata::{GuardState, Predicates, StateId};
use crate::error::Result;
use crate::game::{solve, Arena, Player, Solution, VertexId};
use crate::paths::LabeledPath;
use crate::terms::{
    close, hole, splice, to_closed, Open, OpenTree, Pair, RankedAlphabet, Sym, Tree,
};

use super::SynthOptions;

/// One output guess: the tree emitted so far and the relation state at its hole.
///
/// An active track has a hole on the path being read and `spine` output nodes
/// above it. An ended track has a closed output and keeps checking the input against ⊥.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Track {
    pub state: StateId,
    pub out: OpenTree<Sym>,
    pub spine: Option<usize>,
}

impl Track {
    fn start(q: StateId) -> Self {
        Track {
            state: q,
            out: hole(),
            spine: Some(0),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum PrVertex {
    /// In proposes the symbol at the current node.
    Pos {
        tracks: Vec<Track>,
        guard: GuardState,
    },
    /// Out closes a track or picks the direction to follow.
    Read {
        tracks: Vec<Track>,
        guard: GuardState,
        symbol: Sym,
    },
    /// The fragment has its output.
    Won(Tree),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PrMove {
    Propose(Sym),
    Direction(usize),
    Close,
}

/// Where a fragment rule sends the run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FragTarget {
    Pos(VertexId),
    Won(Tree),
}

/// Right-hand side of a fragment rule.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FragRhs {
    /// Continue on `x_j`.
    Relay(usize, FragTarget),
    /// Emit the output at a leaf.
    Emit(Tree),
}

pub struct PathRecGame<'p, 'a> {
    preds: &'p Predicates<'a>,
    cap: usize,
    root: PrVertex,
}

impl PathRecGame<'_, '_> {
    fn arity_in(&self, f: Sym) -> usize {
        self.preds.spec().signature().input.arity(f)
    }

    fn children_guard(&self, b: GuardState, f: Sym) -> Vec<GuardState> {
        self.preds
            .guard()
            .step(b, f, self.arity_in(f))
            .expect("only legal inputs are proposed")
    }

    /// Output for child `l` (0-based) when it leaves the path, if one exists.
    fn off_path(
        &self,
        l: usize,
        rf: usize,
        rg: usize,
        q: StateId,
        b: GuardState,
    ) -> Option<Option<Tree>> {
        if l < rf && l < rg {
            self.preds.uniform_single(q, b).map(Some)
        } else if l < rf {
            self.preds.univ_input(q, b).then_some(None)
        } else {
            self.preds.exists_output(q).map(Some)
        }
    }

    /// `g(...)` over the off-path outputs, with the hole at `j` if given.
    fn node(
        &self,
        q: StateId,
        f: Sym,
        g: Sym,
        b: GuardState,
        j: Option<usize>,
    ) -> Option<(OpenTree<Sym>, Vec<StateId>)> {
        let rf = self.arity_in(f);
        let rg = self.preds.spec().signature().output.arity(g);
        let to = self.preds.spec().delta(q, Pair::both(f, g))?;
        let bs = self.children_guard(b, f);
        let mut children = Vec::with_capacity(rg);
        for l in 0..rf.max(rg) {
            if Some(l + 1) == j {
                if l < rg {
                    children.push(hole());
                }
                continue;
            }
            let t = self.off_path(l, rf, rg, to[l], bs.get(l).copied().unwrap_or(b))?;
            if let Some(t) = t {
                children.push(close(&t));
            }
        }
        Some((Tree::new(Open::Label(g), children), to.to_vec()))
    }

    fn ended_ok(
        &self,
        q: StateId,
        f: Sym,
        b: GuardState,
        skip: Option<usize>,
    ) -> Option<Vec<StateId>> {
        let to = self.preds.spec().delta(q, Pair::new(Some(f), None))?;
        let bs = self.children_guard(b, f);
        (0..to.len())
            .filter(|&l| Some(l + 1) != skip)
            .all(|l| self.preds.univ_input(to[l], bs[l]))
            .then(|| to.to_vec())
    }

    /// The first track that can close its output at `f`.
    fn done(&self, tracks: &[Track], b: GuardState, f: Sym) -> Option<Tree> {
        for tr in tracks {
            match tr.spine {
                Some(_) => {
                    for g in self.preds.spec().signature().output.symbols() {
                        if let Some((node, _)) = self.node(tr.state, f, g, b, None) {
                            let t = splice(&tr.out, &node).expect("active track has a hole");
                            return Some(to_closed(&t).expect("closed"));
                        }
                    }
                }
                None => {
                    if self.ended_ok(tr.state, f, b, None).is_some() {
                        return Some(to_closed(&tr.out).expect("ended track is closed"));
                    }
                }
            }
        }
        None
    }

    /// Tracks after following direction `j` from `f`.
    fn advance(&self, tracks: &[Track], b: GuardState, f: Sym, j: usize) -> Vec<Track> {
        let mut next = Vec::new();
        for tr in tracks {
            match tr.spine {
                Some(s) if s < self.cap => {
                    for g in self.preds.spec().signature().output.symbols() {
                        let Some((node, to)) = self.node(tr.state, f, g, b, Some(j)) else {
                            continue;
                        };
                        let out = splice(&tr.out, &node).expect("active track has a hole");
                        let rg = self.preds.spec().signature().output.arity(g);
                        let spine = (j <= rg).then_some(s + 1);
                        next.push(Track {
                            state: to[j - 1],
                            out,
                            spine,
                        });
                    }
                }
                Some(_) => {}
                None => {
                    if let Some(to) = self.ended_ok(tr.state, f, b, Some(j)) {
                        next.push(Track {
                            state: to[j - 1],
                            out: tr.out.clone(),
                            spine: None,
                        });
                    }
                }
            }
        }
        next.sort();
        next.dedup();
        next
    }

    /// An ended track whose state accepts every remaining input with ⊥.
    fn settled(&self, tracks: &[Track], b: GuardState) -> Option<Tree> {
        tracks
            .iter()
            .find(|tr| tr.spine.is_none() && self.preds.univ_input(tr.state, b))
            .map(|tr| to_closed(&tr.out).expect("ended track is closed"))
    }
}

impl Arena for PathRecGame<'_, '_> {
    type Vertex = PrVertex;
    type Label = PrMove;

    fn initial(&self) -> PrVertex {
        self.root.clone()
    }

    fn owner(&self, v: &PrVertex) -> Player {
        match v {
            PrVertex::Read { .. } => Player::Out,
            _ => Player::In,
        }
    }

    fn moves(&self, v: &PrVertex) -> Result<Vec<(PrMove, PrVertex)>> {
        Ok(match v {
            PrVertex::Won(_) => Vec::new(),
            PrVertex::Pos { tracks, guard } => self
                .preds
                .legal_inputs(*guard)
                .into_iter()
                .map(|(f, _)| {
                    (
                        PrMove::Propose(f),
                        PrVertex::Read {
                            tracks: tracks.clone(),
                            guard: *guard,
                            symbol: f,
                        },
                    )
                })
                .collect(),
            PrVertex::Read {
                tracks,
                guard,
                symbol,
            } => {
                if let Some(t) = self.done(tracks, *guard, *symbol) {
                    return Ok(vec![(PrMove::Close, PrVertex::Won(t))]);
                }
                let bs = self.children_guard(*guard, *symbol);
                let mut moves = Vec::new();
                for j in 1..=bs.len() {
                    let next = self.advance(tracks, *guard, *symbol, j);
                    if next.is_empty() {
                        continue;
                    }
                    let target = match self.settled(&next, bs[j - 1]) {
                        Some(t) => PrVertex::Won(t),
                        None => PrVertex::Pos {
                            tracks: next,
                            guard: bs[j - 1],
                        },
                    };
                    moves.push((PrMove::Direction(j), target));
                }
                moves
            }
        })
    }
}

/// Out's winning strategy in the path-recognizability game of one pending vertex.
#[derive(Clone, Debug)]
pub struct PathRecWitness {
    pub state: StateId,
    pub forced: LabeledPath,
    pub guard: GuardState,
    solution: Solution<PrVertex, PrMove>,
}

impl PathRecWitness {
    pub fn solution(&self) -> &Solution<PrVertex, PrMove> {
        &self.solution
    }

    /// The root position when nothing was read ahead.
    pub fn root_pos(&self) -> Option<VertexId> {
        matches!(self.solution.vertex(0), PrVertex::Pos { .. }).then_some(0)
    }

    fn rhs_at_read(&self, read: VertexId, sigma: &RankedAlphabet) -> FragRhs {
        match self.solution.vertex(read) {
            PrVertex::Won(t) => FragRhs::Emit(t.clone()),
            PrVertex::Read { symbol, .. } => {
                let (mv, w) = self
                    .solution
                    .strategy(read)
                    .expect("winning Read vertex has a strategy");
                match (mv, self.solution.vertex(*w)) {
                    (PrMove::Close, PrVertex::Won(t)) if sigma.arity(*symbol) == 0 => {
                        FragRhs::Emit(t.clone())
                    }
                    (PrMove::Close, PrVertex::Won(t)) => {
                        FragRhs::Relay(1, FragTarget::Won(t.clone()))
                    }
                    (PrMove::Direction(j), PrVertex::Won(t)) => {
                        FragRhs::Relay(*j, FragTarget::Won(t.clone()))
                    }
                    (PrMove::Direction(j), _) => FragRhs::Relay(*j, FragTarget::Pos(*w)),
                    _ => unreachable!("Out moves are Close or Direction"),
                }
            }
            PrVertex::Pos { .. } => {
                unreachable!("entry is read only when the forced path is non-empty")
            }
        }
    }

    /// How the fragment continues after the forced path has been read.
    pub fn entry(&self, sigma: &RankedAlphabet) -> FragRhs {
        self.rhs_at_read(0, sigma)
    }

    /// One rule per legal symbol at a winning position.
    pub fn rules_at(&self, pos: VertexId, sigma: &RankedAlphabet) -> Vec<(Sym, FragRhs)> {
        self.solution
            .moves(pos)
            .iter()
            .map(|(mv, read)| {
                let PrMove::Propose(f) = mv else {
                    unreachable!("In proposes symbols")
                };
                (*f, self.rhs_at_read(*read, sigma))
            })
            .collect()
    }
}

/// Solves the path-recognizability game for state `q` with `forced` already
/// read (a path ending in a symbol, or empty) from guard state `b`.
pub fn decide_with(
    preds: &Predicates<'_>,
    q: StateId,
    forced: &LabeledPath,
    b: GuardState,
    opts: &SynthOptions,
) -> Result<Option<PathRecWitness>> {
    let cap = forced.len().max(1) + opts.spine_slack;
    let mut game = PathRecGame {
        preds,
        cap,
        root: PrVertex::Won(Tree::leaf(Sym(0))),
    };
    let mut tracks = vec![Track::start(q)];
    let mut guard = b;
    let m = forced.len();
    game.root = if m == 0 {
        PrVertex::Pos { tracks, guard }
    } else {
        let mut root = None;
        for r in 0..m - 1 {
            let f = forced.labels()[r];
            let d = forced.dirs()[r];
            if let Some(t) = game.done(&tracks, guard, f) {
                root = Some(PrVertex::Won(t));
                break;
            }
            tracks = game.advance(&tracks, guard, f, d);
            if tracks.is_empty() {
                return Ok(None);
            }
            guard = game.children_guard(guard, f)[d - 1];
            if let Some(t) = game.settled(&tracks, guard) {
                root = Some(PrVertex::Won(t));
                break;
            }
        }
        root.unwrap_or(PrVertex::Read {
            tracks,
            guard,
            symbol: forced.labels()[m - 1],
        })
    };
    let solution = solve(&game, opts.max_vertices)?;
    Ok(solution.initial_winning().then(|| PathRecWitness {
        state: q,
        forced: forced.clone(),
        guard: b,
        solution,
    }))
}
