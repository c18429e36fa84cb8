use std::cell::RefCell;
use std::collections::{BTreeSet, HashMap};
use std::rc::Rc;

use crate::automata::{GuardState, Predicates, SpecAutomaton, StateId};
use crate::error::Result;
use crate::game::{Arena, Player};
use crate::paths::{find_idempotent_factorization, Factorization, LabeledPath, ProfileCache};
use crate::terms::{Pair, Sym};

use super::pathrec::{decide_with, PathRecWitness};
use super::SynthOptions;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DelayBound {
    Bounded(usize),
    Unbounded,
}

/// A vertex of the delay game.
///
/// `Branch` holds the aligned states waiting for In's next input. `Pending`
/// holds a state with the input read ahead of the output; `guard` is the
/// input-guard state at the first node of `path`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Vertex {
    Branch(Vec<(StateId, GuardState)>),
    Pending {
        state: StateId,
        path: LabeledPath,
        guard: GuardState,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Move {
    /// In plays an input symbol.
    Input(Sym),
    /// Out emits the output symbol for the first pending node.
    Output(Sym),
    /// Out waits and asks In to continue in a direction.
    Delay(usize),
    /// Out hands the pending state to a path-recognizable fragment.
    Stay,
}

/// What the unbounded game found at a saturated vertex.
#[derive(Clone, Debug)]
pub struct StayRecord {
    pub state: StateId,
    pub path: LabeledPath,
    pub guard: GuardState,
    pub factorization: Factorization,
    pub witness: Option<Rc<PathRecWitness>>,
}

type StayKey = (StateId, LabeledPath, GuardState);

pub struct DelayGame<'a> {
    preds: Predicates<'a>,
    bound: DelayBound,
    profiles: ProfileCache<'a>,
    stays: RefCell<HashMap<StayKey, Option<StayRecord>>>,
    opts: SynthOptions,
}

impl<'a> DelayGame<'a> {
    pub fn new(preds: Predicates<'a>, bound: DelayBound, opts: SynthOptions) -> Self {
        let profiles = ProfileCache::new(preds.spec());
        DelayGame {
            preds,
            bound,
            profiles,
            stays: RefCell::new(HashMap::new()),
            opts,
        }
    }

    pub fn spec(&self) -> &'a SpecAutomaton {
        self.preds.spec()
    }

    pub fn predicates(&self) -> &Predicates<'a> {
        &self.preds
    }

    pub fn bound(&self) -> DelayBound {
        self.bound
    }

    fn arity_in(&self, f: Sym) -> usize {
        self.spec().signature().input.arity(f)
    }

    fn arity_out(&self, g: Sym) -> usize {
        self.spec().signature().output.arity(g)
    }

    /// Guard states of the children of `f` played at `b`.
    pub(crate) fn children_guard(&self, b: GuardState, f: Sym) -> Vec<GuardState> {
        self.preds
            .guard()
            .step(b, f, self.arity_in(f))
            .expect("only legal inputs are played")
    }

    /// Guard state at the position right after `path` (which ends in a direction).
    fn guard_after(&self, b: GuardState, path: &LabeledPath) -> GuardState {
        let mut cb = b;
        for (r, &f) in path.labels().iter().enumerate() {
            cb = self.children_guard(cb, f)[path.dirs()[r] - 1];
        }
        cb
    }

    /// Saturation data of an Out vertex of the unbounded game, computing the stay decision once.
    pub fn stay(
        &self,
        q: StateId,
        path: &LabeledPath,
        b: GuardState,
    ) -> Result<Option<StayRecord>> {
        let key = (q, path.clone(), b);
        if let Some(r) = self.stays.borrow().get(&key) {
            return Ok(r.clone());
        }
        let rec = match find_idempotent_factorization(&self.profiles, path) {
            None => None,
            Some(factorization) => {
                let witness = decide_with(&self.preds, q, path, b, &self.opts)?.map(Rc::new);
                Some(StayRecord {
                    state: q,
                    path: path.clone(),
                    guard: b,
                    factorization,
                    witness,
                })
            }
        };
        self.stays.borrow_mut().insert(key, rec.clone());
        Ok(rec)
    }

    /// Every saturated vertex met so far, in a stable order.
    pub fn stay_records(&self) -> Vec<StayRecord> {
        let mut v: Vec<StayRecord> = self.stays.borrow().values().flatten().cloned().collect();
        v.sort_by(|a, b| (a.state, &a.path, a.guard).cmp(&(b.state, &b.path, b.guard)));
        v
    }

    /// The off-path requirement for child `l` (0-based) of a node where
    /// input `rf` and output `rg` arities meet.
    fn child_ok(&self, l: usize, rf: usize, rg: usize, q: StateId, b: GuardState) -> bool {
        if l < rf && l < rg {
            self.preds.uniform_single(q, b).is_some()
        } else if l < rf {
            self.preds.univ_input(q, b)
        } else {
            self.preds.has_output(q)
        }
    }

    /// Does `q` accept `t ⊗ ⊥` for every legal `t` through the remaining `path`?
    fn univ_along(&self, q: StateId, b: GuardState, path: &LabeledPath) -> bool {
        let (mut s, mut cb) = (q, b);
        for (r, &f) in path.labels().iter().enumerate() {
            let bs = self.children_guard(cb, f);
            let Some(to) = self.spec().delta(s, Pair::new(Some(f), None)) else {
                return false;
            };
            let d = path.dirs().get(r).copied();
            for l in 0..to.len() {
                if d != Some(l + 1) && !self.preds.univ_input(to[l], bs[l]) {
                    return false;
                }
            }
            if let Some(d) = d {
                s = to[d - 1];
                cb = bs[d - 1];
            }
        }
        true
    }

    fn output_moves(&self, q: StateId, path: &LabeledPath, b: GuardState) -> Vec<(Move, Vertex)> {
        let f = path.labels()[0];
        let rf = self.arity_in(f);
        let bs = self.children_guard(b, f);
        let mut moves = Vec::new();
        for g in self.spec().signature().output.symbols() {
            let rg = self.arity_out(g);
            let Some(to) = self.spec().delta(q, Pair::both(f, g)) else {
                continue;
            };
            if path.len() == 1 {
                let mut set = BTreeSet::new();
                let mut ok = true;
                for l in 0..rf.max(rg) {
                    if l < rf && l < rg {
                        set.insert((to[l], bs[l]));
                    } else {
                        ok &= self.child_ok(l, rf, rg, to[l], bs.get(l).copied().unwrap_or(b));
                    }
                    if !ok {
                        break;
                    }
                }
                if ok {
                    moves.push((Move::Output(g), Vertex::Branch(set.into_iter().collect())));
                }
            } else {
                let j = path.dirs()[0];
                let ok = (0..rf.max(rg))
                    .filter(|&l| l + 1 != j)
                    .all(|l| self.child_ok(l, rf, rg, to[l], bs.get(l).copied().unwrap_or(b)));
                if !ok {
                    continue;
                }
                let rest = path.tail();
                if j <= rg {
                    moves.push((
                        Move::Output(g),
                        Vertex::Pending {
                            state: to[j - 1],
                            path: rest,
                            guard: bs[j - 1],
                        },
                    ));
                } else if self.univ_along(to[j - 1], bs[j - 1], &rest) {
                    moves.push((Move::Output(g), Vertex::Branch(Vec::new())));
                }
            }
        }
        moves
    }
}

impl Arena for DelayGame<'_> {
    type Vertex = Vertex;
    type Label = Move;

    fn initial(&self) -> Vertex {
        Vertex::Branch(vec![(self.spec().initial(), self.preds.guard().initial())])
    }

    fn owner(&self, v: &Vertex) -> Player {
        match v {
            Vertex::Branch(_) => Player::In,
            Vertex::Pending { path, .. } if path.ends_in_direction() => Player::In,
            Vertex::Pending { .. } => Player::Out,
        }
    }

    fn moves(&self, v: &Vertex) -> Result<Vec<(Move, Vertex)>> {
        match v {
            Vertex::Branch(set) => Ok(set
                .iter()
                .flat_map(|&(q, b)| {
                    self.preds.legal_inputs(b).into_iter().map(move |(f, _)| {
                        (
                            Move::Input(f),
                            Vertex::Pending {
                                state: q,
                                path: LabeledPath::single(f),
                                guard: b,
                            },
                        )
                    })
                })
                .collect()),
            Vertex::Pending { state, path, guard } if path.ends_in_direction() => {
                let at = self.guard_after(*guard, path);
                Ok(self
                    .preds
                    .legal_inputs(at)
                    .into_iter()
                    .map(|(f, _)| {
                        (
                            Move::Input(f),
                            Vertex::Pending {
                                state: *state,
                                path: path.push_symbol(f),
                                guard: *guard,
                            },
                        )
                    })
                    .collect())
            }
            Vertex::Pending { state, path, guard } => {
                let mut moves = self.output_moves(*state, path, *guard);
                let delay_ok = match self.bound {
                    DelayBound::Bounded(k) => path.len() < k,
                    DelayBound::Unbounded => match self.stay(*state, path, *guard)? {
                        None => true,
                        Some(rec) => {
                            if rec.witness.is_some() {
                                moves.push((Move::Stay, v.clone()));
                            }
                            false
                        }
                    },
                };
                if delay_ok {
                    let last = path.last_symbol().unwrap();
                    for j in 1..=self.arity_in(last) {
                        moves.push((
                            Move::Delay(j),
                            Vertex::Pending {
                                state: *state,
                                path: path.push_direction(j),
                                guard: *guard,
                            },
                        ));
                    }
                }
                Ok(moves)
            }
        }
    }
}
