use std::collections::{HashMap, HashSet, VecDeque};
use std::rc::Rc;

use crate::automata::{GuardState, StateId};
use crate::error::{Error, Result};
use crate::game::{Solution, VertexId};
use crate::paths::LabeledPath;
use crate::terms::{Pair, RankedAlphabet, Sym, Tree};
use crate::transducers::{Lhs, RhsLabel, Rule, Transducer};

use super::arena::{DelayGame, Move, Vertex};
use super::pathrec::{FragRhs, FragTarget, PathRecWitness};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Key {
    Aligned(StateId, GuardState),
    Relay(StateId, LabeledPath, GuardState),
    Frag(usize, VertexId),
    Won(Tree),
    Entry(usize),
}

/// A transducer read off Out's strategy, with the states that belong to
/// path-recognizable fragments.
pub(crate) struct Extracted {
    pub transducer: Transducer,
    pub fragment_states: Vec<StateId>,
}

struct Builder<'g, 'a> {
    game: &'g DelayGame<'a>,
    sol: Option<&'g Solution<Vertex, Move>>,
    keys: Vec<Key>,
    ids: HashMap<Key, StateId>,
    names: Vec<String>,
    taken: HashSet<String>,
    queue: VecDeque<StateId>,
    witnesses: Vec<Rc<PathRecWitness>>,
}

fn sanitize(s: &str) -> String {
    s.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '_' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

fn out(g: Sym, children: Vec<Tree<RhsLabel>>) -> Tree<RhsLabel> {
    Tree::new(RhsLabel::Out(g), children)
}

fn lift(t: &Tree) -> Tree<RhsLabel> {
    t.map(&mut |g| RhsLabel::Out(*g))
}

fn call(q: StateId, j: usize) -> Tree<RhsLabel> {
    Tree::leaf(RhsLabel::Call(q, j))
}

/// Replaces the call placeholder `Call(PLUG, 0)` by `by`.
const PLUG: StateId = StateId(u32::MAX);

fn plug(t: &Tree<RhsLabel>, by: &Tree<RhsLabel>) -> Tree<RhsLabel> {
    match t.label {
        RhsLabel::Call(PLUG, 0) => by.clone(),
        l => Tree::new(l, t.children.iter().map(|c| plug(c, by)).collect()),
    }
}

impl<'g, 'a> Builder<'g, 'a> {
    fn sigma(&self) -> &'a RankedAlphabet {
        &self.game.spec().signature().input
    }

    fn gamma(&self) -> &'a RankedAlphabet {
        &self.game.spec().signature().output
    }

    fn guard_name(&self, b: GuardState) -> String {
        self.game
            .predicates()
            .guard()
            .state_name(b)
            .unwrap_or("any")
            .to_string()
    }

    fn base_name(&self, key: &Key) -> String {
        let spec = self.game.spec();
        let total = self.game.predicates().guard().is_total();
        match key {
            Key::Aligned(q, _) if total => spec.state_name(*q).to_string(),
            Key::Aligned(q, b) => format!("{}_{}", spec.state_name(*q), self.guard_name(*b)),
            Key::Relay(q, path, b) => {
                let p = path
                    .display_with(|s| self.sigma().name(s).to_string())
                    .replace('.', "_");
                if total {
                    format!("{}_{p}", spec.state_name(*q))
                } else {
                    format!("{}_{}_{p}", spec.state_name(*q), self.guard_name(*b))
                }
            }
            Key::Frag(w, pos) => format!("frag{w}_{pos}"),
            Key::Won(_) => "won".to_string(),
            Key::Entry(r) => format!("entry{r}"),
        }
    }

    fn state(&mut self, key: Key) -> StateId {
        if let Some(&id) = self.ids.get(&key) {
            return id;
        }
        let base = sanitize(&self.base_name(&key));
        let mut name = base.clone();
        let mut k = 2;
        while self.taken.contains(&name) {
            name = format!("{base}_{k}");
            k += 1;
        }
        self.taken.insert(name.clone());
        let id = StateId(self.keys.len() as u32);
        self.names.push(name);
        self.keys.push(key.clone());
        self.ids.insert(key, id);
        self.queue.push_back(id);
        id
    }

    fn sol(&self) -> &'g Solution<Vertex, Move> {
        self.sol
            .expect("fragments never refer back to the delay game")
    }

    fn vertex(&self, v: &Vertex) -> Result<VertexId> {
        let sol = self.sol();
        sol.id(v)
            .filter(|&id| sol.is_winning(id))
            .ok_or_else(|| Error::StrategyGap(format!("{v:?} is not in the winning region")))
    }

    fn witness_index(&mut self, w: &Rc<PathRecWitness>) -> usize {
        if let Some(i) = self.witnesses.iter().position(|x| Rc::ptr_eq(x, w)) {
            return i;
        }
        self.witnesses.push(w.clone());
        self.witnesses.len() - 1
    }

    fn frag_rhs(&mut self, w: usize, rhs: FragRhs) -> Tree<RhsLabel> {
        match rhs {
            FragRhs::Emit(t) => lift(&t),
            FragRhs::Relay(j, FragTarget::Pos(p)) => call(self.state(Key::Frag(w, p)), j),
            FragRhs::Relay(j, FragTarget::Won(t)) => call(self.state(Key::Won(t)), j),
        }
    }

    /// The right-hand side produced by Out's strategy from the Out vertex `v`.
    fn chain(&mut self, mut v: VertexId) -> Result<Tree<RhsLabel>> {
        let mut prefix: Option<Tree<RhsLabel>> = None;
        let tail = loop {
            let sol = self.sol();
            let (mv, next) = sol
                .strategy(v)
                .cloned()
                .ok_or_else(|| Error::StrategyGap(format!("{:?}", sol.vertex(v))))?;
            let Vertex::Pending { state, path, guard } = sol.vertex(v).clone() else {
                unreachable!("Out owns pending vertices only")
            };
            let preds = self.game.predicates();
            let f = path.labels()[0];
            let rf = self.sigma().arity(f);
            let bs = self.game.children_guard(guard, f);
            match mv {
                Move::Output(g) => {
                    let rg = self.gamma().arity(g);
                    let to = self
                        .game
                        .spec()
                        .delta(state, Pair::both(f, g))
                        .expect("strategy edge exists")
                        .to_vec();
                    let j = path.dirs().first().copied();
                    let mut children = Vec::with_capacity(rg);
                    for l in 0..rg {
                        children.push(if Some(l + 1) == j {
                            call(PLUG, 0)
                        } else if j.is_none() && l < rf {
                            call(self.state(Key::Aligned(to[l], bs[l])), l + 1)
                        } else if l < rf {
                            lift(
                                &preds
                                    .uniform_single(to[l], bs[l])
                                    .expect("checked by the arena"),
                            )
                        } else {
                            lift(&preds.exists_output(to[l]).expect("checked by the arena"))
                        });
                    }
                    let node = out(g, children);
                    prefix = Some(match prefix {
                        None => node,
                        Some(p) => plug(&p, &node),
                    });
                    match j {
                        Some(j) if j <= rg => v = next,
                        _ => break None,
                    }
                }
                Move::Delay(j) => {
                    let key = Key::Relay(state, path.push_direction(j), guard);
                    break Some(call(self.state(key), j));
                }
                Move::Stay => {
                    let rec = self
                        .game
                        .stay(state, &path, guard)?
                        .expect("stay move has a record");
                    let w = rec.witness.expect("stay move has a witness");
                    let wi = self.witness_index(&w);
                    let rhs = w.entry(self.sigma());
                    break Some(self.frag_rhs(wi, rhs));
                }
                Move::Input(_) => unreachable!("Out does not play inputs"),
            }
        };
        Ok(match (prefix, tail) {
            (None, Some(t)) => t,
            (Some(p), Some(t)) => plug(&p, &t),
            (Some(p), None) => p,
            (None, None) => unreachable!("an output move builds a node"),
        })
    }

    fn rules_for(&mut self, id: StateId) -> Result<Vec<Rule>> {
        let key = self.keys[id.index()].clone();
        let mut rules = Vec::new();
        let mut push = |lhs: Sym, rhs: Tree<RhsLabel>| {
            rules.push(Rule {
                state: id,
                lhs: Lhs::Symbol(lhs),
                rhs,
            })
        };
        match key {
            Key::Aligned(q, b) => {
                for (f, _) in self.game.predicates().legal_inputs(b) {
                    let v = self.vertex(&Vertex::Pending {
                        state: q,
                        path: LabeledPath::single(f),
                        guard: b,
                    })?;
                    push(f, self.chain(v)?);
                }
            }
            Key::Relay(q, path, b) => {
                let mut at = b;
                for (r, &f) in path.labels().iter().enumerate() {
                    at = self.game.children_guard(at, f)[path.dirs()[r] - 1];
                }
                for (f, _) in self.game.predicates().legal_inputs(at) {
                    let v = self.vertex(&Vertex::Pending {
                        state: q,
                        path: path.push_symbol(f),
                        guard: b,
                    })?;
                    push(f, self.chain(v)?);
                }
            }
            Key::Frag(w, pos) => {
                let witness = self.witnesses[w].clone();
                for (f, rhs) in witness.rules_at(pos, self.sigma()) {
                    push(f, self.frag_rhs(w, rhs));
                }
            }
            Key::Entry(_) => unreachable!("entry rules are built with the chain"),
            Key::Won(t) => {
                for f in self.sigma().symbols() {
                    let rhs = if self.sigma().arity(f) == 0 {
                        lift(&t)
                    } else {
                        call(id, 1)
                    };
                    push(f, rhs);
                }
            }
        }
        Ok(rules)
    }
}

pub(crate) fn extract(game: &DelayGame<'_>, sol: &Solution<Vertex, Move>) -> Result<Extracted> {
    let mut b = Builder {
        game,
        sol: Some(sol),
        keys: Vec::new(),
        ids: HashMap::new(),
        names: Vec::new(),
        taken: HashSet::new(),
        queue: VecDeque::new(),
        witnesses: Vec::new(),
    };
    let guard = game.predicates().guard();
    let init = b.state(Key::Aligned(game.spec().initial(), guard.initial()));
    let mut rules = Vec::new();
    while let Some(id) = b.queue.pop_front() {
        rules.extend(b.rules_for(id)?);
    }
    let fragment_states = (0..b.keys.len())
        .filter(|&i| matches!(b.keys[i], Key::Frag(..) | Key::Won(_)))
        .map(|i| StateId(i as u32))
        .collect();
    let sig = game.spec().signature();
    let transducer = Transducer::new(sig.input.clone(), sig.output.clone(), b.names, init, rules)?;
    Ok(Extracted {
        transducer,
        fragment_states,
    })
}

/// A stand-alone path-recognizable transducer for a witness: entry states
/// read the forced path, then the fragment takes over.
pub(crate) fn fragment_transducer(
    game: &DelayGame<'_>,
    witness: &Rc<PathRecWitness>,
) -> Result<Transducer> {
    let mut b = Builder {
        game,
        sol: None,
        keys: Vec::new(),
        ids: HashMap::new(),
        names: Vec::new(),
        taken: HashSet::new(),
        queue: VecDeque::new(),
        witnesses: vec![witness.clone()],
    };
    let sigma = b.sigma();
    let forced = &witness.forced;
    let mut rules = Vec::new();
    let init = match witness.root_pos() {
        Some(p) => b.state(Key::Frag(0, p)),
        None => {
            // Entry chain over the forced path; state r reads symbol r.
            let m = forced.len();
            let entry: Vec<StateId> = (0..m)
                .map(|r| {
                    let id = b.state(Key::Entry(r));
                    b.queue.pop_back();
                    id
                })
                .collect();
            for r in 0..m {
                let f = forced.labels()[r];
                let rhs = if r + 1 < m {
                    call(entry[r + 1], forced.dirs()[r])
                } else {
                    match witness.entry(sigma) {
                        FragRhs::Emit(t) if sigma.arity(f) > 0 => {
                            b.frag_rhs(0, FragRhs::Relay(1, FragTarget::Won(t)))
                        }
                        e => b.frag_rhs(0, e),
                    }
                };
                rules.push(Rule {
                    state: entry[r],
                    lhs: Lhs::Symbol(f),
                    rhs,
                });
            }
            entry[0]
        }
    };
    while let Some(id) = b.queue.pop_front() {
        rules.extend(b.rules_for(id)?);
    }
    let sig = game.spec().signature();
    Transducer::new(sig.input.clone(), sig.output.clone(), b.names, init, rules)
}
