//! Uniformizer synthesis through delay games.
//!
//! The bounded game lets Out read at most `k` symbols of one path ahead of its
//! output. The unbounded game lets Out delay until a pending path contains an
//! idempotent segment; there Out may only answer, or hand over to a
//! path-recognizable fragment when one exists.

pub mod arena;
mod extract;
pub mod pathrec;

use std::rc::Rc;

use crate::automata::{InputGuard, Predicates, SpecAutomaton, StateId, TreeAutomaton};
use crate::error::{Error, Result};
use crate::game::{solve, Solution, VertexId};
use crate::paths::LabeledPath;
use crate::transducers::Transducer;

pub use arena::{DelayBound, DelayGame, Move, StayRecord, Vertex};
pub use pathrec::{decide_with, FragRhs, FragTarget, PathRecWitness, PrMove, PrVertex, Track};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SynthOptions {
    /// Vertex budget for each explored game.
    pub max_vertices: usize,
    /// Extra output depth a path-recognizable track may reach beyond the forced path.
    pub spine_slack: usize,
}

impl Default for SynthOptions {
    fn default() -> Self {
        SynthOptions {
            max_vertices: 1_000_000,
            spine_slack: 1,
        }
    }
}

/// A losing play for Out, as vertex names from the initial vertex to a dead end.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    pub play: Vec<String>,
}

#[derive(Clone, Debug)]
pub enum Outcome {
    Realizable(Transducer),
    Unrealizable(Counterexample),
}

impl Outcome {
    pub fn is_realizable(&self) -> bool {
        matches!(self, Outcome::Realizable(_))
    }

    pub fn transducer(&self) -> Option<&Transducer> {
        match self {
            Outcome::Realizable(t) => Some(t),
            Outcome::Unrealizable(_) => None,
        }
    }
}

/// A saturated vertex met by the unbounded game, rendered for reports.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StayReport {
    pub state: String,
    pub path: String,
    pub x: String,
    pub y: String,
    pub z: String,
    pub accepted: bool,
}

#[derive(Clone, Debug)]
pub struct Synthesis {
    pub outcome: Outcome,
    pub vertices: usize,
    pub edges: usize,
    /// States of the transducer that run path-recognizable fragments.
    pub fragment_states: Vec<String>,
    pub stays: Vec<StayReport>,
}

/// A delay game explored and solved.
pub struct SolvedGame<'a> {
    pub game: DelayGame<'a>,
    pub solution: Solution<Vertex, Move>,
}

fn predicates<'a>(spec: &'a SpecAutomaton, dom: Option<&TreeAutomaton>) -> Result<Predicates<'a>> {
    if !spec.is_deterministic() {
        return Err(Error::Nondeterministic);
    }
    let guard = match dom {
        Some(d) => InputGuard::new(&spec.signature().input, d)?,
        None => InputGuard::total(),
    };
    Ok(Predicates::new(spec, guard))
}

pub fn build_game<'a>(
    spec: &'a SpecAutomaton,
    bound: DelayBound,
    dom: Option<&TreeAutomaton>,
    opts: SynthOptions,
) -> Result<SolvedGame<'a>> {
    let game = DelayGame::new(predicates(spec, dom)?, bound, opts);
    let solution = solve(&game, opts.max_vertices)?;
    Ok(SolvedGame { game, solution })
}

pub fn build_arena_bounded<'a>(
    spec: &'a SpecAutomaton,
    k: usize,
    dom: Option<&TreeAutomaton>,
    opts: SynthOptions,
) -> Result<SolvedGame<'a>> {
    build_game(spec, DelayBound::Bounded(k), dom, opts)
}

pub fn build_arena_unbounded<'a>(
    spec: &'a SpecAutomaton,
    dom: Option<&TreeAutomaton>,
    opts: SynthOptions,
) -> Result<SolvedGame<'a>> {
    build_game(spec, DelayBound::Unbounded, dom, opts)
}

impl SolvedGame<'_> {
    pub fn vertex_name(&self, v: &Vertex) -> String {
        let spec = self.game.spec();
        let guard = self.game.predicates().guard();
        let sigma = &spec.signature().input;
        let with_guard = |q: StateId, b| match guard.state_name(b) {
            Some(d) if !guard.is_total() => format!("{}@{d}", spec.state_name(q)),
            _ => spec.state_name(q).to_string(),
        };
        match v {
            Vertex::Branch(set) => {
                let names: Vec<String> = set.iter().map(|&(q, b)| with_guard(q, b)).collect();
                format!("{{{}}}", names.join(","))
            }
            Vertex::Pending { state, path, guard } => {
                format!("({}, {})", with_guard(*state, *guard), path.display(sigma))
            }
        }
    }

    pub fn move_name(&self, m: &Move) -> String {
        let sig = self.game.spec().signature();
        match m {
            Move::Input(f) => sig.input.name(*f).to_string(),
            Move::Output(g) => sig.output.name(*g).to_string(),
            Move::Delay(j) => j.to_string(),
            Move::Stay => "stay".to_string(),
        }
    }

    pub fn to_dot(&self) -> String {
        self.solution
            .to_dot(|v| self.vertex_name(v), |m| self.move_name(m))
    }

    pub fn counterexample(&self) -> Option<Counterexample> {
        let play = self
            .solution
            .losing_play(Solution::<Vertex, Move>::INITIAL)?;
        Some(Counterexample {
            play: play
                .into_iter()
                .map(|id: VertexId| self.vertex_name(self.solution.vertex(id)))
                .collect(),
        })
    }

    pub fn stay_reports(&self) -> Vec<StayReport> {
        let spec = self.game.spec();
        let sigma = &spec.signature().input;
        self.game
            .stay_records()
            .into_iter()
            .map(|r| {
                let f = r.factorization;
                StayReport {
                    state: spec.state_name(r.state).to_string(),
                    path: r.path.display(sigma),
                    x: f.x(&r.path).display(sigma),
                    y: f.segment(&r.path).display(sigma),
                    z: f.z(&r.path).display(sigma),
                    accepted: r.witness.is_some(),
                }
            })
            .collect()
    }

    /// Reads a transducer off Out's strategy, or a losing play.
    pub fn synthesis(&self) -> Result<Synthesis> {
        let outcome;
        let mut fragment_states = Vec::new();
        if self.solution.initial_winning() {
            let ex = extract::extract(&self.game, &self.solution)?;
            fragment_states = ex
                .fragment_states
                .iter()
                .map(|&q| ex.transducer.state_name(q).to_string())
                .collect();
            outcome = Outcome::Realizable(ex.transducer);
        } else {
            outcome =
                Outcome::Unrealizable(self.counterexample().expect("initial vertex is losing"));
        }
        Ok(Synthesis {
            outcome,
            vertices: self.solution.num_vertices(),
            edges: self.solution.num_edges(),
            fragment_states,
            stays: self.stay_reports(),
        })
    }
}

/// Synthesizes a uniformizer with lookahead at most `k` along one path.
pub fn synthesize_bounded(
    spec: &SpecAutomaton,
    k: usize,
    dom: Option<&TreeAutomaton>,
    opts: SynthOptions,
) -> Result<Synthesis> {
    build_arena_bounded(spec, k, dom, opts)?.synthesis()
}

/// Synthesizes a uniformizer with unbounded lookahead, handing saturated
/// pending paths to path-recognizable fragments.
pub fn synthesize(
    spec: &SpecAutomaton,
    dom: Option<&TreeAutomaton>,
    opts: SynthOptions,
) -> Result<Synthesis> {
    build_arena_unbounded(spec, dom, opts)?.synthesis()
}

/// Decides whether state `q`, with `forced` already read, is finished by a
/// path-recognizable transducer, and builds one.
pub fn decide_path_recognizable(
    spec: &SpecAutomaton,
    q: StateId,
    forced: &LabeledPath,
    dom: Option<&TreeAutomaton>,
    opts: SynthOptions,
) -> Result<Option<Transducer>> {
    if forced.ends_in_direction() {
        return Err(Error::InvalidPath(
            "the read-ahead path must end in a symbol".into(),
        ));
    }
    forced.check(|s| spec.signature().input.arity(s))?;
    let game = DelayGame::new(predicates(spec, dom)?, DelayBound::Unbounded, opts);
    let preds = game.predicates();
    let mut b = preds.guard().initial();
    for (r, &f) in forced.labels().iter().enumerate() {
        let Some(bs) = preds.guard().step(b, f, spec.signature().input.arity(f)) else {
            return Err(Error::InvalidPath(
                "the read-ahead path leaves the input domain".into(),
            ));
        };
        if let Some(&d) = forced.dirs().get(r) {
            b = bs[d - 1];
        }
    }
    match decide_with(preds, q, forced, preds.guard().initial(), &opts)? {
        None => Ok(None),
        Some(w) => extract::fragment_transducer(&game, &Rc::new(w)).map(Some),
    }
}
