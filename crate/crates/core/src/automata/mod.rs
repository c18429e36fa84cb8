//! Top-down tree automata over plain or convolution alphabets.

pub(crate) mod format;
mod guard;
mod predicates;

use std::collections::{BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::terms::{ConvolutionAlphabet, Pair, RankedAlphabet, Signature, Tree};

pub use format::{parse_automaton, parse_spec, parse_tree_automaton, LoadedAutomaton};
pub use guard::{GuardState, InputGuard};
pub use predicates::{
    pred_exists_output, pred_uniform_output, pred_univ_input, uniform_output, Predicates,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateId(pub u32);

impl StateId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Transition<L> {
    pub from: StateId,
    pub label: L,
    pub to: Vec<StateId>,
}

/// A run assigns a state to every node; it has the shape of the tree it runs on.
pub type Run = Tree<StateId>;

#[derive(Clone, Debug)]
pub struct Automaton<S: Signature> {
    signature: S,
    states: Vec<String>,
    initial: Vec<StateId>,
    transitions: Vec<Transition<S::Label>>,
    index: HashMap<(StateId, S::Label), Vec<usize>>,
}

pub type TreeAutomaton = Automaton<RankedAlphabet>;
pub type SpecAutomaton = Automaton<ConvolutionAlphabet>;

impl<S: Signature> Automaton<S> {
    pub fn new(
        signature: S,
        states: Vec<String>,
        initial: Vec<StateId>,
        transitions: Vec<Transition<S::Label>>,
    ) -> Result<Self> {
        if states.is_empty() {
            return Err(Error::Automaton("no states".into()));
        }
        if initial.is_empty() {
            return Err(Error::Automaton("no initial state".into()));
        }
        let n = states.len();
        let valid = |q: StateId| q.index() < n;
        if let Some(q) = initial.iter().find(|q| !valid(**q)) {
            return Err(Error::Automaton(format!(
                "initial state {} out of range",
                q.0
            )));
        }
        let mut index: HashMap<_, Vec<usize>> = HashMap::new();
        for (i, t) in transitions.iter().enumerate() {
            if !signature.contains(t.label) {
                return Err(Error::Automaton(format!(
                    "label {:?} not in alphabet",
                    t.label
                )));
            }
            let arity = signature.label_arity(t.label);
            if t.to.len() != arity {
                return Err(Error::Automaton(format!(
                    "transition on {} has {} targets, arity is {arity}",
                    signature.label_name(t.label),
                    t.to.len()
                )));
            }
            if !valid(t.from) || !t.to.iter().all(|q| valid(*q)) {
                return Err(Error::Automaton(
                    "transition refers to an unknown state".into(),
                ));
            }
            index.entry((t.from, t.label)).or_default().push(i);
        }
        Ok(Automaton {
            signature,
            states,
            initial,
            transitions,
            index,
        })
    }

    pub fn signature(&self) -> &S {
        &self.signature
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> impl Iterator<Item = StateId> {
        (0..self.states.len() as u32).map(StateId)
    }

    pub fn state_name(&self, q: StateId) -> &str {
        &self.states[q.index()]
    }

    pub fn state_id(&self, name: &str) -> Option<StateId> {
        self.states
            .iter()
            .position(|s| s == name)
            .map(|i| StateId(i as u32))
    }

    pub fn initial_states(&self) -> &[StateId] {
        &self.initial
    }

    /// The first initial state; the only one when deterministic.
    pub fn initial(&self) -> StateId {
        self.initial[0]
    }

    pub fn transitions(&self) -> &[Transition<S::Label>] {
        &self.transitions
    }

    pub fn targets(&self, q: StateId, label: S::Label) -> impl Iterator<Item = &[StateId]> {
        self.index
            .get(&(q, label))
            .into_iter()
            .flatten()
            .map(|&i| self.transitions[i].to.as_slice())
    }

    /// The (first) transition target tuple for `(q, label)`.
    pub fn delta(&self, q: StateId, label: S::Label) -> Option<&[StateId]> {
        self.index
            .get(&(q, label))
            .map(|v| self.transitions[v[0]].to.as_slice())
    }

    pub fn is_deterministic(&self) -> bool {
        self.initial.len() == 1 && self.index.values().all(|v| v.len() == 1)
    }

    /// `A_q`: the same automaton with `q` as single initial state.
    pub fn with_initial(&self, q: StateId) -> Self {
        Automaton {
            initial: vec![q],
            ..self.clone()
        }
    }

    fn check_labels(&self, t: &Tree<S::Label>) -> Result<()> {
        crate::terms::check_tree(&self.signature, t).map_err(|e| {
            Error::AlphabetMismatch(format!("tree does not fit the automaton alphabet: {e}"))
        })
    }

    /// Some accepting run, if one exists.
    pub fn run(&self, t: &Tree<S::Label>) -> Result<Option<Run>> {
        self.check_labels(t)?;
        Ok(self.initial.iter().find_map(|&q| self.run_unchecked(q, t)))
    }

    pub fn run_from(&self, q: StateId, t: &Tree<S::Label>) -> Result<Option<Run>> {
        self.check_labels(t)?;
        Ok(self.run_unchecked(q, t))
    }

    pub(crate) fn run_unchecked(&self, q: StateId, t: &Tree<S::Label>) -> Option<Run> {
        'tuples: for to in self.targets(q, t.label) {
            let mut children = Vec::with_capacity(to.len());
            for (&qc, c) in to.iter().zip(&t.children) {
                match self.run_unchecked(qc, c) {
                    Some(r) => children.push(r),
                    None => continue 'tuples,
                }
            }
            return Some(Tree::new(q, children));
        }
        None
    }

    pub fn accepts(&self, t: &Tree<S::Label>) -> Result<bool> {
        Ok(self.run(t)?.is_some())
    }

    pub fn accepts_from(&self, q: StateId, t: &Tree<S::Label>) -> Result<bool> {
        Ok(self.run_from(q, t)?.is_some())
    }

    /// States from which some tree is accepted (least fixpoint).
    pub fn productive_states(&self) -> BTreeSet<StateId> {
        let mut productive = vec![false; self.states.len()];
        loop {
            let mut changed = false;
            for t in &self.transitions {
                if !productive[t.from.index()] && t.to.iter().all(|q| productive[q.index()]) {
                    productive[t.from.index()] = true;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        self.states().filter(|q| productive[q.index()]).collect()
    }
}

impl SpecAutomaton {
    /// Whether `t1 ⊗ t2` is accepted from `q`, without building the convolution.
    pub(crate) fn accepts_pair_unchecked(
        &self,
        q: StateId,
        t1: Option<&Tree>,
        t2: Option<&Tree>,
    ) -> bool {
        let label = Pair::new(t1.map(|t| t.label), t2.map(|t| t.label));
        self.targets(q, label).any(|to| {
            to.iter()
                .enumerate()
                .all(|(i, &qc)| self.accepts_pair_unchecked(qc, child(t1, i), child(t2, i)))
        })
    }
}

fn child(t: Option<&Tree>, i: usize) -> Option<&Tree> {
    t.and_then(|t| t.children.get(i))
}
