use crate::error::{Error, Result};
use crate::terms::{RankedAlphabet, Sym, Tree};

use super::{Automaton, StateId, Transition, TreeAutomaton};

/// A state of the input guard. The total guard has the single state `GuardState(0)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GuardState(pub u32);

impl GuardState {
    pub const ANY: GuardState = GuardState(0);
}

/// Restricts which input symbols In may play: either everything, or what a
/// deterministic domain automaton allows with all children productive.
#[derive(Clone, Debug)]
pub struct InputGuard {
    domain: Option<(TreeAutomaton, Vec<bool>)>,
}

impl InputGuard {
    pub fn total() -> Self {
        InputGuard { domain: None }
    }

    /// Wraps a domain automaton, re-indexing its symbols onto `sigma`.
    pub fn new(sigma: &RankedAlphabet, dom: &TreeAutomaton) -> Result<Self> {
        if !dom.is_deterministic() {
            return Err(Error::Nondeterministic);
        }
        if !sigma.same_symbols(dom.signature()) {
            return Err(Error::AlphabetMismatch(format!(
                "domain alphabet `{}` differs from input alphabet `{sigma}`",
                dom.signature()
            )));
        }
        let transitions = dom
            .transitions()
            .iter()
            .map(|t| {
                Ok(Transition {
                    from: t.from,
                    label: sigma.translate(dom.signature(), t.label)?,
                    to: t.to.clone(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let remapped = Automaton::new(
            sigma.clone(),
            dom.states()
                .map(|q| dom.state_name(q).to_string())
                .collect(),
            dom.initial_states().to_vec(),
            transitions,
        )?;
        let productive = remapped.productive_states();
        let flags = remapped.states().map(|q| productive.contains(&q)).collect();
        Ok(InputGuard {
            domain: Some((remapped, flags)),
        })
    }

    pub fn is_total(&self) -> bool {
        self.domain.is_none()
    }

    pub fn automaton(&self) -> Option<&TreeAutomaton> {
        self.domain.as_ref().map(|(a, _)| a)
    }

    pub fn initial(&self) -> GuardState {
        match &self.domain {
            None => GuardState::ANY,
            Some((a, _)) => GuardState(a.initial().0),
        }
    }

    pub fn is_productive(&self, b: GuardState) -> bool {
        match &self.domain {
            None => true,
            Some((_, p)) => p[b.0 as usize],
        }
    }

    /// Child guard states if `f` may be played at `b` and every child can still be completed.
    pub fn step(&self, b: GuardState, f: Sym, arity: usize) -> Option<Vec<GuardState>> {
        match &self.domain {
            None => Some(vec![GuardState::ANY; arity]),
            Some((a, p)) => {
                let to = a.delta(StateId(b.0), f)?;
                to.iter()
                    .all(|q| p[q.index()])
                    .then(|| to.iter().map(|q| GuardState(q.0)).collect())
            }
        }
    }

    pub fn accepts(&self, t: &Tree) -> bool {
        self.accepts_from(self.initial(), t)
    }

    pub fn accepts_from(&self, b: GuardState, t: &Tree) -> bool {
        match &self.domain {
            None => true,
            Some((a, _)) => a.run_unchecked(StateId(b.0), t).is_some(),
        }
    }

    pub fn state_name(&self, b: GuardState) -> Option<&str> {
        self.domain
            .as_ref()
            .map(|(a, _)| a.state_name(StateId(b.0)))
    }
}
