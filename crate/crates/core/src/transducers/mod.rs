//! Top-down tree transducers: rules, configurations, execution and delay.

mod config;
mod format;

use std::collections::HashMap;

use crate::automata::StateId;
use crate::error::{Error, Result};
use crate::terms::{RankedAlphabet, Sym, Tree};

pub use config::{run_steps, ConfLabel, Configuration};
pub use format::parse_transducer;

/// Right-hand side label: an output symbol, or a state applied to an input variable `x_j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RhsLabel {
    Out(Sym),
    Call(StateId, usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Lhs {
    Symbol(Sym),
    /// Reads nothing; calls refer to `x1`, the current input node itself.
    Epsilon,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rule {
    pub state: StateId,
    pub lhs: Lhs,
    pub rhs: Tree<RhsLabel>,
}

impl Rule {
    pub fn calls(&self) -> Vec<(StateId, usize)> {
        self.rhs
            .nodes()
            .into_iter()
            .filter_map(|(_, l)| match l {
                RhsLabel::Call(q, j) => Some((*q, *j)),
                RhsLabel::Out(_) => None,
            })
            .collect()
    }
}

#[derive(Clone, Debug)]
pub struct Transducer {
    input: RankedAlphabet,
    output: RankedAlphabet,
    states: Vec<String>,
    initial: StateId,
    rules: Vec<Rule>,
    index: HashMap<(StateId, Sym), Vec<usize>>,
}

impl Transducer {
    pub fn new(
        input: RankedAlphabet,
        output: RankedAlphabet,
        states: Vec<String>,
        initial: StateId,
        rules: Vec<Rule>,
    ) -> Result<Self> {
        let n = states.len();
        if initial.index() >= n {
            return Err(Error::Transducer("initial state out of range".into()));
        }
        let mut index: HashMap<_, Vec<usize>> = HashMap::new();
        for (i, r) in rules.iter().enumerate() {
            if r.state.index() >= n {
                return Err(Error::Transducer("rule for unknown state".into()));
            }
            let vars = match r.lhs {
                Lhs::Symbol(f) => {
                    if f.index() >= input.len() {
                        return Err(Error::Transducer("rule on unknown input symbol".into()));
                    }
                    index.entry((r.state, f)).or_default().push(i);
                    input.arity(f)
                }
                Lhs::Epsilon => 1,
            };
            check_rhs(&r.rhs, &output, n, vars)?;
        }
        Ok(Transducer {
            input,
            output,
            states,
            initial,
            rules,
            index,
        })
    }

    pub fn input(&self) -> &RankedAlphabet {
        &self.input
    }

    pub fn output(&self) -> &RankedAlphabet {
        &self.output
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn state_name(&self, q: StateId) -> &str {
        &self.states[q.index()]
    }

    pub fn state_names(&self) -> &[String] {
        &self.states
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn rule(&self, q: StateId, f: Sym) -> Option<&Rule> {
        self.index.get(&(q, f)).map(|v| &self.rules[v[0]])
    }

    fn epsilon_rule(&self, q: StateId) -> Option<&Rule> {
        self.rules
            .iter()
            .find(|r| r.state == q && r.lhs == Lhs::Epsilon)
    }

    pub fn is_deterministic(&self) -> bool {
        self.rules.iter().all(|r| r.lhs != Lhs::Epsilon)
            && self.index.values().all(|v| v.len() == 1)
    }

    /// The final output of `t`, together with the maximal output delay along the way.
    pub fn execute_with_delay(&self, t: &Tree) -> Result<(Tree, usize)> {
        if !self.is_deterministic() {
            return Err(Error::Nondeterministic);
        }
        crate::terms::check_tree(&self.input, t)?;
        let mut delay = 0;
        let out = self.eval(self.initial, t, 0, 0, &mut delay)?;
        Ok((out, delay))
    }

    pub fn execute(&self, t: &Tree) -> Result<Tree> {
        self.execute_with_delay(t).map(|(o, _)| o)
    }

    /// Max of `|φ(u)| − |u|` over all state nodes of the execution.
    pub fn max_delay(&self, t: &Tree) -> Result<usize> {
        self.execute_with_delay(t).map(|(_, d)| d)
    }

    fn eval(
        &self,
        q: StateId,
        t: &Tree,
        in_depth: usize,
        out_depth: usize,
        delay: &mut usize,
    ) -> Result<Tree> {
        *delay = (*delay).max(in_depth.saturating_sub(out_depth));
        let rule = self.rule(q, t.label).ok_or_else(|| Error::Stuck {
            state: self.state_name(q).to_string(),
            symbol: self.input.name(t.label).to_string(),
        })?;
        self.expand(&rule.rhs, t, in_depth, out_depth, delay)
    }

    fn expand(
        &self,
        rhs: &Tree<RhsLabel>,
        t: &Tree,
        in_depth: usize,
        depth: usize,
        delay: &mut usize,
    ) -> Result<Tree> {
        match rhs.label {
            RhsLabel::Call(q, j) => self.eval(q, &t.children[j - 1], in_depth + 1, depth, delay),
            RhsLabel::Out(g) => {
                let children = rhs
                    .children
                    .iter()
                    .map(|c| self.expand(c, t, in_depth, depth + 1, delay))
                    .collect::<Result<_>>()?;
                Ok(Tree::new(g, children))
            }
        }
    }

    /// Every rule relays to one child unchanged, or emits a closed tree at a leaf.
    pub fn is_path_recognizable_shape(&self) -> bool {
        self.rules.iter().all(|r| match r.lhs {
            Lhs::Epsilon => false,
            Lhs::Symbol(f) if self.input.arity(f) == 0 => r.calls().is_empty(),
            Lhs::Symbol(_) => matches!(r.rhs.label, RhsLabel::Call(..)),
        })
    }
}

pub(crate) fn check_rhs(
    t: &Tree<RhsLabel>,
    output: &RankedAlphabet,
    states: usize,
    vars: usize,
) -> Result<()> {
    match t.label {
        RhsLabel::Call(q, j) => {
            if !t.children.is_empty() || q.index() >= states || j == 0 || j > vars {
                return Err(Error::Transducer(format!(
                    "bad call of state {} on x{j}",
                    q.0
                )));
            }
        }
        RhsLabel::Out(g) => {
            if g.index() >= output.len() || output.arity(g) != t.children.len() {
                return Err(Error::Transducer("output symbol with wrong arity".into()));
            }
            for c in &t.children {
                check_rhs(c, output, states, vars)?;
            }
        }
    }
    Ok(())
}
