use std::collections::BTreeMap;

use crate::automata::StateId;
use crate::error::{Error, Result};
use crate::terms::{Address, Sym, Tree};

use super::{Lhs, RhsLabel, Transducer};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ConfLabel {
    Out(Sym),
    State(StateId),
}

/// A partial output whose state leaves point, through `phi`, at input nodes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Configuration {
    pub input: Tree,
    pub output: Tree<ConfLabel>,
    pub phi: BTreeMap<Address, Address>,
}

impl Configuration {
    pub fn initial(t: &Transducer, input: Tree) -> Self {
        let mut phi = BTreeMap::new();
        phi.insert(Vec::new(), Vec::new());
        Configuration {
            input,
            output: Tree::leaf(ConfLabel::State(t.initial())),
            phi,
        }
    }

    /// State-labeled output nodes, left to right.
    pub fn pending(&self) -> Vec<Address> {
        self.phi.keys().cloned().collect()
    }

    pub fn is_final(&self) -> bool {
        self.phi.is_empty()
    }

    pub fn finished(&self) -> Option<Tree> {
        self.output
            .try_map(&mut |l| match l {
                ConfLabel::Out(g) => Ok(*g),
                ConfLabel::State(_) => Err(()),
            })
            .ok()
    }

    /// Max of `|φ(u)| − |u|`, zero when nothing trails.
    pub fn delay(&self) -> usize {
        self.phi
            .iter()
            .map(|(u, v)| v.len().saturating_sub(u.len()))
            .max()
            .unwrap_or(0)
    }

    /// Applies the rule matching the state at `at` and the input symbol at `φ(at)`.
    pub fn step(&self, t: &Transducer, at: &[usize]) -> Result<Configuration> {
        let q = match self.output.label_at(at) {
            Some(ConfLabel::State(q)) => *q,
            _ => return Err(Error::NotPending(at.to_vec())),
        };
        let v = self
            .phi
            .get(at)
            .ok_or_else(|| Error::NotPending(at.to_vec()))?
            .clone();
        let f = *self
            .input
            .label_at(&v)
            .ok_or_else(|| Error::MissingNode(v.clone()))?;
        let rule = t
            .rule(q, f)
            .or_else(|| t.epsilon_rule(q))
            .ok_or_else(|| Error::Stuck {
                state: t.state_name(q).to_string(),
                symbol: t.input().name(f).to_string(),
            })?;
        let reads = matches!(rule.lhs, Lhs::Symbol(_));
        let mut phi = self.phi.clone();
        phi.remove(at);
        let mut new_nodes = Vec::new();
        let replacement = rule.rhs.map(&mut |l| match *l {
            RhsLabel::Out(g) => ConfLabel::Out(g),
            RhsLabel::Call(p, _) => ConfLabel::State(p),
        });
        for (addr, l) in rule.rhs.nodes() {
            if let RhsLabel::Call(_, j) = l {
                let mut u = at.to_vec();
                u.extend(addr);
                let mut w = v.clone();
                if reads {
                    w.push(*j);
                }
                new_nodes.push((u, w));
            }
        }
        phi.extend(new_nodes);
        let mut output = self.output.clone();
        *output.subtree_mut(at).expect("pending node exists") = replacement;
        Ok(Configuration {
            input: self.input.clone(),
            output,
            phi,
        })
    }
}

/// Runs `t` on `input` to completion, picking the node to rewrite with `choose`.
/// Returns every configuration traversed, starting with the initial one.
pub fn run_steps(
    t: &Transducer,
    input: &Tree,
    mut choose: impl FnMut(&Configuration) -> Address,
) -> Result<Vec<Configuration>> {
    let mut trace = vec![Configuration::initial(t, input.clone())];
    while !trace.last().unwrap().is_final() {
        let c = trace.last().unwrap();
        let at = choose(c);
        let next = c.step(t, &at)?;
        trace.push(next);
    }
    Ok(trace)
}
