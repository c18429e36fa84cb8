use crate::error::{Error, Result};

use super::tree::{Address, Tree};

/// Label of a tree with holes: the hole ◦ is `Hole(0)`, context variables are `Hole(1..=n)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Open<L> {
    Label(L),
    Hole(usize),
}

pub type OpenTree<L> = Tree<Open<L>>;

pub const HOLE: usize = 0;

pub fn hole<L>() -> OpenTree<L> {
    Tree::leaf(Open::Hole(HOLE))
}

pub fn close<L: Clone>(t: &Tree<L>) -> OpenTree<L> {
    t.map(&mut |l| Open::Label(l.clone()))
}

/// Holes with their index, left to right.
pub fn holes<L>(t: &OpenTree<L>) -> Vec<(Address, usize)> {
    t.nodes()
        .into_iter()
        .filter_map(|(a, l)| match l {
            Open::Hole(i) => Some((a, *i)),
            Open::Label(_) => None,
        })
        .collect()
}

/// Converts an open tree without holes back to a plain tree.
pub fn to_closed<L: Clone>(t: &OpenTree<L>) -> Option<Tree<L>> {
    t.try_map(&mut |l| match l {
        Open::Label(l) => Ok(l.clone()),
        Open::Hole(_) => Err(()),
    })
    .ok()
}

fn replace_hole<L: Clone>(t: &OpenTree<L>, index: usize, by: &OpenTree<L>) -> OpenTree<L> {
    match t.label {
        Open::Hole(i) if i == index => by.clone(),
        _ => Tree {
            label: t.label.clone(),
            children: t
                .children
                .iter()
                .map(|c| replace_hole(c, index, by))
                .collect(),
        },
    }
}

/// `t · s`: replaces the single hole of `t` by `s`.
pub fn splice<L: Clone>(t: &OpenTree<L>, s: &OpenTree<L>) -> Result<OpenTree<L>> {
    match holes(t).iter().filter(|(_, i)| *i == HOLE).count() {
        0 => Err(Error::NoHole),
        1 => Ok(replace_hole(t, HOLE, s)),
        n => Err(Error::Context(format!("{n} holes where one was expected"))),
    }
}

/// A tree with exactly one hole, located at a leaf.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SpecialTree<L> {
    tree: OpenTree<L>,
}

impl<L: Clone> SpecialTree<L> {
    pub fn new(tree: OpenTree<L>) -> Result<Self> {
        let hs = holes(&tree);
        if hs.len() != 1 || hs[0].1 != HOLE {
            return Err(Error::Context(
                "a special tree needs exactly one hole".into(),
            ));
        }
        Ok(SpecialTree { tree })
    }

    pub fn identity() -> Self {
        SpecialTree { tree: hole() }
    }

    /// `t[◦/u]`: the tree with the subtree at `u` cut away.
    pub fn cut(t: &Tree<L>, u: &[usize]) -> Result<Self> {
        let mut open = close(t);
        let node = open
            .subtree_mut(u)
            .ok_or_else(|| Error::MissingNode(u.to_vec()))?;
        *node = hole();
        Ok(SpecialTree { tree: open })
    }

    pub fn tree(&self) -> &OpenTree<L> {
        &self.tree
    }

    pub fn hole_address(&self) -> Address {
        holes(&self.tree).remove(0).0
    }

    pub fn splice(&self, s: &SpecialTree<L>) -> SpecialTree<L> {
        SpecialTree {
            tree: replace_hole(&self.tree, HOLE, &s.tree),
        }
    }

    pub fn plug(&self, t: &Tree<L>) -> Tree<L> {
        to_closed(&replace_hole(&self.tree, HOLE, &close(t))).expect("single hole filled")
    }
}

/// A tree whose variables `x1..xn` each occur once, in left-to-right order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Context<L> {
    tree: OpenTree<L>,
    arity: usize,
}

impl<L: Clone> Context<L> {
    pub fn new(tree: OpenTree<L>) -> Result<Self> {
        let hs = holes(&tree);
        for (k, (_, i)) in hs.iter().enumerate() {
            if *i != k + 1 {
                return Err(Error::Context(format!(
                    "expected x{} at position {}, found hole {i}",
                    k + 1,
                    k + 1
                )));
            }
        }
        Ok(Context {
            arity: hs.len(),
            tree,
        })
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn tree(&self) -> &OpenTree<L> {
        &self.tree
    }

    /// `C[t1, …, tn]`.
    pub fn substitute(&self, parts: &[Tree<L>]) -> Result<Tree<L>> {
        if parts.len() != self.arity {
            return Err(Error::VariableCount {
                expected: self.arity,
                got: parts.len(),
            });
        }
        fn go<L: Clone>(t: &OpenTree<L>, parts: &[Tree<L>]) -> Tree<L> {
            match &t.label {
                Open::Hole(i) => parts[i - 1].clone(),
                Open::Label(l) => {
                    Tree::new(l.clone(), t.children.iter().map(|c| go(c, parts)).collect())
                }
            }
        }
        Ok(go(&self.tree, parts))
    }
}
