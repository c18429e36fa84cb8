use crate::error::{Error, Result};

use super::alphabet::{Pair, RankedAlphabet, Side, Signature, Sym};

/// Node address: a word over 1-based directions; the empty word is the root.
pub type Address = Vec<usize>;

/// A finite ordered tree. Child counts are checked against an alphabet by [`check_tree`].
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Tree<L = Sym> {
    pub label: L,
    pub children: Vec<Tree<L>>,
}

impl<L> Tree<L> {
    pub fn leaf(label: L) -> Self {
        Tree {
            label,
            children: Vec::new(),
        }
    }

    pub fn new(label: L, children: Vec<Tree<L>>) -> Self {
        Tree { label, children }
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    /// Length of the longest address; a single leaf has height 0.
    pub fn height(&self) -> usize {
        self.children
            .iter()
            .map(|c| c.height() + 1)
            .max()
            .unwrap_or(0)
    }

    pub fn size(&self) -> usize {
        1 + self.children.iter().map(Tree::size).sum::<usize>()
    }

    pub fn subtree(&self, addr: &[usize]) -> Option<&Tree<L>> {
        let mut t = self;
        for &d in addr {
            t = t.children.get(d.checked_sub(1)?)?;
        }
        Some(t)
    }

    pub fn subtree_mut(&mut self, addr: &[usize]) -> Option<&mut Tree<L>> {
        let mut t = self;
        for &d in addr {
            t = t.children.get_mut(d.checked_sub(1)?)?;
        }
        Some(t)
    }

    pub fn label_at(&self, addr: &[usize]) -> Option<&L> {
        self.subtree(addr).map(|t| &t.label)
    }

    /// All addresses in preorder.
    pub fn domain(&self) -> Vec<Address> {
        self.nodes().into_iter().map(|(a, _)| a).collect()
    }

    /// `(address, label)` for every node in preorder.
    pub fn nodes(&self) -> Vec<(Address, &L)> {
        let mut out = Vec::new();
        let mut stack = vec![(Vec::new(), self)];
        while let Some((addr, t)) = stack.pop() {
            for (i, c) in t.children.iter().enumerate().rev() {
                let mut a = addr.clone();
                a.push(i + 1);
                stack.push((a, c));
            }
            out.push((addr, &t.label));
        }
        out
    }

    pub fn map<M>(&self, f: &mut impl FnMut(&L) -> M) -> Tree<M> {
        Tree {
            label: f(&self.label),
            children: self.children.iter().map(|c| c.map(f)).collect(),
        }
    }

    pub fn try_map<M, E>(&self, f: &mut impl FnMut(&L) -> Result<M, E>) -> Result<Tree<M>, E> {
        let label = f(&self.label)?;
        let children = self
            .children
            .iter()
            .map(|c| c.try_map(f))
            .collect::<Result<_, _>>()?;
        Ok(Tree { label, children })
    }
}

/// Checks that every node's child count equals its label's arity.
pub fn check_tree<S: Signature>(sig: &S, t: &Tree<S::Label>) -> Result<()> {
    if !sig.contains(t.label) {
        return Err(Error::UnknownSymbol(format!("{:?}", t.label)));
    }
    let arity = sig.label_arity(t.label);
    if arity != t.children.len() {
        return Err(Error::ArityMismatch {
            name: sig.label_name(t.label),
            arity: t.children.len(),
        });
    }
    t.children.iter().try_for_each(|c| check_tree(sig, c))
}

/// Re-expresses a tree over `from` as the same-named symbols of `to`.
pub fn translate_tree(t: &Tree, from: &RankedAlphabet, to: &RankedAlphabet) -> Result<Tree> {
    t.try_map(&mut |&s| to.translate(from, s))
}

/// `t1 ⊗ t2`: union of both domains, missing labels padded with ⊥.
pub fn convolution(t1: &Tree, t2: &Tree) -> Tree<Pair> {
    conv(Some(t1), Some(t2))
}

fn conv(t1: Option<&Tree>, t2: Option<&Tree>) -> Tree<Pair> {
    let label = Pair::new(t1.map(|t| t.label), t2.map(|t| t.label));
    let n1 = t1.map_or(0, |t| t.children.len());
    let n2 = t2.map_or(0, |t| t.children.len());
    let children = (0..n1.max(n2))
        .map(|i| {
            conv(
                t1.and_then(|t| t.children.get(i)),
                t2.and_then(|t| t.children.get(i)),
            )
        })
        .collect();
    Tree { label, children }
}

/// `t ⊗ ⊥` for [`Side::Input`], `⊥ ⊗ t` for [`Side::Output`].
pub fn convolve_bot(t: &Tree, side: Side) -> Tree<Pair> {
    match side {
        Side::Input => conv(Some(t), None),
        Side::Output => conv(None, Some(t)),
    }
}

/// Erases the other side of a convolution; `None` if the side is absent at the root.
pub fn project(t: &Tree<Pair>, side: Side) -> Option<Tree> {
    let label = match side {
        Side::Input => t.label.input,
        Side::Output => t.label.output,
    }?;
    let children = t.children.iter().map_while(|c| project(c, side)).collect();
    Some(Tree { label, children })
}

/// Maximum address length among nodes `v` with `v ⊑ u` or `u ⊑ v`.
pub fn max_path_len_along<L>(t: &Tree<L>, u: &[usize]) -> usize {
    let mut node = t;
    let mut depth = 0;
    for &d in u {
        match d.checked_sub(1).and_then(|i| node.children.get(i)) {
            Some(c) => {
                node = c;
                depth += 1;
            }
            None => return depth,
        }
    }
    depth + node.height()
}
