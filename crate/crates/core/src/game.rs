//! Safety games between In and Out on lazily generated arenas.
//!
//! Out loses a play exactly when it reaches an Out vertex without moves.

use std::collections::{HashMap, VecDeque};
use std::fmt::{self, Write};
use std::hash::Hash;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Player {
    In,
    Out,
}

/// An arena given by its initial vertex and a successor generator.
pub trait Arena {
    type Vertex: Clone + Eq + Hash + fmt::Debug;
    type Label: Clone + fmt::Debug;

    fn initial(&self) -> Self::Vertex;
    fn owner(&self, v: &Self::Vertex) -> Player;
    /// Moves in a fixed order; the strategy prefers earlier moves.
    fn moves(&self, v: &Self::Vertex) -> Result<Vec<(Self::Label, Self::Vertex)>>;
}

pub type VertexId = usize;

/// The explored arena with Out's winning region, a positional strategy, and
/// attractor ranks for the vertices In wins.
#[derive(Clone, Debug)]
pub struct Solution<V, L> {
    vertices: Vec<V>,
    index: HashMap<V, VertexId>,
    owners: Vec<Player>,
    edges: Vec<Vec<(L, VertexId)>>,
    winning: Vec<bool>,
    rank: Vec<Option<usize>>,
    strategy: Vec<Option<usize>>,
}

/// Explores every vertex reachable from the initial one, then computes In's attractor to the bad set.
pub fn solve<A: Arena>(arena: &A, max_vertices: usize) -> Result<Solution<A::Vertex, A::Label>> {
    let mut vertices = Vec::new();
    let mut index = HashMap::new();
    let mut owners = Vec::new();
    let mut edges: Vec<Vec<(A::Label, VertexId)>> = Vec::new();
    let init = arena.initial();
    index.insert(init.clone(), 0);
    vertices.push(init);
    let mut next = 0;
    while next < vertices.len() {
        let v = vertices[next].clone();
        owners.push(arena.owner(&v));
        let mut out = Vec::new();
        for (label, w) in arena.moves(&v)? {
            let id = match index.get(&w) {
                Some(&id) => id,
                None => {
                    if vertices.len() >= max_vertices {
                        return Err(Error::BudgetExceeded(max_vertices));
                    }
                    let id = vertices.len();
                    index.insert(w.clone(), id);
                    vertices.push(w);
                    id
                }
            };
            out.push((label, id));
        }
        edges.push(out);
        next += 1;
    }

    let n = vertices.len();
    let mut preds: Vec<Vec<VertexId>> = vec![Vec::new(); n];
    for (v, out) in edges.iter().enumerate() {
        for (_, w) in out {
            preds[*w].push(v);
        }
    }
    // Out vertices need every successor losing; count the ones not yet known to lose.
    let mut remaining: Vec<usize> = edges.iter().map(Vec::len).collect();
    let mut rank: Vec<Option<usize>> = vec![None; n];
    let mut queue = VecDeque::new();
    for v in 0..n {
        if owners[v] == Player::Out && edges[v].is_empty() {
            rank[v] = Some(0);
            queue.push_back(v);
        }
    }
    while let Some(w) = queue.pop_front() {
        let r = rank[w].unwrap();
        for &v in &preds[w] {
            if rank[v].is_some() {
                continue;
            }
            match owners[v] {
                Player::In => {
                    rank[v] = Some(r + 1);
                    queue.push_back(v);
                }
                Player::Out => {
                    remaining[v] -= 1;
                    if remaining[v] == 0 {
                        rank[v] = Some(r + 1);
                        queue.push_back(v);
                    }
                }
            }
        }
    }
    let winning: Vec<bool> = rank.iter().map(Option::is_none).collect();
    let strategy = (0..n)
        .map(|v| {
            (owners[v] == Player::Out && winning[v])
                .then(|| edges[v].iter().position(|(_, w)| winning[*w]))
                .flatten()
        })
        .collect();
    Ok(Solution {
        vertices,
        index,
        owners,
        edges,
        winning,
        rank,
        strategy,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Play {
    pub vertices: Vec<VertexId>,
    pub hit_bad: bool,
}

impl<V: Clone + Eq + Hash + fmt::Debug, L: Clone + fmt::Debug> Solution<V, L> {
    pub const INITIAL: VertexId = 0;

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.iter().map(Vec::len).sum()
    }

    pub fn vertex(&self, id: VertexId) -> &V {
        &self.vertices[id]
    }

    pub fn vertices(&self) -> &[V] {
        &self.vertices
    }

    pub fn id(&self, v: &V) -> Option<VertexId> {
        self.index.get(v).copied()
    }

    pub fn owner(&self, id: VertexId) -> Player {
        self.owners[id]
    }

    pub fn moves(&self, id: VertexId) -> &[(L, VertexId)] {
        &self.edges[id]
    }

    pub fn is_bad(&self, id: VertexId) -> bool {
        self.owners[id] == Player::Out && self.edges[id].is_empty()
    }

    pub fn is_winning(&self, id: VertexId) -> bool {
        self.winning[id]
    }

    pub fn initial_winning(&self) -> bool {
        self.winning[Self::INITIAL]
    }

    /// Attractor layer of a vertex In wins from; bad vertices have rank 0.
    pub fn rank(&self, id: VertexId) -> Option<usize> {
        self.rank[id]
    }

    /// Out's chosen move at a winning Out vertex.
    pub fn strategy(&self, id: VertexId) -> Option<&(L, VertexId)> {
        self.strategy[id].map(|i| &self.edges[id][i])
    }

    /// A shortest play from a losing vertex into the bad set under In's attractor strategy.
    pub fn losing_play(&self, from: VertexId) -> Option<Vec<VertexId>> {
        self.rank[from]?;
        let mut play = vec![from];
        let mut v = from;
        while self.rank[v] != Some(0) {
            let r = self.rank[v].unwrap();
            v = self.edges[v]
                .iter()
                .map(|(_, w)| *w)
                .find(|w| self.rank[*w].is_some_and(|rw| rw < r))
                .expect("attractor rank decreases");
            play.push(v);
        }
        Some(play)
    }

    /// Plays Out's strategy against `adversary`, which picks an index into
    /// In's moves or `None` to stop.
    pub fn simulate(
        &self,
        start: VertexId,
        mut adversary: impl FnMut(VertexId, &[(L, VertexId)]) -> Option<usize>,
        max_steps: usize,
    ) -> Result<Play> {
        let mut play = vec![start];
        let mut v = start;
        for _ in 0..max_steps {
            if self.is_bad(v) {
                return Ok(Play {
                    vertices: play,
                    hit_bad: true,
                });
            }
            let next = match self.owners[v] {
                Player::Out => match self.strategy(v) {
                    Some((_, w)) => *w,
                    None => return Err(Error::StrategyGap(format!("{:?}", self.vertices[v]))),
                },
                Player::In => match adversary(v, &self.edges[v]) {
                    Some(i) => self.edges[v][i].1,
                    None => break,
                },
            };
            play.push(next);
            v = next;
        }
        let hit_bad = self.is_bad(v);
        Ok(Play {
            vertices: play,
            hit_bad,
        })
    }

    /// Graphviz rendering: In vertices are boxes, Out vertices rounded,
    /// bad vertices red, strategy edges bold.
    pub fn to_dot(
        &self,
        vertex_name: impl Fn(&V) -> String,
        label_name: impl Fn(&L) -> String,
    ) -> String {
        let esc = |s: String| s.replace('\\', "\\\\").replace('"', "\\\"");
        let mut out = String::from("digraph arena {\n  rankdir=TB;\n");
        for (id, v) in self.vertices.iter().enumerate() {
            let mut attrs = match self.owners[id] {
                Player::In => "shape=box".to_string(),
                Player::Out => "shape=box, style=rounded".to_string(),
            };
            if self.is_bad(id) {
                attrs.push_str(", color=red, fontcolor=red");
            }
            if id == Self::INITIAL {
                attrs.push_str(", penwidth=2");
            }
            let _ = writeln!(out, "  v{id} [label=\"{}\", {attrs}];", esc(vertex_name(v)));
        }
        for (id, es) in self.edges.iter().enumerate() {
            for (k, (l, w)) in es.iter().enumerate() {
                let bold = if self.strategy[id] == Some(k) {
                    ", style=bold"
                } else {
                    ""
                };
                let _ = writeln!(
                    out,
                    "  v{id} -> v{w} [label=\"{}\"{bold}];",
                    esc(label_name(l))
                );
            }
        }
        out.push_str("}\n");
        out
    }
}

/// An arena given by explicit adjacency lists over `0..n`.
#[derive(Clone, Debug)]
pub struct ExplicitArena {
    pub owners: Vec<Player>,
    pub edges: Vec<Vec<(String, usize)>>,
    pub initial: usize,
}

impl Arena for ExplicitArena {
    type Vertex = usize;
    type Label = String;

    fn initial(&self) -> usize {
        self.initial
    }

    fn owner(&self, v: &usize) -> Player {
        self.owners[*v]
    }

    fn moves(&self, v: &usize) -> Result<Vec<(String, usize)>> {
        Ok(self.edges[*v].clone())
    }
}
