//! Dense adjacency for graphs on at most 64 vertices, used by the exhaustive
//! solvers. Position `i` carries the original identity `ids[i]`.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::graph::{Graph, Vertex};

pub type Mask = u64;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BitGraph {
    pub ids: Vec<Vertex>,
    pub adj: Vec<Mask>,
}

#[inline]
pub fn bit(i: usize) -> Mask {
    1u64 << i
}

#[inline]
pub fn full(n: usize) -> Mask {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Iterates the set bits of a mask in increasing order.
pub fn ones(mut m: Mask) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if m == 0 {
            None
        } else {
            let i = m.trailing_zeros() as usize;
            m &= m - 1;
            Some(i)
        }
    })
}

/// All submasks of `m` with at most `max` bits, in increasing numeric order.
pub fn submasks_up_to(m: Mask, max: usize) -> Vec<Mask> {
    let mut out = Vec::new();
    let mut s: Mask = 0;
    loop {
        if (s.count_ones() as usize) <= max {
            out.push(s);
        }
        if s == m {
            break;
        }
        s = (s.wrapping_sub(m)) & m;
    }
    out
}

impl BitGraph {
    pub fn from_graph(g: &Graph) -> Result<Self> {
        if g.n() > 64 {
            return Err(Error::SizeLimit {
                what: "dense adjacency",
                limit: 64,
                actual: g.n(),
            });
        }
        let ids: Vec<Vertex> = g.vertices().collect();
        let pos: BTreeMap<Vertex, usize> = ids.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let adj = ids
            .iter()
            .map(|&v| g.neighbors(v).iter().fold(0, |m, w| m | bit(pos[w])))
            .collect();
        Ok(BitGraph { ids, adj })
    }

    pub fn to_graph(&self) -> Graph {
        let mut g = Graph::new();
        for &v in &self.ids {
            g.insert_vertex(v);
        }
        for i in 0..self.n() {
            for j in ones(self.adj[i] & !full(i + 1)) {
                g.insert_edge(self.ids[i], self.ids[j]);
            }
        }
        g
    }

    pub fn n(&self) -> usize {
        self.ids.len()
    }

    pub fn all(&self) -> Mask {
        full(self.n())
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|a| a.count_ones() as usize).sum::<usize>() / 2
    }

    pub fn is_complete(&self) -> bool {
        let all = self.all();
        (0..self.n()).all(|i| self.adj[i] | bit(i) == all)
    }

    /// Compacted induced subgraph on the positions of `m`.
    pub fn induced(&self, m: Mask) -> BitGraph {
        let keep: Vec<usize> = ones(m).collect();
        let mut adj = Vec::with_capacity(keep.len());
        for &i in &keep {
            let mut row = 0;
            for (j, &k) in keep.iter().enumerate() {
                if self.adj[i] & bit(k) != 0 {
                    row |= bit(j);
                }
            }
            adj.push(row);
        }
        BitGraph {
            ids: keep.iter().map(|&i| self.ids[i]).collect(),
            adj,
        }
    }

    pub fn remove(&self, i: usize) -> BitGraph {
        self.induced(self.all() & !bit(i))
    }

    /// Same positions, with `m` made a clique.
    pub fn with_clique(&self, m: Mask) -> BitGraph {
        let mut g = self.clone();
        for i in ones(m) {
            g.adj[i] |= m & !bit(i);
        }
        g
    }

    /// Connected components of the subgraph induced by `within`, ordered by
    /// lowest position.
    pub fn components_in(&self, within: Mask) -> Vec<Mask> {
        let mut rest = within;
        let mut out = Vec::new();
        while rest != 0 {
            let s = rest & rest.wrapping_neg();
            let c = self.reach(s, within);
            out.push(c);
            rest &= !c;
        }
        out
    }

    pub fn components(&self) -> Vec<Mask> {
        self.components_in(self.all())
    }

    /// Closure of `start` inside `within`.
    pub fn reach(&self, start: Mask, within: Mask) -> Mask {
        let mut seen = start & within;
        let mut frontier = seen;
        while frontier != 0 {
            let mut next = 0;
            for i in ones(frontier) {
                next |= self.adj[i];
            }
            next &= within & !seen;
            seen |= next;
            frontier = next;
        }
        seen
    }

    pub fn is_connected_in(&self, m: Mask) -> bool {
        m == 0 || self.reach(m & m.wrapping_neg(), m) == m
    }

    pub fn neighborhood(&self, m: Mask) -> Mask {
        ones(m).fold(0, |acc, i| acc | self.adj[i]) & !m
    }

    /// The clique-sum piece `G[S ∪ C]` with `S` made a clique, compacted.
    pub fn piece(&self, s: Mask, c: Mask) -> BitGraph {
        let sub = self.induced(s | c);
        let keep: Vec<usize> = ones(s | c).collect();
        let s_local = keep
            .iter()
            .enumerate()
            .filter(|(_, &i)| s & bit(i) != 0)
            .fold(0, |m, (j, _)| m | bit(j));
        sub.with_clique(s_local)
    }

    pub fn mask_of(&self, set: &BTreeSet<Vertex>) -> Mask {
        self.ids
            .iter()
            .enumerate()
            .filter(|(_, v)| set.contains(v))
            .fold(0, |m, (i, _)| m | bit(i))
    }

    pub fn set_of(&self, m: Mask) -> BTreeSet<Vertex> {
        ones(m).map(|i| self.ids[i]).collect()
    }
}
