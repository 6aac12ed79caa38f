//! Finite simple undirected graphs with stable integer vertex identities.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::error::{Error, Result};

/// Vertex identity. Identities are preserved by every derived-graph operation.
pub type Vertex = usize;

/// A finite simple undirected graph.
///
/// Values are never mutated in place by the public API: deletions, induced
/// subgraphs, clique additions and contractions all return new graphs.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Graph {
    adj: BTreeMap<Vertex, BTreeSet<Vertex>>,
}

impl Graph {
    /// The graph with no vertices.
    pub fn new() -> Self {
        Self::default()
    }

    /// `n` isolated vertices `0..n`.
    pub fn edgeless(n: usize) -> Self {
        let mut g = Graph::new();
        for v in 0..n {
            g.insert_vertex(v);
        }
        g
    }

    /// Vertices `0..n` and the given edges.
    pub fn from_edges(n: usize, edges: &[(Vertex, Vertex)]) -> Result<Self> {
        Self::from_parts(0..n, edges.iter().copied())
    }

    /// Explicit vertex set and edge list. Rejects loops and edges whose
    /// endpoints are not declared. Parallel edges collapse.
    pub fn from_parts(
        vertices: impl IntoIterator<Item = Vertex>,
        edges: impl IntoIterator<Item = (Vertex, Vertex)>,
    ) -> Result<Self> {
        let mut g = Graph::new();
        for v in vertices {
            g.insert_vertex(v);
        }
        for (u, v) in edges {
            if u == v {
                return Err(Error::invalid(format!("self-loop at vertex {u}")));
            }
            if !g.has_vertex(u) || !g.has_vertex(v) {
                return Err(Error::invalid(format!(
                    "edge {u}-{v} uses an undeclared vertex"
                )));
            }
            g.insert_edge(u, v);
        }
        Ok(g)
    }

    pub(crate) fn insert_vertex(&mut self, v: Vertex) {
        self.adj.entry(v).or_default();
    }

    pub(crate) fn insert_edge(&mut self, u: Vertex, v: Vertex) {
        debug_assert!(u != v);
        self.adj.entry(u).or_default().insert(v);
        self.adj.entry(v).or_default().insert(u);
    }

    pub(crate) fn delete_edge(&mut self, u: Vertex, v: Vertex) {
        if let Some(s) = self.adj.get_mut(&u) {
            s.remove(&v);
        }
        if let Some(s) = self.adj.get_mut(&v) {
            s.remove(&u);
        }
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn m(&self) -> usize {
        self.adj.values().map(|s| s.len()).sum::<usize>() / 2
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.adj.keys().copied()
    }

    pub fn vertex_set(&self) -> BTreeSet<Vertex> {
        self.adj.keys().copied().collect()
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> Vec<(Vertex, Vertex)> {
        let mut out = Vec::with_capacity(self.m());
        for (&u, nb) in &self.adj {
            for &v in nb.range(u + 1..) {
                out.push((u, v));
            }
        }
        out
    }

    pub fn has_vertex(&self, v: Vertex) -> bool {
        self.adj.contains_key(&v)
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        self.adj.get(&u).is_some_and(|s| s.contains(&v))
    }

    /// Neighbourhood of `v`; empty when `v` is absent.
    pub fn neighbors(&self, v: Vertex) -> &BTreeSet<Vertex> {
        static EMPTY: BTreeSet<Vertex> = BTreeSet::new();
        self.adj.get(&v).unwrap_or(&EMPTY)
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.neighbors(v).len()
    }

    pub fn max_vertex(&self) -> Option<Vertex> {
        self.adj.keys().next_back().copied()
    }

    /// Open neighbourhood of a vertex set.
    pub fn neighborhood(&self, set: &BTreeSet<Vertex>) -> BTreeSet<Vertex> {
        let mut out = BTreeSet::new();
        for &v in set {
            for &w in self.neighbors(v) {
                if !set.contains(&w) {
                    out.insert(w);
                }
            }
        }
        out
    }

    /// `G[X]`; vertices of `X` outside the graph are ignored.
    pub fn induced(&self, set: &BTreeSet<Vertex>) -> Graph {
        let mut adj = BTreeMap::new();
        for &v in set {
            if let Some(nb) = self.adj.get(&v) {
                adj.insert(v, nb.iter().copied().filter(|w| set.contains(w)).collect());
            }
        }
        Graph { adj }
    }

    /// `G - X`.
    pub fn remove_vertices(&self, set: &BTreeSet<Vertex>) -> Graph {
        let keep: BTreeSet<Vertex> = self.vertices().filter(|v| !set.contains(v)).collect();
        self.induced(&keep)
    }

    /// `G - v`.
    pub fn remove_vertex(&self, v: Vertex) -> Graph {
        let mut g = self.clone();
        if let Some(nb) = g.adj.remove(&v) {
            for w in nb {
                g.adj.get_mut(&w).expect("symmetric adjacency").remove(&v);
            }
        }
        g
    }

    /// The graph with every pair of `set` made adjacent.
    pub fn with_clique(&self, set: &BTreeSet<Vertex>) -> Result<Graph> {
        let mut g = self.clone();
        for &u in set {
            if !g.has_vertex(u) {
                return Err(Error::invalid(format!("vertex {u} not in graph")));
            }
        }
        let vs: Vec<Vertex> = set.iter().copied().collect();
        for (i, &u) in vs.iter().enumerate() {
            for &v in &vs[i + 1..] {
                g.insert_edge(u, v);
            }
        }
        Ok(g)
    }

    /// The graph without the given edges.
    pub fn remove_edges(&self, edges: &[(Vertex, Vertex)]) -> Graph {
        let mut g = self.clone();
        for &(u, v) in edges {
            g.delete_edge(u, v);
        }
        g
    }

    /// Union of vertex and edge sets.
    pub fn union(&self, other: &Graph) -> Graph {
        let mut g = self.clone();
        for v in other.vertices() {
            g.insert_vertex(v);
        }
        for (u, v) in other.edges() {
            g.insert_edge(u, v);
        }
        g
    }

    pub fn complement(&self) -> Graph {
        let vs: Vec<Vertex> = self.vertices().collect();
        let mut g = Graph::new();
        for &v in &vs {
            g.insert_vertex(v);
        }
        for (i, &u) in vs.iter().enumerate() {
            for &v in &vs[i + 1..] {
                if !self.has_edge(u, v) {
                    g.insert_edge(u, v);
                }
            }
        }
        g
    }

    /// Contracts the edge `uv` into `u`.
    pub fn contract_edge(&self, u: Vertex, v: Vertex) -> Result<Graph> {
        if !self.has_edge(u, v) {
            return Err(Error::invalid(format!("{u}-{v} is not an edge")));
        }
        let mut g = self.remove_vertex(v);
        for &w in self.neighbors(v) {
            if w != u {
                g.insert_edge(u, w);
            }
        }
        Ok(g)
    }

    /// Renames vertices through `map`, which must be injective on `V(G)`.
    pub fn relabel(&self, map: &BTreeMap<Vertex, Vertex>) -> Result<Graph> {
        let image: BTreeSet<Vertex> = self.vertices().filter_map(|v| map.get(&v).copied()).collect();
        if image.len() != self.n() {
            return Err(Error::invalid("relabelling is not injective on the vertex set"));
        }
        Graph::from_parts(
            image,
            self.edges().into_iter().map(|(u, v)| (map[&u], map[&v])),
        )
    }

    /// Projection of `u` on `x`: `{u}` when `u` is in `x`, otherwise the
    /// neighbourhood of the component of `G - x` holding `u`.
    pub fn vertex_projection(&self, x: &BTreeSet<Vertex>, u: Vertex) -> Result<BTreeSet<Vertex>> {
        if !self.has_vertex(u) {
            return Err(Error::invalid(format!("vertex {u} is not in the graph")));
        }
        if x.contains(&u) {
            return Ok(BTreeSet::from([u]));
        }
        Ok(self.neighborhood(&self.reach(u, x)))
    }

    /// Union of the projections on `x` of the vertices of `a`.
    pub fn set_projection(&self, x: &BTreeSet<Vertex>, a: &BTreeSet<Vertex>) -> Result<BTreeSet<Vertex>> {
        let mut out = BTreeSet::new();
        for &u in a {
            out.extend(self.vertex_projection(x, u)?);
        }
        Ok(out)
    }

    /// Connected components ordered by smallest vertex.
    pub fn components(&self) -> Vec<BTreeSet<Vertex>> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for s in self.vertices() {
            if seen.contains(&s) {
                continue;
            }
            let comp = self.reach(s, &BTreeSet::new());
            seen.extend(comp.iter().copied());
            out.push(comp);
        }
        out
    }

    /// Vertices reachable from `s` without entering `blocked`.
    pub fn reach(&self, s: Vertex, blocked: &BTreeSet<Vertex>) -> BTreeSet<Vertex> {
        let mut seen = BTreeSet::from([s]);
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for &w in self.neighbors(v) {
                if !blocked.contains(&w) && seen.insert(w) {
                    queue.push_back(w);
                }
            }
        }
        seen
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    /// Whether `G[set]` is connected (the empty set counts as connected).
    pub fn is_connected_set(&self, set: &BTreeSet<Vertex>) -> bool {
        self.induced(set).components().len() <= 1
    }

    pub fn is_tree(&self) -> bool {
        self.n() >= 1 && self.m() + 1 == self.n() && self.is_connected()
    }

    /// A shortest path from `s` to `t` avoiding `blocked`, endpoints included.
    pub fn shortest_path(
        &self,
        s: Vertex,
        t: Vertex,
        blocked: &BTreeSet<Vertex>,
    ) -> Option<Vec<Vertex>> {
        let mut prev = BTreeMap::from([(s, s)]);
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            if v == t {
                let mut path = vec![t];
                let mut c = t;
                while c != s {
                    c = prev[&c];
                    path.push(c);
                }
                path.reverse();
                return Some(path);
            }
            for &w in self.neighbors(v) {
                if !blocked.contains(&w) && !prev.contains_key(&w) {
                    prev.insert(w, v);
                    queue.push_back(w);
                }
            }
        }
        None
    }

    /// Whether `seq` is a path in the graph (distinct vertices, consecutive
    /// ones adjacent). The empty sequence is not a path.
    pub fn is_path(&self, seq: &[Vertex]) -> bool {
        if seq.is_empty() || seq.iter().any(|&v| !self.has_vertex(v)) {
            return false;
        }
        let distinct: BTreeSet<_> = seq.iter().collect();
        distinct.len() == seq.len() && seq.windows(2).all(|w| self.has_edge(w[0], w[1]))
    }

    /// Blocks (maximal 2-connected subgraphs, bridges and isolated vertices),
    /// as vertex sets in order of discovery from the smallest vertex.
    pub fn blocks(&self) -> Vec<BTreeSet<Vertex>> {
        let mut disc: BTreeMap<Vertex, usize> = BTreeMap::new();
        let mut low: BTreeMap<Vertex, usize> = BTreeMap::new();
        let mut out = Vec::new();
        let mut timer = 0;
        for root in self.vertices() {
            if disc.contains_key(&root) {
                continue;
            }
            if self.degree(root) == 0 {
                out.push(BTreeSet::from([root]));
                disc.insert(root, timer);
                timer += 1;
                continue;
            }
            // iterative Hopcroft-Tarjan with an edge stack
            disc.insert(root, timer);
            low.insert(root, timer);
            timer += 1;
            let mut edge_stack: Vec<(Vertex, Vertex)> = Vec::new();
            let mut stack: Vec<(Vertex, Option<Vertex>, Vec<Vertex>)> =
                vec![(root, None, self.neighbors(root).iter().rev().copied().collect())];
            while let Some((v, parent, pending)) = stack.last_mut() {
                let v = *v;
                let parent = *parent;
                if let Some(w) = pending.pop() {
                    if Some(w) == parent {
                        continue;
                    }
                    if let Some(&dw) = disc.get(&w) {
                        if dw < disc[&v] {
                            edge_stack.push((v, w));
                            let lv = low[&v].min(dw);
                            low.insert(v, lv);
                        }
                    } else {
                        edge_stack.push((v, w));
                        disc.insert(w, timer);
                        low.insert(w, timer);
                        timer += 1;
                        stack.push((w, Some(v), self.neighbors(w).iter().rev().copied().collect()));
                    }
                } else {
                    stack.pop();
                    if let Some(p) = parent {
                        let lp = low[&p].min(low[&v]);
                        low.insert(p, lp);
                        if low[&v] >= disc[&p] {
                            let mut block = BTreeSet::new();
                            while let Some((a, b)) = edge_stack.pop() {
                                block.insert(a);
                                block.insert(b);
                                if (a, b) == (p, v) {
                                    break;
                                }
                            }
                            out.push(block);
                        }
                    }
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{complete, cycle, path};

    #[test]
    fn basic_ops() {
        let g = cycle(5);
        assert_eq!(g.n(), 5);
        assert_eq!(g.m(), 5);
        let h = g.remove_vertex(0);
        assert_eq!(h.m(), 3);
        assert!(h.is_connected());
        let two = h.remove_vertex(2);
        assert_eq!(two.components().len(), 2);
        assert_eq!(g.complement().m(), 5);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(Graph::from_edges(3, &[(0, 0)]).is_err());
        assert!(Graph::from_edges(3, &[(0, 3)]).is_err());
    }

    #[test]
    fn blocks_of_small_graphs() {
        let bowtie = Graph::from_edges(5, &[(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (2, 4)]).unwrap();
        let mut b = bowtie.blocks();
        b.sort();
        assert_eq!(b, vec![BTreeSet::from([0, 1, 2]), BTreeSet::from([2, 3, 4])]);
        assert_eq!(path(4).blocks().len(), 3);
        assert_eq!(complete(4).blocks().len(), 1);
        assert_eq!(Graph::edgeless(3).blocks().len(), 3);
    }

    #[test]
    fn contraction_merges_neighbourhoods() {
        let g = path(4).contract_edge(1, 2).unwrap();
        assert_eq!(g.edges(), vec![(0, 1), (1, 3)]);
    }
}
