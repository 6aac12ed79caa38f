//! Tree decompositions, `(G, S)`-decompositions and k-dismantability.

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bits::{BitGraph, Mask};
use crate::error::{Error, Result};
use crate::graph::{Graph, Vertex};
use crate::limits;

/// Node of a decomposition tree.
pub type Node = usize;

/// `k = ∞`: every adhesion is small enough to split at.
pub const K_INF: usize = usize::MAX;

/// Default vertex cap for [`dismantle_search`].
pub const DISMANTLE_MAX_N: usize = 10;

/// A tree `T` with a bag `W_x` for every node `x`.
///
/// The tree's vertices are the nodes; every node has a (possibly empty) bag.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeDecomposition {
    tree: Graph,
    bags: BTreeMap<Node, BTreeSet<Vertex>>,
}

#[derive(Serialize, Deserialize)]
struct DecompositionJson {
    tree_edges: Vec<[Node; 2]>,
    bags: BTreeMap<Node, Vec<Vertex>>,
}

impl Serialize for TreeDecomposition {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        DecompositionJson {
            tree_edges: self.tree.edges().into_iter().map(|(x, y)| [x, y]).collect(),
            bags: self.bags.iter().map(|(&x, b)| (x, b.iter().copied().collect())).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for TreeDecomposition {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = DecompositionJson::deserialize(d)?;
        let tree = Graph::from_parts(j.bags.keys().copied(), j.tree_edges.iter().map(|e| (e[0], e[1])))
            .map_err(serde::de::Error::custom)?;
        let bags = j.bags.into_iter().map(|(x, b)| (x, b.into_iter().collect())).collect();
        TreeDecomposition::new(tree, bags).map_err(serde::de::Error::custom)
    }
}

impl TreeDecomposition {
    /// Checks that `tree` is a tree whose nodes are exactly the bag keys.
    pub fn new(tree: Graph, bags: BTreeMap<Node, BTreeSet<Vertex>>) -> Result<Self> {
        if !tree.is_tree() {
            return Err(Error::invalid("decomposition tree is not a tree"));
        }
        if !tree.vertices().eq(bags.keys().copied()) {
            return Err(Error::invalid("bags and tree nodes differ"));
        }
        Ok(TreeDecomposition { tree, bags })
    }

    /// Nodes `0..bags.len()` joined by `edges`.
    pub fn from_bags(bags: Vec<BTreeSet<Vertex>>, edges: &[(Node, Node)]) -> Result<Self> {
        let tree = Graph::from_edges(bags.len(), edges)?;
        Self::new(tree, bags.into_iter().enumerate().collect())
    }

    /// A path decomposition with nodes `0..bags.len()` in order.
    pub fn path(bags: Vec<BTreeSet<Vertex>>) -> Result<Self> {
        let edges: Vec<_> = (1..bags.len()).map(|i| (i - 1, i)).collect();
        Self::from_bags(bags, &edges)
    }

    pub fn single(bag: BTreeSet<Vertex>) -> Self {
        TreeDecomposition {
            tree: Graph::edgeless(1),
            bags: BTreeMap::from([(0, bag)]),
        }
    }

    pub fn tree(&self) -> &Graph {
        &self.tree
    }

    pub fn bags(&self) -> &BTreeMap<Node, BTreeSet<Vertex>> {
        &self.bags
    }

    pub fn bag(&self, x: Node) -> &BTreeSet<Vertex> {
        &self.bags[&x]
    }

    pub fn nodes(&self) -> impl Iterator<Item = Node> + '_ {
        self.bags.keys().copied()
    }

    pub fn node_count(&self) -> usize {
        self.bags.len()
    }

    pub fn max_bag_size(&self) -> usize {
        self.bags.values().map(BTreeSet::len).max().unwrap_or(0)
    }

    /// Largest bag size minus one (so `-1` when all bags are empty).
    pub fn width(&self) -> isize {
        self.max_bag_size() as isize - 1
    }

    pub fn adhesion_of(&self, x: Node, y: Node) -> usize {
        self.bags[&x].intersection(&self.bags[&y]).count()
    }

    /// Largest adhesion over tree edges, 0 for a single node.
    pub fn adhesion(&self) -> usize {
        self.tree.edges().iter().map(|&(x, y)| self.adhesion_of(x, y)).max().unwrap_or(0)
    }

    pub fn is_path_decomposition(&self) -> bool {
        self.tree.vertices().all(|x| self.tree.degree(x) <= 2)
    }

    /// Union of all bags.
    pub fn vertices(&self) -> BTreeSet<Vertex> {
        self.bags.values().flatten().copied().collect()
    }

    /// Nodes whose bag contains `v`.
    pub fn occupancy(&self, v: Vertex) -> BTreeSet<Node> {
        self.bags.iter().filter(|(_, b)| b.contains(&v)).map(|(&x, _)| x).collect()
    }

    /// Nodes whose bag meets `set`.
    pub fn projection(&self, set: &BTreeSet<Vertex>) -> BTreeSet<Node> {
        self.bags.iter().filter(|(_, b)| !b.is_disjoint(set)).map(|(&x, _)| x).collect()
    }

    /// `T_{x|y}`: the nodes on `x`'s side of the tree edge `xy`.
    pub fn side(&self, x: Node, y: Node) -> BTreeSet<Node> {
        self.tree.reach(x, &BTreeSet::from([y]))
    }

    /// Nodes of the tree path from `x` to `y`.
    pub fn tree_path(&self, x: Node, y: Node) -> Vec<Node> {
        self.tree.shortest_path(x, y, &BTreeSet::new()).expect("tree is connected")
    }

    /// Restriction to a connected set of nodes.
    pub fn restrict(&self, nodes: &BTreeSet<Node>) -> Result<Self> {
        let bags = nodes.iter().map(|&x| (x, self.bags[&x].clone())).collect();
        Self::new(self.tree.induced(nodes), bags)
    }

    /// The same tree with every bag mapped through `f`.
    pub fn map_bags(&self, mut f: impl FnMut(Node, &BTreeSet<Vertex>) -> BTreeSet<Vertex>) -> Self {
        TreeDecomposition {
            tree: self.tree.clone(),
            bags: self.bags.iter().map(|(&x, b)| (x, f(x, b))).collect(),
        }
    }

    /// Nodes renumbered `offset..` in increasing order of the old ids.
    pub fn renumbered(&self, offset: Node) -> (Self, BTreeMap<Node, Node>) {
        let map: BTreeMap<Node, Node> = self.nodes().enumerate().map(|(i, x)| (x, offset + i)).collect();
        let tree = self.tree.relabel(&map).expect("renumbering is injective");
        let bags = self.bags.iter().map(|(x, b)| (map[x], b.clone())).collect();
        (TreeDecomposition { tree, bags }, map)
    }

    /// Disjoint union of the parts with node `anchor_i` of every later part
    /// joined to the anchor of the first. Nodes are renumbered from 0.
    pub fn join(parts: Vec<(TreeDecomposition, Node)>) -> Self {
        let mut tree = Graph::new();
        let mut bags = BTreeMap::new();
        let mut first_anchor = None;
        let mut offset = 0;
        for (d, anchor) in parts {
            let (r, map) = d.renumbered(offset);
            offset += r.node_count();
            tree = tree.union(&r.tree);
            bags.extend(r.bags);
            match first_anchor {
                None => first_anchor = Some(map[&anchor]),
                Some(a) => tree.insert_edge(a, map[&anchor]),
            }
        }
        TreeDecomposition { tree, bags }
    }

    pub(crate) fn with_vertex_everywhere(&self, v: Vertex) -> Self {
        self.map_bags(|_, b| {
            let mut b = b.clone();
            b.insert(v);
            b
        })
    }

    /// The first vertex whose occupied nodes do not form a subtree.
    pub fn occupancies_connected(&self) -> Option<Vertex> {
        self.vertices().into_iter().find(|&v| !self.tree.is_connected_set(&self.occupancy(v)))
    }
}

/// The first failed condition of a (`G`, `S`) tree decomposition.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Violation {
    #[error("bag of node {node} contains {vertex}, which is not allowed there")]
    ForeignVertex { node: Node, vertex: Vertex },
    #[error("vertex {0} is in no bag")]
    Uncovered(Vertex),
    #[error("nodes containing vertex {0} are not connected")]
    Disconnected(Vertex),
    #[error("edge {0}-{1} is in no bag")]
    EdgeUncovered(Vertex, Vertex),
    #[error("the neighbourhood of component {component:?} is in no bag")]
    Neighbourhood { component: BTreeSet<Vertex> },
}

/// Checks that `d` is a tree decomposition of `g`.
pub fn validate(g: &Graph, d: &TreeDecomposition) -> std::result::Result<(), Violation> {
    check_core(g, &g.vertex_set(), d)
}

/// Checks that `d` is a (`g`, `s`) tree decomposition: a tree decomposition
/// of `G[S]` such that every component of `G - S` has its neighbourhood
/// inside one bag.
pub fn validate_gs(g: &Graph, s: &BTreeSet<Vertex>, d: &TreeDecomposition) -> std::result::Result<(), Violation> {
    check_core(g, s, d)?;
    for c in g.remove_vertices(s).components() {
        let nb = g.neighborhood(&c);
        if !d.bags.values().any(|b| nb.is_subset(b)) {
            return Err(Violation::Neighbourhood { component: c });
        }
    }
    Ok(())
}

fn check_core(g: &Graph, s: &BTreeSet<Vertex>, d: &TreeDecomposition) -> std::result::Result<(), Violation> {
    for (&x, b) in &d.bags {
        if let Some(&v) = b.iter().find(|v| !s.contains(v) || !g.has_vertex(**v)) {
            return Err(Violation::ForeignVertex { node: x, vertex: v });
        }
    }
    for &v in s {
        let occ = d.occupancy(v);
        if occ.is_empty() {
            return Err(Violation::Uncovered(v));
        }
        if !d.tree.is_connected_set(&occ) {
            return Err(Violation::Disconnected(v));
        }
    }
    for (u, v) in g.induced(s).edges() {
        if !d.bags.values().any(|b| b.contains(&u) && b.contains(&v)) {
            return Err(Violation::EdgeUncovered(u, v));
        }
    }
    Ok(())
}

/// One step of a dismantling sequence.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Move {
    /// Delete a vertex lying in every bag of the current piece.
    Remove(Vertex),
    /// Cut the current piece at a tree edge of small adhesion; the moves for
    /// the first endpoint's side follow, then those for the second.
    Split(Node, Node),
    /// The current piece is this single node with an empty bag.
    Base(Node),
}

/// A certificate that a decomposition is k-dismantable, or `None`.
///
/// Deleting vertices that lie in every bag never hurts, and a k-dismantable
/// decomposition stays k-dismantable on both sides of any edge of adhesion
/// below `k`, so the greedy order (removals first in increasing vertex order,
/// then the first admissible edge) decides the question without backtracking.
pub fn is_k_dismantable(d: &TreeDecomposition, k: usize) -> Option<Vec<Move>> {
    let mut out = Vec::new();
    let nodes: BTreeSet<Node> = d.nodes().collect();
    greedy(&d.tree, nodes, d.bags.clone(), k, &mut out).then_some(out)
}

fn greedy(
    tree: &Graph,
    nodes: BTreeSet<Node>,
    mut bags: BTreeMap<Node, BTreeSet<Vertex>>,
    k: usize,
    out: &mut Vec<Move>,
) -> bool {
    let mut common = bags.values().next().cloned().unwrap_or_default();
    for b in bags.values() {
        common.retain(|v| b.contains(v));
    }
    for &v in &common {
        out.push(Move::Remove(v));
    }
    for b in bags.values_mut() {
        b.retain(|v| !common.contains(v));
    }
    if nodes.len() == 1 {
        out.push(Move::Base(*nodes.first().expect("one node")));
        return true;
    }
    let edges = tree.induced(&nodes).edges();
    let Some(&(x, y)) = edges.iter().find(|&&(x, y)| bags[&x].intersection(&bags[&y]).count() < k) else {
        return false;
    };
    out.push(Move::Split(x, y));
    let blocked: BTreeSet<Node> = tree.vertex_set().difference(&nodes).copied().chain([y]).collect();
    let sx = tree.reach(x, &blocked);
    let sy: BTreeSet<Node> = nodes.difference(&sx).copied().collect();
    let part = |side: &BTreeSet<Node>| side.iter().map(|n| (*n, bags[n].clone())).collect();
    let (bx, by) = (part(&sx), part(&sy));
    greedy(tree, sx, bx, k, out) && greedy(tree, sy, by, k, out)
}

/// Replays a dismantling sequence, reporting the first illegal move.
pub fn verify_dismantling(d: &TreeDecomposition, k: usize, moves: &[Move]) -> std::result::Result<(), String> {
    let mut it = moves.iter();
    replay(&d.tree, d.nodes().collect(), d.bags.clone(), k, &mut it)?;
    match it.next() {
        None => Ok(()),
        Some(m) => Err(format!("trailing move {m:?}")),
    }
}

fn replay<'a>(
    tree: &Graph,
    nodes: BTreeSet<Node>,
    mut bags: BTreeMap<Node, BTreeSet<Vertex>>,
    k: usize,
    it: &mut impl Iterator<Item = &'a Move>,
) -> std::result::Result<(), String> {
    loop {
        match it.next().ok_or("sequence ends early")? {
            Move::Remove(v) => {
                if !bags.values().all(|b| b.contains(v)) {
                    return Err(format!("vertex {v} is not in every bag"));
                }
                for b in bags.values_mut() {
                    b.remove(v);
                }
            }
            Move::Base(x) => {
                if nodes.len() != 1 || !nodes.contains(x) || !bags[x].is_empty() {
                    return Err(format!("node {x} is not a lone empty bag"));
                }
                return Ok(());
            }
            Move::Split(x, y) => {
                if !nodes.contains(x) || !nodes.contains(y) || !tree.has_edge(*x, *y) {
                    return Err(format!("{x}-{y} is not an edge of the current piece"));
                }
                if bags[x].intersection(&bags[y]).count() >= k {
                    return Err(format!("adhesion at {x}-{y} is too large"));
                }
                let blocked: BTreeSet<Node> =
                    tree.vertex_set().difference(&nodes).copied().chain([*y]).collect();
                let sx = tree.reach(*x, &blocked);
                let sy: BTreeSet<Node> = nodes.difference(&sx).copied().collect();
                let part = |side: &BTreeSet<Node>| side.iter().map(|n| (*n, bags[n].clone())).collect();
                let (bx, by) = (part(&sx), part(&sy));
                replay(tree, sx, bx, k, it)?;
                return replay(tree, sy, by, k, it);
            }
        }
    }
}

/// A k-dismantable tree decomposition of `g` of width below `t`, if any.
///
/// Decision search over the dismantling moves read backwards: a graph is
/// handled by a lone bag when it has at most `t` vertices, by its
/// components, by a vertex present in every bag, or by a clique-sum over a
/// separator of fewer than `k` vertices.
pub fn dismantle_search(g: &Graph, k: usize, t: usize) -> Result<Option<TreeDecomposition>> {
    limits::check("dismantle_search", g.n(), DISMANTLE_MAX_N)?;
    if k == 0 {
        return Err(Error::precondition("k must be at least 1"));
    }
    let b = BitGraph::from_graph(g)?;
    let mut s = Search { k, failed: HashSet::new() };
    Ok(s.find(&b, t))
}

struct Search {
    k: usize,
    failed: HashSet<(Vec<Vertex>, Vec<Mask>, usize)>,
}

impl Search {
    fn find(&mut self, g: &BitGraph, t: usize) -> Option<TreeDecomposition> {
        let n = g.n();
        if n == 0 {
            return Some(TreeDecomposition::single(BTreeSet::new()));
        }
        if n <= t {
            return Some(TreeDecomposition::single(g.ids.iter().copied().collect()));
        }
        if t == 0 {
            return None;
        }
        let key = (g.ids.clone(), g.adj.clone(), t);
        if self.failed.contains(&key) {
            return None;
        }
        let found = self.expand(g, t);
        if found.is_none() {
            self.failed.insert(key);
        }
        found
    }

    fn expand(&mut self, g: &BitGraph, t: usize) -> Option<TreeDecomposition> {
        let comps = g.components();
        if comps.len() > 1 {
            let mut parts = Vec::new();
            for c in comps {
                parts.push((self.find(&g.induced(c), t)?, 0));
            }
            return Some(TreeDecomposition::join(parts));
        }
        for i in 0..g.n() {
            if let Some(d) = self.find(&g.remove(i), t - 1) {
                return Some(d.with_vertex_everywhere(g.ids[i]));
            }
        }
        let max_sep = self.k.saturating_sub(1).min(g.n().saturating_sub(2));
        for s in separators(g, max_sep) {
            if let Some(d) = self.split(g, s, t) {
                return Some(d);
            }
        }
        None
    }

    fn split(&mut self, g: &BitGraph, s: Mask, t: usize) -> Option<TreeDecomposition> {
        let sep = g.set_of(s);
        let mut parts = Vec::new();
        for c in g.components_in(g.all() & !s) {
            let d = self.find(&g.piece(s, c), t)?;
            let anchor = d.nodes().find(|&x| sep.is_subset(d.bag(x))).expect("a clique lies in some bag");
            parts.push((d, anchor));
        }
        Some(TreeDecomposition::join(parts))
    }
}

/// Nonempty vertex sets of size at most `max` whose removal disconnects `g`,
/// by increasing size and then increasing mask.
pub(crate) fn separators(g: &BitGraph, max: usize) -> Vec<Mask> {
    let mut out: Vec<Mask> = crate::bits::submasks_up_to(g.all(), max)
        .into_iter()
        .filter(|&s| s != 0 && g.components_in(g.all() & !s).len() >= 2)
        .collect();
    out.sort_by_key(|&s| (s.count_ones(), s));
    out
}

/// Result of [`helly_cover`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HellyOutcome {
    /// Indices of family members with pairwise disjoint projections.
    Disjoint(Vec<usize>),
    /// At most `d - 1` nodes whose bags meet every member.
    Cover(Vec<Node>),
}

/// Either `d` members of `family` with pairwise disjoint projections onto
/// the tree, or fewer than `d` bags meeting every member.
///
/// Greedy from a root: take the member whose projection tops out deepest;
/// every member meeting the subtree below that top contains the top.
pub fn helly_cover(
    g: &Graph,
    dec: &TreeDecomposition,
    family: &[BTreeSet<Vertex>],
    d: usize,
) -> Result<HellyOutcome> {
    validate(g, dec).map_err(|v| Error::invalid(format!("not a tree decomposition: {v}")))?;
    if d == 0 {
        return Ok(HellyOutcome::Disjoint(Vec::new()));
    }
    let root = dec.nodes().next().expect("nonempty tree");
    let depth = bfs_depth(&dec.tree, root);
    let mut tops = Vec::with_capacity(family.len());
    let mut projections = Vec::with_capacity(family.len());
    for (i, f) in family.iter().enumerate() {
        if f.is_empty() || !f.iter().all(|&v| g.has_vertex(v)) || !g.is_connected_set(f) {
            return Err(Error::invalid(format!("member {i} is not a connected vertex set of the graph")));
        }
        let p = dec.projection(f);
        let top = *p.iter().min_by_key(|&&x| (depth[&x], x)).expect("members are covered");
        tops.push(top);
        projections.push(p);
    }
    let mut alive: Vec<usize> = (0..family.len()).collect();
    let mut chosen = Vec::new();
    let mut roots = Vec::new();
    while !alive.is_empty() {
        let &i = alive.iter().max_by_key(|&&i| (depth[&tops[i]], std::cmp::Reverse(i))).expect("nonempty");
        chosen.push(i);
        roots.push(tops[i]);
        if chosen.len() == d {
            return Ok(HellyOutcome::Disjoint(chosen));
        }
        alive.retain(|&j| !projections[j].contains(&tops[i]));
    }
    Ok(HellyOutcome::Cover(roots))
}

fn bfs_depth(tree: &Graph, root: Node) -> BTreeMap<Node, usize> {
    let mut depth = BTreeMap::from([(root, 0)]);
    let mut queue = VecDeque::from([root]);
    while let Some(x) = queue.pop_front() {
        for &y in tree.neighbors(x) {
            if !depth.contains_key(&y) {
                depth.insert(y, depth[&x] + 1);
                queue.push_back(y);
            }
        }
    }
    depth
}

/// A (`G`, `S`) tree decomposition together with its `S`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GsDecomposition {
    pub s: BTreeSet<Vertex>,
    pub decomposition: TreeDecomposition,
}

/// Combines (`G`, `S_i`) decompositions into one for the union of the `S_i`.
///
/// Parts are merged left to right: for each component `C` of `G` minus the
/// sets merged so far, the next part restricted to `C` is hung below a node
/// whose bag holds `N(C)`, with that bag added to each of its bags.
pub fn combine_gs_decompositions(g: &Graph, parts: &[GsDecomposition]) -> Result<GsDecomposition> {
    let (first, rest) = parts.split_first().ok_or_else(|| Error::precondition("no parts to combine"))?;
    for (i, p) in parts.iter().enumerate() {
        validate_gs(g, &p.s, &p.decomposition)
            .map_err(|v| Error::invalid(format!("part {i} is not a (G,S) decomposition: {v}")))?;
    }
    let mut s = first.s.clone();
    let mut dec = first.decomposition.clone();
    for part in rest {
        let mut tree = dec.tree.clone();
        let mut bags = dec.bags.clone();
        let mut next_node = dec.nodes().last().map_or(0, |x| x + 1);
        for c in g.remove_vertices(&s).components() {
            if c.is_disjoint(&part.s) {
                continue;
            }
            let nb = g.neighborhood(&c);
            let anchor = dec
                .nodes()
                .find(|&x| nb.is_subset(dec.bag(x)))
                .ok_or_else(|| Error::invalid("a component neighbourhood is in no bag"))?;
            let hung = part
                .decomposition
                .map_bags(|_, b| b.intersection(&c).copied().chain(dec.bag(anchor).iter().copied()).collect());
            let (hung, map) = hung.renumbered(next_node);
            next_node += hung.node_count();
            tree = tree.union(&hung.tree);
            bags.extend(hung.bags);
            let top = map[&part.decomposition.nodes().next().expect("nonempty")];
            tree.insert_edge(anchor, top);
        }
        s.extend(part.s.iter().copied());
        dec = TreeDecomposition { tree, bags };
    }
    Ok(GsDecomposition { s, decomposition: dec })
}
