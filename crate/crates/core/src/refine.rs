//! Refinement of tree decompositions.
//!
//! Bag-size potentials, the improvement step that splits a bag along a small
//! (`Z1`, `Z2`)-cut, and two drivers built on it: decompositions of bounded
//! adhesion whose bags are well linked ([`unbreakable_decomposition`]) and good
//! (`G`, `S`) decompositions ([`good_gs_decomposition`]). Driver outputs are
//! checked by the exhaustive verifiers in this module.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::bits::{submasks_up_to, BitGraph, Mask};
use crate::decomp::{validate, validate_gs, Node, TreeDecomposition};
use crate::error::{Error, Result};
pub use crate::flow::{check_paths, max_disjoint_paths, Menger};
use crate::graph::{Graph, Vertex};
use crate::limits;

/// Default vertex cap for the improvement step and [`unbreakable_decomposition`].
pub const REFINE_MAX_N: usize = 12;
/// Default vertex cap for [`good_gs_decomposition`].
pub const GOOD_MAX_N: usize = 10;
/// Default cap on `k` for the drivers.
pub const REFINE_MAX_K: usize = 3;

const MAX_ITERATIONS: usize = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PotentialKind {
    Plain,
    /// Bags of size at most `3(k-1)/2` count only next to an adhesion of size
    /// at least `k`.
    Filtered(usize),
}

/// Bag counts `(s_n, ..., s_0)`, compared lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Potential(pub Vec<usize>);

impl Potential {
    /// The number of counted bags of size `i`.
    pub fn get(&self, i: usize) -> usize {
        let len = self.0.len();
        if i >= len {
            0
        } else {
            self.0[len - 1 - i]
        }
    }
}

fn is_large(size: usize, k: usize) -> bool {
    2 * size > 3 * k.saturating_sub(1)
}

/// The potential of `d` for a graph on `n` vertices.
pub fn potential(d: &TreeDecomposition, n: usize, kind: PotentialKind) -> Potential {
    let top = n.max(d.max_bag_size());
    let mut s = vec![0; top + 1];
    for (&x, b) in d.bags() {
        let counted = match kind {
            PotentialKind::Plain => true,
            PotentialKind::Filtered(k) => {
                is_large(b.len(), k) || d.tree().neighbors(x).iter().any(|&y| d.adhesion_of(x, y) >= k)
            }
        };
        if counted {
            s[top - b.len()] += 1;
        }
    }
    Potential(s)
}

/// A separation `(side1 ∪ x, side2 ∪ x)` with no edge between the sides.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Separation {
    pub x: BTreeSet<Vertex>,
    pub side1: BTreeSet<Vertex>,
    pub side2: BTreeSet<Vertex>,
}

impl Separation {
    pub fn order(&self) -> usize {
        self.x.len()
    }

    pub fn is_valid(&self, g: &Graph) -> bool {
        let all: BTreeSet<Vertex> = self.x.iter().chain(&self.side1).chain(&self.side2).copied().collect();
        let sizes = self.x.len() + self.side1.len() + self.side2.len();
        all == g.vertex_set()
            && sizes == all.len()
            && self.side1.iter().all(|&u| g.neighbors(u).is_disjoint(&self.side2))
    }
}

/// Result of [`improvement_step`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Improvement {
    pub s: BTreeSet<Vertex>,
    pub decomposition: TreeDecomposition,
    pub separation: Separation,
    /// The violating pair of nodes used, the closest one on the tree path.
    pub pair: (Node, Node),
    pub z1: BTreeSet<Vertex>,
    pub z2: BTreeSet<Vertex>,
    /// The new tree edge: the first-side copy of `pair.1` and the second-side
    /// copy of `pair.0`. When the pair is one node, `z1` lies in the first
    /// bag, `z2` in the second, and the bags meet in the cut.
    pub bridge: (Node, Node),
}

/// Masks of at most `max` vertices, used as candidate cuts.
fn small_sets(bg: &BitGraph, max: usize) -> Vec<Mask> {
    let mut v = submasks_up_to(bg.all(), max);
    v.sort_by_key(|m| m.count_ones());
    v
}

/// Whether fewer than `i` vertices separate `z1` from `z2`.
fn separated(bg: &BitGraph, small: &[Mask], z1: Mask, z2: Mask, i: usize) -> bool {
    small
        .iter()
        .take_while(|x| (x.count_ones() as usize) < i)
        .any(|&x| bg.reach(z1 & !x, bg.all() & !x) & z2 & !x == 0)
}

/// Whether some `i`-subsets of `w1` and `w2` are separated by fewer than `i`
/// vertices: a cut `X` and a grouping of the components of `G - X` leaving
/// `i` vertices of `w1` on one side and `i` of `w2` on the other.
fn pair_violated(bg: &BitGraph, small: &[Mask], w1: Mask, w2: Mask, i: usize) -> bool {
    if (w1.count_ones() as usize) < i || (w2.count_ones() as usize) < i {
        return false;
    }
    let cap = |v: u32| (v as usize).min(i);
    for &x in small.iter().take_while(|x| (x.count_ones() as usize) < i) {
        let mut states = BTreeSet::from([(cap((w1 & x).count_ones()), cap((w2 & x).count_ones()))]);
        for c in bg.components_in(bg.all() & !x) {
            let (a, b) = ((w1 & c).count_ones(), (w2 & c).count_ones());
            if a == 0 && b == 0 {
                continue;
            }
            states = states
                .iter()
                .flat_map(|&(p, q)| [((p + a as usize).min(i), q), (p, (q + b as usize).min(i))])
                .collect();
        }
        if states.contains(&(i, i)) {
            return true;
        }
    }
    false
}

fn first_separated_pair(
    bg: &BitGraph,
    small: &[Mask],
    w1: &BTreeSet<Vertex>,
    w2: &BTreeSet<Vertex>,
    i: usize,
) -> Option<(BTreeSet<Vertex>, BTreeSet<Vertex>)> {
    if !pair_violated(bg, small, bg.mask_of(w1), bg.mask_of(w2), i) {
        return None;
    }
    for z1 in w1.iter().copied().combinations(i) {
        let m1 = bg.mask_of(&z1.iter().copied().collect());
        for z2 in w2.iter().copied().combinations(i) {
            let m2 = bg.mask_of(&z2.iter().copied().collect());
            if separated(bg, small, m1, m2, i) {
                return Some((z1.into_iter().collect(), z2.into_iter().collect()));
            }
        }
    }
    None
}

fn tree_distances(tree: &Graph, from: &BTreeSet<Node>) -> BTreeMap<Node, usize> {
    let mut dist: BTreeMap<Node, usize> = from.iter().map(|&x| (x, 0)).collect();
    let mut queue: VecDeque<Node> = from.iter().copied().collect();
    while let Some(x) = queue.pop_front() {
        for &y in tree.neighbors(x) {
            if !dist.contains_key(&y) {
                dist.insert(y, dist[&x] + 1);
                queue.push_back(y);
            }
        }
    }
    dist
}

/// Splits `d` along a minimum (`z1`, `z2`)-cut.
///
/// Requires `|z1| = |z2| = i`, fewer than `i` disjoint (`z1`, `z2`)-paths in
/// `g`, and adhesion at least `i` on every edge of the tree path from `x1` to
/// `x2`. The tree is doubled; each copy keeps one side of the cut, with every
/// cut vertex routed toward the other copy. The cut minimises the total
/// distance of its vertices' anchor nodes from the tree path, ties broken by
/// the least sorted vertex list.
pub fn improvement_step(
    g: &Graph,
    s: &BTreeSet<Vertex>,
    d: &TreeDecomposition,
    x1: Node,
    x2: Node,
    z1: &BTreeSet<Vertex>,
    z2: &BTreeSet<Vertex>,
) -> Result<Improvement> {
    limits::check("improvement step vertices", g.n(), REFINE_MAX_N)?;
    if s.is_empty() {
        return Err(Error::precondition("S must be nonempty"));
    }
    validate_gs(g, s, d).map_err(|v| Error::invalid(format!("not a (G,S) decomposition: {v}")))?;
    if !d.tree().has_vertex(x1) || !d.tree().has_vertex(x2) {
        return Err(Error::invalid("unknown node"));
    }
    let i = z1.len();
    if i == 0 || z2.len() != i {
        return Err(Error::precondition("Z1 and Z2 must have the same positive size"));
    }
    if !z1.is_subset(d.bag(x1)) || !z2.is_subset(d.bag(x2)) {
        return Err(Error::precondition("Z1 and Z2 must lie in the bags of their nodes"));
    }
    let path = d.tree_path(x1, x2);
    if path.windows(2).any(|e| d.adhesion_of(e[0], e[1]) < i) {
        return Err(Error::precondition("an adhesion on the tree path is smaller than |Z1|"));
    }
    if max_disjoint_paths(g, z1, z2)?.count >= i {
        return Err(Error::precondition(format!("there are {i} disjoint paths")));
    }

    let bg = BitGraph::from_graph(g)?;
    let small = small_sets(&bg, i - 1);
    let (y1, y2, z1, z2) = closest_pair(&bg, &small, d, &path, i).unwrap_or((x1, x2, z1.clone(), z2.clone()));
    let on_path: BTreeSet<Node> = d.tree_path(y1, y2).into_iter().collect();
    let dist = tree_distances(d.tree(), &on_path);

    // anchor node z_u and its distance d_u for every vertex
    let mut nbhd: BTreeMap<Vertex, BTreeSet<Vertex>> = BTreeMap::new();
    for c in g.remove_vertices(s).components() {
        let nb = g.neighborhood(&c);
        for &u in &c {
            nbhd.insert(u, nb.clone());
        }
    }
    let anchor = |u: Vertex| -> Node {
        d.nodes()
            .filter(|&x| match nbhd.get(&u) {
                None => d.bag(x).contains(&u),
                Some(nb) => nb.is_subset(d.bag(x)),
            })
            .min_by_key(|x| (dist[x], *x))
            .expect("valid (G,S) decomposition")
    };
    let anchors: BTreeMap<Vertex, Node> = g.vertices().map(|u| (u, anchor(u))).collect();
    let cost = |u: Vertex| dist[&anchors[&u]] + usize::from(!s.contains(&u));

    let size = max_disjoint_paths(g, &z1, &z2)?.count;
    let (m1, m2) = (bg.mask_of(&z1), bg.mask_of(&z2));
    let mut best: Option<(usize, Vec<Vertex>)> = None;
    for x in g.vertices().combinations(size) {
        let xm = bg.mask_of(&x.iter().copied().collect());
        if bg.reach(m1 & !xm, bg.all() & !xm) & m2 & !xm != 0 {
            continue;
        }
        let total: usize = x.iter().map(|&u| cost(u)).sum();
        if best.as_ref().is_none_or(|(b, _)| total < *b) {
            best = Some((total, x));
        }
    }
    let x: BTreeSet<Vertex> = best.expect("a minimum cut exists").1.into_iter().collect();
    let rest = g.remove_vertices(&x);
    let mut side1 = BTreeSet::new();
    for c in rest.components() {
        if !c.is_disjoint(&z1) {
            side1.extend(c);
        }
    }
    let side2: BTreeSet<Vertex> = rest.vertex_set().difference(&side1).copied().collect();

    let nodes: Vec<Node> = d.nodes().collect();
    let idx: BTreeMap<Node, usize> = nodes.iter().enumerate().map(|(j, &z)| (z, j)).collect();
    let nn = nodes.len();
    let mut bags = BTreeMap::new();
    for (a, (side, target)) in [(&side1, y2), (&side2, y1)].into_iter().enumerate() {
        let routes: BTreeMap<Vertex, BTreeSet<Node>> =
            x.iter().map(|&u| (u, d.tree_path(anchors[&u], target).into_iter().collect())).collect();
        for (j, &z) in nodes.iter().enumerate() {
            let mut bag: BTreeSet<Vertex> =
                d.bag(z).iter().filter(|v| side.contains(v) || x.contains(v)).copied().collect();
            bag.extend(x.iter().filter(|u| routes[u].contains(&z)));
            bags.insert(a * nn + j, bag);
        }
    }
    let mut tree = Graph::edgeless(2 * nn);
    for (p, q) in d.tree().edges() {
        tree.insert_edge(idx[&p], idx[&q]);
        tree.insert_edge(nn + idx[&p], nn + idx[&q]);
    }
    let bridge = (idx[&y2], nn + idx[&y1]);
    tree.insert_edge(bridge.0, bridge.1);
    let decomposition = TreeDecomposition::new(tree, bags)?;
    let s_new: BTreeSet<Vertex> = s.union(&x).copied().collect();
    validate_gs(g, &s_new, &decomposition)
        .map_err(|v| Error::invalid(format!("internal: improved decomposition is invalid: {v}")))?;
    Ok(Improvement {
        s: s_new,
        decomposition,
        separation: Separation { x, side1, side2 },
        pair: (y1, y2),
        z1,
        z2,
        bridge,
    })
}

/// The violating pair of nodes on `path` at least tree distance, if any.
fn closest_pair(
    bg: &BitGraph,
    small: &[Mask],
    d: &TreeDecomposition,
    path: &[Node],
    i: usize,
) -> Option<(Node, Node, BTreeSet<Vertex>, BTreeSet<Vertex>)> {
    for len in 0..path.len() {
        for p in 0..path.len() - len {
            let (a, b) = (path[p], path[p + len]);
            if let Some((z1, z2)) = first_separated_pair(bg, small, d.bag(a), d.bag(b), i) {
                return Some((a, b, z1, z2));
            }
        }
    }
    None
}

/// Repeatedly removes the least leaf whose bag lies inside its neighbour's.
///
/// Validity, adhesion and width are preserved, and neither potential grows.
pub fn prune_leaves(d: &TreeDecomposition) -> TreeDecomposition {
    let mut d = d.clone();
    loop {
        let leaf = d.nodes().find(|&x| {
            d.node_count() > 1 && d.tree().degree(x) == 1 && {
                let y = *d.tree().neighbors(x).first().expect("leaf has a neighbour");
                d.bag(x).is_subset(d.bag(y))
            }
        });
        let Some(x) = leaf else { return d };
        let tree = d.tree().remove_vertex(x);
        let mut bags = d.bags().clone();
        bags.remove(&x);
        d = TreeDecomposition::new(tree, bags).expect("removing a leaf keeps a tree");
    }
}

/// A condition found violated by a driver.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RefineViolation {
    /// Fewer than `i` disjoint (`z1`, `z2`)-paths between two bags.
    Linkage {
        i: usize,
        x1: Node,
        x2: Node,
        z1: BTreeSet<Vertex>,
        z2: BTreeSet<Vertex>,
    },
    /// The bags on `x2`'s side of the edge `x1 x2` induce a disconnected graph.
    Disconnected { x1: Node, x2: Node },
    /// Too few paths through `x2`'s side once the adhesion is made edgeless.
    Branch {
        x1: Node,
        x2: Node,
        x3: Node,
        z1: BTreeSet<Vertex>,
        z2: BTreeSet<Vertex>,
    },
}

/// One driver iteration.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub violation: RefineViolation,
    pub potential_before: Potential,
    pub potential_after: Potential,
}

/// The trace as JSON lines.
pub fn trace_to_jsonl(trace: &[TraceEntry]) -> String {
    trace
        .iter()
        .map(|e| serde_json::to_string(e).expect("trace entries serialise") + "\n")
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnbreakableRun {
    pub decomposition: TreeDecomposition,
    pub trace: Vec<TraceEntry>,
}

/// A tree decomposition of adhesion below `k` in which any two `i`-subsets of
/// one bag (`i <= k`) are joined by `i` disjoint paths, and, for connected
/// `g`, the bags beyond any tree edge induce a connected graph.
pub fn unbreakable_decomposition(g: &Graph, k: usize) -> Result<UnbreakableRun> {
    limits::check("unbreakable decomposition vertices", g.n(), REFINE_MAX_N)?;
    limits::check("unbreakable decomposition k", k, REFINE_MAX_K)?;
    if k == 0 {
        return Err(Error::invalid("k must be positive"));
    }
    let n = g.n();
    let vs = g.vertex_set();
    let bg = BitGraph::from_graph(g)?;
    let small = small_sets(&bg, k - 1);
    let connected = g.is_connected();
    let mut d = TreeDecomposition::single(vs.clone());
    let mut trace = Vec::new();
    loop {
        let before = potential(&d, n, PotentialKind::Plain);
        let (violation, next) = if let Some((i, x, z1, z2)) = find_linkage(&bg, &small, &d, k) {
            let imp = improvement_step(g, &vs, &d, x, x, &z1, &z2)?;
            (RefineViolation::Linkage { i, x1: x, x2: x, z1, z2 }, imp.decomposition)
        } else if let Some((x1, x2)) = connected.then(|| find_disconnected(g, &d)).flatten() {
            (RefineViolation::Disconnected { x1, x2 }, split_side(g, &d, x1, x2))
        } else {
            return Ok(UnbreakableRun { decomposition: d, trace });
        };
        let next = prune_leaves(&next).renumbered(0).0;
        let after = potential(&next, n, PotentialKind::Plain);
        if after >= before {
            return Err(Error::invalid("internal: potential did not decrease"));
        }
        trace.push(TraceEntry { violation, potential_before: before, potential_after: after });
        if trace.len() > MAX_ITERATIONS {
            return Err(Error::invalid("internal: refinement did not terminate"));
        }
        d = next;
    }
}

fn find_linkage(
    bg: &BitGraph,
    small: &[Mask],
    d: &TreeDecomposition,
    k: usize,
) -> Option<(usize, Node, BTreeSet<Vertex>, BTreeSet<Vertex>)> {
    for i in 1..=k {
        for x in d.nodes() {
            if let Some((z1, z2)) = first_separated_pair(bg, small, d.bag(x), d.bag(x), i) {
                return Some((i, x, z1, z2));
            }
        }
    }
    None
}

/// Tree edges in both orientations, in increasing order.
fn oriented_edges(d: &TreeDecomposition) -> Vec<(Node, Node)> {
    let mut e: Vec<_> = d.tree().edges().into_iter().flat_map(|(x, y)| [(x, y), (y, x)]).collect();
    e.sort_unstable();
    e
}

fn side_union(d: &TreeDecomposition, x1: Node, x2: Node) -> (BTreeSet<Node>, BTreeSet<Vertex>) {
    let side = d.side(x2, x1);
    let union = side.iter().flat_map(|&z| d.bag(z).iter().copied()).collect();
    (side, union)
}

fn find_disconnected(g: &Graph, d: &TreeDecomposition) -> Option<(Node, Node)> {
    oriented_edges(d).into_iter().find(|&(x1, x2)| !g.is_connected_set(&side_union(d, x1, x2).1))
}

/// Duplicates `x2`'s side of `x1 x2`, one copy per part of the split of the
/// side's graph into its first component and the rest.
fn split_side(g: &Graph, d: &TreeDecomposition, x1: Node, x2: Node) -> TreeDecomposition {
    let (side, union) = side_union(d, x1, x2);
    let comps = g.induced(&union).components();
    let c1 = comps[0].clone();
    let c2: BTreeSet<Vertex> = union.difference(&c1).copied().collect();
    let off = d.nodes().last().expect("nonempty") + 1;
    let copy = |a: usize, z: Node| if side.contains(&z) { z + a * off } else { z };
    let mut tree = Graph::new();
    let mut bags = BTreeMap::new();
    for z in d.nodes() {
        if side.contains(&z) {
            for (a, c) in [(1, &c1), (2, &c2)] {
                tree.insert_vertex(copy(a, z));
                bags.insert(copy(a, z), d.bag(z).intersection(c).copied().collect());
            }
        } else {
            tree.insert_vertex(z);
            bags.insert(z, d.bag(z).clone());
        }
    }
    for (p, q) in d.tree().edges() {
        if (p, q) == (x1.min(x2), x1.max(x2)) {
            continue;
        }
        if side.contains(&p) {
            tree.insert_edge(copy(1, p), copy(1, q));
            tree.insert_edge(copy(2, p), copy(2, q));
        } else {
            tree.insert_edge(p, q);
        }
    }
    tree.insert_edge(x1, copy(1, x2));
    tree.insert_edge(x1, copy(2, x2));
    TreeDecomposition::new(tree, bags).expect("split keeps a tree")
}

/// The parameters `k`, `a` and `t` of a good decomposition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoodParams {
    pub k: usize,
    pub a: usize,
    pub t: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoodRun {
    pub s: BTreeSet<Vertex>,
    pub decomposition: TreeDecomposition,
    pub trace: Vec<TraceEntry>,
}

/// A good (`G`, `S'`) decomposition for some `S' ⊇ S`.
///
/// Starts from `initial` (or the single bag `S` when `|S| <= t`), which must
/// have bags of size at most `t` and adhesion at most `a`. Linkage violations
/// between bags are repaired with the improvement step; branch violations by
/// improving the far side of the edge and subdividing the new cut edge with a
/// bag holding both `Z` sets and the cut.
pub fn good_gs_decomposition(
    g: &Graph,
    s: &BTreeSet<Vertex>,
    params: GoodParams,
    initial: Option<&TreeDecomposition>,
) -> Result<GoodRun> {
    let GoodParams { k, a, t } = params;
    limits::check("good decomposition vertices", g.n(), GOOD_MAX_N)?;
    limits::check("good decomposition k", k, REFINE_MAX_K)?;
    if k == 0 || t == 0 || a < k {
        return Err(Error::precondition("need k, t positive and a >= k"));
    }
    let mut d = match initial {
        Some(d) => d.clone(),
        None if s.len() <= t => TreeDecomposition::single(s.clone()),
        None => return Err(Error::precondition("no initial decomposition and |S| > t")),
    };
    validate_gs(g, s, &d).map_err(|v| Error::invalid(format!("initial decomposition: {v}")))?;
    if d.max_bag_size() > t || d.adhesion() > a {
        return Err(Error::precondition("initial decomposition too wide or adhesion too large"));
    }
    let n = g.n();
    let bg = BitGraph::from_graph(g)?;
    let small = small_sets(&bg, k - 1);
    let mut s = s.clone();
    let mut trace = Vec::new();
    loop {
        let before = potential(&d, n, PotentialKind::Filtered(k));
        let (violation, s_next, next) = if let Some((x1, x2, z1, z2)) = find_far_linkage(&bg, &small, &d, k) {
            let imp = improvement_step(g, &s, &d, x1, x2, &z1, &z2)?;
            (RefineViolation::Linkage { i: k, x1, x2, z1, z2 }, imp.s, imp.decomposition)
        } else if let Some(v) = find_branch(g, &s, &d, k)? {
            let RefineViolation::Branch { x1, x2, ref z1, ref z2, .. } = v else { unreachable!() };
            let (s_next, next) = subdivide(g, &s, &d, x1, x2, z1, z2)?;
            (v, s_next, next)
        } else {
            return Ok(GoodRun { s, decomposition: d, trace });
        };
        let next = prune_leaves(&next).renumbered(0).0;
        let after = potential(&next, n, PotentialKind::Filtered(k));
        if after >= before {
            return Err(Error::invalid("internal: filtered potential did not decrease"));
        }
        trace.push(TraceEntry { violation, potential_before: before, potential_after: after });
        if trace.len() > MAX_ITERATIONS {
            return Err(Error::invalid("internal: refinement did not terminate"));
        }
        s = s_next;
        d = next;
    }
}

/// Whether the pair `x1`, `x2` is excused from the linkage condition.
fn linkage_excused(d: &TreeDecomposition, x1: Node, x2: Node, path: &[Node], k: usize) -> bool {
    path.windows(2).any(|e| d.adhesion_of(e[0], e[1]) < k)
        || (x1 == x2
            && !is_large(d.bag(x1).len(), k)
            && d.tree().neighbors(x1).iter().all(|&y| d.adhesion_of(x1, y) < k))
}

fn find_far_linkage(
    bg: &BitGraph,
    small: &[Mask],
    d: &TreeDecomposition,
    k: usize,
) -> Option<(Node, Node, BTreeSet<Vertex>, BTreeSet<Vertex>)> {
    let nodes: Vec<Node> = d.nodes().collect();
    for (p, &x1) in nodes.iter().enumerate() {
        for &x2 in &nodes[p..] {
            let path = d.tree_path(x1, x2);
            if linkage_excused(d, x1, x2, &path, k) {
                continue;
            }
            if let Some((z1, z2)) = first_separated_pair(bg, small, d.bag(x1), d.bag(x2), k) {
                return Some((x1, x2, z1, z2));
            }
        }
    }
    None
}

/// The graph on `x2`'s side of `x1 x2`: the side's bags, the components of
/// `G - S` attached to it beyond the adhesion, and no edges inside the adhesion.
pub fn branch_graph(g: &Graph, s: &BTreeSet<Vertex>, d: &TreeDecomposition, x1: Node, x2: Node) -> Graph {
    let (_, union) = side_union(d, x1, x2);
    let adhesion: BTreeSet<Vertex> = d.bag(x1).intersection(d.bag(x2)).copied().collect();
    let mut verts = union.clone();
    for c in g.remove_vertices(s).components() {
        let nb = g.neighborhood(&c);
        if nb.is_subset(&union) && !nb.is_subset(&adhesion) {
            verts.extend(c);
        }
    }
    let inner: Vec<(Vertex, Vertex)> = adhesion.iter().copied().tuple_combinations().collect();
    g.induced(&verts).remove_edges(&inner)
}

/// Oriented edges `x1 x2` of small adhesion next to a large adhesion at
/// `x2`, with that neighbour `x3`.
fn branch_edges(d: &TreeDecomposition, k: usize) -> Vec<(Node, Node, Node)> {
    oriented_edges(d)
        .into_iter()
        .filter(|&(x1, x2)| d.adhesion_of(x1, x2) < k)
        .filter_map(|(x1, x2)| {
            d.tree()
                .neighbors(x2)
                .iter()
                .find(|&&x3| x3 != x1 && d.adhesion_of(x2, x3) >= k)
                .map(|&x3| (x1, x2, x3))
        })
        .collect()
}

fn find_branch(g: &Graph, s: &BTreeSet<Vertex>, d: &TreeDecomposition, k: usize) -> Result<Option<RefineViolation>> {
    for (x1, x2, x3) in branch_edges(d, k) {
        let adhesion: BTreeSet<Vertex> = d.bag(x1).intersection(d.bag(x2)).copied().collect();
        let g0 = branch_graph(g, s, d, x1, x2);
        for i in 1..=adhesion.len() {
            for z1 in adhesion.iter().copied().combinations(i) {
                for z2 in adhesion.iter().copied().combinations(i) {
                    let (z1, z2): (BTreeSet<_>, BTreeSet<_>) = (z1.iter().copied().collect(), z2.into_iter().collect());
                    if max_disjoint_paths(&g0, &z1, &z2)?.count < i {
                        return Ok(Some(RefineViolation::Branch { x1, x2, x3, z1, z2 }));
                    }
                }
            }
        }
    }
    Ok(None)
}

fn subdivide(
    g: &Graph,
    s: &BTreeSet<Vertex>,
    d: &TreeDecomposition,
    x1: Node,
    x2: Node,
    z1: &BTreeSet<Vertex>,
    z2: &BTreeSet<Vertex>,
) -> Result<(BTreeSet<Vertex>, TreeDecomposition)> {
    let adhesion: BTreeSet<Vertex> = d.bag(x1).intersection(d.bag(x2)).copied().collect();
    let pad: BTreeSet<Vertex> = adhesion.iter().filter(|v| !z1.contains(v) && !z2.contains(v)).copied().collect();
    let z1: BTreeSet<Vertex> = z1.union(&pad).copied().collect();
    let z2: BTreeSet<Vertex> = z2.union(&pad).copied().collect();
    let g0 = branch_graph(g, s, d, x1, x2);
    let v0 = g0.vertex_set();
    let s0: BTreeSet<Vertex> = s.intersection(&v0).copied().collect();
    let side = d.side(x2, x1);
    let d0 = d.restrict(&side)?;
    let imp = improvement_step(&g0, &s0, &d0, x2, x2, &z1, &z2)?;
    let (b1, b2) = imp.bridge;
    let cut: BTreeSet<Vertex> = imp.decomposition.bag(b1).intersection(imp.decomposition.bag(b2)).copied().collect();

    let off = d.nodes().last().expect("nonempty") + 1;
    let z0 = off + imp.decomposition.nodes().last().expect("nonempty") + 1;
    let mut tree = Graph::new();
    let mut bags = BTreeMap::new();
    for x in d.nodes().filter(|x| !side.contains(x)) {
        tree.insert_vertex(x);
        bags.insert(x, d.bag(x).clone());
    }
    for (p, q) in d.tree().edges() {
        if !side.contains(&p) && !side.contains(&q) {
            tree.insert_edge(p, q);
        }
    }
    for (x, b) in imp.decomposition.bags() {
        tree.insert_vertex(off + x);
        bags.insert(off + x, b.clone());
    }
    for (p, q) in imp.decomposition.tree().edges() {
        if (p, q) != (b1.min(b2), b1.max(b2)) {
            tree.insert_edge(off + p, off + q);
        }
    }
    tree.insert_vertex(z0);
    bags.insert(z0, z1.iter().chain(&z2).chain(&cut).copied().collect());
    tree.insert_edge(off + b1, z0);
    tree.insert_edge(z0, off + b2);
    tree.insert_edge(x1, z0);
    let next = TreeDecomposition::new(tree, bags)?;
    let s_next: BTreeSet<Vertex> = s.difference(&v0).chain(&imp.s).copied().collect();
    validate_gs(g, &s_next, &next)
        .map_err(|v| Error::invalid(format!("internal: subdivided decomposition is invalid: {v}")))?;
    Ok((s_next, next))
}

/// Pairs `(Z1, Z2)` of `i`-subsets of `w1` and `w2`; unordered when the sets
/// coincide.
fn z_pairs(w1: &BTreeSet<Vertex>, w2: &BTreeSet<Vertex>, i: usize) -> Vec<(BTreeSet<Vertex>, BTreeSet<Vertex>)> {
    let c1: Vec<BTreeSet<Vertex>> = w1.iter().copied().combinations(i).map(|c| c.into_iter().collect()).collect();
    let c2: Vec<BTreeSet<Vertex>> = w2.iter().copied().combinations(i).map(|c| c.into_iter().collect()).collect();
    let same = w1 == w2;
    let mut out = Vec::new();
    for (p, a) in c1.iter().enumerate() {
        for (q, b) in c2.iter().enumerate() {
            if !same || p <= q {
                out.push((a.clone(), b.clone()));
            }
        }
    }
    out
}

fn linked(g: &Graph, z1: &BTreeSet<Vertex>, z2: &BTreeSet<Vertex>) -> std::result::Result<bool, String> {
    let m = max_disjoint_paths(g, z1, z2).map_err(|e| e.to_string())?;
    check_paths(g, z1, z2, &m.paths)?;
    Ok(m.count >= z1.len())
}

/// Checks every condition of [`unbreakable_decomposition`] by enumeration.
pub fn verify_unbreakable(g: &Graph, k: usize, d: &TreeDecomposition) -> std::result::Result<(), String> {
    validate(g, d).map_err(|v| v.to_string())?;
    if d.adhesion() + 1 > k.max(1) {
        return Err(format!("adhesion {} is not below {k}", d.adhesion()));
    }
    for i in 1..=k {
        for x in d.nodes() {
            for (z1, z2) in z_pairs(d.bag(x), d.bag(x), i) {
                if !linked(g, &z1, &z2)? {
                    return Err(format!("node {x}: fewer than {i} disjoint paths between {z1:?} and {z2:?}"));
                }
            }
        }
    }
    if g.is_connected() {
        for (x1, x2) in oriented_edges(d) {
            if !g.is_connected_set(&side_union(d, x1, x2).1) {
                return Err(format!("bags beyond edge {x1}-{x2} induce a disconnected graph"));
            }
        }
    }
    Ok(())
}

/// Checks every conclusion of [`good_gs_decomposition`] by enumeration:
/// `S ⊆ S'`, validity, adhesion, width, the linkage between bags and the
/// linkage across small adhesions.
pub fn verify_good(
    g: &Graph,
    s: &BTreeSet<Vertex>,
    params: GoodParams,
    s_prime: &BTreeSet<Vertex>,
    d: &TreeDecomposition,
) -> std::result::Result<(), String> {
    let GoodParams { k, a, t } = params;
    if !s.is_subset(s_prime) {
        return Err("S' does not contain S".into());
    }
    validate_gs(g, s_prime, d).map_err(|v| v.to_string())?;
    if d.adhesion() > a {
        return Err(format!("adhesion {} exceeds {a}", d.adhesion()));
    }
    let w = d.max_bag_size();
    if w > 0 && 2 * (w - 1) >= (2 * t).max(3 * (k - 1)) {
        return Err(format!("a bag of size {w} is too large"));
    }
    let nodes: Vec<Node> = d.nodes().collect();
    for (p, &x1) in nodes.iter().enumerate() {
        for &x2 in &nodes[p..] {
            let path = d.tree_path(x1, x2);
            if linkage_excused(d, x1, x2, &path, k) {
                continue;
            }
            for (z1, z2) in z_pairs(d.bag(x1), d.bag(x2), k) {
                if !linked(g, &z1, &z2)? {
                    return Err(format!("nodes {x1},{x2}: {z1:?} and {z2:?} are not linked"));
                }
            }
        }
    }
    for (x1, x2, _) in branch_edges(d, k) {
        let adhesion: BTreeSet<Vertex> = d.bag(x1).intersection(d.bag(x2)).copied().collect();
        let g0 = branch_graph(g, s_prime, d, x1, x2);
        for i in 1..=adhesion.len() {
            for z1 in adhesion.iter().copied().combinations(i) {
                for z2 in adhesion.iter().copied().combinations(i) {
                    let (z1, z2): (BTreeSet<_>, BTreeSet<_>) = (z1.iter().copied().collect(), z2.into_iter().collect());
                    if !linked(&g0, &z1, &z2)? {
                        return Err(format!("edge {x1}-{x2}: {z1:?} and {z2:?} are not linked beyond it"));
                    }
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{complete, path};

    fn set(v: &[Vertex]) -> BTreeSet<Vertex> {
        v.iter().copied().collect()
    }

    #[test]
    fn potential_counts() {
        let d = TreeDecomposition::path(vec![set(&[0, 1]), set(&[1, 2])]).unwrap();
        let p = potential(&d, 3, PotentialKind::Plain);
        assert_eq!(p.get(2), 2);
        assert_eq!(p, Potential(vec![0, 2, 0, 0]));
        assert_eq!(potential(&d, 3, PotentialKind::Filtered(2)).get(2), 2);
        // 2 <= 3(3-1)/2 and the adhesion is 1 < 3
        assert_eq!(potential(&d, 3, PotentialKind::Filtered(3)).get(2), 0);
    }

    #[test]
    fn improvement_on_two_isolated_vertices() {
        let g = Graph::edgeless(2);
        let d = TreeDecomposition::single(set(&[0, 1]));
        let imp = improvement_step(&g, &set(&[0, 1]), &d, 0, 0, &set(&[0]), &set(&[1])).unwrap();
        assert!(imp.separation.x.is_empty());
        let (b1, b2) = imp.bridge;
        assert_eq!(imp.decomposition.bag(b1), &set(&[0]));
        assert_eq!(imp.decomposition.bag(b2), &set(&[1]));
        let before = potential(&d, 2, PotentialKind::Plain);
        assert!(potential(&imp.decomposition, 2, PotentialKind::Plain) < before);
    }

    #[test]
    fn improvement_on_p3() {
        let g = path(3);
        let d = TreeDecomposition::single(set(&[0, 1, 2]));
        let imp = improvement_step(&g, &g.vertex_set(), &d, 0, 0, &set(&[0, 1]), &set(&[1, 2])).unwrap();
        assert_eq!(imp.separation.x, set(&[1]));
        assert!(imp.separation.is_valid(&g));
        let (b1, b2) = imp.bridge;
        let dd = &imp.decomposition;
        assert!(set(&[0, 1]).is_subset(dd.bag(b1)) && set(&[1, 2]).is_subset(dd.bag(b2)));
        assert_eq!(dd.adhesion_of(b1, b2), 1);
    }

    #[test]
    fn improvement_rejects_linked_sets() {
        let g = path(2);
        let d = TreeDecomposition::single(set(&[0, 1]));
        let r = improvement_step(&g, &g.vertex_set(), &d, 0, 0, &set(&[0]), &set(&[1]));
        assert!(matches!(r, Err(Error::Precondition(_))));
    }

    #[test]
    fn unbreakable_two_triangles() {
        let g = Graph::from_edges(5, &[(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (2, 4)]).unwrap();
        let run = unbreakable_decomposition(&g, 2).unwrap();
        verify_unbreakable(&g, 2, &run.decomposition).unwrap();
        assert!(run.decomposition.node_count() >= 2);
        assert!(run.trace.iter().all(|e| e.potential_after < e.potential_before));
    }

    #[test]
    fn unbreakable_k5_is_one_bag() {
        let g = complete(5);
        for k in 1..=3 {
            let run = unbreakable_decomposition(&g, k).unwrap();
            assert_eq!(run.decomposition.node_count(), 1);
            assert!(run.trace.is_empty());
        }
    }

    #[test]
    fn unbreakable_path_k1_keeps_connected_bag() {
        let g = path(4);
        let run = unbreakable_decomposition(&g, 1).unwrap();
        verify_unbreakable(&g, 1, &run.decomposition).unwrap();
    }

    #[test]
    fn good_on_p4() {
        let g = path(4);
        let params = GoodParams { k: 2, a: 2, t: 2 };
        let init = TreeDecomposition::path(vec![set(&[0, 1]), set(&[1, 2]), set(&[2, 3])]).unwrap();
        let run = good_gs_decomposition(&g, &g.vertex_set(), params, Some(&init)).unwrap();
        verify_good(&g, &g.vertex_set(), params, &run.s, &run.decomposition).unwrap();
    }

    #[test]
    fn good_single_bag_unchanged_when_fine() {
        let g = complete(3);
        let params = GoodParams { k: 2, a: 2, t: 3 };
        let run = good_gs_decomposition(&g, &g.vertex_set(), params, None).unwrap();
        assert!(run.trace.is_empty());
        assert_eq!(run.decomposition.node_count(), 1);
    }
}
