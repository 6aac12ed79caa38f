//! Minor models, k-ladders, and the extraction of a ladder from disjoint
//! paths crossed by many disjoint connected subgraphs.
//!
//! A k-ladder with `l` columns has vertex `(i, j)` numbered `i * l + j`, the
//! same numbering as [`grid`](crate::generators::grid). Its length is
//! `l - 1`.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::bits::{bit, ones, BitGraph, Mask};
use crate::canon::canonical_form;
use crate::error::{Error, Result};
use crate::generators::{cartesian_product, enumerate_labelled_trees, path, product_vertex};
use crate::graph::{Graph, Vertex};
use crate::limits;

/// Default cap on the pattern order for [`find_minor_model`].
pub const MINOR_PATTERN_MAX: usize = 6;
/// Default cap on the host order for the minor search.
pub const MINOR_HOST_MAX: usize = 14;
/// Default caps on `k` and `l` for [`has_minor_tree_times_path`].
pub const TREE_PATH_MAX_K: usize = 3;
pub const TREE_PATH_MAX_L: usize = 3;

/// Branch sets `B_x` in `host`, one per vertex `x` of `pattern`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinorModel {
    pub pattern: Graph,
    pub host: Graph,
    pub branch_sets: BTreeMap<Vertex, BTreeSet<Vertex>>,
}

impl MinorModel {
    /// The model of `g` in itself by singletons.
    pub fn identity(g: &Graph) -> Self {
        MinorModel {
            pattern: g.clone(),
            host: g.clone(),
            branch_sets: g.vertices().map(|v| (v, BTreeSet::from([v]))).collect(),
        }
    }

    pub fn validate(&self) -> std::result::Result<(), String> {
        validate_model(self)
    }
}

/// Checks that branch sets are nonempty, disjoint and connected, and that
/// every pattern edge is realised by a host edge.
pub fn validate_model(m: &MinorModel) -> std::result::Result<(), String> {
    if let Some(x) = m.pattern.vertices().find(|x| !m.branch_sets.contains_key(x)) {
        return Err(format!("pattern vertex {x} has no branch set"));
    }
    if let Some(x) = m.branch_sets.keys().find(|x| !m.pattern.has_vertex(**x)) {
        return Err(format!("{x} is not a pattern vertex"));
    }
    let mut owner: BTreeMap<Vertex, Vertex> = BTreeMap::new();
    for (&x, b) in &m.branch_sets {
        if b.is_empty() {
            return Err(format!("branch set of {x} is empty"));
        }
        for &v in b {
            if !m.host.has_vertex(v) {
                return Err(format!("branch set of {x} contains {v}, which is not a host vertex"));
            }
            if let Some(y) = owner.insert(v, x) {
                return Err(format!("branch sets of {y} and {x} share {v}"));
            }
        }
        if !m.host.is_connected_set(b) {
            return Err(format!("branch set of {x} is not connected"));
        }
    }
    for (x, y) in m.pattern.edges() {
        let realised = m.branch_sets[&x]
            .iter()
            .any(|&u| m.host.neighbors(u).iter().any(|w| owner.get(w) == Some(&y)));
        if !realised {
            return Err(format!("pattern edge {x}-{y} is not realised"));
        }
    }
    Ok(())
}

/// A model of `h` in `g`, or `None` when `h` is not a minor of `g`.
pub fn find_minor_model(h: &Graph, g: &Graph) -> Result<Option<MinorModel>> {
    limits::check("find_minor_model pattern", h.n(), MINOR_PATTERN_MAX)?;
    limits::check("find_minor_model host", g.n(), MINOR_HOST_MAX)?;
    search(h, g)
}

fn cyclomatic(g: &Graph) -> usize {
    g.m() + g.components().len() - g.n()
}

/// Exhaustive branch-set search. Pattern vertices are placed one at a time,
/// each as a connected set of unused host vertices touching the branch sets
/// of its placed neighbours.
fn search(h: &Graph, g: &Graph) -> Result<Option<MinorModel>> {
    if h.n() > g.n() || h.m() > g.m() || cyclomatic(h) > cyclomatic(g) {
        return Ok(None);
    }
    let host = BitGraph::from_graph(g)?;
    let pat = BitGraph::from_graph(h)?;
    let order = placement_order(&pat);
    let mut s = Search { branch: vec![0; pat.n()], placed: 0, host, pat, order };
    if !s.place(0, 0) {
        return Ok(None);
    }
    let branch_sets = (0..s.pat.n()).map(|x| (s.pat.ids[x], s.host.set_of(s.branch[x]))).collect();
    Ok(Some(MinorModel { pattern: h.clone(), host: g.clone(), branch_sets }))
}

/// Highest degree first, then always the vertex with most placed neighbours
/// (ties by degree, then position).
fn placement_order(pat: &BitGraph) -> Vec<usize> {
    let n = pat.n();
    let deg = |x: usize| pat.adj[x].count_ones();
    let mut placed: Mask = 0;
    let mut order = Vec::with_capacity(n);
    for _ in 0..n {
        let x = (0..n)
            .filter(|&x| placed & bit(x) == 0)
            .max_by_key(|&x| ((pat.adj[x] & placed).count_ones(), deg(x), std::cmp::Reverse(x)))
            .expect("an unplaced vertex");
        placed |= bit(x);
        order.push(x);
    }
    order
}

struct Search {
    host: BitGraph,
    pat: BitGraph,
    order: Vec<usize>,
    branch: Vec<Mask>,
    placed: Mask,
}

impl Search {
    fn place(&mut self, depth: usize, used: Mask) -> bool {
        if depth == self.order.len() {
            return true;
        }
        let x = self.order[depth];
        let avail = self.host.all() & !used;
        let remaining = self.order.len() - depth - 1;
        let Some(max_size) = (avail.count_ones() as usize).checked_sub(remaining) else {
            return false;
        };
        let needs: Vec<Mask> =
            ones(self.pat.adj[x] & self.placed).map(|y| self.host.neighborhood(self.branch[y])).collect();
        let seeds = needs.first().map_or(avail, |&m| m & avail);
        let mut forbidden = 0;
        for s in ones(seeds) {
            let ctx = Grow { x, depth, used, allowed: avail & !forbidden, max_size, needs: &needs };
            if self.grow(&ctx, bit(s), 0) {
                return true;
            }
            forbidden |= bit(s);
        }
        false
    }

    /// Enumerates each connected superset of `set` inside `ctx.allowed` and
    /// avoiding `forb` exactly once.
    fn grow(&mut self, ctx: &Grow<'_>, set: Mask, forb: Mask) -> bool {
        if ctx.needs.iter().all(|&n| n & set != 0) {
            self.branch[ctx.x] = set;
            self.placed |= bit(ctx.x);
            let used = ctx.used | set;
            if self.feasible(used) && self.place(ctx.depth + 1, used) {
                return true;
            }
            self.placed &= !bit(ctx.x);
            self.branch[ctx.x] = 0;
        }
        if set.count_ones() as usize >= ctx.max_size {
            return false;
        }
        let cand = self.host.neighborhood(set) & ctx.allowed & !forb;
        let mut f = forb;
        for w in ones(cand) {
            if self.grow(ctx, set | bit(w), f) {
                return true;
            }
            f |= bit(w);
        }
        false
    }

    /// Every component of the unplaced pattern must fit into one component
    /// of the unused host that touches all the branch sets it needs.
    fn feasible(&self, used: Mask) -> bool {
        let comps = self.host.components_in(self.host.all() & !used);
        let unplaced = self.pat.all() & !self.placed;
        self.pat.components_in(unplaced).into_iter().all(|k| {
            let needs: Vec<Mask> = ones(k)
                .flat_map(|x| ones(self.pat.adj[x] & self.placed))
                .map(|y| self.host.neighborhood(self.branch[y]))
                .collect();
            comps.iter().any(|&c| c.count_ones() >= k.count_ones() && needs.iter().all(|&n| n & c != 0))
        })
    }
}

struct Grow<'a> {
    x: usize,
    depth: usize,
    used: Mask,
    allowed: Mask,
    max_size: usize,
    needs: &'a [Mask],
}

/// A graph on `[k] x [l]` whose rows are induced paths in column order and
/// whose columns induce connected subgraphs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KLadder {
    pub k: usize,
    pub l: usize,
    pub graph: Graph,
}

impl KLadder {
    pub fn new(k: usize, l: usize, graph: Graph) -> Result<Self> {
        let lad = KLadder { k, l, graph };
        lad.validate().map_err(Error::invalid)?;
        Ok(lad)
    }

    pub fn vertex(&self, i: usize, j: usize) -> Vertex {
        i * self.l + j
    }

    /// Number of columns minus one.
    pub fn length(&self) -> usize {
        self.l.saturating_sub(1)
    }

    pub fn row(&self, i: usize) -> BTreeSet<Vertex> {
        (0..self.l).map(|j| self.vertex(i, j)).collect()
    }

    pub fn column(&self, j: usize) -> BTreeSet<Vertex> {
        (0..self.k).map(|i| self.vertex(i, j)).collect()
    }

    pub fn validate(&self) -> std::result::Result<(), String> {
        if self.k == 0 || self.l == 0 {
            return Err("a ladder needs at least one row and one column".into());
        }
        if !self.graph.vertices().eq(0..self.k * self.l) {
            return Err(format!("vertex set is not 0..{}", self.k * self.l));
        }
        for i in 0..self.k {
            let row = self.graph.induced(&self.row(i));
            let is_path = row.m() + 1 == self.l
                && (1..self.l).all(|j| row.has_edge(self.vertex(i, j - 1), self.vertex(i, j)));
            if !is_path {
                return Err(format!("row {i} is not an induced path in column order"));
            }
        }
        if let Some(j) = (0..self.l).find(|&j| !self.graph.is_connected_set(&self.column(j))) {
            return Err(format!("column {j} is not connected"));
        }
        Ok(())
    }
}

/// The ladder whose column `j` realises `column_trees[j]`, a tree on `0..k`
/// whose vertex `i` is row `i`.
pub fn make_k_ladder(k: usize, l: usize, column_trees: &[Graph]) -> Result<KLadder> {
    if k == 0 || l == 0 {
        return Err(Error::precondition("k and l must be positive"));
    }
    if column_trees.len() != l {
        return Err(Error::invalid(format!("{} column trees for {l} columns", column_trees.len())));
    }
    let mut edges = Vec::new();
    for i in 0..k {
        edges.extend((1..l).map(|j| (i * l + j - 1, i * l + j)));
    }
    for (j, t) in column_trees.iter().enumerate() {
        if !t.is_tree() || !t.vertices().eq(0..k) {
            return Err(Error::invalid(format!("column tree {j} is not a tree on 0..{k}")));
        }
        edges.extend(t.edges().into_iter().map(|(a, b)| (a * l + j, b * l + j)));
    }
    KLadder::new(k, l, Graph::from_edges(k * l, &edges)?)
}

/// Columns guaranteeing a repeated spanning-tree shape `l` times:
/// `k^(k-2) (l-1) + 1`.
pub fn cayley_bound(k: usize, l: usize) -> usize {
    let trees = if k <= 2 { 1 } else { k.pow(k as u32 - 2) };
    trees * l.saturating_sub(1) + 1
}

/// Least spanning tree of column `j` in row indices, by Kruskal over the
/// lexicographically sorted column edges.
fn column_shape(lad: &KLadder, j: usize) -> Vec<(usize, usize)> {
    let mut edges: Vec<(usize, usize)> = Vec::new();
    for a in 0..lad.k {
        for b in a + 1..lad.k {
            if lad.graph.has_edge(lad.vertex(a, j), lad.vertex(b, j)) {
                edges.push((a, b));
            }
        }
    }
    let mut parent: Vec<usize> = (0..lad.k).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    let mut tree = Vec::new();
    for (a, b) in edges {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[ra] = rb;
            tree.push((a, b));
        }
    }
    tree
}

/// A tree `T` on `0..k` and a model of `T □ P_l` in the ladder, from `l`
/// columns sharing one spanning-tree shape. Fails when no shape repeats
/// `l` times, which cannot happen from [`cayley_bound`] columns on.
pub fn tree_times_path_from_ladder(lad: &KLadder, l: usize) -> Result<(Graph, MinorModel)> {
    lad.validate().map_err(Error::invalid)?;
    if l == 0 {
        return Err(Error::precondition("l must be positive"));
    }
    let mut groups: BTreeMap<Vec<(usize, usize)>, Vec<usize>> = BTreeMap::new();
    let mut chosen = None;
    for j in 0..lad.l {
        let cols = groups.entry(column_shape(lad, j)).or_default();
        cols.push(j);
        if cols.len() == l {
            chosen = Some(j);
            break;
        }
    }
    let Some(last) = chosen else {
        return Err(Error::precondition(format!(
            "ladder too short: {} columns, no spanning-tree shape occurs {l} times (guaranteed from {})",
            lad.l,
            cayley_bound(lad.k, l)
        )));
    };
    let (shape, cols) = groups.into_iter().find(|(_, c)| c.last() == Some(&last)).expect("chosen group");
    let t = Graph::from_edges(lad.k, &shape)?;
    let p = path(l);
    let pattern = cartesian_product(&t, &p);
    let mut branch_sets = BTreeMap::new();
    for (q, &start) in cols.iter().enumerate() {
        let end = cols.get(q + 1).map_or(start + 1, |&c| c);
        for i in 0..lad.k {
            let set = (start..end).map(|j| lad.vertex(i, j)).collect();
            branch_sets.insert(product_vertex(&t, &p, i, q)?, set);
        }
    }
    let model = MinorModel { pattern, host: lad.graph.clone(), branch_sets };
    model.validate().map_err(|e| Error::invalid(format!("internal: {e}")))?;
    Ok((t, model))
}

/// A monotone subsequence, as increasing positions in the input.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "arm", content = "indices", rename_all = "snake_case")]
pub enum Monotone {
    Increasing(Vec<usize>),
    Decreasing(Vec<usize>),
}

/// A longest increasing and a longest decreasing subsequence of `seq`, as
/// index lists. Earliest-ending chains win ties.
pub(crate) fn longest_monotone<T: Ord>(seq: &[T]) -> (Vec<usize>, Vec<usize>) {
    let chain = |better: &dyn Fn(&T, &T) -> bool| {
        let n = seq.len();
        let mut len = vec![1usize; n];
        let mut prev = vec![None; n];
        for i in 0..n {
            for j in 0..i {
                if better(&seq[j], &seq[i]) && len[j] + 1 > len[i] {
                    len[i] = len[j] + 1;
                    prev[i] = Some(j);
                }
            }
        }
        let Some(mut end) = (0..n).rev().max_by_key(|&i| len[i]) else {
            return Vec::new();
        };
        let mut out = vec![end];
        while let Some(p) = prev[end] {
            out.push(p);
            end = p;
        }
        out.reverse();
        out
    };
    (chain(&|a, b| a < b), chain(&|a, b| a > b))
}

/// An increasing subsequence of length `r` or a decreasing one of length
/// `s`; one exists once `perm` has at least `(r-1)(s-1)+1` entries.
pub fn erdos_szekeres(perm: &[i64], r: usize, s: usize) -> Result<Monotone> {
    if r == 0 || s == 0 {
        return Err(Error::precondition("r and s must be positive"));
    }
    if perm.iter().collect::<BTreeSet<_>>().len() != perm.len() {
        return Err(Error::invalid("entries must be distinct"));
    }
    let (inc, dec) = longest_monotone(perm);
    if inc.len() >= r {
        return Ok(Monotone::Increasing(inc[..r].to_vec()));
    }
    if dec.len() >= s {
        return Ok(Monotone::Decreasing(dec[..s].to_vec()));
    }
    Err(Error::precondition(format!(
        "no increasing subsequence of length {r} and no decreasing one of length {s} \
         (length {} is below {})",
        perm.len(),
        (r - 1) * (s - 1) + 1
    )))
}

/// Checks that `m` is a monotone index selection of `perm`.
pub fn check_monotone(perm: &[i64], m: &Monotone) -> std::result::Result<(), String> {
    let (idx, inc) = match m {
        Monotone::Increasing(i) => (i, true),
        Monotone::Decreasing(i) => (i, false),
    };
    if idx.iter().any(|&i| i >= perm.len()) || idx.windows(2).any(|w| w[0] >= w[1]) {
        return Err("indices are not increasing positions".into());
    }
    let ok = idx.windows(2).all(|w| (perm[w[0]] < perm[w[1]]) == inc);
    if ok {
        Ok(())
    } else {
        Err("values are not monotone".into())
    }
}

/// `k` leaves of a tree, or a path on `k` vertices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "arm", content = "vertices", rename_all = "snake_case")]
pub enum TreeArm {
    Leaves(Vec<Vertex>),
    Path(Vec<Vertex>),
}

/// One arm always exists from `(k-1)(k-2)+2` vertices on: with fewer than
/// `k` leaves, the leaf-to-root paths cover the tree and one of them is long.
pub fn tree_leaves_or_path(t: &Graph, k: usize) -> Result<TreeArm> {
    if !t.is_tree() {
        return Err(Error::invalid("not a tree"));
    }
    if k == 0 {
        return Err(Error::precondition("k must be positive"));
    }
    let leaves: Vec<Vertex> = t.vertices().filter(|&v| t.degree(v) == 1).collect();
    if leaves.len() >= k {
        return Ok(TreeArm::Leaves(leaves[..k].to_vec()));
    }
    let root = t.vertices().next().expect("nonempty");
    let none = BTreeSet::new();
    let mut best = vec![root];
    for &x in &leaves {
        let p = t.shortest_path(x, root, &none).expect("trees are connected");
        if p.len() > best.len() {
            best = p;
        }
    }
    if best.len() < k {
        // below the guaranteed size: fall back on a longest path
        for &x in &leaves {
            for &y in &leaves {
                let p = t.shortest_path(x, y, &none).expect("trees are connected");
                if p.len() > best.len() {
                    best = p;
                }
            }
        }
    }
    if best.len() >= k {
        best.truncate(k);
        return Ok(TreeArm::Path(best));
    }
    Err(Error::precondition(format!(
        "tree on {} vertices has fewer than {k} leaves and no path on {k} vertices",
        t.n()
    )))
}

/// Selected subgraphs with private intervals on a prefix of a path. Positions
/// are indices into the path.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrivateIntervals {
    /// Indices into the subgraph family, in path order.
    pub selected: Vec<usize>,
    /// The prefix is the path up to and including this position.
    pub prefix_end: usize,
    /// `(a_j, b_j)` for each selected subgraph.
    pub intervals: Vec<(usize, usize)>,
}

impl PrivateIntervals {
    pub fn achieved(&self) -> usize {
        self.selected.len()
    }
}

fn check_family(g: &Graph, sets: &[BTreeSet<Vertex>]) -> Result<()> {
    let mut seen = BTreeSet::new();
    for (i, s) in sets.iter().enumerate() {
        if s.is_empty() || s.iter().any(|&v| !g.has_vertex(v)) {
            return Err(Error::invalid(format!("subgraph {i} is empty or not in the graph")));
        }
        if !g.is_connected_set(s) {
            return Err(Error::invalid(format!("subgraph {i} is not connected")));
        }
        if s.iter().any(|&v| !seen.insert(v)) {
            return Err(Error::invalid(format!("subgraph {i} meets an earlier one")));
        }
    }
    Ok(())
}

fn hits(p: &[Vertex], set: &BTreeSet<Vertex>) -> Vec<usize> {
    (0..p.len()).filter(|&i| set.contains(&p[i])).collect()
}

/// Up to `l` of the subgraphs with pairwise disjoint intervals of a common
/// prefix of `p`, each interval holding everything its subgraph meets in the
/// prefix. The recursion takes the subgraph hit first, splits the rest of
/// the path at its hits, and recurses on the part that yields most; the
/// result is the longest such chain, truncated to `l`.
pub fn private_intervals(
    g: &Graph,
    p: &[Vertex],
    subgraphs: &[BTreeSet<Vertex>],
    l: usize,
) -> Result<PrivateIntervals> {
    if !g.is_path(p) {
        return Err(Error::invalid("not a path"));
    }
    check_family(g, subgraphs)?;
    let hit: Vec<Vec<usize>> = subgraphs.iter().map(|s| hits(p, s)).collect();
    if let Some(i) = hit.iter().position(Vec::is_empty) {
        return Err(Error::precondition(format!("subgraph {i} does not meet the path")));
    }
    if subgraphs.is_empty() || l == 0 {
        return Ok(PrivateIntervals { selected: Vec::new(), prefix_end: p.len() - 1, intervals: Vec::new() });
    }
    let family: Vec<usize> = (0..subgraphs.len()).collect();
    let (mut chain, prefix_end) = chain(&hit, 0, p.len() - 1, &family);
    chain.truncate(l);
    Ok(PrivateIntervals {
        selected: chain.iter().map(|c| c.0).collect(),
        prefix_end,
        intervals: chain.iter().map(|c| (c.1, c.2)).collect(),
    })
}

/// Longest chain on the segment `lo..=hi`; every member of `family` has its
/// first hit inside the segment.
fn chain(hit: &[Vec<usize>], lo: usize, hi: usize, family: &[usize]) -> (Vec<(usize, usize, usize)>, usize) {
    let first = *family.iter().min_by_key(|&&i| hit[i][0]).expect("nonempty family");
    let xs: Vec<usize> = hit[first].iter().copied().filter(|&x| x <= hi).collect();
    let mut best = (vec![(first, lo, hi)], hi);
    for s in 0..xs.len() {
        let sub_lo = xs[s] + 1;
        let sub_hi = if s + 1 < xs.len() { xs[s + 1] - 1 } else { hi };
        if sub_lo > sub_hi {
            continue;
        }
        let part: Vec<usize> = family
            .iter()
            .copied()
            .filter(|&i| i != first && (sub_lo..=sub_hi).contains(&hit[i][0]))
            .collect();
        if part.is_empty() {
            continue;
        }
        let (rest, end) = chain(hit, sub_lo, sub_hi, &part);
        if rest.len() + 1 > best.0.len() {
            let mut c = vec![(first, lo, xs[s])];
            c.extend(rest);
            best = (c, end);
        }
    }
    best
}

/// Checks the three private-interval conditions on `out`.
pub fn check_private_intervals(
    p: &[Vertex],
    subgraphs: &[BTreeSet<Vertex>],
    out: &PrivateIntervals,
) -> std::result::Result<(), String> {
    if out.selected.len() != out.intervals.len() {
        return Err("one interval per selected subgraph expected".into());
    }
    if out.prefix_end >= p.len() {
        return Err("prefix ends beyond the path".into());
    }
    if out.selected.iter().collect::<BTreeSet<_>>().len() != out.selected.len() {
        return Err("a subgraph is selected twice".into());
    }
    for (&j, &(a, b)) in out.selected.iter().zip(&out.intervals) {
        let set = subgraphs.get(j).ok_or(format!("no subgraph {j}"))?;
        if a > b || b > out.prefix_end {
            return Err(format!("interval ({a}, {b}) is not inside the prefix"));
        }
        let h: Vec<usize> = hits(p, set).into_iter().filter(|&x| x <= out.prefix_end).collect();
        if h.is_empty() {
            return Err(format!("subgraph {j} misses the prefix"));
        }
        if h.iter().any(|&x| x < a || x > b) {
            return Err(format!("subgraph {j} meets the prefix outside its interval"));
        }
    }
    let mut iv = out.intervals.clone();
    iv.sort_unstable();
    if iv.windows(2).any(|w| w[0].1 >= w[1].0) {
        return Err("intervals overlap".into());
    }
    Ok(())
}

/// A ladder minor found by [`extract_ladder`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LadderExtraction {
    pub ladder: KLadder,
    pub model: MinorModel,
    /// Connector index of each ladder column.
    pub columns: Vec<usize>,
    /// Last used position on each row.
    pub prefix_ends: Vec<usize>,
}

/// A k-ladder minor with rows along `rows` and columns grown from
/// `connectors`: private intervals row by row, then a common column order
/// by longest monotone subsequences, then contraction.
pub fn extract_ladder(
    g: &Graph,
    rows: &[Vec<Vertex>],
    connectors: &[BTreeSet<Vertex>],
) -> Result<LadderExtraction> {
    let k = rows.len();
    if k == 0 || connectors.is_empty() {
        return Err(Error::precondition("need at least one row and one connector"));
    }
    let mut on_rows = BTreeSet::new();
    for (a, r) in rows.iter().enumerate() {
        if !g.is_path(r) {
            return Err(Error::invalid(format!("row {a} is not a path")));
        }
        if r.iter().any(|&v| !on_rows.insert(v)) {
            return Err(Error::invalid(format!("row {a} meets an earlier row")));
        }
    }
    check_family(g, connectors)?;
    for (c, set) in connectors.iter().enumerate() {
        if let Some(a) = rows.iter().position(|r| !r.iter().any(|v| set.contains(v))) {
            return Err(Error::precondition(format!("connector {c} misses row {a}")));
        }
    }

    // private intervals, one row at a time, on a shrinking family
    let mut family: Vec<usize> = (0..connectors.len()).collect();
    let mut interval: Vec<BTreeMap<usize, (usize, usize)>> = vec![BTreeMap::new(); k];
    let mut prefix_ends = Vec::with_capacity(k);
    for (a, r) in rows.iter().enumerate() {
        let sets: Vec<BTreeSet<Vertex>> = family.iter().map(|&c| connectors[c].clone()).collect();
        let pi = private_intervals(g, r, &sets, usize::MAX)?;
        family = pi.selected.iter().map(|&i| family[i]).collect();
        for (&c, &iv) in family.iter().zip(&pi.intervals) {
            interval[a].insert(c, iv);
        }
        prefix_ends.push(pi.prefix_end);
    }

    // common order: sort by row 0, then keep a longest monotone run per row
    family.sort_by_key(|c| interval[0][c].0);
    for iv in interval.iter().skip(1) {
        let pos: Vec<usize> = family.iter().map(|c| iv[c].0).collect();
        let (inc, dec) = longest_monotone(&pos);
        let keep = if inc.len() >= dec.len() { inc } else { dec };
        family = keep.into_iter().map(|i| family[i]).collect();
    }

    let l = family.len();
    let mut branch: Vec<Vec<BTreeSet<Vertex>>> = vec![vec![BTreeSet::new(); l]; k];
    for (q, &c) in family.iter().enumerate() {
        let mut w: BTreeSet<Vertex> = connectors[c].clone();
        for a in 0..k {
            let (lo, hi) = interval[a][&c];
            w.extend(&rows[a][lo..=hi]);
        }
        // grow the row parts of the column inside w, row 0 first
        let mut label: BTreeMap<Vertex, usize> = BTreeMap::new();
        let mut queue = VecDeque::new();
        for a in 0..k {
            let (lo, hi) = interval[a][&c];
            for &v in &rows[a][lo..=hi] {
                label.insert(v, a);
                queue.push_back(v);
            }
        }
        while let Some(v) = queue.pop_front() {
            let a = label[&v];
            for &u in g.neighbors(v) {
                if w.contains(&u) && !label.contains_key(&u) {
                    label.insert(u, a);
                    queue.push_back(u);
                }
            }
        }
        for (v, a) in label {
            branch[a][q].insert(v);
        }
    }
    // gaps between consecutive intervals go to the earlier column
    for a in 0..k {
        for q in 0..l.saturating_sub(1) {
            let (x, y) = (interval[a][&family[q]], interval[a][&family[q + 1]]);
            let gap = if x.1 < y.0 { x.1 + 1..y.0 } else { y.1 + 1..x.0 };
            branch[a][q].extend(&rows[a][gap]);
        }
    }
    let touches = |x: &BTreeSet<Vertex>, y: &BTreeSet<Vertex>| x.iter().any(|&v| g.neighbors(v).iter().any(|u| y.contains(u)));
    let mut edges = Vec::new();
    for a in 0..k {
        edges.extend((1..l).map(|q| (a * l + q - 1, a * l + q)));
        for b in a + 1..k {
            for q in 0..l {
                if touches(&branch[a][q], &branch[b][q]) {
                    edges.push((a * l + q, b * l + q));
                }
            }
        }
    }
    let ladder = KLadder::new(k, l, Graph::from_edges(k * l, &edges)?)
        .map_err(|e| Error::invalid(format!("internal: {e}")))?;
    let branch_sets = (0..k)
        .flat_map(|a| (0..l).map(move |q| (a, q)))
        .map(|(a, q)| (a * l + q, branch[a][q].clone()))
        .collect();
    let model = MinorModel { pattern: ladder.graph.clone(), host: g.clone(), branch_sets };
    model.validate().map_err(|e| Error::invalid(format!("internal: {e}")))?;
    Ok(LadderExtraction { ladder, model, columns: family, prefix_ends })
}

/// Some `T □ P_l` with `T` a tree on `k` vertices as a minor of `g`: the
/// tree, and a model. Trees are tried up to isomorphism in Prüfer order.
pub fn has_minor_tree_times_path(g: &Graph, k: usize, l: usize) -> Result<Option<(Graph, MinorModel)>> {
    if k == 0 || l == 0 {
        return Err(Error::precondition("k and l must be positive"));
    }
    limits::check("has_minor_tree_times_path k", k, TREE_PATH_MAX_K)?;
    limits::check("has_minor_tree_times_path l", l, TREE_PATH_MAX_L)?;
    limits::check("has_minor_tree_times_path host", g.n(), MINOR_HOST_MAX)?;
    let mut seen = BTreeSet::new();
    for t in enumerate_labelled_trees(k)? {
        if !seen.insert(canonical_form(&t)?.key) {
            continue;
        }
        let pattern = cartesian_product(&t, &path(l));
        if let Some(m) = search(&pattern, g)? {
            return Ok(Some((t, m)));
        }
    }
    Ok(None)
}
