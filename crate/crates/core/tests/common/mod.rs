//! Brute-force oracles and random instances shared by the integration tests.
//! Nothing here calls the solver under test.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap};

use kladder::canon::canonical_form;
use kladder::decomp::TreeDecomposition;
use kladder::generators::nonisomorphic_graphs;
use kladder::{Graph, Vertex};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn random_graph(rng: &mut ChaCha8Rng, n: usize, p: f64) -> Graph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, &edges).unwrap()
}

pub fn random_connected(rng: &mut ChaCha8Rng, n: usize) -> Graph {
    loop {
        let p = rng.gen_range(0.2..0.7);
        let g = random_graph(rng, n, p);
        if g.is_connected() {
            return g;
        }
    }
}

/// All graphs on at most `max_n` vertices, one per isomorphism class.
pub fn corpus(max_n: usize) -> Vec<Graph> {
    (0..=max_n).flat_map(|n| nonisomorphic_graphs(n).unwrap()).collect()
}

/// A random minor: some edge contractions, edge deletions and vertex
/// deletions, renumbered onto `0..n'`.
pub fn random_minor(rng: &mut ChaCha8Rng, g: &Graph) -> Graph {
    let mut h = g.clone();
    for _ in 0..rng.gen_range(0..=2) {
        let edges = h.edges();
        if let Some(&(u, v)) = edges.choose(rng) {
            h = h.contract_edge(u, v).unwrap();
        }
    }
    let edges = h.edges();
    let drop: Vec<(Vertex, Vertex)> = edges.iter().copied().filter(|_| rng.gen_bool(0.2)).collect();
    h = h.remove_edges(&drop);
    if h.n() > 0 && rng.gen_bool(0.3) {
        let vs: Vec<Vertex> = h.vertices().collect();
        h = h.remove_vertex(*vs.choose(rng).unwrap());
    }
    renumber(&h)
}

pub fn renumber(g: &Graph) -> Graph {
    let map: BTreeMap<Vertex, Vertex> = g.vertices().enumerate().map(|(i, v)| (v, i)).collect();
    g.relabel(&map).unwrap()
}

/// Adjacency bitmasks; vertices must be `0..n`.
pub fn masks(g: &Graph) -> Vec<u32> {
    assert!(g.vertices().eq(0..g.n()), "oracles need vertices 0..n");
    (0..g.n()).map(|v| g.neighbors(v).iter().fold(0, |m, &w| m | 1 << w)).collect()
}

fn reach(adj: &[u32], start: usize, within: u32) -> u32 {
    let mut seen = 1u32 << start;
    let mut frontier = seen;
    while frontier != 0 {
        let v = frontier.trailing_zeros() as usize;
        frontier &= frontier - 1;
        let new = adj[v] & within & !seen;
        seen |= new;
        frontier |= new;
    }
    seen
}

pub fn components_in(adj: &[u32], within: u32) -> Vec<u32> {
    let mut left = within;
    let mut out = Vec::new();
    while left != 0 {
        let c = reach(adj, left.trailing_zeros() as usize, within);
        out.push(c);
        left &= !c;
    }
    out
}

fn edges_in(adj: &[u32], within: u32) -> u32 {
    (0..adj.len()).filter(|v| within >> v & 1 == 1).map(|v| (adj[v] & within).count_ones()).sum::<u32>() / 2
}

fn subsets(n: usize) -> impl Iterator<Item = u32> {
    0..1u32 << n
}

/// Smallest vertex cover, by trying every subset.
pub fn vertex_cover(g: &Graph) -> usize {
    let adj = masks(g);
    let n = g.n();
    subsets(n)
        .filter(|&x| (0..n).all(|v| x >> v & 1 == 1 || adj[v] & !x == 0))
        .map(|x| x.count_ones() as usize)
        .min()
        .unwrap()
}

/// Smallest set whose removal leaves a forest.
pub fn feedback_vertex_set(g: &Graph) -> usize {
    let adj = masks(g);
    let n = g.n();
    let full = if n == 0 { 0 } else { u32::MAX >> (32 - n) };
    subsets(n)
        .filter(|&x| {
            let rest = full & !x;
            edges_in(&adj, rest) + components_in(&adj, rest).len() as u32 == rest.count_ones()
        })
        .map(|x| x.count_ones() as usize)
        .min()
        .unwrap()
}

pub fn max_component(g: &Graph) -> usize {
    let adj = masks(g);
    let full = subsets(g.n()).last().unwrap();
    components_in(&adj, full).iter().map(|c| c.count_ones() as usize).max().unwrap_or(0)
}

/// Largest vertex set inducing a connected graph without a cut vertex.
pub fn max_block(g: &Graph) -> usize {
    let adj = masks(g);
    subsets(g.n())
        .filter(|&x| {
            let connected = |m: u32| m == 0 || components_in(&adj, m).len() == 1;
            x != 0 && connected(x) && (x.count_ones() <= 2 || (0..g.n()).all(|v| x >> v & 1 == 0 || connected(x & !(1 << v))))
        })
        .map(|x| x.count_ones() as usize)
        .max()
        .unwrap_or(0)
}

/// Pathwidth as the vertex separation number: the least, over vertex
/// orders, of the largest number of placed vertices with an unplaced
/// neighbour. The empty graph gets -1.
pub fn pathwidth(g: &Graph) -> isize {
    let adj = masks(g);
    let n = g.n();
    if n == 0 {
        return -1;
    }
    let boundary = |s: u32| (0..n).filter(|&v| s >> v & 1 == 1 && adj[v] & !s != 0).count();
    let mut best = vec![usize::MAX; 1 << n];
    best[0] = 0;
    for s in 1u32..1 << n {
        let b = boundary(s);
        best[s as usize] = (0..n)
            .filter(|&v| s >> v & 1 == 1)
            .map(|v| best[(s & !(1 << v)) as usize].max(b))
            .min()
            .unwrap();
    }
    best[(1usize << n) - 1] as isize
}

/// `td_k` straight from its defining rules: the empty graph has value 0, a
/// vertex deletion costs one, and a clique-sum over fewer than `k` vertices
/// with both sides larger than the separator costs the larger side. Every
/// separator and every grouping of the components into two sides is tried.
pub struct TdkBrute {
    k: usize,
    memo: HashMap<Vec<u8>, usize>,
}

impl TdkBrute {
    pub fn new(k: usize) -> Self {
        TdkBrute { k, memo: HashMap::new() }
    }

    pub fn value(&mut self, g: &Graph) -> usize {
        let g = renumber(g);
        if g.n() == 0 {
            return 0;
        }
        let key = canonical_form(&g).unwrap().key;
        if let Some(&v) = self.memo.get(&key) {
            return v;
        }
        let n = g.n();
        let adj = masks(&g);
        let mut best = usize::MAX;
        for u in 0..n {
            best = best.min(1 + self.value(&g.remove_vertex(u)));
        }
        let full = (1u32 << n) - 1;
        for s in 0..full {
            if s.count_ones() as usize >= self.k {
                continue;
            }
            let comps = components_in(&adj, full & !s);
            if comps.len() < 2 {
                continue;
            }
            let sep = mask_set(s);
            for grouping in 1..(1u32 << (comps.len() - 1)) {
                let mut one = s | comps[0];
                let mut two = s;
                for (j, &c) in comps.iter().enumerate().skip(1) {
                    if grouping >> (j - 1) & 1 == 1 {
                        two |= c;
                    } else {
                        one |= c;
                    }
                }
                let side = |m: u32| g.induced(&mask_set(m)).with_clique(&sep).unwrap();
                let v = self.value(&side(one)).max(self.value(&side(two)));
                best = best.min(v);
            }
        }
        self.memo.insert(key, best);
        best
    }
}

pub fn mask_set(m: u32) -> BTreeSet<Vertex> {
    (0..32).filter(|v| m >> v & 1 == 1).collect()
}

/// Whether a decomposition is k-dismantable, by trying every removal and
/// every admissible split.
pub fn dismantable_brute(d: &TreeDecomposition, k: usize) -> bool {
    let index: BTreeMap<Vertex, u32> = d.vertices().into_iter().enumerate().map(|(i, v)| (v, i as u32)).collect();
    let nodes: Vec<usize> = d.nodes().collect();
    let bags: Vec<u32> = nodes.iter().map(|&x| d.bag(x).iter().fold(0, |m, v| m | 1 << index[v])).collect();
    let pos: BTreeMap<usize, usize> = nodes.iter().enumerate().map(|(i, &x)| (x, i)).collect();
    let edges: Vec<(usize, usize)> = d.tree().edges().into_iter().map(|(x, y)| (pos[&x], pos[&y])).collect();
    let mut memo = HashMap::new();
    let all: Vec<usize> = (0..nodes.len()).collect();
    piece_dismantable(&all, &bags, &edges, k, &mut memo)
}

fn piece_dismantable(
    piece: &[usize],
    bags: &[u32],
    edges: &[(usize, usize)],
    k: usize,
    memo: &mut HashMap<(Vec<usize>, Vec<u32>), bool>,
) -> bool {
    let key = (piece.to_vec(), piece.iter().map(|&x| bags[x]).collect::<Vec<_>>());
    if let Some(&v) = memo.get(&key) {
        return v;
    }
    let result = 'search: {
        if piece.len() == 1 && bags[piece[0]] == 0 {
            break 'search true;
        }
        let common = piece.iter().fold(u32::MAX, |m, &x| m & bags[x]);
        for v in 0..32 {
            if common >> v & 1 == 1 {
                let mut fewer = bags.to_vec();
                for &x in piece {
                    fewer[x] &= !(1 << v);
                }
                if piece_dismantable(piece, &fewer, edges, k, memo) {
                    break 'search true;
                }
            }
        }
        let inside: Vec<(usize, usize)> =
            edges.iter().copied().filter(|(x, y)| piece.contains(x) && piece.contains(y)).collect();
        for &(x, y) in &inside {
            if ((bags[x] & bags[y]).count_ones() as usize) >= k {
                continue;
            }
            let mut side = vec![x];
            let mut i = 0;
            while i < side.len() {
                let a = side[i];
                for &(p, q) in &inside {
                    if (p, q) == (x, y) {
                        continue;
                    }
                    for (from, to) in [(p, q), (q, p)] {
                        if from == a && !side.contains(&to) {
                            side.push(to);
                        }
                    }
                }
                i += 1;
            }
            side.sort_unstable();
            let other: Vec<usize> = piece.iter().copied().filter(|z| !side.contains(z)).collect();
            if piece_dismantable(&side, bags, edges, k, memo) && piece_dismantable(&other, bags, edges, k, memo) {
                break 'search true;
            }
        }
        false
    };
    memo.insert(key, result);
    result
}

/// Whether some k-dismantable path decomposition of `g` has at most
/// `max_len` bags, each of size at most `max_bag`.
pub fn short_dismantable_path_exists(g: &Graph, k: usize, max_bag: usize, max_len: usize) -> bool {
    let n = g.n();
    let adj = masks(g);
    let full = (1u32 << n) - 1;
    let choices: Vec<u32> = (1..=full).filter(|b| b.count_ones() as usize <= max_bag).collect();
    let mut seq = Vec::new();
    extend_path(g, &adj, k, &choices, max_len, full, 0, &mut seq)
}

#[allow(clippy::too_many_arguments)]
fn extend_path(
    g: &Graph,
    adj: &[u32],
    k: usize,
    choices: &[u32],
    max_len: usize,
    full: u32,
    closed: u32,
    seq: &mut Vec<u32>,
) -> bool {
    let covered = seq.iter().fold(0, |m, b| m | b);
    if covered == full {
        let edges_ok = (0..g.n()).all(|v| {
            let mut nb = adj[v];
            while nb != 0 {
                let w = nb.trailing_zeros();
                nb &= nb - 1;
                if !seq.iter().any(|b| b >> v & 1 == 1 && b >> w & 1 == 1) {
                    return false;
                }
            }
            true
        });
        if edges_ok {
            let d = TreeDecomposition::path(seq.iter().map(|&b| mask_set(b)).collect()).unwrap();
            if dismantable_brute(&d, k) {
                return true;
            }
        }
    }
    if seq.len() == max_len {
        return false;
    }
    let last = seq.last().copied().unwrap_or(0);
    for &b in choices {
        if b & closed != 0 || b == last {
            continue;
        }
        let closed_next = closed | (last & !b);
        seq.push(b);
        let found = extend_path(g, adj, k, choices, max_len, full, closed_next, seq);
        seq.pop();
        if found {
            return true;
        }
    }
    false
}

/// Random tree decomposition on up to `max_nodes` nodes over vertices
/// `0..n`, with connected occupancies. Bags may be empty.
pub fn random_decomposition(rng: &mut ChaCha8Rng, n: usize, max_nodes: usize) -> TreeDecomposition {
    loop {
        let m = rng.gen_range(1..=max_nodes);
        let edges: Vec<(usize, usize)> = (1..m).map(|i| (rng.gen_range(0..i), i)).collect();
        let bags: Vec<BTreeSet<Vertex>> =
            (0..m).map(|_| (0..n).filter(|_| rng.gen_bool(0.45)).collect()).collect();
        let d = TreeDecomposition::from_bags(bags, &edges).unwrap();
        if d.occupancies_connected().is_none() {
            return d;
        }
    }
}

/// The largest number of family members with pairwise disjoint projections.
pub fn max_disjoint_projections(d: &TreeDecomposition, family: &[BTreeSet<Vertex>]) -> usize {
    let proj: Vec<BTreeSet<usize>> = family.iter().map(|f| d.projection(f)).collect();
    let m = family.len();
    (0u32..1 << m)
        .filter(|&chosen| {
            let idx: Vec<usize> = (0..m).filter(|i| chosen >> i & 1 == 1).collect();
            idx.iter().enumerate().all(|(a, &i)| idx[a + 1..].iter().all(|&j| proj[i].is_disjoint(&proj[j])))
        })
        .map(|c| c.count_ones() as usize)
        .max()
        .unwrap_or(0)
}

/// A connected vertex set grown from a random vertex.
pub fn random_connected_set(rng: &mut ChaCha8Rng, g: &Graph) -> BTreeSet<Vertex> {
    let vs: Vec<Vertex> = g.vertices().collect();
    let mut set = BTreeSet::from([*vs.choose(rng).unwrap()]);
    let target = rng.gen_range(1..=3);
    while set.len() < target {
        let frontier: Vec<Vertex> = g.neighborhood(&set).into_iter().collect();
        match frontier.choose(rng) {
            Some(&v) => {
                set.insert(v);
            }
            None => break,
        }
    }
    set
}

/// Exhaustive maximum number of disjoint paths: tries every way of growing
/// paths one vertex at a time.
pub fn brute_disjoint_paths(g: &Graph, z1: &BTreeSet<Vertex>, z2: &BTreeSet<Vertex>) -> usize {
    fn extend(g: &Graph, z1: &[Vertex], z2: &BTreeSet<Vertex>, used: &mut BTreeSet<Vertex>, from: usize) -> usize {
        let mut best = 0;
        for (j, &s) in z1.iter().enumerate().skip(from) {
            if used.contains(&s) {
                continue;
            }
            // every simple path from s to z2 avoiding used vertices
            let mut stack = vec![vec![s]];
            while let Some(p) = stack.pop() {
                let last = *p.last().unwrap();
                if z2.contains(&last) {
                    for &v in &p {
                        used.insert(v);
                    }
                    best = best.max(1 + extend(g, z1, z2, used, j + 1));
                    for &v in &p {
                        used.remove(&v);
                    }
                    continue;
                }
                for &w in g.neighbors(last) {
                    if !used.contains(&w) && !p.contains(&w) {
                        let mut q = p.clone();
                        q.push(w);
                        stack.push(q);
                    }
                }
            }
        }
        best
    }
    let z1: Vec<Vertex> = z1.iter().copied().collect();
    extend(g, &z1, z2, &mut BTreeSet::new(), 0)
}
