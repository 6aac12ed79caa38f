//! Token sliding. A sequence of injections `V(H) -> V(G)`, each moving one
//! token along an edge, in which every edge of `H` has its two tokens
//! adjacent at some point. Such a sequence turns into a model of `H □ P_l`
//! in `G □ P_L` for `L = l (2m - 1)`.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generators::{cartesian_product, path, product_vertex};
use crate::graph::{Graph, Vertex};
use crate::limits;
use crate::minors::MinorModel;

/// Default caps for [`grid_in_ladder`].
pub const GRID_IN_LADDER_MAX_K: usize = 3;
pub const GRID_IN_LADDER_MAX_L: usize = 4;

pub type Injection = BTreeMap<Vertex, Vertex>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlidingSequence {
    pub pattern: Graph,
    pub host: Graph,
    pub injections: Vec<Injection>,
}

/// Reports the first step that is not a single token move along an edge, or
/// the first pattern edge never realised.
pub fn validate_sliding(seq: &SlidingSequence) -> std::result::Result<(), String> {
    if seq.injections.is_empty() {
        return Err("empty sequence".into());
    }
    for (i, phi) in seq.injections.iter().enumerate() {
        if !phi.keys().copied().eq(seq.pattern.vertices()) {
            return Err(format!("injection {i} is not defined on exactly the pattern vertices"));
        }
        if let Some(v) = phi.values().find(|v| !seq.host.has_vertex(**v)) {
            return Err(format!("injection {i} maps to {v}, which is not a host vertex"));
        }
        if phi.values().collect::<BTreeSet<_>>().len() != phi.len() {
            return Err(format!("injection {i} is not injective"));
        }
    }
    for (i, w) in seq.injections.windows(2).enumerate() {
        let moved: Vec<Vertex> = w[0].keys().copied().filter(|x| w[0][x] != w[1][x]).collect();
        match moved[..] {
            [x] if seq.host.has_edge(w[0][&x], w[1][&x]) => {}
            [x] => return Err(format!("step {i}: token {x} jumps between non-adjacent vertices")),
            _ => return Err(format!("step {i}: {} tokens move", moved.len())),
        }
    }
    for (x, y) in seq.pattern.edges() {
        if !seq.injections.iter().any(|phi| seq.host.has_edge(phi[&x], phi[&y])) {
            return Err(format!("pattern edge {x}-{y} is never realised"));
        }
    }
    Ok(())
}

/// A longest path of a tree; ties go to the lexicographically least pair of
/// endpoints, listed from the smaller one.
pub fn longest_path(t: &Graph) -> Vec<Vertex> {
    let none = BTreeSet::new();
    let vs: Vec<Vertex> = t.vertices().collect();
    let mut best = vs.first().map(|&v| vec![v]).unwrap_or_default();
    for (i, &u) in vs.iter().enumerate() {
        for &v in &vs[i + 1..] {
            if let Some(p) = t.shortest_path(u, v, &none) {
                if p.len() > best.len() {
                    best = p;
                }
            }
        }
    }
    best
}

/// Slides `P_k` (tokens `0..k`) through a tree on at least `2k - 1`
/// vertices. If the tree has a path on `k` vertices the tokens simply sit on
/// it. Otherwise every pair `(x, x+1)` is made adjacent from a common start
/// off a longest path `P`, and undone again before the next pair: the
/// tokens on the branch of `x` are pushed onto `P` towards one end, those on
/// the branch of `x+1` towards the other, and `x+1` then slides back next to
/// `x`. Maximality of `P` guarantees the room.
pub fn path_sliding_in_tree(t: &Graph, k: usize) -> Result<SlidingSequence> {
    if !t.is_tree() {
        return Err(Error::invalid("not a tree"));
    }
    if k == 0 {
        return Err(Error::precondition("k must be positive"));
    }
    if t.n() < 2 * k - 1 {
        return Err(Error::precondition(format!("tree on {} vertices is below {}", t.n(), 2 * k - 1)));
    }
    let pattern = path(k);
    let p = longest_path(t);
    if p.len() >= k {
        let phi = (0..k).map(|x| (x, p[x])).collect();
        return Ok(SlidingSequence { pattern, host: t.clone(), injections: vec![phi] });
    }
    let sh = Shuttle::new(t, &p);
    let phi0: Injection = (0..k).zip(t.vertices().filter(|v| !sh.index.contains_key(v))).collect();
    let mut injections = vec![phi0.clone()];
    for x in 0..k - 1 {
        let seg = sh.segment(&phi0, x, x + 1);
        let back: Vec<Injection> =
            if x + 2 < k { seg[1..seg.len() - 1].iter().rev().cloned().collect() } else { Vec::new() };
        for phi in seg.into_iter().skip(1).chain(back).chain((x + 2 < k).then(|| phi0.clone())) {
            if injections.last() != Some(&phi) {
                injections.push(phi);
            }
        }
    }
    let seq = SlidingSequence { pattern, host: t.clone(), injections };
    validate_sliding(&seq).map_err(|e| Error::invalid(format!("internal: {e}")))?;
    Ok(seq)
}

struct Shuttle<'a> {
    t: &'a Graph,
    p: Vec<Vertex>,
    /// Position of each vertex of `P`.
    index: BTreeMap<Vertex, usize>,
    /// For vertices off `P`: the next vertex towards `P`, and the position
    /// where the branch attaches.
    towards: BTreeMap<Vertex, (Vertex, usize)>,
}

impl<'a> Shuttle<'a> {
    fn new(t: &'a Graph, p: &[Vertex]) -> Self {
        let index: BTreeMap<Vertex, usize> = p.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut towards = BTreeMap::new();
        let mut queue: VecDeque<(Vertex, usize)> = p.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        while let Some((v, i)) = queue.pop_front() {
            for &w in t.neighbors(v) {
                if !index.contains_key(&w) && !towards.contains_key(&w) {
                    towards.insert(w, (v, i));
                    queue.push_back((w, i));
                }
            }
        }
        Shuttle { t, p: p.to_vec(), index, towards }
    }

    /// From `v` up to, not including, the attachment vertex on `P`.
    fn branch(&self, v: Vertex) -> Vec<Vertex> {
        let mut out = vec![v];
        let mut c = v;
        while let Some(&(next, _)) = self.towards.get(&c) {
            if self.index.contains_key(&next) {
                break;
            }
            out.push(next);
            c = next;
        }
        out
    }

    fn attach(&self, v: Vertex) -> usize {
        self.towards[&v].1
    }

    fn segment(&self, phi0: &Injection, x: usize, y: usize) -> Vec<Injection> {
        let (mut x, mut y) = (x, y);
        let (i, j) = (self.attach(phi0[&x]), self.attach(phi0[&y]));
        if i > j || (i == j && self.branch(phi0[&x]).contains(&phi0[&y])) {
            std::mem::swap(&mut x, &mut y);
        }
        let (i, j) = (self.attach(phi0[&x]), self.attach(phi0[&y]));
        let mut states = vec![phi0.clone()];
        self.push(&mut states, phi0[&x], i, false);
        self.push(&mut states, phi0[&y], j, true);
        let target = self.p[i];
        self.slide(&mut states, y, target);
        states
    }

    /// Moves the tokens on the branch of `start` onto `P` beyond the
    /// attachment `i`, towards the end of `P` if `forward`, else towards the
    /// start; the token from `start` lands next to the attachment.
    fn push(&self, states: &mut Vec<Injection>, start: Vertex, i: usize, forward: bool) {
        let cur = states.last().expect("nonempty").clone();
        let owner: BTreeMap<Vertex, usize> = cur.iter().map(|(&x, &v)| (v, x)).collect();
        let tokens: Vec<usize> = self.branch(start).iter().rev().filter_map(|v| owner.get(v).copied()).collect();
        let c = tokens.len();
        for (r, &tok) in tokens.iter().enumerate() {
            let target = if forward { self.p[i + c - r] } else { self.p[i - c + r] };
            self.slide(states, tok, target);
        }
    }

    fn slide(&self, states: &mut Vec<Injection>, tok: usize, target: Vertex) {
        let from = states.last().expect("nonempty")[&tok];
        let route = self.t.shortest_path(from, target, &BTreeSet::new()).expect("trees are connected");
        for &v in &route[1..] {
            let mut next = states.last().expect("nonempty").clone();
            debug_assert!(next.values().all(|&u| u != v), "route is blocked");
            next.insert(tok, v);
            states.push(next);
        }
    }
}

/// The model of `H □ P_l` in `G □ P_L`, `L = l (2m - 1)`. Branch set
/// `(x, j)` follows the token of `x` forward and back through columns
/// `(j-1)(2m-1)+1 ..= j(2m-1)`.
pub fn sliding_to_model(seq: &SlidingSequence, l: usize) -> Result<MinorModel> {
    validate_sliding(seq).map_err(Error::invalid)?;
    if l == 0 {
        return Err(Error::precondition("l must be positive"));
    }
    let m = seq.injections.len();
    let width = 2 * m - 1;
    let big_l = l * width;
    let (pl, pbig) = (path(l), path(big_l));
    let host = cartesian_product(&seq.host, &pbig);
    let pattern = cartesian_product(&seq.pattern, &pl);
    let phi = &seq.injections;
    let mut branch_sets = BTreeMap::new();
    for x in seq.pattern.vertices() {
        // columns are 1-based as in B^0
        let mut b0: BTreeSet<(Vertex, usize)> = (0..m).map(|i| (phi[i][&x], i + 1)).collect();
        for i in 0..m - 1 {
            if phi[i][&x] != phi[i + 1][&x] {
                b0.insert((phi[i][&x], i + 2));
            }
        }
        let b1: BTreeSet<(Vertex, usize)> = b0.iter().flat_map(|&(u, i)| [(u, i), (u, 2 * m - i)]).collect();
        for j in 0..l {
            let set = b1
                .iter()
                .map(|&(u, i)| product_vertex(&seq.host, &pbig, u, i - 1 + width * j))
                .collect::<Result<BTreeSet<Vertex>>>()?;
            branch_sets.insert(product_vertex(&seq.pattern, &pl, x, j)?, set);
        }
    }
    let model = MinorModel { pattern, host, branch_sets };
    model.validate().map_err(|e| Error::invalid(format!("internal: {e}")))?;
    Ok(model)
}

/// The `k x l` grid as a minor of `t □ P_L` for a tree `t` on `2k - 1`
/// vertices, by sliding `P_k` through `t`.
pub fn grid_in_ladder(k: usize, l: usize, t: &Graph) -> Result<MinorModel> {
    if k == 0 || l == 0 {
        return Err(Error::precondition("k and l must be positive"));
    }
    limits::check("grid_in_ladder k", k, GRID_IN_LADDER_MAX_K)?;
    limits::check("grid_in_ladder l", l, GRID_IN_LADDER_MAX_L)?;
    if t.n() != 2 * k - 1 {
        return Err(Error::invalid(format!("the tree must have {} vertices, not {}", 2 * k - 1, t.n())));
    }
    sliding_to_model(&path_sliding_in_tree(t, k)?, l)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{grid, star};

    #[test]
    fn static_and_single() {
        let s = path_sliding_in_tree(&path(5), 3).unwrap();
        assert_eq!(s.injections.len(), 1);
        let s = path_sliding_in_tree(&star(3), 1).unwrap();
        assert_eq!(s.injections, vec![BTreeMap::from([(0, 1)])]);
        // a star has a path on three vertices, so three tokens need no move
        assert_eq!(path_sliding_in_tree(&star(4), 3).unwrap().injections.len(), 1);
    }

    #[test]
    fn star_needs_moves() {
        let s = path_sliding_in_tree(&star(6), 4).unwrap();
        assert!(s.injections.len() > 1);
        assert!(validate_sliding(&s).is_ok());
        let m = sliding_to_model(&s, 2).unwrap();
        assert_eq!(m.host.n(), 7 * 2 * (2 * s.injections.len() - 1));
    }

    #[test]
    fn bad_sequences() {
        let host = path(3);
        let pattern = path(2);
        let two_moves = SlidingSequence {
            pattern: pattern.clone(),
            host: host.clone(),
            injections: vec![BTreeMap::from([(0, 0), (1, 2)]), BTreeMap::from([(0, 1), (1, 0)])],
        };
        assert!(validate_sliding(&two_moves).unwrap_err().contains("2 tokens"));
        let apart = SlidingSequence { pattern, host, injections: vec![BTreeMap::from([(0, 0), (1, 2)])] };
        assert!(validate_sliding(&apart).unwrap_err().contains("never realised"));
    }

    #[test]
    fn grids() {
        let m = grid_in_ladder(2, 3, &path(3)).unwrap();
        assert_eq!(m.pattern, grid(2, 3));
        let m = grid_in_ladder(3, 2, &star(4)).unwrap();
        assert_eq!(m.pattern, grid(3, 2));
        assert!(m.validate().is_ok());
        assert!(grid_in_ladder(2, 2, &path(4)).is_err());
    }
}
