//! Exact solvers for k-treedepth, k-pathdepth and the word parameters.
//!
//! `td_k` is evaluated through its clique-sum recursion: a graph is either
//! disconnected (take the worst component), or one vertex is paid for, or it
//! is cut along a separator `S` with `|S| < k` into the pieces
//! `G[S ∪ C] + clique(S)`. Splitting along all components at once is never
//! worse than any coarser clique-sum, since each piece is a subgraph of the
//! corresponding coarse side.

mod memo;
pub mod sigma;

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bits::{bit, ones, submasks_up_to, BitGraph, Mask};
use crate::canon::{key_of, Key};
use crate::decomp::{separators, TreeDecomposition, K_INF};
use crate::error::{Error, Result};
use crate::graph::{Graph, Vertex};
use crate::limits;
use memo::Memo;

pub use sigma::{higman_leq, letter_leq, p_regex, p_word, Letter, SigmaRegex, SigmaWord};

/// Default vertex cap for [`k_treedepth`].
pub const TDK_MAX_N: usize = 10;
/// Default vertex cap for [`k_pathdepth`].
pub const PDK_MAX_N: usize = 8;
/// Default vertex cap for the oracles.
pub const ORACLE_MAX_N: usize = 12;

/// A parameter value in `ℕ ∪ {∞}`. Serialises as a number or `"inf"`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ParamValue {
    Finite(usize),
    Infinite,
}

impl ParamValue {
    pub fn finite(self) -> Option<usize> {
        match self {
            ParamValue::Finite(v) => Some(v),
            ParamValue::Infinite => None,
        }
    }

    pub(crate) fn plus_one(self) -> Self {
        match self {
            ParamValue::Finite(v) => ParamValue::Finite(v + 1),
            ParamValue::Infinite => ParamValue::Infinite,
        }
    }
}

impl fmt::Display for ParamValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamValue::Finite(v) => write!(f, "{v}"),
            ParamValue::Infinite => write!(f, "inf"),
        }
    }
}

impl Serialize for ParamValue {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ParamValue::Finite(v) => s.serialize_u64(*v as u64),
            ParamValue::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for ParamValue {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match serde_json::Value::deserialize(d)? {
            serde_json::Value::Number(n) => n
                .as_u64()
                .map(|v| ParamValue::Finite(v as usize))
                .ok_or_else(|| serde::de::Error::custom("expected a natural number")),
            serde_json::Value::String(s) if s == "inf" => Ok(ParamValue::Infinite),
            _ => Err(serde::de::Error::custom("expected a natural number or \"inf\"")),
        }
    }
}

fn check_k(k: usize) -> Result<()> {
    if k == 0 {
        Err(Error::precondition("k must be at least 1"))
    } else {
        Ok(())
    }
}

/// Largest separator size allowed for `k` on a graph of order `n`.
pub(crate) fn max_separator(k: usize, n: usize) -> usize {
    k.saturating_sub(1).min(n.saturating_sub(2))
}

/// `td_k(g)` with a k-dismantable tree decomposition of width `td_k(g) - 1`.
///
/// Among optimal choices the witness prefers vertex deletions (in increasing
/// vertex order) over clique-sums (by separator size, then vertex set).
pub fn k_treedepth(g: &Graph, k: usize) -> Result<(usize, TreeDecomposition)> {
    limits::check("k_treedepth", g.n(), TDK_MAX_N)?;
    check_k(k)?;
    let b = BitGraph::from_graph(g)?;
    let mut s = TdkSolver::new(k);
    let value = s.value(&b);
    let witness = s.witness(&b);
    debug_assert_eq!(witness.max_bag_size(), value);
    Ok((value, witness))
}

/// Reusable `td_k` evaluator; the memo table persists across calls.
pub struct TdkSolver {
    k: usize,
    by_key: Memo<Key, usize>,
    by_adj: Memo<Vec<Mask>, usize>,
}

enum Choice {
    Delete(usize),
    Split(Mask),
}

impl TdkSolver {
    pub fn new(k: usize) -> Self {
        TdkSolver { k, by_key: Memo::new(), by_adj: Memo::new() }
    }

    /// `td_k` of a graph, without a size cap.
    pub fn evaluate(&mut self, g: &Graph) -> Result<usize> {
        Ok(self.value(&BitGraph::from_graph(g)?))
    }

    fn value(&mut self, g: &BitGraph) -> usize {
        let n = g.n();
        if n == 0 {
            return 0;
        }
        let comps = g.components();
        if comps.len() > 1 {
            return comps.into_iter().map(|c| self.value(&g.induced(c))).max().unwrap_or(0);
        }
        if g.is_complete() {
            return n;
        }
        if let Some(v) = self.by_adj.get(&g.adj) {
            return v;
        }
        let key = key_of(g);
        let v = match self.by_key.get(&key) {
            Some(v) => v,
            None => {
                let v = self.best(g).0;
                self.by_key.insert(key, v);
                v
            }
        };
        self.by_adj.insert(g.adj.clone(), v);
        v
    }

    fn best(&mut self, g: &BitGraph) -> (usize, Choice) {
        let n = g.n();
        let mut best = (usize::MAX, Choice::Delete(0));
        for i in 0..n {
            let v = 1 + self.value(&g.remove(i));
            if v < best.0 {
                best = (v, Choice::Delete(i));
            }
        }
        for s in separators(g, max_separator(self.k, n)) {
            let mut worst = 0;
            for c in g.components_in(g.all() & !s) {
                worst = worst.max(self.value(&g.piece(s, c)));
                if worst >= best.0 {
                    break;
                }
            }
            if worst < best.0 {
                best = (worst, Choice::Split(s));
            }
        }
        best
    }

    fn witness(&mut self, g: &BitGraph) -> TreeDecomposition {
        let n = g.n();
        if n == 0 {
            return TreeDecomposition::single(BTreeSet::new());
        }
        let comps = g.components();
        if comps.len() > 1 {
            return TreeDecomposition::join(comps.into_iter().map(|c| (self.witness(&g.induced(c)), 0)).collect());
        }
        if g.is_complete() {
            return TreeDecomposition::single(g.ids.iter().copied().collect());
        }
        match self.best(g).1 {
            Choice::Delete(i) => self.witness(&g.remove(i)).with_vertex_everywhere(g.ids[i]),
            Choice::Split(s) => {
                let sep = g.set_of(s);
                let parts = g
                    .components_in(g.all() & !s)
                    .into_iter()
                    .map(|c| {
                        let d = self.witness(&g.piece(s, c));
                        let anchor = d.nodes().find(|&x| sep.is_subset(d.bag(x))).expect("clique in a bag");
                        (d, anchor)
                    })
                    .collect();
                TreeDecomposition::join(parts)
            }
        }
    }
}

/// `pd_k(g)` with a k-dismantable path decomposition of width `pd_k(g) - 1`.
///
/// Anchored recursion: `PD(V, L, R)` is the least largest bag over
/// k-dismantable path decompositions of `G[V]` whose first bag contains `L`
/// and last bag contains `R`. Such a decomposition either has a vertex in
/// every bag, or splits at an edge with adhesion `A` (`|A| < k`), leaving
/// `G[V1]` anchored at `(L, A)` and `G[V2]` anchored at `(A, R)` where
/// `V1 ∩ V2 = A` and nothing joins `V1 - A` to `V2 - A`.
pub fn k_pathdepth(g: &Graph, k: usize) -> Result<(usize, TreeDecomposition)> {
    limits::check("k_pathdepth", g.n(), PDK_MAX_N)?;
    check_k(k)?;
    let b = BitGraph::from_graph(g)?;
    let mut s = Pdk { g: &b, k, memo: HashMap::new() };
    let all = b.all();
    let value = s.pd(all, 0, 0);
    let bags = s.bags(all, 0, 0).into_iter().map(|m| b.set_of(m)).collect();
    Ok((value, TreeDecomposition::path(bags)?))
}

struct Pdk<'a> {
    g: &'a BitGraph,
    k: usize,
    memo: HashMap<(Mask, Mask, Mask), usize>,
}

enum PathChoice {
    Delete(usize),
    Split { left: Mask, adhesion: Mask, right: Mask },
}

impl Pdk<'_> {
    fn pd(&mut self, v: Mask, l: Mask, r: Mask) -> usize {
        if v == 0 {
            return 0;
        }
        if let Some(&x) = self.memo.get(&(v, l, r)) {
            return x;
        }
        let x = self.best(v, l, r).0;
        self.memo.insert((v, l, r), x);
        x
    }

    fn best(&mut self, v: Mask, l: Mask, r: Mask) -> (usize, PathChoice) {
        let floor = (l.count_ones().max(r.count_ones()) as usize).max(1);
        let mut best = (usize::MAX, PathChoice::Delete(0));
        for i in ones(v) {
            let x = 1 + self.pd(v & !bit(i), l & !bit(i), r & !bit(i));
            if x < best.0 {
                best = (x, PathChoice::Delete(i));
            }
        }
        if best.0 == floor {
            return best;
        }
        let max_a = self.k.saturating_sub(1).min(v.count_ones() as usize);
        for a in submasks_up_to(v, max_a) {
            let comps = self.g.components_in(v & !a);
            if comps.len() < 2 {
                continue;
            }
            for grp in 1..(1u64 << comps.len()) - 1 {
                let mut left = a;
                let mut right = a;
                for (j, &c) in comps.iter().enumerate() {
                    if grp & bit(j) != 0 {
                        left |= c;
                    } else {
                        right |= c;
                    }
                }
                if l & !left != 0 || r & !right != 0 {
                    continue;
                }
                let lv = self.pd(left, l, a);
                if lv >= best.0 {
                    continue;
                }
                let x = lv.max(self.pd(right, a, r));
                if x < best.0 {
                    best = (x, PathChoice::Split { left, adhesion: a, right });
                }
            }
        }
        best
    }

    fn bags(&mut self, v: Mask, l: Mask, r: Mask) -> Vec<Mask> {
        if v == 0 {
            return vec![0];
        }
        match self.best(v, l, r).1 {
            PathChoice::Delete(i) => self
                .bags(v & !bit(i), l & !bit(i), r & !bit(i))
                .into_iter()
                .map(|m| m | bit(i))
                .collect(),
            PathChoice::Split { left, adhesion, right } => {
                let mut out = self.bags(left, l, adhesion);
                out.extend(self.bags(right, adhesion, r));
                out
            }
        }
    }
}

/// Treedepth by its textbook recursion: empty graphs have depth 0,
/// disconnected graphs the depth of their deepest component, and connected
/// graphs one more than the best vertex deletion.
pub fn treedepth_oracle(g: &Graph) -> Result<usize> {
    limits::check("treedepth_oracle", g.n(), ORACLE_MAX_N)?;
    let b = BitGraph::from_graph(g)?;
    Ok(td_rec(&b, &mut HashMap::new()))
}

fn td_rec(g: &BitGraph, memo: &mut HashMap<Key, usize>) -> usize {
    if g.n() <= 1 {
        return g.n();
    }
    let comps = g.components();
    if comps.len() > 1 {
        return comps.into_iter().map(|c| td_rec(&g.induced(c), memo)).max().unwrap_or(0);
    }
    let key = key_of(g);
    if let Some(&v) = memo.get(&key) {
        return v;
    }
    let v = 1 + (0..g.n()).map(|i| td_rec(&g.remove(i), memo)).min().unwrap_or(0);
    memo.insert(key, v);
    v
}

/// Treewidth by dynamic programming over elimination prefixes; `-1` for the
/// empty graph.
pub fn treewidth_oracle(g: &Graph) -> Result<isize> {
    limits::check("treewidth_oracle", g.n(), ORACLE_MAX_N)?;
    let b = BitGraph::from_graph(g)?;
    let n = b.n();
    if n == 0 {
        return Ok(-1);
    }
    // best[S]: least possible maximum of |Q| when S is eliminated first
    let mut best = vec![usize::MAX; 1 << n];
    best[0] = 0;
    for s in 1..(1usize << n) {
        let sm = s as Mask;
        for v in ones(sm) {
            let prev = sm & !bit(v);
            let reach = b.reach(bit(v), prev | bit(v));
            let q = (b.neighborhood(reach) & !prev).count_ones() as usize;
            best[s] = best[s].min(best[prev as usize].max(q));
        }
    }
    Ok(best[(1 << n) - 1] as isize)
}

/// A (<k)-clique-sum decomposition `G = G1 ⊕ G2` over `separator`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CliqueSumSplit {
    pub separator: BTreeSet<Vertex>,
    pub sides: [Graph; 2],
}

/// Every way of writing `g` as a clique-sum over fewer than `k` vertices with
/// both sides strictly larger than the separator. Each unordered split is
/// listed once, with the component of the smallest vertex on the first side.
pub fn clique_sum_splits(g: &Graph, k: usize) -> Result<Vec<CliqueSumSplit>> {
    limits::check("clique_sum_splits", g.n(), ORACLE_MAX_N)?;
    check_k(k)?;
    let b = BitGraph::from_graph(g)?;
    let mut out = Vec::new();
    for s in split_separators(&b, k) {
        let comps = b.components_in(b.all() & !s);
        for grp in 0..(1u64 << (comps.len() - 1)) - 1 {
            let mut one = s | comps[0];
            let mut two = s;
            for (j, &c) in comps.iter().enumerate().skip(1) {
                if grp & bit(j - 1) != 0 {
                    one |= c;
                } else {
                    two |= c;
                }
            }
            let sep = b.set_of(s);
            let side = |m: Mask| b.induced(m).to_graph().with_clique(&sep).expect("separator inside side");
            out.push(CliqueSumSplit { sides: [side(one), side(two)], separator: sep.clone() });
        }
    }
    Ok(out)
}

/// Separators of size below `k` (the empty set included when `g` is
/// disconnected) leaving at least two components.
pub(crate) fn split_separators(g: &BitGraph, k: usize) -> Vec<Mask> {
    let mut out = Vec::new();
    if g.components().len() >= 2 {
        out.push(0);
    }
    out.extend(separators(g, max_separator(k, g.n())));
    out
}

/// `tw(g) + 1` through the solver with `k = ∞`.
pub fn treewidth_plus_one(g: &Graph) -> Result<usize> {
    Ok(k_treedepth(g, K_INF)?.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomp::{is_k_dismantable, validate};
    use crate::generators::{complete, cycle, grid, path};

    #[test]
    fn small_values() {
        assert_eq!(k_treedepth(&cycle(4), 1).unwrap().0, 3);
        assert_eq!(k_treedepth(&cycle(4), 2).unwrap().0, 3);
        assert_eq!(k_treedepth(&cycle(4), 3).unwrap().0, 3);
        assert_eq!(k_treedepth(&path(7), 1).unwrap().0, 3);
        assert_eq!(k_treedepth(&path(7), 2).unwrap().0, 2);
        assert_eq!(k_treedepth(&complete(5), 3).unwrap().0, 5);
        assert_eq!(k_treedepth(&Graph::new(), 2).unwrap().0, 0);
        assert!(k_treedepth(&path(3), 0).is_err());
    }

    #[test]
    fn witnesses_are_dismantable() {
        for g in [cycle(5), grid(2, 4), path(6), complete(3)] {
            for k in [1, 2, 3] {
                let (v, d) = k_treedepth(&g, k).unwrap();
                assert!(validate(&g, &d).is_ok());
                assert_eq!(d.max_bag_size(), v);
                assert!(is_k_dismantable(&d, k).is_some());
            }
        }
    }

    #[test]
    fn pathdepth_small() {
        let (v, d) = k_pathdepth(&cycle(4), 2).unwrap();
        assert_eq!(v, 3);
        assert!(d.is_path_decomposition());
        assert!(validate(&cycle(4), &d).is_ok());
        assert!(is_k_dismantable(&d, 2).is_some());
        assert_eq!(k_pathdepth(&path(4), 1).unwrap().0, 3);
        assert_eq!(k_pathdepth(&path(4), 2).unwrap().0, 2);
    }

    #[test]
    fn oracles() {
        assert_eq!(treedepth_oracle(&path(7)).unwrap(), 3);
        assert_eq!(treewidth_oracle(&grid(3, 3)).unwrap(), 3);
        assert_eq!(treewidth_oracle(&cycle(6)).unwrap(), 2);
        assert_eq!(treewidth_oracle(&Graph::edgeless(3)).unwrap(), 0);
        assert_eq!(treewidth_oracle(&Graph::new()).unwrap(), -1);
    }

    #[test]
    fn splits() {
        assert!(clique_sum_splits(&complete(4), 3).unwrap().is_empty());
        let p3 = clique_sum_splits(&path(3), 2).unwrap();
        assert_eq!(p3.len(), 1);
        assert_eq!(p3[0].separator, BTreeSet::from([1]));
        assert!(clique_sum_splits(&path(3), 1).unwrap().is_empty());
    }

    #[test]
    fn param_value_json() {
        assert_eq!(serde_json::to_string(&ParamValue::Infinite).unwrap(), "\"inf\"");
        assert_eq!(serde_json::from_str::<ParamValue>("4").unwrap(), ParamValue::Finite(4));
        assert!(ParamValue::Finite(100) < ParamValue::Infinite);
    }
}
