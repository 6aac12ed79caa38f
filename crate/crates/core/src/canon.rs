//! Canonical labelling by individualisation-refinement.
//!
//! Disconnected graphs are handled per component and co-disconnected graphs
//! through their complement; only the remaining prime pieces are searched.
//! Inside the search, twins in the target cell are tried once.

use crate::bits::{bit, ones, BitGraph, Mask};
use crate::error::Result;
use crate::graph::{Graph, Vertex};
use crate::limits;

/// Default vertex cap for [`canonical_form`].
pub const CANON_MAX_N: usize = 16;

/// Internal comparable key: word 0 is the order, then the upper triangle of
/// the adjacency matrix in row-major order, most significant bit first.
pub type Key = Vec<u64>;

/// A canonical encoding together with the labelling that realises it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CanonicalForm {
    /// Equal for two graphs exactly when they are isomorphic.
    pub key: Vec<u8>,
    /// `labelling[i]` is the vertex placed at canonical position `i`.
    pub labelling: Vec<Vertex>,
}

pub fn canonical_form(g: &Graph) -> Result<CanonicalForm> {
    limits::check("canonical_form", g.n(), CANON_MAX_N)?;
    let b = BitGraph::from_graph(g)?;
    let order = canonical_order(&b);
    let key = encode(&b, &order);
    Ok(CanonicalForm {
        key: key_bytes(&key, b.n()),
        labelling: order.iter().map(|&i| b.ids[i]).collect(),
    })
}

/// Whether two graphs are isomorphic.
pub fn isomorphic(g: &Graph, h: &Graph) -> Result<bool> {
    if g.n() != h.n() || g.m() != h.m() {
        return Ok(false);
    }
    Ok(canonical_form(g)?.key == canonical_form(h)?.key)
}

fn key_bytes(key: &Key, n: usize) -> Vec<u8> {
    let pairs = n * n.saturating_sub(1) / 2;
    let mut out = vec![n as u8];
    let nbytes = pairs.div_ceil(8);
    for b in 0..nbytes {
        let word = key[1 + b / 8];
        out.push((word >> (56 - 8 * (b % 8))) as u8);
    }
    out
}

/// Canonical key of a dense graph, without a size cap.
pub(crate) fn key_of(g: &BitGraph) -> Key {
    encode(g, &canonical_order(g))
}

pub(crate) fn encode(g: &BitGraph, order: &[usize]) -> Key {
    let n = order.len();
    let pairs = n * n.saturating_sub(1) / 2;
    let mut key = vec![0u64; 1 + pairs.div_ceil(64)];
    key[0] = n as u64;
    let mut t = 0;
    for i in 0..n {
        let row = g.adj[order[i]];
        for &oj in &order[i + 1..] {
            if row & bit(oj) != 0 {
                key[1 + t / 64] |= 1u64 << (63 - t % 64);
            }
            t += 1;
        }
    }
    key
}

/// Positions of `g` in canonical order.
pub(crate) fn canonical_order(g: &BitGraph) -> Vec<usize> {
    order_in(g, g.all())
}

fn order_in(g: &BitGraph, m: Mask) -> Vec<usize> {
    if m.count_ones() <= 1 {
        return ones(m).collect();
    }
    let comps = g.components_in(m);
    if comps.len() > 1 {
        let mut parts: Vec<(Key, Vec<usize>)> = comps
            .into_iter()
            .map(|c| {
                let o = order_in(g, c);
                (encode(g, &o), o)
            })
            .collect();
        parts.sort();
        return parts.into_iter().flat_map(|(_, o)| o).collect();
    }
    let co = complement(g, m);
    if co.components_in(m).len() > 1 {
        return order_in(&co, m);
    }
    let pos: Vec<usize> = ones(m).collect();
    let sub = g.induced(m);
    search(&sub).into_iter().map(|i| pos[i]).collect()
}

fn complement(g: &BitGraph, m: Mask) -> BitGraph {
    let adj = (0..g.n())
        .map(|i| if m & bit(i) != 0 { !g.adj[i] & m & !bit(i) } else { 0 })
        .collect();
    BitGraph { ids: g.ids.clone(), adj }
}

fn search(g: &BitGraph) -> Vec<usize> {
    let mut best: Option<(Key, Vec<usize>)> = None;
    descend(g, vec![(0..g.n()).collect()], &mut best);
    best.expect("search visits at least one leaf").1
}

fn descend(g: &BitGraph, mut cells: Vec<Vec<usize>>, best: &mut Option<(Key, Vec<usize>)>) {
    refine(g, &mut cells);
    if cells.len() == g.n() {
        let order: Vec<usize> = cells.into_iter().map(|c| c[0]).collect();
        let key = encode(g, &order);
        if best.as_ref().is_none_or(|(k, _)| key < *k) {
            *best = Some((key, order));
        }
        return;
    }
    let target = (0..cells.len())
        .filter(|&c| cells[c].len() > 1)
        .min_by_key(|&c| (cells[c].len(), c))
        .expect("non-discrete partition has a large cell");
    let mut tried: Vec<usize> = Vec::new();
    for &v in &cells[target] {
        if tried.iter().any(|&w| twins(g, v, w)) {
            continue;
        }
        tried.push(v);
        let mut next = cells.clone();
        let rest: Vec<usize> = cells[target].iter().copied().filter(|&w| w != v).collect();
        next.splice(target..=target, [vec![v], rest]);
        descend(g, next, best);
    }
}

fn twins(g: &BitGraph, v: usize, w: usize) -> bool {
    g.adj[v] & !bit(w) == g.adj[w] & !bit(v)
}

/// Equitable refinement: cells are split by the vector of neighbour counts
/// into every current cell until nothing changes.
fn refine(g: &BitGraph, cells: &mut Vec<Vec<usize>>) {
    loop {
        let masks: Vec<Mask> = cells.iter().map(|c| c.iter().fold(0, |m, &v| m | bit(v))).collect();
        let mut next = Vec::with_capacity(cells.len());
        for cell in cells.iter() {
            if cell.len() == 1 {
                next.push(cell.clone());
                continue;
            }
            let mut sig: Vec<(Vec<u32>, usize)> = cell
                .iter()
                .map(|&v| (masks.iter().map(|&m| (g.adj[v] & m).count_ones()).collect(), v))
                .collect();
            sig.sort();
            let mut start = 0;
            for i in 1..=sig.len() {
                if i == sig.len() || sig[i].0 != sig[start].0 {
                    next.push(sig[start..i].iter().map(|s| s.1).collect());
                    start = i;
                }
            }
        }
        let done = next.len() == cells.len();
        *cells = next;
        if done {
            return;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{complete, cycle, grid, path};
    use std::collections::BTreeMap;

    fn permuted(g: &Graph, perm: &[usize]) -> Graph {
        let map: BTreeMap<Vertex, Vertex> = g.vertices().map(|v| (v, perm[v])).collect();
        g.relabel(&map).unwrap()
    }

    #[test]
    fn invariant_under_relabelling() {
        let g = grid(3, 3);
        let perm = [4, 8, 0, 2, 6, 1, 7, 3, 5];
        assert_eq!(canonical_form(&g).unwrap().key, canonical_form(&permuted(&g, &perm)).unwrap().key);
    }

    #[test]
    fn separates_non_isomorphic() {
        let c6 = cycle(6);
        let two_triangles = Graph::from_edges(6, &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]).unwrap();
        assert!(!isomorphic(&c6, &two_triangles).unwrap());
        assert!(!isomorphic(&path(4), &Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3)]).unwrap()).unwrap());
    }

    #[test]
    fn labelling_realises_key() {
        let g = complete(4).remove_edges(&[(0, 1)]);
        let cf = canonical_form(&g).unwrap();
        let b = BitGraph::from_graph(&g).unwrap();
        let pos: Vec<usize> = cf.labelling.iter().map(|v| b.ids.iter().position(|x| x == v).unwrap()).collect();
        assert_eq!(key_bytes(&encode(&b, &pos), 4), cf.key);
    }

    #[test]
    fn respects_cap() {
        assert!(canonical_form(&path(17)).is_err());
        assert!(crate::limits::with_max_n(40, || canonical_form(&path(31))).is_ok());
    }
}
