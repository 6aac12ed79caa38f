//! Standard graph families, products and exhaustive enumerations.

use std::collections::{BTreeMap, BTreeSet};

use crate::bits::BitGraph;
use crate::canon::key_of;
use crate::error::{Error, Result};
use crate::graph::{Graph, Vertex};
use crate::limits;

/// Default cap on `k` for [`enumerate_labelled_trees`].
pub const TREES_MAX_K: usize = 8;
/// Default cap on `n` for [`nonisomorphic_graphs`].
pub const GRAPHS_MAX_N: usize = 8;

/// `P_n` on `0..n`.
pub fn path(n: usize) -> Graph {
    let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
    Graph::from_edges(n, &edges).expect("valid path")
}

/// `C_n` on `0..n`; for `n < 3` this is `P_n`.
pub fn cycle(n: usize) -> Graph {
    let mut edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
    if n >= 3 {
        edges.push((n - 1, 0));
    }
    Graph::from_edges(n, &edges).expect("valid cycle")
}

pub fn complete(n: usize) -> Graph {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            edges.push((i, j));
        }
    }
    Graph::from_edges(n, &edges).expect("valid clique")
}

/// `K_{1,n}` with centre 0.
pub fn star(n: usize) -> Graph {
    let edges: Vec<_> = (1..=n).map(|i| (0, i)).collect();
    Graph::from_edges(n + 1, &edges).expect("valid star")
}

/// Complete bipartite graph with sides `0..a` and `a..a+b`.
pub fn complete_bipartite(a: usize, b: usize) -> Graph {
    let mut edges = Vec::new();
    for i in 0..a {
        for j in 0..b {
            edges.push((i, a + j));
        }
    }
    Graph::from_edges(a + b, &edges).expect("valid biclique")
}

/// Vertex of the product `G1 □ G2` representing `(u1, u2)`: the rank of
/// `u1` in `V(G1)` times `|V(G2)|` plus the rank of `u2` in `V(G2)`.
pub fn product_vertex(g1: &Graph, g2: &Graph, u1: Vertex, u2: Vertex) -> Result<Vertex> {
    let r1 = g1.vertices().position(|v| v == u1);
    let r2 = g2.vertices().position(|v| v == u2);
    match (r1, r2) {
        (Some(a), Some(b)) => Ok(a * g2.n() + b),
        _ => Err(Error::invalid(format!("({u1}, {u2}) is not a product vertex"))),
    }
}

/// Cartesian product, with vertices numbered as in [`product_vertex`].
pub fn cartesian_product(g1: &Graph, g2: &Graph) -> Graph {
    let v1: Vec<Vertex> = g1.vertices().collect();
    let v2: Vec<Vertex> = g2.vertices().collect();
    let r1: BTreeMap<Vertex, usize> = v1.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let r2: BTreeMap<Vertex, usize> = v2.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let n2 = v2.len();
    let mut edges = Vec::new();
    for (a, b) in g1.edges() {
        for j in 0..n2 {
            edges.push((r1[&a] * n2 + j, r1[&b] * n2 + j));
        }
    }
    for (a, b) in g2.edges() {
        for i in 0..v1.len() {
            edges.push((i * n2 + r2[&a], i * n2 + r2[&b]));
        }
    }
    Graph::from_edges(v1.len() * n2, &edges).expect("valid product")
}

/// `P_k □ P_l`; vertex `(i, j)` is `i * l + j`.
pub fn grid(k: usize, l: usize) -> Graph {
    cartesian_product(&path(k), &path(l))
}

/// Every labelled tree on `0..k`, in lexicographic order of Prüfer codes.
pub fn enumerate_labelled_trees(k: usize) -> Result<Vec<Graph>> {
    limits::check("enumerate_labelled_trees", k, TREES_MAX_K)?;
    match k {
        0 => return Err(Error::precondition("a tree needs at least one vertex")),
        1 => return Ok(vec![Graph::edgeless(1)]),
        2 => return Ok(vec![path(2)]),
        _ => {}
    }
    let len = k - 2;
    let total = k.pow(len as u32);
    let mut out = Vec::with_capacity(total);
    let mut code = vec![0usize; len];
    for _ in 0..total {
        out.push(prufer_decode(&code, k));
        for pos in (0..len).rev() {
            code[pos] += 1;
            if code[pos] < k {
                break;
            }
            code[pos] = 0;
        }
    }
    Ok(out)
}

/// Tree on `0..k` with the given Prüfer code (length `k - 2`).
pub fn prufer_decode(code: &[usize], k: usize) -> Graph {
    let mut degree = vec![1usize; k];
    for &c in code {
        degree[c] += 1;
    }
    let mut edges = Vec::with_capacity(k - 1);
    let mut leaves: BTreeSet<usize> = (0..k).filter(|&v| degree[v] == 1).collect();
    for &c in code {
        let leaf = leaves.pop_first().expect("a leaf exists");
        edges.push((leaf, c));
        degree[c] -= 1;
        if degree[c] == 1 {
            leaves.insert(c);
        }
    }
    let rest: Vec<usize> = leaves.into_iter().collect();
    edges.push((rest[0], rest[1]));
    Graph::from_edges(k, &edges).expect("valid tree")
}

/// One representative per isomorphism class of trees on `n` vertices.
pub fn nonisomorphic_trees(n: usize) -> Vec<Graph> {
    grow(n, true)
}

/// One representative per isomorphism class of graphs on `n` vertices.
pub fn nonisomorphic_graphs(n: usize) -> Result<Vec<Graph>> {
    limits::check("nonisomorphic_graphs", n, GRAPHS_MAX_N)?;
    Ok(grow(n, false))
}

fn grow(n: usize, trees: bool) -> Vec<Graph> {
    if n == 0 {
        return if trees { Vec::new() } else { vec![Graph::new()] };
    }
    let mut level = vec![Graph::edgeless(1)];
    for size in 1..n {
        let mut seen: BTreeMap<Vec<u64>, Graph> = BTreeMap::new();
        for g in &level {
            let subsets: Vec<Vec<usize>> = if trees {
                (0..size).map(|v| vec![v]).collect()
            } else {
                (0..1usize << size)
                    .map(|m| (0..size).filter(|&i| m >> i & 1 == 1).collect())
                    .collect()
            };
            for nb in subsets {
                let mut h = g.clone();
                h.insert_vertex(size);
                for v in nb {
                    h.insert_edge(v, size);
                }
                let key = key_of(&BitGraph::from_graph(&h).expect("small graph"));
                seen.entry(key).or_insert(h);
            }
        }
        level = seen.into_values().collect();
    }
    level
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cayley_counts() {
        for (k, count) in [(1, 1), (2, 1), (3, 3), (4, 16), (5, 125), (6, 1296)] {
            let trees = enumerate_labelled_trees(k).unwrap();
            assert_eq!(trees.len(), count);
            assert!(trees.iter().all(Graph::is_tree));
            let distinct: BTreeSet<_> = trees.iter().map(|t| t.edges()).collect();
            assert_eq!(distinct.len(), count);
        }
        assert!(enumerate_labelled_trees(9).is_err());
    }

    #[test]
    fn isomorphism_class_counts() {
        let trees: Vec<usize> = (1..=9).map(|n| nonisomorphic_trees(n).len()).collect();
        assert_eq!(trees, vec![1, 1, 1, 2, 3, 6, 11, 23, 47]);
        let graphs: Vec<usize> = (0..=6).map(|n| nonisomorphic_graphs(n).unwrap().len()).collect();
        assert_eq!(graphs, vec![1, 1, 2, 4, 11, 34, 156]);
    }

    #[test]
    fn product_numbering() {
        let g = grid(2, 3);
        assert_eq!(g.n(), 6);
        assert_eq!(g.m(), 7);
        assert!(g.has_edge(0, 3) && g.has_edge(1, 2) && !g.has_edge(2, 3));
        assert_eq!(product_vertex(&path(2), &path(3), 1, 2).unwrap(), 5);
    }
}
