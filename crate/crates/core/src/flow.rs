//! Vertex-disjoint paths between vertex sets (Menger) by augmenting paths on
//! the split-vertex network.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, Vertex};

/// A maximum family of disjoint (`Z1`, `Z2`)-paths and a minimum cut.
///
/// Each path meets `Z1` only in its first vertex and `Z2` only in its last;
/// a vertex of `Z1 ∩ Z2` is a path on its own.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Menger {
    pub count: usize,
    pub paths: Vec<Vec<Vertex>>,
    pub cut: BTreeSet<Vertex>,
}

struct Network {
    head: Vec<usize>,
    cap: Vec<i64>,
    adj: Vec<Vec<usize>>,
}

impl Network {
    fn new(n: usize) -> Self {
        Network { head: Vec::new(), cap: Vec::new(), adj: vec![Vec::new(); n] }
    }

    fn arc(&mut self, a: usize, b: usize, c: i64) {
        self.adj[a].push(self.head.len());
        self.head.push(b);
        self.cap.push(c);
        self.adj[b].push(self.head.len());
        self.head.push(a);
        self.cap.push(0);
    }

    fn augment(&mut self, s: usize, t: usize) -> bool {
        let mut prev: Vec<Option<usize>> = vec![None; self.adj.len()];
        let mut seen = vec![false; self.adj.len()];
        seen[s] = true;
        let mut queue = VecDeque::from([s]);
        while let Some(x) = queue.pop_front() {
            for &e in &self.adj[x] {
                let y = self.head[e];
                if self.cap[e] > 0 && !seen[y] {
                    seen[y] = true;
                    prev[y] = Some(e);
                    queue.push_back(y);
                }
            }
        }
        if !seen[t] {
            return false;
        }
        let mut x = t;
        while let Some(e) = prev[x] {
            self.cap[e] -= 1;
            self.cap[e ^ 1] += 1;
            x = self.head[e ^ 1];
        }
        true
    }

    fn reachable(&self, s: usize) -> Vec<bool> {
        let mut seen = vec![false; self.adj.len()];
        seen[s] = true;
        let mut stack = vec![s];
        while let Some(x) = stack.pop() {
            for &e in &self.adj[x] {
                let y = self.head[e];
                if self.cap[e] > 0 && !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        seen
    }
}

/// Maximum number of pairwise vertex-disjoint (`z1`, `z2`)-paths in `g`.
pub fn max_disjoint_paths(g: &Graph, z1: &BTreeSet<Vertex>, z2: &BTreeSet<Vertex>) -> Result<Menger> {
    if let Some(v) = z1.iter().chain(z2).find(|&&v| !g.has_vertex(v)) {
        return Err(Error::invalid(format!("vertex {v} is not in the graph")));
    }
    let vs: Vec<Vertex> = g.vertices().collect();
    let pos: BTreeMap<Vertex, usize> = vs.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let n = vs.len();
    let (s, t) = (2 * n, 2 * n + 1);
    let big = n as i64 + 1;
    let mut net = Network::new(2 * n + 2);
    for i in 0..n {
        net.arc(2 * i, 2 * i + 1, 1);
    }
    for (u, v) in g.edges() {
        let (a, b) = (pos[&u], pos[&v]);
        net.arc(2 * a + 1, 2 * b, big);
        net.arc(2 * b + 1, 2 * a, big);
    }
    for z in z1 {
        net.arc(s, 2 * pos[z], big);
    }
    for z in z2 {
        net.arc(2 * pos[z] + 1, t, big);
    }
    let mut count = 0;
    while net.augment(s, t) {
        count += 1;
    }
    let reach = net.reachable(s);
    let cut: BTreeSet<Vertex> = (0..n).filter(|&i| reach[2 * i] && !reach[2 * i + 1]).map(|i| vs[i]).collect();
    debug_assert_eq!(cut.len(), count);

    // flow on an arc is the residual capacity of its reverse
    let mut used: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for x in 0..net.adj.len() {
        for &e in &net.adj[x] {
            if e % 2 == 0 && net.cap[e ^ 1] > 0 {
                for _ in 0..net.cap[e ^ 1] {
                    used.entry(x).or_default().push(net.head[e]);
                }
            }
        }
    }
    let mut paths = Vec::with_capacity(count);
    for _ in 0..count {
        let mut walk = Vec::new();
        let mut x = s;
        while x != t {
            let y = used.get_mut(&x).and_then(Vec::pop).expect("flow conservation");
            if y < 2 * n && y % 2 == 0 {
                walk.push(vs[y / 2]);
            }
            x = y;
        }
        paths.push(trim(&walk, z1, z2));
    }
    Ok(Menger { count, paths, cut })
}

/// The segment from the last vertex in `z1` to the first later vertex in `z2`.
fn trim(walk: &[Vertex], z1: &BTreeSet<Vertex>, z2: &BTreeSet<Vertex>) -> Vec<Vertex> {
    let start = walk.iter().rposition(|v| z1.contains(v)).expect("starts in z1");
    let end = start + walk[start..].iter().position(|v| z2.contains(v)).expect("ends in z2");
    walk[start..=end].to_vec()
}

/// Checks that `paths` are disjoint (`z1`, `z2`)-paths of `g`.
pub fn check_paths(
    g: &Graph,
    z1: &BTreeSet<Vertex>,
    z2: &BTreeSet<Vertex>,
    paths: &[Vec<Vertex>],
) -> std::result::Result<(), String> {
    let mut seen = BTreeSet::new();
    for p in paths {
        if !g.is_path(p) {
            return Err(format!("{p:?} is not a path"));
        }
        if !z1.contains(&p[0]) || !z2.contains(p.last().expect("nonempty")) {
            return Err(format!("{p:?} does not join the two sets"));
        }
        for &v in p {
            if !seen.insert(v) {
                return Err(format!("vertex {v} is used twice"));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{cycle, grid};

    fn set(v: &[Vertex]) -> BTreeSet<Vertex> {
        v.iter().copied().collect()
    }

    #[test]
    fn grid_rows() {
        let g = grid(3, 4);
        let (a, b) = (set(&[0, 4, 8]), set(&[3, 7, 11]));
        let m = max_disjoint_paths(&g, &a, &b).unwrap();
        assert_eq!(m.count, 3);
        assert!(check_paths(&g, &a, &b, &m.paths).is_ok());
        assert_eq!(m.cut.len(), 3);
    }

    #[test]
    fn cycle_cut() {
        let g = cycle(6);
        let m = max_disjoint_paths(&g, &set(&[0, 1]), &set(&[3, 4])).unwrap();
        assert_eq!(m.count, 2);
        let m = max_disjoint_paths(&g, &set(&[0]), &set(&[0])).unwrap();
        assert_eq!(m.paths, vec![vec![0]]);
        let g2 = g.remove_vertex(2);
        let m = max_disjoint_paths(&g2, &set(&[0, 1]), &set(&[3, 4])).unwrap();
        assert_eq!(m.count, 1);
        assert!(g2.remove_vertices(&m.cut).shortest_path(1, 3, &BTreeSet::new()).is_none());
    }
}
