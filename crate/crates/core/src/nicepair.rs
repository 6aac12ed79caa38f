//! Good and nice pairs, torsos, and moving disjoint paths between a graph and
//! the torso of a nice pair.
//!
//! A good pair `(U, B)` is a star-shaped decomposition: every edge lies inside
//! `U` or inside a member of `B`, and the private parts `B \ U` are pairwise
//! disjoint. It is nice when, inside every member with the edges among
//! `U ∩ B` removed, any two equal-size subsets of `U ∩ B` are fully linked.

use std::collections::{BTreeMap, BTreeSet};

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::decomp::{Node, TreeDecomposition};
use crate::error::{Error, Result};
use crate::flow::{check_paths, max_disjoint_paths};
use crate::graph::{Graph, Vertex};
use crate::limits;

/// Default cap on `|U ∩ B|` for [`is_nice_pair`].
pub const NICE_MAX_ADHESION: usize = 8;
/// Default cap on `|U ∩ B|` for [`is_nice_pair_exhaustive`].
pub const NICE_EXHAUSTIVE_MAX: usize = 6;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GoodPair {
    graph: Graph,
    u: BTreeSet<Vertex>,
    members: Vec<BTreeSet<Vertex>>,
}

#[derive(Serialize, Deserialize)]
struct GoodPairJson {
    graph: Graph,
    #[serde(rename = "U")]
    u: BTreeSet<Vertex>,
    #[serde(rename = "B")]
    members: Vec<BTreeSet<Vertex>>,
}

impl Serialize for GoodPair {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        GoodPairJson { graph: self.graph.clone(), u: self.u.clone(), members: self.members.clone() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for GoodPair {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = GoodPairJson::deserialize(d)?;
        GoodPair::new(j.graph, j.u, j.members).map_err(serde::de::Error::custom)
    }
}

impl GoodPair {
    /// Checks both conditions of a good pair. `U` may be empty only when the
    /// graph is.
    pub fn new(graph: Graph, u: BTreeSet<Vertex>, members: Vec<BTreeSet<Vertex>>) -> Result<Self> {
        if u.is_empty() && !graph.is_empty() {
            return Err(Error::invalid("U must be nonempty"));
        }
        let vs = graph.vertex_set();
        if !u.is_subset(&vs) || members.iter().any(|b| !b.is_subset(&vs)) {
            return Err(Error::invalid("U and the members must be vertex sets of the graph"));
        }
        for (x, y) in graph.edges() {
            let inside = |b: &BTreeSet<Vertex>| b.contains(&x) && b.contains(&y);
            if !inside(&u) && !members.iter().any(inside) {
                return Err(Error::invalid(format!("edge {x}-{y} is covered by neither U nor a member")));
            }
        }
        let mut private = BTreeSet::new();
        for b in &members {
            for v in b.difference(&u) {
                if !private.insert(*v) {
                    return Err(Error::invalid(format!("vertex {v} is private to two members")));
                }
            }
        }
        Ok(GoodPair { graph, u, members })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn u(&self) -> &BTreeSet<Vertex> {
        &self.u
    }

    pub fn members(&self) -> &[BTreeSet<Vertex>] {
        &self.members
    }

    /// `U ∩ B` for member `i`.
    pub fn attachment(&self, i: usize) -> BTreeSet<Vertex> {
        self.u.intersection(&self.members[i]).copied().collect()
    }

    /// `G[U]` plus a clique on `U ∩ B` for every member `B`.
    pub fn torso(&self) -> Graph {
        let mut t = self.graph.induced(&self.u);
        for i in 0..self.members.len() {
            for (x, y) in self.attachment(i).iter().copied().tuple_combinations() {
                t.insert_edge(x, y);
            }
        }
        t
    }

    /// `G[B]` without the edges inside `U ∩ B`.
    pub fn member_graph(&self, i: usize) -> Graph {
        let inner: Vec<(Vertex, Vertex)> = self.attachment(i).iter().copied().tuple_combinations().collect();
        self.graph.induced(&self.members[i]).remove_edges(&inner)
    }
}

/// Two subsets of `U ∩ B` with too few disjoint paths in the member graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NiceViolation {
    pub member: usize,
    pub z1: BTreeSet<Vertex>,
    pub z2: BTreeSet<Vertex>,
    pub paths: usize,
}

fn check_member(
    p: &GoodPair,
    i: usize,
    pairs: impl Iterator<Item = (BTreeSet<Vertex>, BTreeSet<Vertex>)>,
) -> Result<Option<NiceViolation>> {
    let h = p.member_graph(i);
    for (z1, z2) in pairs {
        let m = max_disjoint_paths(&h, &z1, &z2)?;
        if m.count < z1.len() {
            return Ok(Some(NiceViolation { member: i, z1, z2, paths: m.count }));
        }
    }
    Ok(None)
}

/// Splits `(Z1, Z2)` of equal size with `Z1 ∪ Z2 = x`: each vertex goes to
/// one side or both.
fn maximal_splits(x: &BTreeSet<Vertex>) -> impl Iterator<Item = (BTreeSet<Vertex>, BTreeSet<Vertex>)> + '_ {
    let v: Vec<Vertex> = x.iter().copied().collect();
    (0..3usize.pow(v.len() as u32)).filter_map(move |mut code| {
        let (mut z1, mut z2) = (BTreeSet::new(), BTreeSet::new());
        for &u in &v {
            match code % 3 {
                0 => {
                    z1.insert(u);
                }
                1 => {
                    z2.insert(u);
                }
                _ => {
                    z1.insert(u);
                    z2.insert(u);
                }
            }
            code /= 3;
        }
        (z1.len() == z2.len()).then_some((z1, z2))
    })
}

/// The first member failing the linkage condition, checking only splits that
/// use every vertex of `U ∩ B`; smaller splits extend to these by adding the
/// unused vertices to both sides.
pub fn is_nice_pair(p: &GoodPair) -> Result<Option<NiceViolation>> {
    for i in 0..p.members.len() {
        let x = p.attachment(i);
        limits::check("nice pair attachment", x.len(), NICE_MAX_ADHESION)?;
        if let Some(v) = check_member(p, i, maximal_splits(&x))? {
            return Ok(Some(v));
        }
    }
    Ok(None)
}

/// [`is_nice_pair`] over all pairs of equal-size subsets of `U ∩ B`.
pub fn is_nice_pair_exhaustive(p: &GoodPair) -> Result<Option<NiceViolation>> {
    for i in 0..p.members.len() {
        let x = p.attachment(i);
        limits::check("nice pair attachment", x.len(), NICE_EXHAUSTIVE_MAX)?;
        let pairs = (1..=x.len()).flat_map(|s| {
            let subsets: Vec<BTreeSet<Vertex>> =
                x.iter().copied().combinations(s).map(|c| c.into_iter().collect()).collect();
            subsets.clone().into_iter().cartesian_product(subsets)
        });
        if let Some(v) = check_member(p, i, pairs)? {
            return Ok(Some(v));
        }
    }
    Ok(None)
}

/// A good pair that passed [`is_nice_pair`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NicePair {
    #[serde(flatten)]
    pair: GoodPair,
}

impl NicePair {
    pub fn certify(pair: GoodPair) -> Result<Self> {
        match is_nice_pair(&pair)? {
            None => Ok(NicePair { pair }),
            Some(v) => Err(Error::precondition(format!(
                "member {} has only {} disjoint paths between {:?} and {:?}",
                v.member, v.paths, v.z1, v.z2
            ))),
        }
    }

    pub fn pair(&self) -> &GoodPair {
        &self.pair
    }

    pub fn torso(&self) -> Graph {
        self.pair.torso()
    }
}

/// `(U \ X, {B \ X})` in `G - X`, whose torso is the old torso minus `X`.
pub fn restrict_pair(np: &NicePair, x: &BTreeSet<Vertex>) -> Result<NicePair> {
    let p = &np.pair;
    if !x.is_subset(&p.u) {
        return Err(Error::precondition("X must be a subset of U"));
    }
    let graph = p.graph.remove_vertices(x);
    let u = p.u.difference(x).copied().collect();
    let members = p.members.iter().map(|b| b.difference(x).copied().collect()).collect();
    let out = NicePair::certify(GoodPair::new(graph, u, members)?)?;
    if out.torso() != p.torso().remove_vertices(x) {
        return Err(Error::invalid("internal: restricted torso differs"));
    }
    Ok(out)
}

/// `(V(G) \ (B \ U), {B})` for member `i`.
pub fn single_member_pair(p: &GoodPair, i: usize) -> Result<GoodPair> {
    let b = p.members.get(i).ok_or_else(|| Error::invalid("no such member"))?;
    let private: BTreeSet<Vertex> = b.difference(&p.u).copied().collect();
    let u = p.graph.vertex_set().difference(&private).copied().collect();
    GoodPair::new(p.graph.clone(), u, vec![b.clone()])
}

/// The good pair of a subtree `r` of a decomposition of `g`: `U` is the union
/// of its bags, with one member per component of the rest of the tree.
pub fn pair_from_decomposition(g: &Graph, d: &TreeDecomposition, r: &BTreeSet<Node>) -> Result<GoodPair> {
    if r.is_empty() || !d.tree().is_connected_set(r) {
        return Err(Error::invalid("the node set must induce a nonempty subtree"));
    }
    let bag_union = |nodes: &BTreeSet<Node>| nodes.iter().flat_map(|&x| d.bag(x).iter().copied()).collect();
    let members = d.tree().remove_vertices(r).components().iter().map(bag_union).collect();
    GoodPair::new(g.clone(), bag_union(r), members)
}

fn check_disjoint_paths(g: &Graph, paths: &[Vec<Vertex>]) -> Result<()> {
    let z1 = paths.iter().filter_map(|p| p.first().copied()).collect();
    let z2 = paths.iter().filter_map(|p| p.last().copied()).collect();
    if paths.iter().any(Vec::is_empty) {
        return Err(Error::invalid("empty path"));
    }
    check_paths(g, &z1, &z2, paths).map_err(Error::invalid)
}

/// The `U`-trace of each path: consecutive traced vertices are adjacent in
/// the torso.
pub fn project_paths_to_torso(p: &GoodPair, paths: &[Vec<Vertex>]) -> Result<Vec<Vec<Vertex>>> {
    check_disjoint_paths(&p.graph, paths)?;
    if paths.iter().any(|q| !p.u.contains(&q[0]) || !p.u.contains(q.last().expect("nonempty"))) {
        return Err(Error::precondition("path endpoints must lie in U"));
    }
    let out: Vec<Vec<Vertex>> =
        paths.iter().map(|q| q.iter().filter(|v| p.u.contains(v)).copied().collect()).collect();
    check_disjoint_paths(&p.torso(), &out).map_err(|e| Error::invalid(format!("internal: {e}")))?;
    Ok(out)
}

/// Disjoint paths of the torso turned into disjoint paths of `G` with the same
/// end sets and `U`-trace inside the union of the inputs.
///
/// Members are processed one at a time. Each path meeting `U ∩ B` is cut
/// short between its first and last vertex there, and the cut pieces are
/// reconnected through the member graph by one maximum flow.
pub fn lift_paths_from_torso(np: &NicePair, paths: &[Vec<Vertex>]) -> Result<Vec<Vec<Vertex>>> {
    let p = &np.pair;
    check_disjoint_paths(&p.torso(), paths)?;
    let mut cur: Vec<Vec<Vertex>> = paths.to_vec();
    for i in 0..p.members.len() {
        let x = p.attachment(i);
        let mut heads = BTreeMap::new(); // z1 -> (path index, cut position)
        let mut tails = BTreeMap::new(); // z2 -> (path index, cut position)
        for (j, q) in cur.iter().enumerate() {
            let Some(f) = q.iter().position(|v| x.contains(v)) else { continue };
            let l = q.iter().rposition(|v| x.contains(v)).expect("some vertex is in x");
            heads.insert(q[f], (j, f));
            tails.insert(q[l], (j, l));
        }
        if heads.is_empty() {
            continue;
        }
        let used: BTreeSet<Vertex> = heads.keys().chain(tails.keys()).copied().collect();
        let spare: BTreeSet<Vertex> = x.difference(&used).copied().collect();
        let a: BTreeSet<Vertex> = spare.iter().chain(heads.keys()).copied().collect();
        let b: BTreeSet<Vertex> = spare.iter().chain(tails.keys()).copied().collect();
        let m = max_disjoint_paths(&p.member_graph(i), &a, &b)?;
        if m.count < a.len() {
            return Err(Error::precondition(format!("member {i} cannot reroute the paths")));
        }
        let mut next = cur.clone();
        for route in m.paths.iter().filter(|r| heads.contains_key(&r[0])) {
            let (j, f) = heads[&route[0]];
            let (jj, l) = tails[route.last().expect("nonempty")];
            let mut q: Vec<Vertex> = cur[j][..f].to_vec();
            q.extend(route);
            q.extend(&cur[jj][l + 1..]);
            next[j] = q;
        }
        cur = next;
    }
    check_disjoint_paths(&p.graph, &cur).map_err(|e| Error::invalid(format!("internal: {e}")))?;
    let starts = |ps: &[Vec<Vertex>]| ps.iter().map(|q| q[0]).collect::<BTreeSet<_>>();
    let ends = |ps: &[Vec<Vertex>]| ps.iter().map(|q| *q.last().expect("nonempty")).collect::<BTreeSet<_>>();
    let before: BTreeSet<Vertex> = paths.iter().flatten().copied().collect();
    let trace_ok = cur.iter().flatten().all(|v| !p.u.contains(v) || before.contains(v));
    if starts(&cur) != starts(paths) || ends(&cur) != ends(paths) || !trace_ok {
        return Err(Error::invalid("internal: lifted paths changed their ends or trace"));
    }
    Ok(cur)
}

/// A nice pair of `G` from a nice pair `inner` of the torso of `outer`, with
/// the same torso as `inner`.
///
/// Every outer member `B` goes to a member of its own when `U ∩ B` lies inside
/// the inner `U`, and is otherwise merged into an inner member containing
/// `U ∩ B`.
pub fn compose_nice_pairs(outer: &NicePair, inner: &NicePair) -> Result<NicePair> {
    let (o, n) = (&outer.pair, &inner.pair);
    if n.graph != o.torso() {
        return Err(Error::precondition("inner pair must live in the torso of the outer pair"));
    }
    let mut members = n.members.clone();
    for (i, b) in o.members.iter().enumerate() {
        let x = o.attachment(i);
        if x.is_subset(&n.u) {
            members.push(b.clone());
        } else if let Some(m) = members[..n.members.len()].iter_mut().find(|m| x.is_subset(m)) {
            m.extend(b.iter().copied());
        } else {
            return Err(Error::invalid("internal: an attachment lies in no inner bag"));
        }
    }
    let out = NicePair::certify(GoodPair::new(o.graph.clone(), n.u.clone(), members)?)?;
    if out.torso() != inner.torso() {
        return Err(Error::invalid("internal: composed torso differs"));
    }
    Ok(out)
}
