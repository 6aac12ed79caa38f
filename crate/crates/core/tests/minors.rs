use std::collections::{BTreeMap, BTreeSet};

use itertools::Itertools;
use kladder::canon::canonical_form;
use kladder::generators::{grid, nonisomorphic_graphs, nonisomorphic_trees, path, prufer_decode, star};
use kladder::minors::*;
use kladder::{Graph, Vertex};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Canonical keys of every minor of `g`, by closing under single vertex
/// deletions, edge deletions and edge contractions.
fn all_minors(g: &Graph) -> BTreeSet<Vec<u8>> {
    let mut seen = BTreeSet::new();
    let mut stack = vec![g.clone()];
    while let Some(h) = stack.pop() {
        if !seen.insert(canonical_form(&h).unwrap().key) {
            continue;
        }
        for v in h.vertices() {
            stack.push(h.remove_vertex(v));
        }
        for (u, v) in h.edges() {
            stack.push(h.remove_edges(&[(u, v)]));
            stack.push(h.contract_edge(u, v).unwrap());
        }
    }
    seen
}

#[test]
fn search_agrees_with_contraction_oracle() {
    let patterns: Vec<Graph> = (1..=3).flat_map(|n| nonisomorphic_graphs(n).unwrap()).collect();
    let mut checked = 0;
    for n in 1..=6 {
        for g in nonisomorphic_graphs(n).unwrap() {
            let minors = all_minors(&g);
            for h in &patterns {
                let expected = minors.contains(&canonical_form(h).unwrap().key);
                let found = find_minor_model(h, &g).unwrap();
                assert_eq!(found.is_some(), expected, "{h:?} in {g:?}");
                if let Some(m) = found {
                    assert!(m.validate().is_ok());
                }
                checked += 1;
            }
        }
    }
    assert!(checked > 1000);
}

#[test]
fn search_respects_caps() {
    assert!(matches!(find_minor_model(&path(7), &path(8)), Err(kladder::Error::SizeLimit { .. })));
    assert!(matches!(find_minor_model(&path(2), &path(15)), Err(kladder::Error::SizeLimit { .. })));
}

#[test]
fn erdos_szekeres_is_exhaustively_sound() {
    for r in 1..=4 {
        for s in 1..=4 {
            let n = (r - 1) * (s - 1) + 1;
            for perm in (0..n as i64).permutations(n) {
                let arm = erdos_szekeres(&perm, r, s).unwrap();
                assert!(check_monotone(&perm, &arm).is_ok());
                let len = match &arm {
                    Monotone::Increasing(i) => {
                        assert_eq!(i.len(), r);
                        i.len()
                    }
                    Monotone::Decreasing(i) => {
                        assert_eq!(i.len(), s);
                        i.len()
                    }
                };
                assert!(len >= 1);
            }
        }
    }
}

fn check_arm(t: &Graph, k: usize, arm: &TreeArm) {
    match arm {
        TreeArm::Leaves(v) => {
            assert_eq!(v.len(), k);
            assert_eq!(v.iter().collect::<BTreeSet<_>>().len(), k);
            assert!(v.iter().all(|&x| t.degree(x) == 1));
        }
        TreeArm::Path(p) => {
            assert_eq!(p.len(), k);
            assert!(t.is_path(p));
        }
    }
}

#[test]
fn leaves_or_path_on_every_tree_of_the_threshold_size() {
    for k in 1usize..=5 {
        let n = (k - 1) * k.saturating_sub(2) + 2;
        for t in nonisomorphic_trees(n) {
            check_arm(&t, k, &tree_leaves_or_path(&t, k).unwrap());
        }
    }
}

#[test]
fn spider() {
    for k in 3..=5 {
        // centre 0 and k-1 legs of k-1 vertices each
        let mut edges = Vec::new();
        let mut next = 1;
        for _ in 0..k - 1 {
            let mut prev = 0;
            for _ in 0..k - 1 {
                edges.push((prev, next));
                prev = next;
                next += 1;
            }
        }
        let t = Graph::from_edges(next, &edges).unwrap();
        assert!(t.n() >= (k - 1) * (k - 2) + 2);
        check_arm(&t, k, &tree_leaves_or_path(&t, k).unwrap());
    }
}

#[test]
fn nested_intervals_on_p9() {
    let g = path(9);
    let p: Vec<Vertex> = (0..9).collect();
    // the first set wraps around the other two through extra vertices
    let mut h = g.clone();
    let extra = [(0, 9), (9, 10), (10, 8)];
    for &(u, v) in &extra {
        h = h.union(&Graph::from_edges(11, &[(u, v)]).unwrap());
    }
    let sets = vec![BTreeSet::from([0, 9, 10, 8]), BTreeSet::from([2, 3]), BTreeSet::from([5, 6])];
    let out = private_intervals(&h, &p, &sets, 3).unwrap();
    assert!(check_private_intervals(&p, &sets, &out).is_ok());
    assert_eq!(out.achieved(), 3);
    assert!(out.prefix_end < 8);
}

#[test]
fn consecutive_blocks_are_all_kept() {
    for m in 1..=6 {
        let g = path(2 * m);
        let p: Vec<Vertex> = (0..2 * m).collect();
        let sets: Vec<BTreeSet<Vertex>> = (0..m).map(|i| BTreeSet::from([2 * i, 2 * i + 1])).collect();
        let out = private_intervals(&g, &p, &sets, m).unwrap();
        assert_eq!(out.achieved(), m);
        assert!(check_private_intervals(&p, &sets, &out).is_ok());
    }
}

/// A path `0..len` with `count` disjoint connected sets, each a set of
/// path vertices joined through one private hub vertex.
fn hub_instance(rng: &mut ChaCha8Rng, len: usize, count: usize) -> (Graph, Vec<Vertex>, Vec<BTreeSet<Vertex>>) {
    let mut owner: Vec<Option<usize>> = vec![None; len];
    for (i, o) in owner.iter_mut().enumerate() {
        if i < count || rng.gen_bool(0.6) {
            *o = Some(if i < count { i } else { rng.gen_range(0..count) });
        }
    }
    let mut edges: Vec<(Vertex, Vertex)> = (1..len).map(|i| (i - 1, i)).collect();
    let mut sets = vec![BTreeSet::new(); count];
    for (i, o) in owner.iter().enumerate() {
        if let Some(c) = *o {
            edges.push((i, len + c));
            sets[c].insert(i);
        }
    }
    for (c, s) in sets.iter_mut().enumerate() {
        s.insert(len + c);
    }
    let g = Graph::from_edges(len + count, &edges).unwrap();
    (g, (0..len).collect(), sets)
}

proptest! {
    #[test]
    fn private_intervals_always_check(seed in any::<u64>(), len in 3usize..16, count in 1usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let count = count.min(len);
        let (g, p, sets) = hub_instance(&mut rng, len, count);
        let out = private_intervals(&g, &p, &sets, usize::MAX).unwrap();
        prop_assert!(out.achieved() >= 1);
        prop_assert!(check_private_intervals(&p, &sets, &out).is_ok());
    }

    #[test]
    fn contracted_graphs_are_found(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(3..=8);
        let p = rng.gen_range(0.3..0.7);
        let mut g = Graph::edgeless(n);
        for u in 0..n {
            for v in u + 1..n {
                if rng.gen_bool(p) {
                    g = g.union(&Graph::from_edges(n, &[(u, v)]).unwrap());
                }
            }
        }
        let mut h = g.clone();
        while h.n() > 6 || (h.m() > 0 && rng.gen_bool(0.5)) {
            let edges = h.edges();
            if edges.is_empty() {
                let v = h.vertices().next().unwrap();
                h = h.remove_vertex(v);
            } else {
                let (u, v) = edges[rng.gen_range(0..edges.len())];
                h = h.contract_edge(u, v).unwrap();
            }
        }
        let m = find_minor_model(&h, &g).unwrap();
        prop_assert!(m.is_some());
        prop_assert!(m.unwrap().validate().is_ok());
    }
}

/// The structural check that ladder rows stay on their input rows: a row
/// branch set meets no other row's used prefix, and meets its own row.
fn rows_correspond(out: &LadderExtraction, rows: &[Vec<Vertex>]) -> bool {
    let l = out.ladder.l;
    (0..out.ladder.k).all(|a| {
        (0..l).all(|q| {
            let b = &out.model.branch_sets[&(a * l + q)];
            b.iter().any(|v| rows[a].contains(v))
                && rows.iter().enumerate().all(|(o, r)| o == a || r[..=out.prefix_ends[o]].iter().all(|v| !b.contains(v)))
        })
    })
}

#[test]
fn planted_grids_are_recovered() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for k in 2..=3 {
        for l in 2..=6 {
            for _ in 0..5 {
                let mut g = grid(k, l);
                for _ in 0..rng.gen_range(0..=3) {
                    let (u, v) = (rng.gen_range(0..k * l), rng.gen_range(0..k * l));
                    if u != v {
                        g = g.union(&Graph::from_edges(k * l, &[(u, v)]).unwrap());
                    }
                }
                let rows: Vec<Vec<Vertex>> = (0..k).map(|i| (i * l..i * l + l).collect()).collect();
                let cols: Vec<BTreeSet<Vertex>> = (0..l).map(|j| (0..k).map(|i| i * l + j).collect()).collect();
                let out = extract_ladder(&g, &rows, &cols).unwrap();
                assert!(out.ladder.length() + 1 >= l);
                assert!(out.model.validate().is_ok());
                assert!(rows_correspond(&out, &rows));
            }
        }
    }
}

#[test]
fn ladder_with_chord_and_single_row() {
    let mut g = grid(2, 5);
    g = g.union(&Graph::from_edges(10, &[(0, 7)]).unwrap());
    let rows = vec![(0..5).collect::<Vec<_>>(), (5..10).collect()];
    let cols: Vec<BTreeSet<Vertex>> = (0..5).map(|j| BTreeSet::from([j, 5 + j])).collect();
    let out = extract_ladder(&g, &rows, &cols).unwrap();
    assert!(out.model.validate().is_ok());
    assert_eq!(out.ladder.k, 2);
    assert!(rows_correspond(&out, &rows));

    let singles: Vec<BTreeSet<Vertex>> = (0..6).map(|v| BTreeSet::from([v])).collect();
    let out = extract_ladder(&path(6), &[(0..6).collect()], &singles).unwrap();
    assert_eq!(out.ladder.graph, path(6));
}

#[test]
fn extraction_rejects_bad_input() {
    let g = grid(2, 3);
    let rows = vec![vec![0, 1, 2], vec![3, 4, 5]];
    let cols = vec![BTreeSet::from([0, 3]), BTreeSet::from([1])];
    assert!(extract_ladder(&g, &rows, &cols).is_err());
    let overlapping = vec![vec![0, 1, 2], vec![2, 5]];
    assert!(extract_ladder(&g, &overlapping, &[BTreeSet::from([2])]).is_err());
}

/// Least spanning tree of a ladder column in row indices, recomputed.
fn shape(lad: &KLadder, j: usize) -> BTreeSet<(usize, usize)> {
    let mut comp: Vec<usize> = (0..lad.k).collect();
    let mut out = BTreeSet::new();
    for (a, b) in (0..lad.k).tuple_combinations() {
        if lad.graph.has_edge(lad.vertex(a, j), lad.vertex(b, j)) && comp[a] != comp[b] {
            let (from, to) = (comp[a], comp[b]);
            comp.iter_mut().filter(|c| **c == from).for_each(|c| *c = to);
            out.insert((a, b));
        }
    }
    out
}

#[test]
fn long_random_ladders_yield_tree_times_path() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for k in 1..=4 {
        for l in 1..=3 {
            let cols = cayley_bound(k, l);
            let trees: Vec<Graph> = (0..cols)
                .map(|_| {
                    if k <= 2 {
                        path(k)
                    } else {
                        let code: Vec<usize> = (0..k - 2).map(|_| rng.gen_range(0..k)).collect();
                        prufer_decode(&code, k)
                    }
                })
                .collect();
            let lad = make_k_ladder(k, cols, &trees).unwrap();
            let (t, m) = tree_times_path_from_ladder(&lad, l).unwrap();
            assert!(m.validate().is_ok());
            // the model's column for step q starts at a column of shape t
            let tshape: BTreeSet<(usize, usize)> = t.edges().into_iter().collect();
            for q in 0..l {
                let start = m.branch_sets[&q].iter().map(|v| v % cols).min().unwrap();
                assert_eq!(shape(&lad, start), tshape);
            }
        }
    }
}

#[test]
fn tree_times_path_minors() {
    assert!(has_minor_tree_times_path(&Graph::edgeless(1), 1, 2).unwrap().is_none());
    assert!(has_minor_tree_times_path(&grid(2, 3), 2, 3).unwrap().is_some());
    assert!(has_minor_tree_times_path(&star(5), 2, 2).unwrap().is_none());
    let (t, m) = has_minor_tree_times_path(&grid(3, 3), 3, 3).unwrap().unwrap();
    assert!(t.is_tree() && m.validate().is_ok());
    assert!(has_minor_tree_times_path(&grid(2, 7), 3, 2).unwrap().is_some());
    assert!(has_minor_tree_times_path(&star(8), 3, 2).unwrap().is_none());
}

#[test]
fn model_json_has_string_keys() {
    let m = MinorModel::identity(&path(2));
    let text = serde_json::to_string(&m).unwrap();
    assert!(text.contains(r#""branch_sets":{"0":[0],"1":[1]}"#));
    let back: MinorModel = serde_json::from_str(&text).unwrap();
    assert_eq!(back, m);
    let _: BTreeMap<Vertex, BTreeSet<Vertex>> = back.branch_sets;
}
