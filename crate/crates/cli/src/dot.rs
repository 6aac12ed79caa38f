//! DOT renderings for the objects the CLI emits.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use kladder::decomp::TreeDecomposition;
use kladder::minors::MinorModel;

fn set_label(set: &BTreeSet<usize>) -> String {
    let items: Vec<String> = set.iter().map(usize::to_string).collect();
    format!("{{{}}}", items.join(","))
}

pub fn decomposition_to_dot(d: &TreeDecomposition) -> String {
    let mut out = String::from("graph T {\n  node [shape=box];\n");
    for (x, bag) in d.bags() {
        writeln!(out, "  {x} [label=\"{x}: {}\"];", set_label(bag)).expect("string write");
    }
    for (x, y) in d.tree().edges() {
        writeln!(out, "  {x} -- {y};").expect("string write");
    }
    out.push_str("}\n");
    out
}

/// The host graph with each vertex labelled by the pattern vertex whose
/// branch set holds it; edges inside a branch set are drawn bold.
pub fn model_to_dot(m: &MinorModel) -> String {
    let owner = |v: usize| m.branch_sets.iter().find(|(_, b)| b.contains(&v)).map(|(&x, _)| x);
    let mut out = String::from("graph H {\n");
    for v in m.host.vertices() {
        match owner(v) {
            Some(x) => writeln!(out, "  {v} [label=\"{v} ({x})\", style=filled];"),
            None => writeln!(out, "  {v};"),
        }
        .expect("string write");
    }
    for (u, v) in m.host.edges() {
        let inner = owner(u).is_some() && owner(u) == owner(v);
        let style = if inner { " [style=bold]" } else { "" };
        writeln!(out, "  {u} -- {v}{style};").expect("string write");
    }
    out.push_str("}\n");
    out
}
