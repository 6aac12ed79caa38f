//! Text formats: JSON (via serde), a plain edge list, and DOT export.
//!
//! Edge-list format: optional `#` comment lines, a header line `n m`, then
//! `m` lines `u v` over the vertices `0..n`.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, Vertex};

#[derive(Serialize, Deserialize)]
pub(crate) struct GraphJson {
    n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    vertices: Option<Vec<Vertex>>,
    edges: Vec<[Vertex; 2]>,
}

impl TryFrom<GraphJson> for Graph {
    type Error = Error;

    fn try_from(j: GraphJson) -> Result<Graph> {
        let vertices = j.vertices.unwrap_or_else(|| (0..j.n).collect());
        if vertices.len() != j.n {
            return Err(Error::invalid(format!(
                "n = {} but {} vertices listed",
                j.n,
                vertices.len()
            )));
        }
        let g = Graph::from_parts(vertices, j.edges.iter().map(|e| (e[0], e[1])))?;
        if g.n() != j.n {
            return Err(Error::invalid("duplicate vertex identities"));
        }
        Ok(g)
    }
}

impl From<Graph> for GraphJson {
    fn from(g: Graph) -> GraphJson {
        let n = g.n();
        let default = g.vertices().eq(0..n);
        GraphJson {
            n,
            vertices: (!default).then(|| g.vertices().collect()),
            edges: g.edges().into_iter().map(|(u, v)| [u, v]).collect(),
        }
    }
}

impl Serialize for Graph {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        GraphJson::from(self.clone()).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Graph {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = GraphJson::deserialize(d)?;
        Graph::try_from(j).map_err(serde::de::Error::custom)
    }
}

pub fn graph_to_json(g: &Graph) -> String {
    serde_json::to_string(g).expect("graphs serialise")
}

pub fn graph_from_json(text: &str) -> Result<Graph> {
    serde_json::from_str(text).map_err(|e| Error::parse(e.to_string()))
}

pub fn graph_to_edge_list(g: &Graph) -> Result<String> {
    if !g.vertices().eq(0..g.n()) {
        return Err(Error::invalid("edge lists need vertices 0..n"));
    }
    let mut out = format!("{} {}\n", g.n(), g.m());
    for (u, v) in g.edges() {
        writeln!(out, "{u} {v}").expect("string write");
    }
    Ok(out)
}

pub fn graph_from_edge_list(text: &str) -> Result<Graph> {
    let mut lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'));
    let pair = |line: &str| -> Result<(usize, usize)> {
        let nums: Vec<&str> = line.split_whitespace().collect();
        if nums.len() != 2 {
            return Err(Error::parse(format!("expected two integers, got `{line}`")));
        }
        let p = |s: &str| s.parse::<usize>().map_err(|_| Error::parse(format!("bad integer `{s}`")));
        Ok((p(nums[0])?, p(nums[1])?))
    };
    let (n, m) = pair(lines.next().ok_or_else(|| Error::parse("missing header"))?)?;
    let edges = lines.map(pair).collect::<Result<Vec<_>>>()?;
    if edges.len() != m {
        return Err(Error::parse(format!("header says {m} edges, found {}", edges.len())));
    }
    Graph::from_edges(n, &edges)
}

/// Reads either JSON (first non-blank character `{`) or an edge list.
pub fn parse_graph(text: &str) -> Result<Graph> {
    if text.trim_start().starts_with('{') {
        graph_from_json(text)
    } else {
        graph_from_edge_list(text)
    }
}

pub fn graph_to_dot(g: &Graph) -> String {
    let mut out = String::from("graph G {\n");
    for v in g.vertices() {
        writeln!(out, "  {v};").expect("string write");
    }
    for (u, v) in g.edges() {
        writeln!(out, "  {u} -- {v};").expect("string write");
    }
    out.push_str("}\n");
    out
}
