//! Graph file formats.
//!
//! Edge-list text holds one item per line: `u -- v` (undirected), `u -> v`
//! (directed) or `node u` (vertex declaration). `#` starts a comment. JSON
//! uses `{"vertices": [...], "edges": [{"a": .., "b": .., "directed": bool}]}`.

use serde::{Deserialize, Serialize};

use crate::error::{MecError, Result};
use crate::graph::{MixedGraph, Vertex};

pub fn parse_edge_list(text: &str) -> Result<MixedGraph> {
    let mut g = MixedGraph::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: String| MecError::Parse { line: i + 1, msg };
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks.as_slice() {
            ["node", v] => {
                g.add_vertex(v);
            }
            [a, "--", b] => g.add_undirected_by_name(a, b).map_err(|e| err(e.to_string()))?,
            [a, "->", b] => g.add_directed_by_name(a, b).map_err(|e| err(e.to_string()))?,
            _ => return Err(err(format!("expected `u -- v`, `u -> v` or `node u`, got `{line}`"))),
        }
    }
    Ok(g)
}

/// Serializes with a `node` line per vertex first so that parsing restores
/// the vertex order.
pub fn to_edge_list(g: &MixedGraph) -> String {
    let mut out = String::new();
    for name in g.names() {
        out.push_str(&format!("node {name}\n"));
    }
    out.push_str(&edge_lines(g));
    out
}

/// Edge lines only, directed edges first.
pub fn edge_lines(g: &MixedGraph) -> String {
    let mut out = String::new();
    for (a, b) in g.directed_edges() {
        out.push_str(&format!("{} -> {}\n", g.name(a), g.name(b)));
    }
    for (a, b) in g.undirected_edges() {
        out.push_str(&format!("{} -- {}\n", g.name(a), g.name(b)));
    }
    out
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct JsonEdge {
    pub a: String,
    pub b: String,
    pub directed: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct JsonGraph {
    pub vertices: Vec<String>,
    pub edges: Vec<JsonEdge>,
}

impl From<&MixedGraph> for JsonGraph {
    fn from(g: &MixedGraph) -> Self {
        let edges = g
            .directed_edges()
            .map(|(a, b)| (a, b, true))
            .chain(g.undirected_edges().map(|(a, b)| (a, b, false)))
            .map(|(a, b, directed)| JsonEdge { a: g.name(a).into(), b: g.name(b).into(), directed })
            .collect();
        JsonGraph { vertices: g.names().to_vec(), edges }
    }
}

impl TryFrom<&JsonGraph> for MixedGraph {
    type Error = MecError;

    fn try_from(j: &JsonGraph) -> Result<Self> {
        let mut g = MixedGraph::with_vertices(&j.vertices);
        for e in &j.edges {
            if e.directed {
                g.add_directed_by_name(&e.a, &e.b)?;
            } else {
                g.add_undirected_by_name(&e.a, &e.b)?;
            }
        }
        Ok(g)
    }
}

pub fn parse_json(text: &str) -> Result<MixedGraph> {
    let j: JsonGraph = serde_json::from_str(text).map_err(|e| MecError::Parse { line: e.line(), msg: e.to_string() })?;
    MixedGraph::try_from(&j)
}

pub fn to_json(g: &MixedGraph) -> String {
    serde_json::to_string(&JsonGraph::from(g)).expect("graph serializes")
}

/// Parses either format, choosing JSON when the text starts with `{`.
pub fn parse_graph(text: &str) -> Result<MixedGraph> {
    if text.trim_start().starts_with('{') {
        parse_json(text)
    } else {
        parse_edge_list(text)
    }
}

/// Prior constraint lines `u -> v`, resolved against the vertices of `g`.
pub fn parse_constraints(text: &str, g: &MixedGraph) -> Result<Vec<(Vertex, Vertex)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        let [a, "->", b] = toks.as_slice() else {
            return Err(MecError::Parse { line: i + 1, msg: format!("expected `u -> v`, got `{line}`") });
        };
        out.push((g.vertex(a)?, g.vertex(b)?));
    }
    Ok(out)
}
