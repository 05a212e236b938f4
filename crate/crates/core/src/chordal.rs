//! Maximum cardinality search, perfect elimination tests and maximal cliques
//! of chordal graphs.

use fixedbitset::FixedBitSet;

use crate::error::{MecError, Result};
use crate::graph::{MixedGraph, Vertex, VertexSet};

/// Visit order of maximum cardinality search over `mask`.
///
/// Ties go to the vertex with the lowest rank; without `rank` the rank of a
/// vertex is its index.
pub(crate) fn mcs_order(adj: &[VertexSet], mask: &VertexSet, rank: Option<&[usize]>) -> Vec<Vertex> {
    let members: Vec<Vertex> = mask.ones().collect();
    let n = mask.len();
    let mut weight = vec![0usize; n];
    let mut visited = FixedBitSet::with_capacity(n);
    let mut order = Vec::with_capacity(members.len());
    for _ in 0..members.len() {
        let mut best: Option<Vertex> = None;
        for &v in &members {
            if visited.contains(v) {
                continue;
            }
            best = match best {
                None => Some(v),
                Some(b) => {
                    let key = |x: Vertex| (weight[x], std::cmp::Reverse(rank.map_or(x, |r| r[x])));
                    if key(v) > key(b) {
                        Some(v)
                    } else {
                        Some(b)
                    }
                }
            };
        }
        let v = best.expect("unvisited vertex");
        visited.insert(v);
        order.push(v);
        for w in adj[v].ones() {
            if mask.contains(w) && !visited.contains(w) {
                weight[w] += 1;
            }
        }
    }
    order
}

/// For each vertex, the set of its neighbours visited earlier in `order`.
pub(crate) fn earlier_neighbors(adj: &[VertexSet], order: &[Vertex], n: usize) -> Vec<VertexSet> {
    let mut seen = FixedBitSet::with_capacity(n);
    let mut out = vec![FixedBitSet::with_capacity(n); n];
    for &v in order {
        let mut e = adj[v].clone();
        e.intersect_with(&seen);
        out[v] = e;
        seen.insert(v);
    }
    out
}

/// Tests whether the reverse of `order` is a perfect elimination ordering.
pub(crate) fn is_reverse_peo(adj: &[VertexSet], order: &[Vertex], n: usize) -> bool {
    let earlier = earlier_neighbors(adj, order, n);
    let mut pos = vec![0usize; n];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    for &v in order {
        let e = &earlier[v];
        let Some(u) = e.ones().max_by_key(|&u| pos[u]) else {
            continue;
        };
        let mut rest = e.clone();
        rest.set(u, false);
        if !rest.is_subset(&earlier[u]) {
            return false;
        }
    }
    true
}

pub(crate) fn is_chordal_masked(adj: &[VertexSet], mask: &VertexSet) -> bool {
    let order = mcs_order(adj, mask, None);
    is_reverse_peo(adj, &order, mask.len())
}

/// Chordality of an undirected graph.
pub fn is_chordal(g: &MixedGraph) -> Result<bool> {
    if !g.is_undirected_graph() {
        return Err(MecError::DirectedEdgesPresent);
    }
    let n = g.vertex_count();
    let mut all = FixedBitSet::with_capacity(n);
    all.insert_range(..);
    Ok(is_chordal_masked(&g.undirected_adjacency(), &all))
}

/// Maximal cliques of the chordal graph induced on `mask`, ordered by the
/// visit position of the vertex completing each clique.
pub(crate) fn maximal_cliques(adj: &[VertexSet], mask: &VertexSet, order: &[Vertex]) -> Vec<VertexSet> {
    let n = mask.len();
    let earlier = earlier_neighbors(adj, order, n);
    let candidates: Vec<VertexSet> = order
        .iter()
        .map(|&v| {
            let mut c = earlier[v].clone();
            c.insert(v);
            c
        })
        .collect();
    // A candidate is maximal iff no later candidate contains it; earlier ones
    // are no larger in the MCS order restricted to their vertices.
    let mut out = Vec::new();
    for (i, c) in candidates.iter().enumerate() {
        let dominated = candidates[i + 1..].iter().any(|d| c.is_subset(d));
        if !dominated {
            out.push(c.clone());
        }
    }
    out
}
