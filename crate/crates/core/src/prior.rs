//! Counting under prior knowledge about edge orientations.
//!
//! A hypothesis restricts each skeleton edge `{u, v}` to a non-empty subset of
//! `{u -> v, v -> u}`; a DAG is consistent with it when every one of its
//! edges is allowed. The counting recursion is the unrestricted one with an
//! early zero whenever an orientation step produces a disallowed edge.

use std::collections::BTreeMap;

use fixedbitset::FixedBitSet;
use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::count::{BigCount, Counter, Forbidden, MemoStore};
use crate::error::{MecError, Result};
use crate::graph::{chain_component_sets, validate_essential_graph, MixedGraph, Vertex};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HypothesisGraph {
    names: Vec<String>,
    skeleton: Vec<fixedbitset::FixedBitSet>,
    forbidden: Forbidden,
}

impl HypothesisGraph {
    /// Every orientation allowed on every edge of `g_star`.
    pub fn unconstrained(g_star: &MixedGraph) -> Self {
        Self {
            names: g_star.names().to_vec(),
            skeleton: g_star.skeleton_adjacency(),
            forbidden: Forbidden::none(g_star.vertex_count()),
        }
    }

    /// Hypothesis requiring each listed `u -> v`.
    pub fn from_required(g_star: &MixedGraph, required: &[(Vertex, Vertex)]) -> Result<Self> {
        let mut h = Self::unconstrained(g_star);
        for &(u, v) in required {
            h.require(u, v)?;
        }
        Ok(h)
    }

    /// Hypothesis given as its set of allowed ordered pairs. Every
    /// skeleton edge needs at least one allowed direction.
    pub fn from_allowed_pairs(g_star: &MixedGraph, allowed: &[(Vertex, Vertex)]) -> Result<Self> {
        let mut h = Self::unconstrained(g_star);
        for &(u, v) in allowed {
            h.check_edge(u, v)?;
        }
        for (a, b) in g_star.skeleton() {
            let ab = allowed.contains(&(a, b));
            let ba = allowed.contains(&(b, a));
            match (ab, ba) {
                (false, false) => {
                    return Err(MecError::MalformedHypothesis(format!(
                        "edge {} - {} has no allowed orientation",
                        h.names[a], h.names[b]
                    )))
                }
                (true, false) => h.forbidden.forbid(b, a),
                (false, true) => h.forbidden.forbid(a, b),
                (true, true) => {}
            }
        }
        Ok(h)
    }

    fn check_edge(&self, u: Vertex, v: Vertex) -> Result<()> {
        let n = self.names.len();
        if u >= n || v >= n || !self.skeleton[u].contains(v) {
            let name = |x: Vertex| self.names.get(x).cloned().unwrap_or_else(|| format!("#{x}"));
            return Err(MecError::MalformedHypothesis(format!("{} - {} is not an edge", name(u), name(v))));
        }
        Ok(())
    }

    /// Forbids `v -> u`.
    pub fn require(&mut self, u: Vertex, v: Vertex) -> Result<()> {
        self.check_edge(u, v)?;
        if self.forbidden.is_forbidden(u, v) {
            return Err(MecError::MalformedHypothesis(format!(
                "edge {} - {} has no allowed orientation",
                self.names[u], self.names[v]
            )));
        }
        self.forbidden.forbid(v, u);
        Ok(())
    }

    pub fn allows(&self, u: Vertex, v: Vertex) -> bool {
        !self.forbidden.is_forbidden(u, v)
    }

    /// Every edge of `d` is an allowed orientation.
    pub fn allows_dag(&self, d: &MixedGraph) -> bool {
        d.directed_edges().all(|(u, v)| self.allows(u, v))
    }

    pub fn forbidden(&self) -> &Forbidden {
        &self.forbidden
    }

    fn check_against(&self, g_star: &MixedGraph) -> Result<()> {
        if self.names != g_star.names() {
            return Err(MecError::MalformedHypothesis("vertex set differs from the essential graph".into()));
        }
        Ok(())
    }
}

/// Number of members of `MEC(g_star)` consistent with `h`.
pub fn size_with_prior(g_star: &MixedGraph, h: &HypothesisGraph) -> Result<BigCount> {
    size_with_prior_memo(g_star, h, &MemoStore::new())
}

pub fn size_with_prior_memo(g_star: &MixedGraph, h: &HypothesisGraph, memo: &MemoStore) -> Result<BigCount> {
    h.check_against(g_star)?;
    validate_essential_graph(g_star)?;
    if !g_star.directed_edges().all(|(u, v)| h.allows(u, v)) {
        return Ok(BigCount::zero());
    }
    let counter = Counter::new(g_star, memo).with_prior(&h.forbidden);
    let mut total = BigCount::one();
    for comp in chain_component_sets(g_star) {
        let c = counter.component_size(&comp)?;
        if c.is_zero() {
            return Ok(c);
        }
        total *= c;
    }
    Ok(total)
}

pub fn is_realizable(g_star: &MixedGraph, h: &HypothesisGraph) -> Result<bool> {
    Ok(!size_with_prior(g_star, h)?.is_zero())
}

/// Consistent member counts per root of a connected chordal undirected graph.
pub fn rooted_sizes_with_prior(g: &MixedGraph, h: &HypothesisGraph) -> Result<Vec<BigCount>> {
    h.check_against(g)?;
    if !g.is_undirected_graph() {
        return Err(MecError::DirectedEdgesPresent);
    }
    let memo = MemoStore::new();
    let counter = Counter::new(g, &memo).with_prior(&h.forbidden);
    let mut all = FixedBitSet::with_capacity(g.vertex_count());
    all.insert_range(..);
    let tree = counter.build_tree(&all)?;
    g.vertices().map(|v| counter.rooted_size_in(&tree, v)).collect()
}

/// Number of members per parent set of `target`, zero counts omitted.
/// Parent sets are sorted vertex lists; the counts sum to `Size(g_star)`.
pub fn parent_set_counts(g_star: &MixedGraph, target: Vertex) -> Result<BTreeMap<Vec<Vertex>, BigCount>> {
    if target >= g_star.vertex_count() {
        return Err(MecError::UnknownVertex(format!("#{target}")));
    }
    validate_essential_graph(g_star)?;
    let fixed = g_star.parents(target);
    let nbrs = g_star.undirected_neighbors(target);
    let memo = MemoStore::new();
    let mut out = BTreeMap::new();
    // Parent sets drawn from the undirected neighbours must be cliques.
    let mut chosen: Vec<Vertex> = Vec::new();
    fn walk(
        g: &MixedGraph,
        nbrs: &[Vertex],
        i: usize,
        chosen: &mut Vec<Vertex>,
        visit: &mut dyn FnMut(&[Vertex]) -> Result<()>,
    ) -> Result<()> {
        if i == nbrs.len() {
            return visit(chosen);
        }
        walk(g, nbrs, i + 1, chosen, visit)?;
        let v = nbrs[i];
        if chosen.iter().all(|&c| g.is_adjacent(c, v)) {
            chosen.push(v);
            walk(g, nbrs, i + 1, chosen, visit)?;
            chosen.pop();
        }
        Ok(())
    }
    let mut visit = |parents: &[Vertex]| -> Result<()> {
        let mut h = HypothesisGraph::unconstrained(g_star);
        for &u in &nbrs {
            if parents.contains(&u) {
                h.require(u, target)?;
            } else {
                h.require(target, u)?;
            }
        }
        let c: BigUint = size_with_prior_memo(g_star, &h, &memo)?;
        if !c.is_zero() {
            let mut key: Vec<Vertex> = fixed.iter().chain(parents.iter()).copied().collect();
            key.sort_unstable();
            out.insert(key, c);
        }
        Ok(())
    };
    walk(g_star, &nbrs, 0, &mut chosen, &mut visit)?;
    Ok(out)
}
