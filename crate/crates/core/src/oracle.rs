//! Brute-force ground truth for small graphs.
//!
//! Members are enumerated by backtracking over the undirected edges, rejecting
//! a partial orientation as soon as it closes a directed cycle or creates a
//! v-structure. Nothing here touches clique trees.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::chordal::is_chordal;
use crate::count::BigCount;
use crate::error::{MecError, Result};
use crate::graph::{directed_v_structures, markov_equivalent, MixedGraph, Vertex};
use crate::intervention::{intervened_edges, resolved_count};
use crate::prior::HypothesisGraph;

pub const DEFAULT_LIMIT: usize = 1_000_000;

#[derive(Debug, Clone)]
pub struct EnumeratedMec {
    pub origin: MixedGraph,
    pub members: Vec<MixedGraph>,
}

impl EnumeratedMec {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

struct Search<'g> {
    g: &'g MixedGraph,
    edges: Vec<(Vertex, Vertex)>,
    children: Vec<Vec<Vertex>>,
    parents: Vec<Vec<Vertex>>,
    chosen: Vec<(Vertex, Vertex)>,
    out: Vec<MixedGraph>,
    limit: usize,
}

impl Search<'_> {
    fn reaches(&self, from: Vertex, to: Vertex) -> bool {
        let mut seen = vec![false; self.children.len()];
        let mut stack = vec![from];
        while let Some(v) = stack.pop() {
            if v == to {
                return true;
            }
            for &c in &self.children[v] {
                if !seen[c] {
                    seen[c] = true;
                    stack.push(c);
                }
            }
        }
        false
    }

    fn go(&mut self, i: usize) -> Result<()> {
        if i == self.edges.len() {
            if self.out.len() >= self.limit {
                return Err(MecError::LimitExceeded(self.limit));
            }
            let mut d = self.g.empty_like();
            for (a, b) in self.g.directed_edges().chain(self.chosen.iter().copied()) {
                d.add_directed(a, b)?;
            }
            self.out.push(d);
            return Ok(());
        }
        let (x, y) = self.edges[i];
        for (a, b) in [(x, y), (y, x)] {
            let collider = self.parents[b].iter().any(|&c| !self.g.is_adjacent(a, c));
            if collider || self.reaches(b, a) {
                continue;
            }
            self.children[a].push(b);
            self.parents[b].push(a);
            self.chosen.push((a, b));
            self.go(i + 1)?;
            self.chosen.pop();
            self.parents[b].pop();
            self.children[a].pop();
        }
        Ok(())
    }
}

/// Every DAG in `MEC(g_star)`, each checked for Markov equivalence against
/// the first one found.
pub fn enumerate_mec(g_star: &MixedGraph, limit: usize) -> Result<EnumeratedMec> {
    let n = g_star.vertex_count();
    let mut children = vec![Vec::new(); n];
    let mut parents = vec![Vec::new(); n];
    for (a, b) in g_star.directed_edges() {
        children[a].push(b);
        parents[b].push(a);
    }
    let mut s = Search {
        g: g_star,
        edges: g_star.undirected_edges().collect(),
        children,
        parents,
        chosen: Vec::new(),
        out: Vec::new(),
        limit,
    };
    if !g_star.directed_part_is_acyclic() {
        return Err(MecError::InvalidEssentialGraph("directed cycle".into()));
    }
    s.go(0)?;
    let expected_v = directed_v_structures(g_star);
    if let Some(first) = s.out.first() {
        for d in &s.out {
            if directed_v_structures(d) != expected_v || !markov_equivalent(first, d)? {
                return Err(MecError::InvalidEssentialGraph("enumerated members disagree".into()));
            }
        }
    }
    Ok(EnumeratedMec { origin: g_star.clone(), members: s.out })
}

pub fn brute_size(g_star: &MixedGraph) -> Result<BigCount> {
    Ok(BigCount::from(enumerate_mec(g_star, DEFAULT_LIMIT)?.len()))
}

pub fn brute_size_with_prior(g_star: &MixedGraph, h: &HypothesisGraph) -> Result<BigCount> {
    let mec = enumerate_mec(g_star, DEFAULT_LIMIT)?;
    Ok(BigCount::from(mec.members.iter().filter(|d| h.allows_dag(d)).count()))
}

/// Direct average of the resolved count over every enumerated member.
pub fn brute_expected_resolved(g_star: &MixedGraph, targets: &[Vertex]) -> Result<BigRational> {
    let mec = enumerate_mec(g_star, DEFAULT_LIMIT)?;
    let edges = intervened_edges(g_star, targets);
    let mut total = BigInt::zero();
    for d in &mec.members {
        let config: Vec<(Vertex, Vertex)> =
            edges.iter().map(|&(a, b)| if d.has_directed(a, b) { (a, b) } else { (b, a) }).collect();
        total += BigInt::from(resolved_count(g_star, &config)?);
    }
    Ok(BigRational::new(total, BigInt::from(mec.len())))
}

/// Every connected chordal labelled graph on `n` vertices, in edge-mask order.
pub fn connected_chordal_graphs(n: usize) -> Vec<MixedGraph> {
    let names: Vec<String> = (1..=n).map(|i| format!("v{i}")).collect();
    let pairs: Vec<(Vertex, Vertex)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << pairs.len()) {
        let mut g = MixedGraph::with_vertices(&names);
        for (i, &(a, b)) in pairs.iter().enumerate() {
            if mask >> i & 1 == 1 {
                g.add_undirected(a, b).expect("fresh edge");
            }
        }
        if g.is_connected() && is_chordal(&g).unwrap_or(false) {
            out.push(g);
        }
    }
    out
}
