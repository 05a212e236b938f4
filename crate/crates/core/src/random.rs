//! Random connected chordal graphs.

use fixedbitset::FixedBitSet;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::chordal::is_chordal_masked;
use crate::error::{MecError, Result};
use crate::graph::{MixedGraph, VertexSet};

fn names(p: usize) -> Vec<String> {
    (1..=p).map(|i| format!("v{i}")).collect()
}

fn to_graph(adj: &[VertexSet]) -> MixedGraph {
    let mut g = MixedGraph::with_vertices(&names(adj.len()));
    for (a, nb) in adj.iter().enumerate() {
        for b in nb.ones().filter(|&b| b > a) {
            g.add_undirected(a, b).expect("fresh edge");
        }
    }
    g
}

/// Target edge count `round(r * p * (p - 1) / 2)`.
pub fn target_edges(p: usize, r: f64) -> usize {
    (r * (p * p.saturating_sub(1)) as f64 / 2.0).round() as usize
}

/// Connected chordal graph on `p` vertices with `round(r * C(p, 2))` edges.
///
/// Starts from a random spanning tree and adds uniformly random non-edges
/// whose insertion keeps the graph chordal until the count is reached.
pub fn random_uccg(p: usize, r: f64, seed: u64) -> Result<MixedGraph> {
    if p == 0 {
        return Err(MecError::Infeasible("p must be positive".into()));
    }
    if !(r > 0.0 && r <= 1.0) {
        return Err(MecError::Infeasible(format!("density {r} outside (0, 1]")));
    }
    let m = target_edges(p, r);
    if m + 1 < p {
        return Err(MecError::Infeasible(format!("{m} edges cannot connect {p} vertices")));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut adj = vec![FixedBitSet::with_capacity(p); p];
    let mut perm: Vec<usize> = (0..p).collect();
    perm.shuffle(&mut rng);
    for i in 1..p {
        let j = rng.random_range(0..i);
        let (a, b) = (perm[i], perm[j]);
        adj[a].insert(b);
        adj[b].insert(a);
    }
    let mut all = FixedBitSet::with_capacity(p);
    all.insert_range(..);
    let mut edges = p - 1;
    let mut non_edges: Vec<(usize, usize)> =
        (0..p).flat_map(|a| (a + 1..p).map(move |b| (a, b))).filter(|&(a, b)| !adj[a].contains(b)).collect();
    let keeps_chordal = |adj: &mut Vec<VertexSet>, a: usize, b: usize| {
        adj[a].insert(b);
        adj[b].insert(a);
        let ok = is_chordal_masked(adj, &all);
        if !ok {
            adj[a].set(b, false);
            adj[b].set(a, false);
        }
        ok
    };
    while edges < m {
        // Rejection sampling keeps the choice uniform over admissible edges;
        // after many misses fall back to scanning all of them.
        let mut placed = false;
        for _ in 0..4 * non_edges.len() {
            let i = rng.random_range(0..non_edges.len());
            let (a, b) = non_edges[i];
            if keeps_chordal(&mut adj, a, b) {
                non_edges.swap_remove(i);
                placed = true;
                break;
            }
        }
        if !placed {
            let admissible: Vec<usize> = (0..non_edges.len())
                .filter(|&i| {
                    let (a, b) = non_edges[i];
                    let ok = keeps_chordal(&mut adj, a, b);
                    if ok {
                        adj[a].set(b, false);
                        adj[b].set(a, false);
                    }
                    ok
                })
                .collect();
            let &i = admissible
                .get(rng.random_range(0..admissible.len().max(1)))
                .ok_or_else(|| MecError::Infeasible("no chordality-preserving edge left".into()))?;
            let (a, b) = non_edges.swap_remove(i);
            adj[a].insert(b);
            adj[b].insert(a);
        }
        edges += 1;
    }
    Ok(to_graph(&adj))
}

/// Random connected chordal graph with maximum degree at most `max_degree`.
///
/// Each new vertex attaches to a random clique (of size up to
/// `max_clique - 1`) inside the neighbourhood of an existing vertex; the
/// insertion order reversed is a perfect elimination ordering.
pub fn random_bounded_chordal(p: usize, max_degree: usize, max_clique: usize, seed: u64) -> Result<MixedGraph> {
    if p == 0 || max_degree == 0 || max_clique < 2 {
        return Err(MecError::Infeasible("degree and clique bounds too small".into()));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut adj = vec![FixedBitSet::with_capacity(p); p];
    let deg = |adj: &[VertexSet], v: usize| adj[v].count_ones(..);
    for v in 1..p {
        let open: Vec<usize> = (0..v).filter(|&u| deg(&adj, u) < max_degree).collect();
        if open.is_empty() {
            return Err(MecError::Infeasible("degree bound exhausted".into()));
        }
        let anchor = open[rng.random_range(0..open.len())];
        let mut clique = vec![anchor];
        let mut pool: Vec<usize> = adj[anchor].ones().filter(|&u| u < v && deg(&adj, u) < max_degree).collect();
        pool.shuffle(&mut rng);
        let want = rng.random_range(1..max_clique);
        for u in pool {
            if clique.len() >= want {
                break;
            }
            if clique.iter().all(|&c| adj[c].contains(u)) {
                clique.push(u);
            }
        }
        for u in clique {
            adj[u].insert(v);
            adj[v].insert(u);
        }
    }
    Ok(to_graph(&adj))
}
