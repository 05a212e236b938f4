//! Exact MEC size by recursion over rooted clique trees.
//!
//! `Size(G*)` is the product of the sizes of the chain components, and the
//! size of a chain component is the sum over every vertex `v` of the number of
//! members whose unique source is `v`. The rooted count walks the rooted clique
//! tree level by level: a clique whose emission set equals its separator cuts
//! off its subtree, which is counted on its own and memoized; other cliques
//! orient `Em(K) -> Res(K)`. The leftover undirected edges split into chain
//! components, counted recursively.

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::RwLock;

use fixedbitset::FixedBitSet;
use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::clique_tree::{CliqueTree, RootedCliqueTree};
use crate::error::{MecError, Result};
use crate::graph::{chain_component_sets, validate_essential_graph, MixedGraph, Vertex, VertexSet};

/// Exact count of DAGs.
pub type BigCount = BigUint;

/// Memo key. Vertex labels are global to one input graph, so equal keys
/// denote identical sub-problems. `constraints` lists the forbidden
/// orientations `(u, v)` with both ends inside the key's vertex set.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum CanonicalKey {
    Component {
        vertices: VertexSet,
        constraints: Vec<(u32, u32)>,
    },
    Subtree {
        residual: VertexSet,
        separator: VertexSet,
        constraints: Vec<(u32, u32)>,
    },
}

impl CanonicalKey {
    pub fn vertices(&self) -> Vec<Vertex> {
        match self {
            CanonicalKey::Component { vertices, .. } => vertices.ones().collect(),
            CanonicalKey::Subtree { residual, .. } => residual.ones().collect(),
        }
    }

    pub fn separator(&self) -> Option<Vec<Vertex>> {
        match self {
            CanonicalKey::Component { .. } => None,
            CanonicalKey::Subtree { separator, .. } => Some(separator.ones().collect()),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct MemoStats {
    pub hits: u64,
    pub misses: u64,
    pub rs_calls: u64,
    pub entries: usize,
}

/// Shared cache from sub-problem keys to counts. Safe to share across
/// threads; inserting an existing key must carry the identical value.
#[derive(Debug)]
pub struct MemoStore {
    map: RwLock<HashMap<CanonicalKey, BigCount>>,
    enabled: bool,
    cap: Option<usize>,
    hits: AtomicU64,
    misses: AtomicU64,
    rs_calls: AtomicU64,
}

impl Default for MemoStore {
    fn default() -> Self {
        Self::new()
    }
}

impl MemoStore {
    pub fn new() -> Self {
        Self {
            map: RwLock::new(HashMap::new()),
            enabled: true,
            cap: None,
            hits: AtomicU64::new(0),
            misses: AtomicU64::new(0),
            rs_calls: AtomicU64::new(0),
        }
    }

    /// A store that never caches; every lookup misses.
    pub fn disabled() -> Self {
        Self { enabled: false, ..Self::new() }
    }

    /// Stops inserting once `cap` entries are held.
    pub fn with_cap(cap: usize) -> Self {
        Self { cap: Some(cap), ..Self::new() }
    }

    pub fn is_enabled(&self) -> bool {
        self.enabled
    }

    pub fn get(&self, key: &CanonicalKey) -> Option<BigCount> {
        if !self.enabled {
            self.misses.fetch_add(1, Ordering::Relaxed);
            return None;
        }
        let found = self.map.read().expect("memo lock").get(key).cloned();
        match found {
            Some(_) => self.hits.fetch_add(1, Ordering::Relaxed),
            None => self.misses.fetch_add(1, Ordering::Relaxed),
        };
        found
    }

    pub fn insert(&self, key: CanonicalKey, value: BigCount) {
        if !self.enabled {
            return;
        }
        let mut map = self.map.write().expect("memo lock");
        if let Some(old) = map.get(&key) {
            assert_eq!(old, &value, "memo entry re-inserted with a different value");
            return;
        }
        if self.cap.is_some_and(|c| map.len() >= c) {
            return;
        }
        map.insert(key, value);
    }

    pub fn len(&self) -> usize {
        self.map.read().expect("memo lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn stats(&self) -> MemoStats {
        MemoStats {
            hits: self.hits.load(Ordering::Relaxed),
            misses: self.misses.load(Ordering::Relaxed),
            rs_calls: self.rs_calls.load(Ordering::Relaxed),
            entries: self.len(),
        }
    }
}

/// Forbidden orientations: `forbid[u]` holds every `v` for which `u -> v`
/// is ruled out.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Forbidden {
    pub(crate) forbid: Vec<VertexSet>,
}

impl Forbidden {
    pub fn none(n: usize) -> Self {
        Self { forbid: vec![FixedBitSet::with_capacity(n); n] }
    }

    pub fn forbid(&mut self, u: Vertex, v: Vertex) {
        self.forbid[u].insert(v);
    }

    pub fn is_forbidden(&self, u: Vertex, v: Vertex) -> bool {
        self.forbid[u].contains(v)
    }

    pub fn is_empty(&self) -> bool {
        self.forbid.iter().all(|s| s.is_clear())
    }

    /// True when every `u -> w` with `u ∈ from`, `w ∈ to` is allowed.
    fn allows(&self, from: &VertexSet, to: &VertexSet) -> bool {
        from.ones().all(|u| self.forbid[u].is_disjoint(to))
    }

    fn restricted_to(&self, within: &VertexSet) -> Vec<(u32, u32)> {
        let mut out = Vec::new();
        for u in within.ones() {
            for v in self.forbid[u].intersection(within) {
                out.push((u as u32, v as u32));
            }
        }
        out
    }
}

/// Counting engine over the undirected part of one essential graph.
pub struct Counter<'a> {
    adj: Vec<VertexSet>,
    forbidden: Option<&'a Forbidden>,
    memo: &'a MemoStore,
    rank: Option<Vec<usize>>,
}

impl<'a> Counter<'a> {
    pub fn new(g: &MixedGraph, memo: &'a MemoStore) -> Self {
        Self { adj: g.undirected_adjacency(), forbidden: None, memo, rank: None }
    }

    /// Counts only members consistent with `forbidden`.
    pub fn with_prior(mut self, forbidden: &'a Forbidden) -> Self {
        if !forbidden.is_empty() {
            self.forbidden = Some(forbidden);
        }
        self
    }

    /// Overrides the tie-breaking order used when building clique trees.
    pub fn with_tie_break(mut self, rank: Vec<usize>) -> Self {
        self.rank = Some(rank);
        self
    }

    pub fn memo(&self) -> &MemoStore {
        self.memo
    }

    fn n(&self) -> usize {
        self.adj.len()
    }

    fn constraints(&self, within: &VertexSet) -> Vec<(u32, u32)> {
        self.forbidden.map(|f| f.restricted_to(within)).unwrap_or_default()
    }

    fn allows(&self, from: &VertexSet, to: &VertexSet) -> bool {
        self.forbidden.is_none_or(|f| f.allows(from, to))
    }

    pub fn component_key(&self, vertices: &VertexSet) -> CanonicalKey {
        CanonicalKey::Component { vertices: vertices.clone(), constraints: self.constraints(vertices) }
    }

    pub fn subtree_key(&self, residual: &VertexSet, separator: &VertexSet) -> CanonicalKey {
        let mut within = residual.clone();
        within.union_with(separator);
        CanonicalKey::Subtree {
            residual: residual.clone(),
            separator: separator.clone(),
            constraints: self.constraints(&within),
        }
    }

    pub(crate) fn build_tree(&self, mask: &VertexSet) -> Result<CliqueTree> {
        CliqueTree::build_masked(&self.adj, mask, self.rank.as_deref())
    }

    /// Size of the chain component spanned by `mask` (a connected chordal
    /// induced subgraph of the undirected part).
    pub fn component_size(&self, mask: &VertexSet) -> Result<BigCount> {
        let key = self.component_key(mask);
        if let Some(v) = self.memo.get(&key) {
            return Ok(v);
        }
        let size = if mask.count_ones(..) == 1 {
            BigCount::one()
        } else {
            let tree = self.build_tree(mask)?;
            let mut total = BigCount::zero();
            for v in mask.ones() {
                total += self.rooted_size_in(&tree, v)?;
            }
            total
        };
        self.memo.insert(key, size.clone());
        Ok(size)
    }

    /// Number of `v`-rooted members of the component whose clique tree is `tree`.
    pub fn rooted_size_in(&self, tree: &CliqueTree, v: Vertex) -> Result<BigCount> {
        let mut rt = RootedCliqueTree::new(tree, v)?;
        rt.compute_emission_sets();
        self.rooted_size(&rt)
    }

    /// Rooted size for an already rooted tree with emission sets.
    pub fn rooted_size(&self, rt: &RootedCliqueTree<'_>) -> Result<BigCount> {
        let res_sub = rt.subtree_residuals();
        self.rs(rt, &res_sub, rt.root_clique)
    }

    /// Counts the sub-problem rooted at clique `k0`, whose separator already
    /// points into its subtree.
    fn rs(&self, rt: &RootedCliqueTree<'_>, res_sub: &[VertexSet], k0: usize) -> Result<BigCount> {
        self.memo.rs_calls.fetch_add(1, Ordering::Relaxed);
        if !self.allows(&rt.em[k0], &rt.res[k0]) {
            return Ok(BigCount::zero());
        }
        let mut size = BigCount::one();
        let mut remaining = rt.res[k0].clone();
        let mut frontier = vec![k0];
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for &p in &frontier {
                for &k in &rt.children[p] {
                    if rt.em[k] == rt.sep[k] {
                        let key = self.subtree_key(&res_sub[k], &rt.sep[k]);
                        let sub = match self.memo.get(&key) {
                            Some(v) => v,
                            None => {
                                let v = self.rs(rt, res_sub, k)?;
                                self.memo.insert(key, v.clone());
                                v
                            }
                        };
                        if sub.is_zero() {
                            return Ok(sub);
                        }
                        size *= sub;
                    } else {
                        if !self.allows(&rt.em[k], &rt.res[k]) {
                            return Ok(BigCount::zero());
                        }
                        remaining.union_with(&rt.res[k]);
                        next.push(k);
                    }
                }
            }
            frontier = next;
        }
        for comp in self.leftover_components(rt, &remaining) {
            let c = self.component_size(&comp)?;
            if c.is_zero() {
                return Ok(c);
            }
            size *= c;
        }
        Ok(size)
    }

    /// Chain components among `remaining` once every `Em(K) -> Res(K)` edge
    /// is directed; an edge `a - b` stays undirected unless one end parents
    /// the other.
    fn leftover_components(&self, rt: &RootedCliqueTree<'_>, remaining: &VertexSet) -> Vec<VertexSet> {
        let n = self.n();
        let mut seen = FixedBitSet::with_capacity(n);
        let mut out = Vec::new();
        for s in remaining.ones() {
            if seen.contains(s) {
                continue;
            }
            seen.insert(s);
            let mut comp = FixedBitSet::with_capacity(n);
            let mut stack = vec![s];
            while let Some(a) = stack.pop() {
                comp.insert(a);
                for b in self.adj[a].intersection(remaining) {
                    if seen.contains(b) {
                        continue;
                    }
                    if rt.em[rt.home(b)].contains(a) || rt.em[rt.home(a)].contains(b) {
                        continue;
                    }
                    seen.insert(b);
                    stack.push(b);
                }
            }
            out.push(comp);
        }
        out
    }
}

/// Exact MEC size of a valid essential graph.
pub fn mec_size(g_star: &MixedGraph) -> Result<BigCount> {
    mec_size_with_memo(g_star, &MemoStore::new())
}

pub fn mec_size_with_memo(g_star: &MixedGraph, memo: &MemoStore) -> Result<BigCount> {
    validate_essential_graph(g_star)?;
    let counter = Counter::new(g_star, memo);
    let mut total = BigCount::one();
    for comp in chain_component_sets(g_star) {
        total *= counter.component_size(&comp)?;
    }
    Ok(total)
}

/// Size of a connected chordal undirected graph.
pub fn component_size(g: &MixedGraph, memo: &MemoStore) -> Result<BigCount> {
    if !g.is_undirected_graph() {
        return Err(MecError::DirectedEdgesPresent);
    }
    let n = g.vertex_count();
    if n == 0 {
        return Err(MecError::Disconnected);
    }
    let mut all = FixedBitSet::with_capacity(n);
    all.insert_range(..);
    Counter::new(g, memo).component_size(&all)
}

/// Per-root sizes `Size(G^(v))` of a connected chordal undirected graph, in
/// vertex order.
pub fn rooted_sizes(g: &MixedGraph, memo: &MemoStore) -> Result<Vec<BigCount>> {
    if !g.is_undirected_graph() {
        return Err(MecError::DirectedEdgesPresent);
    }
    let n = g.vertex_count();
    let mut all = FixedBitSet::with_capacity(n);
    all.insert_range(..);
    let counter = Counter::new(g, memo);
    let tree = counter.build_tree(&all)?;
    g.vertices().map(|v| counter.rooted_size_in(&tree, v)).collect()
}

/// Component key for a chain component given as an induced subgraph of `g`.
pub fn canonical_key_component(g: &MixedGraph, vertices: &[Vertex]) -> CanonicalKey {
    let memo = MemoStore::disabled();
    let c = Counter::new(g, &memo);
    c.component_key(&crate::graph::vertex_set(g.vertex_count(), vertices.iter().copied()))
}

/// Key of the subtree hanging from clique `k` of a rooted tree.
pub fn canonical_key_subtree(rt: &RootedCliqueTree<'_>, k: usize) -> CanonicalKey {
    let res_sub = rt.subtree_residuals();
    CanonicalKey::Subtree { residual: res_sub[k].clone(), separator: rt.sep[k].clone(), constraints: Vec::new() }
}
