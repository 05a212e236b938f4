//! Mixed graphs holding directed and undirected edges over named vertices.
//!
//! Vertex names are opaque strings; internally every vertex is a dense index
//! assigned in insertion order, and every set-valued output is sorted by index.

use std::collections::{BTreeSet, HashMap, VecDeque};

use fixedbitset::FixedBitSet;

use crate::error::{MecError, Result};

/// Dense vertex index.
pub type Vertex = usize;

/// Bitset over vertex indices of one graph.
pub type VertexSet = FixedBitSet;

pub(crate) fn vertex_set(n: usize, members: impl IntoIterator<Item = Vertex>) -> VertexSet {
    let mut s = FixedBitSet::with_capacity(n);
    for v in members {
        s.insert(v);
    }
    s
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MixedGraph {
    names: Vec<String>,
    index: HashMap<String, Vertex>,
    directed: BTreeSet<(Vertex, Vertex)>,
    /// Stored as `(min, max)`.
    undirected: BTreeSet<(Vertex, Vertex)>,
}

impl MixedGraph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Graph with the given vertices and no edges.
    pub fn with_vertices<S: AsRef<str>>(names: &[S]) -> Self {
        let mut g = Self::new();
        for n in names {
            g.add_vertex(n.as_ref());
        }
        g
    }

    /// Same vertex set, no edges.
    pub fn empty_like(&self) -> Self {
        Self {
            names: self.names.clone(),
            index: self.index.clone(),
            directed: BTreeSet::new(),
            undirected: BTreeSet::new(),
        }
    }

    /// Returns the index of `name`, inserting it if new.
    pub fn add_vertex(&mut self, name: &str) -> Vertex {
        if let Some(&v) = self.index.get(name) {
            return v;
        }
        let v = self.names.len();
        self.names.push(name.to_string());
        self.index.insert(name.to_string(), v);
        v
    }

    pub fn vertex_count(&self) -> usize {
        self.names.len()
    }

    pub fn vertices(&self) -> std::ops::Range<Vertex> {
        0..self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, v: Vertex) -> &str {
        &self.names[v]
    }

    pub fn vertex(&self, name: &str) -> Result<Vertex> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| MecError::UnknownVertex(name.to_string()))
    }

    fn check_pair(&self, a: Vertex, b: Vertex) -> Result<()> {
        let n = self.vertex_count();
        if a >= n || b >= n {
            return Err(MecError::UnknownVertex(format!("#{}", a.max(b))));
        }
        if a == b {
            return Err(MecError::SelfLoop(self.names[a].clone()));
        }
        Ok(())
    }

    /// Adds `a -> b`. Re-adding the same edge is a no-op; any other edge on
    /// the same pair is a conflict.
    pub fn add_directed(&mut self, a: Vertex, b: Vertex) -> Result<()> {
        self.check_pair(a, b)?;
        if self.directed.contains(&(a, b)) {
            return Ok(());
        }
        if self.is_adjacent(a, b) {
            return Err(MecError::ConflictingEdge(self.names[a].clone(), self.names[b].clone()));
        }
        self.directed.insert((a, b));
        Ok(())
    }

    pub fn add_undirected(&mut self, a: Vertex, b: Vertex) -> Result<()> {
        self.check_pair(a, b)?;
        let key = (a.min(b), a.max(b));
        if self.undirected.contains(&key) {
            return Ok(());
        }
        if self.is_adjacent(a, b) {
            return Err(MecError::ConflictingEdge(self.names[a].clone(), self.names[b].clone()));
        }
        self.undirected.insert(key);
        Ok(())
    }

    pub fn add_directed_by_name(&mut self, a: &str, b: &str) -> Result<()> {
        let (a, b) = (self.add_vertex(a), self.add_vertex(b));
        self.add_directed(a, b)
    }

    pub fn add_undirected_by_name(&mut self, a: &str, b: &str) -> Result<()> {
        let (a, b) = (self.add_vertex(a), self.add_vertex(b));
        self.add_undirected(a, b)
    }

    /// Replaces the undirected edge `a - b` by `a -> b`.
    pub fn orient(&mut self, a: Vertex, b: Vertex) -> Result<()> {
        if !self.undirected.remove(&(a.min(b), a.max(b))) {
            if self.directed.contains(&(a, b)) {
                return Ok(());
            }
            return Err(MecError::InconsistentOrientation(format!(
                "no undirected edge {} - {}",
                self.names[a], self.names[b]
            )));
        }
        self.directed.insert((a, b));
        Ok(())
    }

    pub fn directed_edges(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        self.directed.iter().copied()
    }

    pub fn undirected_edges(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        self.undirected.iter().copied()
    }

    pub fn directed_count(&self) -> usize {
        self.directed.len()
    }

    pub fn undirected_count(&self) -> usize {
        self.undirected.len()
    }

    pub fn edge_count(&self) -> usize {
        self.directed.len() + self.undirected.len()
    }

    pub fn has_directed(&self, a: Vertex, b: Vertex) -> bool {
        self.directed.contains(&(a, b))
    }

    pub fn has_undirected(&self, a: Vertex, b: Vertex) -> bool {
        self.undirected.contains(&(a.min(b), a.max(b)))
    }

    pub fn is_adjacent(&self, a: Vertex, b: Vertex) -> bool {
        self.has_undirected(a, b) || self.has_directed(a, b) || self.has_directed(b, a)
    }

    pub fn is_undirected_graph(&self) -> bool {
        self.directed.is_empty()
    }

    pub fn is_fully_directed(&self) -> bool {
        self.undirected.is_empty()
    }

    /// Skeleton as unordered pairs `(min, max)`.
    pub fn skeleton(&self) -> BTreeSet<(Vertex, Vertex)> {
        self.directed
            .iter()
            .map(|&(a, b)| (a.min(b), a.max(b)))
            .chain(self.undirected.iter().copied())
            .collect()
    }

    pub fn skeleton_adjacency(&self) -> Vec<VertexSet> {
        let n = self.vertex_count();
        let mut adj = vec![FixedBitSet::with_capacity(n); n];
        for (a, b) in self.skeleton() {
            adj[a].insert(b);
            adj[b].insert(a);
        }
        adj
    }

    pub fn undirected_adjacency(&self) -> Vec<VertexSet> {
        let n = self.vertex_count();
        let mut adj = vec![FixedBitSet::with_capacity(n); n];
        for &(a, b) in &self.undirected {
            adj[a].insert(b);
            adj[b].insert(a);
        }
        adj
    }

    /// `out[a]` holds every `b` with `a -> b`.
    pub fn children_adjacency(&self) -> Vec<VertexSet> {
        let n = self.vertex_count();
        let mut out = vec![FixedBitSet::with_capacity(n); n];
        for &(a, b) in &self.directed {
            out[a].insert(b);
        }
        out
    }

    pub fn parents(&self, v: Vertex) -> Vec<Vertex> {
        self.directed.iter().filter(|e| e.1 == v).map(|e| e.0).collect()
    }

    pub fn undirected_neighbors(&self, v: Vertex) -> Vec<Vertex> {
        self.undirected
            .iter()
            .filter_map(|&(a, b)| {
                if a == v {
                    Some(b)
                } else if b == v {
                    Some(a)
                } else {
                    None
                }
            })
            .collect()
    }

    /// Subgraph induced on `keep`, with vertex names preserved and indices
    /// renumbered in increasing original order.
    pub fn induced(&self, keep: &VertexSet) -> MixedGraph {
        let mut g = MixedGraph::new();
        let mut map = vec![usize::MAX; self.vertex_count()];
        for v in keep.ones() {
            map[v] = g.add_vertex(&self.names[v]);
        }
        for &(a, b) in &self.directed {
            if keep.contains(a) && keep.contains(b) {
                g.directed.insert((map[a], map[b]));
            }
        }
        for &(a, b) in &self.undirected {
            if keep.contains(a) && keep.contains(b) {
                g.undirected.insert((map[a], map[b]));
            }
        }
        g
    }

    /// True when there are no undirected edges and the directed edges are acyclic.
    pub fn is_dag(&self) -> bool {
        self.undirected.is_empty() && self.directed_part_is_acyclic()
    }

    pub fn directed_part_is_acyclic(&self) -> bool {
        topological_order(self.vertex_count(), &self.children_adjacency()).is_some()
    }

    pub fn is_connected(&self) -> bool {
        let n = self.vertex_count();
        if n <= 1 {
            return true;
        }
        let adj = self.skeleton_adjacency();
        let mut all = FixedBitSet::with_capacity(n);
        all.insert_range(..);
        components_of(&adj, &all).len() == 1
    }
}

/// Kahn's algorithm; `None` when a directed cycle exists.
pub(crate) fn topological_order(n: usize, children: &[VertexSet]) -> Option<Vec<Vertex>> {
    let mut indeg = vec![0usize; n];
    for ch in children {
        for c in ch.ones() {
            indeg[c] += 1;
        }
    }
    let mut queue: VecDeque<Vertex> = (0..n).filter(|&v| indeg[v] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(v) = queue.pop_front() {
        order.push(v);
        for c in children[v].ones() {
            indeg[c] -= 1;
            if indeg[c] == 0 {
                queue.push_back(c);
            }
        }
    }
    (order.len() == n).then_some(order)
}

/// Connected components of `adj` restricted to `mask`, ordered by lowest member.
pub(crate) fn components_of(adj: &[VertexSet], mask: &VertexSet) -> Vec<VertexSet> {
    let n = mask.len();
    let mut seen = FixedBitSet::with_capacity(n);
    let mut out = Vec::new();
    for s in mask.ones() {
        if seen.contains(s) {
            continue;
        }
        let mut comp = FixedBitSet::with_capacity(n);
        let mut stack = vec![s];
        seen.insert(s);
        while let Some(v) = stack.pop() {
            comp.insert(v);
            for w in adj[v].ones() {
                if mask.contains(w) && !seen.contains(w) {
                    seen.insert(w);
                    stack.push(w);
                }
            }
        }
        out.push(comp);
    }
    out
}

/// Chain components: connected components of the graph after deleting every
/// directed edge, each returned as an induced undirected graph.
pub fn chain_components(g: &MixedGraph) -> Vec<MixedGraph> {
    chain_component_sets(g)
        .iter()
        .map(|c| g.induced(c))
        .collect()
}

/// Vertex sets of the chain components, ordered by lowest member.
pub fn chain_component_sets(g: &MixedGraph) -> Vec<VertexSet> {
    let n = g.vertex_count();
    let mut all = FixedBitSet::with_capacity(n);
    all.insert_range(..);
    components_of(&g.undirected_adjacency(), &all)
}

/// All v-structures `(a, b, c)` with `a -> b <- c`, `a < c`, `a` and `c`
/// nonadjacent.
pub fn v_structures(d: &MixedGraph) -> Result<BTreeSet<(Vertex, Vertex, Vertex)>> {
    if !d.is_fully_directed() {
        return Err(MecError::NotADag("graph has undirected edges".into()));
    }
    if !d.directed_part_is_acyclic() {
        return Err(MecError::NotADag("graph has a directed cycle".into()));
    }
    Ok(directed_v_structures(d))
}

/// v-structures formed by the directed edges only; undirected edges still
/// count towards adjacency.
pub(crate) fn directed_v_structures(g: &MixedGraph) -> BTreeSet<(Vertex, Vertex, Vertex)> {
    let mut parents: Vec<Vec<Vertex>> = vec![Vec::new(); g.vertex_count()];
    for (a, b) in g.directed_edges() {
        parents[b].push(a);
    }
    let mut out = BTreeSet::new();
    for (b, pa) in parents.iter().enumerate() {
        for (i, &a) in pa.iter().enumerate() {
            for &c in &pa[i + 1..] {
                if !g.is_adjacent(a, c) {
                    out.insert((a.min(c), b, a.max(c)));
                }
            }
        }
    }
    out
}

/// Markov equivalence of two DAGs: equal skeletons and equal v-structures.
pub fn markov_equivalent(d1: &MixedGraph, d2: &MixedGraph) -> Result<bool> {
    if d1.names() != d2.names() {
        return Err(MecError::VertexMismatch);
    }
    let (v1, v2) = (v_structures(d1)?, v_structures(d2)?);
    Ok(d1.skeleton() == d2.skeleton() && v1 == v2)
}

/// Checks that `g` is a chain graph whose chain components are chordal:
/// no directed edge inside a chain component and the directed edges between
/// components form an acyclic quotient.
pub fn validate_essential_graph(g: &MixedGraph) -> Result<()> {
    let comps = chain_component_sets(g);
    let mut comp_of = vec![0usize; g.vertex_count()];
    for (i, c) in comps.iter().enumerate() {
        for v in c.ones() {
            comp_of[v] = i;
        }
    }
    let mut quotient = vec![FixedBitSet::with_capacity(comps.len()); comps.len()];
    for (a, b) in g.directed_edges() {
        if comp_of[a] == comp_of[b] {
            return Err(MecError::InvalidEssentialGraph(format!(
                "partially directed cycle through {} -> {}",
                g.name(a),
                g.name(b)
            )));
        }
        quotient[comp_of[a]].insert(comp_of[b]);
    }
    if topological_order(comps.len(), &quotient).is_none() {
        return Err(MecError::InvalidEssentialGraph("partially directed cycle".into()));
    }
    let und = g.undirected_adjacency();
    for c in &comps {
        if !crate::chordal::is_chordal_masked(&und, c) {
            return Err(MecError::InvalidEssentialGraph(
                "chain component is not chordal".into(),
            ));
        }
    }
    Ok(())
}

/// Vertices of the root's connected component grouped by BFS distance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexPartitionByDistance {
    pub levels: Vec<Vec<Vertex>>,
}

impl VertexPartitionByDistance {
    pub fn new(g: &MixedGraph, root: Vertex) -> Self {
        let adj = g.skeleton_adjacency();
        let mut dist = vec![usize::MAX; g.vertex_count()];
        dist[root] = 0;
        let mut levels = vec![vec![root]];
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            for w in adj[v].ones() {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    if levels.len() <= dist[w] {
                        levels.push(Vec::new());
                    }
                    levels[dist[w]].push(w);
                    queue.push_back(w);
                }
            }
        }
        for l in &mut levels {
            l.sort_unstable();
        }
        Self { levels }
    }

    pub fn level_of(&self, v: Vertex) -> Option<usize> {
        self.levels.iter().position(|l| l.contains(&v))
    }
}
