//! Clique trees of chordal graphs, rooted at a vertex, with separator,
//! residual and emission sets per clique.
//!
//! Rooting a tree at vertex `r` picks the lowest-index clique containing `r`.
//! The root clique uses `Sep = {r}` and `Res = K \ {r}`; every other clique
//! has `Sep(K) = K ∩ Pa(K)` and `Res(K) = K \ Sep(K)`. Emission sets are filled
//! top-down: `u ∈ Sep(K)` emits into `K` when `u = r` or when the emission set
//! of the clique holding `u` in its residual is not contained in `Sep(K)`.

use std::collections::VecDeque;
use std::fmt::Write as _;

use fixedbitset::FixedBitSet;

use crate::chordal::{is_reverse_peo, maximal_cliques, mcs_order};
use crate::error::{MecError, Result};
use crate::graph::{components_of, MixedGraph, Vertex, VertexSet};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliqueTree {
    /// Maximal cliques; bitsets are sized to the whole graph.
    pub cliques: Vec<VertexSet>,
    /// Tree edges `(i, j)` with `i < j`.
    pub edges: Vec<(usize, usize)>,
    neighbors: Vec<Vec<usize>>,
}

impl CliqueTree {
    /// Clique tree of the chordal graph induced by `adj` on `mask`.
    ///
    /// Cliques come from maximum cardinality search; the tree is a maximum
    /// weight spanning tree over pairwise intersection sizes, ties broken by
    /// clique indices. `rank` overrides the MCS tie-breaking order.
    pub(crate) fn build_masked(adj: &[VertexSet], mask: &VertexSet, rank: Option<&[usize]>) -> Result<Self> {
        let n = mask.len();
        let order = mcs_order(adj, mask, rank);
        if !is_reverse_peo(adj, &order, n) {
            return Err(MecError::NotChordal);
        }
        if components_of(adj, mask).len() > 1 {
            return Err(MecError::Disconnected);
        }
        let cliques = maximal_cliques(adj, mask, &order);
        let m = cliques.len();
        let mut pairs = Vec::new();
        for i in 0..m {
            for j in i + 1..m {
                let mut x = cliques[i].clone();
                x.intersect_with(&cliques[j]);
                let w = x.count_ones(..);
                if w > 0 {
                    pairs.push((w, i, j));
                }
            }
        }
        pairs.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
        let mut uf: Vec<usize> = (0..m).collect();
        fn find(uf: &mut [usize], mut x: usize) -> usize {
            while uf[x] != x {
                uf[x] = uf[uf[x]];
                x = uf[x];
            }
            x
        }
        let mut edges = Vec::with_capacity(m.saturating_sub(1));
        let mut neighbors = vec![Vec::new(); m];
        for (_, i, j) in pairs {
            let (ri, rj) = (find(&mut uf, i), find(&mut uf, j));
            if ri != rj {
                uf[ri] = rj;
                edges.push((i, j));
                neighbors[i].push(j);
                neighbors[j].push(i);
            }
        }
        edges.sort_unstable();
        for nb in &mut neighbors {
            nb.sort_unstable();
        }
        Ok(Self { cliques, edges, neighbors })
    }

    pub fn clique_count(&self) -> usize {
        self.cliques.len()
    }

    pub fn neighbors(&self, k: usize) -> &[usize] {
        &self.neighbors[k]
    }

    pub fn clique_vertices(&self, k: usize) -> Vec<Vertex> {
        self.cliques[k].ones().collect()
    }

    /// Cliques on the tree path from `a` to `b`, inclusive.
    pub fn path(&self, a: usize, b: usize) -> Vec<usize> {
        let m = self.cliques.len();
        let mut prev = vec![usize::MAX; m];
        let mut queue = VecDeque::from([a]);
        prev[a] = a;
        while let Some(k) = queue.pop_front() {
            for &nb in &self.neighbors[k] {
                if prev[nb] == usize::MAX {
                    prev[nb] = k;
                    queue.push_back(nb);
                }
            }
        }
        let mut path = vec![b];
        let mut cur = b;
        while cur != a {
            cur = prev[cur];
            path.push(cur);
        }
        path.reverse();
        path
    }

    /// Clique-intersection property: `Ki ∩ Kj` lies in every clique on the
    /// path between them.
    pub fn has_clique_intersection_property(&self) -> bool {
        let m = self.cliques.len();
        for i in 0..m {
            for j in i + 1..m {
                let mut x = self.cliques[i].clone();
                x.intersect_with(&self.cliques[j]);
                if !self.path(i, j).iter().all(|&k| x.is_subset(&self.cliques[k])) {
                    return false;
                }
            }
        }
        true
    }

    /// Induced-subtree property: the cliques containing each vertex form a
    /// connected subtree.
    pub fn has_induced_subtree_property(&self) -> bool {
        let Some(first) = self.cliques.first() else {
            return true;
        };
        let n = first.len();
        for v in 0..n {
            let holding: Vec<usize> = (0..self.cliques.len()).filter(|&k| self.cliques[k].contains(v)).collect();
            if holding.is_empty() {
                continue;
            }
            let edges = self
                .edges
                .iter()
                .filter(|(i, j)| self.cliques[*i].contains(v) && self.cliques[*j].contains(v))
                .count();
            if edges + 1 != holding.len() {
                return false;
            }
        }
        true
    }

    pub fn is_tree(&self) -> bool {
        let m = self.cliques.len();
        if self.edges.len() + 1 != m {
            return false;
        }
        let mut seen = vec![false; m];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(k) = stack.pop() {
            for &nb in &self.neighbors[k] {
                if !seen[nb] {
                    seen[nb] = true;
                    stack.push(nb);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }
}

/// Clique tree of a connected chordal undirected graph.
pub fn build_clique_tree(g: &MixedGraph) -> Result<CliqueTree> {
    if !g.is_undirected_graph() {
        return Err(MecError::DirectedEdgesPresent);
    }
    let n = g.vertex_count();
    if n == 0 {
        return Err(MecError::Disconnected);
    }
    let mut all = FixedBitSet::with_capacity(n);
    all.insert_range(..);
    CliqueTree::build_masked(&g.undirected_adjacency(), &all, None)
}

/// A clique tree rooted for a chosen root vertex.
#[derive(Debug, Clone)]
pub struct RootedCliqueTree<'t> {
    pub tree: &'t CliqueTree,
    pub root_vertex: Vertex,
    pub root_clique: usize,
    pub parent: Vec<Option<usize>>,
    pub children: Vec<Vec<usize>>,
    /// Cliques in breadth-first order from the root clique.
    pub order: Vec<usize>,
    pub sep: Vec<VertexSet>,
    pub res: Vec<VertexSet>,
    /// Empty until [`RootedCliqueTree::compute_emission_sets`] runs.
    pub em: Vec<VertexSet>,
    /// `home[u]` is the clique holding `u` in its residual (`K_u`); the root
    /// vertex maps to the root clique.
    home: Vec<usize>,
}

impl<'t> RootedCliqueTree<'t> {
    pub fn new(tree: &'t CliqueTree, r: Vertex) -> Result<Self> {
        let root_clique = tree
            .cliques
            .iter()
            .position(|k| k.contains(r))
            .ok_or_else(|| MecError::UnknownVertex(format!("#{r}")))?;
        let m = tree.cliques.len();
        let n = tree.cliques[0].len();
        let mut parent = vec![None; m];
        let mut children = vec![Vec::new(); m];
        let mut order = Vec::with_capacity(m);
        let mut seen = vec![false; m];
        let mut queue = VecDeque::from([root_clique]);
        seen[root_clique] = true;
        while let Some(k) = queue.pop_front() {
            order.push(k);
            for &nb in tree.neighbors(k) {
                if !seen[nb] {
                    seen[nb] = true;
                    parent[nb] = Some(k);
                    children[k].push(nb);
                    queue.push_back(nb);
                }
            }
        }
        let mut sep = vec![FixedBitSet::with_capacity(n); m];
        let mut res = vec![FixedBitSet::with_capacity(n); m];
        let mut home = vec![usize::MAX; n];
        for k in 0..m {
            let s = match parent[k] {
                Some(p) => {
                    let mut s = tree.cliques[k].clone();
                    s.intersect_with(&tree.cliques[p]);
                    s
                }
                None => {
                    let mut s = FixedBitSet::with_capacity(n);
                    s.insert(r);
                    s
                }
            };
            let mut rr = tree.cliques[k].clone();
            rr.difference_with(&s);
            for u in rr.ones() {
                home[u] = k;
            }
            sep[k] = s;
            res[k] = rr;
        }
        home[r] = root_clique;
        Ok(Self {
            tree,
            root_vertex: r,
            root_clique,
            parent,
            children,
            order,
            sep,
            res,
            em: Vec::new(),
            home,
        })
    }

    /// Clique holding `u` in its residual.
    pub fn home(&self, u: Vertex) -> usize {
        self.home[u]
    }

    pub fn emission_computed(&self) -> bool {
        !self.em.is_empty()
    }

    /// Fills `em` top-down.
    pub fn compute_emission_sets(&mut self) {
        let m = self.tree.cliques.len();
        let n = self.tree.cliques[0].len();
        let mut em = vec![FixedBitSet::with_capacity(n); m];
        for &k in &self.order {
            if self.parent[k].is_none() {
                em[k].insert(self.root_vertex);
                continue;
            }
            let mut e = FixedBitSet::with_capacity(n);
            for u in self.sep[k].ones() {
                let emits = if u == self.root_vertex {
                    true
                } else {
                    let hu = self.home[u];
                    // Disjoint separators imply emission without consulting Em(K_u).
                    if self.sep[hu].is_disjoint(&self.sep[k]) {
                        debug_assert!(!em[hu].is_subset(&self.sep[k]));
                        true
                    } else {
                        !em[hu].is_subset(&self.sep[k])
                    }
                };
                if emits {
                    e.insert(u);
                }
            }
            em[k] = e;
        }
        self.em = em;
    }

    /// Clique emission condition `Em(K) = Sep(K)`.
    pub fn clique_satisfies_emission(&self, k: usize) -> bool {
        assert!(self.emission_computed(), "emission sets not computed");
        self.em[k] == self.sep[k]
    }

    /// `Res(T^(K))` for every clique, the union of residuals in the subtree
    /// rooted at `K`.
    pub fn subtree_residuals(&self) -> Vec<VertexSet> {
        let mut out = self.res.clone();
        for &k in self.order.iter().rev() {
            if let Some(p) = self.parent[k] {
                let child = out[k].clone();
                out[p].union_with(&child);
            }
        }
        out
    }

    /// Parents of `v` in the rooted essential graph.
    pub fn parents_of(&self, v: Vertex) -> Vec<Vertex> {
        if v == self.root_vertex {
            return Vec::new();
        }
        self.em[self.home[v]].ones().collect()
    }

    /// One line per clique: `K<i>: sep={..} res={..} em={..} parent=K<j>`.
    pub fn dump(&self, g: &MixedGraph) -> String {
        let fmt = |s: &VertexSet| s.ones().map(|v| g.name(v).to_string()).collect::<Vec<_>>().join(",");
        let mut out = String::new();
        for &k in &self.order {
            let parent = self.parent[k].map_or("none".to_string(), |p| format!("K{}", p + 1));
            let em = self.em.get(k).map(fmt).unwrap_or_default();
            let _ = writeln!(
                out,
                "K{}: sep={{{}}} res={{{}}} em={{{}}} parent={}",
                k + 1,
                fmt(&self.sep[k]),
                fmt(&self.res[k]),
                em,
                parent
            );
        }
        out
    }
}

/// Rooted tree with emission sets, for the vertex `r` of `tree`.
pub fn root_tree(tree: &CliqueTree, r: Vertex) -> Result<RootedCliqueTree<'_>> {
    RootedCliqueTree::new(tree, r)
}

/// The `r`-rooted essential graph `G^(r)` of a connected chordal graph.
pub fn rooted_orient(g: &MixedGraph, r: Vertex) -> Result<MixedGraph> {
    if r >= g.vertex_count() {
        return Err(MecError::UnknownVertex(format!("#{r}")));
    }
    let tree = build_clique_tree(g)?;
    let mut rt = RootedCliqueTree::new(&tree, r)?;
    rt.compute_emission_sets();
    let mut out = g.clone();
    orient_rooted(&rt, &mut out)?;
    Ok(out)
}

/// Orients `Em(K) -> Res(K)` in `g` for every clique of `rt`.
pub(crate) fn orient_rooted(rt: &RootedCliqueTree<'_>, g: &mut MixedGraph) -> Result<()> {
    for k in 0..rt.tree.cliques.len() {
        for u in rt.em[k].ones() {
            for w in rt.res[k].ones() {
                g.orient(u, w)?;
            }
        }
    }
    Ok(())
}
