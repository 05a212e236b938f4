//! Closure of a partially directed graph under Meek's four orientation rules.
//!
//! An undirected edge `a - b` is oriented `a -> b` when
//!
//! 1. some `c -> a` has `c` nonadjacent to `b`;
//! 2. some `c` has `a -> c -> b`;
//! 3. two nonadjacent `c`, `d` have `a - c -> b` and `a - d -> b`;
//! 4. some `c -> d -> b` has `c` nonadjacent to `b` and `a` adjacent to both
//!    `c` and `d`.

use fixedbitset::FixedBitSet;

use crate::error::{MecError, Result};
use crate::graph::{topological_order, MixedGraph, Vertex, VertexSet};

struct State {
    und: Vec<VertexSet>,
    out: Vec<VertexSet>,
    inc: Vec<VertexSet>,
    adj: Vec<VertexSet>,
}

impl State {
    fn implies(&self, a: Vertex, b: Vertex) -> bool {
        // rule 1
        let mut r1 = self.inc[a].clone();
        r1.difference_with(&self.adj[b]);
        r1.set(b, false);
        if !r1.is_clear() {
            return true;
        }
        // rule 2
        if !self.out[a].is_disjoint(&self.inc[b]) {
            return true;
        }
        // rule 3
        let mut cands = self.und[a].clone();
        cands.intersect_with(&self.inc[b]);
        let cs: Vec<Vertex> = cands.ones().collect();
        for (i, &c) in cs.iter().enumerate() {
            if cs[i + 1..].iter().any(|&d| !self.adj[c].contains(d)) {
                return true;
            }
        }
        // rule 4
        for d in self.inc[b].intersection(&self.adj[a]) {
            for c in self.inc[d].intersection(&self.adj[a]) {
                if c != b && !self.adj[b].contains(c) {
                    return true;
                }
            }
        }
        false
    }

    fn orient(&mut self, a: Vertex, b: Vertex) {
        self.und[a].set(b, false);
        self.und[b].set(a, false);
        self.out[a].insert(b);
        self.inc[b].insert(a);
    }
}

/// Maximal PDAG: applies the four rules until no edge changes.
pub fn meek_close(g: &MixedGraph) -> Result<MixedGraph> {
    let n = g.vertex_count();
    let out = g.children_adjacency();
    if topological_order(n, &out).is_none() {
        return Err(MecError::InconsistentOrientation("directed cycle in input".into()));
    }
    let mut inc = vec![FixedBitSet::with_capacity(n); n];
    for (a, b) in g.directed_edges() {
        inc[b].insert(a);
    }
    let mut st = State { und: g.undirected_adjacency(), out, inc, adj: g.skeleton_adjacency() };
    loop {
        let mut changed = false;
        for a in 0..n {
            let nbrs: Vec<Vertex> = st.und[a].ones().filter(|&b| b > a).collect();
            for b in nbrs {
                let fwd = st.implies(a, b);
                let bwd = st.implies(b, a);
                match (fwd, bwd) {
                    (true, true) => {
                        return Err(MecError::InconsistentOrientation(format!(
                            "{} - {} forced both ways",
                            g.name(a),
                            g.name(b)
                        )))
                    }
                    (true, false) => {
                        st.orient(a, b);
                        changed = true;
                    }
                    (false, true) => {
                        st.orient(b, a);
                        changed = true;
                    }
                    (false, false) => {}
                }
            }
        }
        if !changed {
            break;
        }
    }
    if topological_order(n, &st.out).is_none() {
        return Err(MecError::InconsistentOrientation("closure has a directed cycle".into()));
    }
    let mut res = g.empty_like();
    for a in 0..n {
        for b in st.out[a].ones() {
            res.add_directed(a, b)?;
        }
        for b in st.und[a].ones().filter(|&b| b > a) {
            res.add_undirected(a, b)?;
        }
    }
    Ok(res)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::tests::{diamond, undirected};

    #[test]
    fn rule_one() {
        let mut g = undirected(3, &[(2, 3)]);
        g.add_directed(0, 1).unwrap();
        let c = meek_close(&g).unwrap();
        assert!(c.has_directed(1, 2));
        assert!(c.is_fully_directed());
    }

    #[test]
    fn both_into_v1_is_a_fixed_point() {
        let mut g = diamond();
        g.orient(1, 0).unwrap();
        g.orient(2, 0).unwrap();
        let c = meek_close(&g).unwrap();
        assert_eq!(c, g);
    }

    #[test]
    fn v2_v1_v3_chain_orients_everything() {
        let mut g = diamond();
        g.orient(1, 0).unwrap();
        g.orient(0, 2).unwrap();
        let c = meek_close(&g).unwrap();
        assert!(c.is_fully_directed());
        assert!(c.has_directed(1, 2) && c.has_directed(2, 3) && c.has_directed(1, 3));
    }

    #[test]
    fn rule_three() {
        // a - b, a - c -> b, a - d -> b, c and d nonadjacent
        let mut g = undirected(4, &[(1, 2), (1, 3), (1, 4)]);
        g.add_directed(2, 1).unwrap();
        g.add_directed(3, 1).unwrap();
        let c = meek_close(&g).unwrap();
        assert!(c.has_directed(0, 1));
    }

    #[test]
    fn rule_four() {
        // a - b, a - c, a - d, c -> d -> b, c nonadjacent to b
        let mut g = undirected(4, &[(1, 2), (1, 3), (1, 4)]);
        g.add_directed(2, 3).unwrap();
        g.add_directed(3, 1).unwrap();
        let c = meek_close(&g).unwrap();
        assert!(c.has_directed(0, 1));
    }

    #[test]
    fn conflicting_orientations_are_reported() {
        // a -> b - c <- d with a, c and b, d nonadjacent forces b - c both ways
        let mut g = undirected(4, &[(2, 3)]);
        g.add_directed(0, 1).unwrap();
        g.add_directed(3, 2).unwrap();
        assert!(matches!(meek_close(&g), Err(MecError::InconsistentOrientation(_))));
        let mut cyc = MixedGraph::with_vertices(&["a", "b", "c"]);
        cyc.add_directed(0, 1).unwrap();
        cyc.add_directed(1, 2).unwrap();
        cyc.add_directed(2, 0).unwrap();
        assert!(meek_close(&cyc).is_err());
    }

    #[test]
    fn idempotent_on_examples() {
        let mut g = diamond();
        g.orient(0, 1).unwrap();
        let once = meek_close(&g).unwrap();
        assert_eq!(meek_close(&once).unwrap(), once);
    }
}
