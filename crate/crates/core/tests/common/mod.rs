#![allow(dead_code)]

use std::collections::HashMap;
use std::io::Write;

use mec_core::graph::MixedGraph;
use mec_core::io::parse_edge_list;
use statrs::distribution::{ChiSquared, ContinuousCDF};

pub const DIAMOND: &str = "v1 -- v2\nv1 -- v3\nv2 -- v3\nv2 -- v4\nv3 -- v4\n";

pub fn diamond() -> MixedGraph {
    parse_edge_list(DIAMOND).unwrap()
}

pub fn graph(text: &str) -> MixedGraph {
    parse_edge_list(text).unwrap()
}

/// Sorted directed edge list, used as a DAG identity.
pub fn dag_key(d: &MixedGraph) -> Vec<(usize, usize)> {
    d.directed_edges().collect()
}

/// Chordality by exhaustive search for an induced chordless cycle of
/// length at least four.
pub fn brute_chordal(g: &MixedGraph) -> bool {
    let n = g.vertex_count();
    assert!(n <= 12);
    for mask in 0u32..(1 << n) {
        let vs: Vec<usize> = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
        if vs.len() < 4 {
            continue;
        }
        let deg2 = vs.iter().all(|&v| vs.iter().filter(|&&w| w != v && g.is_adjacent(v, w)).count() == 2);
        if !deg2 {
            continue;
        }
        let mut seen = vec![vs[0]];
        let mut stack = vec![vs[0]];
        while let Some(v) = stack.pop() {
            for &w in &vs {
                if g.is_adjacent(v, w) && !seen.contains(&w) {
                    seen.push(w);
                    stack.push(w);
                }
            }
        }
        if seen.len() == vs.len() {
            return false;
        }
    }
    true
}

/// Every connected chordal labelled graph on `n` vertices, built without the
/// library's chordality code.
pub fn chordal_corpus(n: usize) -> Vec<MixedGraph> {
    let names: Vec<String> = (1..=n).map(|i| format!("v{i}")).collect();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << pairs.len()) {
        let mut g = MixedGraph::with_vertices(&names);
        for (i, &(a, b)) in pairs.iter().enumerate() {
            if mask >> i & 1 == 1 {
                g.add_undirected(a, b).unwrap();
            }
        }
        if g.is_connected() && brute_chordal(&g) {
            out.push(g);
        }
    }
    out
}

pub fn small_corpus(max_n: usize) -> Vec<MixedGraph> {
    (1..=max_n).flat_map(chordal_corpus).collect()
}

/// Pearson statistic of observed category counts against a uniform law, and
/// the critical value at level `alpha`.
pub fn chi_square_uniform(observed: &[u64], alpha: f64) -> (f64, f64) {
    let k = observed.len();
    let n: u64 = observed.iter().sum();
    let expected = n as f64 / k as f64;
    let stat = observed.iter().map(|&o| (o as f64 - expected).powi(2) / expected).sum();
    let critical = ChiSquared::new((k - 1) as f64).unwrap().inverse_cdf(1.0 - alpha);
    (stat, critical)
}

pub fn index_of(members: &[MixedGraph]) -> HashMap<Vec<(usize, usize)>, usize> {
    members.iter().enumerate().map(|(i, d)| (dag_key(d), i)).collect()
}

/// Collects sub-check failures so that one line per criterion is always
/// printed before the verdict.
pub struct Criterion {
    id: u32,
    title: &'static str,
    checks: usize,
    failures: Vec<String>,
}

impl Criterion {
    pub fn new(id: u32, title: &'static str) -> Self {
        Self { id, title, checks: 0, failures: Vec::new() }
    }

    pub fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    pub fn finish(self, detail: &str) {
        let verdict = if self.failures.is_empty() { "PASS" } else { "FAIL" };
        // Written to the process stderr directly so the line survives test
        // output capture.
        let _ = writeln!(
            std::io::stderr(),
            "acceptance criterion {}: {verdict}: {} [{} checks] {detail}",
            self.id,
            self.title,
            self.checks
        );
        assert!(
            self.failures.is_empty(),
            "criterion {} failed:\n{}",
            self.id,
            self.failures.iter().take(20).cloned().collect::<Vec<_>>().join("\n")
        );
    }
}
