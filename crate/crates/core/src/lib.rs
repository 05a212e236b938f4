//! Counting, uniform sampling and intervention design for Markov
//! equivalence classes of DAGs, via rooted clique trees of the chain
//! components of an essential graph.

pub mod chordal;
pub mod cli;
pub mod clique_tree;
pub mod count;
pub mod error;
pub mod graph;
pub mod intervention;
pub mod io;
pub mod meek;
pub mod oracle;
pub mod prior;
pub mod random;
pub mod sample;

pub use chordal::is_chordal;
pub use clique_tree::{build_clique_tree, root_tree, rooted_orient, CliqueTree, RootedCliqueTree};
pub use count::{mec_size, mec_size_with_memo, rooted_sizes, BigCount, CanonicalKey, MemoStats, MemoStore};
pub use error::{MecError, Result};
pub use graph::{chain_components, markov_equivalent, v_structures, MixedGraph, Vertex, VertexSet};
pub use intervention::{expected_resolved_exact, expected_resolved_mc, greedy_select, intervention_report};
pub use meek::meek_close;
pub use oracle::{brute_size, enumerate_mec};
pub use prior::{parent_set_counts, size_with_prior, HypothesisGraph};
pub use random::random_uccg;
pub use sample::{sample_dag, sample_many, Sampler};
