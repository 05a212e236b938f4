//! Exact uniform sampling from a Markov equivalence class, optionally
//! conditioned on a hypothesis.
//!
//! Chain components are processed lowest vertex first. For each one a root
//! `v` is drawn with probability `Size(G^(v)) / Size(G)` using exact integer
//! arithmetic, the rooted essential graph `G^(v)` is oriented, and the chain
//! components it leaves behind go back on the work list.
//!
//! Random numbers come from ChaCha20 seeded with `seed_from_u64(seed)`; the
//! `i`-th draw of [`Sampler::sample_many`] uses stream `i`. A root is picked by
//! drawing `x` uniformly in `[0, Size(G))` by rejection over
//! `bits(Size(G))`-bit little-endian integers assembled from 32-bit words,
//! then taking the first vertex whose cumulative rooted size exceeds `x`.

use fixedbitset::FixedBitSet;
use num_bigint::BigUint;
use num_traits::Zero;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::clique_tree::{orient_rooted, RootedCliqueTree};
use crate::count::{BigCount, Counter, Forbidden, MemoStore};
use crate::error::{MecError, Result};
use crate::graph::{chain_component_sets, validate_essential_graph, MixedGraph, Vertex, VertexSet};
use crate::prior::HypothesisGraph;

/// Uniform integer in `[0, bound)`.
pub(crate) fn uniform_below<R: RngCore>(rng: &mut R, bound: &BigUint) -> BigUint {
    assert!(!bound.is_zero(), "empty range");
    let bits = bound.bits();
    let words = bits.div_ceil(32) as usize;
    let top = bits % 32;
    loop {
        let mut digits: Vec<u32> = (0..words).map(|_| rng.random::<u32>()).collect();
        if top != 0 {
            if let Some(last) = digits.last_mut() {
                *last &= (1u32 << top) - 1;
            }
        }
        let x = BigUint::new(digits);
        if &x < bound {
            return x;
        }
    }
}

pub struct Sampler<'a> {
    g_star: &'a MixedGraph,
    counter: Counter<'a>,
    forbidden: Option<&'a Forbidden>,
}

impl<'a> Sampler<'a> {
    pub fn new(g_star: &'a MixedGraph, memo: &'a MemoStore) -> Result<Self> {
        validate_essential_graph(g_star)?;
        Ok(Self { g_star, counter: Counter::new(g_star, memo), forbidden: None })
    }

    /// Sampler conditioned on `h`; fails with `Unrealizable` when no member
    /// is consistent.
    pub fn with_prior(g_star: &'a MixedGraph, h: &'a HypothesisGraph, memo: &'a MemoStore) -> Result<Self> {
        validate_essential_graph(g_star)?;
        if h.forbidden().forbid.len() != g_star.vertex_count() {
            return Err(MecError::MalformedHypothesis("vertex set differs from the essential graph".into()));
        }
        let s = Self {
            g_star,
            counter: Counter::new(g_star, memo).with_prior(h.forbidden()),
            forbidden: Some(h.forbidden()),
        };
        if crate::prior::size_with_prior_memo(g_star, h, memo)?.is_zero() {
            return Err(MecError::Unrealizable);
        }
        Ok(s)
    }

    pub fn memo(&self) -> &MemoStore {
        self.counter.memo()
    }

    /// Rooted sizes of the component spanned by `mask`, in vertex order.
    pub fn root_weights(&self, mask: &VertexSet) -> Result<Vec<(Vertex, BigCount)>> {
        let tree = self.counter.build_tree(mask)?;
        mask.ones().map(|v| Ok((v, self.counter.rooted_size_in(&tree, v)?))).collect()
    }

    /// One DAG drawn with the given generator.
    pub fn sample_with_rng<R: RngCore>(&self, rng: &mut R) -> Result<MixedGraph> {
        let mut out = self.g_star.clone();
        if let Some(f) = self.forbidden {
            if out.directed_edges().any(|(u, v)| f.is_forbidden(u, v)) {
                return Err(MecError::Unrealizable);
            }
        }
        let mut work: Vec<VertexSet> = chain_component_sets(self.g_star);
        while let Some(i) = (0..work.len()).min_by_key(|&i| work[i].minimum()) {
            let comp = work.swap_remove(i);
            if comp.count_ones(..) == 1 {
                continue;
            }
            let tree = self.counter.build_tree(&comp)?;
            let weights: Vec<BigCount> =
                comp.ones().map(|v| self.counter.rooted_size_in(&tree, v)).collect::<Result<_>>()?;
            let total: BigCount = weights.iter().sum();
            if total.is_zero() {
                return Err(MecError::Unrealizable);
            }
            let x = uniform_below(rng, &total);
            let mut acc = BigCount::zero();
            let mut root = None;
            for (v, w) in comp.ones().zip(&weights) {
                acc += w;
                if x < acc {
                    root = Some(v);
                    break;
                }
            }
            let root = root.expect("cumulative weights reach the total");
            let mut rt = RootedCliqueTree::new(&tree, root)?;
            rt.compute_emission_sets();
            orient_rooted(&rt, &mut out)?;
            let mut rest = comp.clone();
            rest.set(root, false);
            let und = out.undirected_adjacency();
            work.extend(crate::graph::components_of(&und, &rest));
        }
        Ok(out)
    }

    pub fn sample(&self, seed: u64) -> Result<MixedGraph> {
        self.sample_with_rng(&mut ChaCha20Rng::seed_from_u64(seed))
    }

    /// `n` draws; draw `i` uses ChaCha20 stream `i` under `seed`.
    pub fn sample_many(&self, n: usize, seed: u64) -> Result<Vec<MixedGraph>> {
        (0..n)
            .map(|i| {
                let mut rng = ChaCha20Rng::seed_from_u64(seed);
                rng.set_stream(i as u64);
                self.sample_with_rng(&mut rng)
            })
            .collect()
    }
}

/// One uniformly drawn member of `MEC(g_star)`.
pub fn sample_dag(g_star: &MixedGraph, seed: u64) -> Result<MixedGraph> {
    let memo = MemoStore::new();
    Sampler::new(g_star, &memo)?.sample(seed)
}

pub fn sample_many(g_star: &MixedGraph, n: usize, seed: u64) -> Result<Vec<MixedGraph>> {
    let memo = MemoStore::new();
    Sampler::new(g_star, &memo)?.sample_many(n, seed)
}

/// One member drawn uniformly among those consistent with `h`.
pub fn sample_with_prior(g_star: &MixedGraph, h: &HypothesisGraph, seed: u64) -> Result<MixedGraph> {
    let memo = MemoStore::new();
    Sampler::with_prior(g_star, h, &memo)?.sample(seed)
}

pub fn sample_many_with_prior(g_star: &MixedGraph, h: &HypothesisGraph, n: usize, seed: u64) -> Result<Vec<MixedGraph>> {
    let memo = MemoStore::new();
    Sampler::with_prior(g_star, h, &memo)?.sample_many(n, seed)
}

/// Root selection weights for a connected chordal undirected graph,
/// optionally under a hypothesis.
pub fn root_weights(g: &MixedGraph, h: Option<&HypothesisGraph>) -> Result<Vec<(Vertex, BigCount)>> {
    let memo = MemoStore::new();
    let mut all = FixedBitSet::with_capacity(g.vertex_count());
    all.insert_range(..);
    let sampler = match h {
        Some(h) => Sampler {
            g_star: g,
            counter: Counter::new(g, &memo).with_prior(h.forbidden()),
            forbidden: Some(h.forbidden()),
        },
        None => Sampler::new(g, &memo)?,
    };
    sampler.root_weights(&all)
}

/// Membership in `MEC(g_star)`: acyclic, same skeleton, keeps every directed
/// edge of `g_star` and adds no v-structure.
pub fn is_member(g_star: &MixedGraph, d: &MixedGraph) -> bool {
    d.names() == g_star.names()
        && d.is_dag()
        && d.skeleton() == g_star.skeleton()
        && g_star.directed_edges().all(|(a, b)| d.has_directed(a, b))
        && crate::graph::directed_v_structures(d) == crate::graph::directed_v_structures(g_star)
}
