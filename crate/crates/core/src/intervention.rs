//! Expected number of edges resolved by intervening on a target set.
//!
//! Intervening on a vertex fixes the orientation of every edge touching it;
//! Meek's rules then propagate. The resolved count of a member depends only on
//! its orientation of the intervened edges, so the expectation over the MEC
//! is a weighted sum over realizable configurations of those edges, each
//! weighted by its share of consistent members.

use std::collections::{BTreeSet, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::seq::index::sample as sample_indices;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;

use crate::count::{mec_size_with_memo, BigCount, MemoStore};
use crate::error::{MecError, Result};
use crate::graph::{MixedGraph, Vertex};
use crate::meek::meek_close;
use crate::prior::{size_with_prior_memo, HypothesisGraph};
use crate::random::random_uccg;
use crate::sample::Sampler;

/// Orientation of every intervened edge, as sorted `(from, to)` pairs.
pub type Configuration = Vec<(Vertex, Vertex)>;

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigurationRecord {
    pub orientation: Configuration,
    pub count: BigCount,
    pub weight: BigRational,
    pub resolved: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InterventionReport {
    pub targets: Vec<Vertex>,
    pub size: BigCount,
    pub records: Vec<ConfigurationRecord>,
    pub expected: BigRational,
    pub mc: Option<McEstimate>,
}

/// Undirected edges of `g_star` touching a target, as `(min, max)`.
pub fn intervened_edges(g_star: &MixedGraph, targets: &[Vertex]) -> Vec<(Vertex, Vertex)> {
    g_star
        .undirected_edges()
        .filter(|&(a, b)| targets.contains(&a) || targets.contains(&b))
        .collect()
}

/// Number of edges undirected in `g_star` that are directed once `config` is
/// applied and closed under Meek's rules.
pub fn resolved_count(g_star: &MixedGraph, config: &[(Vertex, Vertex)]) -> Result<usize> {
    let mut g = g_star.clone();
    for &(a, b) in config {
        if g_star.has_directed(b, a) {
            return Err(MecError::InconsistentOrientation(format!(
                "{} -> {} contradicts the essential graph",
                g_star.name(a),
                g_star.name(b)
            )));
        }
        if !g_star.is_adjacent(a, b) {
            return Err(MecError::InconsistentOrientation(format!(
                "{} - {} is not an edge",
                g_star.name(a),
                g_star.name(b)
            )));
        }
        g.orient(a, b)?;
    }
    let closed = meek_close(&g)?;
    Ok(g_star.undirected_count() - closed.undirected_count())
}

/// Orientations of `edges` that form no directed cycle and no new
/// v-structure together with the directed edges of `g_star`.
pub fn locally_valid_configurations(g_star: &MixedGraph, edges: &[(Vertex, Vertex)]) -> Vec<Configuration> {
    let n = g_star.vertex_count();
    let mut children: Vec<BTreeSet<Vertex>> = vec![BTreeSet::new(); n];
    let mut parents: Vec<BTreeSet<Vertex>> = vec![BTreeSet::new(); n];
    for (a, b) in g_star.directed_edges() {
        children[a].insert(b);
        parents[b].insert(a);
    }
    struct Walk<'g> {
        g: &'g MixedGraph,
        edges: &'g [(Vertex, Vertex)],
        children: Vec<BTreeSet<Vertex>>,
        parents: Vec<BTreeSet<Vertex>>,
        current: Configuration,
        out: Vec<Configuration>,
    }
    impl Walk<'_> {
        fn reaches(&self, from: Vertex, to: Vertex) -> bool {
            let mut stack = vec![from];
            let mut seen = vec![false; self.children.len()];
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
        fn admissible(&self, a: Vertex, b: Vertex) -> bool {
            self.parents[b].iter().all(|&c| self.g.is_adjacent(a, c)) && !self.reaches(b, a)
        }
        fn go(&mut self, i: usize) {
            if i == self.edges.len() {
                let mut c = self.current.clone();
                c.sort_unstable();
                self.out.push(c);
                return;
            }
            let (x, y) = self.edges[i];
            for (a, b) in [(x, y), (y, x)] {
                if self.admissible(a, b) {
                    self.children[a].insert(b);
                    self.parents[b].insert(a);
                    self.current.push((a, b));
                    self.go(i + 1);
                    self.current.pop();
                    self.children[a].remove(&b);
                    self.parents[b].remove(&a);
                }
            }
        }
    }
    let mut w = Walk { g: g_star, edges, children, parents, current: Vec::new(), out: Vec::new() };
    w.go(0);
    w.out
}

fn ratio(num: &BigCount, den: &BigCount) -> BigRational {
    BigRational::new(BigInt::from(num.clone()), BigInt::from(den.clone()))
}

/// Exact expectation with its per-configuration breakdown.
pub fn intervention_report(g_star: &MixedGraph, targets: &[Vertex]) -> Result<InterventionReport> {
    intervention_report_memo(g_star, targets, &MemoStore::new())
}

pub fn intervention_report_memo(g_star: &MixedGraph, targets: &[Vertex], memo: &MemoStore) -> Result<InterventionReport> {
    if let Some(&t) = targets.iter().find(|&&t| t >= g_star.vertex_count()) {
        return Err(MecError::UnknownVertex(format!("#{t}")));
    }
    let mut targets = targets.to_vec();
    targets.sort_unstable();
    targets.dedup();
    let size = mec_size_with_memo(g_star, memo)?;
    let edges = intervened_edges(g_star, &targets);
    let mut records = Vec::new();
    let mut expected = BigRational::zero();
    for config in locally_valid_configurations(g_star, &edges) {
        let h = HypothesisGraph::from_required(g_star, &config)?;
        let count = size_with_prior_memo(g_star, &h, memo)?;
        if count.is_zero() {
            continue;
        }
        let resolved = resolved_count(g_star, &config)?;
        let weight = ratio(&count, &size);
        expected += &weight * BigRational::from_integer(BigInt::from(resolved));
        records.push(ConfigurationRecord { orientation: config, count, weight, resolved });
    }
    Ok(InterventionReport { targets, size, records, expected, mc: None })
}

/// Expected number of resolved edges as an exact rational.
pub fn expected_resolved_exact(g_star: &MixedGraph, targets: &[Vertex]) -> Result<BigRational> {
    Ok(intervention_report(g_star, targets)?.expected)
}

/// Monte-Carlo estimate of the expected resolved count from `n` uniform
/// samples.
pub fn expected_resolved_mc(g_star: &MixedGraph, targets: &[Vertex], n: usize, seed: u64) -> Result<McEstimate> {
    if n == 0 {
        return Err(MecError::EmptySample);
    }
    let memo = MemoStore::new();
    let sampler = Sampler::new(g_star, &memo)?;
    let edges = intervened_edges(g_star, targets);
    let mut cache: HashMap<Configuration, usize> = HashMap::new();
    let mut values = Vec::with_capacity(n);
    for d in sampler.sample_many(n, seed)? {
        let config: Configuration = edges.iter().map(|&(a, b)| if d.has_directed(a, b) { (a, b) } else { (b, a) }).collect();
        let r = match cache.get(&config) {
            Some(&r) => r,
            None => {
                let r = resolved_count(g_star, &config)?;
                cache.insert(config, r);
                r
            }
        };
        values.push(r as f64);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let std_error = if n > 1 {
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        (var / n as f64).sqrt()
    } else {
        0.0
    };
    Ok(McEstimate { mean, std_error, samples: n })
}

/// Greedy target selection under budget `k`; ties go to the lowest vertex.
pub fn greedy_select(g_star: &MixedGraph, k: usize) -> Result<Vec<Vertex>> {
    if k == 0 || k > g_star.vertex_count() {
        return Err(MecError::Infeasible(format!("budget {k} outside 1..={}", g_star.vertex_count())));
    }
    let memo = MemoStore::new();
    let mut chosen: Vec<Vertex> = Vec::with_capacity(k);
    for _ in 0..k {
        let mut best: Option<(BigRational, Vertex)> = None;
        for v in g_star.vertices().filter(|v| !chosen.contains(v)) {
            let mut set = chosen.clone();
            set.push(v);
            let value = intervention_report_memo(g_star, &set, &memo)?.expected;
            if best.as_ref().is_none_or(|(b, _)| value > *b) {
                best = Some((value, v));
            }
        }
        chosen.push(best.expect("candidate exists").1);
    }
    Ok(chosen)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SdeParams {
    pub p: usize,
    pub r: f64,
    pub trials: usize,
    pub target_count: usize,
    pub sample_grid: Vec<usize>,
    pub seed: u64,
    pub threads: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SdeRow {
    pub samples: usize,
    pub sde: f64,
    /// Approximate standard error of `sde`, `sde / sqrt(2 (trials - 1))`.
    pub std_error: f64,
}

/// Deterministic seed for sub-stream `(a, b)` of `seed` (SplitMix64 finaliser).
pub fn derive_seed(seed: u64, a: u64, b: u64) -> u64 {
    let mut z = seed
        .wrapping_add(a.wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add(b.wrapping_mul(0xD1B5_4A32_D192_ED03));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Per-trial absolute error of the estimate against the exact value, for
/// each sample size of the grid. Targets are drawn once per graph and shared
/// by every sample size.
pub fn sde_trial(params: &SdeParams, trial: usize) -> Result<Vec<f64>> {
    let t = trial as u64;
    let g = random_uccg(params.p, params.r, derive_seed(params.seed, t, 0))?;
    let mut rng = ChaCha20Rng::seed_from_u64(derive_seed(params.seed, t, 1));
    let count = params.target_count.min(params.p);
    let mut targets: Vec<Vertex> = sample_indices(&mut rng, params.p, count).into_iter().collect();
    targets.sort_unstable();
    let exact = expected_resolved_exact(&g, &targets)?.to_f64().unwrap_or(f64::NAN);
    params
        .sample_grid
        .iter()
        .enumerate()
        .map(|(i, &n)| {
            let est = expected_resolved_mc(&g, &targets, n, derive_seed(params.seed, t, 2 + i as u64))?;
            Ok((exact - est.mean).abs())
        })
        .collect()
}

/// Empirical standard deviation of the absolute estimation error per sample
/// size, across random graphs.
pub fn sde_experiment(params: &SdeParams) -> Result<Vec<SdeRow>> {
    if params.trials == 0 {
        return Err(MecError::Infeasible("at least one trial required".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(params.threads.max(1))
        .build()
        .map_err(|e| MecError::Format(e.to_string()))?;
    let errors: Vec<Vec<f64>> =
        pool.install(|| (0..params.trials).into_par_iter().map(|t| sde_trial(params, t)).collect::<Result<_>>())?;
    Ok(params
        .sample_grid
        .iter()
        .enumerate()
        .map(|(i, &n)| {
            let col: Vec<f64> = errors.iter().map(|e| e[i]).collect();
            let sde = sample_sd(&col);
            let std_error = if col.len() > 1 { sde / (2.0 * (col.len() - 1) as f64).sqrt() } else { 0.0 };
            SdeRow { samples: n, sde, std_error }
        })
        .collect())
}

fn sample_sd(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let mean = xs.iter().sum::<f64>() / xs.len() as f64;
    (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (xs.len() - 1) as f64).sqrt()
}
