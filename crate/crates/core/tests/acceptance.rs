//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant};

use common::{chi_square_uniform, dag_key, diamond, index_of, small_corpus, Criterion};
use mec_core::clique_tree::{build_clique_tree, root_tree, rooted_orient};
use mec_core::count::{component_size, mec_size, mec_size_with_memo, rooted_sizes, BigCount, MemoStore};
use mec_core::graph::{chain_components, MixedGraph, Vertex, VertexPartitionByDistance};
use mec_core::intervention::{expected_resolved_exact, intervention_report, sde_experiment, SdeParams};
use mec_core::oracle::{brute_expected_resolved, brute_size, brute_size_with_prior, enumerate_mec, DEFAULT_LIMIT};
use mec_core::prior::{parent_set_counts, rooted_sizes_with_prior, size_with_prior, HypothesisGraph};
use mec_core::random::{random_bounded_chordal, random_uccg};
use mec_core::sample::{is_member, root_weights, Sampler};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

const ALPHA: f64 = 0.001;

fn n(x: u64) -> BigCount {
    BigCount::from(x)
}

fn edges(g: &MixedGraph, directed: bool) -> BTreeSet<(String, String)> {
    let list: Vec<(usize, usize)> = if directed { g.directed_edges().collect() } else { g.undirected_edges().collect() };
    list.into_iter().map(|(a, b)| (g.name(a).to_string(), g.name(b).to_string())).collect()
}

type Listing<'a> = (&'a str, &'a [(&'a str, &'a str)], &'a [(&'a str, &'a str)]);

fn named(list: &[(&str, &str)]) -> BTreeSet<(String, String)> {
    list.iter().map(|&(a, b)| (a.to_string(), b.to_string())).collect()
}

/// Seeded random chordal graphs with 6 to 8 vertices.
fn random_corpus(count: usize, seed: u64) -> Vec<MixedGraph> {
    (0..count)
        .map(|i| {
            let p = 6 + i % 3;
            let r = [0.35, 0.45, 0.55, 0.7, 0.85][i / 3 % 5];
            random_uccg(p, r, seed + i as u64).unwrap()
        })
        .collect()
}

#[test]
fn criterion_1_example_exactness() {
    let mut c = Criterion::new(1, "example graph: size, per-root sizes, rooted orientations, runtime");
    let start = Instant::now();
    let g = diamond();
    let size = mec_size(&g).unwrap();
    c.check(size == n(10), || format!("size {size}"));
    let per_root = rooted_sizes(&g, &MemoStore::new()).unwrap();
    c.check(per_root == vec![n(2), n(3), n(3), n(2)], || format!("per-root {per_root:?}"));

    let expected: [Listing; 4] = [
        ("v1", &[("v1", "v2"), ("v1", "v3"), ("v2", "v4"), ("v3", "v4")], &[("v2", "v3")]),
        ("v2", &[("v2", "v1"), ("v2", "v3"), ("v2", "v4")], &[("v1", "v3"), ("v3", "v4")]),
        ("v3", &[("v3", "v1"), ("v3", "v2"), ("v3", "v4")], &[("v1", "v2"), ("v2", "v4")]),
        ("v4", &[("v4", "v2"), ("v4", "v3"), ("v2", "v1"), ("v3", "v1")], &[("v2", "v3")]),
    ];
    for (root, dir, und) in expected {
        let o = rooted_orient(&g, g.vertex(root).unwrap()).unwrap();
        c.check(edges(&o, true) == named(dir), || format!("root {root}: directed {:?}", edges(&o, true)));
        c.check(edges(&o, false) == named(und), || format!("root {root}: undirected {:?}", edges(&o, false)));
    }

    // Second level: the chain component left by v1 rooted at v2, and the one
    // left by v2 rooted at v1.
    let comps = chain_components(&rooted_orient(&g, 0).unwrap());
    let g1 = comps.iter().find(|h| h.vertex_count() == 2).unwrap();
    c.check(g1.names() == ["v2", "v3"], || format!("component {:?}", g1.names()));
    let o = rooted_orient(g1, g1.vertex("v2").unwrap()).unwrap();
    c.check(edges(&o, true) == named(&[("v2", "v3")]) && o.is_dag(), || "second level at v2".into());
    let comps = chain_components(&rooted_orient(&g, 1).unwrap());
    let g2 = comps.iter().find(|h| h.vertex_count() == 3).unwrap();
    c.check(g2.names() == ["v1", "v3", "v4"], || format!("component {:?}", g2.names()));
    let o = rooted_orient(g2, g2.vertex("v1").unwrap()).unwrap();
    c.check(edges(&o, true) == named(&[("v1", "v3"), ("v3", "v4")]) && o.is_dag(), || "second level at v1".into());
    let second: Vec<BigCount> = rooted_sizes(g2, &MemoStore::new()).unwrap();
    c.check(second == vec![n(1), n(1), n(1)], || format!("second-level sizes {second:?}"));

    let elapsed = start.elapsed();
    c.check(elapsed < Duration::from_secs(1), || format!("took {elapsed:?}"));
    c.finish(&format!("size=10 per-root=(2,3,3,2) in {:.3} ms", elapsed.as_secs_f64() * 1e3));
}

#[test]
fn criterion_2_counting_matches_enumeration() {
    let mut c = Criterion::new(2, "counting equals brute-force enumeration");
    let small = small_corpus(5);
    let library_corpus: usize = (1..=5).map(|k| mec_core::oracle::connected_chordal_graphs(k).len()).sum();
    c.check(library_corpus == small.len(), || format!("corpus sizes {library_corpus} vs {}", small.len()));
    let random = random_corpus(200, 1000);
    for g in small.iter().chain(&random) {
        c.check(common::brute_chordal(g), || "random graph not chordal".into());
        let fast = mec_size(g).unwrap();
        let brute = brute_size(g).unwrap();
        c.check(fast == brute, || format!("{fast} vs {brute} on {:?}", g.skeleton()));
    }
    let mut factorial = BigCount::one();
    for k in 2..=7u64 {
        factorial *= k;
        let names: Vec<String> = (0..k).map(|i| format!("x{i}")).collect();
        let mut kn = MixedGraph::with_vertices(&names);
        for a in 0..k as usize {
            for b in a + 1..k as usize {
                kn.add_undirected(a, b).unwrap();
            }
        }
        let got = component_size(&kn, &MemoStore::new()).unwrap();
        c.check(got == factorial, || format!("K{k}: {got}"));
    }
    c.finish(&format!("{} exhaustive + {} random graphs, K2..K7", small.len(), random.len()));
}

/// Chi-square over enumerated members with `5000 * |class|` draws, plus
/// membership of every draw.
fn uniformity(c: &mut Criterion, g: &MixedGraph, h: Option<&HypothesisGraph>, seed: u64) -> u64 {
    let mut members = enumerate_mec(g, DEFAULT_LIMIT).unwrap().members;
    if let Some(h) = h {
        members.retain(|d| h.allows_dag(d));
    }
    let index = index_of(&members);
    let draws = 5000 * members.len();
    let memo = MemoStore::new();
    let sampler = match h {
        Some(h) => Sampler::with_prior(g, h, &memo).unwrap(),
        None => Sampler::new(g, &memo).unwrap(),
    };
    let mut counts = vec![0u64; members.len()];
    let mut bad = 0;
    for d in sampler.sample_many(draws, seed).unwrap() {
        match index.get(&dag_key(&d)) {
            Some(&i) if is_member(g, &d) => counts[i] += 1,
            _ => bad += 1,
        }
    }
    c.check(bad == 0, || format!("{bad} draws outside the class on {:?}", g.skeleton()));
    if members.len() > 1 {
        let (stat, critical) = chi_square_uniform(&counts, ALPHA);
        c.check(stat <= critical, || format!("chi2 {stat:.2} > {critical:.2} on {:?}", g.skeleton()));
    }
    draws as u64
}

#[test]
fn criterion_3_sampler_is_uniform() {
    let mut c = Criterion::new(3, "uniform sampler passes chi-square at alpha 0.001");
    let mut graphs: Vec<MixedGraph> = small_corpus(4);
    let mut seed = 0;
    while graphs.len() < small_corpus(4).len() + 12 {
        let g = random_uccg(5 + (seed % 2) as usize, 0.6, 500 + seed).unwrap();
        seed += 1;
        if mec_size(&g).unwrap() <= n(60) {
            graphs.push(g);
        }
    }
    let mut total = 0;
    for (i, g) in graphs.iter().enumerate() {
        total += uniformity(&mut c, g, None, 77 + i as u64);
    }
    total += uniformity(&mut c, &diamond(), None, 4242);
    c.finish(&format!("{} graphs, {total} draws", graphs.len() + 1));
}

/// `v1 -> v3` only.
fn h1(g: &MixedGraph) -> HypothesisGraph {
    HypothesisGraph::from_required(g, &[(0, 2)]).unwrap()
}

/// `v2 -> v1` and `v3 -> v4`.
fn h2(g: &MixedGraph) -> HypothesisGraph {
    HypothesisGraph::from_required(g, &[(1, 0), (2, 3)]).unwrap()
}

/// `v1 -> v2 <- v4`, a v-structure the class cannot contain.
fn h3(g: &MixedGraph) -> HypothesisGraph {
    HypothesisGraph::from_required(g, &[(0, 1), (3, 1)]).unwrap()
}

#[test]
fn criterion_4_prior_counting() {
    let mut c = Criterion::new(4, "counting under orientation constraints");
    let g = diamond();
    for (name, h, total, per_root) in [
        ("H1", h1(&g), 3u64, [2u64, 1, 0, 0]),
        ("H2", h2(&g), 4, [0, 2, 2, 0]),
        ("H3", h3(&g), 0, [0, 0, 0, 0]),
    ] {
        let got = size_with_prior(&g, &h).unwrap();
        c.check(got == n(total), || format!("{name}: {got}"));
        c.check(brute_size_with_prior(&g, &h).unwrap() == n(total), || format!("{name}: oracle disagrees"));
        let roots = rooted_sizes_with_prior(&g, &h).unwrap();
        c.check(roots == per_root.map(n).to_vec(), || format!("{name}: per-root {roots:?}"));
    }
    for (req, total) in [((0, 1), 3u64), ((1, 0), 7)] {
        let h = HypothesisGraph::from_required(&g, &[req]).unwrap();
        c.check(size_with_prior(&g, &h).unwrap() == n(total), || format!("{req:?}"));
        c.check(brute_size_with_prior(&g, &h).unwrap() == n(total), || format!("oracle {req:?}"));
    }

    let mut cases = 0;
    for g in small_corpus(5) {
        let members = enumerate_mec(&g, DEFAULT_LIMIT).unwrap().members;
        let skeleton: Vec<(Vertex, Vertex)> = g.skeleton().into_iter().collect();
        let brute = |req: &[(Vertex, Vertex)]| {
            n(members.iter().filter(|d| req.iter().all(|&(a, b)| d.has_directed(a, b))).count() as u64)
        };
        let orient = |(a, b): (Vertex, Vertex), flip: bool| if flip { (b, a) } else { (a, b) };
        for (i, &e) in skeleton.iter().enumerate() {
            for fe in [false, true] {
                let req = [orient(e, fe)];
                let h = HypothesisGraph::from_required(&g, &req).unwrap();
                cases += 1;
                c.check(size_with_prior(&g, &h).unwrap() == brute(&req), || format!("{req:?} on {skeleton:?}"));
                for &f in &skeleton[i + 1..] {
                    for ff in [false, true] {
                        let req = [orient(e, fe), orient(f, ff)];
                        let h = HypothesisGraph::from_required(&g, &req).unwrap();
                        cases += 1;
                        c.check(size_with_prior(&g, &h).unwrap() == brute(&req), || {
                            format!("{req:?} on {skeleton:?}")
                        });
                    }
                }
            }
        }
    }
    c.finish(&format!("H1=3 H2=4 H3=0; {cases} exhaustive constraint sets"));
}

#[test]
fn criterion_5_prior_sampler() {
    let mut c = Criterion::new(5, "sampling under orientation constraints");
    let g = diamond();
    let h = h1(&g);
    let weights = root_weights(&g, Some(&h)).unwrap();
    let total: BigCount = weights.iter().map(|(_, w)| w).sum();
    let probs: Vec<BigRational> = weights
        .iter()
        .map(|(_, w)| BigRational::new(BigInt::from(w.clone()), BigInt::from(total.clone())))
        .collect();
    let q = |a: i64, b: i64| BigRational::new(a.into(), b.into());
    c.check(probs == vec![q(2, 3), q(1, 3), q(0, 1), q(0, 1)], || format!("root probabilities {probs:?}"));

    let mut draws = 0;
    for (i, h) in [h1(&g), h2(&g), HypothesisGraph::from_required(&g, &[(1, 0)]).unwrap()].iter().enumerate() {
        draws += uniformity(&mut c, &g, Some(h), 900 + i as u64);
    }

    let memo = MemoStore::new();
    let sampler = Sampler::with_prior(&g, &h, &memo).unwrap();
    let inconsistent =
        sampler.sample_many(100_000, 31).unwrap().iter().filter(|d| !h.allows_dag(d) || !is_member(&g, d)).count();
    c.check(inconsistent == 0, || format!("{inconsistent} inconsistent draws"));
    c.finish(&format!("root probabilities (2/3,1/3,0,0); {draws} chi-square draws; 0/100000 inconsistent"));
}

#[test]
fn criterion_6_intervention_exactness() {
    let mut c = Criterion::new(6, "expected resolved edges: decomposition equals direct average");
    let g = diamond();
    let three = BigRational::from_integer(3.into());
    let exact = expected_resolved_exact(&g, &[0]).unwrap();
    c.check(exact == three, || format!("example target v1: {exact}"));
    c.check(brute_expected_resolved(&g, &[0]).unwrap() == three, || "oracle on example".into());

    let mut graphs = small_corpus(5);
    for i in 0..40 {
        graphs.push(random_uccg(6 + i % 2, [0.4, 0.6, 0.8][i % 3], 7000 + i as u64).unwrap());
    }
    let mut cases = 0;
    for g in &graphs {
        let p = g.vertex_count();
        let mut target_sets: Vec<Vec<Vertex>> = (0..p).map(|v| vec![v]).collect();
        if p <= 5 {
            target_sets.extend((0..p).flat_map(|a| (a + 1..p).map(move |b| vec![a, b])));
        } else {
            target_sets.push(vec![0, p - 1]);
        }
        for t in target_sets {
            let report = intervention_report(g, &t).unwrap();
            let weight_sum: BigRational = report.records.iter().map(|r| r.weight.clone()).sum();
            c.check(weight_sum.is_one(), || format!("weights sum to {weight_sum}"));
            let brute = brute_expected_resolved(g, &t).unwrap();
            cases += 1;
            c.check(report.expected == brute, || format!("{} vs {brute} for {t:?} on {:?}", report.expected, g.skeleton()));
        }
    }
    c.finish(&format!("example = 3; {cases} target sets on {} graphs", graphs.len()));
}

#[test]
fn criterion_7_sde_decreases() {
    let mut c = Criterion::new(7, "Monte-Carlo estimation error shrinks with sample size");
    let threads = std::thread::available_parallelism().map_or(1, |x| x.get());
    let mut detail = String::new();
    for p in [10, 20] {
        let params = SdeParams {
            p,
            r: 0.2,
            trials: 100,
            target_count: 2,
            sample_grid: vec![10, 20, 40, 80],
            seed: 2024 + p as u64,
            threads,
        };
        let rows = sde_experiment(&params).unwrap();
        for w in rows.windows(2) {
            c.check(w[1].sde <= w[0].sde + w[0].std_error, || {
                format!("p={p}: SDE({})={:.4} above SDE({})={:.4} + SE {:.4}", w[1].samples, w[1].sde, w[0].samples, w[0].sde, w[0].std_error)
            });
        }
        let (first, last) = (rows[0].sde, rows[rows.len() - 1].sde);
        c.check(last < first / 2.0, || format!("p={p}: SDE(80)={last:.4} not below SDE(10)/2={:.4}", first / 2.0));
        let series: Vec<String> = rows.iter().map(|r| format!("{}:{:.4}", r.samples, r.sde)).collect();
        detail.push_str(&format!("p={p} [{}] ", series.join(" ")));
    }
    c.finish(detail.trim_end());
}

fn median_count_seconds(g: &MixedGraph, reps: usize) -> f64 {
    let mut times: Vec<f64> = (0..reps)
        .map(|_| {
            let start = Instant::now();
            mec_size_with_memo(g, &MemoStore::new()).unwrap();
            start.elapsed().as_secs_f64()
        })
        .collect();
    times.sort_by(|a, b| a.total_cmp(b));
    times[reps / 2]
}

fn log_log_slope(points: &[(f64, f64)]) -> f64 {
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / xs.len() as f64;
    let my = ys.iter().sum::<f64>() / ys.len() as f64;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

#[test]
fn criterion_8_scaling() {
    let mut c = Criterion::new(8, "scaling: p=30 under 60 s, p=60 completes, polynomial slope, memo saves work");
    let mut worst30: f64 = 0.0;
    for s in 0..10 {
        let g = random_uccg(30, 0.2, 300 + s).unwrap();
        let start = Instant::now();
        mec_size(&g).unwrap();
        let t = start.elapsed().as_secs_f64();
        worst30 = worst30.max(t);
        c.check(t < 60.0, || format!("p=30 seed {s}: {t:.2} s"));
    }
    let mut worst60: f64 = 0.0;
    for s in 0..3 {
        let g = random_uccg(60, 0.2, 600 + s).unwrap();
        let start = Instant::now();
        let size = mec_size(&g).unwrap();
        worst60 = worst60.max(start.elapsed().as_secs_f64());
        c.check(size > n(0), || "p=60 produced zero".into());
    }

    let mut slopes = Vec::new();
    for (label, max_degree, max_clique) in [("trees", 3usize, 2usize), ("chordal", 4, 4)] {
        let mut points = Vec::new();
        let mut observed_degree = 0;
        for p in [25, 50, 100, 200] {
            let mut total = 0.0;
            for s in 0..4 {
                let g = random_bounded_chordal(p, max_degree, max_clique, 40 * p as u64 + s).unwrap();
                observed_degree = observed_degree.max(g.vertices().map(|v| g.undirected_neighbors(v).len()).max().unwrap());
                total += median_count_seconds(&g, 5);
            }
            points.push((p as f64, total / 4.0));
        }
        let slope = log_log_slope(&points);
        let bound = observed_degree as f64 + 2.5;
        c.check(observed_degree <= max_degree, || format!("{label}: degree {observed_degree}"));
        c.check(slope <= bound, || format!("{label}: slope {slope:.2} above {bound}"));
        slopes.push(format!("{label} slope {slope:.2} (bound {bound})"));
    }

    let mut graphs = vec![diamond()];
    graphs.extend((0..10).map(|s| random_uccg(10, 0.4, 50 + s).unwrap()));
    for g in &graphs {
        let on = MemoStore::new();
        let off = MemoStore::disabled();
        let a = mec_size_with_memo(g, &on).unwrap();
        let b = mec_size_with_memo(g, &off).unwrap();
        c.check(a == b, || format!("memo changes the count: {a} vs {b}"));
        let (x, y) = (on.stats().rs_calls, off.stats().rs_calls);
        c.check(x < y, || format!("rs calls with memo {x}, without {y} on {:?}", g.skeleton()));
    }
    c.finish(&format!("p=30 worst {worst30:.3} s, p=60 worst {worst60:.3} s; {}", slopes.join("; ")));
}

#[test]
fn criterion_9_structural_invariants() {
    let mut c = Criterion::new(9, "rooted clique tree structural invariants and parent-set counts");
    let mut graphs = small_corpus(5);
    graphs.extend(random_corpus(50, 9000));
    let mut rooted = 0;
    for g in &graphs {
        let tree = build_clique_tree(g).unwrap();
        c.check(tree.is_tree() && tree.has_clique_intersection_property() && tree.has_induced_subtree_property(), || {
            format!("clique tree properties on {:?}", g.skeleton())
        });
        let members = enumerate_mec(g, DEFAULT_LIMIT).unwrap().members;
        for r in g.vertices() {
            rooted += 1;
            let mut rt = root_tree(&tree, r).unwrap();
            rt.compute_emission_sets();
            let o = rooted_orient(g, r).unwrap();
            let ctx = || format!("root {} on {:?}", g.name(r), g.skeleton());
            for (u, v) in o.directed_edges() {
                c.check(rt.sep[rt.home(v)].contains(u), || format!("parent outside Sep(K_v): {u}->{v}, {}", ctx()));
                c.check(!rt.sep[rt.home(u)].contains(v), || format!("child inside Sep(K_u): {u}->{v}, {}", ctx()));
                for w in rt.res[rt.home(v)].ones() {
                    c.check(!g.is_adjacent(u, w) || o.has_directed(u, w), || {
                        format!("{u}->{v} but not {u}->{w}, {}", ctx())
                    });
                }
            }
            for v in g.vertices() {
                c.check(o.parents(v) == rt.parents_of(v), || format!("parents of {v} differ from Em(K_v), {}", ctx()));
            }
            let subtree = rt.subtree_residuals();
            for (k, below) in subtree.iter().enumerate() {
                for a in below.ones() {
                    for b in g.vertices() {
                        let outside = !rt.sep[k].contains(b) && !below.contains(b);
                        c.check(!(outside && g.is_adjacent(a, b)), || format!("edge {a}-{b} crosses the cut at K{k}, {}", ctx()));
                    }
                }
            }
            let levels = VertexPartitionByDistance::new(g, r);
            for (a, b) in g.skeleton() {
                let (la, lb) = (levels.level_of(a).unwrap(), levels.level_of(b).unwrap());
                c.check(la.abs_diff(lb) <= 1, || format!("edge skips a level, {}", ctx()));
                if la + 1 == lb {
                    c.check(o.has_directed(a, b), || format!("mid-level edge {a}-{b} not away from root, {}", ctx()));
                } else if lb + 1 == la {
                    c.check(o.has_directed(b, a), || format!("mid-level edge {b}-{a} not away from root, {}", ctx()));
                }
            }
            let class: Vec<&MixedGraph> = members.iter().filter(|d| d.parents(r).is_empty()).collect();
            for (a, b) in g.skeleton() {
                let forward = class.iter().all(|d| d.has_directed(a, b));
                let backward = class.iter().all(|d| d.has_directed(b, a));
                let ok = match (forward, backward) {
                    (true, _) => o.has_directed(a, b),
                    (_, true) => o.has_directed(b, a),
                    _ => o.has_undirected(a, b),
                };
                c.check(ok, || format!("edge {a}-{b} disagrees with the rooted members, {}", ctx()));
            }
        }
    }

    let g = diamond();
    let counts = parent_set_counts(&g, 3).unwrap();
    let expected: BTreeMap<Vec<Vertex>, BigCount> =
        [(vec![], n(2)), (vec![1], n(1)), (vec![2], n(1)), (vec![1, 2], n(6))].into_iter().collect();
    c.check(counts == expected, || format!("parent sets of v4: {counts:?}"));
    let mut brute: BTreeMap<Vec<Vertex>, BigCount> = BTreeMap::new();
    for d in enumerate_mec(&g, DEFAULT_LIMIT).unwrap().members {
        *brute.entry(d.parents(3)).or_insert_with(BigCount::zero) += 1u32;
    }
    c.check(counts == brute, || format!("oracle parent sets {brute:?}"));
    c.finish(&format!("{} graphs, {rooted} rooted trees; parent sets of v4 = {{}}:2 {{v2}}:1 {{v3}}:1 {{v2,v3}}:6", graphs.len()));
}
