//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage or parameter error, 2 invalid input graph or
//! file, 3 unrealizable prior, 4 a `verify` property failed. Errors go to
//! standard error as `mec: error[<kind>]: <message>`.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::clique_tree::{build_clique_tree, root_tree};
use crate::count::{mec_size_with_memo, rooted_sizes, BigCount, MemoStore};
use crate::error::MecError;
use crate::graph::{MixedGraph, Vertex};
use crate::intervention::{
    derive_seed, expected_resolved_mc, greedy_select, intervention_report_memo, sde_experiment, SdeParams,
};
use crate::io::{edge_lines, parse_constraints, parse_graph, to_edge_list, to_json, JsonGraph};
use crate::oracle::{
    brute_expected_resolved, brute_size, brute_size_with_prior, connected_chordal_graphs, enumerate_mec, DEFAULT_LIMIT,
};
use crate::prior::{parent_set_counts, size_with_prior_memo, HypothesisGraph};
use crate::random::random_uccg;
use crate::sample::{is_member, Sampler};

pub const SCHEMA_VERSION: &str = "1";
pub const MEMO_CAP_ENV: &str = "MEC_MEMO_CAP";

#[derive(Parser, Debug)]
#[command(name = "mec", version, about = "Count, sample and probe Markov equivalence classes of DAGs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq, Eq)]
enum Format {
    Text,
    Json,
}

#[derive(Args, Debug)]
struct PriorArg {
    /// File of required orientations, one `u -> v` per line
    #[arg(long)]
    prior: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Number of DAGs in the class of an essential graph
    Count {
        graph: PathBuf,
        #[command(flatten)]
        prior: PriorArg,
        /// Print memo hits, misses and recursive calls to stderr
        #[arg(long)]
        memo_stats: bool,
        #[arg(long)]
        no_memo: bool,
    },
    /// Uniform samples from the class
    Sample {
        graph: PathBuf,
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        prior: PriorArg,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Member counts per parent set of one vertex
    ParentSets {
        graph: PathBuf,
        #[arg(long)]
        target: String,
    },
    /// Expected number of resolved edges for an intervention target set
    Intervene {
        graph: PathBuf,
        /// Comma-separated vertex names
        #[arg(long, value_delimiter = ',', required = true)]
        targets: Vec<String>,
        #[arg(long, conflicts_with = "mc")]
        exact: bool,
        /// Add a Monte-Carlo estimate from this many samples
        #[arg(long)]
        mc: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Greedy target selection under a budget
    InterveneGreedy {
        graph: PathBuf,
        #[arg(long)]
        budget: usize,
    },
    /// Estimation error of the Monte-Carlo estimate versus sample size, as CSV
    SdeExperiment {
        #[arg(long, default_value_t = 10)]
        p: usize,
        #[arg(long, default_value_t = 0.2)]
        r: f64,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 2)]
        targets: usize,
        #[arg(long, value_delimiter = ',', default_value = "10,20,40,80")]
        samples: Vec<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        threads: usize,
    },
    /// Random connected chordal graph
    GenRandom {
        #[arg(long)]
        p: usize,
        #[arg(long, default_value_t = 0.2)]
        r: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Every member of the class, by brute force
    Enumerate {
        graph: PathBuf,
        #[arg(long, default_value_t = DEFAULT_LIMIT)]
        limit: usize,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Cross-check the counting, prior, sampling and intervention code
    /// against brute force on a corpus of small graphs
    Verify {
        /// Exhaustive corpus of connected chordal graphs up to this size
        #[arg(long, default_value_t = 5)]
        max_vertices: usize,
        /// Extra random graphs with 6 to 8 vertices
        #[arg(long, default_value_t = 50)]
        random: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Mean counting time on random graphs, as CSV
    Bench {
        #[arg(long, value_delimiter = ',', default_value = "20,30,40,50,60")]
        p: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "0.2")]
        r: Vec<f64>,
        #[arg(long, default_value_t = 10)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        threads: usize,
    },
    /// Rooted clique tree of a connected chordal graph
    Tree {
        graph: PathBuf,
        #[arg(long)]
        root: String,
    },
}

/// A failure with its exit code and stderr kind.
#[derive(Debug)]
struct Failure {
    code: i32,
    kind: &'static str,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self { code: 1, kind: "usage", message: message.into() }
    }
}

impl From<MecError> for Failure {
    fn from(e: MecError) -> Self {
        let (code, kind) = match &e {
            MecError::Unrealizable => (3, "unrealizable"),
            MecError::Parse { .. } => (2, "parse"),
            MecError::Infeasible(_) | MecError::LimitExceeded(_) | MecError::EmptySample => (1, "usage"),
            MecError::Format(_) => (1, "internal"),
            _ => (2, "invalid-graph"),
        };
        Self { code, kind, message: e.to_string() }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Self { code: 2, kind: "io", message: e.to_string() }
    }
}

type CliResult = std::result::Result<i32, Failure>;

/// Runs the CLI on `argv` (program name first) and returns the exit code.
pub fn run<S: AsRef<str>>(argv: &[S], out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(argv.iter().map(|s| s.as_ref())) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    0
                }
                _ => {
                    let _ = write!(err, "mec: error[usage]: {e}");
                    1
                }
            };
        }
    };
    match dispatch(cli.command, out, err) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "mec: error[{}]: {}", f.kind, f.message);
            f.code
        }
    }
}

fn read_graph(path: &Path) -> Result<MixedGraph, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure { code: 2, kind: "io", message: format!("{}: {e}", path.display()) })?;
    Ok(parse_graph(&text)?)
}

fn read_prior(arg: &PriorArg, g: &MixedGraph) -> Result<Option<HypothesisGraph>, Failure> {
    let Some(path) = &arg.prior else { return Ok(None) };
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure { code: 2, kind: "io", message: format!("{}: {e}", path.display()) })?;
    let required = parse_constraints(&text, g)?;
    Ok(Some(HypothesisGraph::from_required(g, &required)?))
}

fn memo_store(no_memo: bool) -> Result<MemoStore, Failure> {
    if no_memo {
        return Ok(MemoStore::disabled());
    }
    match std::env::var(MEMO_CAP_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map(MemoStore::with_cap)
            .map_err(|_| Failure::usage(format!("{MEMO_CAP_ENV} must be a non-negative integer, got `{v}`"))),
        Err(_) => Ok(MemoStore::new()),
    }
}

fn resolve_vertices(g: &MixedGraph, names: &[String]) -> Result<Vec<Vertex>, Failure> {
    names.iter().map(|n| g.vertex(n.trim()).map_err(Failure::from)).collect()
}

/// Decimal with 15 significant digits.
pub fn decimal15(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (14 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}

/// `{"rational": "num/den", "decimal": "..."}`.
pub fn rational_json(q: &BigRational) -> Value {
    let decimal = q.to_f64().map(decimal15).unwrap_or_else(|| "nan".into());
    json!({ "rational": format!("{}/{}", q.numer(), q.denom()), "decimal": decimal })
}

fn dags_json(g: &MixedGraph, dags: &[MixedGraph], field: &str) -> String {
    let list: Vec<JsonGraph> = dags.iter().map(JsonGraph::from).collect();
    let mut v = json!({ "spec_version": SCHEMA_VERSION, "vertices": g.names() });
    v[field] = serde_json::to_value(list).expect("graphs serialize");
    format!("{v}\n")
}

fn dags_text(dags: &[MixedGraph], label: &str) -> String {
    let mut s = String::new();
    for (i, d) in dags.iter().enumerate() {
        s.push_str(&format!("# {label} {i}\n"));
        s.push_str(&edge_lines(d));
    }
    s
}

fn dispatch(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> CliResult {
    match command {
        Command::Count { graph, prior, memo_stats, no_memo } => {
            let g = read_graph(&graph)?;
            let h = read_prior(&prior, &g)?;
            let memo = memo_store(no_memo)?;
            let size = match &h {
                Some(h) => size_with_prior_memo(&g, h, &memo)?,
                None => mec_size_with_memo(&g, &memo)?,
            };
            writeln!(out, "{size}")?;
            if memo_stats {
                let s = memo.stats();
                writeln!(err, "memo: hits={} misses={} rs_calls={} entries={}", s.hits, s.misses, s.rs_calls, s.entries)?;
            }
            if h.is_some() && size.is_zero() {
                return Err(MecError::Unrealizable.into());
            }
            Ok(0)
        }
        Command::Sample { graph, n, seed, prior, format } => {
            let g = read_graph(&graph)?;
            let h = read_prior(&prior, &g)?;
            let memo = memo_store(false)?;
            let sampler = match &h {
                Some(h) => Sampler::with_prior(&g, h, &memo)?,
                None => Sampler::new(&g, &memo)?,
            };
            let dags = sampler.sample_many(n, seed)?;
            match format {
                Format::Text => write!(out, "{}", dags_text(&dags, "sample"))?,
                Format::Json => write!(out, "{}", dags_json(&g, &dags, "samples"))?,
            }
            Ok(0)
        }
        Command::ParentSets { graph, target } => {
            let g = read_graph(&graph)?;
            let t = g.vertex(&target)?;
            for (parents, count) in parent_set_counts(&g, t)? {
                let names: Vec<&str> = parents.iter().map(|&p| g.name(p)).collect();
                writeln!(out, "{{{}}}\t{count}", names.join(","))?;
            }
            Ok(0)
        }
        Command::Intervene { graph, targets, exact: _, mc, seed } => {
            let g = read_graph(&graph)?;
            let targets = resolve_vertices(&g, &targets)?;
            let memo = memo_store(false)?;
            let mut report = intervention_report_memo(&g, &targets, &memo)?;
            if let Some(n) = mc {
                report.mc = Some(expected_resolved_mc(&g, &report.targets, n, seed)?);
            }
            let configurations: Vec<Value> = report
                .records
                .iter()
                .map(|r| {
                    let orientation: Vec<[&str; 2]> = r.orientation.iter().map(|&(a, b)| [g.name(a), g.name(b)]).collect();
                    json!({
                        "orientation": orientation,
                        "count": r.count.to_string(),
                        "weight": rational_json(&r.weight),
                        "resolved": r.resolved,
                    })
                })
                .collect();
            let mut v = json!({
                "spec_version": SCHEMA_VERSION,
                "targets": report.targets.iter().map(|&t| g.name(t)).collect::<Vec<_>>(),
                "size": report.size.to_string(),
                "expected_resolved": rational_json(&report.expected),
                "configurations": configurations,
            });
            if let Some(est) = report.mc {
                v["monte_carlo"] = json!({
                    "samples": est.samples,
                    "seed": seed,
                    "mean": decimal15(est.mean),
                    "std_error": decimal15(est.std_error),
                });
            }
            writeln!(out, "{v}")?;
            Ok(0)
        }
        Command::InterveneGreedy { graph, budget } => {
            let g = read_graph(&graph)?;
            let chosen = greedy_select(&g, budget)?;
            let report = intervention_report_memo(&g, &chosen, &memo_store(false)?)?;
            let names: Vec<&str> = chosen.iter().map(|&v| g.name(v)).collect();
            let v = json!({
                "spec_version": SCHEMA_VERSION,
                "budget": budget,
                "targets": names,
                "expected_resolved": rational_json(&report.expected),
            });
            writeln!(out, "{v}")?;
            Ok(0)
        }
        Command::SdeExperiment { p, r, trials, targets, samples, seed, threads } => {
            if trials == 0 {
                return Err(Failure::usage("--trials must be positive"));
            }
            let params = SdeParams { p, r, trials, target_count: targets, sample_grid: samples, seed, threads };
            writeln!(out, "N,SDE")?;
            for row in sde_experiment(&params)? {
                writeln!(out, "{},{}", row.samples, decimal15(row.sde))?;
            }
            Ok(0)
        }
        Command::GenRandom { p, r, seed, format } => {
            let g = random_uccg(p, r, seed)?;
            match format {
                Format::Text => write!(out, "{}", to_edge_list(&g))?,
                Format::Json => writeln!(out, "{}", to_json(&g))?,
            }
            Ok(0)
        }
        Command::Enumerate { graph, limit, format } => {
            let g = read_graph(&graph)?;
            let mec = enumerate_mec(&g, limit)?;
            match format {
                Format::Text => write!(out, "{}", dags_text(&mec.members, "member"))?,
                Format::Json => write!(out, "{}", dags_json(&g, &mec.members, "members"))?,
            }
            Ok(0)
        }
        Command::Verify { max_vertices, random, seed } => verify(max_vertices, random, seed, out),
        Command::Bench { p, r, trials, seed, threads } => {
            if trials == 0 {
                return Err(Failure::usage("--trials must be positive"));
            }
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads.max(1))
                .build()
                .map_err(|e| Failure::usage(e.to_string()))?;
            writeln!(out, "p,r,mean_seconds")?;
            for &pp in &p {
                for (ri, &rr) in r.iter().enumerate() {
                    let times: Vec<f64> = pool.install(|| {
                        (0..trials)
                            .into_par_iter()
                            .map(|t| -> Result<f64, MecError> {
                                let g = random_uccg(pp, rr, derive_seed(seed, (pp * 1000 + ri) as u64, t as u64))?;
                                let start = Instant::now();
                                mec_size_with_memo(&g, &MemoStore::new())?;
                                Ok(start.elapsed().as_secs_f64())
                            })
                            .collect::<Result<_, _>>()
                    })?;
                    let mean = times.iter().sum::<f64>() / trials as f64;
                    writeln!(out, "{pp},{rr},{mean:.6}")?;
                    out.flush()?;
                }
            }
            Ok(0)
        }
        Command::Tree { graph, root } => {
            let g = read_graph(&graph)?;
            let r = g.vertex(&root)?;
            let tree = build_clique_tree(&g)?;
            let mut rt = root_tree(&tree, r)?;
            rt.compute_emission_sets();
            write!(out, "{}", rt.dump(&g))?;
            Ok(0)
        }
    }
}

struct Check {
    name: &'static str,
    cases: usize,
    failures: Vec<String>,
}

impl Check {
    fn new(name: &'static str) -> Self {
        Self { name, cases: 0, failures: Vec::new() }
    }

    fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok && self.failures.len() < 5 {
            self.failures.push(what());
        }
    }
}

fn verify(max_vertices: usize, random: usize, seed: u64, out: &mut dyn Write) -> CliResult {
    if max_vertices > 6 {
        return Err(Failure::usage("--max-vertices above 6 makes the exhaustive corpus too large"));
    }
    let mut corpus: Vec<MixedGraph> = (1..=max_vertices).flat_map(connected_chordal_graphs).collect();
    for i in 0..random {
        let s = derive_seed(seed, i as u64, 0);
        let p = 6 + (s % 3) as usize;
        let r = [0.4, 0.5, 0.6, 0.7][(s / 3 % 4) as usize];
        corpus.push(random_uccg(p, r, s)?);
    }
    let mut counting = Check::new("count-matches-enumeration");
    let mut rooted = Check::new("rooted-sizes-match-enumeration");
    let mut prior = Check::new("prior-count-matches-enumeration");
    let mut sampling = Check::new("samples-are-members");
    let mut intervention = Check::new("intervention-matches-enumeration");
    for (gi, g) in corpus.iter().enumerate() {
        let label = || to_edge_list(g).replace('\n', "; ");
        let mec = enumerate_mec(g, DEFAULT_LIMIT)?;
        let memo = MemoStore::new();
        let size = mec_size_with_memo(g, &memo)?;
        counting.record(size == brute_size(g)?, || format!("{} on {}", size, label()));
        let per_root = rooted_sizes(g, &memo)?;
        for v in g.vertices() {
            let brute = mec.members.iter().filter(|d| d.parents(v).is_empty()).count();
            rooted.record(per_root[v] == BigCount::from(brute), || format!("root {} on {}", g.name(v), label()));
        }
        for (a, b) in g.skeleton() {
            for (u, w) in [(a, b), (b, a)] {
                let h = HypothesisGraph::from_required(g, &[(u, w)])?;
                let fast = size_with_prior_memo(g, &h, &memo)?;
                prior.record(fast == brute_size_with_prior(g, &h)?, || {
                    format!("{} -> {} on {}", g.name(u), g.name(w), label())
                });
            }
        }
        let sampler = Sampler::new(g, &memo)?;
        for d in sampler.sample_many(5, derive_seed(seed, gi as u64, 1))? {
            sampling.record(is_member(g, &d), label);
        }
        if g.vertex_count() <= 6 {
            for t in g.vertices() {
                let exact = intervention_report_memo(g, &[t], &memo)?.expected;
                intervention.record(exact == brute_expected_resolved(g, &[t])?, || {
                    format!("target {} on {}", g.name(t), label())
                });
            }
        }
    }
    let mut failed = false;
    for c in [counting, rooted, prior, sampling, intervention] {
        let status = if c.failures.is_empty() { "PASS" } else { "FAIL" };
        failed |= !c.failures.is_empty();
        writeln!(out, "{status} {} ({} cases)", c.name, c.cases)?;
        for f in &c.failures {
            writeln!(out, "  {f}")?;
        }
    }
    Ok(if failed { 4 } else { 0 })
}
