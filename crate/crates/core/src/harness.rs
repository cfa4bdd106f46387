//! Reproducible random sweeps and a model-checking benchmark.
//!
//! Every sample of a sweep draws from its own ChaCha8 stream (the run seed
//! with the sample index as stream id), so reports do not depend on the
//! number of threads or on scheduling.

use std::fmt;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::automata::{accepts, normalize_to_covers, random_automaton, AutomatonError, ParityAutomaton, RandomAutomatonConfig};
use crate::collapse::{buchi_to_cobuchi, with_window, CollapseError};
use crate::game::{brute_force_solve, random_arena, solve, verify_strategy, Player};
use crate::gamma::{box_star_gamma_semantic, gamma_winner, make_b_gamma, make_box_star_gamma_automaton, GammaError, GammaPlayer};
use crate::graph::{
    bisimilar, is_pseudotree, make_gk, max_scc_size, pseudotree_of, random_graph_with, random_scck_with, scc_decompose,
    ColoredGraph, Color, GkLayout, GraphBuilder, GraphError, F,
};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("unknown suite `{0}` (known: {known})", known = SUITES.join(", "))]
    UnknownSuite(String),
    #[error("samples, max_vertices and k must be positive")]
    ZeroCount,
    #[error("benchmark needs at least {MIN_BENCH_SIZES} sizes, got {0}")]
    TooFewSizes(usize),
    #[error("benchmark sizes must be strictly increasing")]
    SizesNotIncreasing,
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Automaton(#[from] AutomatonError),
    #[error(transparent)]
    Collapse(#[from] CollapseError),
    #[error(transparent)]
    Gamma(#[from] GammaError),
}

pub const SUITES: &[&str] = &[
    "scc-oracle",
    "game-oracle",
    "bgamma-vs-gamma",
    "collapse-equivalence",
    "collapse-soundness",
    "collapse-mutant",
    "bstar-vs-semantic",
    "pseudotree-invariance",
];

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SweepConfig {
    pub seed: u64,
    pub samples: usize,
    pub max_vertices: usize,
    pub k: usize,
    pub suite: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub config: SweepConfig,
    pub passed: usize,
    pub failed: usize,
    /// Lowest failing sample, if any.
    pub first_failure: Option<Failure>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Failure {
    pub sample: usize,
    pub detail: Value,
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {}/{} passed (seed {}, max_vertices {}, k {})",
            self.config.suite,
            self.passed,
            self.passed + self.failed,
            self.config.seed,
            self.config.max_vertices,
            self.config.k
        )?;
        if let Some(first) = &self.first_failure {
            write!(f, "; first failure at sample {}", first.sample)?;
        }
        Ok(())
    }
}

/// Random stream of sample `index` under `seed`.
pub fn sample_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

type Outcome = Result<Option<Value>, HarnessError>;

pub fn run_suite(config: &SweepConfig) -> Result<SuiteReport, HarnessError> {
    if config.samples == 0 || config.max_vertices == 0 || config.k == 0 {
        return Err(HarnessError::ZeroCount);
    }
    let sample: fn(&SweepConfig, &mut ChaCha8Rng) -> Outcome = match config.suite.as_str() {
        "scc-oracle" => scc_oracle,
        "game-oracle" => game_oracle,
        "bgamma-vs-gamma" => bgamma_vs_gamma,
        "collapse-equivalence" => collapse_equivalence,
        "collapse-soundness" => collapse_soundness,
        "collapse-mutant" => collapse_mutant,
        "bstar-vs-semantic" => bstar_vs_semantic,
        "pseudotree-invariance" => pseudotree_invariance,
        other => return Err(HarnessError::UnknownSuite(other.to_string())),
    };
    let outcomes: Vec<Outcome> =
        (0..config.samples).into_par_iter().map(|i| sample(config, &mut sample_rng(config.seed, i))).collect();
    let mut report = SuiteReport { config: config.clone(), passed: 0, failed: 0, first_failure: None };
    for (i, o) in outcomes.into_iter().enumerate() {
        match o? {
            None => report.passed += 1,
            Some(detail) => {
                report.failed += 1;
                if report.first_failure.is_none() {
                    report.first_failure = Some(Failure { sample: i, detail });
                }
            }
        }
    }
    Ok(report)
}

fn graph_value(g: &ColoredGraph) -> Value {
    serde_json::from_str(&g.to_json()).expect("graph JSON is valid")
}

fn automaton_value(a: &ParityAutomaton) -> Value {
    serde_json::from_str(&a.to_json()).expect("automaton JSON is valid")
}

fn buchi_config() -> RandomAutomatonConfig {
    RandomAutomatonConfig { max_states: 3, priorities: vec![0, 1], cover_only: true, weak: false }
}

/// Mutual reachability by one search per vertex.
fn scc_oracle(config: &SweepConfig, rng: &mut ChaCha8Rng) -> Outcome {
    let g = random_graph_with(rng, config.max_vertices, &[F]);
    let reach: Vec<Vec<bool>> = g.vertices().map(|v| g.reachable_from(v)).collect();
    let d = scc_decompose(&g);
    for u in g.vertices() {
        for v in g.vertices() {
            let same = reach[u][v] && reach[v][u];
            if same != (d.component_of[u] == d.component_of[v]) {
                return Ok(Some(json!({ "graph": graph_value(&g), "u": u, "v": v })));
            }
        }
    }
    let h = random_scck_with(rng, config.k, config.max_vertices, &[F]);
    if max_scc_size(&h) > config.k {
        return Ok(Some(json!({ "graph": graph_value(&h), "reason": "generator exceeded k" })));
    }
    Ok(None)
}

fn game_oracle(config: &SweepConfig, rng: &mut ChaCha8Rng) -> Outcome {
    let a = random_arena(rng, config.max_vertices.min(8), 4, 3);
    let s = solve(&a);
    let brute = brute_force_solve(&a, 8).expect("arena within bound");
    let ok = s.winner == brute
        && [Player::Even, Player::Odd]
            .iter()
            .all(|&p| verify_strategy(&a, s.strategy(p), p, &s.region(p)).unwrap_or(false));
    Ok((!ok).then(|| json!({ "arena": serde_json::from_str::<Value>(&a.to_json()).expect("valid JSON") })))
}

fn bgamma_vs_gamma(config: &SweepConfig, rng: &mut ChaCha8Rng) -> Outcome {
    let g = random_graph_with(rng, config.max_vertices, &[F]);
    let auto = accepts(&make_b_gamma(), &g)?;
    let game = gamma_winner(&g)?.winner == GammaPlayer::PN;
    Ok((auto != game).then(|| json!({ "graph": graph_value(&g), "automaton": auto, "gamma": game })))
}

fn collapse_equivalence(config: &SweepConfig, rng: &mut ChaCha8Rng) -> Outcome {
    let b = random_automaton(rng, &[F], &buchi_config());
    let g = random_scck_with(rng, config.k, config.max_vertices, &[F]);
    let c = buchi_to_cobuchi(&b, config.k)?.automaton;
    let (x, y) = (accepts(&b, &g)?, accepts(&c, &g)?);
    Ok((x != y).then(|| json!({ "automaton": automaton_value(&b), "graph": graph_value(&g), "buchi": x, "cobuchi": y })))
}

fn collapse_soundness(config: &SweepConfig, rng: &mut ChaCha8Rng) -> Outcome {
    let b = random_automaton(rng, &[F], &buchi_config());
    let g = random_graph_with(rng, config.max_vertices, &[F]);
    let c = buchi_to_cobuchi(&b, config.k)?.automaton;
    let (x, y) = (accepts(&b, &g)?, accepts(&c, &g)?);
    Ok((y && !x).then(|| json!({ "automaton": automaton_value(&b), "graph": graph_value(&g) })))
}

/// Collapse with a window one shorter than required; disagreements are
/// expected and counted as failures.
fn collapse_mutant(config: &SweepConfig, rng: &mut ChaCha8Rng) -> Outcome {
    let b = random_automaton(rng, &[F], &buchi_config());
    let g = random_scck_with(rng, config.k, config.max_vertices, &[F]);
    let w = b.state_count() * config.k;
    if w < 2 {
        return Ok(None);
    }
    let c = with_window(&b, w - 1)?.automaton;
    let (x, y) = (accepts(&b, &g)?, accepts(&c, &g)?);
    Ok((x != y).then(|| json!({ "automaton": automaton_value(&b), "graph": graph_value(&g), "buchi": x, "mutant": y })))
}

fn bstar_vs_semantic(config: &SweepConfig, rng: &mut ChaCha8Rng) -> Outcome {
    let g = random_scck_with(rng, 1, config.max_vertices, &[F]);
    let auto = accepts(&make_box_star_gamma_automaton(), &g)?;
    let sem = box_star_gamma_semantic(&g)?;
    Ok((auto != sem).then(|| json!({ "graph": graph_value(&g), "automaton": auto, "semantic": sem })))
}

fn pseudotree_invariance(config: &SweepConfig, rng: &mut ChaCha8Rng) -> Outcome {
    let g = random_scck_with(rng, 1, config.max_vertices, &[F]);
    let t = pseudotree_of(&g)?;
    let mut problems = Vec::new();
    if !is_pseudotree(&t) {
        problems.push("not a pseudotree");
    }
    if !bisimilar(&g, &t)? {
        problems.push("not bisimilar");
    }
    for (name, a) in [("B_Gamma", make_b_gamma()), ("box-star", make_box_star_gamma_automaton())] {
        if accepts(&a, &g)? != accepts(&a, &t)? {
            problems.push(name);
        }
    }
    Ok((!problems.is_empty()).then(|| json!({ "graph": graph_value(&g), "problems": problems })))
}

// ---------------------------------------------------------------------------
// Benchmark

pub const MIN_BENCH_SIZES: usize = 5;
const RUNS: usize = 5;
/// Each timed run repeats its workload until at least this much time passed.
const MIN_RUN: Duration = Duration::from_millis(2);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BenchFamily {
    /// `G_k` with the given `k`.
    Gk,
    /// F loop, `n` N vertices, F loop.
    Chain,
}

impl std::str::FromStr for BenchFamily {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "gk" => Ok(BenchFamily::Gk),
            "chain" => Ok(BenchFamily::Chain),
            other => Err(format!("unknown family `{other}` (gk or chain)")),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BenchPoint {
    pub parameter: usize,
    pub vertices: usize,
    /// Seconds per model check, one entry per timed run.
    pub samples: Vec<f64>,
    pub median: f64,
    pub baseline_median: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct BenchReport {
    pub family: BenchFamily,
    pub automaton_states: usize,
    pub points: Vec<BenchPoint>,
    /// Least-squares slope of log(median) against log(vertices).
    pub slope: f64,
    /// The same for plain reachability from the point.
    pub baseline_slope: f64,
    pub machine: String,
}

pub fn make_chain(n: usize) -> ColoredGraph {
    let f = Color::EMPTY.with(0);
    let mut b = GraphBuilder::new(&[F]);
    let start = b.add_vertex(f);
    b.add_edge(start, start);
    let mut prev = start;
    for _ in 0..n {
        let v = b.add_vertex(Color::EMPTY);
        b.add_edge(prev, v);
        prev = v;
    }
    let end = b.add_vertex(f);
    b.add_edge(prev, end);
    b.add_edge(end, end);
    b.build().expect("chain is well formed")
}

fn family_graph(family: BenchFamily, size: usize) -> Result<ColoredGraph, GraphError> {
    match family {
        BenchFamily::Gk => make_gk(size),
        BenchFamily::Chain => Ok(make_chain(size)),
    }
}

/// Seconds per call of `work`: one discarded warm-up run, then the median
/// of [`RUNS`] runs, each repeating `work` for at least [`MIN_RUN`].
fn time_median(mut work: impl FnMut()) -> (Vec<f64>, f64) {
    work();
    let mut samples = Vec::with_capacity(RUNS);
    for _ in 0..RUNS {
        let start = Instant::now();
        let mut reps = 0u32;
        while reps == 0 || start.elapsed() < MIN_RUN {
            work();
            reps += 1;
        }
        samples.push(start.elapsed().as_secs_f64() / f64::from(reps));
    }
    let mut sorted = samples.clone();
    sorted.sort_by(|a, b| a.total_cmp(b));
    (samples, sorted[RUNS / 2])
}

pub fn log_log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let cov: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    cov / var
}

/// Times `accepts(a, ·)` over a graph family. `sizes` are `k` for `G_k`
/// and the number of N vertices for chains.
pub fn bench_modelcheck(a: &ParityAutomaton, family: BenchFamily, sizes: &[usize]) -> Result<BenchReport, HarnessError> {
    if sizes.len() < MIN_BENCH_SIZES {
        return Err(HarnessError::TooFewSizes(sizes.len()));
    }
    if sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(HarnessError::SizesNotIncreasing);
    }
    let a = normalize_to_covers(a);
    let mut points = Vec::new();
    for &size in sizes {
        let g = family_graph(family, size)?;
        accepts(&a, &g)?;
        let (samples, median) = time_median(|| {
            std::hint::black_box(accepts(&a, &g).expect("checked above"));
        });
        let (_, baseline_median) = time_median(|| {
            std::hint::black_box(g.reachable());
        });
        points.push(BenchPoint { parameter: size, vertices: g.vertex_count(), samples, median, baseline_median });
    }
    let xs: Vec<f64> = points.iter().map(|p| p.vertices as f64).collect();
    let slope = log_log_slope(&xs, &points.iter().map(|p| p.median).collect::<Vec<_>>());
    let baseline_slope = log_log_slope(&xs, &points.iter().map(|p| p.baseline_median).collect::<Vec<_>>());
    let machine = format!(
        "{}-{}, {} hardware threads, {} rayon threads",
        std::env::consts::ARCH,
        std::env::consts::OS,
        std::thread::available_parallelism().map_or(1, |n| n.get()),
        rayon::current_num_threads()
    );
    Ok(BenchReport { family, automaton_states: a.state_count(), points, slope, baseline_slope, machine })
}

/// The collapsed coBüchi automaton of B_Γ for `k`.
pub fn collapsed_b_gamma(k: usize) -> Result<ParityAutomaton, HarnessError> {
    Ok(buchi_to_cobuchi(&normalize_to_covers(&make_b_gamma()), k)?.automaton)
}

/// Vertex count of `G_k`.
pub fn gk_size(k: usize) -> Result<usize, GraphError> {
    Ok(GkLayout::new(k)?.vertex_count())
}
