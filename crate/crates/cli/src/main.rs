use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use muscc::automata::{accepts, is_buchi, is_cobuchi, is_weak, normalize_to_covers, ParityAutomaton};
use muscc::collapse::{buchi_to_cobuchi, find_disagreement_outside_scck};
use muscc::formula::{classify, evaluate, parse, Formula};
use muscc::game::{solve, verify_strategy, ParityArena, Player};
use muscc::gamma::{
    box_star_gamma_semantic, falsify_weak, gamma_winner, make_b_gamma, make_box_star_gamma_automaton, GammaPlayer,
};
use muscc::graph::{
    is_pseudotree, make_gk, make_nloop, max_scc_size, random_graph_with, random_scck_with, ColoredGraph, F,
};
use muscc::harness::{bench_modelcheck, collapsed_b_gamma, make_chain, run_suite, sample_rng, BenchFamily, SweepConfig};

/// Exit status of a command that ran but found a violation.
const VIOLATION: u8 = 2;

#[derive(Parser)]
#[command(name = "muscc", version, about = "Modal mu-calculus, parity games and automata on bounded-SCC graphs")]
struct Cli {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Machine-readable JSON on stdout.
    #[arg(long, global = true)]
    json: bool,
    /// Worker threads for sweeps (defaults to all cores).
    #[arg(long, global = true, env = "MUSCC_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate and validate pointed colored graphs.
    #[command(subcommand)]
    Graph(GraphCmd),
    /// Parse, classify and evaluate mu-calculus sentences.
    #[command(subcommand)]
    Formula(FormulaCmd),
    /// Solve parity games.
    #[command(subcommand)]
    Game(GameCmd),
    /// Run parity automata on graphs.
    #[command(subcommand)]
    Automaton(AutomatonCmd),
    /// Büchi to coBüchi collapse on bounded-SCC graphs.
    #[command(subcommand)]
    Collapse(CollapseCmd),
    /// The Gamma game and its box-star automaton.
    #[command(subcommand)]
    Gamma(GammaCmd),
    /// Time acceptance of a fixed automaton on growing graphs.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Gk,
    Nloop,
    Chain,
    RandomScck,
    Random,
}

#[derive(Subcommand)]
enum GraphCmd {
    /// Print a graph as JSON.
    Gen {
        #[arg(long, value_enum)]
        family: Family,
        /// k of G_k, SCC bound of random-scck, N vertices of chain.
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, default_value_t = 10)]
        max_vertices: usize,
    },
    /// Check a graph file and summarize it.
    Validate { file: PathBuf },
}

#[derive(Subcommand)]
enum FormulaCmd {
    Parse { text: String },
    Classify { text: String },
    /// Vertices of a graph satisfying a sentence.
    Eval { text: String, graph: PathBuf },
}

#[derive(Subcommand)]
enum GameCmd {
    Solve { arena: PathBuf },
}

#[derive(Subcommand)]
enum AutomatonCmd {
    Accept { automaton: PathBuf, graph: PathBuf },
    Normalize { automaton: PathBuf },
    Classify { automaton: PathBuf },
}

#[derive(Subcommand)]
enum CollapseCmd {
    /// Build the coBüchi automaton of a Büchi automaton for SCC size k.
    Run {
        automaton: PathBuf,
        #[arg(long)]
        k: usize,
        /// Also decide both automata on this graph.
        #[arg(long)]
        check: Option<PathBuf>,
    },
    /// Random sweep; for `collapse-mutant` finding no disagreement is the failure.
    Sweep {
        #[arg(long, default_value = "collapse-equivalence")]
        suite: String,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 10)]
        max_vertices: usize,
        #[arg(long, default_value_t = 1)]
        k: usize,
    },
    /// Look for a cycle longer than k where the collapse is wrong.
    Disagree {
        automaton: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 6)]
        bound: usize,
    },
}

#[derive(Subcommand)]
enum GammaCmd {
    Solve { graph: PathBuf },
    /// Compare the box-star automaton with the game on every reachable vertex.
    CheckBstar { graph: PathBuf },
    /// Find a graph separating a weak automaton from box-star Gamma.
    Falsify { automaton: PathBuf },
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, value_enum, default_value = "gk")]
    family: BenchFamilyArg,
    /// Comma-separated sizes: k for gk, N vertices for chain.
    #[arg(long, value_delimiter = ',', default_values_t = vec![3, 4, 5, 6, 7])]
    sizes: Vec<usize>,
    /// Automaton to check; defaults to the coBüchi collapse of B_Gamma for k = 1.
    #[arg(long)]
    automaton: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum BenchFamilyArg {
    Gk,
    Chain,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot configure {n} threads: {e}");
            return ExitCode::FAILURE;
        }
    }
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(VIOLATION),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_graph(path: &Path) -> Result<ColoredGraph> {
    ColoredGraph::from_json(&read(path)?).with_context(|| format!("in {}", path.display()))
}

fn load_automaton(path: &Path) -> Result<ParityAutomaton> {
    ParityAutomaton::from_json(&read(path)?).with_context(|| format!("in {}", path.display()))
}

fn load_formula(text: &str) -> Result<Formula> {
    parse(text).map_err(|e| anyhow::anyhow!("{e}\n  {text}\n  {}^", " ".repeat(e.position)))
}

fn to_value(text: &str) -> Value {
    serde_json::from_str(text).expect("library JSON is valid")
}

/// Prints `value` as JSON or `text` depending on `--json`.
fn emit(cli: &Cli, value: Value, text: impl FnOnce() -> String) {
    if cli.json {
        println!("{}", serde_json::to_string_pretty(&value).expect("JSON values serialize"));
    } else {
        println!("{}", text());
    }
}

fn run(cli: &Cli) -> Result<bool> {
    match &cli.command {
        Command::Graph(cmd) => graph(cli, cmd),
        Command::Formula(cmd) => formula(cli, cmd),
        Command::Game(GameCmd::Solve { arena }) => game_solve(cli, arena),
        Command::Automaton(cmd) => automaton(cli, cmd),
        Command::Collapse(cmd) => collapse(cli, cmd),
        Command::Gamma(cmd) => gamma(cli, cmd),
        Command::Bench(args) => bench(cli, args),
    }
}

fn graph(cli: &Cli, cmd: &GraphCmd) -> Result<bool> {
    match cmd {
        GraphCmd::Gen { family, k, max_vertices } => {
            let mut rng = sample_rng(cli.seed, 0);
            let g = match family {
                Family::Gk => make_gk(*k)?,
                Family::Nloop => make_nloop(),
                Family::Chain => make_chain(*k),
                Family::RandomScck => random_scck_with(&mut rng, *k, *max_vertices, &[F]),
                Family::Random => random_graph_with(&mut rng, *max_vertices, &[F]),
            };
            println!("{}", g.to_json());
            Ok(true)
        }
        GraphCmd::Validate { file } => {
            let text = read(file)?;
            let g = ColoredGraph::from_json(&text).with_context(|| format!("in {}", file.display()))?;
            let stable = ColoredGraph::from_json(&g.to_json())? == g;
            let info = json!({
                "vertices": g.vertex_count(),
                "edges": g.edge_count(),
                "predicates": g.predicates(),
                "point": g.point(),
                "max_scc_size": max_scc_size(&g),
                "pseudotree": is_pseudotree(&g),
                "round_trip": stable,
            });
            emit(cli, info, || {
                format!(
                    "ok: {} vertices, {} edges, largest SCC {}, pseudotree {}",
                    g.vertex_count(),
                    g.edge_count(),
                    max_scc_size(&g),
                    is_pseudotree(&g)
                )
            });
            Ok(stable)
        }
    }
}

fn formula(cli: &Cli, cmd: &FormulaCmd) -> Result<bool> {
    match cmd {
        FormulaCmd::Parse { text } => {
            let f = load_formula(text)?;
            let free: Vec<String> = f.free_variables().into_iter().collect();
            emit(cli, json!({ "formula": f.to_string(), "sentence": f.is_sentence(), "free": free }), || f.to_string());
            Ok(true)
        }
        FormulaCmd::Classify { text } => {
            let l = classify(&load_formula(text)?);
            emit(cli, json!({ "level": l.to_string(), "sigma": l.sigma, "pi": l.pi }), || l.to_string());
            Ok(true)
        }
        FormulaCmd::Eval { text, graph } => {
            let f = load_formula(text)?;
            let g = load_graph(graph)?;
            let set = evaluate(&g, &f)?;
            let holds = set.contains(&g.point());
            emit(cli, json!({ "vertices": set, "holds_at_point": holds }), || {
                format!("{} at point; satisfied at {:?}", holds, set)
            });
            Ok(true)
        }
    }
}

fn player_name(p: Player) -> &'static str {
    match p {
        Player::Even => "even",
        Player::Odd => "odd",
    }
}

fn game_solve(cli: &Cli, path: &Path) -> Result<bool> {
    let a = ParityArena::from_json(&read(path)?).with_context(|| format!("in {}", path.display()))?;
    let s = solve(&a);
    let mut verified = true;
    for p in [Player::Even, Player::Odd] {
        verified &= verify_strategy(&a, s.strategy(p), p, &s.region(p))?;
    }
    let winner = s.winner[a.start()];
    emit(
        cli,
        json!({
            "winner": player_name(winner),
            "winners": s.winner.iter().map(|&p| player_name(p)).collect::<Vec<_>>(),
            "strategy_even": s.strategy_even.choices,
            "strategy_odd": s.strategy_odd.choices,
            "verified": verified,
        }),
        || format!("{} wins from position {}; strategies verified: {verified}", player_name(winner), a.start()),
    );
    Ok(verified)
}

fn automaton(cli: &Cli, cmd: &AutomatonCmd) -> Result<bool> {
    match cmd {
        AutomatonCmd::Accept { automaton, graph } => {
            let a = load_automaton(automaton)?;
            let g = load_graph(graph)?;
            let ok = accepts(&a, &g)?;
            emit(cli, json!({ "accepts": ok }), || ok.to_string());
            Ok(true)
        }
        AutomatonCmd::Normalize { automaton } => {
            println!("{}", normalize_to_covers(&load_automaton(automaton)?).to_json());
            Ok(true)
        }
        AutomatonCmd::Classify { automaton } => {
            let a = load_automaton(automaton)?;
            let (w, b, c) = (is_weak(&a), is_buchi(&a), is_cobuchi(&a));
            emit(cli, json!({ "weak": w, "buchi": b, "cobuchi": c, "states": a.state_count() }), || {
                format!("weak {w}, buchi {b}, cobuchi {c}")
            });
            Ok(true)
        }
    }
}

fn collapse(cli: &Cli, cmd: &CollapseCmd) -> Result<bool> {
    match cmd {
        CollapseCmd::Run { automaton, k, check } => {
            let b = normalize_to_covers(&load_automaton(automaton)?);
            let c = buchi_to_cobuchi(&b, *k)?;
            let Some(path) = check else {
                println!("{}", c.automaton.to_json());
                return Ok(true);
            };
            let g = load_graph(path)?;
            let (x, y) = (accepts(&b, &g)?, accepts(&c.automaton, &g)?);
            println!(
                "{}",
                serde_json::to_string_pretty(&json!({
                    "automaton": to_value(&c.automaton.to_json()),
                    "window": c.window,
                    "buchi_accepts": x,
                    "cobuchi_accepts": y,
                }))?
            );
            Ok(true)
        }
        CollapseCmd::Sweep { suite, samples, max_vertices, k } => {
            let config = SweepConfig { seed: cli.seed, samples: *samples, max_vertices: *max_vertices, k: *k, suite: suite.clone() };
            let r = run_suite(&config)?;
            emit(cli, serde_json::to_value(&r)?, || r.to_string());
            Ok(if suite == "collapse-mutant" { r.failed > 0 } else { r.failed == 0 })
        }
        CollapseCmd::Disagree { automaton, k, bound } => {
            let b = normalize_to_covers(&load_automaton(automaton)?);
            match find_disagreement_outside_scck(&b, *k, *bound)? {
                Some(d) => emit(
                    cli,
                    json!({
                        "found": true,
                        "graph": to_value(&d.graph.to_json()),
                        "buchi_accepts": d.buchi_accepts,
                        "cobuchi_accepts": d.cobuchi_accepts,
                    }),
                    || format!("{}-cycle: buchi {}, cobuchi {}\n{}", d.graph.vertex_count(), d.buchi_accepts, d.cobuchi_accepts, d.graph.to_json()),
                ),
                None => emit(cli, json!({ "found": false }), || "no disagreement within bound".to_string()),
            }
            Ok(true)
        }
    }
}

fn gamma(cli: &Cli, cmd: &GammaCmd) -> Result<bool> {
    match cmd {
        GammaCmd::Solve { graph } => {
            let g = load_graph(graph)?;
            let v = gamma_winner(&g)?;
            let player = if v.winner == GammaPlayer::PN { Player::Even } else { Player::Odd };
            let region: Vec<usize> = g.vertices().filter(|&x| v.winners[x] == v.winner).collect();
            let verified = verify_strategy(&v.arena, &v.strategy, player, &region)?;
            emit(
                cli,
                json!({
                    "winner": v.winner,
                    "winners": v.winners,
                    "strategy": v.strategy.choices,
                    "verified": verified,
                }),
                || format!("{} wins Gamma from vertex {}", v.winner, g.point()),
            );
            Ok(verified)
        }
        GammaCmd::CheckBstar { graph } => {
            let g = load_graph(graph)?;
            let sem = box_star_gamma_semantic(&g)?;
            let auto = accepts(&make_box_star_gamma_automaton(), &g)?;
            let buchi = accepts(&make_b_gamma(), &g)?;
            emit(cli, json!({ "semantic": sem, "automaton": auto, "gamma_at_point": buchi }), || {
                format!("box-star Gamma: semantic {sem}, automaton {auto}")
            });
            Ok(sem == auto)
        }
        GammaCmd::Falsify { automaton } => {
            let w = load_automaton(automaton)?;
            let r = falsify_weak(&w)?;
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&r.to_json())?);
            } else {
                println!(
                    "witness ({:?}): automaton {}, box-star Gamma {}",
                    r.derivation.tag, r.automaton_verdict, r.semantic_verdict
                );
                for s in &r.derivation.steps {
                    println!("  {s}");
                }
                println!("{}", r.counterexample.to_json());
            }
            Ok(true)
        }
    }
}

fn bench(cli: &Cli, args: &BenchArgs) -> Result<bool> {
    let a = match &args.automaton {
        Some(p) => load_automaton(p)?,
        None => collapsed_b_gamma(1)?,
    };
    let family = match args.family {
        BenchFamilyArg::Gk => BenchFamily::Gk,
        BenchFamilyArg::Chain => BenchFamily::Chain,
    };
    if args.sizes.is_empty() {
        bail!("no sizes given");
    }
    let r = bench_modelcheck(&a, family, &args.sizes)?;
    emit(cli, serde_json::to_value(&r)?, || {
        let mut out = format!("{} states; {}\n", r.automaton_states, r.machine);
        for p in &r.points {
            out += &format!("  size {:>6} ({:>7} vertices): {:.3e} s  (reachability {:.3e} s)\n", p.parameter, p.vertices, p.median, p.baseline_median);
        }
        out += &format!("log-log slope {:.3} (reachability {:.3})", r.slope, r.baseline_slope);
        out
    });
    Ok(true)
}
