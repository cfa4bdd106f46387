//! The game Γ on F/N-colored graphs and the property □*Γ.
//!
//! In Γ, player PN moves at N vertices and PF at F vertices, always along an
//! edge. PN wins a play that visits F infinitely often, and a player with no
//! move loses. □*Γ asks that PN wins Γ from every reachable vertex. This
//! module holds the Büchi automaton for Γ, a hand-built automaton for □*Γ,
//! and a procedure that, given any weak automaton over {F}, produces a graph
//! in SCC1 on which that automaton and □*Γ disagree.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::automata::{
    accepts, accepts_from, is_weak, normalize_to_covers, strategy_graph, AutomatonError, Clause, ParityAutomaton,
    State, StrategyGraph, TransitionFormula,
};
use crate::game::{solve, ParityArena, Player, PositionalStrategy};
use crate::graph::{graft, in_scck, make_gk, make_nloop, ColoredGraph, GkLayout, GraphBuilder, GraphError, Vertex, F};

#[derive(Debug, Error)]
pub enum GammaError {
    #[error("graph does not declare predicate F")]
    MissingF,
    #[error("automaton must use exactly the predicate set {{F}}, found {0:?}")]
    WrongPredicates(Vec<String>),
    #[error("automaton is not weak")]
    NotWeak,
    #[error("automaton has {0} states after normalization; G_h beyond h = {MAX_FALSIFIER_STATES} is too large")]
    TooManyStates(usize),
    #[error("no verified witness found: {0}")]
    InternalInconsistency(String),
    #[error(transparent)]
    Automaton(#[from] AutomatonError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Largest normalized automaton the falsifier accepts.
pub const MAX_FALSIFIER_STATES: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum GammaPlayer {
    PN,
    PF,
}

impl fmt::Display for GammaPlayer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GammaPlayer::PN => "PN",
            GammaPlayer::PF => "PF",
        })
    }
}

#[derive(Clone, Debug)]
pub struct GammaVerdict {
    pub winner: GammaPlayer,
    /// Winning moves of `winner`, as vertex to successor.
    pub strategy: PositionalStrategy,
    /// Winner of Γ from every vertex.
    pub winners: Vec<GammaPlayer>,
    pub arena: ParityArena,
}

/// Γ as a min-parity arena: positions are vertices, PN is Even and owns the
/// N vertices, F vertices have priority 0 and N vertices priority 1.
pub fn gamma_arena(g: &ColoredGraph) -> Result<ParityArena, GammaError> {
    let f = g.predicate_index(F).ok_or(GammaError::MissingF)?;
    let is_f: Vec<bool> = g.vertices().map(|v| g.color(v).contains(f)).collect();
    let owner = is_f.iter().map(|&b| if b { Player::Odd } else { Player::Even }).collect();
    let priority = is_f.iter().map(|&b| if b { 0 } else { 1 }).collect();
    let moves = g.vertices().map(|v| g.successors(v).to_vec()).collect();
    Ok(ParityArena::new(owner, priority, moves, g.point()).expect("graph arena is well formed"))
}

pub fn gamma_winner(g: &ColoredGraph) -> Result<GammaVerdict, GammaError> {
    let arena = gamma_arena(g)?;
    let s = solve(&arena);
    let to_gamma = |p: Player| if p == Player::Even { GammaPlayer::PN } else { GammaPlayer::PF };
    let winner = s.winner[g.point()];
    Ok(GammaVerdict {
        winner: to_gamma(winner),
        strategy: s.strategy(winner).clone(),
        winners: s.winner.iter().map(|&p| to_gamma(p)).collect(),
        arena,
    })
}

/// PN wins Γ from every vertex reachable from the point.
pub fn box_star_gamma_semantic(g: &ColoredGraph) -> Result<bool, GammaError> {
    let s = solve(&gamma_arena(g)?);
    let reach = g.reachable();
    Ok(g.vertices().filter(|&v| reach[v]).all(|v| s.winner[v] == Player::Even))
}

const LETTER_N: u32 = 0;
const LETTER_F: u32 = 1;

/// Büchi automaton for Γ with states q0 (initial), qN and qF.
pub fn make_b_gamma() -> ParityAutomaton {
    let (q0, qn, qf) = (0, 1, 2);
    let mut a = ParityAutomaton::new(&["q0", "qN", "qF"], &[F], vec![0, 1, 0], q0).expect("fixed table");
    let on_n = TransitionFormula(vec![Clause::DiamondConj(vec![qn]), Clause::DiamondConj(vec![qf])]);
    let on_f = TransitionFormula(vec![Clause::BoxDisj(vec![qn, qf])]);
    for q in [q0, qn] {
        a.set_transition(q, LETTER_N, on_n.clone()).expect("fixed table");
    }
    for q in [q0, qf] {
        a.set_transition(q, LETTER_F, on_f.clone()).expect("fixed table");
    }
    a
}

/// Büchi automaton for □*Γ. State u (initial) starts a Γ thread at the
/// current vertex; uN and uF carry a running thread that is at an N or an
/// F vertex. All three also impose u on every successor.
pub fn make_box_star_gamma_automaton() -> ParityAutomaton {
    let (u, un, uf) = (0, 1, 2);
    let mut a = ParityAutomaton::new(&["u", "uN", "uF"], &[F], vec![0, 1, 0], u).expect("fixed table");
    let mut on_n = TransitionFormula::falsum();
    for mask in 1..8u32 {
        let s: Vec<State> = (0..3).filter(|i| mask & (1 << i) != 0).collect();
        if s.contains(&un) || s.contains(&uf) {
            on_n = on_n.or(Clause::Cover(s));
        }
    }
    let on_f = normalize_clause(Clause::BoxDisj(vec![un, uf]));
    for q in [u, un] {
        a.set_transition(q, LETTER_N, on_n.clone()).expect("fixed table");
    }
    for q in [u, uf] {
        a.set_transition(q, LETTER_F, on_f.clone()).expect("fixed table");
    }
    a
}

fn normalize_clause(c: Clause) -> TransitionFormula {
    let mut tmp = ParityAutomaton::new(&["a", "b", "c"], &[F], vec![0, 0, 0], 0).expect("scratch automaton");
    tmp.set_transition(0, 0, TransitionFormula(vec![c])).expect("scratch automaton");
    normalize_to_covers(&tmp).delta(0, 0).clone()
}

// ---------------------------------------------------------------------------
// Falsifier

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DerivationTag {
    /// The automaton accepts N_loop, which fails □*Γ.
    AcceptsNLoop,
    /// The automaton rejects G_h, which satisfies □*Γ.
    RejectedGk,
    /// N_loop grafted where the strategy tree carries a state accepting it.
    PumpedNLoopGraft,
}

#[derive(Clone, Debug, Serialize)]
pub struct Derivation {
    pub tag: DerivationTag,
    pub steps: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct WitnessReport {
    pub counterexample: ColoredGraph,
    pub automaton_verdict: bool,
    pub semantic_verdict: bool,
    pub derivation: Derivation,
}

impl WitnessReport {
    pub fn to_json(&self) -> serde_json::Value {
        let graph: serde_json::Value =
            serde_json::from_str(&self.counterexample.to_json()).expect("graph JSON is valid");
        serde_json::json!({
            "automaton_verdict": self.automaton_verdict,
            "semantic_verdict": self.semantic_verdict,
            "derivation": self.derivation,
            "counterexample": graph,
        })
    }
}

/// Checks a report from scratch: the counterexample is in SCC1 and the
/// automaton and □*Γ give the recorded, different verdicts.
pub fn verify_witness(w: &ParityAutomaton, report: &WitnessReport) -> Result<bool, GammaError> {
    let g = &report.counterexample;
    let a = accepts(w, g)?;
    let s = box_star_gamma_semantic(g)?;
    Ok(in_scck(g, 1) && a != s && a == report.automaton_verdict && s == report.semantic_verdict)
}

/// Builds an SCC1 graph on which the weak automaton `w` and □*Γ disagree.
///
/// With `h` states (after normalization): if `w` accepts N_loop that is the
/// witness; if it rejects G_h that is. Otherwise a state accepting N_loop is
/// looked for along the winning strategy on G_h, walking the main vertices
/// v_0, v_1, ...: where the priority drops on a chain the walk descends to
/// the next main vertex, otherwise two chain positions with the same label
/// set nominate the candidate states. N_loop is grafted at a label carrying
/// such a state; the strategy stays winning there, so the graft is accepted
/// although □*Γ fails on it.
pub fn falsify_weak(w: &ParityAutomaton) -> Result<WitnessReport, GammaError> {
    if w.predicates() != [F] {
        return Err(GammaError::WrongPredicates(w.predicates().to_vec()));
    }
    if !is_weak(w) {
        return Err(GammaError::NotWeak);
    }
    let wn = normalize_to_covers(w);
    let h = wn.state_count();
    if h > MAX_FALSIFIER_STATES {
        return Err(GammaError::TooManyStates(h));
    }
    let nloop = make_nloop();
    let mut steps = Vec::new();

    if accepts(&wn, &nloop)? {
        steps.push("automaton accepts N_loop".to_string());
        return finish(w, nloop, DerivationTag::AcceptsNLoop, steps);
    }
    let gh = make_gk(h)?;
    if !accepts(&wn, &gh)? {
        steps.push(format!("automaton rejects G_{h}"));
        return finish(w, gh, DerivationTag::RejectedGk, steps);
    }
    steps.push(format!("automaton accepts G_{h}; following its winning strategy"));

    let sg = strategy_graph(&wn, &gh)?;
    let layout = GkLayout::new(h)?;
    let mut loop_ok: BTreeMap<State, bool> = BTreeMap::new();
    let mut accepts_nloop = |q: State| -> Result<bool, GammaError> {
        if let Some(&b) = loop_ok.get(&q) {
            return Ok(b);
        }
        let b = accepts_from(&wn, q, &nloop)?;
        loop_ok.insert(q, b);
        Ok(b)
    };

    let mut nominated: Vec<usize> = Vec::new();
    let mut current = sg.root;
    for i in 0..h {
        let reach = reachable_labels(&sg, current);
        let top = wn.priority(sg.labels[current].state);
        let on_level = |v: Vertex| layout.locate(v).0 == i && v < layout.main(i + 1);
        let drop = reach.iter().any(|&x| on_level(sg.labels[x].vertex) && wn.priority(sg.labels[x].state) < top);
        if !drop {
            let sets: Vec<Vec<State>> = (1..=layout.n)
                .map(|j| {
                    let mut s: Vec<State> = reach
                        .iter()
                        .filter(|&&x| sg.labels[x].vertex == layout.chain(i, j))
                        .map(|&x| sg.labels[x].state)
                        .collect();
                    s.sort_unstable();
                    s.dedup();
                    s
                })
                .collect();
            if let Some((a, b)) = repeated_pair(&sets) {
                steps.push(format!("chain {i}: Q_{} = Q_{} = {}", a + 1, b + 1, state_set(&wn, &sets[a])));
                for &q in &sets[a] {
                    if accepts_nloop(q)? {
                        steps.push(format!("state {} accepts N_loop", wn.state_name(q)));
                        let v = layout.chain(i, a + 1);
                        let x = reach
                            .iter()
                            .copied()
                            .find(|&x| sg.labels[x].vertex == v && sg.labels[x].state == q)
                            .expect("label of Q_i is reachable");
                        nominated.push(x);
                    }
                }
                if !nominated.is_empty() {
                    break;
                }
            }
        }
        let next = reach
            .iter()
            .copied()
            .filter(|&x| sg.labels[x].vertex == layout.main(i + 1))
            .min_by_key(|&x| (wn.priority(sg.labels[x].state), sg.labels[x].state));
        let Some(next) = next else { break };
        steps.push(format!(
            "{}descend to ({}, v_{})",
            if drop { format!("priority drops below {top} on chain {i}; ") } else { String::new() },
            wn.state_name(sg.labels[next].state),
            i + 1
        ));
        current = next;
    }

    for x in 0..sg.labels.len() {
        if !nominated.contains(&x) && accepts_nloop(sg.labels[x].state)? {
            nominated.push(x);
        }
    }
    for x in nominated {
        let label = sg.labels[x];
        let path = sg.path_to(x).expect("labels are reachable from the root");
        let plain = graft(&gh, label.vertex, &nloop)?;
        if accepts(&wn, &plain)? {
            steps.push(format!("graft N_loop at vertex {} labeled {}", label.vertex, wn.state_name(label.state)));
            return finish(w, plain, DerivationTag::PumpedNLoopGraft, steps);
        }
        let spine = spine_graft(&gh, &sg, &path, &nloop)?;
        if accepts(&wn, &spine)? {
            steps.push(format!(
                "graft N_loop below a fresh copy of the {}-step label path to ({}, {})",
                path.len() - 1,
                wn.state_name(label.state),
                label.vertex
            ));
            return finish(w, spine, DerivationTag::PumpedNLoopGraft, steps);
        }
    }
    Err(GammaError::InternalInconsistency(steps.join("; ")))
}

fn finish(w: &ParityAutomaton, g: ColoredGraph, tag: DerivationTag, steps: Vec<String>) -> Result<WitnessReport, GammaError> {
    let g = g.canonical();
    let report = WitnessReport {
        automaton_verdict: accepts(w, &g)?,
        semantic_verdict: box_star_gamma_semantic(&g)?,
        counterexample: g,
        derivation: Derivation { tag, steps },
    };
    if verify_witness(w, &report)? {
        Ok(report)
    } else {
        Err(GammaError::InternalInconsistency(format!(
            "candidate from {:?} does not separate (automaton {}, semantic {})",
            tag, report.automaton_verdict, report.semantic_verdict
        )))
    }
}

fn reachable_labels(sg: &StrategyGraph, from: usize) -> Vec<usize> {
    let mut seen = vec![false; sg.labels.len()];
    seen[from] = true;
    let mut stack = vec![from];
    let mut out = Vec::new();
    while let Some(x) = stack.pop() {
        out.push(x);
        for &c in &sg.children[x] {
            if !seen[c] {
                seen[c] = true;
                stack.push(c);
            }
        }
    }
    out.sort_unstable();
    out
}

/// First pair `a < b` of nonempty equal sets.
fn repeated_pair(sets: &[Vec<State>]) -> Option<(usize, usize)> {
    for b in 0..sets.len() {
        for a in 0..b {
            if !sets[a].is_empty() && sets[a] == sets[b] {
                return Some((a, b));
            }
        }
    }
    None
}

fn state_set(a: &ParityAutomaton, s: &[State]) -> String {
    format!("{{{}}}", s.iter().map(|&q| a.state_name(q)).collect::<Vec<_>>().join(","))
}

/// `host` plus fresh copies of the vertices on a label path; each copy keeps
/// the original successors of its vertex and gains an edge to the next copy,
/// and the last label is replaced by `donor`. The point is the first copy.
/// Only the tree node at the end of the path changes, not every node that
/// shares its vertex.
fn spine_graft(host: &ColoredGraph, sg: &StrategyGraph, path: &[usize], donor: &ColoredGraph) -> Result<ColoredGraph, GraphError> {
    let mut b = GraphBuilder::new(host.predicates());
    for v in host.vertices() {
        b.add_vertex(host.color(v));
    }
    for (v, w) in host.edges() {
        b.add_edge(v, w);
    }
    let copies: Vec<Vertex> = path[..path.len() - 1].iter().map(|&x| b.add_vertex(host.color(sg.labels[x].vertex))).collect();
    let offset = b.vertex_count();
    for v in donor.vertices() {
        b.add_vertex(donor.color(v));
    }
    for (v, w) in donor.edges() {
        b.add_edge(offset + v, offset + w);
    }
    for (i, &c) in copies.iter().enumerate() {
        for &w in host.successors(sg.labels[path[i]].vertex) {
            b.add_edge(c, w);
        }
        let next = if i + 1 < copies.len() { copies[i + 1] } else { offset + donor.point() };
        b.add_edge(c, next);
    }
    b.set_point(copies.first().copied().unwrap_or(offset + donor.point()));
    b.build()
}
