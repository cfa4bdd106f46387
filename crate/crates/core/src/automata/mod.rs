//! Parity automata over colored graphs whose transitions are disjunctions
//! of cover-style clauses.
//!
//! `Cover(S)` holds at a vertex when every state of `S` is assigned to some
//! successor and every successor is assigned some state of `S`. The other
//! two clause kinds are conveniences that [`normalize_to_covers`] rewrites
//! away: `DiamondConj(S)` only asks for the first half, `BoxDisj(S)` only for
//! the second.

mod arena;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Color, ColoredGraph, GraphError};

pub use arena::{
    acceptance_arena, acceptance_arena_from, accepts, accepts_from, strategy_graph, strategy_tree, AcceptanceArena,
    ArenaNode, Label, StrategyGraph, StrategyTree, TreeNode,
};

pub type State = usize;
pub type Priority = u32;

/// Bitmask over the automaton's predicate list.
pub type Letter = u32;

pub const MAX_AUTOMATON_PREDICATES: usize = 8;

#[derive(Debug, Error)]
pub enum AutomatonError {
    #[error("automaton has no states")]
    Empty,
    #[error("state `{0}` declared twice")]
    DuplicateState(String),
    #[error("unknown state `{0}`")]
    UnknownStateName(String),
    #[error("state index {0} out of range")]
    UnknownState(State),
    #[error("predicate `{0}` declared twice")]
    DuplicatePredicate(String),
    #[error("unknown predicate `{0}`")]
    UnknownPredicate(String),
    #[error("at most {MAX_AUTOMATON_PREDICATES} predicates are supported, got {0}")]
    TooManyPredicates(usize),
    #[error("{states} states but {priorities} priorities")]
    PriorityCount { states: usize, priorities: usize },
    #[error("transition for state `{state}` and letter {letter:?} given twice")]
    DuplicateTransition { state: String, letter: Vec<String> },
    #[error("automaton uses non-cover clauses; normalize it first")]
    NotNormalized,
    #[error("automaton is not a Büchi automaton (priorities must lie in {{0, 1}})")]
    NotBuchi,
    #[error("graph does not declare predicate `{0}` used by the automaton")]
    MissingPredicate(String),
    #[error("automaton rejects the graph")]
    Rejected,
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("invalid automaton JSON: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Clause {
    Cover(Vec<State>),
    DiamondConj(Vec<State>),
    BoxDisj(Vec<State>),
}

impl Clause {
    pub fn states(&self) -> &[State] {
        match self {
            Clause::Cover(s) | Clause::DiamondConj(s) | Clause::BoxDisj(s) => s,
        }
    }

    fn canonical(self) -> Clause {
        let fix = |mut s: Vec<State>| {
            s.sort_unstable();
            s.dedup();
            s
        };
        match self {
            Clause::Cover(s) => Clause::Cover(fix(s)),
            Clause::DiamondConj(s) => Clause::DiamondConj(fix(s)),
            Clause::BoxDisj(s) => Clause::BoxDisj(fix(s)),
        }
    }
}

/// A disjunction of clauses; the empty disjunction is false.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct TransitionFormula(pub Vec<Clause>);

impl TransitionFormula {
    pub fn falsum() -> Self {
        TransitionFormula(Vec::new())
    }

    pub fn cover(states: &[State]) -> Self {
        TransitionFormula(vec![Clause::Cover(states.to_vec())])
    }

    pub fn or(mut self, clause: Clause) -> Self {
        self.0.push(clause);
        self
    }

    pub fn is_false(&self) -> bool {
        self.0.is_empty()
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.0
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParityAutomaton {
    state_names: Vec<String>,
    predicates: Vec<String>,
    priority: Vec<Priority>,
    initial: State,
    /// `delta[q][letter]`
    delta: Vec<Vec<TransitionFormula>>,
}

impl ParityAutomaton {
    /// An automaton whose transitions are all false.
    pub fn new<S: AsRef<str>, P: AsRef<str>>(
        state_names: &[S],
        predicates: &[P],
        priority: Vec<Priority>,
        initial: State,
    ) -> Result<Self, AutomatonError> {
        let state_names: Vec<String> = state_names.iter().map(|s| s.as_ref().to_string()).collect();
        let predicates: Vec<String> = predicates.iter().map(|s| s.as_ref().to_string()).collect();
        if state_names.is_empty() {
            return Err(AutomatonError::Empty);
        }
        if let Some(d) = first_duplicate(&state_names) {
            return Err(AutomatonError::DuplicateState(d));
        }
        if let Some(d) = first_duplicate(&predicates) {
            return Err(AutomatonError::DuplicatePredicate(d));
        }
        if predicates.len() > MAX_AUTOMATON_PREDICATES {
            return Err(AutomatonError::TooManyPredicates(predicates.len()));
        }
        if priority.len() != state_names.len() {
            return Err(AutomatonError::PriorityCount { states: state_names.len(), priorities: priority.len() });
        }
        if initial >= state_names.len() {
            return Err(AutomatonError::UnknownState(initial));
        }
        let letters = 1usize << predicates.len();
        let delta = vec![vec![TransitionFormula::falsum(); letters]; state_names.len()];
        Ok(ParityAutomaton { state_names, predicates, priority, initial, delta })
    }

    pub fn set_transition(&mut self, q: State, letter: Letter, f: TransitionFormula) -> Result<(), AutomatonError> {
        if q >= self.state_count() {
            return Err(AutomatonError::UnknownState(q));
        }
        assert!((letter as usize) < self.letter_count(), "letter out of range");
        let mut clauses = Vec::with_capacity(f.0.len());
        for c in f.0 {
            if let Some(&bad) = c.states().iter().find(|&&s| s >= self.state_count()) {
                return Err(AutomatonError::UnknownState(bad));
            }
            let c = c.canonical();
            if !clauses.contains(&c) {
                clauses.push(c);
            }
        }
        self.delta[q][letter as usize] = TransitionFormula(clauses);
        Ok(())
    }

    /// Sets the same transition for every letter.
    pub fn set_all_letters(&mut self, q: State, f: TransitionFormula) -> Result<(), AutomatonError> {
        for letter in 0..self.letter_count() as Letter {
            self.set_transition(q, letter, f.clone())?;
        }
        Ok(())
    }

    pub fn state_count(&self) -> usize {
        self.state_names.len()
    }

    pub fn states(&self) -> std::ops::Range<State> {
        0..self.state_count()
    }

    pub fn state_name(&self, q: State) -> &str {
        &self.state_names[q]
    }

    pub fn state_index(&self, name: &str) -> Option<State> {
        self.state_names.iter().position(|s| s == name)
    }

    pub fn predicates(&self) -> &[String] {
        &self.predicates
    }

    pub fn letter_count(&self) -> usize {
        1 << self.predicates.len()
    }

    pub fn initial(&self) -> State {
        self.initial
    }

    pub fn with_initial(&self, q: State) -> Result<Self, AutomatonError> {
        if q >= self.state_count() {
            return Err(AutomatonError::UnknownState(q));
        }
        let mut a = self.clone();
        a.initial = q;
        Ok(a)
    }

    pub fn priority(&self, q: State) -> Priority {
        self.priority[q]
    }

    pub fn priorities(&self) -> &[Priority] {
        &self.priority
    }

    pub fn delta(&self, q: State, letter: Letter) -> &TransitionFormula {
        &self.delta[q][letter as usize]
    }

    pub fn is_cover_only(&self) -> bool {
        self.delta.iter().flatten().flat_map(|f| &f.0).all(|c| matches!(c, Clause::Cover(_)))
    }

    /// Letter of the named predicate set.
    pub fn letter_of<S: AsRef<str>>(&self, names: &[S]) -> Result<Letter, AutomatonError> {
        let mut letter = 0;
        for n in names {
            let i = self
                .predicates
                .iter()
                .position(|p| p == n.as_ref())
                .ok_or_else(|| AutomatonError::UnknownPredicate(n.as_ref().to_string()))?;
            letter |= 1 << i;
        }
        Ok(letter)
    }

    pub fn letter_names(&self, letter: Letter) -> Vec<String> {
        (0..self.predicates.len()).filter(|i| letter & (1 << i) != 0).map(|i| self.predicates[i].clone()).collect()
    }

    /// Per-vertex letters of `g`, translated to this automaton's predicate
    /// order. Predicates of `g` the automaton does not mention are ignored.
    pub fn letters_of(&self, g: &ColoredGraph) -> Result<Vec<Letter>, AutomatonError> {
        let map: Vec<usize> = self
            .predicates
            .iter()
            .map(|p| g.predicate_index(p).ok_or_else(|| AutomatonError::MissingPredicate(p.clone())))
            .collect::<Result<_, _>>()?;
        Ok(g.vertices().map(|v| translate(g.color(v), &map)).collect())
    }

    /// States occurring in some transition of `q`.
    pub fn successors(&self, q: State) -> BTreeSet<State> {
        self.delta[q].iter().flat_map(|f| &f.0).flat_map(|c| c.states().iter().copied()).collect()
    }

    /// States reachable from `q` through transitions, `q` included.
    pub fn reachable_states(&self, q: State) -> BTreeSet<State> {
        let mut seen = BTreeSet::from([q]);
        let mut stack = vec![q];
        while let Some(p) = stack.pop() {
            for r in self.successors(p) {
                if seen.insert(r) {
                    stack.push(r);
                }
            }
        }
        seen
    }

    /// The sub-automaton on the states reachable from `q`, started at `q`.
    pub fn restrict_to_reachable(&self, q: State) -> ParityAutomaton {
        let keep: Vec<State> = self.reachable_states(q).into_iter().collect();
        let mut index = vec![usize::MAX; self.state_count()];
        for (i, &s) in keep.iter().enumerate() {
            index[s] = i;
        }
        let names: Vec<&str> = keep.iter().map(|&s| self.state_names[s].as_str()).collect();
        let mut out = ParityAutomaton::new(
            &names,
            &self.predicates,
            keep.iter().map(|&s| self.priority[s]).collect(),
            index[q],
        )
        .expect("restriction of a valid automaton is valid");
        let remap = |c: &Clause| {
            let s = c.states().iter().map(|&x| index[x]).collect();
            match c {
                Clause::Cover(_) => Clause::Cover(s),
                Clause::DiamondConj(_) => Clause::DiamondConj(s),
                Clause::BoxDisj(_) => Clause::BoxDisj(s),
            }
        };
        for (i, &s) in keep.iter().enumerate() {
            for letter in 0..self.letter_count() {
                out.delta[i][letter] = TransitionFormula(self.delta[s][letter].0.iter().map(remap).collect());
            }
        }
        out
    }
}

fn translate(c: Color, map: &[usize]) -> Letter {
    map.iter().enumerate().filter(|&(_, &gi)| c.contains(gi)).fold(0, |acc, (ai, _)| acc | (1 << ai))
}

fn first_duplicate(names: &[String]) -> Option<String> {
    let mut seen = BTreeSet::new();
    names.iter().find(|n| !seen.insert(n.as_str())).cloned()
}

// ---------------------------------------------------------------------------
// Normalization and classes

/// Rewrites every clause into covers. `DiamondConj(S)` becomes
/// `Cover(S + q_t)` where `q_t` is a fresh state accepting everything
/// (priority 0, `δ(q_t, ·) = Cover(q_t) ∨ Cover(∅)`); it is only added when a
/// diamond conjunction occurs. `DiamondConj(∅)` also keeps `Cover(∅)`. `BoxDisj(S)` becomes the disjunction of
/// `Cover(S')` over all subsets `S'` of `S`.
pub fn normalize_to_covers(a: &ParityAutomaton) -> ParityAutomaton {
    if a.is_cover_only() {
        return a.clone();
    }
    let needs_top = a.delta.iter().flatten().flat_map(|f| &f.0).any(|c| matches!(c, Clause::DiamondConj(_)));
    let mut out = a.clone();
    let top = if needs_top {
        let mut name = "q_t".to_string();
        let mut i = 0;
        while a.state_index(&name).is_some() {
            i += 1;
            name = format!("q_t{i}");
        }
        out.state_names.push(name);
        out.priority.push(0);
        let t = out.state_count() - 1;
        out.delta.push(vec![TransitionFormula(vec![Clause::Cover(vec![t]), Clause::Cover(vec![])]); a.letter_count()]);
        Some(t)
    } else {
        None
    };
    for q in a.states() {
        for letter in 0..a.letter_count() {
            let mut clauses: Vec<Clause> = Vec::new();
            let mut push = |c: Clause| {
                let c = c.canonical();
                if !clauses.contains(&c) {
                    clauses.push(c);
                }
            };
            for c in &a.delta[q][letter].0 {
                match c {
                    Clause::Cover(s) => push(Clause::Cover(s.clone())),
                    Clause::DiamondConj(s) => {
                        if s.is_empty() {
                            // vacuous at dead ends too
                            push(Clause::Cover(vec![]));
                        }
                        let mut s = s.clone();
                        s.push(top.expect("q_t exists when a diamond clause does"));
                        push(Clause::Cover(s));
                    }
                    Clause::BoxDisj(s) => {
                        for mask in (0..1u64 << s.len()).rev() {
                            let sub = (0..s.len()).filter(|i| mask & (1 << i) != 0).map(|i| s[i]).collect();
                            push(Clause::Cover(sub));
                        }
                    }
                }
            }
            out.delta[q][letter] = TransitionFormula(clauses);
        }
    }
    out
}

/// Priorities never increase along transitions.
pub fn is_weak(a: &ParityAutomaton) -> bool {
    a.states().all(|q| a.successors(q).into_iter().all(|r| a.priority[r] <= a.priority[q]))
}

pub fn is_buchi(a: &ParityAutomaton) -> bool {
    a.priority.iter().all(|&p| p <= 1)
}

pub fn is_cobuchi(a: &ParityAutomaton) -> bool {
    a.priority.iter().all(|&p| p == 1 || p == 2)
}

// ---------------------------------------------------------------------------
// Random automata

/// Shape of [`random_automaton`] output.
#[derive(Clone, Debug)]
pub struct RandomAutomatonConfig {
    pub max_states: usize,
    /// Priorities are drawn from this list.
    pub priorities: Vec<Priority>,
    /// Only `Cover` clauses.
    pub cover_only: bool,
    /// Transitions only lead to states of priority at most the source's.
    pub weak: bool,
}

pub fn random_automaton<R: Rng, S: AsRef<str>>(rng: &mut R, predicates: &[S], cfg: &RandomAutomatonConfig) -> ParityAutomaton {
    let n = rng.gen_range(1..=cfg.max_states);
    let names: Vec<String> = (0..n).map(|i| format!("s{i}")).collect();
    let priority: Vec<Priority> = (0..n).map(|_| cfg.priorities[rng.gen_range(0..cfg.priorities.len())]).collect();
    let mut a = ParityAutomaton::new(&names, predicates, priority.clone(), 0).expect("generated automaton is valid");
    for q in 0..n {
        let allowed: Vec<State> = (0..n).filter(|&r| !cfg.weak || priority[r] <= priority[q]).collect();
        for letter in 0..a.letter_count() as Letter {
            if rng.gen_bool(0.15) {
                continue;
            }
            let mut f = TransitionFormula::falsum();
            for _ in 0..rng.gen_range(1..=2) {
                let size = rng.gen_range(0..=2.min(allowed.len()));
                let states: Vec<State> = (0..size).map(|_| allowed[rng.gen_range(0..allowed.len())]).collect();
                let kind = if cfg.cover_only { 0 } else { rng.gen_range(0..3) };
                f = f.or(match kind {
                    0 => Clause::Cover(states),
                    1 => Clause::DiamondConj(states),
                    _ => Clause::BoxDisj(states),
                });
            }
            a.set_transition(q, letter, f).expect("states are in range");
        }
    }
    a
}

// ---------------------------------------------------------------------------
// JSON

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum ClauseKind {
    Cover,
    Dia,
    Box,
}

#[derive(Serialize, Deserialize)]
struct ClauseEntry {
    kind: ClauseKind,
    states: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct TransitionEntry {
    state: String,
    letter: Vec<String>,
    clauses: Vec<ClauseEntry>,
}

#[derive(Serialize, Deserialize)]
struct AutomatonFile {
    predicates: Vec<String>,
    states: Vec<String>,
    priorities: Vec<Priority>,
    initial: String,
    delta: Vec<TransitionEntry>,
}

impl ParityAutomaton {
    /// Only transitions that are not false are written.
    pub fn to_json(&self) -> String {
        let names = |s: &[State]| s.iter().map(|&q| self.state_names[q].clone()).collect();
        let mut delta = Vec::new();
        for q in self.states() {
            for letter in 0..self.letter_count() as Letter {
                let f = &self.delta[q][letter as usize];
                if f.is_false() {
                    continue;
                }
                delta.push(TransitionEntry {
                    state: self.state_names[q].clone(),
                    letter: self.letter_names(letter),
                    clauses: f
                        .0
                        .iter()
                        .map(|c| {
                            let kind = match c {
                                Clause::Cover(_) => ClauseKind::Cover,
                                Clause::DiamondConj(_) => ClauseKind::Dia,
                                Clause::BoxDisj(_) => ClauseKind::Box,
                            };
                            ClauseEntry { kind, states: names(c.states()) }
                        })
                        .collect(),
                });
            }
        }
        let file = AutomatonFile {
            predicates: self.predicates.clone(),
            states: self.state_names.clone(),
            priorities: self.priority.clone(),
            initial: self.state_names[self.initial].clone(),
            delta,
        };
        serde_json::to_string_pretty(&file).expect("automaton serialization cannot fail")
    }

    /// Letters that are not listed are false.
    pub fn from_json(text: &str) -> Result<Self, AutomatonError> {
        let file: AutomatonFile = serde_json::from_str(text)?;
        let lookup = |names: &[String], n: &str| {
            names.iter().position(|s| s == n).ok_or_else(|| AutomatonError::UnknownStateName(n.to_string()))
        };
        let initial = lookup(&file.states, &file.initial)?;
        let mut a = ParityAutomaton::new(&file.states, &file.predicates, file.priorities.clone(), initial)?;
        let mut seen = BTreeMap::new();
        for entry in &file.delta {
            let q = lookup(&file.states, &entry.state)?;
            let letter = a.letter_of(&entry.letter)?;
            if seen.insert((q, letter), ()).is_some() {
                return Err(AutomatonError::DuplicateTransition {
                    state: entry.state.clone(),
                    letter: entry.letter.clone(),
                });
            }
            let mut f = TransitionFormula::falsum();
            for c in &entry.clauses {
                let states = c.states.iter().map(|n| lookup(&file.states, n)).collect::<Result<Vec<_>, _>>()?;
                f = f.or(match c.kind {
                    ClauseKind::Cover => Clause::Cover(states),
                    ClauseKind::Dia => Clause::DiamondConj(states),
                    ClauseKind::Box => Clause::BoxDisj(states),
                });
            }
            a.set_transition(q, letter, f)?;
        }
        Ok(a)
    }
}

impl fmt::Display for ParityAutomaton {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in self.states() {
            let mark = if q == self.initial { "->" } else { "  " };
            writeln!(f, "{mark} {} [{}]", self.state_names[q], self.priority[q])?;
            for letter in 0..self.letter_count() as Letter {
                let clauses: Vec<String> = self.delta[q][letter as usize]
                    .0
                    .iter()
                    .map(|c| {
                        let s: Vec<&str> = c.states().iter().map(|&x| self.state_names[x].as_str()).collect();
                        let kind = match c {
                            Clause::Cover(_) => "cover",
                            Clause::DiamondConj(_) => "dia",
                            Clause::BoxDisj(_) => "box",
                        };
                        format!("{kind}({})", s.join(","))
                    })
                    .collect();
                let body = if clauses.is_empty() { "false".to_string() } else { clauses.join(" | ") };
                writeln!(f, "     {{{}}} -> {body}", self.letter_names(letter).join(","))?;
            }
        }
        Ok(())
    }
}
