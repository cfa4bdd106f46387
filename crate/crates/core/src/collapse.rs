//! Büchi to coBüchi on graphs of bounded component size.
//!
//! The coBüchi automaton runs the Büchi automaton while remembering the last
//! `W = |Q|·k` states of the current branch. A list is final once it is full
//! and contains a final state of the source, so the coBüchi condition asks
//! that eventually every window of `W` consecutive states sees a final state.
//! On graphs whose components have at most `k` vertices this is equivalent to
//! the Büchi condition; on larger cycles it can be too strict.

use std::collections::HashMap;

use thiserror::Error;

use crate::automata::{accepts, is_buchi, AutomatonError, Clause, Letter, ParityAutomaton, State, TransitionFormula};
use crate::graph::{max_scc_size, Color, ColoredGraph, GraphBuilder};

#[derive(Debug, Error)]
pub enum CollapseError {
    #[error("source automaton is not Büchi")]
    NotBuchi,
    #[error("source automaton must be cover-normalized")]
    NotNormalized,
    #[error("window length must be positive")]
    ZeroWindow,
    #[error(transparent)]
    Automaton(#[from] AutomatonError),
}

#[derive(Clone, Debug)]
pub struct Collapse {
    pub automaton: ParityAutomaton,
    /// Source-state list of every state of `automaton`.
    pub lists: Vec<Vec<State>>,
    pub window: usize,
}

pub fn buchi_to_cobuchi(b: &ParityAutomaton, k: usize) -> Result<Collapse, CollapseError> {
    with_window(b, b.state_count() * k)
}

/// The same construction with an arbitrary window length.
pub fn with_window(b: &ParityAutomaton, window: usize) -> Result<Collapse, CollapseError> {
    if !is_buchi(b) {
        return Err(CollapseError::NotBuchi);
    }
    if !b.is_cover_only() {
        return Err(CollapseError::NotNormalized);
    }
    if window == 0 {
        return Err(CollapseError::ZeroWindow);
    }
    let mut lists: Vec<Vec<State>> = vec![vec![b.initial()]];
    let mut ids: HashMap<Vec<State>, State> = HashMap::from([(lists[0].clone(), 0)]);
    let mut delta: Vec<Vec<TransitionFormula>> = Vec::new();
    let mut next = 0;
    while next < lists.len() {
        let list = lists[next].clone();
        next += 1;
        let last = *list.last().expect("lists are nonempty");
        let kept = if list.len() < window { &list[..] } else { &list[1..] };
        let mut row = Vec::with_capacity(b.letter_count());
        for letter in 0..b.letter_count() as Letter {
            let mut clauses = Vec::new();
            for c in b.delta(last, letter).clauses() {
                let mut targets = Vec::with_capacity(c.states().len());
                for &q in c.states() {
                    let mut l = kept.to_vec();
                    l.push(q);
                    let id = *ids.entry(l.clone()).or_insert_with(|| {
                        lists.push(l);
                        lists.len() - 1
                    });
                    targets.push(id);
                }
                clauses.push(Clause::Cover(targets));
            }
            row.push(TransitionFormula(clauses));
        }
        delta.push(row);
    }

    let names: Vec<String> = lists
        .iter()
        .map(|l| format!("[{}]", l.iter().map(|&q| b.state_name(q)).collect::<Vec<_>>().join(",")))
        .collect();
    let priority = lists
        .iter()
        .map(|l| if l.len() == window && l.iter().any(|&q| b.priority(q) == 0) { 2 } else { 1 })
        .collect();
    let mut c = ParityAutomaton::new(&names, b.predicates(), priority, 0)?;
    for (q, row) in delta.into_iter().enumerate() {
        for (letter, f) in row.into_iter().enumerate() {
            c.set_transition(q, letter as Letter, f)?;
        }
    }
    Ok(Collapse { automaton: c, lists, window })
}

#[derive(Clone, Debug)]
pub struct Disagreement {
    pub graph: ColoredGraph,
    pub buchi_accepts: bool,
    pub cobuchi_accepts: bool,
}

/// Searches directed cycles of length `k+1..=search_bound`, pointed at
/// vertex 0, under every coloring (vertex 0 varies fastest), for a graph on
/// which `b` and its collapse for `k` disagree.
pub fn find_disagreement_outside_scck(
    b: &ParityAutomaton,
    k: usize,
    search_bound: usize,
) -> Result<Option<Disagreement>, CollapseError> {
    let c = buchi_to_cobuchi(b, k)?.automaton;
    let letters = b.letter_count() as u64;
    for len in (k + 1)..=search_bound {
        let total = letters.pow(len as u32);
        for code in 0..total {
            let g = colored_cycle(b.predicates(), len, code, letters);
            let buchi = accepts(b, &g)?;
            let cobuchi = accepts(&c, &g)?;
            if buchi != cobuchi {
                debug_assert!(max_scc_size(&g) > k);
                return Ok(Some(Disagreement { graph: g, buchi_accepts: buchi, cobuchi_accepts: cobuchi }));
            }
        }
    }
    Ok(None)
}

fn colored_cycle(predicates: &[String], len: usize, mut code: u64, letters: u64) -> ColoredGraph {
    let mut g = GraphBuilder::new(predicates);
    for v in 0..len {
        g.add_vertex(Color((code % letters) as u32));
        code /= letters;
        g.add_edge(v, (v + 1) % len);
    }
    g.build().expect("cycle is well formed")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::is_cobuchi;

    fn always_f() -> ParityAutomaton {
        let mut a = ParityAutomaton::new(&["u"], &["F"], vec![0], 0).unwrap();
        a.set_transition(0, 1, TransitionFormula::cover(&[0]).or(Clause::Cover(vec![]))).unwrap();
        a
    }

    #[test]
    fn single_state_window_one() {
        let c = buchi_to_cobuchi(&always_f(), 1).unwrap();
        assert_eq!(c.window, 1);
        assert_eq!(c.lists, vec![vec![0]]);
        assert_eq!(c.automaton.priority(0), 2);
        assert!(is_cobuchi(&c.automaton));
        assert_eq!(c.automaton.delta(0, 1).clauses(), always_f().delta(0, 1).clauses());
    }

    #[test]
    fn rejects_bad_inputs() {
        let mut a = ParityAutomaton::new(&["u"], &["F"], vec![2], 0).unwrap();
        a.set_all_letters(0, TransitionFormula::cover(&[0])).unwrap();
        assert!(matches!(buchi_to_cobuchi(&a, 1), Err(CollapseError::NotBuchi)));
        let mut d = ParityAutomaton::new(&["u"], &["F"], vec![0], 0).unwrap();
        d.set_all_letters(0, TransitionFormula(vec![Clause::DiamondConj(vec![0])])).unwrap();
        assert!(matches!(buchi_to_cobuchi(&d, 1), Err(CollapseError::NotNormalized)));
        assert!(matches!(with_window(&always_f(), 0), Err(CollapseError::ZeroWindow)));
    }

    #[test]
    fn exact_for_always_f() {
        for k in 1..=3 {
            assert!(find_disagreement_outside_scck(&always_f(), k, 5).unwrap().is_none());
        }
    }

    #[test]
    fn short_window_breaks_alternation() {
        // f and n alternate on a single looped vertex; only windows of
        // length 2 always see f
        let mut b = ParityAutomaton::new(&["f", "n"], &["F"], vec![0, 1], 0).unwrap();
        b.set_all_letters(0, TransitionFormula::cover(&[1])).unwrap();
        b.set_all_letters(1, TransitionFormula::cover(&[0])).unwrap();
        let mut g = GraphBuilder::new(&["F"]);
        g.add_vertex(Color::EMPTY);
        g.add_edge(0, 0);
        let g = g.build().unwrap();
        assert!(accepts(&b, &g).unwrap());
        assert!(accepts(&buchi_to_cobuchi(&b, 1).unwrap().automaton, &g).unwrap());
        assert!(!accepts(&with_window(&b, 1).unwrap().automaton, &g).unwrap());
    }
}
