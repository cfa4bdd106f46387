#![allow(dead_code)]

use std::collections::HashMap;

use muscc::automata::{ParityAutomaton, TransitionFormula, Clause};
use muscc::game::{solve, ParityArena, Player};
use muscc::graph::{ColoredGraph, F};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

// ---------------------------------------------------------------------------
// Arenas

/// Every set of at most two moves among `n` positions.
pub fn move_sets(n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for a in 0..n {
        out.push(vec![a]);
        for b in a + 1..n {
            out.push(vec![a, b]);
        }
    }
    out
}

/// Calls `f` on every owner/priority labelling (priorities 0 and 1) of the
/// move structure `moves`.
pub fn for_each_labelling(moves: &[Vec<usize>], mut f: impl FnMut(&ParityArena)) {
    let n = moves.len();
    for owners in 0..1u32 << n {
        for prios in 0..1u32 << n {
            let owner = (0..n).map(|i| if owners & (1 << i) != 0 { Player::Odd } else { Player::Even }).collect();
            let priority = (0..n).map(|i| (prios >> i) & 1).collect();
            f(&ParityArena::new(owner, priority, moves.to_vec(), 0).unwrap());
        }
    }
}

/// Small arenas with at most two priorities and branching at most two:
/// every arena up to three positions, and every labelling of a fixed
/// sample of move structures for four and five positions.
pub fn arena_family(mut f: impl FnMut(&ParityArena)) -> usize {
    let mut count = 0;
    let mut g = |a: &ParityArena| {
        count += 1;
        f(a)
    };
    for n in 1..=3 {
        let sets = move_sets(n);
        let total = sets.len().pow(n as u32);
        for code in 0..total {
            let mut c = code;
            let moves: Vec<Vec<usize>> = (0..n)
                .map(|_| {
                    let m = sets[c % sets.len()].clone();
                    c /= sets.len();
                    m
                })
                .collect();
            for_each_labelling(&moves, &mut g);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for (n, structures) in [(4, 24), (5, 8)] {
        let sets = move_sets(n);
        for _ in 0..structures {
            let moves: Vec<Vec<usize>> = (0..n).map(|_| sets[rng.gen_range(0..sets.len())].clone()).collect();
            for_each_labelling(&moves, &mut g);
        }
    }
    count
}

// ---------------------------------------------------------------------------
// Explicit-marking acceptance

#[derive(Clone, PartialEq, Eq, Hash)]
enum Pos {
    At(usize, usize),
    /// Duplicator's committed obligations: (state, successor vertex) pairs.
    Chosen(usize, Vec<(usize, usize)>),
}

/// Acceptance by the textbook game, without intermediate positions.
/// Duplicator resolves a whole disjunct at once: for `Cover(S)` a marking of
/// the successors by nonempty subsets of `S` that uses every state of `S`,
/// for `DiamondConj(S)` a successor per state of `S`, for `BoxDisj(S)` a
/// state of `S` per successor. Spoiler then picks one obligation.
pub fn explicit_accepts(a: &ParityAutomaton, g: &ColoredGraph) -> bool {
    let letters = a.letters_of(g).unwrap();
    let mut ids: HashMap<Pos, usize> = HashMap::new();
    let mut nodes: Vec<Pos> = Vec::new();
    let mut id = |p: Pos, nodes: &mut Vec<Pos>| -> usize {
        *ids.entry(p.clone()).or_insert_with(|| {
            nodes.push(p);
            nodes.len() - 1
        })
    };
    let start = id(Pos::At(a.initial(), g.point()), &mut nodes);
    let (mut owner, mut priority, mut moves) = (vec![], vec![], vec![]);
    let mut next = 0;
    while next < nodes.len() {
        let p = nodes[next].clone();
        next += 1;
        match p {
            Pos::At(q, v) => {
                owner.push(Player::Even);
                priority.push(a.priority(q));
                let succ = g.successors(v);
                let mut out = Vec::new();
                for clause in a.delta(q, letters[v]).clauses() {
                    for mut pairs in obligations(clause, succ) {
                        pairs.sort_unstable();
                        pairs.dedup();
                        out.push(id(Pos::Chosen(q, pairs), &mut nodes));
                    }
                }
                moves.push(out);
            }
            Pos::Chosen(q, pairs) => {
                owner.push(Player::Odd);
                priority.push(a.priority(q));
                moves.push(pairs.iter().map(|&(r, w)| id(Pos::At(r, w), &mut nodes)).collect());
            }
        }
    }
    let arena = ParityArena::new(owner, priority, moves, start).unwrap();
    solve(&arena).winner[start] == Player::Even
}

/// All maps from `0..len` into `0..range`.
fn functions(len: usize, range: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..len {
        out = out.into_iter().flat_map(|f| (0..range).map(move |x| [f.clone(), vec![x]].concat())).collect();
    }
    out
}

fn obligations(clause: &Clause, succ: &[usize]) -> Vec<Vec<(usize, usize)>> {
    match clause {
        Clause::DiamondConj(s) => functions(s.len(), succ.len())
            .into_iter()
            .map(|f| s.iter().zip(f).map(|(&q, i)| (q, succ[i])).collect())
            .collect(),
        Clause::BoxDisj(s) => functions(succ.len(), s.len())
            .into_iter()
            .map(|f| succ.iter().zip(f).map(|(&w, i)| (s[i], w)).collect())
            .collect(),
        Clause::Cover(s) => {
            let subsets: Vec<Vec<usize>> = (1..1u32 << s.len())
                .map(|mask| (0..s.len()).filter(|i| mask & (1 << i) != 0).map(|i| s[i]).collect())
                .collect();
            functions(succ.len(), subsets.len())
                .into_iter()
                .filter(|f| s.iter().all(|q| f.iter().any(|&i| subsets[i].contains(q))))
                .map(|f| f.iter().zip(succ).flat_map(|(&i, &w)| subsets[i].iter().map(move |&q| (q, w))).collect())
                .collect()
        }
    }
}

// ---------------------------------------------------------------------------
// Fixture automata

fn accept_or_leaf(q: usize) -> TransitionFormula {
    TransitionFormula::cover(&[q]).or(Clause::Cover(vec![]))
}

/// One even state accepting everything.
pub fn accept_all() -> ParityAutomaton {
    let mut a = ParityAutomaton::new(&["q0"], &[F], vec![0], 0).unwrap();
    a.set_all_letters(0, accept_or_leaf(0)).unwrap();
    a
}

/// □*F: every reachable vertex is F.
pub fn always_f() -> ParityAutomaton {
    let mut a = ParityAutomaton::new(&["u"], &[F], vec![0], 0).unwrap();
    a.set_transition(0, 1, accept_or_leaf(0)).unwrap();
    a
}

/// Weak approximation of "F is reachable from every vertex": state a (odd)
/// waits on N vertices and hands over to f (even, accepts all) at an F
/// vertex; on N vertices it may also hand over to some successors.
pub fn f_reachable() -> ParityAutomaton {
    let mut a = ParityAutomaton::new(&["a", "f"], &[F], vec![1, 0], 0).unwrap();
    a.set_transition(0, 1, accept_or_leaf(1)).unwrap();
    a.set_transition(0, 0, TransitionFormula::cover(&[0]).or(Clause::Cover(vec![0, 1]))).unwrap();
    a.set_all_letters(1, accept_or_leaf(1)).unwrap();
    a
}

/// ◇*F with a diamond: Büchi, needs the extra accepting state once normalized.
pub fn eventually_f() -> ParityAutomaton {
    let mut a = ParityAutomaton::new(&["s"], &[F], vec![1], 0).unwrap();
    a.set_transition(0, 1, TransitionFormula(vec![Clause::DiamondConj(vec![]), Clause::Cover(vec![])])).unwrap();
    a.set_transition(0, 0, TransitionFormula(vec![Clause::DiamondConj(vec![0])])).unwrap();
    a
}

/// Infinitely many F on every branch, no dead ends.
pub fn inf_often_f() -> ParityAutomaton {
    let mut a = ParityAutomaton::new(&["n", "f"], &[F], vec![1, 0], 0).unwrap();
    for q in 0..2 {
        a.set_transition(q, 0, TransitionFormula::cover(&[0])).unwrap();
        a.set_transition(q, 1, TransitionFormula::cover(&[1])).unwrap();
    }
    a
}
