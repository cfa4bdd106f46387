//! The acceptance game of a cover automaton on a pointed graph, as a parity
//! arena.
//!
//! Duplicator (Even) sits at `(q, v)` and picks a disjunct `Cover(S)` of
//! `δ(q, color(v))`. Spoiler (Odd) then challenges either an obligation
//! `q_i ∈ S`, for which Duplicator names a successor carrying it, or a
//! successor `w`, for which Duplicator names a state of `S` to carry there.
//! This is the marking move split into two halves, so markings never have to
//! be enumerated. Every intermediate position inherits `Ω(q)`, so a round
//! contributes exactly the priority of its source state.

use std::collections::HashMap;

use super::{AutomatonError, Letter, ParityAutomaton, State};
use crate::game::{solve, ParityArena, Player, Position, Solution};
use crate::graph::{ColoredGraph, GraphBuilder, GraphError, Vertex, MAX_UNFOLDING};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ArenaNode {
    /// Duplicator picks a disjunct.
    State { q: State, v: Vertex },
    /// Spoiler picks a challenge against disjunct `d`.
    Choice { q: State, v: Vertex, d: usize },
    /// Duplicator picks a successor for the `i`-th state of the disjunct.
    Dia { q: State, v: Vertex, d: usize, i: usize },
    /// Duplicator picks a state of the disjunct for successor `w`.
    Box { q: State, v: Vertex, d: usize, w: Vertex },
}

#[derive(Clone, Debug)]
pub struct AcceptanceArena {
    arena: ParityArena,
    nodes: Vec<ArenaNode>,
    index: HashMap<ArenaNode, Position>,
}

impl AcceptanceArena {
    pub fn arena(&self) -> &ParityArena {
        &self.arena
    }

    pub fn node(&self, p: Position) -> ArenaNode {
        self.nodes[p]
    }

    pub fn position(&self, node: ArenaNode) -> Option<Position> {
        self.index.get(&node).copied()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

pub fn acceptance_arena(a: &ParityAutomaton, g: &ColoredGraph) -> Result<AcceptanceArena, AutomatonError> {
    acceptance_arena_from(a, a.initial(), g)
}

/// Arena for `(A, q)` on `g`, restricted to positions reachable from
/// `(q, point)`.
pub fn acceptance_arena_from(a: &ParityAutomaton, q: State, g: &ColoredGraph) -> Result<AcceptanceArena, AutomatonError> {
    if !a.is_cover_only() {
        return Err(AutomatonError::NotNormalized);
    }
    if q >= a.state_count() {
        return Err(AutomatonError::UnknownState(q));
    }
    let letters = a.letters_of(g)?;
    Ok(Builder::new(a, g, &letters).run(ArenaNode::State { q, v: g.point() }))
}

struct Builder<'a> {
    a: &'a ParityAutomaton,
    g: &'a ColoredGraph,
    letters: &'a [Letter],
    nodes: Vec<ArenaNode>,
    index: HashMap<ArenaNode, Position>,
}

impl<'a> Builder<'a> {
    fn new(a: &'a ParityAutomaton, g: &'a ColoredGraph, letters: &'a [Letter]) -> Self {
        Builder { a, g, letters, nodes: Vec::new(), index: HashMap::new() }
    }

    fn id(&mut self, node: ArenaNode) -> Position {
        if let Some(&p) = self.index.get(&node) {
            return p;
        }
        let p = self.nodes.len();
        self.nodes.push(node);
        self.index.insert(node, p);
        p
    }

    fn clause(&self, q: State, v: Vertex, d: usize) -> &'a [State] {
        self.a.delta(q, self.letters[v]).clauses()[d].states()
    }

    fn run(mut self, start: ArenaNode) -> AcceptanceArena {
        let start = self.id(start);
        let (mut owner, mut priority, mut moves) = (Vec::new(), Vec::new(), Vec::new());
        let mut next = 0;
        while next < self.nodes.len() {
            let node = self.nodes[next];
            next += 1;
            let (who, q, targets): (Player, State, Vec<ArenaNode>) = match node {
                ArenaNode::State { q, v } => {
                    let count = self.a.delta(q, self.letters[v]).clauses().len();
                    (Player::Even, q, (0..count).map(|d| ArenaNode::Choice { q, v, d }).collect())
                }
                ArenaNode::Choice { q, v, d } => {
                    let s = self.clause(q, v, d);
                    let mut t: Vec<ArenaNode> = (0..s.len()).map(|i| ArenaNode::Dia { q, v, d, i }).collect();
                    t.extend(self.g.successors(v).iter().map(|&w| ArenaNode::Box { q, v, d, w }));
                    (Player::Odd, q, t)
                }
                ArenaNode::Dia { q, v, d, i } => {
                    let r = self.clause(q, v, d)[i];
                    (Player::Even, q, self.g.successors(v).iter().map(|&w| ArenaNode::State { q: r, v: w }).collect())
                }
                ArenaNode::Box { q, v, d, w } => {
                    let s = self.clause(q, v, d);
                    (Player::Even, q, s.iter().map(|&r| ArenaNode::State { q: r, v: w }).collect())
                }
            };
            owner.push(who);
            priority.push(self.a.priority(q));
            moves.push(targets.into_iter().map(|t| self.id(t)).collect());
        }
        let arena = ParityArena::new(owner, priority, moves, start).expect("builder only emits known positions");
        AcceptanceArena { arena, nodes: self.nodes, index: self.index }
    }
}

/// Normalizes `a` if needed, then decides the acceptance game.
pub fn accepts(a: &ParityAutomaton, g: &ColoredGraph) -> Result<bool, AutomatonError> {
    accepts_from(a, a.initial(), g)
}

pub fn accepts_from(a: &ParityAutomaton, q: State, g: &ColoredGraph) -> Result<bool, AutomatonError> {
    let normalized;
    let a = if a.is_cover_only() {
        a
    } else {
        normalized = super::normalize_to_covers(a);
        &normalized
    };
    let game = acceptance_arena_from(a, q, g)?;
    let s = solve(game.arena());
    Ok(s.winner[game.arena().start()] == Player::Even)
}

// ---------------------------------------------------------------------------
// Strategy trees

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Label {
    pub state: State,
    pub vertex: Vertex,
}

/// The finite graph of labels visited by Duplicator's positional winning
/// strategy. Its unfolding from `root` is the strategy tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrategyGraph {
    pub labels: Vec<Label>,
    pub children: Vec<Vec<usize>>,
    pub root: usize,
}

impl StrategyGraph {
    pub fn find(&self, label: Label) -> Option<usize> {
        self.labels.iter().position(|&l| l == label)
    }

    /// Labels at vertex `v`.
    pub fn states_at(&self, v: Vertex) -> Vec<State> {
        let mut s: Vec<State> = self.labels.iter().filter(|l| l.vertex == v).map(|l| l.state).collect();
        s.sort_unstable();
        s
    }

    /// Labels as vertices, colored like their vertex in `g`.
    pub fn projection(&self, g: &ColoredGraph) -> Result<ColoredGraph, GraphError> {
        let mut b = GraphBuilder::new(g.predicates());
        for l in &self.labels {
            b.add_vertex(g.color(l.vertex));
        }
        for (i, cs) in self.children.iter().enumerate() {
            for &c in cs {
                b.add_edge(i, c);
            }
        }
        b.set_point(self.root);
        b.build()
    }

    /// Shortest label path from the root to `target`, both included.
    pub fn path_to(&self, target: usize) -> Option<Vec<usize>> {
        let mut parent = vec![usize::MAX; self.labels.len()];
        parent[self.root] = self.root;
        let mut queue = std::collections::VecDeque::from([self.root]);
        while let Some(x) = queue.pop_front() {
            if x == target {
                let mut path = vec![x];
                let mut y = x;
                while y != self.root {
                    y = parent[y];
                    path.push(y);
                }
                path.reverse();
                return Some(path);
            }
            for &c in &self.children[x] {
                if parent[c] == usize::MAX {
                    parent[c] = x;
                    queue.push_back(c);
                }
            }
        }
        None
    }
}

fn winning_solution(a: &ParityAutomaton, g: &ColoredGraph) -> Result<(AcceptanceArena, Solution), AutomatonError> {
    let game = acceptance_arena(a, g)?;
    let s = solve(game.arena());
    if s.winner[game.arena().start()] != Player::Even {
        return Err(AutomatonError::Rejected);
    }
    Ok((game, s))
}

/// Labels reachable under the winning strategy of the solver. The automaton
/// must be cover-normalized.
pub fn strategy_graph(a: &ParityAutomaton, g: &ColoredGraph) -> Result<StrategyGraph, AutomatonError> {
    let (game, sol) = winning_solution(a, g)?;
    let choose = |p: Position| sol.strategy_even.get(p);
    let mut ids: HashMap<Label, usize> = HashMap::new();
    let mut labels = Vec::new();
    let mut children = Vec::new();
    let root = Label { state: a.initial(), vertex: g.point() };
    ids.insert(root, 0);
    labels.push(root);
    let mut next = 0;
    while next < labels.len() {
        let Label { state: q, vertex: v } = labels[next];
        next += 1;
        let here = game.position(ArenaNode::State { q, v }).expect("reachable label has a position");
        let mut kids: Vec<Label> = Vec::new();
        if let Some(choice) = choose(here) {
            for &challenge in game.arena().moves(choice) {
                let target = choose(challenge).expect("winning strategy answers every challenge");
                match game.node(target) {
                    ArenaNode::State { q, v } => kids.push(Label { state: q, vertex: v }),
                    other => unreachable!("challenge answered with {other:?}"),
                }
            }
        }
        kids.sort_unstable();
        kids.dedup();
        let mut list = Vec::with_capacity(kids.len());
        for k in kids {
            let id = *ids.entry(k).or_insert_with(|| {
                labels.push(k);
                labels.len() - 1
            });
            list.push(id);
        }
        children.push(list);
    }
    Ok(StrategyGraph { labels, children, root: 0 })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeNode {
    pub label: Label,
    pub parent: Option<usize>,
    pub depth: usize,
    pub children: Vec<usize>,
}

/// Strategy tree truncated at a depth; node 0 is the root.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrategyTree {
    pub nodes: Vec<TreeNode>,
}

impl StrategyTree {
    pub fn root(&self) -> &TreeNode {
        &self.nodes[0]
    }
}

pub fn strategy_tree(a: &ParityAutomaton, g: &ColoredGraph, depth_bound: usize) -> Result<StrategyTree, AutomatonError> {
    let sg = strategy_graph(a, g)?;
    let mut nodes = vec![TreeNode { label: sg.labels[sg.root], parent: None, depth: 0, children: Vec::new() }];
    let mut origin = vec![sg.root];
    let mut next = 0;
    while next < nodes.len() {
        let x = next;
        next += 1;
        if nodes[x].depth >= depth_bound {
            continue;
        }
        for &c in &sg.children[origin[x]] {
            if nodes.len() >= MAX_UNFOLDING {
                return Err(GraphError::UnfoldingTooLarge.into());
            }
            let id = nodes.len();
            nodes.push(TreeNode { label: sg.labels[c], parent: Some(x), depth: nodes[x].depth + 1, children: Vec::new() });
            origin.push(c);
            nodes[x].children.push(id);
        }
    }
    Ok(StrategyTree { nodes })
}
