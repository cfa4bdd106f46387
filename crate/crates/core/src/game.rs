//! Finite min-parity games.
//!
//! Even wins an infinite play iff the least priority seen infinitely often
//! is even. A player who has to move from a position without moves loses.

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scc::tarjan;

pub type Position = usize;
pub type Priority = u32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Player {
    Even,
    Odd,
}

impl Player {
    pub fn opponent(self) -> Player {
        match self {
            Player::Even => Player::Odd,
            Player::Odd => Player::Even,
        }
    }

    /// The player favoured by a priority.
    pub fn of_priority(p: Priority) -> Player {
        if p % 2 == 0 {
            Player::Even
        } else {
            Player::Odd
        }
    }
}

#[derive(Debug, Error)]
pub enum GameError {
    #[error("arena has no positions")]
    Empty,
    #[error("move {from} -> {to} leaves the arena")]
    MoveOutOfRange { from: Position, to: Position },
    #[error("start position {0} is not in the arena")]
    StartOutOfRange(Position),
    #[error("brute force is limited to {bound} positions, arena has {size}")]
    TooLarge { size: usize, bound: usize },
    #[error("strategy picks {to} at {from}, which is not a legal move")]
    IllegalMove { from: Position, to: Position },
    #[error("position ids must be 0..{expected}, found {found}")]
    NonDenseIds { expected: usize, found: usize },
    #[error("invalid arena JSON: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParityArena {
    owner: Vec<Player>,
    priority: Vec<Priority>,
    moves: Vec<Vec<Position>>,
    start: Position,
}

impl ParityArena {
    pub fn new(
        owner: Vec<Player>,
        priority: Vec<Priority>,
        moves: Vec<Vec<Position>>,
        start: Position,
    ) -> Result<Self, GameError> {
        let n = owner.len();
        assert!(priority.len() == n && moves.len() == n, "arena vectors must have equal length");
        if n == 0 {
            return Err(GameError::Empty);
        }
        if start >= n {
            return Err(GameError::StartOutOfRange(start));
        }
        for (from, list) in moves.iter().enumerate() {
            if let Some(&to) = list.iter().find(|&&to| to >= n) {
                return Err(GameError::MoveOutOfRange { from, to });
            }
        }
        Ok(ParityArena { owner, priority, moves, start })
    }

    pub fn len(&self) -> usize {
        self.owner.len()
    }

    pub fn is_empty(&self) -> bool {
        self.owner.is_empty()
    }

    pub fn owner(&self, p: Position) -> Player {
        self.owner[p]
    }

    pub fn priority(&self, p: Position) -> Priority {
        self.priority[p]
    }

    pub fn moves(&self, p: Position) -> &[Position] {
        &self.moves[p]
    }

    pub fn start(&self) -> Position {
        self.start
    }
}

/// Choices of one player, defined on (some of) that player's positions.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PositionalStrategy {
    pub choices: BTreeMap<Position, Position>,
}

impl PositionalStrategy {
    pub fn get(&self, p: Position) -> Option<Position> {
        self.choices.get(&p).copied()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Solution {
    /// Winner of every position.
    pub winner: Vec<Player>,
    pub strategy_even: PositionalStrategy,
    pub strategy_odd: PositionalStrategy,
}

impl Solution {
    pub fn region(&self, player: Player) -> Vec<Position> {
        (0..self.winner.len()).filter(|&p| self.winner[p] == player).collect()
    }

    pub fn strategy(&self, player: Player) -> &PositionalStrategy {
        match player {
            Player::Even => &self.strategy_even,
            Player::Odd => &self.strategy_odd,
        }
    }
}

// ---------------------------------------------------------------------------
// Zielonka

/// Solves the game with Zielonka's recursive algorithm. Dead ends are first
/// redirected to one of two self-looping sinks (one won by each player) so
/// the recursion only ever sees games where every position can move.
pub fn solve(a: &ParityArena) -> Solution {
    let n = a.len();
    let even_sink = n;
    let odd_sink = n + 1;
    let total = n + 2;
    let mut owner = a.owner.clone();
    owner.extend([Player::Even, Player::Even]);
    let mut priority = a.priority.clone();
    priority.extend([0, 1]);
    let mut moves = a.moves.clone();
    for (p, list) in moves.iter_mut().enumerate() {
        if list.is_empty() {
            list.push(match a.owner[p] {
                Player::Even => odd_sink,
                Player::Odd => even_sink,
            });
        } else {
            list.sort_unstable();
            list.dedup();
        }
    }
    moves.push(vec![even_sink]);
    moves.push(vec![odd_sink]);
    let mut preds = vec![Vec::new(); total];
    for (p, list) in moves.iter().enumerate() {
        for &q in list {
            preds[q].push(p);
        }
    }

    let game = Total { owner, priority, moves, preds };
    let all = vec![true; total];
    let mut strategy = vec![usize::MAX; total];
    let winner = game.zielonka(&all, &mut strategy);

    let mut out = Solution {
        winner: winner[..n].to_vec(),
        strategy_even: PositionalStrategy::default(),
        strategy_odd: PositionalStrategy::default(),
    };
    for p in 0..n {
        let w = winner[p];
        if a.owner[p] != w || a.moves[p].is_empty() {
            continue;
        }
        let choice = strategy[p];
        debug_assert!(choice < n, "winning move never enters a sink from a position with moves");
        match w {
            Player::Even => out.strategy_even.choices.insert(p, choice),
            Player::Odd => out.strategy_odd.choices.insert(p, choice),
        };
    }
    out
}

struct Total {
    owner: Vec<Player>,
    priority: Vec<Priority>,
    moves: Vec<Vec<Position>>,
    preds: Vec<Vec<Position>>,
}

impl Total {
    /// Attractor of `target` for `player` inside `sub`. Attracted positions
    /// of `player` outside `target` get their attracting move in `strategy`.
    fn attractor(&self, sub: &[bool], player: Player, target: &[bool], strategy: &mut [usize]) -> Vec<bool> {
        let mut attr = target.to_vec();
        let mut remaining: Vec<usize> = (0..sub.len())
            .map(|p| if sub[p] { self.moves[p].iter().filter(|&&q| sub[q]).count() } else { 0 })
            .collect();
        let mut queue: Vec<Position> = (0..sub.len()).filter(|&p| attr[p]).collect();
        while let Some(q) = queue.pop() {
            for &p in &self.preds[q] {
                if !sub[p] || attr[p] {
                    continue;
                }
                if self.owner[p] == player {
                    attr[p] = true;
                    strategy[p] = q;
                    queue.push(p);
                } else {
                    remaining[p] -= 1;
                    if remaining[p] == 0 {
                        attr[p] = true;
                        queue.push(p);
                    }
                }
            }
        }
        attr
    }

    /// Winner on `sub` (entries outside `sub` are meaningless). Writes the
    /// winning moves of positions in `sub` into `strategy`.
    fn zielonka(&self, sub: &[bool], strategy: &mut [usize]) -> Vec<Player> {
        let mut winner = vec![Player::Even; sub.len()];
        let Some(d) = (0..sub.len()).filter(|&p| sub[p]).map(|p| self.priority[p]).min() else {
            return winner;
        };
        let alpha = Player::of_priority(d);
        let top: Vec<bool> = (0..sub.len()).map(|p| sub[p] && self.priority[p] == d).collect();
        let attr = self.attractor(sub, alpha, &top, strategy);
        let rest: Vec<bool> = (0..sub.len()).map(|p| sub[p] && !attr[p]).collect();
        let inner = self.zielonka(&rest, strategy);
        let opponent_wins: Vec<bool> = (0..sub.len()).map(|p| rest[p] && inner[p] != alpha).collect();

        if !opponent_wins.iter().any(|&b| b) {
            for p in (0..sub.len()).filter(|&p| sub[p]) {
                winner[p] = alpha;
                if top[p] && self.owner[p] == alpha {
                    strategy[p] = *self.moves[p].iter().find(|&&q| sub[q]).expect("subgames keep a move");
                }
            }
            return winner;
        }

        let beta = alpha.opponent();
        let attr_b = self.attractor(sub, beta, &opponent_wins, strategy);
        let rest_b: Vec<bool> = (0..sub.len()).map(|p| sub[p] && !attr_b[p]).collect();
        let second = self.zielonka(&rest_b, strategy);
        for p in (0..sub.len()).filter(|&p| sub[p]) {
            winner[p] = if attr_b[p] { beta } else { second[p] };
        }
        winner
    }
}

// ---------------------------------------------------------------------------
// Brute force

pub const DEFAULT_BRUTE_FORCE_BOUND: usize = 8;

/// Winner of every position, by enumerating Even's positional strategies
/// and checking each against all of Odd's positional strategies. Positional
/// determinacy makes this complete.
pub fn brute_force_solve(a: &ParityArena, bound: usize) -> Result<Vec<Player>, GameError> {
    let n = a.len();
    if n > bound {
        return Err(GameError::TooLarge { size: n, bound });
    }
    let choosers = |player: Player| -> Vec<Position> {
        (0..n).filter(|&p| a.owner[p] == player && !a.moves[p].is_empty()).collect()
    };
    let even_pos = choosers(Player::Even);
    let odd_pos = choosers(Player::Odd);
    let mut even_wins = vec![false; n];

    let mut even_choice = vec![0usize; n];
    loop {
        let mut survives = vec![true; n];
        let mut odd_choice = vec![0usize; n];
        loop {
            for (start, alive) in survives.iter_mut().enumerate() {
                if *alive && play_outcome(a, start, &even_choice, &odd_choice) == Player::Odd {
                    *alive = false;
                }
            }
            if !advance(&mut odd_choice, &odd_pos, a) {
                break;
            }
        }
        for p in 0..n {
            even_wins[p] |= survives[p];
        }
        if !advance(&mut even_choice, &even_pos, a) {
            break;
        }
    }
    Ok(even_wins.into_iter().map(|w| if w { Player::Even } else { Player::Odd }).collect())
}

/// Odometer over the move indices of `positions`.
fn advance(choice: &mut [usize], positions: &[Position], a: &ParityArena) -> bool {
    for &p in positions {
        choice[p] += 1;
        if choice[p] < a.moves[p].len() {
            return true;
        }
        choice[p] = 0;
    }
    false
}

/// Follows the unique play from `start` under both fixed strategies.
fn play_outcome(a: &ParityArena, start: Position, even: &[usize], odd: &[usize]) -> Player {
    let mut seen_at = vec![usize::MAX; a.len()];
    let mut trace = Vec::new();
    let mut p = start;
    loop {
        if seen_at[p] != usize::MAX {
            let least = trace[seen_at[p]..].iter().map(|&q| a.priority[q]).min().expect("cycle is nonempty");
            return Player::of_priority(least);
        }
        if a.moves[p].is_empty() {
            return a.owner[p].opponent();
        }
        seen_at[p] = trace.len();
        trace.push(p);
        let idx = match a.owner[p] {
            Player::Even => even[p],
            Player::Odd => odd[p],
        };
        p = a.moves[p][idx];
    }
}

// ---------------------------------------------------------------------------
// Strategy verification

/// Checks that `s` wins for `player` from every position of `region`: in the
/// graph where `player`'s moves are fixed by `s` and the opponent keeps all
/// moves, no reachable cycle has a least priority of the opponent's parity,
/// and no reachable position leaves `player` without a move.
pub fn verify_strategy(
    a: &ParityArena,
    s: &PositionalStrategy,
    player: Player,
    region: &[Position],
) -> Result<bool, GameError> {
    for (&from, &to) in &s.choices {
        if from >= a.len() || !a.moves[from].contains(&to) {
            return Err(GameError::IllegalMove { from, to });
        }
    }
    let n = a.len();
    let mut restricted: Vec<Vec<Position>> = vec![Vec::new(); n];
    let mut reached = vec![false; n];
    let mut stack: Vec<Position> = region.to_vec();
    for &p in region {
        reached[p] = true;
    }
    while let Some(p) = stack.pop() {
        let next: Vec<Position> = if a.owner[p] == player {
            if a.moves[p].is_empty() {
                return Ok(false);
            }
            match s.get(p) {
                Some(q) => vec![q],
                None => return Ok(false),
            }
        } else {
            a.moves[p].clone()
        };
        for &q in &next {
            if !reached[q] {
                reached[q] = true;
                stack.push(q);
            }
        }
        restricted[p] = next;
    }

    let bad_parity = player.opponent();
    let mut bad_priorities: Vec<Priority> = (0..n)
        .filter(|&p| reached[p] && Player::of_priority(a.priority[p]) == bad_parity)
        .map(|p| a.priority[p])
        .collect();
    bad_priorities.sort_unstable();
    bad_priorities.dedup();
    for bad in bad_priorities {
        // cycles staying at priorities >= bad and passing through `bad`
        let sub: Vec<Vec<Position>> = (0..n)
            .map(|p| {
                if reached[p] && a.priority[p] >= bad {
                    restricted[p].iter().copied().filter(|&q| a.priority[q] >= bad).collect()
                } else {
                    Vec::new()
                }
            })
            .collect();
        for comp in tarjan(n, |p| &sub[p]) {
            let cyclic = comp.len() > 1 || sub[comp[0]].contains(&comp[0]);
            if cyclic && comp.iter().any(|&p| a.priority[p] == bad) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

// ---------------------------------------------------------------------------
// Random arenas and JSON

/// Random arena with `1..=max_positions` positions, priorities below
/// `priorities` and out-degree at most `max_branching` (possibly zero).
pub fn random_arena<R: Rng>(rng: &mut R, max_positions: usize, priorities: Priority, max_branching: usize) -> ParityArena {
    let n = rng.gen_range(1..=max_positions);
    let owner = (0..n).map(|_| if rng.gen_bool(0.5) { Player::Even } else { Player::Odd }).collect();
    let priority = (0..n).map(|_| rng.gen_range(0..priorities)).collect();
    let moves = (0..n)
        .map(|_| {
            let k = rng.gen_range(0..=max_branching);
            let mut list: Vec<Position> = (0..k).map(|_| rng.gen_range(0..n)).collect();
            list.sort_unstable();
            list.dedup();
            list
        })
        .collect();
    ParityArena::new(owner, priority, moves, 0).expect("generated arena is well formed")
}

#[derive(Serialize, Deserialize)]
struct PositionEntry {
    id: Position,
    owner: Player,
    priority: Priority,
    moves: Vec<Position>,
}

#[derive(Serialize, Deserialize)]
struct ArenaFile {
    positions: Vec<PositionEntry>,
    start: Position,
}

impl ParityArena {
    pub fn to_json(&self) -> String {
        let file = ArenaFile {
            positions: (0..self.len())
                .map(|p| PositionEntry {
                    id: p,
                    owner: self.owner[p],
                    priority: self.priority[p],
                    moves: self.moves[p].clone(),
                })
                .collect(),
            start: self.start,
        };
        serde_json::to_string_pretty(&file).expect("arena serialization cannot fail")
    }

    /// Positions may be listed in any order but their ids must be `0..n`.
    pub fn from_json(text: &str) -> Result<Self, GameError> {
        let mut file: ArenaFile = serde_json::from_str(text)?;
        file.positions.sort_by_key(|e| e.id);
        let n = file.positions.len();
        if let Some(e) = file.positions.iter().enumerate().find_map(|(i, e)| (e.id != i).then_some(e)) {
            return Err(GameError::NonDenseIds { expected: n, found: e.id });
        }
        let owner = file.positions.iter().map(|e| e.owner).collect();
        let priority = file.positions.iter().map(|e| e.priority).collect();
        let moves = file.positions.into_iter().map(|e| e.moves).collect();
        ParityArena::new(owner, priority, moves, file.start)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn arena(owner: &[Player], priority: &[Priority], moves: &[&[Position]]) -> ParityArena {
        ParityArena::new(owner.to_vec(), priority.to_vec(), moves.iter().map(|m| m.to_vec()).collect(), 0).unwrap()
    }

    #[test]
    fn even_self_loop_priority_zero() {
        let a = arena(&[Player::Even], &[0], &[&[0]]);
        let s = solve(&a);
        assert_eq!(s.winner, vec![Player::Even]);
        assert_eq!(s.strategy_even.get(0), Some(0));
    }

    #[test]
    fn stuck_owner_loses() {
        let a = arena(&[Player::Odd], &[1], &[&[]]);
        assert_eq!(solve(&a).winner, vec![Player::Even]);
        let a = arena(&[Player::Even], &[0], &[&[]]);
        assert_eq!(solve(&a).winner, vec![Player::Odd]);
        assert_eq!(brute_force_solve(&a, 8).unwrap(), vec![Player::Odd]);
    }

    #[test]
    fn two_cycle_min_priority_decides() {
        let a = arena(&[Player::Even, Player::Odd], &[1, 2], &[&[1], &[0]]);
        assert_eq!(solve(&a).winner, vec![Player::Odd, Player::Odd]);
        assert_eq!(brute_force_solve(&a, 8).unwrap(), vec![Player::Odd, Player::Odd]);
    }

    #[test]
    fn single_loop_parity() {
        for p in 0..4 {
            for owner in [Player::Even, Player::Odd] {
                let a = arena(&[owner], &[p], &[&[0]]);
                let expected = Player::of_priority(p);
                assert_eq!(solve(&a).winner, vec![expected]);
                assert_eq!(brute_force_solve(&a, 8).unwrap(), vec![expected]);
            }
        }
    }

    #[test]
    fn corrupted_strategy_fails() {
        // Even at 0 may go to 1 (loop with priority 0) or 2 (loop with priority 1)
        let a = arena(&[Player::Even, Player::Even, Player::Even], &[2, 0, 1], &[&[1, 2], &[1], &[2]]);
        let s = solve(&a);
        assert_eq!(s.winner[0], Player::Even);
        assert!(verify_strategy(&a, &s.strategy_even, Player::Even, &[0]).unwrap());
        let mut bad = s.strategy_even.clone();
        bad.choices.insert(0, 2);
        assert!(!verify_strategy(&a, &bad, Player::Even, &[0]).unwrap());
        bad.choices.insert(0, 0);
        assert!(matches!(verify_strategy(&a, &bad, Player::Even, &[0]), Err(GameError::IllegalMove { .. })));
        assert!(verify_strategy(&a, &PositionalStrategy::default(), Player::Odd, &[]).unwrap());
    }

    #[test]
    fn brute_force_bound() {
        let a = arena(&[Player::Even; 3], &[0; 3], &[&[0], &[1], &[2]]);
        assert!(matches!(brute_force_solve(&a, 2), Err(GameError::TooLarge { .. })));
    }

    #[test]
    fn json_round_trip() {
        let a = arena(&[Player::Even, Player::Odd], &[1, 2], &[&[1], &[0, 1]]);
        let back = ParityArena::from_json(&a.to_json()).unwrap();
        assert_eq!(back, a);
    }
}
