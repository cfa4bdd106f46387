//! Direct Kripke semantics by Knaster–Tarski iteration: `μ` climbs from the
//! empty set, `ν` descends from the full set, each until stable. Nested
//! fixpoints are recomputed from scratch on every outer step; this is the
//! trusted reference, not a fast checker.

use std::collections::BTreeSet;

use super::{Formula, FormulaError};
use crate::graph::{ColoredGraph, Vertex};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct EvalStats {
    /// Largest number of body evaluations any single fixpoint needed.
    pub max_iterations: usize,
}

pub fn evaluate(g: &ColoredGraph, s: &Formula) -> Result<BTreeSet<Vertex>, FormulaError> {
    evaluate_with_stats(g, s).map(|(set, _)| set)
}

pub fn satisfies(g: &ColoredGraph, s: &Formula) -> Result<bool, FormulaError> {
    Ok(evaluate(g, s)?.contains(&g.point()))
}

pub fn evaluate_with_stats(g: &ColoredGraph, s: &Formula) -> Result<(BTreeSet<Vertex>, EvalStats), FormulaError> {
    let free = s.free_variables();
    if !free.is_empty() {
        return Err(FormulaError::FreeVariables(free.into_iter().collect()));
    }
    for p in s.atoms() {
        if g.predicate_index(&p).is_none() {
            return Err(FormulaError::UndeclaredPredicate(p));
        }
    }
    let mut ev = Evaluator { g, env: Vec::new(), stats: EvalStats::default() };
    let mask = ev.eval(s);
    let set = mask.iter().enumerate().filter(|(_, &b)| b).map(|(v, _)| v).collect();
    Ok((set, ev.stats))
}

struct Evaluator<'a> {
    g: &'a ColoredGraph,
    env: Vec<(String, Vec<bool>)>,
    stats: EvalStats,
}

impl Evaluator<'_> {
    fn eval(&mut self, f: &Formula) -> Vec<bool> {
        let g = self.g;
        let n = g.vertex_count();
        match f {
            Formula::Var(x) => {
                self.env.iter().rev().find(|(name, _)| name == x).expect("free variables rejected upfront").1.clone()
            }
            Formula::Atom(p) => {
                let i = g.predicate_index(p).expect("predicates checked upfront");
                g.vertices().map(|v| g.color(v).contains(i)).collect()
            }
            Formula::NegAtom(p) => {
                let i = g.predicate_index(p).expect("predicates checked upfront");
                g.vertices().map(|v| !g.color(v).contains(i)).collect()
            }
            Formula::And(a, b) => {
                let (x, y) = (self.eval(a), self.eval(b));
                x.iter().zip(&y).map(|(p, q)| *p && *q).collect()
            }
            Formula::Or(a, b) => {
                let (x, y) = (self.eval(a), self.eval(b));
                x.iter().zip(&y).map(|(p, q)| *p || *q).collect()
            }
            Formula::Diamond(a) => {
                let x = self.eval(a);
                g.vertices().map(|v| g.successors(v).iter().any(|&w| x[w])).collect()
            }
            Formula::Box(a) => {
                let x = self.eval(a);
                g.vertices().map(|v| g.successors(v).iter().all(|&w| x[w])).collect()
            }
            Formula::Mu(x, body) | Formula::Nu(x, body) => {
                let least = matches!(f, Formula::Mu(..));
                let mut current = vec![!least; n];
                let mut iterations = 0;
                loop {
                    iterations += 1;
                    self.env.push((x.clone(), current.clone()));
                    let next = self.eval(body);
                    self.env.pop();
                    if next == current {
                        break;
                    }
                    current = next;
                }
                self.stats.max_iterations = self.stats.max_iterations.max(iterations);
                current
            }
        }
    }
}
