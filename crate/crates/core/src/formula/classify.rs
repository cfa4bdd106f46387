//! Syntactic position in the fixpoint alternation hierarchy.
//!
//! For every formula we compute the least `s` with the formula in the
//! syntactic `Σ_s` and the least `p` with it in `Π_p`. Boolean and modal
//! operators take componentwise maxima. At a binder `σX.φ` the body is first
//! split by composition: every maximal subformula that mentions none of the
//! variables bound inside `σX.φ` (including `X`) is classified on its own and
//! replaced by an atom. What remains genuinely depends on the binder, so a
//! `μ` skeleton sits at `Σ_max(1,s)` and one level higher on the `Π` side
//! (dually for `ν`). This is an upper bound on the semantic level.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use super::Formula;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum HierarchyKind {
    Sigma,
    Pi,
    Delta,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct HierarchyLevel {
    pub kind: HierarchyKind,
    /// Alternation depth: the least `n` with the formula in `Σ_n ∪ Π_n`.
    pub index: usize,
    pub sigma: usize,
    pub pi: usize,
}

impl HierarchyLevel {
    fn from_pair(sigma: usize, pi: usize) -> Self {
        let (kind, index) = match sigma.cmp(&pi) {
            std::cmp::Ordering::Less => (HierarchyKind::Sigma, sigma),
            std::cmp::Ordering::Greater => (HierarchyKind::Pi, pi),
            std::cmp::Ordering::Equal => (HierarchyKind::Delta, sigma),
        };
        HierarchyLevel { kind, index, sigma, pi }
    }
}

impl fmt::Display for HierarchyLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            HierarchyKind::Sigma => write!(f, "Sigma{}", self.index),
            HierarchyKind::Pi => write!(f, "Pi{}", self.index),
            HierarchyKind::Delta => write!(f, "Delta{}", self.index),
        }
    }
}

pub fn classify(s: &Formula) -> HierarchyLevel {
    let (sigma, pi) = levels(s);
    HierarchyLevel::from_pair(sigma, pi)
}

fn levels(f: &Formula) -> (usize, usize) {
    match f {
        Formula::Var(_) | Formula::Atom(_) | Formula::NegAtom(_) => (0, 0),
        Formula::And(a, b) | Formula::Or(a, b) => {
            let (sa, pa) = levels(a);
            let (sb, pb) = levels(b);
            (sa.max(sb), pa.max(pb))
        }
        Formula::Diamond(a) | Formula::Box(a) => levels(a),
        Formula::Mu(..) | Formula::Nu(..) => {
            let mut bound = BTreeSet::new();
            collect_binders(f, &mut bound);
            let mut extracted = Vec::new();
            let body = match f {
                Formula::Mu(_, b) | Formula::Nu(_, b) => b,
                _ => unreachable!(),
            };
            let skeleton = extract(body, &bound, &mut extracted);
            let (ss, sp) = levels(&skeleton);
            let (mut sigma, mut pi) = if matches!(f, Formula::Mu(..)) {
                let s = ss.max(1);
                (s, s + 1)
            } else {
                let p = sp.max(1);
                (p + 1, p)
            };
            for sub in &extracted {
                let (es, ep) = levels(sub);
                sigma = sigma.max(es);
                pi = pi.max(ep);
            }
            (sigma, pi)
        }
    }
}

fn collect_binders(f: &Formula, out: &mut BTreeSet<String>) {
    match f {
        Formula::Var(_) | Formula::Atom(_) | Formula::NegAtom(_) => {}
        Formula::And(a, b) | Formula::Or(a, b) => {
            collect_binders(a, out);
            collect_binders(b, out);
        }
        Formula::Diamond(a) | Formula::Box(a) => collect_binders(a, out),
        Formula::Mu(x, a) | Formula::Nu(x, a) => {
            out.insert(x.clone());
            collect_binders(a, out);
        }
    }
}

/// Replaces maximal fixpoint-carrying subformulas that are closed with
/// respect to `bound` by placeholder atoms, pushing them to `out`.
fn extract(f: &Formula, bound: &BTreeSet<String>, out: &mut Vec<Formula>) -> Formula {
    if f.has_fixpoint() && f.free_variables().is_disjoint(bound) {
        out.push(f.clone());
        return Formula::Atom(format!("#{}", out.len()));
    }
    match f {
        Formula::Var(_) | Formula::Atom(_) | Formula::NegAtom(_) => f.clone(),
        Formula::And(a, b) => Formula::and(extract(a, bound, out), extract(b, bound, out)),
        Formula::Or(a, b) => Formula::or(extract(a, bound, out), extract(b, bound, out)),
        Formula::Diamond(a) => Formula::diamond(extract(a, bound, out)),
        Formula::Box(a) => Formula::boxed(extract(a, bound, out)),
        Formula::Mu(x, a) => Formula::Mu(x.clone(), Box::new(extract(a, bound, out))),
        Formula::Nu(x, a) => Formula::Nu(x.clone(), Box::new(extract(a, bound, out))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{negate, parse};

    fn level(text: &str) -> String {
        classify(&parse(text).unwrap()).to_string()
    }

    #[test]
    fn fixpoint_free_is_level_zero() {
        let l = classify(&parse("P & <> P").unwrap());
        assert_eq!(l.index, 0);
        assert_eq!(l.kind, HierarchyKind::Delta);
    }

    #[test]
    fn single_fixpoints() {
        assert_eq!(level("nu X. P & [] X"), "Pi1");
        assert_eq!(level("G P"), "Pi1");
        assert_eq!(level("F P"), "Sigma1");
    }

    #[test]
    fn genuine_alternation() {
        assert_eq!(level("nu X. mu Y. (P & <> X) | <> Y"), "Pi2");
        assert_eq!(level("mu X. nu Y. (P | <> X) & [] Y"), "Sigma2");
    }

    #[test]
    fn composition_is_not_alternation() {
        // ◇*(□*P): the inner ν does not mention X
        assert_eq!(level("F G P"), "Delta2");
        assert_eq!(level("G F P"), "Delta2");
        assert_eq!(level("mu X. <> X | mu Y. P | <> Y"), "Sigma1");
    }

    #[test]
    fn negation_swaps_sides() {
        for text in ["nu X. mu Y. (P & <> X) | <> Y", "G P", "F G P", "P & <> P", "mu X. nu Y. (P | <> X) & [] Y"] {
            let s = parse(text).unwrap();
            let a = classify(&s);
            let b = classify(&negate(&s).unwrap());
            assert_eq!((a.sigma, a.pi), (b.pi, b.sigma), "{text}");
        }
    }
}
