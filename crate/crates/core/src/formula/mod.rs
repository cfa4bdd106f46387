//! Modal μ-calculus formulas in negation normal form.
//!
//! Negation only ever appears on atoms. Parsed formulas are alpha-renamed so
//! that every binder introduces a name distinct from all other binders and
//! from every atom and free variable; [`Formula::rename_bound`] restores that
//! invariant for hand-built trees.

mod classify;
mod eval;
mod parser;

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

pub use classify::{classify, HierarchyKind, HierarchyLevel};
pub use eval::{evaluate, evaluate_with_stats, satisfies, EvalStats};
pub use parser::{parse, ParseError};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    Var(String),
    Atom(String),
    NegAtom(String),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Diamond(Box<Formula>),
    Box(Box<Formula>),
    Mu(String, Box<Formula>),
    Nu(String, Box<Formula>),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FormulaError {
    #[error("formula has free fixpoint variables: {0:?}")]
    FreeVariables(Vec<String>),
    #[error("substitution is not free: `{var}` would be captured by a binder around `{atom}`")]
    Capture { atom: String, var: String },
    #[error("predicate `{0}` is not declared by the graph")]
    UndeclaredPredicate(String),
}

impl Formula {
    pub fn atom(name: &str) -> Formula {
        Formula::Atom(name.to_string())
    }

    pub fn neg_atom(name: &str) -> Formula {
        Formula::NegAtom(name.to_string())
    }

    pub fn var(name: &str) -> Formula {
        Formula::Var(name.to_string())
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn diamond(a: Formula) -> Formula {
        Formula::Diamond(Box::new(a))
    }

    pub fn boxed(a: Formula) -> Formula {
        Formula::Box(Box::new(a))
    }

    pub fn mu(x: &str, body: Formula) -> Formula {
        Formula::Mu(x.to_string(), Box::new(body))
    }

    pub fn nu(x: &str, body: Formula) -> Formula {
        Formula::Nu(x.to_string(), Box::new(body))
    }

    /// `□*φ = νX.(φ ∧ □X)`, with `X` fresh for `φ`.
    pub fn always(phi: Formula) -> Formula {
        let x = phi.fresh_name("X");
        Formula::nu(&x, Formula::and(phi, Formula::boxed(Formula::var(&x)))).rename_bound()
    }

    /// `◇*φ = μX.(φ ∨ ◇X)`, with `X` fresh for `φ`.
    pub fn eventually(phi: Formula) -> Formula {
        let x = phi.fresh_name("X");
        Formula::mu(&x, Formula::or(phi, Formula::diamond(Formula::var(&x)))).rename_bound()
    }

    fn fresh_name(&self, base: &str) -> String {
        let taken = self.all_names();
        let mut candidate = base.to_string();
        let mut i = 1;
        while taken.contains(&candidate) {
            candidate = format!("{base}{i}");
            i += 1;
        }
        candidate
    }

    fn all_names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| match f {
            Formula::Var(x) | Formula::Atom(x) | Formula::NegAtom(x) | Formula::Mu(x, _) | Formula::Nu(x, _) => {
                out.insert(x.clone());
            }
            _ => {}
        });
        out
    }

    fn visit<'a>(&'a self, f: &mut impl FnMut(&'a Formula)) {
        f(self);
        match self {
            Formula::And(a, b) | Formula::Or(a, b) => {
                a.visit(f);
                b.visit(f);
            }
            Formula::Diamond(a) | Formula::Box(a) | Formula::Mu(_, a) | Formula::Nu(_, a) => a.visit(f),
            Formula::Var(_) | Formula::Atom(_) | Formula::NegAtom(_) => {}
        }
    }

    pub fn free_variables(&self) -> BTreeSet<String> {
        fn go(f: &Formula, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
            match f {
                Formula::Var(x) => {
                    if !bound.contains(x) {
                        out.insert(x.clone());
                    }
                }
                Formula::Atom(_) | Formula::NegAtom(_) => {}
                Formula::And(a, b) | Formula::Or(a, b) => {
                    go(a, bound, out);
                    go(b, bound, out);
                }
                Formula::Diamond(a) | Formula::Box(a) => go(a, bound, out),
                Formula::Mu(x, a) | Formula::Nu(x, a) => {
                    bound.push(x.clone());
                    go(a, bound, out);
                    bound.pop();
                }
            }
        }
        let mut out = BTreeSet::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }

    pub fn is_sentence(&self) -> bool {
        self.free_variables().is_empty()
    }

    pub fn atoms(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| {
            if let Formula::Atom(p) | Formula::NegAtom(p) = f {
                out.insert(p.clone());
            }
        });
        out
    }

    pub fn has_fixpoint(&self) -> bool {
        let mut found = false;
        self.visit(&mut |f| found |= matches!(f, Formula::Mu(..) | Formula::Nu(..)));
        found
    }

    /// Alpha-renames binders so each has a name distinct from every other
    /// binder, atom and free variable. A binder keeps its name when that is
    /// already the case, so the operation is idempotent.
    pub fn rename_bound(&self) -> Formula {
        let mut taken = self.atoms();
        taken.extend(self.free_variables());
        fn go(f: &Formula, env: &mut Vec<(String, String)>, taken: &mut BTreeSet<String>) -> Formula {
            match f {
                Formula::Var(x) => {
                    let renamed = env.iter().rev().find(|(old, _)| old == x).map(|(_, new)| new.clone());
                    Formula::Var(renamed.unwrap_or_else(|| x.clone()))
                }
                Formula::Atom(_) | Formula::NegAtom(_) => f.clone(),
                Formula::And(a, b) => Formula::and(go(a, env, taken), go(b, env, taken)),
                Formula::Or(a, b) => Formula::or(go(a, env, taken), go(b, env, taken)),
                Formula::Diamond(a) => Formula::diamond(go(a, env, taken)),
                Formula::Box(a) => Formula::boxed(go(a, env, taken)),
                Formula::Mu(x, a) | Formula::Nu(x, a) => {
                    let base = if x.starts_with('#') { "X" } else { x.as_str() };
                    let mut name = base.to_string();
                    let mut i = 1;
                    while taken.contains(&name) {
                        name = format!("{base}{i}");
                        i += 1;
                    }
                    taken.insert(name.clone());
                    env.push((x.clone(), name.clone()));
                    let body = go(a, env, taken);
                    env.pop();
                    match f {
                        Formula::Mu(..) => Formula::Mu(name, Box::new(body)),
                        _ => Formula::Nu(name, Box::new(body)),
                    }
                }
            }
        }
        go(self, &mut Vec::new(), &mut taken)
    }
}

/// De Morgan dual of a sentence: `∧/∨`, `◇/□`, `μ/ν` swapped, atoms negated,
/// variables untouched (`¬μX.φ(X) = νX.¬φ(¬X)`).
pub fn negate(s: &Formula) -> Result<Formula, FormulaError> {
    let free = s.free_variables();
    if !free.is_empty() {
        return Err(FormulaError::FreeVariables(free.into_iter().collect()));
    }
    Ok(dual(s))
}

fn dual(f: &Formula) -> Formula {
    match f {
        Formula::Var(x) => Formula::Var(x.clone()),
        Formula::Atom(p) => Formula::NegAtom(p.clone()),
        Formula::NegAtom(p) => Formula::Atom(p.clone()),
        Formula::And(a, b) => Formula::or(dual(a), dual(b)),
        Formula::Or(a, b) => Formula::and(dual(a), dual(b)),
        Formula::Diamond(a) => Formula::boxed(dual(a)),
        Formula::Box(a) => Formula::diamond(dual(a)),
        Formula::Mu(x, a) => Formula::Nu(x.clone(), Box::new(dual(a))),
        Formula::Nu(x, a) => Formula::Mu(x.clone(), Box::new(dual(a))),
    }
}

/// Substitutes `inner` for the atom `atom` in `outer`. Negated occurrences
/// `¬atom` receive the dual of `inner`, which then has to be a sentence.
/// Fails if a free variable of `inner` would be captured by a binder of
/// `outer` in whose scope the atom occurs.
pub fn compose(outer: &Formula, atom: &str, inner: &Formula) -> Result<Formula, FormulaError> {
    let inner_free = inner.free_variables();
    let negated = if inner.is_sentence() { Some(dual(inner)) } else { None };

    fn go(
        f: &Formula,
        atom: &str,
        inner: &Formula,
        negated: Option<&Formula>,
        inner_free: &BTreeSet<String>,
        binders: &mut Vec<String>,
    ) -> Result<Formula, FormulaError> {
        let check = |binders: &Vec<String>| -> Result<(), FormulaError> {
            match binders.iter().find(|b| inner_free.contains(*b)) {
                Some(var) => Err(FormulaError::Capture { atom: atom.to_string(), var: var.clone() }),
                None => Ok(()),
            }
        };
        Ok(match f {
            Formula::Atom(p) if p == atom => {
                check(binders)?;
                inner.clone()
            }
            Formula::NegAtom(p) if p == atom => {
                check(binders)?;
                match negated {
                    Some(n) => n.clone(),
                    None => return Err(FormulaError::FreeVariables(inner_free.iter().cloned().collect())),
                }
            }
            Formula::Var(_) | Formula::Atom(_) | Formula::NegAtom(_) => f.clone(),
            Formula::And(a, b) => Formula::and(
                go(a, atom, inner, negated, inner_free, binders)?,
                go(b, atom, inner, negated, inner_free, binders)?,
            ),
            Formula::Or(a, b) => Formula::or(
                go(a, atom, inner, negated, inner_free, binders)?,
                go(b, atom, inner, negated, inner_free, binders)?,
            ),
            Formula::Diamond(a) => Formula::diamond(go(a, atom, inner, negated, inner_free, binders)?),
            Formula::Box(a) => Formula::boxed(go(a, atom, inner, negated, inner_free, binders)?),
            Formula::Mu(x, a) | Formula::Nu(x, a) => {
                binders.push(x.clone());
                let body = go(a, atom, inner, negated, inner_free, binders)?;
                binders.pop();
                if matches!(f, Formula::Mu(..)) {
                    Formula::Mu(x.clone(), Box::new(body))
                } else {
                    Formula::Nu(x.clone(), Box::new(body))
                }
            }
        })
    }

    let out = go(outer, atom, inner, negated.as_ref(), &inner_free, &mut Vec::new())?;
    Ok(out.rename_bound())
}

/// Fully parenthesized concrete syntax, accepted back by [`parse`].
impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Var(x) | Formula::Atom(x) => write!(f, "{x}"),
            Formula::NegAtom(p) => write!(f, "!{p}"),
            Formula::And(a, b) => write!(f, "({a} & {b})"),
            Formula::Or(a, b) => write!(f, "({a} | {b})"),
            Formula::Diamond(a) => write!(f, "<>{a}"),
            Formula::Box(a) => write!(f, "[]{a}"),
            Formula::Mu(x, a) => write!(f, "(mu {x}. {a})"),
            Formula::Nu(x, a) => write!(f, "(nu {x}. {a})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn negate_base_duality() {
        let s = parse("<> P").unwrap();
        assert_eq!(negate(&s).unwrap(), Formula::boxed(Formula::neg_atom("P")));
    }

    #[test]
    fn negate_fixpoint() {
        let s = parse("mu X. P | <> X").unwrap();
        let expected = Formula::nu("X", Formula::and(Formula::neg_atom("P"), Formula::boxed(Formula::var("X"))));
        assert_eq!(negate(&s).unwrap(), expected);
    }

    #[test]
    fn negate_always_is_eventually_not() {
        let s = parse("nu X. F & [] X").unwrap();
        assert_eq!(negate(&s).unwrap(), parse("mu X. !F | <> X").unwrap());
    }

    #[test]
    fn negate_requires_sentence() {
        let open = Formula::diamond(Formula::var("X"));
        assert!(matches!(negate(&open), Err(FormulaError::FreeVariables(_))));
    }

    #[test]
    fn compose_builds_always_gamma() {
        let outer = parse("G P").unwrap();
        let gamma = parse("nu Y. mu Z. (F & [] Y) | (!F & <> Z)").unwrap();
        let out = compose(&outer, "P", &gamma).unwrap();
        let nu = match &out {
            Formula::Nu(x, body) => (x.clone(), body),
            other => panic!("expected nu, got {other}"),
        };
        assert!(matches!(nu.1.as_ref(), Formula::And(a, _) if **a == gamma));
    }

    #[test]
    fn compose_identity() {
        let phi = parse("mu X. P | <> X").unwrap();
        assert_eq!(compose(&phi, "P", &Formula::atom("P")).unwrap(), phi);
    }

    #[test]
    fn compose_rejects_capture() {
        let outer = parse("mu X. P | <> X").unwrap();
        let inner = Formula::diamond(Formula::var("X"));
        assert!(matches!(compose(&outer, "P", &inner), Err(FormulaError::Capture { .. })));
    }

    #[test]
    fn rename_is_idempotent_and_separates_binders() {
        let f = Formula::and(
            Formula::mu("X", Formula::diamond(Formula::var("X"))),
            Formula::nu("X", Formula::boxed(Formula::var("X"))),
        );
        let r = f.rename_bound();
        assert_eq!(r.to_string(), "((mu X. <>X) & (nu X1. []X1))");
        assert_eq!(r.rename_bound(), r);
    }

    #[test]
    fn display_round_trips() {
        for text in ["mu X. P | <> X", "G F", "nu X. mu Y. (P & <> X) | <> Y", "!P & [] Q"] {
            let f = parse(text).unwrap();
            assert_eq!(parse(&f.to_string()).unwrap(), f, "{text}");
        }
    }
}
