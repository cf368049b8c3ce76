//! First-order formulas over the integers with +, ≥ and divisibility.

use std::collections::BTreeMap;
use std::fmt;

use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::value::Int;

use super::term::Term;

/// Atomic constraints.  `Ge(t)` means t ≥ 0; `Div(n, t)` means n | t with
/// n ≥ 1; `NDiv` is its negation (kept as an atom so negation normal form
/// needs no `Not` nodes).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Atom {
    Ge(Term),
    Div(Int, Term),
    NDiv(Int, Term),
}

impl Atom {
    pub fn negated(&self) -> Atom {
        match self {
            // ¬(t ≥ 0) ⟺ −t − 1 ≥ 0 over the integers
            Atom::Ge(t) => Atom::Ge(t.neg().add_const(-1)),
            Atom::Div(n, t) => Atom::NDiv(n.clone(), t.clone()),
            Atom::NDiv(n, t) => Atom::Div(n.clone(), t.clone()),
        }
    }

    pub fn term(&self) -> &Term {
        match self {
            Atom::Ge(t) | Atom::Div(_, t) | Atom::NDiv(_, t) => t,
        }
    }

    pub fn map_term(&self, f: impl FnOnce(&Term) -> Term) -> Atom {
        match self {
            Atom::Ge(t) => Atom::Ge(f(t)),
            Atom::Div(n, t) => Atom::Div(n.clone(), f(t)),
            Atom::NDiv(n, t) => Atom::NDiv(n.clone(), f(t)),
        }
    }

    pub fn eval(&self, assign: &BTreeMap<usize, Int>) -> bool {
        match self {
            Atom::Ge(t) => !t.eval(assign).is_negative(),
            Atom::Div(n, t) => t.eval(assign).mod_floor(n).is_zero(),
            Atom::NDiv(n, t) => !t.eval(assign).mod_floor(n).is_zero(),
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Ge(t) => write!(f, "{t} >= 0"),
            Atom::Div(n, t) => write!(f, "{n} | {t}"),
            Atom::NDiv(n, t) => write!(f, "{n} !| {t}"),
        }
    }
}

impl fmt::Debug for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Atom(Atom),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Not(Box<Formula>),
    Exists(usize, Box<Formula>),
    Forall(usize, Box<Formula>),
}

impl Formula {
    pub fn tru() -> Formula {
        Formula::And(Vec::new())
    }

    pub fn fls() -> Formula {
        Formula::Or(Vec::new())
    }

    pub fn is_true(&self) -> bool {
        matches!(self, Formula::And(fs) if fs.is_empty())
    }

    pub fn is_false(&self) -> bool {
        matches!(self, Formula::Or(fs) if fs.is_empty())
    }

    /// t ≥ 0
    pub fn ge0(t: Term) -> Formula {
        Formula::Atom(Atom::Ge(t))
    }

    /// a ≤ b
    pub fn le(a: &Term, b: &Term) -> Formula {
        Formula::ge0(b.sub(a))
    }

    /// a < b
    pub fn lt(a: &Term, b: &Term) -> Formula {
        Formula::ge0(b.sub(a).add_const(-1))
    }

    pub fn eq(a: &Term, b: &Term) -> Formula {
        Formula::And(vec![Formula::le(a, b), Formula::le(b, a)])
    }

    /// n | t (n ≥ 1 required)
    pub fn divisible(n: impl Into<Int>, t: Term) -> Formula {
        let n = n.into();
        assert!(n.is_positive(), "divisibility modulus must be positive");
        Formula::Atom(Atom::Div(n, t))
    }

    pub fn congruent(t: &Term, r: impl Into<Int>, n: impl Into<Int>) -> Formula {
        Formula::divisible(n, t.sub(&Term::constant(r)))
    }

    pub fn and(fs: Vec<Formula>) -> Formula {
        Formula::And(fs)
    }

    pub fn or(fs: Vec<Formula>) -> Formula {
        Formula::Or(fs)
    }

    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn implies(p: Formula, q: Formula) -> Formula {
        Formula::Or(vec![Formula::not(p), q])
    }

    pub fn exists(v: usize, f: Formula) -> Formula {
        Formula::Exists(v, Box::new(f))
    }

    pub fn forall(v: usize, f: Formula) -> Formula {
        Formula::Forall(v, Box::new(f))
    }

    pub fn exists_many(vs: &[usize], f: Formula) -> Formula {
        vs.iter().rev().fold(f, |acc, v| Formula::exists(*v, acc))
    }

    pub fn forall_many(vs: &[usize], f: Formula) -> Formula {
        vs.iter().rev().fold(f, |acc, v| Formula::forall(*v, acc))
    }

    pub fn is_quantifier_free(&self) -> bool {
        match self {
            Formula::Atom(_) => true,
            Formula::And(fs) | Formula::Or(fs) => fs.iter().all(|f| f.is_quantifier_free()),
            Formula::Not(f) => f.is_quantifier_free(),
            Formula::Exists(..) | Formula::Forall(..) => false,
        }
    }

    /// Largest variable slot mentioned anywhere (bound or free).
    pub fn max_var(&self) -> Option<usize> {
        match self {
            Formula::Atom(a) => a.term().max_var(),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().filter_map(|f| f.max_var()).max(),
            Formula::Not(f) => f.max_var(),
            Formula::Exists(v, f) | Formula::Forall(v, f) => {
                Some(f.max_var().map_or(*v, |w| w.max(*v)))
            }
        }
    }

    pub fn mentions(&self, v: usize) -> bool {
        match self {
            Formula::Atom(a) => a.term().has_var(v),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().any(|f| f.mentions(v)),
            Formula::Not(f) => f.mentions(v),
            Formula::Exists(w, f) | Formula::Forall(w, f) => *w == v || f.mentions(v),
        }
    }

    /// Negation normal form; with `negate` set, the result is equivalent to
    /// the negation.  Atoms absorb negation, so NNF output has no `Not`.
    pub fn nnf(&self, negate: bool) -> Formula {
        match self {
            Formula::Atom(a) => Formula::Atom(if negate { a.negated() } else { a.clone() }),
            Formula::Not(f) => f.nnf(!negate),
            Formula::And(fs) => {
                let kids = fs.iter().map(|f| f.nnf(negate)).collect();
                if negate {
                    Formula::Or(kids)
                } else {
                    Formula::And(kids)
                }
            }
            Formula::Or(fs) => {
                let kids = fs.iter().map(|f| f.nnf(negate)).collect();
                if negate {
                    Formula::And(kids)
                } else {
                    Formula::Or(kids)
                }
            }
            Formula::Exists(v, f) => {
                if negate {
                    Formula::forall(*v, f.nnf(true))
                } else {
                    Formula::exists(*v, f.nnf(false))
                }
            }
            Formula::Forall(v, f) => {
                if negate {
                    Formula::exists(*v, f.nnf(true))
                } else {
                    Formula::forall(*v, f.nnf(false))
                }
            }
        }
    }

    /// Substitute a term for a variable.  Only legal on quantifier-free
    /// formulas; quantifier elimination works inside-out so this never meets
    /// a binder.
    pub fn substitute(&self, v: usize, t: &Term) -> Formula {
        match self {
            Formula::Atom(a) => Formula::Atom(a.map_term(|s| s.substitute(v, t))),
            Formula::And(fs) => Formula::And(fs.iter().map(|f| f.substitute(v, t)).collect()),
            Formula::Or(fs) => Formula::Or(fs.iter().map(|f| f.substitute(v, t)).collect()),
            Formula::Not(f) => Formula::not(f.substitute(v, t)),
            Formula::Exists(..) | Formula::Forall(..) => {
                panic!("substitution under a quantifier")
            }
        }
    }

    /// Evaluate a quantifier-free formula under a total assignment.
    pub fn eval(&self, assign: &BTreeMap<usize, Int>) -> bool {
        match self {
            Formula::Atom(a) => a.eval(assign),
            Formula::And(fs) => fs.iter().all(|f| f.eval(assign)),
            Formula::Or(fs) => fs.iter().any(|f| f.eval(assign)),
            Formula::Not(f) => !f.eval(assign),
            Formula::Exists(..) | Formula::Forall(..) => {
                panic!("evaluation of a quantified formula")
            }
        }
    }

    /// Count of atoms (a rough size measure used in tests and budgets).
    pub fn atom_count(&self) -> usize {
        match self {
            Formula::Atom(_) => 1,
            Formula::And(fs) | Formula::Or(fs) => fs.iter().map(|f| f.atom_count()).sum(),
            Formula::Not(f) | Formula::Exists(_, f) | Formula::Forall(_, f) => f.atom_count(),
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Atom(a) => write!(f, "{a}"),
            Formula::And(fs) => {
                if fs.is_empty() {
                    return write!(f, "true");
                }
                let parts: Vec<String> = fs.iter().map(|g| format!("({g})")).collect();
                write!(f, "{}", parts.join(" & "))
            }
            Formula::Or(fs) => {
                if fs.is_empty() {
                    return write!(f, "false");
                }
                let parts: Vec<String> = fs.iter().map(|g| format!("({g})")).collect();
                write!(f, "{}", parts.join(" | "))
            }
            Formula::Not(g) => write!(f, "!({g})"),
            Formula::Exists(v, g) => write!(f, "exists v{v}. ({g})"),
            Formula::Forall(v, g) => write!(f, "forall v{v}. ({g})"),
        }
    }
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nnf_pushes_negation_to_atoms() {
        // ¬(v0 ≥ 0 ∧ 2 | v0) = (−v0 − 1 ≥ 0) ∨ (2 !| v0)
        let f = Formula::And(vec![
            Formula::ge0(Term::var(0)),
            Formula::divisible(2, Term::var(0)),
        ]);
        let g = f.nnf(true);
        assert_eq!(
            g,
            Formula::Or(vec![
                Formula::ge0(Term::build(-1, &[(0, -1)])),
                Formula::Atom(Atom::NDiv(Int::from(2), Term::var(0))),
            ])
        );
        // double negation round-trips
        assert_eq!(g.nnf(true), f.nnf(false));
    }

    #[test]
    fn evaluation_of_sentences_over_assignments() {
        // (v0 < v1) ∧ 3 | v0 + v1
        let f = Formula::And(vec![
            Formula::lt(&Term::var(0), &Term::var(1)),
            Formula::divisible(3, Term::var(0).add(&Term::var(1))),
        ]);
        let a = BTreeMap::from([(0, Int::from(1)), (1, Int::from(2))]);
        let b = BTreeMap::from([(0, Int::from(2)), (1, Int::from(1))]);
        assert!(f.eval(&a));
        assert!(!f.eval(&b));
    }

    #[test]
    fn negated_ge_is_strict_complement() {
        let a = Atom::Ge(Term::build(-3, &[(0, 1)])); // v0 ≥ 3
        let n = a.negated(); // v0 ≤ 2
        for x in -5..8 {
            let assign = BTreeMap::from([(0, Int::from(x))]);
            assert_ne!(a.eval(&assign), n.eval(&assign));
        }
    }
}
