//! Integer linear terms over numbered variable slots.
//!
//! A term is c + Σ aᵢ·vᵢ with BigInt coefficients.  Variable slots 0..m−1
//! are reserved for ambient coordinates; quantifier elimination allocates
//! fresh slots above that range.

use std::collections::BTreeMap;
use std::fmt;

use num_integer::Integer;
use num_traits::{One, Zero};

use crate::value::Int;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Term {
    pub constant: Int,
    /// Zero coefficients are never stored.
    pub coeffs: BTreeMap<usize, Int>,
}

impl Term {
    pub fn zero() -> Term {
        Term::default()
    }

    pub fn constant(c: impl Into<Int>) -> Term {
        Term {
            constant: c.into(),
            coeffs: BTreeMap::new(),
        }
    }

    pub fn var(v: usize) -> Term {
        Term {
            constant: Int::zero(),
            coeffs: BTreeMap::from([(v, Int::one())]),
        }
    }

    pub fn build(constant: impl Into<Int>, coeffs: &[(usize, i64)]) -> Term {
        let mut t = Term::constant(constant);
        for (v, a) in coeffs {
            t.set_coeff(*v, Int::from(*a));
        }
        t
    }

    pub fn coeff(&self, v: usize) -> Int {
        self.coeffs.get(&v).cloned().unwrap_or_else(Int::zero)
    }

    pub fn set_coeff(&mut self, v: usize, a: Int) {
        if a.is_zero() {
            self.coeffs.remove(&v);
        } else {
            self.coeffs.insert(v, a);
        }
    }

    pub fn has_var(&self, v: usize) -> bool {
        self.coeffs.contains_key(&v)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn vars(&self) -> impl Iterator<Item = usize> + '_ {
        self.coeffs.keys().copied()
    }

    pub fn max_var(&self) -> Option<usize> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn add(&self, other: &Term) -> Term {
        let mut out = self.clone();
        out.constant += &other.constant;
        for (v, a) in &other.coeffs {
            let cur = out.coeff(*v) + a;
            out.set_coeff(*v, cur);
        }
        out
    }

    pub fn sub(&self, other: &Term) -> Term {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Term {
        self.scale(&-Int::one())
    }

    pub fn scale(&self, k: &Int) -> Term {
        if k.is_zero() {
            return Term::zero();
        }
        Term {
            constant: &self.constant * k,
            coeffs: self.coeffs.iter().map(|(v, a)| (*v, a * k)).collect(),
        }
    }

    pub fn add_const(&self, k: impl Into<Int>) -> Term {
        let mut out = self.clone();
        out.constant += k.into();
        out
    }

    /// Replace variable `v` by the term `s`.
    pub fn substitute(&self, v: usize, s: &Term) -> Term {
        let a = self.coeff(v);
        if a.is_zero() {
            return self.clone();
        }
        let mut out = self.clone();
        out.coeffs.remove(&v);
        out.add(&s.scale(&a))
    }

    /// gcd of the variable coefficients (0 when there are none).
    pub fn content(&self) -> Int {
        let mut g = Int::zero();
        for a in self.coeffs.values() {
            g = g.gcd(a);
        }
        g
    }

    pub fn divide_exact(&self, d: &Int) -> Term {
        debug_assert!(!d.is_zero());
        Term {
            constant: &self.constant / d,
            coeffs: self.coeffs.iter().map(|(v, a)| (*v, a / d)).collect(),
        }
    }

    /// Evaluate under a total assignment; panics on an unassigned variable,
    /// which would indicate a scoping bug upstream.
    pub fn eval(&self, assign: &BTreeMap<usize, Int>) -> Int {
        let mut acc = self.constant.clone();
        for (v, a) in &self.coeffs {
            let x = assign
                .get(v)
                .unwrap_or_else(|| panic!("variable v{v} unassigned during evaluation"));
            acc += a * x;
        }
        acc
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        for (v, a) in &self.coeffs {
            let name = format!("v{v}");
            if a.is_one() {
                parts.push(name);
            } else if (-a).is_one() {
                parts.push(format!("-{name}"));
            } else {
                parts.push(format!("{a}*{name}"));
            }
        }
        if !self.constant.is_zero() || parts.is_empty() {
            parts.push(self.constant.to_string());
        }
        let mut out = String::new();
        for (k, p) in parts.iter().enumerate() {
            if k == 0 {
                out.push_str(p);
            } else if let Some(rest) = p.strip_prefix('-') {
                out.push_str(" - ");
                out.push_str(rest);
            } else {
                out.push_str(" + ");
                out.push_str(p);
            }
        }
        write!(f, "{out}")
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_and_substitution() {
        // t = 2 v0 − v1 + 3
        let t = Term::build(3, &[(0, 2), (1, -1)]);
        let s = t.add(&Term::var(1)); // cancels v1
        assert_eq!(s, Term::build(3, &[(0, 2)]));
        // substitute v0 := v1 + 1 → 2 v1 − v1 + 2 + 3 = v1 + 5
        let u = t.substitute(0, &Term::build(1, &[(1, 1)]));
        assert_eq!(u, Term::build(5, &[(1, 1)]));
    }

    #[test]
    fn evaluation() {
        let t = Term::build(-2, &[(0, 3), (4, 1)]);
        let assign = BTreeMap::from([(0, Int::from(2)), (4, Int::from(7))]);
        assert_eq!(t.eval(&assign), Int::from(11));
    }

    #[test]
    fn content_gcd() {
        let t = Term::build(5, &[(0, 6), (1, -9)]);
        assert_eq!(t.content(), Int::from(3));
        assert_eq!(Term::constant(5).content(), Int::zero());
    }
}
