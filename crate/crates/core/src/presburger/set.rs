//! Basic Presburger subsets of a slice of Γ^m, their faces, and a wrapper
//! for arbitrary quantifier-free definable sets.
//!
//! A basic set lives in the slice F_I(Γ^m) (coordinates in I finite, the
//! rest +∞) and is cut out by finitely many inequalities φ(x) ≥ γ and
//! congruences ψ(x) ≡ ρ [n] with integral linear forms.  Membership is
//! decided by direct arithmetic; everything else (emptiness, projections,
//! set comparisons) goes through quantifier elimination, so the two routes
//! check each other.

use std::collections::BTreeMap;
use std::fmt;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::point::{GammaPoint, Support};
use crate::value::{lcm_int, Int};

use super::cone::{is_recession_vector, recession_witness};
use super::formula::Formula;
use super::qe::{decide, eliminate, simplify};
use super::term::Term;

#[derive(Clone, PartialEq, Eq)]
pub struct BasicPresburgerSet {
    m: usize,
    support: Support,
    /// (φ, γ) meaning φ(x) ≥ γ, with φ an integral linear form (no constant).
    inequalities: Vec<(Term, Int)>,
    /// (ψ, ρ, n) meaning ψ(x) ≡ ρ [n] with 0 ≤ ρ < n.
    congruences: Vec<(Term, Int, Int)>,
}

impl BasicPresburgerSet {
    pub fn new(
        m: usize,
        support: Support,
        inequalities: Vec<(Term, Int)>,
        congruences: Vec<(Term, Int, Int)>,
    ) -> Result<BasicPresburgerSet> {
        if !support.is_subset(Support::full(m)) {
            return Err(Error::DomainMismatch(format!(
                "support {support} does not fit in dimension {m}"
            )));
        }
        let check_form = |t: &Term| -> Result<()> {
            if !t.constant.is_zero() {
                return Err(Error::DomainMismatch(format!(
                    "linear form {t} has a constant part; move it into the bound"
                )));
            }
            for v in t.vars() {
                if !support.contains(v) {
                    return Err(Error::DomainMismatch(format!(
                        "linear form {t} uses coordinate {} outside support {support}",
                        v + 1
                    )));
                }
            }
            Ok(())
        };
        for (phi, _) in &inequalities {
            check_form(phi)?;
        }
        let mut normalised = Vec::with_capacity(congruences.len());
        for (psi, rho, n) in congruences {
            check_form(&psi)?;
            if !n.is_positive() {
                return Err(Error::DomainMismatch(format!(
                    "congruence modulus {n} must be positive"
                )));
            }
            let rho = rho.mod_floor(&n);
            normalised.push((psi, rho, n));
        }
        Ok(BasicPresburgerSet {
            m,
            support,
            inequalities,
            congruences: normalised,
        })
    }

    /// ℕ^m: the non-negative orthant with full support.
    pub fn natural(m: usize) -> BasicPresburgerSet {
        let inequalities = (0..m).map(|i| (Term::var(i), Int::zero())).collect();
        BasicPresburgerSet::new(m, Support::full(m), inequalities, Vec::new()).unwrap()
    }

    /// The whole slice F_I(Γ^m), unconstrained.
    pub fn slice(m: usize, support: Support) -> BasicPresburgerSet {
        BasicPresburgerSet::new(m, support, Vec::new(), Vec::new()).unwrap()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn support(&self) -> Support {
        self.support
    }

    pub fn inequalities(&self) -> &[(Term, Int)] {
        &self.inequalities
    }

    pub fn congruences(&self) -> &[(Term, Int, Int)] {
        &self.congruences
    }

    pub fn with_inequality(mut self, phi: Term, gamma: impl Into<Int>) -> BasicPresburgerSet {
        self.inequalities.push((phi, gamma.into()));
        self
    }

    pub fn with_congruence(
        mut self,
        psi: Term,
        rho: impl Into<Int>,
        n: impl Into<Int>,
    ) -> BasicPresburgerSet {
        let n = n.into();
        assert!(n.is_positive());
        self.congruences.push((psi, rho.into().mod_floor(&n), n));
        self
    }

    /// Conjunction of two sets over the same slice.
    pub fn intersect(&self, other: &BasicPresburgerSet) -> BasicPresburgerSet {
        assert_eq!(self.m, other.m);
        assert_eq!(self.support, other.support);
        let mut out = self.clone();
        out.inequalities.extend(other.inequalities.iter().cloned());
        out.congruences.extend(other.congruences.iter().cloned());
        out
    }

    pub fn moduli_lcm(&self) -> Int {
        let mut l = Int::one();
        for (_, _, n) in &self.congruences {
            l = lcm_int(&l, n);
        }
        l
    }

    /// Direct arithmetic membership: support must match exactly and every
    /// constraint must hold.  This route never touches the formula engine.
    pub fn contains(&self, a: &GammaPoint) -> bool {
        if a.dim() != self.m || a.support() != self.support {
            return false;
        }
        let assign = match point_assignment(a, self.support) {
            Some(x) => x,
            None => return false,
        };
        for (phi, gamma) in &self.inequalities {
            if phi.eval(&assign) < *gamma {
                return false;
            }
        }
        for (psi, rho, n) in &self.congruences {
            if psi.eval(&assign).mod_floor(n) != *rho {
                return false;
            }
        }
        true
    }

    /// Quantifier-free membership formula over the coordinate slots of I.
    pub fn membership_formula(&self) -> Formula {
        let mut parts: Vec<Formula> = Vec::new();
        for (phi, gamma) in &self.inequalities {
            parts.push(Formula::ge0(phi.add_const(-gamma.clone())));
        }
        for (psi, rho, n) in &self.congruences {
            parts.push(Formula::divisible(
                n.clone(),
                psi.add_const(-rho.clone()),
            ));
        }
        Formula::And(parts)
    }

    pub fn definable(&self) -> DefinableSet {
        DefinableSet::new(self.m, self.support, self.membership_formula())
    }

    pub fn is_empty(&self) -> bool {
        self.definable().is_empty()
    }

    /// A vector u pointing to J with Δ_J(u) ≥ δ, A + u ⊆ A, congruence
    /// compatible, or None when no such vector exists (iff F_J(A) is empty,
    /// provided A is non-empty).  Deterministic: lexicographically least
    /// cone point, scaled.
    pub fn recession_witness(&self, j: Support, delta: &Int) -> Option<Vec<Int>> {
        if !j.is_subset(self.support) {
            return None;
        }
        let dirs = self.support.minus(j);
        let rows: Vec<Term> = self.inequalities.iter().map(|(phi, _)| phi.clone()).collect();
        let modulus = lcm_int(&self.moduli_lcm(), &delta.clone().max(Int::one()));
        let w = recession_witness(&rows, dirs, &modulus)?;
        let mut u = vec![Int::zero(); self.m];
        for (i, x) in w {
            u[i] = x;
        }
        Some(u)
    }

    /// F_J(A) ≠ ∅, decided by recession geometry plus an emptiness check.
    pub fn face_nonempty(&self, j: Support) -> bool {
        if !j.is_subset(self.support) {
            return false;
        }
        if self.is_empty() {
            return false;
        }
        self.recession_witness(j, &Int::one()).is_some()
    }

    /// The face F_J(A) as a definable subset of F_J(Γ^m).  Since a nonempty
    /// face equals the coordinate projection π_J(A), this is quantifier
    /// elimination on the dropped coordinates.
    pub fn face_as_formula(&self, j: Support) -> Result<DefinableSet> {
        if !self.face_nonempty(j) {
            return Err(Error::EmptyFace);
        }
        Ok(self.definable().project(j))
    }

    /// All nonempty face supports with cover edges and the chain flag.
    pub fn face_tree(&self) -> FaceTree {
        let mut nodes: Vec<Support> = Vec::new();
        if !self.is_empty() {
            let rows: Vec<Term> =
                self.inequalities.iter().map(|(phi, _)| phi.clone()).collect();
            for j in self.support.subsets() {
                let dirs = self.support.minus(j);
                if recession_witness(&rows, dirs, &Int::one()).is_some() {
                    nodes.push(j);
                }
            }
        }
        FaceTree::from_nodes(nodes)
    }

    /// Check that u is a genuine recession certificate: points to J, clears
    /// δ, homogeneous parts nonnegative, moduli divide every coordinate.
    pub fn check_recession_witness(&self, j: Support, delta: &Int, u: &[Int]) -> bool {
        if u.len() != self.m {
            return false;
        }
        for i in 0..self.m {
            let in_dirs = self.support.contains(i) && !j.contains(i);
            if in_dirs {
                if u[i] < *delta || !u[i].is_positive() {
                    return false;
                }
            } else if !u[i].is_zero() {
                return false;
            }
        }
        let rows: Vec<Term> = self.inequalities.iter().map(|(phi, _)| phi.clone()).collect();
        let w: BTreeMap<usize, Int> = u
            .iter()
            .enumerate()
            .filter(|(_, x)| !x.is_zero())
            .map(|(i, x)| (i, x.clone()))
            .collect();
        if !is_recession_vector(&rows, &w) {
            return false;
        }
        self.congruences.iter().all(|(psi, _, n)| {
            let mut acc = Int::zero();
            for (v, a) in &psi.coeffs {
                if let Some(x) = w.get(v) {
                    acc += a * x;
                }
            }
            acc.mod_floor(n).is_zero()
        })
    }
}

impl fmt::Display for BasicPresburgerSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{{ support {} : {} }}",
            self.support,
            simplify(self.membership_formula())
        )
    }
}

impl fmt::Debug for BasicPresburgerSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn point_assignment(a: &GammaPoint, support: Support) -> Option<BTreeMap<usize, Int>> {
    let mut assign = BTreeMap::new();
    for i in support.iter() {
        assign.insert(i, a.coord(i).as_int()?);
    }
    Some(assign)
}

/// A subset of a slice of Γ^m cut out by an arbitrary quantifier-free
/// formula whose free variables are the coordinate slots of the support.
#[derive(Clone, PartialEq, Eq)]
pub struct DefinableSet {
    m: usize,
    support: Support,
    formula: Formula,
}

impl DefinableSet {
    pub fn new(m: usize, support: Support, formula: Formula) -> DefinableSet {
        debug_assert!(support.is_subset(Support::full(m)));
        debug_assert!(formula.is_quantifier_free());
        DefinableSet {
            m,
            support,
            formula: simplify(formula),
        }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn support(&self) -> Support {
        self.support
    }

    pub fn formula(&self) -> &Formula {
        &self.formula
    }

    pub fn support_vars(&self) -> Vec<usize> {
        self.support.iter().collect()
    }

    pub fn contains(&self, a: &GammaPoint) -> bool {
        if a.dim() != self.m || a.support() != self.support {
            return false;
        }
        match point_assignment(a, self.support) {
            Some(assign) => self.formula.eval(&assign),
            None => false,
        }
    }

    pub fn is_empty(&self) -> bool {
        !decide(&Formula::exists_many(
            &self.support_vars(),
            self.formula.clone(),
        ))
    }

    pub fn subset_of(&self, other: &DefinableSet) -> bool {
        assert_eq!(self.m, other.m);
        assert_eq!(self.support, other.support);
        decide(&Formula::forall_many(
            &self.support_vars(),
            Formula::implies(self.formula.clone(), other.formula.clone()),
        ))
    }

    pub fn set_equal(&self, other: &DefinableSet) -> bool {
        self.subset_of(other) && other.subset_of(self)
    }

    pub fn intersect(&self, other: &DefinableSet) -> DefinableSet {
        assert_eq!(self.m, other.m);
        assert_eq!(self.support, other.support);
        DefinableSet::new(
            self.m,
            self.support,
            Formula::And(vec![self.formula.clone(), other.formula.clone()]),
        )
    }

    pub fn union(&self, other: &DefinableSet) -> DefinableSet {
        assert_eq!(self.m, other.m);
        assert_eq!(self.support, other.support);
        DefinableSet::new(
            self.m,
            self.support,
            Formula::Or(vec![self.formula.clone(), other.formula.clone()]),
        )
    }

    pub fn minus(&self, other: &DefinableSet) -> DefinableSet {
        assert_eq!(self.m, other.m);
        assert_eq!(self.support, other.support);
        DefinableSet::new(
            self.m,
            self.support,
            Formula::And(vec![
                self.formula.clone(),
                other.formula.nnf(true),
            ]),
        )
    }

    /// Coordinate projection onto J ⊆ support (quantifier elimination on
    /// the dropped slots).
    pub fn project(&self, j: Support) -> DefinableSet {
        assert!(j.is_subset(self.support));
        let dropped: Vec<usize> = self.support.minus(j).iter().collect();
        let projected = eliminate(&Formula::exists_many(&dropped, self.formula.clone()));
        DefinableSet::new(self.m, j, projected)
    }

    /// Remove a single point (used when sampling distinct points).
    pub fn exclude_point(&self, a: &GammaPoint) -> DefinableSet {
        assert!(self.contains(a));
        let mut not_here: Vec<Formula> = Vec::new();
        for i in self.support.iter() {
            let v = Term::var(i);
            let c = Term::constant(a.coord(i).as_int().expect("finite on support"));
            not_here.push(Formula::lt(&v, &c));
            not_here.push(Formula::lt(&c, &v));
        }
        DefinableSet::new(
            self.m,
            self.support,
            Formula::And(vec![self.formula.clone(), Formula::Or(not_here)]),
        )
    }
}

impl fmt::Display for DefinableSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{ support {} : {} }}", self.support, self.formula)
    }
}

impl fmt::Debug for DefinableSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// The nonempty face supports of a basic set, with the cover edges of the
/// inclusion order (child ⊂ parent, nothing strictly between).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FaceTree {
    pub nodes: Vec<Support>,
    pub edges: Vec<(Support, Support)>,
    pub is_chain: bool,
}

impl FaceTree {
    pub fn from_nodes(mut nodes: Vec<Support>) -> FaceTree {
        nodes.sort();
        nodes.dedup();
        let mut edges = Vec::new();
        for &a in &nodes {
            for &b in &nodes {
                if a != b && a.is_subset(b) {
                    let covered = nodes
                        .iter()
                        .any(|&c| c != a && c != b && a.is_subset(c) && c.is_subset(b));
                    if !covered {
                        edges.push((a, b));
                    }
                }
            }
        }
        let is_chain = nodes
            .iter()
            .all(|&a| nodes.iter().all(|&b| a.is_subset(b) || b.is_subset(a)));
        FaceTree {
            nodes,
            edges,
            is_chain,
        }
    }

    pub fn contains(&self, j: Support) -> bool {
        self.nodes.contains(&j)
    }

    /// The node set of any face family is closed under intersection.
    pub fn closed_under_intersection(&self) -> bool {
        self.nodes.iter().all(|&a| {
            self.nodes
                .iter()
                .all(|&b| self.nodes.contains(&a.intersect(b)))
        })
    }
}

/// A definable subset of Γ^m stored stratum by stratum: at most one
/// definable slice per support. Definable sets with different supports are
/// automatically disjoint, so a union across supports is just a list.
#[derive(Clone, Debug)]
pub struct StratifiedSet {
    m: usize,
    parts: Vec<DefinableSet>,
}

impl StratifiedSet {
    pub fn empty(m: usize) -> StratifiedSet {
        StratifiedSet {
            m,
            parts: Vec::new(),
        }
    }

    /// Merges the given slices, combining those that share a support.
    pub fn from_parts(m: usize, parts: Vec<DefinableSet>) -> StratifiedSet {
        let mut out = StratifiedSet::empty(m);
        for p in parts {
            out.insert(p);
        }
        out
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// One slice per support, sorted by support.
    pub fn parts(&self) -> &[DefinableSet] {
        &self.parts
    }

    pub fn insert(&mut self, set: DefinableSet) {
        assert_eq!(self.m, set.m(), "stratified set of a different dimension");
        match self
            .parts
            .iter_mut()
            .find(|p| p.support() == set.support())
        {
            Some(p) => *p = p.union(&set),
            None => {
                self.parts.push(set);
                self.parts.sort_by_key(|p| p.support());
            }
        }
    }

    pub fn union(&self, other: &StratifiedSet) -> StratifiedSet {
        assert_eq!(self.m, other.m, "union of different dimensions");
        let mut out = self.clone();
        for p in &other.parts {
            out.insert(p.clone());
        }
        out
    }

    pub fn contains(&self, a: &GammaPoint) -> bool {
        self.parts.iter().any(|p| p.contains(a))
    }

    pub fn is_empty(&self) -> bool {
        self.parts.iter().all(|p| p.is_empty())
    }

    /// Exact equality slice by slice; a missing slice counts as empty.
    pub fn set_equal(&self, other: &StratifiedSet) -> bool {
        assert_eq!(self.m, other.m, "comparing different dimensions");
        for p in &self.parts {
            match other.parts.iter().find(|q| q.support() == p.support()) {
                Some(q) => {
                    if !p.set_equal(q) {
                        return false;
                    }
                }
                None => {
                    if !p.is_empty() {
                        return false;
                    }
                }
            }
        }
        other
            .parts
            .iter()
            .all(|q| self.parts.iter().any(|p| p.support() == q.support()) || q.is_empty())
    }
}

impl fmt::Display for StratifiedSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.parts.is_empty() {
            return write!(f, "{{}}");
        }
        let mut first = true;
        for p in &self.parts {
            if !first {
                write!(f, " u ")?;
            }
            first = false;
            write!(f, "{p}")?;
        }
        Ok(())
    }
}
