//! Decision-procedure-backed analysis over definable sets: exact
//! minimisation, deterministic point finding, affine threshold synthesis,
//! and classification of an affine map's behaviour along a face.

use num_integer::Integer;
use num_traits::{One, Zero};

use crate::affine::AffineMap;
use crate::error::{Error, Result};
use crate::point::{GammaPoint, Support};
use crate::value::{lcm_int, rat_int, ExtendedValue, Int, Rat};

use super::formula::Formula;
use super::qe::{decide, eliminate, simplify};
use super::set::{BasicPresburgerSet, DefinableSet};
use super::term::Term;

/// Clear denominators: returns (D·f as an integral term over coordinate
/// slots, D) with D ≥ 1.  Panics on the +∞ map, which has no term.
pub fn affine_to_term(f: &AffineMap) -> (Term, Int) {
    assert!(!f.is_infinity(), "the +inf map has no linear term");
    let d = f.denominator();
    let dr = Rat::from(d.clone());
    let mut t = Term::constant((f.constant_term() * &dr).to_integer());
    for (i, c) in f.coeffs() {
        t.set_coeff(*i, (c * &dr).to_integer());
    }
    (t, d)
}

fn fresh_after(m: usize, parts: &[&Formula]) -> usize {
    let mut base = m;
    for f in parts {
        if let Some(v) = f.max_var() {
            base = base.max(v + 1);
        }
    }
    base
}

/// Shift every coordinate variable v ∈ vars to v + offset.
fn shift_vars(f: &Formula, vars: &[usize], offset: usize) -> Formula {
    let mut out = f.clone();
    for &v in vars {
        out = out.substitute(v, &Term::var(v + offset));
    }
    out
}

fn shift_term(t: &Term, vars: &[usize], offset: usize) -> Term {
    let mut out = t.clone();
    for &v in vars {
        out = out.substitute(v, &Term::var(v + offset));
    }
    out
}

/// Is t bounded below on {x : φ(x)}?  (Vacuously true on an empty set.)
fn bounded_below(phi: &Formula, vars: &[usize], t: &Term, fresh: usize) -> bool {
    let b = Term::var(fresh);
    let body = Formula::implies(phi.clone(), Formula::ge0(t.sub(&b)));
    decide(&Formula::exists(
        fresh,
        Formula::forall_many(vars, body),
    ))
}

/// Least value of t over the nonempty set {x : φ(x)}, assuming t is bounded
/// below there.  One quantifier elimination, then binary search on the
/// resulting one-variable formula.
fn term_minimum(phi: &Formula, vars: &[usize], t: &Term, fresh: usize) -> Int {
    let c = fresh;
    let reachable = Formula::And(vec![
        phi.clone(),
        Formula::ge0(Term::var(c).sub(t)),
    ]);
    let psi = eliminate(&Formula::exists_many(vars, reachable));
    let holds = |v: &Int| -> bool {
        if psi.is_true() {
            return true;
        }
        if psi.is_false() {
            return false;
        }
        psi.eval(&std::collections::BTreeMap::from([(c, v.clone())]))
    };
    // bracket the minimum: find a true point and a false point by doubling
    let mut hi: Int;
    let mut lo: Int;
    if holds(&Int::zero()) {
        hi = Int::zero();
        let mut step = Int::one();
        loop {
            let candidate = -step.clone();
            if holds(&candidate) {
                hi = candidate;
                step *= 2;
            } else {
                lo = candidate;
                break;
            }
        }
    } else {
        lo = Int::zero();
        let mut step = Int::one();
        loop {
            let candidate = step.clone();
            if holds(&candidate) {
                hi = candidate;
                break;
            } else {
                lo = candidate;
                step *= 2;
            }
        }
    }
    while (&hi - &lo) > Int::one() {
        let mid = (&hi + &lo).div_floor(&Int::from(2));
        if holds(&mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Exact minimum of f over the set; EmptySet / Unbounded as appropriate.
pub fn minimum(set: &DefinableSet, f: &AffineMap) -> Result<ExtendedValue> {
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    if f.is_infinity() {
        return Ok(ExtendedValue::PlusInfinity);
    }
    if !f.support().is_subset(set.support()) {
        return Err(Error::DomainMismatch(format!(
            "map on {} minimised over a set with support {}",
            f.support(),
            set.support()
        )));
    }
    let (t, d) = affine_to_term(f);
    let vars = set.support_vars();
    let fresh = fresh_after(set.m(), &[set.formula()]).max(t.max_var().map_or(0, |v| v + 1));
    if !bounded_below(set.formula(), &vars, &t, fresh) {
        return Err(Error::Unbounded);
    }
    let min_t = term_minimum(set.formula(), &vars, &t, fresh);
    Ok(ExtendedValue::Finite(Rat::new(min_t, d)))
}

/// Exact maximum of f over the set (error Unbounded when f is unbounded
/// above; +∞ for the +∞ map on a nonempty set).
pub fn maximum(set: &DefinableSet, f: &AffineMap) -> Result<ExtendedValue> {
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    if f.is_infinity() {
        return Ok(ExtendedValue::PlusInfinity);
    }
    let neg = minimum(set, &f.scale(&rat_int(-1)))?;
    match neg {
        ExtendedValue::Finite(v) => Ok(ExtendedValue::Finite(-v)),
        ExtendedValue::PlusInfinity => unreachable!("negated finite map"),
    }
}

/// A deterministic point of the set: coordinates fixed in ascending order,
/// each taking its least value when bounded below, else its greatest when
/// bounded above, else the value of least absolute value (ties to the
/// nonnegative side) keeping the rest satisfiable.
pub fn find_point(set: &DefinableSet) -> Result<GammaPoint> {
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    let all_vars = set.support_vars();
    let mut phi = set.formula().clone();
    let mut chosen: Vec<(usize, Int)> = Vec::new();
    for (k, &v) in all_vars.iter().enumerate() {
        let rest: Vec<usize> = all_vars[k..].to_vec();
        let fresh = fresh_after(set.m(), &[&phi]);
        let tv = Term::var(v);
        let value = if bounded_below(&phi, &rest, &tv, fresh) {
            term_minimum(&phi, &rest, &tv, fresh)
        } else if bounded_below(&phi, &rest, &tv.neg(), fresh) {
            -term_minimum(&phi, &rest, &tv.neg(), fresh)
        } else {
            // unbounded in both directions: least |value| that stays
            // satisfiable, which exists because the projection is nonempty
            let mut k = Int::zero();
            loop {
                let mut hit = None;
                for cand in [k.clone(), -k.clone()] {
                    let restricted = Formula::And(vec![
                        phi.clone(),
                        Formula::eq(&tv, &Term::constant(cand.clone())),
                    ]);
                    if decide(&Formula::exists_many(&rest, restricted)) {
                        hit = Some(cand);
                        break;
                    }
                }
                if let Some(x) = hit {
                    break x;
                }
                k += 1;
            }
        };
        phi = simplify(phi.substitute(v, &Term::constant(value.clone())));
        chosen.push((v, value));
    }
    let mut coords: Vec<Option<Int>> = vec![None; set.m()];
    for (v, x) in chosen {
        coords[v] = Some(x);
    }
    Ok(GammaPoint::from_opts(coords))
}

/// Up to `count` distinct points of the set inside the box |xᵢ| ≤ bound.
pub fn sample_points(set: &DefinableSet, bound: i64, count: usize) -> Vec<GammaPoint> {
    let mut boxed = set.clone();
    for i in set.support().iter() {
        let lo = Formula::ge0(Term::var(i).add_const(bound));
        let hi = Formula::ge0(Term::var(i).neg().add_const(bound));
        boxed = boxed.intersect(&DefinableSet::new(
            set.m(),
            set.support(),
            Formula::And(vec![lo, hi]),
        ));
    }
    let mut out = Vec::new();
    while out.len() < count {
        match find_point(&boxed) {
            Ok(p) => {
                boxed = boxed.exclude_point(&p);
                out.push(p);
            }
            Err(_) => break,
        }
    }
    out
}

/// Behaviour of an affine map on a basic set while approaching the face of
/// support J.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LimitBehavior {
    /// f tends to +∞ at every point of the face.
    DivergesToInfinity,
    /// f is constant on the fibers of π_J, hence factors globally through
    /// the projection; the payload is the induced affine map on J-slots.
    FiniteFactorization(AffineMap),
    /// Neither: f has no continuous extension to the face.
    NotLargelyContinuous,
}

/// Classify f along the face F_J(A).  Requires the face to be nonempty.
pub fn limit_behavior(
    a: &BasicPresburgerSet,
    j: Support,
    f: &AffineMap,
) -> Result<LimitBehavior> {
    if !a.face_nonempty(j) {
        return Err(Error::EmptyFace);
    }
    if f.is_infinity() {
        return Ok(LimitBehavior::DivergesToInfinity);
    }
    let support = a.support();
    let dirs = support.minus(j);
    if dirs.is_empty() {
        return Ok(LimitBehavior::FiniteFactorization(f.clone()));
    }
    let phi = a.membership_formula();
    let (t, d) = affine_to_term(f);
    let vars = a.definable().support_vars();
    let fresh = fresh_after(a.m(), &[&phi]).max(t.max_var().map_or(0, |v| v + 1));

    // fiber constancy: two copies of the set agreeing on J-slots give equal
    // values; by the extension theory this is exactly the finite-limit case
    let offset = fresh;
    let phi2 = shift_vars(&phi, &vars, offset);
    let t2 = shift_term(&t, &vars, offset);
    let mut same_fiber = vec![phi.clone(), phi2];
    for jv in j.iter() {
        same_fiber.push(Formula::eq(&Term::var(jv), &Term::var(jv + offset)));
    }
    let both_vars: Vec<usize> = vars
        .iter()
        .copied()
        .chain(vars.iter().map(|v| v + offset))
        .collect();
    let constancy = Formula::forall_many(
        &both_vars,
        Formula::implies(Formula::And(same_fiber), Formula::eq(&t, &t2)),
    );
    if decide(&constancy) {
        let fstar = extract_factorization(a, j, &t, &d)?;
        return Ok(LimitBehavior::FiniteFactorization(fstar));
    }

    // pointwise divergence: over each fiber, t exceeds every bound once all
    // the vanishing coordinates are large enough
    let base = fresh + offset.max(1) + a.m();
    let mut yslots: Vec<usize> = Vec::new();
    let mut fiber = vec![phi.clone()];
    for (k, jv) in j.iter().enumerate() {
        let y = base + k;
        yslots.push(y);
        fiber.push(Formula::eq(&Term::var(jv), &Term::var(y)));
    }
    let eps = base + j.len();
    let dvar = eps + 1;
    for i in dirs.iter() {
        fiber.push(Formula::ge0(Term::var(i).sub(&Term::var(dvar))));
    }
    let inner = Formula::forall_many(
        &vars,
        Formula::implies(
            Formula::And(fiber),
            Formula::ge0(t.sub(&Term::var(eps))),
        ),
    );
    let mut quantified = Formula::exists(dvar, inner);
    quantified = Formula::forall(eps, quantified);
    let divergence = Formula::forall_many(&yslots, quantified);
    if decide(&divergence) {
        return Ok(LimitBehavior::DivergesToInfinity);
    }
    Ok(LimitBehavior::NotLargelyContinuous)
}

/// Given that D·f = t is constant on fibers of π_J over A, recover the
/// induced affine map on the J-slots: sample fibers, solve the affine
/// system exactly, certify with one sentence, growing the sample box if the
/// samples did not span the projection's affine hull.
fn extract_factorization(
    a: &BasicPresburgerSet,
    j: Support,
    t: &Term,
    d: &Int,
) -> Result<AffineMap> {
    let projection = a.definable().project(j);
    let jvars: Vec<usize> = j.iter().collect();
    let k = jvars.len();
    let phi = a.membership_formula();
    let vars = a.definable().support_vars();
    for bound in [4i64, 16, 64, 256, 1024] {
        let samples = sample_points(&projection, bound, k + 2);
        if samples.is_empty() {
            continue;
        }
        let mut rows: Vec<(Vec<Rat>, Rat)> = Vec::new();
        for y in &samples {
            let mut fiber = phi.clone();
            for &jv in &jvars {
                let c = y.coord(jv).as_int().expect("face sample is finite on J");
                fiber = Formula::And(vec![
                    fiber,
                    Formula::eq(&Term::var(jv), &Term::constant(c)),
                ]);
            }
            let fresh = fresh_after(a.m(), &[&fiber]).max(t.max_var().map_or(0, |v| v + 1));
            let value = term_minimum(&fiber, &vars, t, fresh);
            let mut row = vec![Rat::one()];
            for &jv in &jvars {
                row.push(Rat::from(y.coord(jv).as_int().unwrap()));
            }
            rows.push((row, Rat::new(value, d.clone())));
        }
        let coeffs = match solve_affine(&rows, k + 1) {
            Some(c) => c,
            None => continue,
        };
        let mut map = std::collections::BTreeMap::new();
        for (idx, &jv) in jvars.iter().enumerate() {
            map.insert(jv, coeffs[idx + 1].clone());
        }
        let fstar = AffineMap::new(j, coeffs[0].clone(), map)?;
        if verify_factorization(a, j, t, d, &fstar) {
            return Ok(fstar);
        }
    }
    Err(Error::Internal(
        "failed to recover the affine factorization from samples".into(),
    ))
}

fn verify_factorization(
    a: &BasicPresburgerSet,
    _j: Support,
    t: &Term,
    d: &Int,
    fstar: &AffineMap,
) -> bool {
    let (tstar, dstar) = affine_to_term(fstar);
    // f = f*∘π ⟺ D*·t = D·t* pointwise on A
    let lhs = t.scale(&dstar);
    let rhs = tstar.scale(d);
    let vars = a.definable().support_vars();
    decide(&Formula::forall_many(
        &vars,
        Formula::implies(a.membership_formula(), Formula::eq(&lhs, &rhs)),
    ))
}

/// Solve rows·c = rhs exactly; any solution (free unknowns pinned to 0), or
/// None when inconsistent.
fn solve_affine(rows: &[(Vec<Rat>, Rat)], unknowns: usize) -> Option<Vec<Rat>> {
    let mut mat: Vec<Vec<Rat>> = rows
        .iter()
        .map(|(r, b)| {
            let mut row = r.clone();
            row.push(b.clone());
            row
        })
        .collect();
    let nrows = mat.len();
    let mut pivot_of_col: Vec<Option<usize>> = vec![None; unknowns];
    let mut rank = 0usize;
    for col in 0..unknowns {
        let pivot = (rank..nrows).find(|&r| !mat[r][col].is_zero());
        let Some(p) = pivot else { continue };
        mat.swap(rank, p);
        let inv = mat[rank][col].clone();
        for c in col..=unknowns {
            let v = &mat[rank][c] / &inv;
            mat[rank][c] = v;
        }
        for r in 0..nrows {
            if r != rank && !mat[r][col].is_zero() {
                let factor = mat[r][col].clone();
                for c in col..=unknowns {
                    let v = &mat[r][c] - &factor * &mat[rank][c];
                    mat[r][c] = v;
                }
            }
        }
        pivot_of_col[col] = Some(rank);
        rank += 1;
    }
    // inconsistent: a zero row with nonzero rhs
    for r in rank..nrows {
        if !mat[r][unknowns].is_zero() {
            return None;
        }
    }
    let mut sol = vec![Rat::zero(); unknowns];
    for (col, pivot) in pivot_of_col.iter().enumerate() {
        if let Some(r) = pivot {
            sol[col] = mat[*r][unknowns].clone();
        }
    }
    Some(sol)
}

/// Synthesise an integrally affine threshold η on the J-slots such that for
/// every x ∈ A, Δ_J(x) ≥ η(π_J(x)) implies f(x) ≥ g(π_J(x)).  Searches the
/// family β + α·Σ_{j∈J} x_j by increasing slope α; for each candidate slope
/// one quantifier elimination leaves a one-variable condition on β, whose
/// least solution (when one exists) is extracted by binary search.  The
/// result is deterministic: least workable α, then least β for it.
/// Requires f to diverge at the (nonempty) face.
pub fn skolem_threshold(
    a: &BasicPresburgerSet,
    j: Support,
    f: &AffineMap,
    g: &AffineMap,
) -> Result<AffineMap> {
    assert!(!g.is_infinity(), "threshold against the +inf target");
    if f.is_infinity() {
        return Ok(AffineMap::zero(j));
    }
    match limit_behavior(a, j, f)? {
        LimitBehavior::DivergesToInfinity => {}
        other => {
            return Err(Error::NoThreshold(format!(
                "map {f} does not diverge at the face {j}: {other:?}"
            )))
        }
    }
    let dirs = a.support().minus(j);
    let d = lcm_int(&f.denominator(), &g.denominator());
    let (tf, df) = affine_to_term(f);
    let (tg, dg) = affine_to_term(g);
    let lhs = tf.scale(&(&d / &df));
    let rhs = tg.scale(&(&d / &dg));
    let goal = Formula::ge0(lhs.sub(&rhs));
    let phi = a.membership_formula();
    let vars = a.definable().support_vars();

    let sum: Term = j
        .iter()
        .fold(Term::zero(), |acc, jv| acc.add(&Term::var(jv)));
    let holds = |alpha: &Int, beta: &Int| -> bool {
        let eta = sum.scale(alpha).add(&Term::constant(beta.clone()));
        let mut premise = vec![phi.clone()];
        for i in dirs.iter() {
            premise.push(Formula::ge0(Term::var(i).sub(&eta)));
        }
        decide(&Formula::forall_many(
            &vars,
            Formula::implies(Formula::And(premise), goal.clone()),
        ))
    };
    // The condition is monotone in β for a fixed slope: raising the
    // threshold only shrinks the set of points it speaks about.  So a slope
    // is probed once at the largest offset; slopes that fail there are
    // dismissed after that single sentence, and the first workable slope
    // has its least offset pinned down by bisection.
    let max_alpha: i64 = 1 << 20;
    let max_beta: Int = Int::from(1i64 << 24);
    let mut alpha = 0i64;
    loop {
        let a_int = Int::from(alpha);
        if holds(&a_int, &max_beta) {
            let beta = if holds(&a_int, &Int::zero()) {
                Int::zero()
            } else {
                let mut lo = Int::zero(); // known to fail
                let mut hi = max_beta.clone();
                while (&hi - &lo) > Int::one() {
                    let mid = (&hi + &lo).div_floor(&Int::from(2));
                    if holds(&a_int, &mid) {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                hi
            };
            let mut coeffs = std::collections::BTreeMap::new();
            for jv in j.iter() {
                coeffs.insert(jv, rat_int(alpha));
            }
            return AffineMap::new(j, Rat::from(beta), coeffs);
        }
        if j.is_empty() || alpha >= max_alpha {
            // Σ over no coordinates leaves α inert, so only α = 0 is tried.
            return Err(Error::BudgetExceeded {
                need: (alpha + 1) as u128,
                budget: max_alpha as u128,
            });
        }
        alpha = if alpha < 8 { alpha + 1 } else { alpha * 2 };
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::affine::affine;

    fn s(idx1: &[usize]) -> Support {
        Support::from_one_based(idx1).unwrap()
    }

    #[test]
    fn minimum_examples() {
        let n2 = BasicPresburgerSet::natural(2).definable();
        let f = affine(Support::full(2), "0", &[(0, "1"), (1, "1")]);
        assert_eq!(minimum(&n2, &f).unwrap(), ExtendedValue::zero());

        // 2x − 5 on {x ≥ 3, x ≡ 0 [2]}: minimum 3 at x = 4
        let a = BasicPresburgerSet::natural(1)
            .with_inequality(Term::var(0), 3)
            .with_congruence(Term::var(0), 0, 2)
            .definable();
        let g = affine(Support::full(1), "-5", &[(0, "2")]);
        assert_eq!(minimum(&a, &g).unwrap(), "3".parse().unwrap());

        // x₂ − x₁ on {0 ≤ a₁ ≤ a₂}
        let tri = BasicPresburgerSet::natural(2)
            .with_inequality(Term::build(0, &[(1, 1), (0, -1)]), 0)
            .definable();
        let h = affine(Support::full(2), "0", &[(0, "-1"), (1, "1")]);
        assert_eq!(minimum(&tri, &h).unwrap(), ExtendedValue::zero());
        // and x₁ − x₂ is unbounded below there
        let hneg = affine(Support::full(2), "0", &[(0, "1"), (1, "-1")]);
        assert!(matches!(minimum(&tri, &hneg), Err(Error::Unbounded)));
    }

    #[test]
    fn maximum_and_infinite_map() {
        let boxy = BasicPresburgerSet::natural(1)
            .with_inequality(Term::var(0).neg(), -7)
            .definable();
        let f = affine(Support::full(1), "1/2", &[(0, "3/2")]);
        assert_eq!(maximum(&boxy, &f).unwrap(), "11".parse().unwrap());
        let inf = AffineMap::infinity(Support::full(1));
        assert_eq!(minimum(&boxy, &inf).unwrap(), ExtendedValue::PlusInfinity);
    }

    #[test]
    fn point_finding_is_deterministic_and_member() {
        let a = BasicPresburgerSet::natural(1)
            .with_inequality(Term::var(0), 3)
            .with_congruence(Term::var(0), 0, 2)
            .definable();
        let p = find_point(&a).unwrap();
        assert_eq!(p, GammaPoint::from_ints(vec![4]));

        // linked parity, unbounded in both directions
        let linked = DefinableSet::new(
            2,
            Support::full(2),
            Formula::And(vec![
                Formula::eq(&Term::var(0), &Term::var(1)),
                Formula::divisible(2, Term::var(0).add_const(1)),
            ]),
        );
        let q = find_point(&linked).unwrap();
        assert_eq!(q, GammaPoint::from_ints(vec![1, 1]));
        assert!(linked.contains(&q));
    }

    #[test]
    fn sampling_collects_distinct_points() {
        let evens = DefinableSet::new(
            1,
            Support::full(1),
            Formula::And(vec![
                Formula::ge0(Term::var(0)),
                Formula::divisible(2, Term::var(0)),
            ]),
        );
        let pts = sample_points(&evens, 10, 4);
        assert_eq!(pts.len(), 4);
        for w in pts.windows(2) {
            assert_ne!(w[0], w[1]);
        }
    }

    /// a₁ ≥ 0, a₂ ≥ a₁, a₃ = 2a₂ − 2a₁ in ℤ³.
    fn running_example() -> BasicPresburgerSet {
        BasicPresburgerSet::new(
            3,
            Support::full(3),
            vec![
                (Term::var(0), Int::zero()),
                (Term::build(0, &[(1, 1), (0, -1)]), Int::zero()),
                (Term::build(0, &[(2, 1), (1, -2), (0, 2)]), Int::zero()),
                (Term::build(0, &[(2, -1), (1, 2), (0, -2)]), Int::zero()),
            ],
            vec![],
        )
        .unwrap()
    }

    #[test]
    fn limit_of_difference_map_halves_the_third_coordinate() {
        let a = running_example();
        let f = affine(Support::full(3), "0", &[(0, "-1"), (1, "1")]);
        let got = limit_behavior(&a, s(&[3]), &f).unwrap();
        let expected = affine(s(&[3]), "0", &[(2, "1/2")]);
        assert_eq!(got, LimitBehavior::FiniteFactorization(expected));
    }

    #[test]
    fn limit_divergence_and_failure() {
        let n2 = BasicPresburgerSet::natural(2);
        let f = affine(Support::full(2), "0", &[(1, "1")]);
        assert_eq!(
            limit_behavior(&n2, s(&[1]), &f).unwrap(),
            LimitBehavior::DivergesToInfinity
        );

        let tri = BasicPresburgerSet::natural(2)
            .with_inequality(Term::build(0, &[(1, 1), (0, -1)]), 0);
        let g = affine(Support::full(2), "0", &[(0, "-2"), (1, "2")]);
        assert_eq!(
            limit_behavior(&tri, Support::EMPTY, &g).unwrap(),
            LimitBehavior::NotLargelyContinuous
        );
    }

    #[test]
    fn threshold_synthesis_matches_expected_shapes() {
        let n2 = BasicPresburgerSet::natural(2);
        let x2 = affine(Support::full(2), "0", &[(1, "1")]);
        let y1 = affine(s(&[1]), "0", &[(0, "1")]);
        // x₂ ≥ η(x₁) must force x₂ ≥ x₁: least diagonal is η = x₁
        let eta = skolem_threshold(&n2, s(&[1]), &x2, &y1).unwrap();
        assert_eq!(eta, affine(s(&[1]), "0", &[(0, "1")]));

        // 2x₂ − 5 ≥ 0 needs x₂ ≥ 3
        let f2 = affine(Support::full(2), "-5", &[(1, "2")]);
        let zero = AffineMap::zero(s(&[1]));
        let eta2 = skolem_threshold(&n2, s(&[1]), &f2, &zero).unwrap();
        assert_eq!(eta2, affine(s(&[1]), "3", &[]));

        // on {0 ≤ a₁ ≤ a₂} with f = x₂ − x₁, target y₁: η = 2y₁
        let tri = BasicPresburgerSet::natural(2)
            .with_inequality(Term::build(0, &[(1, 1), (0, -1)]), 0);
        let f3 = affine(Support::full(2), "0", &[(0, "-1"), (1, "1")]);
        let eta3 = skolem_threshold(&tri, s(&[1]), &f3, &y1).unwrap();
        assert_eq!(eta3, affine(s(&[1]), "0", &[(0, "2")]));
        // and a non-divergent map is refused
        let c = AffineMap::constant_int(1, Support::full(2));
        assert!(matches!(
            skolem_threshold(&n2, s(&[1]), &c, &zero),
            Err(Error::NoThreshold(_))
        ));
    }

    #[test]
    fn solver_handles_underdetermined_systems() {
        // single sample pins the constant, coefficient falls back to zero
        let rows = vec![(vec![Rat::one(), rat_int(3)], rat_int(7))];
        let sol = solve_affine(&rows, 2).unwrap();
        assert_eq!(
            rows[0].0[0].clone() * &sol[0] + rows[0].0[1].clone() * &sol[1],
            rat_int(7)
        );
        // inconsistent rows are rejected
        let bad = vec![
            (vec![Rat::one()], rat_int(1)),
            (vec![Rat::one()], rat_int(2)),
        ];
        assert!(solve_affine(&bad, 1).is_none());
    }
}
