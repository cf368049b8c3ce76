//! Affine bounding constructions: dominate a finite family of piecewise
//! affine maps from above by one diverging affine map, push an affine map
//! down to the socle of a precell, and minorize a family of diverging
//! affine maps by one diverging affine map (positive if the family is).

use num_traits::{Signed, Zero};

use crate::affine::AffineMap;
use crate::error::{Error, Result};
use crate::point::GammaPoint;
use crate::precell::Precell;
use crate::presburger::analysis::{limit_behavior, minimum, LimitBehavior};
use crate::presburger::set::{BasicPresburgerSet, DefinableSet};
use crate::value::{rat_ceil, ExtendedValue, Int, Rat};

/// A definable map given piecewise: finitely many affine maps on pairwise
/// disjoint basic domains.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PiecewiseAffineMap {
    pieces: Vec<(BasicPresburgerSet, AffineMap)>,
}

impl PiecewiseAffineMap {
    /// Checks exact pairwise disjointness of the domains.
    pub fn new(pieces: Vec<(BasicPresburgerSet, AffineMap)>) -> Result<PiecewiseAffineMap> {
        for i in 0..pieces.len() {
            for j in (i + 1)..pieces.len() {
                let (a, b) = (&pieces[i].0, &pieces[j].0);
                if a.support() == b.support()
                    && !a.definable().intersect(&b.definable()).is_empty()
                {
                    return Err(Error::DomainMismatch(format!(
                        "pieces {i} and {j} have overlapping domains"
                    )));
                }
            }
        }
        Ok(PiecewiseAffineMap { pieces })
    }

    /// A single affine map on a whole support slice.
    pub fn total(m: usize, map: AffineMap) -> PiecewiseAffineMap {
        let support = map.support();
        PiecewiseAffineMap {
            pieces: vec![(BasicPresburgerSet::slice(m, support), map)],
        }
    }

    pub fn pieces(&self) -> &[(BasicPresburgerSet, AffineMap)] {
        &self.pieces
    }

    pub fn maps(&self) -> impl Iterator<Item = &AffineMap> {
        self.pieces.iter().map(|(_, f)| f)
    }

    pub fn eval(&self, a: &GammaPoint) -> Result<ExtendedValue> {
        for (dom, f) in &self.pieces {
            if dom.contains(a) {
                return f.eval(a);
            }
        }
        Err(Error::DomainMismatch(
            "point outside every piece domain".to_string(),
        ))
    }
}

/// An integrally affine map f(x) = β + α·Σ_{i∈I} xᵢ with α ≥ 1 that bounds
/// every piece map from above on the non-negative set and tends to +∞ at
/// every frontier point.  α exceeds every positive coefficient and β every
/// constant term, both clamped to at least one.
pub fn dominate_affine(a: &DefinableSet, fs: &[PiecewiseAffineMap]) -> Result<AffineMap> {
    let support = a.support();
    let mut alpha = Int::from(1);
    let mut beta = Int::from(1);
    for pw in fs {
        for f in pw.maps() {
            if f.is_infinity() {
                return Err(Error::InfinitePiece);
            }
            for (_, c) in f.coeffs() {
                if c.is_positive() {
                    let bound = rat_ceil(c) + 1;
                    if bound > alpha {
                        alpha = bound;
                    }
                }
            }
            let bound = rat_ceil(&f.constant_term()) + 1;
            if bound > beta {
                beta = bound;
            }
        }
    }
    let mut coeffs = std::collections::BTreeMap::new();
    for i in support.iter() {
        coeffs.insert(i, Rat::from(alpha.clone()));
    }
    AffineMap::new(support, Rat::from(beta), coeffs)
}

/// f̂ on the socle: substitute the boundary the slope of the last
/// coordinate leans on (μ when the slope is non-negative, ν otherwise).
/// Requires the last coordinate in the support and f̄ = +∞ on every proper
/// face of the precell.
pub fn hat_map(a: &Precell, f: &AffineMap) -> Result<AffineMap> {
    if !a.with_last_coord() {
        return Err(Error::DomainMismatch(
            "the hat construction needs the last coordinate in the support".to_string(),
        ));
    }
    ensure_divergent_on_frontier(a, std::slice::from_ref(f))?;
    hat_unchecked(a, f)
}

fn hat_unchecked(a: &Precell, f: &AffineMap) -> Result<AffineMap> {
    let last = a.m() - 1;
    let p = &a.top_layer().expect("positive dimension").presentation;
    let alpha_m = f.coeff(last);
    let boundary = if alpha_m >= Rat::zero() { &p.mu } else { &p.nu };
    f.substitute(last, boundary).map_err(|_| {
        Error::NotDivergent(format!(
            "slope {alpha_m} on the last coordinate leans on the +inf boundary"
        ))
    })
}

/// Check that every map tends to +∞ at every proper face of the precell.
fn ensure_divergent_on_frontier(a: &Precell, fs: &[AffineMap]) -> Result<()> {
    let basic = a.to_basic();
    let support = a.support();
    for j in basic.face_tree().nodes {
        if j == support {
            continue;
        }
        for f in fs {
            match limit_behavior(&basic, j, f)? {
                LimitBehavior::DivergesToInfinity => {}
                other => {
                    return Err(Error::NotDivergent(format!(
                        "map {f} does not tend to +inf at the face {j}: {other:?}"
                    )))
                }
            }
        }
    }
    Ok(())
}

/// An affine map below every f_j on the precell, still tending to +∞ at
/// every frontier point; positive on the precell whenever every f_j is.
/// Follows the inductive construction: push the family to the socle,
/// minorize there with the floor −(max_j |α_{m,j}|·N_m + 1), climb back
/// with the slack term along μ when the upper boundary is infinite, and
/// rescale to clear the requested floor.
pub fn minorize_affine(a: &Precell, fs: &[AffineMap]) -> Result<AffineMap> {
    assert!(!fs.is_empty(), "minorizing an empty family");
    a.ensure_valid()?;
    for f in fs {
        if f.is_infinity() {
            return Err(Error::InfinitePiece);
        }
    }
    ensure_divergent_on_frontier(a, fs)?;
    let gamma = family_minimum(a, fs)?;
    let gamma_prime = if gamma.is_positive() {
        &gamma / Rat::from(Int::from(2))
    } else {
        &gamma - Rat::from(Int::from(1))
    };
    let lam = minorize_from(a, fs, &gamma_prime)?;
    if lam.denominator() > Int::from(1) {
        // Coordinates are non-negative on a precell, so flooring every
        // coefficient and the constant stays below the family.  Keep the
        // integral map only when it still diverges on the frontier and
        // remains ≥ 1, both checked exactly; the windows carved out of it
        // downstream then avoid denominator clearing entirely.
        let floored = AffineMap::new(
            lam.support(),
            lam.constant_term().floor(),
            lam.coeffs()
                .iter()
                .map(|(i, c)| (*i, c.floor()))
                .collect(),
        )?;
        let positive = matches!(
            minimum(&a.definable(), &floored),
            Ok(ExtendedValue::Finite(v)) if v >= Rat::from(Int::from(1))
        );
        if positive && ensure_divergent_on_frontier(a, std::slice::from_ref(&floored)).is_ok() {
            return Ok(floored);
        }
    }
    Ok(lam)
}

/// Least value of min_j f_j over the precell.
fn family_minimum(a: &Precell, fs: &[AffineMap]) -> Result<Rat> {
    let set = a.definable();
    let mut gamma: Option<Rat> = None;
    for f in fs {
        let value = match minimum(&set, f) {
            Ok(ExtendedValue::Finite(v)) => v,
            Ok(ExtendedValue::PlusInfinity) => continue,
            Err(Error::Unbounded) => {
                return Err(Error::NotDivergent(format!(
                    "map {f} is unbounded below, so it cannot tend to +inf at the frontier"
                )))
            }
            Err(e) => return Err(e),
        };
        if gamma.as_ref().map_or(true, |g| value < *g) {
            gamma = Some(value);
        }
    }
    gamma.ok_or(Error::InfinitePiece)
}

/// The parametrized recursion: an affine map f with γ′ ≤ f ≤ min_j f_j on
/// the precell and f̄ = +∞ on the frontier, assuming γ′ < min_j min f_j.
fn minorize_from(a: &Precell, fs: &[AffineMap], gamma_prime: &Rat) -> Result<AffineMap> {
    let support = a.support();
    let gamma = family_minimum(a, fs)?;
    debug_assert!(*gamma_prime < gamma, "floor above the family minimum");
    if a.m() == 0 || a.frontier()?.is_empty() {
        return Ok(AffineMap::constant(gamma, support));
    }
    if !a.with_last_coord() {
        // the last coordinate is pinned to +inf: the family already lives
        // over the socle, which carries the same faces
        return minorize_from(&a.socle(), fs, gamma_prime);
    }
    let last = a.m() - 1;
    let layer = a.top_layer().expect("positive dimension");
    let p = &layer.presentation;
    // normalise the family minimum to zero
    let gs: Vec<AffineMap> = fs.iter().map(|f| f.add_const(&-gamma.clone())).collect();
    let gamma_shifted = gamma_prime - &gamma;
    let max_slope = gs
        .iter()
        .map(|g| g.coeff(last).abs())
        .max()
        .expect("nonempty family");
    let eta_prime = -(max_slope * Rat::from(layer.modulus.clone()) + Rat::from(Int::from(1)));
    let floor = gamma_shifted.max(eta_prime.clone());
    let hats: Vec<AffineMap> = gs
        .iter()
        .map(|g| hat_unchecked(a, g))
        .collect::<Result<_>>()?;
    let g = minorize_from(&a.socle(), &hats, &eta_prime)?;
    let big = if p.nu.is_infinity() {
        let alpha = gs
            .iter()
            .map(|gj| gj.coeff(last))
            .min()
            .expect("nonempty family");
        if !alpha.is_positive() {
            return Err(Error::NotDivergent(format!(
                "slope {alpha} on the unbounded last coordinate cannot diverge"
            )));
        }
        let slack = AffineMap::coordinate(last, support)
            .sub(&p.mu.extend_support(support))
            .expect("finite lower boundary")
            .scale(&alpha);
        g.extend_support(support).add(&slack)
    } else {
        g.extend_support(support)
    };
    let rescaled = big.scale(&(&floor / &eta_prime));
    Ok(rescaled.add_const(&gamma))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::affine::affine;
    use crate::point::Support;
    use crate::precell::Layer;

    fn s(idx1: &[usize]) -> Support {
        Support::from_one_based(idx1).unwrap()
    }

    fn total(m: usize, f: AffineMap) -> PiecewiseAffineMap {
        PiecewiseAffineMap::total(m, f)
    }

    /// {a₁ ≥ 0, a₂ ≥ a₁}.
    fn half_strip() -> Precell {
        Precell::natural(1)
            .push_layer(Layer::new(
                1,
                true,
                AffineMap::coordinate(0, s(&[1])),
                AffineMap::infinity(s(&[1])),
                0,
            ))
            .unwrap()
    }

    #[test]
    fn domination_recipe_values() {
        let n2 = BasicPresburgerSet::natural(2).definable();
        let fs = vec![
            total(2, affine(Support::full(2), "-2", &[(0, "3")])),
            total(2, affine(Support::full(2), "7", &[(0, "1"), (1, "1")])),
        ];
        let f = dominate_affine(&n2, &fs).unwrap();
        assert_eq!(f, affine(Support::full(2), "8", &[(0, "4"), (1, "4")]));
        for x1 in 0i64..6 {
            for x2 in 0i64..6 {
                let p = GammaPoint::from_ints(vec![x1, x2]);
                let fv = f.eval(&p).unwrap();
                for pw in &fs {
                    assert!(pw.eval(&p).unwrap() <= fv);
                }
            }
        }

        let n1 = BasicPresburgerSet::natural(1).definable();
        let zero = dominate_affine(&n1, &[total(1, AffineMap::zero(Support::full(1)))]).unwrap();
        assert_eq!(zero, affine(Support::full(1), "1", &[(0, "1")]));

        let skew = dominate_affine(
            &n2,
            &[total(2, affine(Support::full(2), "0", &[(0, "-1"), (1, "1")]))],
        )
        .unwrap();
        assert_eq!(skew, affine(Support::full(2), "1", &[(0, "2"), (1, "2")]));
    }

    #[test]
    fn hat_substitutes_the_leaned_on_boundary() {
        let a = half_strip();
        let x2 = affine(Support::full(2), "0", &[(1, "1")]);
        assert_eq!(hat_map(&a, &x2).unwrap(), AffineMap::coordinate(0, s(&[1])));
        let sum = affine(Support::full(2), "0", &[(0, "1"), (1, "1")]);
        assert_eq!(hat_map(&a, &sum).unwrap(), affine(s(&[1]), "0", &[(0, "2")]));
        // a non-divergent map is refused
        let x1 = affine(Support::full(2), "0", &[(0, "1")]);
        assert!(matches!(hat_map(&a, &x1), Err(Error::NotDivergent(_))));
    }

    #[test]
    fn hat_uses_the_upper_boundary_for_negative_slope() {
        // {a₁ ≥ 0, a₁ ≤ a₂ ≤ 3a₁}, f = 4a₁ − a₂ ranges in [a₁, 3a₁]
        let a = Precell::natural(1)
            .push_layer(Layer::new(
                1,
                true,
                AffineMap::coordinate(0, s(&[1])),
                affine(s(&[1]), "0", &[(0, "3")]),
                0,
            ))
            .unwrap();
        let f = affine(Support::full(2), "0", &[(0, "4"), (1, "-1")]);
        let fhat = hat_map(&a, &f).unwrap();
        assert_eq!(fhat, AffineMap::coordinate(0, s(&[1])));
        // sandwich: min f(A) − |α_m|·N_m ≤ f̂(â) ≤ f(a) on a box
        let basic = a.to_basic();
        let min_f = match minimum(&a.definable(), &f).unwrap() {
            ExtendedValue::Finite(v) => v,
            _ => unreachable!(),
        };
        let floor = &min_f - Rat::from(Int::from(1));
        for x1 in 0i64..10 {
            for x2 in 0i64..30 {
                let p = GammaPoint::from_ints(vec![x1, x2]);
                if !basic.contains(&p) {
                    continue;
                }
                let below = fhat.eval(&p.socle()).unwrap();
                assert!(ExtendedValue::Finite(floor.clone()) <= below);
                assert!(below <= f.eval(&p).unwrap());
            }
        }
    }

    #[test]
    fn minorize_on_the_half_line() {
        let a = Precell::natural(1);
        let fs = vec![
            affine(Support::full(1), "3", &[(0, "2")]),
            affine(Support::full(1), "10", &[(0, "1")]),
        ];
        let f = minorize_affine(&a, &fs).unwrap();
        // the construction is deterministic: (3/2)/3 · x + 3
        assert_eq!(f, affine(Support::full(1), "3", &[(0, "1/2")]));
        for x in 0i64..50 {
            let p = GammaPoint::from_ints(vec![x]);
            let fv = f.eval(&p).unwrap();
            assert!(fv > ExtendedValue::zero());
            for fj in &fs {
                assert!(fv <= fj.eval(&p).unwrap());
            }
        }
        let basic = a.to_basic();
        assert_eq!(
            limit_behavior(&basic, Support::EMPTY, &f).unwrap(),
            LimitBehavior::DivergesToInfinity
        );
    }

    #[test]
    fn minorize_on_the_half_strip() {
        let a = half_strip();
        let fs = vec![
            affine(Support::full(2), "1", &[(1, "1")]),
            affine(Support::full(2), "1", &[(0, "1"), (1, "1")]),
        ];
        let f = minorize_affine(&a, &fs).unwrap();
        let basic = a.to_basic();
        for x1 in 0i64..12 {
            for x2 in x1..14 {
                let p = GammaPoint::from_ints(vec![x1, x2]);
                assert!(basic.contains(&p));
                let fv = f.eval(&p).unwrap();
                assert!(fv > ExtendedValue::zero(), "positive at ({x1},{x2})");
                for fj in &fs {
                    assert!(fv <= fj.eval(&p).unwrap(), "below the family at ({x1},{x2})");
                }
            }
        }
        for j in [s(&[1]), Support::EMPTY] {
            assert_eq!(
                limit_behavior(&basic, j, &f).unwrap(),
                LimitBehavior::DivergesToInfinity
            );
        }
        // a single map is its own admissible minorant family
        let single = minorize_affine(&a, &fs[..1]).unwrap();
        for x1 in 0i64..8 {
            for x2 in x1..10 {
                let p = GammaPoint::from_ints(vec![x1, x2]);
                assert!(single.eval(&p).unwrap() <= fs[0].eval(&p).unwrap());
            }
        }
    }

    #[test]
    fn piecewise_domains_must_be_disjoint() {
        let n1 = BasicPresburgerSet::natural(1);
        let overlap = PiecewiseAffineMap::new(vec![
            (n1.clone(), AffineMap::zero(Support::full(1))),
            (n1.clone(), AffineMap::constant_int(1, Support::full(1))),
        ]);
        assert!(overlap.is_err());
        let evens = n1.clone().with_congruence(
            crate::presburger::Term::var(0),
            0,
            2,
        );
        let odds = n1.with_congruence(crate::presburger::Term::var(0), 1, 2);
        let pw = PiecewiseAffineMap::new(vec![
            (evens, AffineMap::zero(Support::full(1))),
            (odds, AffineMap::constant_int(5, Support::full(1))),
        ])
        .unwrap();
        assert_eq!(
            pw.eval(&GammaPoint::from_ints(vec![2])).unwrap(),
            ExtendedValue::zero()
        );
        assert_eq!(
            pw.eval(&GammaPoint::from_ints(vec![3])).unwrap(),
            "5".parse().unwrap()
        );
    }
}
