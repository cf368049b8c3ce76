//! The p-adic side: exact valuations on rationals, polytopes carried by
//! value precells, and the transfer of faces, divisions and splits through
//! the coordinatewise valuation.
//!
//! The field is modeled as ℚ with the p-adic valuation: every membership
//! question about the sets handled here factors through the valuation and
//! residue congruences, and both are exact on ℚ.  A polytope is stored as
//! its value precell; its points are the m-tuples of distinguished-unit
//! elements (zero, or p-power times a unit ≡ 1 mod p^M) whose valuation
//! vector lies in the cell.

use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::affine::AffineMap;
use crate::bounding::PiecewiseAffineMap;
use crate::division::{monohedral_division, relative_split, split_monohedral};
use crate::error::{Error, Result};
use crate::point::{GammaPoint, Support};
use crate::precell::{Precell, PrecellComplex};
use crate::presburger::set::{BasicPresburgerSet, DefinableSet, StratifiedSet};
use crate::value::{ExtendedValue, Int, Rat};

/// Deterministic Miller–Rabin; the base set is exact for numbers below
/// 3.3·10^24, far beyond any prime this library is pointed at.
fn is_prime(n: &Int) -> bool {
    if *n < Int::from(2) {
        return false;
    }
    for small in [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let s = Int::from(small);
        if *n == s {
            return true;
        }
        if (n % &s).is_zero() {
            return false;
        }
    }
    let one = Int::one();
    let two = Int::from(2);
    let n_minus_one = n - &one;
    let s = n_minus_one.trailing_zeros().unwrap_or(0) as usize;
    let d = &n_minus_one >> s;
    'witness: for a in [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = Int::from(a).modpow(&d, n);
        if x == one || x == n_minus_one {
            continue;
        }
        for _ in 1..s {
            x = x.modpow(&two, n);
            if x == n_minus_one {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Largest power of `p` dividing `n` together with the remaining factor.
fn split_power(p: &Int, n: &Int) -> (u64, Int) {
    debug_assert!(!n.is_zero());
    let mut k = 0u64;
    let mut u = n.clone();
    loop {
        let (q, r) = u.div_rem(p);
        if !r.is_zero() {
            return (k, u);
        }
        k += 1;
        u = q;
    }
}

/// A prime together with the congruence precision M of the distinguished
/// units 1 + p^M·(valuation ring).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PAdicContext {
    p: Int,
    precision: u32,
}

impl PAdicContext {
    pub fn new(p: impl Into<Int>, precision: u32) -> Result<PAdicContext> {
        let p = p.into();
        if precision == 0 {
            return Err(Error::DomainMismatch(
                "the congruence precision must be at least 1".into(),
            ));
        }
        if !is_prime(&p) {
            return Err(Error::DomainMismatch(format!("{p} is not prime")));
        }
        Ok(PAdicContext { p, precision })
    }

    pub fn p(&self) -> &Int {
        &self.p
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    /// The valuation: +∞ at zero, otherwise the multiplicity of p in the
    /// numerator minus its multiplicity in the denominator.
    pub fn pval(&self, x: &Rat) -> ExtendedValue {
        if x.is_zero() {
            return ExtendedValue::PlusInfinity;
        }
        let (vn, _) = split_power(&self.p, x.numer());
        let (vd, _) = split_power(&self.p, x.denom());
        ExtendedValue::from_int(Int::from(vn) - Int::from(vd))
    }

    /// Membership in the distinguished part of the valuation ring: zero, or
    /// a non-negative valuation with unit part ≡ 1 modulo p^precision.  The
    /// unit congruence is decided on the p-free numerator and denominator
    /// (the denominator is invertible modulo p^precision, so u ≡ 1 holds
    /// exactly when numerator ≡ denominator).
    pub fn in_dmr(&self, x: &Rat) -> bool {
        if x.is_zero() {
            return true;
        }
        let (vn, un) = split_power(&self.p, x.numer());
        let (vd, ud) = split_power(&self.p, x.denom());
        if vn < vd {
            return false;
        }
        let q = self.p.pow(self.precision);
        (un - ud).mod_floor(&q).is_zero()
    }

    /// Coordinatewise valuation vector of a rational tuple.
    pub fn valuations(&self, xs: &[Rat]) -> GammaPoint {
        GammaPoint::new(xs.iter().map(|x| self.pval(x)).collect())
            .expect("valuations are well-formed extended values")
    }

    /// w(x) = min over the coordinates of the valuation; +∞ for the origin
    /// and the empty tuple.
    pub fn w(&self, xs: &[Rat]) -> ExtendedValue {
        xs.iter()
            .map(|x| self.pval(x))
            .min()
            .unwrap_or(ExtendedValue::PlusInfinity)
    }
}

/// Coordinate projection in K^m: coordinates outside the support are set
/// to zero, the valuative counterpart of sending them to +∞.
pub fn project_point(xs: &[Rat], j: Support) -> Vec<Rat> {
    xs.iter()
        .enumerate()
        .map(|(i, x)| if j.contains(i) { x.clone() } else { Rat::zero() })
        .collect()
}

/// A polytope mod N: the inverse valuation image of a largely continuous
/// value precell, intersected with the distinguished tuples.
#[derive(Clone, Debug)]
pub struct PAdicPolytope {
    ctx: PAdicContext,
    value_cell: Precell,
}

impl PAdicPolytope {
    pub fn new(ctx: PAdicContext, value_cell: Precell) -> Result<PAdicPolytope> {
        value_cell.ensure_valid()?;
        Ok(PAdicPolytope { ctx, value_cell })
    }

    pub fn ctx(&self) -> &PAdicContext {
        &self.ctx
    }

    pub fn value_cell(&self) -> &Precell {
        &self.value_cell
    }

    pub fn m(&self) -> usize {
        self.value_cell.m()
    }

    pub fn moduli(&self) -> Vec<Int> {
        self.value_cell.moduli()
    }

    pub fn support(&self) -> Support {
        self.value_cell.support()
    }

    /// Definitional membership: every coordinate is a distinguished element
    /// and the valuation vector lies in the value cell.
    pub fn contains(&self, xs: &[Rat]) -> bool {
        xs.len() == self.m()
            && xs.iter().all(|x| self.ctx.in_dmr(x))
            && self.value_cell.contains(&self.ctx.valuations(xs))
    }

    /// The face with the given support, carried by the face of the value
    /// cell; equals the coordinate projection of the polytope.
    pub fn face(&self, j: Support) -> Result<Option<PAdicPolytope>> {
        Ok(self
            .value_cell
            .face(j)?
            .map(|cell| PAdicPolytope { ctx: self.ctx.clone(), value_cell: cell }))
    }

    pub fn faces(&self) -> Result<Vec<PAdicPolytope>> {
        Ok(self.lift_cells(self.value_cell.faces()?))
    }

    pub fn frontier(&self) -> Result<Vec<PAdicPolytope>> {
        Ok(self.lift_cells(self.value_cell.frontier()?))
    }

    pub fn facets(&self) -> Result<Vec<PAdicPolytope>> {
        Ok(self.lift_cells(self.value_cell.facets()?))
    }

    /// A monotope is a polytope whose value cell is monohedral.
    pub fn is_monotope(&self) -> Result<bool> {
        self.value_cell.is_monohedral()
    }

    pub fn is_closed(&self) -> Result<bool> {
        self.value_cell.is_closed()
    }

    /// A rational tuple realizing the given valuation vector: p^v on finite
    /// coordinates (a distinguished element for every precision) and zero on
    /// infinite ones.  None when the vector is outside the value cell.
    pub fn witness(&self, v: &GammaPoint) -> Option<Vec<Rat>> {
        if v.dim() != self.m() || !self.value_cell.contains(v) {
            return None;
        }
        let mut xs = Vec::with_capacity(v.dim());
        for c in v.coords() {
            match c {
                ExtendedValue::PlusInfinity => xs.push(Rat::zero()),
                ExtendedValue::Finite(q) => {
                    let k = q
                        .to_integer()
                        .to_i64()
                        .expect("value cell points have small coordinates");
                    let pk = if k >= 0 {
                        Rat::from(self.ctx.p.pow(k as u32))
                    } else {
                        Rat::new(Int::one(), self.ctx.p.pow((-k) as u32))
                    };
                    xs.push(pk);
                }
            }
        }
        Some(xs)
    }

    fn lift_cells(&self, cells: Vec<Precell>) -> Vec<PAdicPolytope> {
        cells
            .into_iter()
            .map(|cell| PAdicPolytope { ctx: self.ctx.clone(), value_cell: cell })
            .collect()
    }
}

/// The valuation of a boundary requirement ε, given directly as a piecewise
/// affine map on valuation vectors.
///
/// Storing v∘ε (rather than ε itself) bakes in the two hypotheses the
/// division transfer needs: the valuation image of every piece is plainly
/// definable, and on each valuation fiber of a face the represented ε has
/// one valuation, so the fiberwise maximum exists and equals the piece
/// value there.
#[derive(Clone, Debug)]
pub struct ValuationPiecewiseMap {
    map: PiecewiseAffineMap,
}

impl ValuationPiecewiseMap {
    pub fn new(pieces: Vec<(BasicPresburgerSet, AffineMap)>) -> Result<ValuationPiecewiseMap> {
        for (_, f) in &pieces {
            if f.is_infinity() {
                return Err(Error::DiscontinuousEpsilon(
                    "a branch of the valuation map takes the value +∞, so ε vanishes there"
                        .into(),
                ));
            }
        }
        let map = PiecewiseAffineMap::new(pieces).map_err(|e| {
            Error::DiscontinuousEpsilon(format!("the valuation branches overlap: {e}"))
        })?;
        Ok(ValuationPiecewiseMap { map })
    }

    /// One affine branch on a whole support slice.
    pub fn total(m: usize, map: AffineMap) -> Result<ValuationPiecewiseMap> {
        ValuationPiecewiseMap::new(vec![(
            BasicPresburgerSet::slice(m, map.support()),
            map,
        )])
    }

    pub fn as_piecewise(&self) -> &PiecewiseAffineMap {
        &self.map
    }

    pub fn eval(&self, v: &GammaPoint) -> Result<ExtendedValue> {
        self.map.eval(v)
    }

    /// Every face listed must be covered by branches of its own support:
    /// the represented ε is total on the frontier it is supposed to bound.
    fn ensure_covers(&self, faces: &[Precell]) -> Result<()> {
        for face in faces {
            let mut union: Option<DefinableSet> = None;
            for (dom, _) in self.map.pieces() {
                if dom.support() != face.support() {
                    continue;
                }
                let d = dom.definable();
                union = Some(match union {
                    None => d,
                    Some(u) => u.union(&d),
                });
            }
            let covered = match union {
                None => false,
                Some(u) => face.definable().subset_of(&u),
            };
            if !covered {
                return Err(Error::DiscontinuousEpsilon(format!(
                    "the valuation map leaves part of the face {face} uncovered"
                )));
            }
        }
        Ok(())
    }
}

/// Partition of a polytope into monotopes lifting a frontier complex, with
/// the valuative distance bound w(u − π_J(u)) ≥ v(ε(π_J(u))) on each cell
/// against its facet's support J.
///
/// The value side does all the work: the fiberwise maxima of v∘ε assemble
/// into the piecewise affine requirement (here: the stored branches
/// themselves), the value cell is divided against the value complex, and
/// the output cells are pulled back through the valuation.
pub fn monotopic_division(
    s: &PAdicPolytope,
    eps: &ValuationPiecewiseMap,
    ts: &[PAdicPolytope],
) -> Result<Vec<PAdicPolytope>> {
    for t in ts {
        if *t.ctx() != s.ctx {
            return Err(Error::DomainMismatch(
                "all polytopes in a division must share the prime and precision".into(),
            ));
        }
    }
    let vs = &s.value_cell;
    eps.ensure_covers(&vs.frontier()?)?;
    let vt = PrecellComplex::new(
        vs.m(),
        ts.iter().map(|t| t.value_cell.clone()).collect(),
    )?;
    let complex = monohedral_division(vs, eps.as_piecewise(), &vt)?;
    Ok(complex
        .members()
        .iter()
        .map(|c| PAdicPolytope { ctx: s.ctx.clone(), value_cell: c.clone() })
        .collect())
}

/// Splits a non-closed monotope into n monotopes over finer moduli, all
/// with the same frontier; the pieces are the valuation preimages of the
/// split value cells.
pub fn split_polytope(s: &PAdicPolytope, n: usize) -> Result<(Vec<Int>, Vec<PAdicPolytope>)> {
    let (moduli, cells) = split_monohedral(&s.value_cell, n)?;
    Ok((
        moduli,
        cells
            .into_iter()
            .map(|cell| PAdicPolytope { ctx: s.ctx.clone(), value_cell: cell })
            .collect(),
    ))
}

/// A definable region of distinguished tuples, given by the stratified set
/// of its valuation vectors; the pieces of a relative split live here.
#[derive(Clone, Debug)]
pub struct PAdicRegion {
    ctx: PAdicContext,
    values: StratifiedSet,
}

impl PAdicRegion {
    pub fn ctx(&self) -> &PAdicContext {
        &self.ctx
    }

    pub fn values(&self) -> &StratifiedSet {
        &self.values
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn contains(&self, xs: &[Rat]) -> bool {
        xs.len() == self.values.m()
            && xs.iter().all(|x| self.ctx.in_dmr(x))
            && self.values.contains(&self.ctx.valuations(xs))
    }
}

/// Splits the union of a complex of monotopes into n pieces sharing its
/// frontier, by relative splitting on the value side.
pub fn relative_split_polytope(polys: &[PAdicPolytope], n: usize) -> Result<Vec<PAdicRegion>> {
    let Some(first) = polys.first() else {
        return Err(Error::DomainMismatch("splitting an empty family".into()));
    };
    for p in polys {
        if *p.ctx() != first.ctx {
            return Err(Error::DomainMismatch(
                "all polytopes in a split must share the prime and precision".into(),
            ));
        }
    }
    let complex = PrecellComplex::new(
        first.m(),
        polys.iter().map(|p| p.value_cell.clone()).collect(),
    )?;
    let pieces = relative_split(&complex, n)?;
    Ok(pieces
        .into_iter()
        .map(|values| PAdicRegion { ctx: first.ctx.clone(), values })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::precell::Layer;

    fn s(indices: &[usize]) -> Support {
        Support::from_indices(indices.iter().copied())
    }

    fn rat(n: i64, d: i64) -> Rat {
        Rat::new(Int::from(n), Int::from(d))
    }

    fn ctx(p: i64, m: u32) -> PAdicContext {
        PAdicContext::new(p, m).unwrap()
    }

    #[test]
    fn valuations_of_rationals() {
        let c = ctx(3, 1);
        assert_eq!(c.pval(&rat(9, 2)), ExtendedValue::from_int(2));
        assert_eq!(c.pval(&rat(1, 3)), ExtendedValue::from_int(-1));
        assert_eq!(c.pval(&rat(-27, 5)), ExtendedValue::from_int(3));
        let c2 = ctx(2, 1);
        assert_eq!(c2.pval(&Rat::zero()), ExtendedValue::PlusInfinity);
        assert_eq!(c2.pval(&rat(12, 5)), ExtendedValue::from_int(2));
    }

    #[test]
    fn distinguished_membership() {
        let c = ctx(3, 1);
        assert!(c.in_dmr(&rat(4, 1)));
        assert!(!c.in_dmr(&rat(2, 1)));
        assert!(c.in_dmr(&Rat::zero()));
        assert!(c.in_dmr(&rat(-2, 1)));
        assert!(!c.in_dmr(&rat(1, 3)));
        assert!(c.in_dmr(&rat(9, 1)));
        assert!(!c.in_dmr(&rat(9, 2)));
        assert!(c.in_dmr(&rat(4, 7)));
        let fine = ctx(3, 2);
        assert!(!fine.in_dmr(&rat(4, 1)));
        assert!(fine.in_dmr(&rat(10, 1)));
    }

    #[test]
    fn primality_is_checked() {
        assert!(PAdicContext::new(4, 1).is_err());
        assert!(PAdicContext::new(2, 0).is_err());
        assert!(PAdicContext::new(97, 2).is_ok());
    }

    #[test]
    fn powers_of_p_are_distinguished_at_every_precision() {
        for p in [2i64, 3, 5] {
            for m in 1..=3u32 {
                let c = ctx(p, m);
                for k in 0..5u32 {
                    assert!(c.in_dmr(&Rat::from(Int::from(p).pow(k))));
                }
            }
        }
    }

    fn wedge_polytope(p: i64, m: u32) -> PAdicPolytope {
        let cell = Precell::natural(1)
            .push_layer(Layer::new(
                1,
                true,
                AffineMap::coordinate(0, s(&[0])),
                AffineMap::infinity(s(&[0])),
                0,
            ))
            .unwrap();
        PAdicPolytope::new(ctx(p, m), cell).unwrap()
    }

    #[test]
    fn polytope_membership_follows_the_definition() {
        let poly = wedge_polytope(3, 1);
        assert!(poly.contains(&[rat(1, 1), rat(9, 1)]));
        assert!(!poly.contains(&[rat(1, 1), rat(2, 1)]));
        assert!(!poly.contains(&[rat(0, 1), rat(1, 1)]));
        assert!(!poly.contains(&[rat(9, 1), rat(1, 1)]));
        assert!(poly.contains(&[rat(0, 1), rat(0, 1)]));
    }

    #[test]
    fn faces_transfer_through_the_valuation() {
        let poly = wedge_polytope(3, 1);
        let face = poly.face(s(&[0])).unwrap().unwrap();
        assert_eq!(face.support(), s(&[0]));
        assert!(face.contains(&[rat(1, 1), Rat::zero()]));
        let projected = project_point(&[rat(1, 1), rat(9, 1)], s(&[0]));
        assert!(face.contains(&projected));
        assert!(poly.face(s(&[1])).unwrap().is_none());
        let own = poly.face(s(&[0, 1])).unwrap().unwrap();
        assert!(own.contains(&[rat(1, 1), rat(9, 1)]));
    }

    #[test]
    fn witnesses_realize_value_points() {
        let poly = wedge_polytope(5, 2);
        let v = GammaPoint::from_ints(vec![1, 3]);
        let xs = poly.witness(&v).unwrap();
        assert!(poly.contains(&xs));
        assert_eq!(poly.ctx().valuations(&xs), v);
        let off = GammaPoint::from_ints(vec![3, 1]);
        assert!(poly.witness(&off).is_none());
        let corner = GammaPoint::new(vec![
            ExtendedValue::PlusInfinity,
            ExtendedValue::PlusInfinity,
        ])
        .unwrap();
        assert!(poly.witness(&corner).is_none(), "the corner is not in the open cell");
    }

    #[test]
    fn valuation_maps_reject_overlaps_and_infinity() {
        let err = ValuationPiecewiseMap::new(vec![(
            BasicPresburgerSet::slice(2, s(&[0])),
            AffineMap::infinity(s(&[0])),
        )])
        .unwrap_err();
        assert!(matches!(err, Error::DiscontinuousEpsilon(_)));
        let err = ValuationPiecewiseMap::new(vec![
            (
                BasicPresburgerSet::slice(2, s(&[0])),
                AffineMap::zero(s(&[0])),
            ),
            (
                BasicPresburgerSet::slice(2, s(&[0])),
                AffineMap::coordinate(0, s(&[0])),
            ),
        ])
        .unwrap_err();
        assert!(matches!(err, Error::DiscontinuousEpsilon(_)));
    }

    #[test]
    fn w_distance_matches_the_value_side_proxy() {
        let c = ctx(3, 1);
        let u = [rat(3, 1), rat(9, 1), rat(27, 1)];
        let j = s(&[0]);
        let diff: Vec<Rat> = u
            .iter()
            .zip(project_point(&u, j))
            .map(|(a, b)| a - &b)
            .collect();
        assert_eq!(c.w(&diff), c.valuations(&u).delta(j));
    }
}
