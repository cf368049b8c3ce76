//! Dividing a largely continuous precell along its frontier.
//!
//! The elementary move inflates a facet: given a partition of a facet B of
//! the cell A, it thickens every part D into a cell C_D ⊆ A whose unique
//! facet is D, together with a certified threshold δ on B measuring how deep
//! inside A the inflated cells reach, and a partition of the remaining part
//! of A into cells whose proper faces avoid B entirely. Iterating the move
//! over a cover of the whole frontier yields a partition of A into monohedral
//! cells compatible with the given frontier complex, which in turn drives the
//! refinement of a closed complex into monohedral cells and the splitting of
//! cells and complexes into congruence classes with unchanged frontiers.

use num_traits::Signed;

use crate::affine::AffineMap;
use crate::bounding::{dominate_affine, minorize_affine, PiecewiseAffineMap};
use crate::error::{Error, Result};
use crate::point::Support;
use crate::precell::{Layer, Precell, PrecellComplex};
use crate::presburger::{skolem_threshold, StratifiedSet};
use crate::value::{Int, Rat};

/// How often each branch of the facet-inflation recursion ran.
///
/// The dispatch works on the facet's support J and the top boundary ν of the
/// cell: when the last coordinate carries no constraint the recursion drops
/// to the socle; `case1`/`case2` count the facets avoiding the last
/// coordinate (with the facet's socle equal to, or strictly below, the
/// cell's socle respectively); `case31`/`case32` count the facets containing
/// it, split on ν finite or infinite. `case31_bounded` counts the runs of
/// case 3.1 where the facet's own top boundary stays finite, which take a
/// shortened path through the factorized fibers.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct DivisionStats {
    pub socle_descents: u64,
    pub case1: u64,
    pub case2: u64,
    pub case31: u64,
    pub case31_bounded: u64,
    pub case32: u64,
}

/// Result of inflating a facet cover into the interior of a cell.
#[derive(Clone, Debug)]
pub struct InflationResult {
    /// One inflated cell per member of the cover, in the same order.
    pub inflated: Vec<Precell>,
    /// Partition of the rest of the cell; none of these has the inflated
    /// facet among its faces.
    pub rest: Vec<Precell>,
    /// Integrally affine threshold on the facet: any point of the cell
    /// projecting into the cover member D and lying at depth ≥ δ of its
    /// projection belongs to the cell inflated from D.
    pub delta: AffineMap,
    pub stats: DivisionStats,
}

fn rat(v: i64) -> Rat {
    Rat::from(Int::from(v))
}

fn totals(m: usize, maps: &[AffineMap]) -> Vec<PiecewiseAffineMap> {
    maps.iter()
        .map(|f| PiecewiseAffineMap::total(m, f.clone()))
        .collect()
}

/// Deterministic ordering of cells: larger supports first, then by support,
/// then by the printed presentation.
fn cell_key(c: &Precell) -> (usize, Support, String) {
    (c.m() - c.support().len(), c.support(), c.to_string())
}

/// Whether `s` is a face of `t` (possibly `t` itself).
fn is_face_of(s: &Precell, t: &Precell) -> Result<bool> {
    match t.face(s.support())? {
        Some(f) => Ok(f.definable().set_equal(&s.definable())),
        None => Ok(false),
    }
}

/// Inflates each member of a cover of the facet `b` into the interior
/// of `a`.
///
/// `f` is the depth requirement: every point of the inflated cell over D
/// keeps a distance of at least f of its projection into D. The members of
/// `family` must be valid monohedral precells with the same moduli as `a`,
/// all with the support of `b`, whose union is `b` exactly. Overlapping
/// members are allowed (the overlap of the inflated cells then projects
/// into the overlap of the members); when the family is a partition, the
/// inflated cells are pairwise disjoint and together with the rest they
/// partition `a`.
pub fn inflate_facet(
    a: &Precell,
    b: &Precell,
    f: &PiecewiseAffineMap,
    family: &[Precell],
) -> Result<InflationResult> {
    a.ensure_valid()?;
    let facets = a.facets()?;
    let canon = facets
        .iter()
        .find(|fc| fc.support() == b.support() && fc.definable().set_equal(&b.definable()))
        .ok_or_else(|| {
            Error::NotAFacet(format!(
                "the set with support {} is not a facet of the cell",
                b.support()
            ))
        })?;
    for (i, d) in family.iter().enumerate() {
        if d.m() != a.m() || d.moduli() != a.moduli() {
            return Err(Error::DomainMismatch(format!(
                "cover member {i} has different dimension or moduli"
            )));
        }
        d.ensure_valid()?;
        if !d.is_monohedral()? {
            return Err(Error::NotMonohedral(format!("cover member {i}")));
        }
        if d.support() != canon.support() {
            return Err(Error::CoverMismatch(format!(
                "cover member {i} has support {}, the facet has support {}",
                d.support(),
                canon.support()
            )));
        }
    }
    let mut union = None;
    for d in family {
        let set = d.definable();
        union = Some(match union {
            None => set,
            Some(u) => set.union(&u),
        });
    }
    match union {
        Some(u) if u.set_equal(&canon.definable()) => {}
        _ => {
            return Err(Error::CoverMismatch(
                "the family does not cover the facet".into(),
            ))
        }
    }
    let mut stats = DivisionStats::default();
    let (inflated, rest, delta) = inflate(a, canon, std::slice::from_ref(f), family, &mut stats)?;
    Ok(InflationResult {
        inflated,
        rest,
        delta,
        stats,
    })
}

/// The inflation recursion. `b` must be a facet of `a` presented as `a`'s
/// own face, and `family` a cover of `b` by monohedral precells mod the
/// moduli of `a`. The depth requirement is the finite family `fs`, replaced
/// on entry by one affine dominator on the facet. Returns the inflated
/// cells (aligned with `family`), the partition of the rest, and the depth
/// threshold.
fn inflate(
    a: &Precell,
    b: &Precell,
    fs: &[PiecewiseAffineMap],
    family: &[Precell],
    stats: &mut DivisionStats,
) -> Result<(Vec<Precell>, Vec<Precell>, AffineMap)> {
    let m = a.m();
    let j = b.support();

    if !a.with_last_coord() {
        // the last coordinate is pinned to +inf everywhere: work over the
        // socles and put the pinned coordinate back on every output
        stats.socle_descents += 1;
        let a_top = a.top_layer().expect("positive dimension").clone();
        let socles: Vec<Precell> = family.iter().map(|d| d.socle()).collect();
        let (cs, us, delta) = inflate(&a.socle(), &b.socle(), fs, &socles, stats)?;
        let lift = |cells: Vec<Precell>| -> Result<Vec<Precell>> {
            cells
                .into_iter()
                .map(|c| c.push_layer(a_top.clone()))
                .collect()
        };
        return Ok((lift(cs)?, lift(us)?, delta));
    }

    let last = m - 1;
    let a_top = a.top_layer().expect("positive dimension").clone();
    let nm: Int = a_top.modulus.clone();
    let nm_rat = Rat::from(nm.clone());
    let mu = a_top.presentation.mu.clone();
    let nu = a_top.presentation.nu.clone();
    let rho: Int = a_top.presentation.rho.clone();
    let x = a.socle();
    let f_dom = dominate_affine(&b.definable(), fs)?;

    if !j.contains(last) {
        let jh = j;
        if jh == x.support() {
            // the facet is the top of the cell: cut the fibers at an affine
            // height dominating both the depth requirement and one period
            stats.case1 += 1;
            let lam = dominate_affine(
                &x.definable(),
                &totals(m - 1, &[f_dom, mu.add_const(&nm_rat)]),
            )?;
            let u = x.push_layer(Layer::new(
                nm.clone(),
                true,
                mu.clone(),
                lam.clone(),
                rho.clone(),
            ))?;
            let mut cs = Vec::with_capacity(family.len());
            for d in family {
                cs.push(d.socle().push_layer(Layer::new(
                    nm.clone(),
                    true,
                    lam.add_const(&rat(1)),
                    nu.clone(),
                    rho.clone(),
                ))?);
            }
            let delta = lam.add_const(&rat(1)).extend_support(j);
            return Ok((cs, vec![u], delta));
        }
        // the facet sits above a proper face of the socle: inflate the
        // socles of the cover inside the socle of the cell, requiring depth
        // enough for both the original requirement and for the lower
        // boundary of the fibers to exceed it
        stats.case2 += 1;
        let y = b.socle();
        let eta = skolem_threshold(&x.to_basic(), jh, &mu, &f_dom)?;
        let socles: Vec<Precell> = family.iter().map(|d| d.socle()).collect();
        let (ss, ws, eps) = inflate(&x, &y, &totals(m - 1, &[f_dom, eta]), &socles, stats)?;
        let mut cs = Vec::with_capacity(ss.len());
        for s in ss {
            cs.push(s.push_layer(a_top.clone())?);
        }
        let mut us = Vec::with_capacity(ws.len());
        for w in ws {
            us.push(w.push_layer(a_top.clone())?);
        }
        return Ok((cs, us, eps.extend_support(j)));
    }

    // the facet constrains the last coordinate
    let jh = j.remove(last);
    let y = b.socle();
    let b_top = b.top_layer().expect("facet with the last coordinate");
    let alpha: Rat = f_dom.coeff(last);
    debug_assert!(alpha.is_positive(), "dominator without slope on the fiber");
    let mut f0_coeffs = f_dom.coeffs().clone();
    f0_coeffs.remove(&last);
    let f0 = AffineMap::new(jh, f_dom.constant_term(), f0_coeffs)?;
    let mu_star = b_top.presentation.mu.clone();
    let nu_bar = b_top.presentation.nu.clone();

    if nu.is_infinity() {
        // unbounded fibers: split them at an affine height and treat the
        // bounded lower part, the upper part joins the rest untouched
        stats.case32 += 1;
        let lam = dominate_affine(&x.definable(), &totals(m - 1, &[mu.add_const(&nm_rat)]))?;
        let a_minus = x.push_layer(Layer::new(
            nm.clone(),
            true,
            mu.clone(),
            lam.clone(),
            rho.clone(),
        ))?;
        let a_plus = x.push_layer(Layer::new(
            nm.clone(),
            true,
            lam.add_const(&rat(1)),
            nu.clone(),
            rho.clone(),
        ))?;
        let b_minus = a_minus.face(j)?.ok_or_else(|| {
            Error::Internal("the facet disappeared from the truncated cell".into())
        })?;
        let (cs, mut us, delta_minus) = inflate(&a_minus, &b_minus, fs, family, stats)?;
        let i_full = a.support();
        let eta = skolem_threshold(
            &a.to_basic(),
            j,
            &lam.extend_support(i_full),
            &AffineMap::coordinate(last, i_full),
        )?;
        let delta = dominate_affine(&b.definable(), &totals(m, &[delta_minus, eta]))?;
        us.push(a_plus);
        return Ok((cs, us, delta));
    }

    stats.case31 += 1;
    if !nu_bar.is_infinity() {
        // the fibers stay bounded towards the facet, so both boundaries
        // factor through the facet's socle: inflating the socles with a
        // requirement absorbing the largest fiber is enough
        stats.case31_bounded += 1;
        let f_tilde = f0.add(&nu_bar.scale(&alpha));
        let socles: Vec<Precell> = family.iter().map(|d| d.socle()).collect();
        let (ss, ws, eps) = inflate(&x, &y, &totals(m - 1, &[f_tilde]), &socles, stats)?;
        let mut cs = Vec::with_capacity(family.len());
        for (d, s) in family.iter().zip(ss) {
            let d_top = d
                .top_layer()
                .ok_or_else(|| Error::Internal("cover member of dimension zero".into()))?;
            if d_top.presentation.nu.is_infinity() {
                return Err(Error::Internal(
                    "unbounded cover member over a facet with bounded fibers".into(),
                ));
            }
            cs.push(s.push_layer(Layer::new(
                nm.clone(),
                true,
                d_top.presentation.mu.clone(),
                d_top.presentation.nu.clone(),
                rho.clone(),
            ))?);
        }
        let mut us = Vec::with_capacity(ws.len());
        for w in ws {
            us.push(w.push_layer(a_top.clone())?);
        }
        return Ok((cs, us, eps.extend_support(j)));
    }

    // bounded fibers growing without bound towards the facet
    //
    // Step 1: carve out a region over which the fiber length dominates
    // the depth requirement, and cut its top off at a slowly growing
    // affine height so that what remains above reaches the facet only
    // through faces avoiding the last coordinate.
    let g_piece = f0
        .add(&mu_star.scale(&alpha))
        .add_const(&(alpha.clone() * nm_rat.clone()));
    let g = dominate_affine(&y.definable(), &totals(m - 1, &[g_piece]))?;
    let nu_minus_mu = nu.sub(&mu)?;
    let two_nm = Int::from(2) * &nm;
    let eta1 = skolem_threshold(
        &x.to_basic(),
        jh,
        &nu_minus_mu,
        &g.add_const(&Rat::from(&two_nm + Int::from(2))),
    )?;
    let g2 = g.scale(&rat(2));
    let (ss1, ws1, eps1) = inflate(
        &x,
        &y,
        &totals(m - 1, &[eta1, g2]),
        std::slice::from_ref(&y),
        stats,
    )?;
    let x_ring = ss1
        .into_iter()
        .next()
        .expect("one inflated cell per cover member");
    let mut us = Vec::new();
    for w in ws1 {
        us.push(w.push_layer(a_top.clone())?);
    }
    let mut cands = vec![nu_minus_mu.add_const(&-Rat::from(&two_nm + Int::from(1)))];
    for k in x.support().minus(jh).iter() {
        let diff = AffineMap::coordinate(k, x.support()).sub(&g.extend_support(x.support()))?;
        cands.push(diff.scale(&alpha.recip()));
    }
    let lam = minorize_affine(&x_ring, &cands)?;
    let zeta = mu.add(&lam).add_const(&nm_rat);
    let nden = zeta.denominator();
    let v = x_ring.push_layer(Layer::new(
        nm.clone(),
        true,
        zeta.add_const(&Rat::new(Int::from(1), nden)),
        nu.clone(),
        rho.clone(),
    ))?;

    // Step 2: inside the cut region the fibers of the cover members are
    // reached by inflating their socles with depth enough for the cut
    // height to clear each member's own fiber ceiling.
    let mut fs2 = Vec::with_capacity(family.len());
    for d in family {
        let d_top = d
            .top_layer()
            .ok_or_else(|| Error::Internal("cover member of dimension zero".into()))?;
        let zeta_d = if d_top.presentation.nu.is_infinity() {
            d_top.presentation.mu.add_const(&nm_rat)
        } else {
            d_top.presentation.nu.clone()
        };
        let mut cyl = x_ring.to_basic();
        let d_socle = d.socle().to_basic();
        for (phi, gamma) in d_socle.inequalities() {
            cyl = cyl.with_inequality(phi.clone(), gamma.clone());
        }
        for (psi, r, n) in d_socle.congruences() {
            cyl = cyl.with_congruence(psi.clone(), r.clone(), n.clone());
        }
        fs2.push(skolem_threshold(&cyl, jh, &zeta, &zeta_d)?);
    }
    let y2 = x_ring
        .face(jh)?
        .ok_or_else(|| Error::Internal("the cut region lost its facet".into()))?;
    let socles: Vec<Precell> = family.iter().map(|d| d.socle()).collect();
    let (ss2, ws2, eps2) = inflate(&x_ring, &y2, &totals(m - 1, &fs2), &socles, stats)?;
    let mut cs = Vec::with_capacity(family.len());
    for (d, s) in family.iter().zip(ss2) {
        let d_top = d.top_layer().expect("checked above");
        let top = if d_top.presentation.nu.is_infinity() {
            Layer::new(
                nm.clone(),
                true,
                d_top.presentation.mu.clone(),
                zeta.clone(),
                rho.clone(),
            )
        } else {
            Layer::new(
                nm.clone(),
                true,
                d_top.presentation.mu.clone(),
                d_top.presentation.nu.clone(),
                rho.clone(),
            )
        };
        cs.push(s.push_layer(top)?);
    }
    us.push(v);
    for w in ws2 {
        us.push(w.push_layer(Layer::new(
            nm.clone(),
            true,
            mu.clone(),
            zeta.clone(),
            rho.clone(),
        ))?);
    }
    let t = x_ring.push_layer(a_top.clone())?;
    let i_full = a.support();
    let eta3 = skolem_threshold(
        &t.to_basic(),
        j,
        &zeta.extend_support(i_full),
        &AffineMap::coordinate(last, i_full),
    )?;
    let delta = dominate_affine(
        &b.definable(),
        &totals(
            m,
            &[eps1.extend_support(j), eta3, eps2.extend_support(j)],
        ),
    )?;
    Ok((cs, us, delta))
}

/// Partitions `a` into monohedral cells compatible with a monohedral
/// complex `ds` covering the frontier of `a`: each output cell lies over a
/// single member of `ds`, and for each member D exactly one output cell has
/// D as a facet and keeps depth ≥ f over it.
pub fn monohedral_division(
    a: &Precell,
    f: &PiecewiseAffineMap,
    ds: &PrecellComplex,
) -> Result<PrecellComplex> {
    Ok(monohedral_division_with_stats(a, f, ds)?.0)
}

/// Same as [`monohedral_division`], also reporting which inflation branches
/// ran.
pub fn monohedral_division_with_stats(
    a: &Precell,
    f: &PiecewiseAffineMap,
    ds: &PrecellComplex,
) -> Result<(PrecellComplex, DivisionStats)> {
    a.ensure_valid()?;
    if ds.m() != a.m() {
        return Err(Error::DomainMismatch(format!(
            "frontier complex of dimension {}, cell of dimension {}",
            ds.m(),
            a.m()
        )));
    }
    for (i, d) in ds.members().iter().enumerate() {
        if d.moduli() != a.moduli() {
            return Err(Error::DomainMismatch(format!(
                "frontier member {i} has different moduli"
            )));
        }
        if !d.is_monohedral()? {
            return Err(Error::NotMonohedral(format!("frontier member {i}")));
        }
    }
    let report = ds.check()?;
    if !report.is_complex() {
        return Err(Error::NotAComplex(report.violations.join("; ")));
    }
    let frontier = a.frontier()?;
    let given = StratifiedSet::from_parts(
        a.m(),
        ds.members().iter().map(|d| d.definable()).collect(),
    );
    let wanted =
        StratifiedSet::from_parts(a.m(), frontier.iter().map(|f| f.definable()).collect());
    if !given.set_equal(&wanted) {
        return Err(Error::CoverMismatch(
            "the complex does not cover the frontier of the cell exactly".into(),
        ));
    }
    let mut stats = DivisionStats::default();
    let mut cells = divide_worker(a, f, ds.members(), &mut stats, usize::MAX, &frontier)?;
    cells.sort_by_key(cell_key);
    Ok((PrecellComplex::new(a.m(), cells)?, stats))
}

/// The division recursion: inflate the first facet, then recurse into every
/// cell of the rest against the frontier members lying on its own frontier.
/// Terminates because the rest cells have strictly fewer proper faces.  The
/// caller supplies the precomputed frontier of `a`, which is also consulted
/// to route the family members, so each cell's faces are derived only once.
fn divide_worker(
    a: &Precell,
    f: &PiecewiseAffineMap,
    ds: &[Precell],
    stats: &mut DivisionStats,
    budget: usize,
    frontier: &[Precell],
) -> Result<Vec<Precell>> {
    if frontier.len() >= budget {
        return Err(Error::Internal(
            "division recursion did not shrink the frontier".into(),
        ));
    }
    if frontier.is_empty() {
        debug_assert!(ds.is_empty(), "frontier cells left over at a closed cell");
        return Ok(vec![a.clone()]);
    }
    // First facet in face order: the front of the frontier list is already
    // support-maximal among the proper faces.
    let supports: Vec<Support> = frontier.iter().map(|c| c.support()).collect();
    let b = frontier
        .iter()
        .find(|c| {
            let s = c.support();
            !supports.iter().any(|t| s != *t && s.is_subset(*t))
        })
        .expect("a nonempty frontier has a maximal member");
    let db: Vec<Precell> = ds
        .iter()
        .filter(|d| d.support() == b.support())
        .cloned()
        .collect();
    debug_assert!(!db.is_empty(), "frontier cover misses the chosen facet");
    let (cs, us, _delta) = inflate(a, b, std::slice::from_ref(f), &db, stats)?;
    let mut out = cs;
    let mut rest = us;
    rest.sort_by_key(cell_key);
    for u in rest {
        let u_frontier = u.frontier()?;
        let u_supports: Vec<Support> = u_frontier.iter().map(|c| c.support()).collect();
        let du: Vec<Precell> = ds
            .iter()
            .filter(|d| d.support() != u.support() && u_supports.contains(&d.support()))
            .cloned()
            .collect();
        out.extend(divide_worker(&u, f, &du, stats, frontier.len(), &u_frontier)?);
    }
    Ok(out)
}

/// Refines the face complex of `a` into a closed complex of monohedral
/// cells whose union is the closure of `a`.
pub fn monohedral_decomposition(a: &Precell) -> Result<PrecellComplex> {
    Ok(monohedral_decomposition_with_stats(a)?.0)
}

/// Same as [`monohedral_decomposition`], also reporting which inflation
/// branches ran.
pub fn monohedral_decomposition_with_stats(
    a: &Precell,
) -> Result<(PrecellComplex, DivisionStats)> {
    a.ensure_valid()?;
    let faces = a.faces()?;
    let mut stats = DivisionStats::default();
    let mut cells = refine_closed(&faces, &mut stats)?;
    cells.sort_by_key(cell_key);
    Ok((PrecellComplex::new(a.m(), cells)?, stats))
}

/// Refines a closed complex into monohedral cells: peel a maximal member,
/// refine the rest, then either keep the member (closed, or monohedral with
/// all its proper faces already refined members) or divide it against the
/// refined cells lying on its frontier.
fn refine_closed(members: &[Precell], stats: &mut DivisionStats) -> Result<Vec<Precell>> {
    if members.is_empty() {
        return Ok(Vec::new());
    }
    let mut order: Vec<usize> = (0..members.len()).collect();
    order.sort_by_key(|&i| cell_key(&members[i]));
    let mut pick = None;
    'candidates: for &i in &order {
        for (jdx, other) in members.iter().enumerate() {
            if jdx != i && is_face_of(&members[i], other)? {
                continue 'candidates;
            }
        }
        pick = Some(i);
        break;
    }
    let i = pick.ok_or_else(|| Error::Internal("no maximal member in a finite family".into()))?;
    let a = &members[i];
    let rest: Vec<Precell> = members
        .iter()
        .enumerate()
        .filter(|(jdx, _)| *jdx != i)
        .map(|(_, c)| c.clone())
        .collect();
    let mut ds = refine_closed(&rest, stats)?;
    let frontier = a.frontier()?;
    if frontier.is_empty() {
        ds.push(a.clone());
        ds.sort_by_key(cell_key);
        return Ok(ds);
    }
    if a.is_monohedral()? {
        let mut all_present = true;
        for face in &frontier {
            let found = ds.iter().any(|d| {
                d.support() == face.support() && d.definable().set_equal(&face.definable())
            });
            if !found {
                all_present = false;
                break;
            }
        }
        if all_present {
            ds.push(a.clone());
            ds.sort_by_key(cell_key);
            return Ok(ds);
        }
    }
    let mut da = Vec::new();
    for d in &ds {
        if d.support() == a.support() {
            continue;
        }
        if let Some(face) = frontier.iter().find(|c| c.support() == d.support()) {
            if d.definable().subset_of(&face.definable()) {
                da.push(d.clone());
            }
        }
    }
    let zero = PiecewiseAffineMap::total(a.m(), AffineMap::zero(Support::EMPTY));
    let divided = divide_worker(a, &zero, &da, stats, usize::MAX, &frontier)?;
    ds.extend(divided);
    ds.sort_by_key(cell_key);
    Ok(ds)
}

/// Splits a non-closed monohedral cell into `n` cells over finer moduli,
/// all with the same frontier as the input.
///
/// Returns the common finer moduli together with the cells.
pub fn split_monohedral(a: &Precell, n: usize) -> Result<(Vec<Int>, Vec<Precell>)> {
    if n == 0 {
        return Err(Error::DomainMismatch(
            "splitting into zero parts".into(),
        ));
    }
    a.ensure_valid()?;
    if a.is_closed()? {
        return Err(Error::ClosedInput);
    }
    if !a.is_monohedral()? {
        return Err(Error::NotMonohedral("the cell to split".into()));
    }
    split_worker(a, n)
}

fn split_worker(a: &Precell, n: usize) -> Result<(Vec<Int>, Vec<Precell>)> {
    if a.m() == 0 {
        return Err(Error::Internal(
            "splitting recursion reached dimension zero".into(),
        ));
    }
    let top = a.top_layer().expect("positive dimension").clone();
    if !top.present {
        let (mut moduli, cells) = split_worker(&a.socle(), n)?;
        moduli.push(top.modulus.clone());
        let lifted = cells
            .into_iter()
            .map(|c| c.push_layer(top.clone()))
            .collect::<Result<Vec<_>>>()?;
        return Ok((moduli, lifted));
    }
    if top.presentation.nu.is_infinity() {
        // unbounded fibers: refine the congruence on the last coordinate;
        // monohedrality rules out proper faces keeping that coordinate, so
        // the frontier is insensitive to the residue
        let nm = top.modulus.clone();
        let big = &nm * Int::from(n as u64);
        let mut moduli = a.moduli();
        *moduli.last_mut().expect("positive dimension") = big.clone();
        let socle = a.socle();
        let mut cells = Vec::with_capacity(n);
        for i in 0..n {
            let shift = &nm * Int::from(i as u64) + &top.presentation.rho;
            cells.push(socle.push_layer(Layer::new(
                big.clone(),
                true,
                top.presentation.mu.clone(),
                top.presentation.nu.clone(),
                shift,
            ))?);
        }
        return Ok((moduli, cells));
    }
    // bounded fibers: a non-closed monohedral cell then has a non-closed
    // monohedral socle, which carries all the frontier
    let (mut moduli, cells) = split_worker(&a.socle(), n)?;
    moduli.push(top.modulus.clone());
    let lifted = cells
        .into_iter()
        .map(|c| c.push_layer(top.clone()))
        .collect::<Result<Vec<_>>>()?;
    Ok((moduli, lifted))
}

/// Splits the union of a monohedral complex into `n` definable pieces with
/// the same frontier as the union.
///
/// The union must be relatively open: the faces of members that are not
/// members themselves must form a closed family. Each piece is a union of
/// basic slices, one per (member, split part) pair; when the complex is
/// closed the first piece is the whole union and the others are empty.
pub fn relative_split(complex: &PrecellComplex, n: usize) -> Result<Vec<StratifiedSet>> {
    if n == 0 {
        return Err(Error::DomainMismatch(
            "splitting into zero parts".into(),
        ));
    }
    let m = complex.m();
    let members = complex.members();
    for (i, s) in members.iter().enumerate() {
        s.ensure_valid()?;
        if !s.is_monohedral()? {
            return Err(Error::NotMonohedral(format!("member {i}")));
        }
    }
    let report = complex.check()?;
    if !report.is_complex() {
        return Err(Error::NotAComplex(report.violations.join("; ")));
    }
    let in_family = |p: &Precell| -> bool {
        members
            .iter()
            .any(|s| s.support() == p.support() && s.definable().set_equal(&p.definable()))
    };
    // the frontier family: faces of members that are not members; relative
    // openness asks it to be closed under taking faces
    let mut outside = Vec::new();
    for s in members {
        for face in s.faces()? {
            if !in_family(&face)
                && !outside.iter().any(|c: &Precell| {
                    c.support() == face.support() && c.definable().set_equal(&face.definable())
                })
            {
                outside.push(face);
            }
        }
    }
    for c in &outside {
        for face in c.faces()? {
            if in_family(&face) {
                return Err(Error::NotRelativelyOpen);
            }
        }
    }
    // group the members above each minimal one
    let mut minimal = Vec::new();
    'members: for (i, s) in members.iter().enumerate() {
        for (jdx, other) in members.iter().enumerate() {
            if jdx != i && is_face_of(other, s)? {
                continue 'members;
            }
        }
        minimal.push(i);
    }
    let mut groups: Vec<Vec<usize>> = vec![Vec::new(); minimal.len()];
    for (i, s) in members.iter().enumerate() {
        let mut owners = Vec::new();
        for (g, &mi) in minimal.iter().enumerate() {
            if mi == i || is_face_of(&members[mi], s)? {
                owners.push(g);
            }
        }
        match owners.as_slice() {
            [g] => groups[*g].push(i),
            _ => {
                return Err(Error::Internal(
                    "minimal members do not partition the complex".into(),
                ))
            }
        }
    }
    let mut pieces = vec![StratifiedSet::empty(m); n];
    for (g, &mi) in minimal.iter().enumerate() {
        let base = &members[mi];
        if base.is_closed()? {
            for &i in &groups[g] {
                pieces[0].insert(members[i].definable());
            }
            continue;
        }
        let (_, parts) = split_worker(base, n)?;
        for (k, part) in parts.iter().enumerate() {
            let part_rows = part.to_basic();
            for &i in &groups[g] {
                // the rows of the split part only mention coordinates in
                // the support of the minimal member, which embed in every
                // member above it
                let mut cyl = members[i].to_basic();
                for (phi, gamma) in part_rows.inequalities() {
                    cyl = cyl.with_inequality(phi.clone(), gamma.clone());
                }
                for (psi, r, nn) in part_rows.congruences() {
                    cyl = cyl.with_congruence(psi.clone(), r.clone(), nn.clone());
                }
                pieces[k].insert(cyl.definable());
            }
        }
    }
    Ok(pieces)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::affine::affine;
    use crate::point::GammaPoint;

    fn s(indices: &[usize]) -> Support {
        Support::from_indices(indices.iter().copied())
    }

    /// {a₁ ≥ 0, a₁ ≤ a₂ ≤ 2a₁}: bounded fibers, so the only proper face is
    /// the corner at (+∞, +∞), which is therefore the unique facet.
    fn bounded_wedge() -> Precell {
        Precell::new(vec![
            Layer::new(
                1,
                true,
                AffineMap::zero(Support::EMPTY),
                AffineMap::infinity(Support::EMPTY),
                0,
            ),
            Layer::new(
                1,
                true,
                AffineMap::coordinate(0, s(&[0])),
                affine(s(&[0]), "0", &[(0, "2")]),
                0,
            ),
        ])
        .unwrap()
    }

    fn square(side: i64) -> Precell {
        Precell::new(vec![
            Layer::new(
                1,
                true,
                AffineMap::zero(Support::EMPTY),
                AffineMap::constant_int(side, Support::EMPTY),
                0,
            ),
            Layer::new(
                1,
                true,
                AffineMap::zero(Support::EMPTY),
                AffineMap::constant_int(side, Support::EMPTY),
                0,
            ),
        ])
        .unwrap()
    }

    fn zero_requirement(m: usize) -> PiecewiseAffineMap {
        PiecewiseAffineMap::total(m, AffineMap::zero(Support::EMPTY))
    }

    #[test]
    fn inflating_the_horizontal_facet_of_the_natural_plane() {
        let a = Precell::natural(2);
        let facets = a.facets().unwrap();
        let b = facets
            .iter()
            .find(|f| f.support() == s(&[0]))
            .unwrap()
            .clone();
        let r = inflate_facet(&a, &b, &zero_requirement(2), std::slice::from_ref(&b)).unwrap();
        assert_eq!(r.stats.case1, 1);
        assert_eq!(r.inflated.len(), 1);
        assert_eq!(r.rest.len(), 1);
        let c_expected = Precell::natural(1)
            .push_layer(Layer::new(
                1,
                true,
                affine(s(&[0]), "3", &[(0, "2")]),
                AffineMap::infinity(s(&[0])),
                0,
            ))
            .unwrap();
        let u_expected = Precell::natural(1)
            .push_layer(Layer::new(
                1,
                true,
                AffineMap::zero(Support::EMPTY),
                affine(s(&[0]), "2", &[(0, "2")]),
                0,
            ))
            .unwrap();
        assert!(r.inflated[0].definable().set_equal(&c_expected.definable()));
        assert!(r.rest[0].definable().set_equal(&u_expected.definable()));
        assert_eq!(r.delta, affine(s(&[0]), "3", &[(0, "2")]));
        // the two cells partition the plane
        let both = r.inflated[0].definable().union(&r.rest[0].definable());
        assert!(both.set_equal(&a.definable()));
        assert!(r.inflated[0]
            .definable()
            .intersect(&r.rest[0].definable())
            .is_empty());
        // the inflated cell has the cover member as unique facet, the rest
        // does not see the facet at all
        let c_facets = r.inflated[0].facets().unwrap();
        assert_eq!(c_facets.len(), 1);
        assert!(c_facets[0].definable().set_equal(&b.definable()));
        for face in r.rest[0].faces().unwrap() {
            assert!(
                face.support() != b.support() || !face.definable().set_equal(&b.definable()),
                "the inflated facet survived as a face of the rest"
            );
        }
    }

    #[test]
    fn inflating_the_corner_facet_of_the_bounded_wedge() {
        let a = bounded_wedge();
        let b = a.face(Support::EMPTY).unwrap().unwrap();
        let r = inflate_facet(&a, &b, &zero_requirement(2), std::slice::from_ref(&b)).unwrap();
        assert_eq!(r.stats.case2, 1);
        assert_eq!(r.stats.case1, 1);
        let c_expected = Precell::new(vec![
            Layer::new(
                1,
                true,
                AffineMap::constant_int(4, Support::EMPTY),
                AffineMap::infinity(Support::EMPTY),
                0,
            ),
            Layer::new(
                1,
                true,
                AffineMap::coordinate(0, s(&[0])),
                affine(s(&[0]), "0", &[(0, "2")]),
                0,
            ),
        ])
        .unwrap();
        let u_expected = Precell::new(vec![
            Layer::new(
                1,
                true,
                AffineMap::zero(Support::EMPTY),
                AffineMap::constant_int(3, Support::EMPTY),
                0,
            ),
            Layer::new(
                1,
                true,
                AffineMap::coordinate(0, s(&[0])),
                affine(s(&[0]), "0", &[(0, "2")]),
                0,
            ),
        ])
        .unwrap();
        assert!(r.inflated[0].definable().set_equal(&c_expected.definable()));
        assert_eq!(r.rest.len(), 1);
        assert!(r.rest[0].definable().set_equal(&u_expected.definable()));
        assert_eq!(r.delta, AffineMap::constant_int(4, Support::EMPTY));
        let c_facets = r.inflated[0].facets().unwrap();
        assert_eq!(c_facets.len(), 1);
        assert!(c_facets[0].definable().set_equal(&b.definable()));
    }

    #[test]
    fn closed_cells_have_no_facet_to_inflate() {
        let a = square(5);
        let err = inflate_facet(&a, &a, &zero_requirement(2), std::slice::from_ref(&a))
            .unwrap_err();
        assert!(matches!(err, Error::NotAFacet(_)));
    }

    #[test]
    fn a_partial_cover_of_the_facet_is_rejected() {
        let a = Precell::natural(2);
        let facets = a.facets().unwrap();
        let b = facets
            .iter()
            .find(|f| f.support() == s(&[0]))
            .unwrap()
            .clone();
        let half = Precell::new(vec![
            Layer::new(
                1,
                true,
                AffineMap::constant_int(1, Support::EMPTY),
                AffineMap::infinity(Support::EMPTY),
                0,
            ),
            Layer::new(
                1,
                false,
                AffineMap::infinity(s(&[0])),
                AffineMap::infinity(s(&[0])),
                0,
            ),
        ])
        .unwrap();
        let err = inflate_facet(&a, &b, &zero_requirement(2), std::slice::from_ref(&half))
            .unwrap_err();
        assert!(matches!(err, Error::CoverMismatch(_)));
    }

    #[test]
    fn a_non_monohedral_cover_member_is_rejected() {
        let a = Precell::natural(3);
        let facets = a.facets().unwrap();
        let b = facets
            .iter()
            .find(|f| f.support() == s(&[0, 1]))
            .unwrap()
            .clone();
        let err = inflate_facet(&a, &b, &zero_requirement(3), std::slice::from_ref(&b))
            .unwrap_err();
        assert!(matches!(err, Error::NotMonohedral(_)));
    }

    #[test]
    fn splitting_the_natural_half_line_in_two() {
        let a = Precell::natural(1);
        let (moduli, cells) = split_monohedral(&a, 2).unwrap();
        assert_eq!(moduli, vec![Int::from(2)]);
        assert_eq!(cells.len(), 2);
        for v in 0..6i64 {
            let p = GammaPoint::from_ints(vec![v]);
            assert_eq!(cells[0].contains(&p), v % 2 == 0);
            assert_eq!(cells[1].contains(&p), v % 2 == 1);
        }
        let union = cells[0].definable().union(&cells[1].definable());
        assert!(union.set_equal(&a.definable()));
        assert!(cells[0]
            .definable()
            .intersect(&cells[1].definable())
            .is_empty());
        // identical frontiers
        for c in &cells {
            let fr = c.frontier().unwrap();
            assert_eq!(fr.len(), 1);
            assert_eq!(fr[0].support(), Support::EMPTY);
        }
    }

    #[test]
    fn splitting_with_one_part_returns_the_cell() {
        let a = bounded_wedge();
        let (moduli, cells) = split_monohedral(&a, 1).unwrap();
        assert_eq!(moduli, a.moduli());
        assert_eq!(cells.len(), 1);
        assert!(cells[0].definable().set_equal(&a.definable()));
    }

    #[test]
    fn splitting_a_closed_cell_is_rejected() {
        let err = split_monohedral(&square(4), 2).unwrap_err();
        assert!(matches!(err, Error::ClosedInput));
    }

    #[test]
    fn splitting_into_zero_parts_is_rejected() {
        let err = split_monohedral(&Precell::natural(1), 0).unwrap_err();
        assert!(matches!(err, Error::DomainMismatch(_)));
    }
}
