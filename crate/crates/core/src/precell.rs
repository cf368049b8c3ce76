//! Precells mod N: subsets of a support slice of Γ^m presented one
//! coordinate at a time by affine sandwiches μ(â) ≤ a_k ≤ ν(â) with a
//! congruence a_k ≡ ρ [N_k].  The module validates presentations, computes
//! faces together with their inherited presentations, decides
//! monohedrality, relates faces to faces of the socle, and checks
//! complexes of precells.

use std::fmt;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::affine::AffineMap;
use crate::error::{Error, Result};
use crate::point::{GammaPoint, Support};
use crate::presburger::analysis::{limit_behavior, LimitBehavior};
use crate::presburger::formula::Formula;
use crate::presburger::qe::decide;
use crate::presburger::set::{BasicPresburgerSet, DefinableSet};
use crate::presburger::term::Term;
use crate::value::{ExtendedValue, Int};

/// One affine sandwich: lower and upper boundary maps on the socle plus a
/// congruence class for the coordinate they bound.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation {
    pub mu: AffineMap,
    pub nu: AffineMap,
    pub rho: Int,
}

impl Presentation {
    pub fn new(mu: AffineMap, nu: AffineMap, rho: impl Into<Int>) -> Presentation {
        Presentation {
            mu,
            nu,
            rho: rho.into(),
        }
    }
}

/// The data attached to one coordinate of a precell tower.  `present`
/// records whether the coordinate belongs to the support; when it does not,
/// the coordinate is pinned to +∞ and the upper boundary must be the +∞
/// map (otherwise the slice would be empty).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Layer {
    pub modulus: Int,
    pub present: bool,
    pub presentation: Presentation,
}

impl Layer {
    pub fn new(
        modulus: impl Into<Int>,
        present: bool,
        mu: AffineMap,
        nu: AffineMap,
        rho: impl Into<Int>,
    ) -> Layer {
        Layer {
            modulus: modulus.into(),
            present,
            presentation: Presentation::new(mu, nu, rho),
        }
    }
}

/// A precell mod N in Γ^m, stored as its full presentation tower: layer k
/// bounds coordinate k over the socle formed by the layers before it.  The
/// zero-dimensional precell is the empty tower.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Precell {
    layers: Vec<Layer>,
}

impl Precell {
    /// The unique precell of Γ⁰.
    pub fn dim0() -> Precell {
        Precell { layers: Vec::new() }
    }

    /// Structural construction: checks shapes (moduli, residues, boundary
    /// supports), not the semantic conditions handled by `validate`.
    pub fn new(layers: Vec<Layer>) -> Result<Precell> {
        let mut socle_support = Support::EMPTY;
        for (k, layer) in layers.iter().enumerate() {
            if !layer.modulus.is_positive() {
                return Err(Error::InvalidPrecell(format!(
                    "coordinate {}: modulus {} is not positive",
                    k + 1,
                    layer.modulus
                )));
            }
            let p = &layer.presentation;
            if p.rho.is_negative() || p.rho >= layer.modulus {
                return Err(Error::InvalidPrecell(format!(
                    "coordinate {}: residue {} is not in [0, {})",
                    k + 1,
                    p.rho,
                    layer.modulus
                )));
            }
            for (name, map) in [("lower", &p.mu), ("upper", &p.nu)] {
                if !map.support().is_subset(socle_support) {
                    return Err(Error::InvalidPrecell(format!(
                        "coordinate {}: {} boundary depends on {}, outside the socle support {}",
                        k + 1,
                        name,
                        map.support(),
                        socle_support
                    )));
                }
            }
            if layer.present && p.mu.is_infinity() {
                return Err(Error::InvalidPrecell(format!(
                    "coordinate {}: kept coordinate has the +inf lower boundary",
                    k + 1
                )));
            }
            if !layer.present && !p.nu.is_infinity() {
                return Err(Error::InvalidPrecell(format!(
                    "coordinate {}: omitted coordinate needs the +inf upper boundary",
                    k + 1
                )));
            }
            if layer.present {
                socle_support = socle_support.insert(k);
            }
        }
        Ok(Precell { layers })
    }

    /// ℕ^m as a precell mod (1, …, 1).
    pub fn natural(m: usize) -> Precell {
        let mut layers = Vec::with_capacity(m);
        for k in 0..m {
            let s = Support::full(k);
            layers.push(Layer::new(
                1,
                true,
                AffineMap::zero(s),
                AffineMap::infinity(s),
                0,
            ));
        }
        Precell { layers }
    }

    pub fn m(&self) -> usize {
        self.layers.len()
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    /// The support I ⊆ {0, …, m−1} of kept coordinates.
    pub fn support(&self) -> Support {
        Support::from_indices(
            self.layers
                .iter()
                .enumerate()
                .filter(|(_, l)| l.present)
                .map(|(k, _)| k),
        )
    }

    /// The precell of the first m−1 coordinates.  Panics on the tower of
    /// dimension zero, which has no socle.
    pub fn socle(&self) -> Precell {
        assert!(!self.layers.is_empty(), "the empty tower has no socle");
        Precell {
            layers: self.layers[..self.layers.len() - 1].to_vec(),
        }
    }

    pub fn top_layer(&self) -> Option<&Layer> {
        self.layers.last()
    }

    pub fn with_last_coord(&self) -> bool {
        self.layers.last().map_or(false, |l| l.present)
    }

    pub fn moduli(&self) -> Vec<Int> {
        self.layers.iter().map(|l| l.modulus.clone()).collect()
    }

    pub fn push_layer(&self, layer: Layer) -> Result<Precell> {
        let mut layers = self.layers.clone();
        layers.push(layer);
        Precell::new(layers)
    }

    /// Membership decided layer by layer from the presentation itself,
    /// independently of the constraint-set route.
    pub fn contains(&self, a: &GammaPoint) -> bool {
        if a.dim() != self.m() || a.support() != self.support() {
            return false;
        }
        for (k, layer) in self.layers.iter().enumerate() {
            let prefix = GammaPoint::new(a.coords()[..k].to_vec())
                .expect("prefix of a valid point");
            let p = &layer.presentation;
            match a.coord(k) {
                ExtendedValue::PlusInfinity => {
                    debug_assert!(!layer.present);
                }
                ExtendedValue::Finite(v) => {
                    let value = ExtendedValue::Finite(v.clone());
                    let lo = p.mu.eval(&prefix).expect("boundary over socle support");
                    let hi = p.nu.eval(&prefix).expect("boundary over socle support");
                    if lo > value || value > hi {
                        return false;
                    }
                    let t = v.to_integer();
                    if !(&t - &p.rho).mod_floor(&layer.modulus).is_zero() {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// The constraint rows a layer contributes, with denominators cleared:
    /// used both by `to_basic` and by the fiber checks in `validate`.
    fn layer_rows(&self, k: usize) -> (Vec<(Term, Int)>, Vec<(Term, Int, Int)>) {
        let layer = &self.layers[k];
        let p = &layer.presentation;
        let mut ineqs = Vec::new();
        let mut congs = Vec::new();
        if !layer.present {
            return (ineqs, congs);
        }
        // lower: d·x_k − d·μ_hom ≥ d·μ_const
        if !p.mu.is_infinity() {
            let d = p.mu.denominator();
            let dr = crate::value::Rat::from(d.clone());
            let mut t = Term::var(k).scale(&d);
            for (i, c) in p.mu.coeffs() {
                t.set_coeff(*i, t.coeff(*i) - (c * &dr).to_integer());
            }
            ineqs.push((t, (p.mu.constant_term() * &dr).to_integer()));
        }
        // upper: d·ν_hom − d·x_k ≥ −d·ν_const
        if !p.nu.is_infinity() {
            let d = p.nu.denominator();
            let dr = crate::value::Rat::from(d.clone());
            let mut t = Term::var(k).scale(&d).neg();
            for (i, c) in p.nu.coeffs() {
                t.set_coeff(*i, t.coeff(*i) + (c * &dr).to_integer());
            }
            ineqs.push((t, -(p.nu.constant_term() * &dr).to_integer()));
        }
        if layer.modulus > Int::one() {
            congs.push((Term::var(k), p.rho.clone(), layer.modulus.clone()));
        }
        (ineqs, congs)
    }

    /// Unfold the tower into one basic Presburger set with integral rows.
    pub fn to_basic(&self) -> BasicPresburgerSet {
        let mut ineqs = Vec::new();
        let mut congs = Vec::new();
        for k in 0..self.m() {
            let (i, c) = self.layer_rows(k);
            ineqs.extend(i);
            congs.extend(c);
        }
        BasicPresburgerSet::new(self.m(), self.support(), ineqs, congs)
            .expect("a structurally valid tower unfolds to a valid basic set")
    }

    pub fn definable(&self) -> DefinableSet {
        self.to_basic().definable()
    }

    /// Semantic validation: socle nonemptiness, non-negative boundaries,
    /// fibers meeting the congruence class, and large continuity of both
    /// boundaries at every face of the socle.
    pub fn validate(&self) -> ValidationReport {
        let mut issues = Vec::new();
        for k in 0..self.m() {
            let socle = Precell {
                layers: self.layers[..k].to_vec(),
            };
            let socle_set = socle.to_basic();
            if socle_set.is_empty() && k > 0 {
                issues.push(format!("the socle below coordinate {} is empty", k + 1));
                break;
            }
            let layer = &self.layers[k];
            let p = &layer.presentation;
            let socle_vars = socle_set.definable().support_vars();
            let phi = socle_set.membership_formula();
            for (name, map) in [("lower", &p.mu), ("upper", &p.nu)] {
                if map.is_infinity() {
                    continue;
                }
                let (t, _) = crate::presburger::analysis::affine_to_term(map);
                let nonneg =
                    Formula::forall_many(&socle_vars, Formula::implies(phi.clone(), Formula::ge0(t)));
                if !decide(&nonneg) {
                    issues.push(format!(
                        "{} boundary of coordinate {} takes a negative value on the socle",
                        name,
                        k + 1
                    ));
                }
            }
            if layer.present {
                let (rows, congs) = self.layer_rows(k);
                let mut fiber: Vec<Formula> = rows
                    .iter()
                    .map(|(t, g)| Formula::ge0(t.add_const(-g.clone())))
                    .collect();
                for (t, rho, n) in &congs {
                    fiber.push(Formula::congruent(t, rho.clone(), n.clone()));
                }
                let some_fiber = Formula::forall_many(
                    &socle_vars,
                    Formula::implies(phi.clone(), Formula::exists(k, Formula::And(fiber))),
                );
                if !decide(&some_fiber) {
                    issues.push(format!(
                        "coordinate {} has an empty fiber over some socle point",
                        k + 1
                    ));
                }
            }
            for jh in socle_set.face_tree().nodes {
                for (name, map) in [("lower", &p.mu), ("upper", &p.nu)] {
                    if map.is_infinity() {
                        continue;
                    }
                    match limit_behavior(&socle_set, jh, map) {
                        Ok(LimitBehavior::NotLargelyContinuous) => issues.push(format!(
                            "{} boundary of coordinate {} has no limit along the socle face {}",
                            name,
                            k + 1,
                            jh
                        )),
                        Ok(_) => {}
                        Err(e) => issues.push(format!(
                            "{} boundary of coordinate {}: classification failed along {}: {}",
                            name,
                            k + 1,
                            jh,
                            e
                        )),
                    }
                }
            }
        }
        if issues.is_empty() && self.m() > 0 && self.to_basic().is_empty() {
            issues.push("the precell is empty".to_string());
        }
        ValidationReport { issues }
    }

    pub fn ensure_valid(&self) -> Result<()> {
        let report = self.validate();
        if report.is_valid() {
            Ok(())
        } else {
            Err(Error::InvalidPrecell(report.issues.join("; ")))
        }
    }

    /// The face of support J, with the inherited presentation
    /// (μ̄|_Y, ν̄|_Y, ρ) over the corresponding face Y of the socle; None
    /// when the face is empty.
    pub fn face(&self, j: Support) -> Result<Option<Precell>> {
        if self.m() == 0 {
            return Ok(if j.is_empty() { Some(Precell::dim0()) } else { None });
        }
        if !j.is_subset(self.support()) {
            return Ok(None);
        }
        let last = self.m() - 1;
        let jh = j.remove(last);
        let socle = self.socle();
        let Some(y) = socle.face(jh)? else {
            return Ok(None);
        };
        let socle_set = socle.to_basic();
        let layer = self.layers.last().unwrap();
        let p = &layer.presentation;
        let mu_bar = extend_map(&socle_set, jh, &p.mu)?;
        let nu_bar = extend_map(&socle_set, jh, &p.nu)?;
        let face_layer = if j.contains(last) {
            if mu_bar.is_infinity() {
                return Ok(None);
            }
            Layer::new(layer.modulus.clone(), true, mu_bar, nu_bar, p.rho.clone())
        } else {
            if !nu_bar.is_infinity() {
                return Ok(None);
            }
            Layer::new(layer.modulus.clone(), false, mu_bar, nu_bar, p.rho.clone())
        };
        Ok(Some(y.push_layer(face_layer)?))
    }

    /// All nonempty faces (the precell itself included), ordered by
    /// decreasing support then lexicographically.
    pub fn faces(&self) -> Result<Vec<Precell>> {
        let mut out = Vec::new();
        if self.m() == 0 {
            out.push(Precell::dim0());
            return Ok(out);
        }
        let last = self.m() - 1;
        let socle = self.socle();
        let socle_set = socle.to_basic();
        let layer = self.layers.last().unwrap();
        let p = &layer.presentation;
        for y in socle.faces()? {
            let jh = y.support();
            let mu_bar = extend_map(&socle_set, jh, &p.mu)?;
            let nu_bar = extend_map(&socle_set, jh, &p.nu)?;
            if layer.present && !mu_bar.is_infinity() {
                out.push(y.push_layer(Layer::new(
                    layer.modulus.clone(),
                    true,
                    mu_bar.clone(),
                    nu_bar.clone(),
                    p.rho.clone(),
                ))?);
            }
            if nu_bar.is_infinity() {
                out.push(y.push_layer(Layer::new(
                    layer.modulus.clone(),
                    false,
                    mu_bar,
                    nu_bar,
                    p.rho.clone(),
                ))?);
            }
        }
        out.sort_by(|a, b| {
            let (sa, sb) = (a.support(), b.support());
            sb.len().cmp(&sa.len()).then(sa.cmp(&sb))
        });
        debug_assert!(out.iter().any(|f| f.support() == self.support()));
        let _ = last;
        Ok(out)
    }

    /// All proper faces; their disjoint union is the frontier ∂A.
    pub fn frontier(&self) -> Result<Vec<Precell>> {
        Ok(self
            .faces()?
            .into_iter()
            .filter(|f| f.support() != self.support())
            .collect())
    }

    /// Maximal proper faces in the specialisation order.
    pub fn facets(&self) -> Result<Vec<Precell>> {
        let proper = self.frontier()?;
        let supports: Vec<Support> = proper.iter().map(|f| f.support()).collect();
        Ok(proper
            .into_iter()
            .filter(|f| {
                let s = f.support();
                !supports.iter().any(|t| s != *t && s.is_subset(*t))
            })
            .collect())
    }

    /// Faces are linearly ordered by specialisation iff their supports form
    /// a chain under inclusion.
    pub fn is_monohedral(&self) -> Result<bool> {
        let mut supports: Vec<Support> = self.faces()?.iter().map(|f| f.support()).collect();
        supports.sort_by_key(|s| s.len());
        Ok(supports
            .windows(2)
            .all(|w| w[0].is_subset(w[1])))
    }

    /// Whether the precell equals the union of its faces (no proper face
    /// missing from the set itself), i.e. Ā = A.
    pub fn is_closed(&self) -> Result<bool> {
        Ok(self.frontier()?.is_empty())
    }

    /// For every face Y of the socle, the faces of the precell whose socle
    /// is Y (at least one exists), each checked against the shape rule:
    /// B = Y×{+∞} when the last coordinate is absent from B, and
    /// B = (Y×ℤ) ∩ Ā when it is present.
    pub fn socle_face_correspondence(&self) -> Result<Vec<SocleFaceEntry>> {
        if self.m() == 0 {
            return Ok(Vec::new());
        }
        let last = self.m() - 1;
        let faces = self.faces()?;
        let socle_faces = self.socle().faces()?;
        let mut entries = Vec::new();
        for y in &socle_faces {
            let jh = y.support();
            let matching: Vec<&Precell> = faces
                .iter()
                .filter(|b| b.support().remove(last) == jh)
                .collect();
            if matching.is_empty() {
                return Err(Error::Internal(format!(
                    "socle face {} has no face of the precell above it",
                    jh
                )));
            }
            let y_set = y.definable();
            for b in &matching {
                let b_set = b.definable();
                if b.support().contains(last) {
                    // B = (Y×ℤ) ∩ Ā restricted to the slice of B: the
                    // fiber of the closure over Y
                    let y_cylinder = DefinableSet::new(
                        self.m(),
                        b.support(),
                        embed_formula(&y_set, self.m()),
                    );
                    let face_of_closure = self
                        .to_basic()
                        .face_as_formula(b.support())
                        .map_err(|e| Error::Internal(format!("face formula: {e}")))?;
                    let rhs = y_cylinder.intersect(&face_of_closure);
                    if !b_set.set_equal(&rhs) {
                        return Err(Error::Internal(format!(
                            "face {} is not the closure fiber over its socle {}",
                            b.support(),
                            jh
                        )));
                    }
                } else {
                    // B = Y×{+∞}
                    let embedded = DefinableSet::new(
                        self.m(),
                        b.support(),
                        embed_formula(&y_set, self.m()),
                    );
                    if !b_set.set_equal(&embedded) {
                        return Err(Error::Internal(format!(
                            "face {} is not its socle {} extended by +inf",
                            b.support(),
                            jh
                        )));
                    }
                }
            }
            entries.push(SocleFaceEntry {
                socle_support: jh,
                face_supports: matching.iter().map(|b| b.support()).collect(),
            });
        }
        // facet socles: equal to the socle or one of its facets
        let socle_support = self.socle().support();
        let socle_facet_supports: Vec<Support> = self
            .socle()
            .facets()?
            .iter()
            .map(|f| f.support())
            .collect();
        for b in self.facets()? {
            let yb = b.support().remove(last);
            if yb != socle_support && !socle_facet_supports.contains(&yb) {
                return Err(Error::Internal(format!(
                    "facet {} has socle {}, neither the socle nor one of its facets",
                    b.support(),
                    yb
                )));
            }
        }
        Ok(entries)
    }
}

/// One row of the socle-face correspondence: the faces of the precell
/// lying above a given face of its socle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SocleFaceEntry {
    pub socle_support: Support,
    pub face_supports: Vec<Support>,
}

/// A formula over Γ^{m−1} slots read in Γ^m (the slots coincide).
fn embed_formula(set: &DefinableSet, _m: usize) -> Formula {
    set.formula().clone()
}

/// The continuous extension of a boundary map to the face of the socle
/// with support jh: the finite induced map, or the +∞ map, or an error
/// when no limit exists (the precell was not largely continuous).
pub(crate) fn extend_map(
    socle_set: &BasicPresburgerSet,
    jh: Support,
    map: &AffineMap,
) -> Result<AffineMap> {
    if map.is_infinity() {
        return Ok(AffineMap::infinity(jh));
    }
    match limit_behavior(socle_set, jh, map)? {
        LimitBehavior::FiniteFactorization(f) => Ok(f),
        LimitBehavior::DivergesToInfinity => Ok(AffineMap::infinity(jh)),
        LimitBehavior::NotLargelyContinuous => Err(Error::InvalidPrecell(format!(
            "boundary {map} has no limit along the socle face {jh}"
        ))),
    }
}

/// Report produced by `Precell::validate`: empty means valid.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub issues: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.issues.is_empty()
    }
}

impl fmt::Display for Precell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.layers.is_empty() {
            return write!(f, "{{()}}");
        }
        write!(f, "{{")?;
        for (k, layer) in self.layers.iter().enumerate() {
            if k > 0 {
                write!(f, "; ")?;
            }
            let p = &layer.presentation;
            if layer.present {
                write!(f, "{} <= x{} <= {}", p.mu, k + 1, p.nu)?;
                if layer.modulus > Int::one() {
                    write!(f, ", x{} = {} [{}]", k + 1, p.rho, layer.modulus)?;
                }
            } else {
                write!(f, "x{} = +inf", k + 1)?;
            }
        }
        write!(f, "}}")
    }
}

/// A finite family of precells of a common ambient dimension.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrecellComplex {
    m: usize,
    members: Vec<Precell>,
}

/// Outcome of checking a family of precells: `disjoint` and
/// `closure_condition` together make it a complex; `closed` additionally
/// requires every face of a member to be a member.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComplexReport {
    pub disjoint: bool,
    pub closure_condition: bool,
    pub closed: bool,
    pub violations: Vec<String>,
    pub missing_faces: Vec<(usize, Support)>,
}

impl ComplexReport {
    pub fn is_complex(&self) -> bool {
        self.disjoint && self.closure_condition
    }

    pub fn is_closed_complex(&self) -> bool {
        self.is_complex() && self.closed
    }
}

impl PrecellComplex {
    pub fn new(m: usize, members: Vec<Precell>) -> Result<PrecellComplex> {
        for (i, a) in members.iter().enumerate() {
            if a.m() != m {
                return Err(Error::DomainMismatch(format!(
                    "member {} has dimension {}, expected {}",
                    i,
                    a.m(),
                    m
                )));
            }
        }
        Ok(PrecellComplex { m, members })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn members(&self) -> &[Precell] {
        &self.members
    }

    /// The family together with every face of every member, deduplicated by
    /// point-set equality.
    pub fn with_all_faces(&self) -> Result<PrecellComplex> {
        let mut members: Vec<Precell> = Vec::new();
        let mut sets: Vec<DefinableSet> = Vec::new();
        for a in &self.members {
            for face in a.faces()? {
                let fs = face.definable();
                let duplicate = sets
                    .iter()
                    .any(|s| s.support() == fs.support() && s.set_equal(&fs));
                if !duplicate {
                    members.push(face);
                    sets.push(fs);
                }
            }
        }
        PrecellComplex::new(self.m, members)
    }

    /// Verify the complex conditions exactly: pairwise disjointness and
    /// closures meeting along unions of common faces; additionally report
    /// whether the family is closed under taking faces.
    pub fn check(&self) -> Result<ComplexReport> {
        for (i, a) in self.members.iter().enumerate() {
            a.ensure_valid()
                .map_err(|e| Error::InvalidPrecell(format!("member {i}: {e}")))?;
        }
        let mut report = ComplexReport {
            disjoint: true,
            closure_condition: true,
            closed: true,
            violations: Vec::new(),
            missing_faces: Vec::new(),
        };
        let face_lists: Vec<Vec<Precell>> = self
            .members
            .iter()
            .map(|a| a.faces())
            .collect::<Result<_>>()?;
        let n = self.members.len();
        for i in 0..n {
            for j in (i + 1)..n {
                let (a, b) = (&self.members[i], &self.members[j]);
                if a.support() == b.support()
                    && !a.definable().intersect(&b.definable()).is_empty()
                {
                    report.disjoint = false;
                    report
                        .violations
                        .push(format!("members {i} and {j} overlap"));
                }
                // closures meet slice by slice: on each support either the
                // faces coincide or they are disjoint
                for fa in &face_lists[i] {
                    for fb in &face_lists[j] {
                        if fa.support() != fb.support() {
                            continue;
                        }
                        let (sa, sb) = (fa.definable(), fb.definable());
                        if !sa.set_equal(&sb) && !sa.intersect(&sb).is_empty() {
                            report.closure_condition = false;
                            report.violations.push(format!(
                                "closures of members {i} and {j} meet outside a common face on the slice {}",
                                fa.support()
                            ));
                        }
                    }
                }
            }
        }
        for (i, faces) in face_lists.iter().enumerate() {
            for face in faces {
                let fs = face.definable();
                let present = self.members.iter().any(|mmb| {
                    mmb.support() == face.support() && mmb.definable().set_equal(&fs)
                });
                if !present {
                    report.closed = false;
                    report.missing_faces.push((i, face.support()));
                }
            }
        }
        Ok(report)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::affine::affine;

    fn s(idx1: &[usize]) -> Support {
        Support::from_one_based(idx1).unwrap()
    }

    /// {a₁ ≥ 0, a₂ ≥ a₁} as a tower.
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

    /// {a₁ ≥ 0, a₁ ≤ a₂ ≤ 2a₁}.
    fn wedge() -> Precell {
        Precell::natural(1)
            .push_layer(Layer::new(
                1,
                true,
                AffineMap::coordinate(0, s(&[1])),
                affine(s(&[1]), "0", &[(0, "2")]),
                0,
            ))
            .unwrap()
    }

    #[test]
    fn quadrant_has_four_faces_and_is_not_monohedral() {
        let a = Precell::natural(2);
        assert!(a.validate().is_valid());
        let faces = a.faces().unwrap();
        let supports: Vec<Support> = faces.iter().map(|f| f.support()).collect();
        assert_eq!(supports, vec![s(&[1, 2]), s(&[1]), s(&[2]), s(&[])]);
        assert!(!a.is_monohedral().unwrap());
        let facet_supports: Vec<Support> =
            a.facets().unwrap().iter().map(|f| f.support()).collect();
        assert_eq!(facet_supports, vec![s(&[1]), s(&[2])]);
        // dual route: presentation faces match the projection formulas
        let basic = a.to_basic();
        for f in &faces {
            let via_formula = basic.face_as_formula(f.support()).unwrap();
            assert!(f.definable().set_equal(&via_formula));
        }
    }

    #[test]
    fn half_strip_is_monohedral_with_chain_faces() {
        let a = half_strip();
        assert!(a.validate().is_valid());
        let supports: Vec<Support> =
            a.faces().unwrap().iter().map(|f| f.support()).collect();
        assert_eq!(supports, vec![s(&[1, 2]), s(&[1]), s(&[])]);
        assert!(a.is_monohedral().unwrap());
        // every face of a monohedral precell is monohedral
        for f in a.faces().unwrap() {
            assert!(f.is_monohedral().unwrap());
        }
        // the facet is the socle extended by +inf
        let facet = a.face(s(&[1])).unwrap().unwrap();
        assert!(!facet.with_last_coord());
        assert_eq!(facet.socle().to_basic(), Precell::natural(1).to_basic());
    }

    #[test]
    fn wedge_faces_follow_the_boundary_limits() {
        let a = wedge();
        assert!(a.validate().is_valid());
        // ν̄ = 2a₁ stays finite along the socle, so no face keeps only x₁
        assert!(a.face(s(&[1])).unwrap().is_none());
        // μ̄ = +∞ at the socle point at infinity, so no face keeps only x₂
        assert!(a.face(s(&[2])).unwrap().is_none());
        let supports: Vec<Support> =
            a.faces().unwrap().iter().map(|f| f.support()).collect();
        assert_eq!(supports, vec![s(&[1, 2]), s(&[])]);
        assert!(a.is_monohedral().unwrap());
    }

    #[test]
    fn face_of_face_agrees_with_direct_face() {
        let a = half_strip();
        let f1 = a.face(s(&[1])).unwrap().unwrap();
        let nested = f1.face(s(&[])).unwrap().unwrap();
        let direct = a.face(s(&[])).unwrap().unwrap();
        assert_eq!(nested.support(), direct.support());
        assert!(nested.definable().set_equal(&direct.definable()));
    }

    #[test]
    fn rejects_boundary_without_limits() {
        // μ = ν = 2a₂ − 2a₁ over the socle {0 ≤ a₁ ≤ a₂} has no limit at
        // the socle's empty-support face
        let bad = half_strip()
            .push_layer(Layer::new(
                1,
                true,
                affine(s(&[1, 2]), "0", &[(0, "-2"), (1, "2")]),
                affine(s(&[1, 2]), "0", &[(0, "-2"), (1, "2")]),
                0,
            ))
            .unwrap();
        let report = bad.validate();
        assert!(!report.is_valid());
        assert!(report.issues.iter().any(|i| i.contains("no limit")));
    }

    #[test]
    fn rejects_empty_fibers_and_negative_boundaries() {
        // fiber x₁ ≤ t ≤ x₁ + 1 with t ≡ 0 [3] misses e.g. x₁ = 1
        let gappy = Precell::natural(1)
            .push_layer(Layer::new(
                3,
                true,
                AffineMap::coordinate(0, s(&[1])),
                affine(s(&[1]), "1", &[(0, "1")]),
                0,
            ))
            .unwrap();
        let report = gappy.validate();
        assert!(report.issues.iter().any(|i| i.contains("empty fiber")));

        let negative = Precell::new(vec![Layer::new(
            1,
            true,
            AffineMap::constant_int(-1, Support::EMPTY),
            AffineMap::infinity(Support::EMPTY),
            0,
        )])
        .unwrap();
        let report = negative.validate();
        assert!(report.issues.iter().any(|i| i.contains("negative")));
    }

    #[test]
    fn clearing_denominators_in_to_basic() {
        // socle 2ℕ, both boundaries a₁/2: the diagonal of slope one half
        let halved = Precell::new(vec![
            Layer::new(
                2,
                true,
                AffineMap::zero(Support::EMPTY),
                AffineMap::infinity(Support::EMPTY),
                0,
            ),
            Layer::new(
                1,
                true,
                affine(s(&[1]), "0", &[(0, "1/2")]),
                affine(s(&[1]), "0", &[(0, "1/2")]),
                0,
            ),
        ])
        .unwrap();
        assert!(halved.validate().is_valid());
        let basic = halved.to_basic();
        for x1 in -1i64..=6 {
            for x2 in -1i64..=4 {
                let p = GammaPoint::from_ints(vec![x1, x2]);
                let expected = x1 >= 0 && x1 % 2 == 0 && 2 * x2 == x1;
                assert_eq!(basic.contains(&p), expected, "({x1},{x2})");
                assert_eq!(halved.contains(&p), expected, "({x1},{x2}) layerwise");
            }
        }
    }

    #[test]
    fn socle_correspondence_on_the_quadrant() {
        let a = Precell::natural(2);
        let entries = a.socle_face_correspondence().unwrap();
        assert_eq!(
            entries,
            vec![
                SocleFaceEntry {
                    socle_support: s(&[1]),
                    face_supports: vec![s(&[1, 2]), s(&[1])],
                },
                SocleFaceEntry {
                    socle_support: s(&[]),
                    face_supports: vec![s(&[2]), s(&[])],
                },
            ]
        );
        // and on the half-strip the fiber face over the socle is the strip
        let b = half_strip();
        let entries = b.socle_face_correspondence().unwrap();
        assert_eq!(entries[0].face_supports, vec![s(&[1, 2]), s(&[1])]);
        assert_eq!(entries[1].face_supports, vec![s(&[])]);
    }

    #[test]
    fn complex_checks() {
        // {a₂ ≥ a₁ + 1} and {a₂ ≤ a₁} over ℕ, with all faces: closed complex
        let upper = Precell::natural(1)
            .push_layer(Layer::new(
                1,
                true,
                affine(s(&[1]), "1", &[(0, "1")]),
                AffineMap::infinity(s(&[1])),
                0,
            ))
            .unwrap();
        let lower = Precell::natural(1)
            .push_layer(Layer::new(
                1,
                true,
                AffineMap::zero(s(&[1])),
                AffineMap::coordinate(0, s(&[1])),
                0,
            ))
            .unwrap();
        let family = PrecellComplex::new(2, vec![upper.clone(), lower.clone()])
            .unwrap()
            .with_all_faces()
            .unwrap();
        let report = family.check().unwrap();
        assert!(report.is_complex(), "{:?}", report.violations);
        assert!(report.is_closed_complex());

        // a duplicated member is not disjoint
        let dup = PrecellComplex::new(2, vec![Precell::natural(2), Precell::natural(2)]).unwrap();
        let report = dup.check().unwrap();
        assert!(!report.disjoint);

        // parity keeps these two disjoint, yet their faces at x₂ = +inf
        // overlap only partially: not a union of common faces
        let evens = Precell::new(vec![
            Layer::new(
                1,
                true,
                AffineMap::zero(Support::EMPTY),
                AffineMap::infinity(Support::EMPTY),
                0,
            ),
            Layer::new(2, true, AffineMap::zero(s(&[1])), AffineMap::infinity(s(&[1])), 0),
        ])
        .unwrap();
        let shifted_odds = Precell::new(vec![
            Layer::new(
                1,
                true,
                AffineMap::constant_int(3, Support::EMPTY),
                AffineMap::infinity(Support::EMPTY),
                0,
            ),
            Layer::new(2, true, AffineMap::zero(s(&[1])), AffineMap::infinity(s(&[1])), 1),
        ])
        .unwrap();
        let mixed = PrecellComplex::new(2, vec![evens, shifted_odds]).unwrap();
        let report = mixed.check().unwrap();
        assert!(report.disjoint);
        assert!(!report.closure_condition);
    }

    #[test]
    fn dim0_trivia() {
        let a = Precell::dim0();
        assert!(a.validate().is_valid());
        assert!(a.is_monohedral().unwrap());
        assert_eq!(a.faces().unwrap(), vec![Precell::dim0()]);
        assert!(a.frontier().unwrap().is_empty());
        assert_eq!(a.face(Support::EMPTY).unwrap(), Some(Precell::dim0()));
    }
}
