//! Quantifier elimination for linear integer arithmetic.
//!
//! Classic virtual-substitution elimination: normalise the bound variable's
//! coefficient to ±1 via an lcm change of variable, then replace ∃y φ by a
//! disjunction of instances of φ at boundary terms plus the "far below"
//! (or "far above") residue cases.  Equalities are substituted away first,
//! which keeps the common conjunctive inputs from exploding.
//!
//! Everything runs over BigInt, so there is no overflow to worry about,
//! only formula growth; `simplify` is applied aggressively to contain it.

use std::collections::BTreeSet;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::value::Int;

use super::formula::{Atom, Formula};
use super::term::Term;

/// Eliminate every quantifier; the result is quantifier-free and simplified,
/// with the same free variables.
pub fn eliminate(f: &Formula) -> Formula {
    qe(f.nnf(false))
}

/// Decide a sentence.  Panics if free variables remain after elimination,
/// which would indicate the input was not a sentence.
pub fn decide(f: &Formula) -> bool {
    let g = eliminate(f);
    if g.is_true() {
        return true;
    }
    if g.is_false() {
        return false;
    }
    panic!("formula was not a sentence: residue {g}");
}

fn qe(f: Formula) -> Formula {
    match f {
        Formula::Atom(_) => simplify(f),
        Formula::And(fs) => simplify(Formula::And(fs.into_iter().map(qe).collect())),
        Formula::Or(fs) => simplify(Formula::Or(fs.into_iter().map(qe).collect())),
        // NNF input has no Not nodes
        Formula::Not(g) => simplify(qe(g.nnf(true))),
        Formula::Exists(v, body) => eliminate_exists(v, qe(*body)),
        Formula::Forall(v, body) => {
            let inner = qe(body.nnf(true));
            simplify(negate_qf(eliminate_exists(v, inner)))
        }
    }
}

fn negate_qf(f: Formula) -> Formula {
    f.nnf(true)
}

/// ∃v. φ with φ quantifier-free.
fn eliminate_exists(v: usize, phi: Formula) -> Formula {
    let phi = simplify(phi);
    if !phi.mentions(v) {
        return phi;
    }
    if let Some(result) = substitute_equality(v, &phi) {
        return result;
    }
    cooper(v, phi)
}

/// When φ is a conjunction containing a·v = t (as the pair of ≥ atoms), the
/// quantifier dissolves into a divisibility condition plus substitution.
fn substitute_equality(v: usize, phi: &Formula) -> Option<Formula> {
    let parts = match phi {
        Formula::And(fs) => fs,
        _ => return None,
    };
    let atoms: BTreeSet<&Term> = parts
        .iter()
        .filter_map(|f| match f {
            Formula::Atom(Atom::Ge(t)) if t.has_var(v) => Some(t),
            _ => None,
        })
        .collect();
    let eq = atoms.iter().find(|t| atoms.contains(&t.neg()))?;
    // t = a·v + r = 0 with a > 0 after normalisation, so a·v = −r.
    let mut t = (**eq).clone();
    if t.coeff(v).is_negative() {
        t = t.neg();
    }
    let a = t.coeff(v);
    let mut r = t.clone();
    r.set_coeff(v, Int::zero());
    let minus_r = r.neg();

    let replaced: Vec<Formula> = parts
        .iter()
        .map(|f| substitute_scaled(f, v, &a, &minus_r))
        .collect();
    let mut out = replaced;
    out.push(Formula::divisible(a.clone(), r));
    Some(simplify(Formula::And(out)))
}

/// Replace a·v by `val` throughout, multiplying each atom by a/gcd so the
/// substitution is exact.  Requires a > 0.
fn substitute_scaled(f: &Formula, v: usize, a: &Int, val: &Term) -> Formula {
    match f {
        Formula::And(fs) => Formula::And(fs.iter().map(|g| substitute_scaled(g, v, a, val)).collect()),
        Formula::Or(fs) => Formula::Or(fs.iter().map(|g| substitute_scaled(g, v, a, val)).collect()),
        Formula::Not(g) => Formula::not(substitute_scaled(g, v, a, val)),
        Formula::Exists(..) | Formula::Forall(..) => panic!("substitution under a quantifier"),
        Formula::Atom(atom) => {
            let b = atom.term().coeff(v);
            if b.is_zero() {
                return f.clone();
            }
            // multiply the atom through by a (positive), then a·b·v = b·val
            let scale_term = |t: &Term| -> Term {
                let mut s = t.scale(a);
                s.set_coeff(v, Int::zero());
                s.add(&val.scale(&b))
            };
            let out = match atom {
                Atom::Ge(t) => Atom::Ge(scale_term(t)),
                Atom::Div(n, t) => Atom::Div(n * a, scale_term(t)),
                Atom::NDiv(n, t) => Atom::NDiv(n * a, scale_term(t)),
            };
            Formula::Atom(out)
        }
    }
}

struct AtomScan {
    lambda: Int,
    moduli_lcm: Int,
    lower: Vec<Term>,
    upper: Vec<Term>,
}

fn scan(f: &Formula, v: usize, s: &mut AtomScan) {
    match f {
        Formula::Atom(atom) => {
            let a = atom.term().coeff(v);
            if a.is_zero() {
                return;
            }
            s.lambda = s.lambda.lcm(&a.abs());
        }
        Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|g| scan(g, v, s)),
        Formula::Not(g) => scan(g, v, s),
        Formula::Exists(..) | Formula::Forall(..) => panic!("quantifier in scan"),
    }
}

/// Multiply atoms through so v's coefficient is ±λ, then rename λ·v to v.
fn normalise(f: &Formula, v: usize, lambda: &Int) -> Formula {
    match f {
        Formula::And(fs) => Formula::And(fs.iter().map(|g| normalise(g, v, lambda)).collect()),
        Formula::Or(fs) => Formula::Or(fs.iter().map(|g| normalise(g, v, lambda)).collect()),
        Formula::Not(g) => Formula::not(normalise(g, v, lambda)),
        Formula::Exists(..) | Formula::Forall(..) => panic!("quantifier in normalise"),
        Formula::Atom(atom) => {
            let a = atom.term().coeff(v);
            if a.is_zero() {
                return f.clone();
            }
            let k = lambda / a.abs();
            let rescale = |t: &Term| -> Term {
                let mut s = t.scale(&k);
                // coefficient is now ±λ; set it to ±1 (the variable is renamed
                // to stand for λ·v)
                let sign = if s.coeff(v).is_negative() {
                    -Int::one()
                } else {
                    Int::one()
                };
                s.set_coeff(v, sign);
                s
            };
            let out = match atom {
                Atom::Ge(t) => Atom::Ge(rescale(t)),
                Atom::Div(n, t) => Atom::Div(n * &k, rescale(t)),
                Atom::NDiv(n, t) => Atom::NDiv(n * &k, rescale(t)),
            };
            Formula::Atom(out)
        }
    }
}

fn collect_bounds(f: &Formula, v: usize, s: &mut AtomScan) {
    match f {
        Formula::Atom(atom) => {
            let t = atom.term();
            let a = t.coeff(v);
            if a.is_zero() {
                return;
            }
            debug_assert!(a.abs().is_one());
            match atom {
                Atom::Ge(_) => {
                    let mut rest = t.clone();
                    rest.set_coeff(v, Int::zero());
                    if a.is_positive() {
                        // v + rest ≥ 0: strict lower bound −rest − 1
                        s.lower.push(rest.neg().add_const(-1));
                    } else {
                        // −v + rest ≥ 0: strict upper bound rest + 1
                        s.upper.push(rest.add_const(1));
                    }
                }
                Atom::Div(n, _) | Atom::NDiv(n, _) => {
                    s.moduli_lcm = s.moduli_lcm.lcm(n);
                }
            }
        }
        Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|g| collect_bounds(g, v, s)),
        Formula::Not(g) => collect_bounds(g, v, s),
        Formula::Exists(..) | Formula::Forall(..) => panic!("quantifier in collect_bounds"),
    }
}

/// Replace the ≥ atoms containing v by their limit truth value for v → −∞
/// (`below` = true) or v → +∞.
fn residue(f: &Formula, v: usize, below: bool) -> Formula {
    match f {
        Formula::And(fs) => Formula::And(fs.iter().map(|g| residue(g, v, below)).collect()),
        Formula::Or(fs) => Formula::Or(fs.iter().map(|g| residue(g, v, below)).collect()),
        Formula::Not(g) => Formula::not(residue(g, v, below)),
        Formula::Exists(..) | Formula::Forall(..) => panic!("quantifier in residue"),
        Formula::Atom(atom) => match atom {
            Atom::Ge(t) => {
                let a = t.coeff(v);
                if a.is_zero() {
                    f.clone()
                } else if a.is_positive() == below {
                    Formula::fls()
                } else {
                    Formula::tru()
                }
            }
            _ => f.clone(),
        },
    }
}

fn cooper(v: usize, phi: Formula) -> Formula {
    let mut s = AtomScan {
        lambda: Int::one(),
        moduli_lcm: Int::one(),
        lower: Vec::new(),
        upper: Vec::new(),
    };
    scan(&phi, v, &mut s);
    let lambda = s.lambda.clone();
    let mut phi = normalise(&phi, v, &lambda);
    if !lambda.is_one() {
        phi = Formula::And(vec![phi, Formula::divisible(lambda.clone(), Term::var(v))]);
    }
    collect_bounds(&phi, v, &mut s);
    let delta = s.moduli_lcm.clone();

    let use_lower = s.lower.len() <= s.upper.len();
    let bounds: Vec<Term> = if use_lower {
        BTreeSet::from_iter(s.lower).into_iter().collect()
    } else {
        BTreeSet::from_iter(s.upper).into_iter().collect()
    };
    let far = simplify(residue(&phi, v, use_lower));

    let mut disjuncts: Vec<Formula> = Vec::new();
    let mut j = Int::one();
    while j <= delta {
        let jt = Term::constant(j.clone());
        if !far.is_false() {
            let inst = simplify(far.substitute(v, &jt));
            if inst.is_true() {
                return Formula::tru();
            }
            disjuncts.push(inst);
        }
        for b in &bounds {
            let point = if use_lower { b.add(&jt) } else { b.sub(&jt) };
            let inst = simplify(phi.substitute(v, &point));
            if inst.is_true() {
                return Formula::tru();
            }
            disjuncts.push(inst);
        }
        j += 1;
    }
    simplify(Formula::Or(disjuncts))
}

/// Bottom-up simplification: constant folding, gcd normalisation of atoms,
/// flattening, deduplication, and one-variable-part bound merging.  Input
/// must be quantifier-free and Not-free below the top (NNF); quantified
/// formulas are simplified inside their bodies.
pub fn simplify(f: Formula) -> Formula {
    match f {
        Formula::Atom(a) => simplify_atom(a),
        Formula::Not(g) => {
            let g = simplify(*g);
            if g.is_true() {
                return Formula::fls();
            }
            if g.is_false() {
                return Formula::tru();
            }
            simplify(g.nnf(true))
        }
        Formula::Exists(v, g) => {
            let g = simplify(*g);
            if g.is_true() || g.is_false() || !g.mentions(v) {
                g
            } else {
                Formula::exists(v, g)
            }
        }
        Formula::Forall(v, g) => {
            let g = simplify(*g);
            if g.is_true() || g.is_false() || !g.mentions(v) {
                g
            } else {
                Formula::forall(v, g)
            }
        }
        Formula::And(fs) => {
            let mut kids: BTreeSet<Formula> = BTreeSet::new();
            if flatten_into(fs, true, &mut kids).is_err() {
                return Formula::fls();
            }
            merge_bounds(kids, true)
        }
        Formula::Or(fs) => {
            let mut kids: BTreeSet<Formula> = BTreeSet::new();
            if flatten_into(fs, false, &mut kids).is_err() {
                return Formula::tru();
            }
            merge_bounds(kids, false)
        }
    }
}

fn simplify_atom(a: Atom) -> Formula {
    match a {
        Atom::Ge(t) => {
            if t.is_constant() {
                return if t.constant.is_negative() {
                    Formula::fls()
                } else {
                    Formula::tru()
                };
            }
            let g = t.content();
            if g > Int::one() {
                // g·s + c ≥ 0 ⟺ s + ⌊c/g⌋ ≥ 0
                let mut s = Term {
                    constant: t.constant.div_floor(&g),
                    coeffs: t.coeffs.clone(),
                };
                s.coeffs = s.coeffs.iter().map(|(v, a)| (*v, a / &g)).collect();
                return Formula::Atom(Atom::Ge(s));
            }
            Formula::Atom(Atom::Ge(t))
        }
        Atom::Div(n, t) => match reduce_div(&n, &t) {
            DivReduction::Always => Formula::tru(),
            DivReduction::Never => Formula::fls(),
            DivReduction::Atom(n, t) => Formula::Atom(Atom::Div(n, t)),
        },
        Atom::NDiv(n, t) => match reduce_div(&n, &t) {
            DivReduction::Always => Formula::fls(),
            DivReduction::Never => Formula::tru(),
            DivReduction::Atom(n, t) => Formula::Atom(Atom::NDiv(n, t)),
        },
    }
}

enum DivReduction {
    /// the divisibility holds identically
    Always,
    /// the divisibility fails identically
    Never,
    Atom(Int, Term),
}

fn reduce_div(n: &Int, t: &Term) -> DivReduction {
    // reduce coefficients and constant into 0..n−1
    let mut s = Term {
        constant: t.constant.mod_floor(n),
        coeffs: t
            .coeffs
            .iter()
            .map(|(v, a)| (*v, a.mod_floor(n)))
            .filter(|(_, a)| !a.is_zero())
            .collect(),
    };
    if s.is_constant() {
        return if s.constant.is_zero() {
            DivReduction::Always
        } else {
            DivReduction::Never
        };
    }
    // n | s ⟺ n/d | s/d for d dividing everything in sight
    let mut d = s.content().gcd(n);
    d = d.gcd(&s.constant);
    if d > Int::one() {
        s = s.divide_exact(&d);
        let n2 = n / &d;
        if n2.is_one() {
            return DivReduction::Always;
        }
        return DivReduction::Atom(n2, s);
    }
    DivReduction::Atom(n.clone(), s)
}

/// Flatten nested conjunctions (disjunctions), simplifying children; an Err
/// means the whole connective collapsed to its absorbing element.
fn flatten_into(fs: Vec<Formula>, conj: bool, out: &mut BTreeSet<Formula>) -> Result<(), ()> {
    for f in fs {
        let g = simplify(f);
        match g {
            Formula::And(kids) if conj => flatten_into(kids, conj, out)?,
            Formula::Or(kids) if !conj => flatten_into(kids, conj, out)?,
            _ => {
                if conj {
                    if g.is_false() {
                        return Err(());
                    }
                    if !g.is_true() {
                        out.insert(g);
                    }
                } else {
                    if g.is_true() {
                        return Err(());
                    }
                    if !g.is_false() {
                        out.insert(g);
                    }
                }
            }
        }
    }
    Ok(())
}

/// Merge ≥ atoms sharing a variable part, detect contradictions (in ∧) and
/// tautologies (in ∨) between opposite parts and between Div/NDiv pairs.
fn merge_bounds(kids: BTreeSet<Formula>, conj: bool) -> Formula {
    use std::collections::BTreeMap;
    let mut others: Vec<Formula> = Vec::new();
    // variable part → tightest constant for that orientation
    let mut ge: BTreeMap<BTreeMap<usize, Int>, Int> = BTreeMap::new();
    let mut divs: BTreeSet<(Int, Term)> = BTreeSet::new();
    let mut ndivs: BTreeSet<(Int, Term)> = BTreeSet::new();

    for f in kids {
        match f {
            Formula::Atom(Atom::Ge(t)) => {
                let key = t.coeffs.clone();
                match ge.get_mut(&key) {
                    None => {
                        ge.insert(key, t.constant);
                    }
                    Some(c) => {
                        // s + c₁ ≥ 0 ∧ s + c₂ ≥ 0 keeps the smaller constant;
                        // ∨ keeps the larger
                        if conj {
                            if t.constant < *c {
                                *c = t.constant;
                            }
                        } else if t.constant > *c {
                            *c = t.constant;
                        }
                    }
                }
            }
            Formula::Atom(Atom::Div(n, t)) => {
                divs.insert((n, t));
            }
            Formula::Atom(Atom::NDiv(n, t)) => {
                ndivs.insert((n, t));
            }
            other => others.push(other),
        }
    }

    // opposite orientations: s ≥ −c_lo against s ≤ c_up
    for (key, c_lo) in ge.iter() {
        let neg_key: BTreeMap<usize, Int> = key.iter().map(|(v, a)| (*v, -a)).collect();
        if neg_key >= *key {
            // visit each unordered pair once, from its lexicographically
            // smaller side (self-paired keys cannot occur: parts are nonzero)
            continue;
        }
        if let Some(c_up) = ge.get(&neg_key) {
            let sum = c_lo + c_up;
            if conj && sum.is_negative() {
                return Formula::fls();
            }
            if !conj && sum >= -Int::one() {
                return Formula::tru();
            }
        }
    }

    if divs.intersection(&ndivs).next().is_some() {
        // n | t alongside n !| t
        return if conj { Formula::fls() } else { Formula::tru() };
    }

    let mut out: Vec<Formula> = Vec::new();
    for (coeffs, constant) in ge {
        out.push(Formula::Atom(Atom::Ge(Term { constant, coeffs })));
    }
    out.extend(divs.into_iter().map(|(n, t)| Formula::Atom(Atom::Div(n, t))));
    out.extend(ndivs.into_iter().map(|(n, t)| Formula::Atom(Atom::NDiv(n, t))));
    out.extend(others);
    out.sort();
    match out.len() {
        1 => out.pop().unwrap(),
        _ => {
            if conj {
                Formula::And(out)
            } else {
                Formula::Or(out)
            }
        }
    }
}
