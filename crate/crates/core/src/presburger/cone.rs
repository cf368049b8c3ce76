//! Recession directions of systems of linear inequalities.
//!
//! Given rows t(x) ≥ 0 and a set of coordinates D, we look for a vector
//! w ≥ 0 supported exactly on D whose homogeneous evaluation is ≥ 0 on every
//! row; walking from any point of the set along w then stays inside forever.
//! Feasibility is decided by exact Fourier–Motzkin elimination, and the
//! witness returned is the lexicographically least rational solution of the
//! normalised system (w_i ≥ 1 on D), scaled to an integer vector divisible
//! by the requested modulus.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};

use crate::point::Support;
use crate::value::{lcm_int, rat_int, Int, Rat};

use super::term::Term;

/// One inequality Σ coeffs·w + constant ≥ 0 over the direction variables.
#[derive(Clone, Debug)]
struct Row {
    coeffs: BTreeMap<usize, Rat>,
    constant: Rat,
}

impl Row {
    fn coeff(&self, v: usize) -> Rat {
        self.coeffs.get(&v).cloned().unwrap_or_else(Rat::zero)
    }

    fn without(&self, v: usize) -> Row {
        let mut coeffs = self.coeffs.clone();
        coeffs.remove(&v);
        Row {
            coeffs,
            constant: self.constant.clone(),
        }
    }

    fn eval(&self, assign: &BTreeMap<usize, Rat>) -> Rat {
        let mut acc = self.constant.clone();
        for (v, a) in &self.coeffs {
            acc += a * assign.get(v).expect("direction variable unassigned");
        }
        acc
    }

    fn is_trivial(&self) -> bool {
        self.coeffs.values().all(|a| a.is_zero())
    }
}

/// Find an integral w with w_i ≥ 1 on `dirs`, w_i = 0 elsewhere, every
/// coordinate divisible by `modulus`, making the homogeneous part of every
/// row nonnegative.  Returns None when the direction cone is empty.
pub fn recession_witness(
    rows: &[Term],
    dirs: Support,
    modulus: &Int,
) -> Option<BTreeMap<usize, Int>> {
    assert!(modulus.is_positive());
    if dirs.is_empty() {
        return Some(BTreeMap::new());
    }
    let mut system: Vec<Row> = Vec::new();
    for t in rows {
        let mut coeffs = BTreeMap::new();
        for (v, a) in &t.coeffs {
            if dirs.contains(*v) && !a.is_zero() {
                coeffs.insert(*v, Rat::from(a.clone()));
            }
        }
        system.push(Row {
            coeffs,
            constant: Rat::zero(),
        });
    }
    for i in dirs.iter() {
        // normalise positivity to w_i ≥ 1; the cone is scale invariant
        system.push(Row {
            coeffs: BTreeMap::from([(i, rat_int(1))]),
            constant: rat_int(-1),
        });
    }

    // eliminate from the highest coordinate down, recording each variable's
    // pre-elimination system for back substitution
    let mut order: Vec<usize> = dirs.iter().collect();
    order.sort_unstable();
    let mut stages: Vec<(usize, Vec<Row>)> = Vec::new();
    for &v in order.iter().rev() {
        stages.push((v, system.clone()));
        system = eliminate_var(&system, v);
    }
    for row in &system {
        debug_assert!(row.is_trivial());
        if row.constant.is_negative() {
            return None;
        }
    }

    // assign in ascending coordinate order, taking the least feasible value
    let mut assign: BTreeMap<usize, Rat> = BTreeMap::new();
    for (v, stage) in stages.iter().rev() {
        let mut value: Option<Rat> = None;
        for row in stage {
            let a = row.coeff(*v);
            if a.is_positive() {
                // w_v ≥ −rest/a
                let rest = row.without(*v).eval(&assign);
                let bound = -rest / a;
                if value.as_ref().map_or(true, |cur| bound > *cur) {
                    value = Some(bound);
                }
            }
        }
        let value = value.expect("w_v >= 1 guarantees a lower bound");
        for row in stage {
            let a = row.coeff(*v);
            if a.is_negative() {
                let rest = row.without(*v).eval(&assign);
                debug_assert!(
                    -rest / a >= value,
                    "Fourier-Motzkin back substitution out of range"
                );
            }
        }
        assign.insert(*v, value);
    }

    // scale to integers divisible by the modulus
    let mut denom = Int::one();
    for w in assign.values() {
        denom = lcm_int(&denom, w.denom());
    }
    let scale = Rat::from(denom * modulus);
    let witness: BTreeMap<usize, Int> = assign
        .iter()
        .map(|(v, w)| ((*v), (w * &scale).to_integer()))
        .collect();
    debug_assert!(is_recession_vector(rows, &witness));
    Some(witness)
}

fn eliminate_var(system: &[Row], v: usize) -> Vec<Row> {
    let mut lowers: Vec<&Row> = Vec::new();
    let mut uppers: Vec<&Row> = Vec::new();
    let mut rest: Vec<Row> = Vec::new();
    for row in system {
        let a = row.coeff(v);
        if a.is_positive() {
            lowers.push(row);
        } else if a.is_negative() {
            uppers.push(row);
        } else {
            rest.push(row.clone());
        }
    }
    for lo in &lowers {
        for up in &uppers {
            // (rest_u + c_u)/|a_u| ≥ −(rest_l + c_l)/a_l, cleared of fractions
            let al = lo.coeff(v);
            let au_abs = -up.coeff(v);
            let mut coeffs: BTreeMap<usize, Rat> = BTreeMap::new();
            let constant = &up.constant * &al + &lo.constant * &au_abs;
            for (w, a) in up.without(v).coeffs.iter() {
                *coeffs.entry(*w).or_insert_with(Rat::zero) += a * &al;
            }
            for (w, a) in lo.without(v).coeffs.iter() {
                *coeffs.entry(*w).or_insert_with(Rat::zero) += a * &au_abs;
            }
            coeffs.retain(|_, a| !a.is_zero());
            if coeffs.is_empty() && !constant.is_negative() {
                continue; // trivially satisfied
            }
            rest.push(Row { coeffs, constant });
        }
    }
    rest
}

/// Check that w (zero outside its keys) makes every row's homogeneous part
/// nonnegative.  This is the arithmetic half of a recession certificate.
pub fn is_recession_vector(rows: &[Term], w: &BTreeMap<usize, Int>) -> bool {
    rows.iter().all(|t| {
        let mut acc = Int::zero();
        for (v, a) in &t.coeffs {
            if let Some(x) = w.get(v) {
                acc += a * x;
            }
        }
        !acc.is_negative()
    })
}
