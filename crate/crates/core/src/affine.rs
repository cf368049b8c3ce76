//! Affine maps with rational coefficients on a support slice.
//!
//! A map is either the constant +∞ or x ↦ α₀ + Σ_{i∈I} αᵢ·xᵢ with rational
//! coefficients; `is_integral` holds when α₀ and every αᵢ are integers.
//! Maps are evaluated on points whose support contains the map's support,
//! so +∞ never meets a coefficient.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::point::{GammaPoint, Support};
use crate::value::{rat_int, rat_to_string, ExtendedValue, Int, Rat};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AffineMap {
    /// The constant map +∞ on the given support.
    Infinity { support: Support },
    Finite {
        support: Support,
        constant: Rat,
        /// Zero coefficients are never stored; keys lie inside `support`.
        coeffs: BTreeMap<usize, Rat>,
    },
}

impl AffineMap {
    pub fn infinity(support: Support) -> AffineMap {
        AffineMap::Infinity { support }
    }

    pub fn constant(c: Rat, support: Support) -> AffineMap {
        AffineMap::Finite {
            support,
            constant: c,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn constant_int(c: i64, support: Support) -> AffineMap {
        AffineMap::constant(rat_int(c), support)
    }

    pub fn zero(support: Support) -> AffineMap {
        AffineMap::constant(Rat::zero(), support)
    }

    /// The coordinate map x ↦ x_i.
    pub fn coordinate(i: usize, support: Support) -> AffineMap {
        assert!(support.contains(i));
        AffineMap::Finite {
            support,
            constant: Rat::zero(),
            coeffs: BTreeMap::from([(i, Rat::one())]),
        }
    }

    pub fn new(support: Support, constant: Rat, coeffs: BTreeMap<usize, Rat>) -> Result<AffineMap> {
        for (i, _) in coeffs.iter() {
            if !support.contains(*i) {
                return Err(Error::DomainMismatch(format!(
                    "coefficient on coordinate {} outside support {}",
                    i + 1,
                    support
                )));
            }
        }
        let coeffs = coeffs.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        Ok(AffineMap::Finite {
            support,
            constant,
            coeffs,
        })
    }

    pub fn support(&self) -> Support {
        match self {
            AffineMap::Infinity { support } | AffineMap::Finite { support, .. } => *support,
        }
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, AffineMap::Infinity { .. })
    }

    pub fn is_integral(&self) -> bool {
        match self {
            AffineMap::Infinity { .. } => false,
            AffineMap::Finite {
                constant, coeffs, ..
            } => constant.is_integer() && coeffs.values().all(|c| c.is_integer()),
        }
    }

    pub fn coeff(&self, i: usize) -> Rat {
        match self {
            AffineMap::Infinity { .. } => panic!("coefficient of the +∞ map"),
            AffineMap::Finite { coeffs, .. } => {
                coeffs.get(&i).cloned().unwrap_or_else(Rat::zero)
            }
        }
    }

    pub fn constant_term(&self) -> Rat {
        match self {
            AffineMap::Infinity { .. } => panic!("constant of the +∞ map"),
            AffineMap::Finite { constant, .. } => constant.clone(),
        }
    }

    pub fn coeffs(&self) -> &BTreeMap<usize, Rat> {
        match self {
            AffineMap::Infinity { .. } => panic!("coefficients of the +∞ map"),
            AffineMap::Finite { coeffs, .. } => coeffs,
        }
    }

    /// Evaluate on a point whose support contains this map's support.
    pub fn eval(&self, a: &GammaPoint) -> Result<ExtendedValue> {
        match self {
            AffineMap::Infinity { .. } => Ok(ExtendedValue::PlusInfinity),
            AffineMap::Finite {
                support,
                constant,
                coeffs,
            } => {
                if !support.is_subset(a.support()) {
                    return Err(Error::DomainMismatch(format!(
                        "point with support {} evaluated under map with support {}",
                        a.support(),
                        support
                    )));
                }
                let mut acc = constant.clone();
                for (i, c) in coeffs {
                    let xi = a
                        .coord(*i)
                        .as_rat()
                        .expect("support checked above")
                        .clone();
                    acc += c * xi;
                }
                Ok(ExtendedValue::Finite(acc))
            }
        }
    }

    /// Evaluate on a rational assignment (coordinate → value) covering the support.
    pub fn eval_rats(&self, vals: &BTreeMap<usize, Rat>) -> Result<ExtendedValue> {
        match self {
            AffineMap::Infinity { .. } => Ok(ExtendedValue::PlusInfinity),
            AffineMap::Finite {
                constant, coeffs, ..
            } => {
                let mut acc = constant.clone();
                for (i, c) in coeffs {
                    let xi = vals.get(i).ok_or_else(|| {
                        Error::DomainMismatch(format!("missing coordinate {} in assignment", i + 1))
                    })?;
                    acc += c * xi;
                }
                Ok(ExtendedValue::Finite(acc))
            }
        }
    }

    /// Pointwise sum; +∞ absorbs.  The support becomes the union.
    pub fn add(&self, other: &AffineMap) -> AffineMap {
        let support = self.support().union(other.support());
        match (self, other) {
            (AffineMap::Infinity { .. }, _) | (_, AffineMap::Infinity { .. }) => {
                AffineMap::Infinity { support }
            }
            (
                AffineMap::Finite {
                    constant: c1,
                    coeffs: k1,
                    ..
                },
                AffineMap::Finite {
                    constant: c2,
                    coeffs: k2,
                    ..
                },
            ) => {
                let mut coeffs = k1.clone();
                for (i, c) in k2 {
                    let entry = coeffs.entry(*i).or_insert_with(Rat::zero);
                    *entry += c;
                }
                coeffs.retain(|_, c| !c.is_zero());
                AffineMap::Finite {
                    support,
                    constant: c1 + c2,
                    coeffs,
                }
            }
        }
    }

    /// Pointwise difference of finite maps.
    pub fn sub(&self, other: &AffineMap) -> Result<AffineMap> {
        if other.is_infinity() {
            return Err(Error::DomainMismatch(
                "subtracting the +∞ map would yield −∞".into(),
            ));
        }
        Ok(self.add(&other.scale(&rat_int(-1))))
    }

    pub fn add_const(&self, c: &Rat) -> AffineMap {
        self.add(&AffineMap::constant(c.clone(), self.support()))
    }

    /// Scaling by a rational; the +∞ map only tolerates positive factors.
    pub fn scale(&self, c: &Rat) -> AffineMap {
        match self {
            AffineMap::Infinity { support } => {
                assert!(c.is_positive(), "scaling +∞ by a non-positive factor");
                AffineMap::Infinity { support: *support }
            }
            AffineMap::Finite {
                support,
                constant,
                coeffs,
            } => {
                if c.is_zero() {
                    return AffineMap::zero(*support);
                }
                AffineMap::Finite {
                    support: *support,
                    constant: constant * c,
                    coeffs: coeffs.iter().map(|(i, k)| (*i, k * c)).collect(),
                }
            }
        }
    }

    /// Reinterpret on a smaller support; fails if a dropped coefficient is nonzero.
    pub fn restrict(&self, support: Support) -> Result<AffineMap> {
        match self {
            AffineMap::Infinity { .. } => Ok(AffineMap::Infinity { support }),
            AffineMap::Finite {
                constant, coeffs, ..
            } => {
                for (i, c) in coeffs {
                    if !support.contains(*i) && !c.is_zero() {
                        return Err(Error::NonRestrictable(*i + 1));
                    }
                }
                Ok(AffineMap::Finite {
                    support,
                    constant: constant.clone(),
                    coeffs: coeffs.clone(),
                })
            }
        }
    }

    /// Reinterpret on a larger support (coefficients unchanged).
    pub fn extend_support(&self, support: Support) -> AffineMap {
        assert!(self.support().is_subset(support));
        match self {
            AffineMap::Infinity { .. } => AffineMap::Infinity { support },
            AffineMap::Finite {
                constant, coeffs, ..
            } => AffineMap::Finite {
                support,
                constant: constant.clone(),
                coeffs: coeffs.clone(),
            },
        }
    }

    /// Substitute coordinate `k` by the map `g`: f[x_k := g].
    ///
    /// With a coefficient α_k on x_k the result is f − α_k·x_k + α_k·g; if g
    /// is the +∞ map this requires α_k ≥ 0 (the value is +∞ when α_k > 0).
    pub fn substitute(&self, k: usize, g: &AffineMap) -> Result<AffineMap> {
        match self {
            AffineMap::Infinity { support } => Ok(AffineMap::Infinity {
                support: support.remove(k).union(g.support()),
            }),
            AffineMap::Finite {
                support,
                constant,
                coeffs,
            } => {
                let ak = self.coeff(k);
                let new_support = support.remove(k).union(g.support());
                if g.is_infinity() {
                    if ak.is_positive() {
                        return Ok(AffineMap::Infinity {
                            support: new_support,
                        });
                    }
                    if ak.is_negative() {
                        return Err(Error::DomainMismatch(
                            "substituting +∞ under a negative coefficient".into(),
                        ));
                    }
                }
                let mut coeffs = coeffs.clone();
                coeffs.remove(&k);
                let base = AffineMap::Finite {
                    support: new_support,
                    constant: constant.clone(),
                    coeffs,
                };
                if ak.is_zero() {
                    return Ok(base);
                }
                Ok(base.add(&g.scale(&ak)))
            }
        }
    }

    /// Least common multiple of the coefficient denominators (1 for +∞).
    pub fn denominator(&self) -> Int {
        match self {
            AffineMap::Infinity { .. } => Int::one(),
            AffineMap::Finite {
                constant, coeffs, ..
            } => {
                let mut d = constant.denom().clone();
                for c in coeffs.values() {
                    d = crate::value::lcm_int(&d, c.denom());
                }
                d
            }
        }
    }
}

impl fmt::Display for AffineMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AffineMap::Infinity { .. } => write!(f, "inf"),
            AffineMap::Finite {
                constant, coeffs, ..
            } => {
                let mut parts: Vec<String> = Vec::new();
                for (i, c) in coeffs {
                    if c.is_zero() {
                        continue;
                    }
                    let name = format!("x{}", i + 1);
                    let piece = if c.is_one() {
                        name
                    } else if *c == rat_int(-1) {
                        format!("-{name}")
                    } else {
                        format!("{}*{name}", rat_to_string(c))
                    };
                    parts.push(piece);
                }
                if !constant.is_zero() || parts.is_empty() {
                    parts.push(rat_to_string(constant));
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
    }
}

impl fmt::Debug for AffineMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Convenience builder: α₀ + Σ coeffs[i]·x_{i+1} with i ranging over the
/// zero-based positions listed in `terms`.
pub fn affine(support: Support, constant: &str, terms: &[(usize, &str)]) -> AffineMap {
    let mut coeffs = BTreeMap::new();
    for (i, c) in terms {
        coeffs.insert(*i, crate::value::rat_from_str(c).unwrap());
    }
    AffineMap::new(support, crate::value::rat_from_str(constant).unwrap(), coeffs).unwrap()
}
