//! The value domain Ω = ℚ ∪ {+∞}.
//!
//! `ExtendedValue` is a rational or +∞.  Addition treats +∞ as absorbing,
//! the order puts +∞ on top, and −∞ simply does not exist: every operation
//! that would produce it is kept out of the API (subtraction is only defined
//! when the right-hand side is finite).

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};

pub type Int = BigInt;
pub type Rat = BigRational;

/// A rational number or +∞.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum ExtendedValue {
    Finite(Rat),
    PlusInfinity,
}

pub use ExtendedValue::PlusInfinity;

impl ExtendedValue {
    pub fn from_int<T: Into<Int>>(n: T) -> Self {
        ExtendedValue::Finite(Rat::from_integer(n.into()))
    }

    pub fn zero() -> Self {
        ExtendedValue::Finite(Rat::zero())
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, ExtendedValue::Finite(_))
    }

    pub fn as_rat(&self) -> Option<&Rat> {
        match self {
            ExtendedValue::Finite(q) => Some(q),
            ExtendedValue::PlusInfinity => None,
        }
    }

    /// The finite value as an integer, if it is one.
    pub fn as_int(&self) -> Option<Int> {
        match self {
            ExtendedValue::Finite(q) if q.is_integer() => Some(q.to_integer()),
            _ => None,
        }
    }

    pub fn is_integer(&self) -> bool {
        match self {
            ExtendedValue::Finite(q) => q.is_integer(),
            ExtendedValue::PlusInfinity => false,
        }
    }

    /// Checked subtraction; subtracting +∞ would be −∞ and is an error.
    pub fn checked_sub(&self, rhs: &ExtendedValue) -> Result<ExtendedValue> {
        match (self, rhs) {
            (_, ExtendedValue::PlusInfinity) => Err(Error::DomainMismatch(
                "subtraction of +∞ would yield −∞".into(),
            )),
            (ExtendedValue::PlusInfinity, _) => Ok(ExtendedValue::PlusInfinity),
            (ExtendedValue::Finite(a), ExtendedValue::Finite(b)) => {
                Ok(ExtendedValue::Finite(a - b))
            }
        }
    }

    /// Scaling by a positive rational keeps +∞ fixed.
    pub fn scale_positive(&self, c: &Rat) -> Result<ExtendedValue> {
        if !c.is_positive() {
            return Err(Error::DomainMismatch(
                "scaling of extended values requires a positive factor".into(),
            ));
        }
        Ok(match self {
            ExtendedValue::Finite(q) => ExtendedValue::Finite(q * c),
            ExtendedValue::PlusInfinity => ExtendedValue::PlusInfinity,
        })
    }
}

impl std::ops::Add for &ExtendedValue {
    type Output = ExtendedValue;
    fn add(self, rhs: &ExtendedValue) -> ExtendedValue {
        match (self, rhs) {
            (ExtendedValue::Finite(a), ExtendedValue::Finite(b)) => ExtendedValue::Finite(a + b),
            _ => ExtendedValue::PlusInfinity,
        }
    }
}

impl PartialOrd for ExtendedValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtendedValue {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (ExtendedValue::PlusInfinity, ExtendedValue::PlusInfinity) => Ordering::Equal,
            (ExtendedValue::PlusInfinity, _) => Ordering::Greater,
            (_, ExtendedValue::PlusInfinity) => Ordering::Less,
            (ExtendedValue::Finite(a), ExtendedValue::Finite(b)) => a.cmp(b),
        }
    }
}

impl fmt::Display for ExtendedValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedValue::Finite(q) => write!(f, "{}", rat_to_string(q)),
            ExtendedValue::PlusInfinity => write!(f, "inf"),
        }
    }
}

impl fmt::Debug for ExtendedValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for ExtendedValue {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        if s == "inf" || s == "+inf" {
            return Ok(ExtendedValue::PlusInfinity);
        }
        Ok(ExtendedValue::Finite(rat_from_str(s)?))
    }
}

/// Canonical rendering: `p` for integers, `p/q` otherwise (q > 0, reduced).
pub fn rat_to_string(q: &Rat) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn rat_from_str(s: &str) -> Result<Rat> {
    let parse_int = |t: &str| -> Result<Int> {
        t.trim()
            .parse::<Int>()
            .map_err(|_| Error::Parse(format!("invalid integer `{t}`")))
    };
    match s.split_once('/') {
        None => Ok(Rat::from_integer(parse_int(s)?)),
        Some((p, q)) => {
            let num = parse_int(p)?;
            let den = parse_int(q)?;
            if den.is_zero() {
                return Err(Error::Parse(format!("zero denominator in `{s}`")));
            }
            Ok(Rat::new(num, den))
        }
    }
}

pub fn rat_int<T: Into<Int>>(n: T) -> Rat {
    Rat::from_integer(n.into())
}

/// Least integer ≥ q.
pub fn rat_ceil(q: &Rat) -> Int {
    q.ceil().to_integer()
}

/// Greatest integer ≤ q.
pub fn rat_floor(q: &Rat) -> Int {
    q.floor().to_integer()
}

/// lcm that tolerates arguments equal to one.
pub fn lcm_int(a: &Int, b: &Int) -> Int {
    num_integer::Integer::lcm(a, b)
}

/// Least t ≥ lo with t ≡ rho (mod n); the selector used by fiber arguments.
pub fn ceil_to_congruence(lo: &Rat, rho: &Int, n: &Int) -> Int {
    let base = rat_ceil(lo);
    let diff = (rho - &base).mod_floor(n);
    base + diff
}

use num_integer::Integer as _;
