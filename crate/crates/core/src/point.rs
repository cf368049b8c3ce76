//! Points of Γ^m and coordinate supports.
//!
//! Γ = ℤ ∪ {+∞}.  A point's support is the set of coordinates where it is
//! finite; the slice F_I(Γ^m) collects the points with support exactly I.
//! The one-based convention of the documentation is translated to zero-based
//! indices everywhere inside the library; only `Display` and serialization
//! use one-based names.

use std::fmt;

use crate::error::{Error, Result};
use crate::value::{ExtendedValue, Int};

/// A subset of the coordinates {0, …, m−1}, stored as a bit mask (m ≤ 64).
///
/// The `Ord` instance is the lexicographic order on the sorted index lists
/// ({} < {0} < {0,1} < {0,2} < {1} …), which is the order used whenever a
/// deterministic traversal of supports is required.
#[derive(Copy, Clone, PartialEq, Eq, Hash)]
pub struct Support(u64);

impl Support {
    pub const EMPTY: Support = Support(0);

    pub fn full(m: usize) -> Support {
        assert!(m <= 64);
        if m == 64 {
            Support(!0)
        } else {
            Support((1u64 << m) - 1)
        }
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(idx: I) -> Support {
        let mut bits = 0u64;
        for i in idx {
            assert!(i < 64);
            bits |= 1 << i;
        }
        Support(bits)
    }

    pub fn singleton(i: usize) -> Support {
        Support::from_indices([i])
    }

    pub fn contains(&self, i: usize) -> bool {
        i < 64 && self.0 & (1 << i) != 0
    }

    pub fn insert(&self, i: usize) -> Support {
        assert!(i < 64);
        Support(self.0 | (1 << i))
    }

    pub fn remove(&self, i: usize) -> Support {
        Support(self.0 & !(1 << i))
    }

    pub fn union(&self, other: Support) -> Support {
        Support(self.0 | other.0)
    }

    pub fn intersect(&self, other: Support) -> Support {
        Support(self.0 & other.0)
    }

    pub fn minus(&self, other: Support) -> Support {
        Support(self.0 & !other.0)
    }

    pub fn complement_in(&self, m: usize) -> Support {
        Support::full(m).minus(*self)
    }

    pub fn is_subset(&self, other: Support) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_empty(&self) -> bool {
        self.0 == 0
    }

    pub fn len(&self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..64).filter(|i| self.contains(*i))
    }

    /// All subsets of this support, in ascending lexicographic order.
    pub fn subsets(&self) -> Vec<Support> {
        let idx: Vec<usize> = self.iter().collect();
        let mut out = Vec::with_capacity(1 << idx.len());
        for mask in 0..(1u64 << idx.len()) {
            let mut bits = 0u64;
            for (k, i) in idx.iter().enumerate() {
                if mask & (1 << k) != 0 {
                    bits |= 1 << i;
                }
            }
            out.push(Support(bits));
        }
        out.sort();
        out
    }

    /// One-based indices, ascending: the serialization form.
    pub fn to_one_based(&self) -> Vec<usize> {
        self.iter().map(|i| i + 1).collect()
    }

    pub fn from_one_based(idx: &[usize]) -> Result<Support> {
        let mut bits = 0u64;
        for &i in idx {
            if i == 0 || i > 64 {
                return Err(Error::Parse(format!("coordinate index {i} out of range")));
            }
            bits |= 1 << (i - 1);
        }
        Ok(Support(bits))
    }
}

impl PartialOrd for Support {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Support {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        let a: Vec<usize> = self.iter().collect();
        let b: Vec<usize> = other.iter().collect();
        a.cmp(&b)
    }
}

impl fmt::Display for Support {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = self.iter().map(|i| (i + 1).to_string()).collect();
        write!(f, "{{{}}}", names.join(","))
    }
}

impl fmt::Debug for Support {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A point of Γ^m: every finite coordinate is an integer.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GammaPoint {
    coords: Vec<ExtendedValue>,
}

impl GammaPoint {
    pub fn new(coords: Vec<ExtendedValue>) -> Result<GammaPoint> {
        for (i, c) in coords.iter().enumerate() {
            if c.is_finite() && !c.is_integer() {
                return Err(Error::NonIntegral(format!(
                    "coordinate {} of a Γ-point must be an integer, got {}",
                    i + 1,
                    c
                )));
            }
        }
        Ok(GammaPoint { coords })
    }

    /// Build from optional integers; `None` encodes +∞.
    pub fn from_opts(coords: Vec<Option<Int>>) -> GammaPoint {
        GammaPoint {
            coords: coords
                .into_iter()
                .map(|c| match c {
                    Some(n) => ExtendedValue::from_int(n),
                    None => ExtendedValue::PlusInfinity,
                })
                .collect(),
        }
    }

    pub fn from_ints(coords: Vec<i64>) -> GammaPoint {
        GammaPoint::from_opts(coords.into_iter().map(|c| Some(Int::from(c))).collect())
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coord(&self, i: usize) -> &ExtendedValue {
        &self.coords[i]
    }

    pub fn coords(&self) -> &[ExtendedValue] {
        &self.coords
    }

    /// The set of coordinates where the point is finite.
    pub fn support(&self) -> Support {
        Support::from_indices(
            self.coords
                .iter()
                .enumerate()
                .filter(|(_, c)| c.is_finite())
                .map(|(i, _)| i),
        )
    }

    /// Δ_J(a) = min over i ∉ J of a_i (+∞ when J covers everything).
    pub fn delta(&self, j: Support) -> ExtendedValue {
        let mut best = ExtendedValue::PlusInfinity;
        for (i, c) in self.coords.iter().enumerate() {
            if !j.contains(i) && *c < best {
                best = c.clone();
            }
        }
        best
    }

    /// π_J(a): coordinates outside J are replaced by +∞.
    pub fn project(&self, j: Support) -> GammaPoint {
        GammaPoint {
            coords: self
                .coords
                .iter()
                .enumerate()
                .map(|(i, c)| {
                    if j.contains(i) {
                        c.clone()
                    } else {
                        ExtendedValue::PlusInfinity
                    }
                })
                .collect(),
        }
    }

    /// The socle â: the point with the last coordinate dropped.
    pub fn socle(&self) -> GammaPoint {
        GammaPoint {
            coords: self.coords[..self.coords.len() - 1].to_vec(),
        }
    }

    pub fn push(&self, last: ExtendedValue) -> GammaPoint {
        let mut coords = self.coords.clone();
        coords.push(last);
        GammaPoint { coords }
    }

    /// Translation by an integer vector; +∞ coordinates stay +∞.
    pub fn translate(&self, u: &[Int]) -> GammaPoint {
        assert_eq!(u.len(), self.coords.len());
        GammaPoint {
            coords: self
                .coords
                .iter()
                .zip(u)
                .map(|(c, step)| c + &ExtendedValue::from_int(step.clone()))
                .collect(),
        }
    }
}

impl fmt::Display for GammaPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(|c| c.to_string()).collect();
        write!(f, "({})", parts.join(", "))
    }
}

impl fmt::Debug for GammaPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
