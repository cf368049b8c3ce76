//! Exact arithmetic for sets definable over Γ = ℤ ∪ {+∞}.
//!
//! The library works with three layers of objects:
//!
//! * basic Presburger subsets of a support slice of Γ^m, together with a
//!   complete quantifier elimination engine used to decide every question
//!   about them exactly (`presburger`);
//! * largely continuous precells mod N, given by triangular presentation
//!   towers, with their faces, frontiers, monohedral divisions,
//!   decompositions and splittings (`precell`, `bounding`, `division`);
//! * p-adic polytopes obtained by pulling value cells back through the
//!   coordinatewise valuation (`padic`).
//!
//! Everything is computed with arbitrary precision rationals; +∞ is a
//! first-class value and −∞ is unrepresentable.  An exhaustive small-box
//! oracle (`oracle`) double-checks the symbolic routines on finite grids.

pub mod affine;
pub mod bounding;
pub mod division;
pub mod error;
pub mod point;
pub mod precell;
pub mod presburger;
pub mod value;

pub use affine::AffineMap;
pub use bounding::PiecewiseAffineMap;
pub use division::{
    inflate_facet, monohedral_decomposition, monohedral_decomposition_with_stats,
    monohedral_division, monohedral_division_with_stats, relative_split, split_monohedral,
    DivisionStats, InflationResult,
};
pub use error::Error;
pub use point::{GammaPoint, Support};
pub use precell::{Layer, Precell, PrecellComplex, Presentation};
pub use presburger::{BasicPresburgerSet, DefinableSet, Formula, StratifiedSet};
pub use value::{ExtendedValue, Int, Rat};
