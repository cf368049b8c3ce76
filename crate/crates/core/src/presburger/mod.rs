//! Exact linear integer arithmetic: terms, formulas, quantifier
//! elimination, recession directions, definable sets, and the analysis
//! routines (optimisation, thresholds, limits) built on top of them.

pub mod analysis;
pub mod cone;
pub mod formula;
pub mod qe;
pub mod set;
pub mod term;

pub use analysis::{
    affine_to_term, find_point, limit_behavior, maximum, minimum, sample_points,
    skolem_threshold, LimitBehavior,
};
pub use cone::{is_recession_vector, recession_witness};
pub use formula::{Atom, Formula};
pub use qe::{decide, eliminate, simplify};
pub use set::{BasicPresburgerSet, DefinableSet, FaceTree, StratifiedSet};
pub use term::Term;
