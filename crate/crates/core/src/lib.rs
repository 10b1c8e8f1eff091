pub mod checks;
pub mod error;
pub mod generators;
pub mod graph;
mod par;
pub mod perm;
pub mod rng;
pub mod search;

pub use error::{Error, Result};
pub use graph::{Graph, VertexSet};
pub use perm::Permutation;

/// Exact non-negative rational used for distances and normalized deltas.
pub type Rational = num_rational::Ratio<u64>;
