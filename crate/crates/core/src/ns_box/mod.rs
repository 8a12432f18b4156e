//! Bipartite and tripartite boxes, their non-signaling checks and triviality
//! classification.

mod checks;
mod constructors;
pub mod sampling;
mod types;

pub use checks::*;
pub use constructors::*;
pub use types::{AnyBox, BipartiteBox, BoxShape, PartyStructure, TripartiteBcBox, TripartiteMacBox};
