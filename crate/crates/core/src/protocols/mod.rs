//! Oblivious-transfer scenarios evaluated by exact enumeration of every
//! execution path.

mod evaluate;
pub mod file;
mod model;
mod scenarios;

pub use evaluate::*;
pub use model::*;
pub use scenarios::*;
