//! Exact finite-probability toolkit for non-signaling boxes, noisy channels
//! and oblivious-transfer security metrics.

pub mod builtins;
pub mod channel;
pub mod compose;
pub mod error;
pub mod lp;
pub mod ns_box;
pub mod prob;
pub mod protocols;

pub use error::{Error, ErrorKind, Result};
