//! Linear programming over the non-signaling polytope.

mod games;
mod search;
pub mod simplex;
mod system;

pub use games::{local_game_value, ns_game_value, parse_payoff_key, GameSpec, LocalValue, NsValue, MAX_LP_VARIABLES};
pub use search::{max_distinguishability, Distinguishability, MAX_SIGN_PATTERNS};
pub use system::{build_ns_system, ns_membership, Constraint, LinearSystem, MembershipReport, RowResidual};
