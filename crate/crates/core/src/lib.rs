//! Decentralized learning for multi-player bandits whose arm sets walk over
//! time and where simultaneous pulls of one arm collide.
//!
//! - [`graph`]: communication graph and consensus weights
//! - [`env`]: arms, walking arm sets, collisions and the genie assignment
//! - [`policy`]: per-player estimation, UCB indices, matching and ranking
//! - [`oracle`]: exhaustive solvers for small instances
//! - [`sim`]: round loop, metrics and multi-run aggregation

pub mod assignment;
pub mod env;
pub mod error;
pub mod graph;
pub mod oracle;
pub mod policy;
pub mod sim;

pub use error::{Error, Result};
