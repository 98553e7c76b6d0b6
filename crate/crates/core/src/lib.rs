//! Move-and-gossip simulation and mobile conductance analysis for sparse
//! mobile networks on the unit square.

pub mod conductance;
pub mod error;
pub mod experiments;
pub mod geometry;
pub mod gossip;
pub mod mobility;
pub mod rng;
pub mod stats;
pub mod tradeoff;

pub use error::{Error, Result};
