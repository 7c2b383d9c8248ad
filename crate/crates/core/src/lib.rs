//! Located Markovian agents: a process algebra whose agents sit at points of
//! the plane and communicate by unicast and broadcast within influence ranges.
//!
//! The crate covers the whole pipeline: [`parser`] reads `.paloma` models,
//! [`rates`] evaluates syntactic and context-aware rate functions, [`futs`]
//! derives capability and stochastic transitions and the underlying CTMC, and
//! [`equivalence`] decides bisimilarity up to Euclidean isometries.

pub mod cli;
pub mod equivalence;
pub mod error;
pub mod model;
pub mod parser;
pub mod futs;
pub mod num;
pub mod rates;

pub use error::Error;
