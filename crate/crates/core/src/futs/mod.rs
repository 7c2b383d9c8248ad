//! Operational semantics as state-to-function transition systems.
//!
//! [`capability`] answers what an agent or model component would do if
//! offered an input, as a probability distribution over successors.
//! [`stochastic`] combines output prefixes with those capabilities into rated
//! transitions of a whole system, and [`ctmc`] closes them into a CTMC.

pub mod agent;
pub mod capability;
pub mod ctmc;
pub mod export;
pub mod stochastic;

pub use agent::{agent_steps, lifted_steps, LiftedStep};
pub use capability::{cap_step, cap_step_seq, input_outcomes, CapKind, CapLabel, InputOutcome};
pub use ctmc::{build_ctmc, Ctmc, CtmcEdge};
pub use stochastic::{stoch_step, Branch, Reception, StochKind, StochLabel, StochTransition};

use indexmap::IndexMap;

/// Finite-support continuation function; successors outside the map get 0.
pub type Continuation<K> = IndexMap<K, f64>;
