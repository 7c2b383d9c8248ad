//! Equivalence of located components up to plane isometries.

pub mod bisim;
pub mod isometry;

pub use bisim::{
    bisimilar, check_bisim_phi, is_bisimulation, naive_bisim, render_report, BisimResult,
    Correspondence, Counterexample, Failure, Side, Site, Verdict,
};
pub use isometry::{candidate_isometries, Isometry, IsometryKind};
