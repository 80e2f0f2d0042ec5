//! Process discovery with switch behaviours.
//!
//! An exclusive choice splits a process into alternative branches, but real
//! processes sometimes jump from one branch to another after the choice has
//! been made. This crate extends the inductive miner with a *switch exclusive
//! choice cut* that detects such jumps from the event log, represents them as
//! switch leaves on the process tree, and translates the result into a
//! workflow net whose switch transitions are silent. Discovered nets are
//! checked for soundness and scored with alignment fitness, escaping-edges
//! precision, F-score, and size/CFC complexity.

pub mod conformance;
pub mod discovery;
mod error;
pub mod eventlog;
pub mod petrinet;
pub mod playout;
pub mod relations;
pub mod tree;

pub use error::{Error, Result};
