//! Minimum-weight unit disk cover (WUDC) solver suite.
//!
//! The crate implements a PTAS-style pipeline — shifted grid decomposition,
//! guess enumeration, helper-disk construction over square gadgets, and a
//! dynamic program over arc substructures — alongside exact branch-and-bound
//! and greedy baselines, plus an invariant-verification harness that turns
//! the underlying structural lemmas into executable checks.

pub mod baselines;
pub mod blocksolver;
pub mod dp;
pub mod error;
pub mod gadgets;
pub mod geom;
pub mod hbuilder;
pub mod instance;
pub mod render;
pub mod shifting;
pub mod substructures;
pub mod verify;

pub use error::{GeomError, InstanceError, SolveError};
pub use geom::{Disk, DiskId, Point, TOL};
pub use instance::{Instance, Solution, Stage};
