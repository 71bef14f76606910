//! Skorokhod maps on time-dependent intervals.
//!
//! This crate constrains càdlàg step paths to move inside a pair of moving
//! boundaries `[lower(·), upper(·)]`, exposes the constraining processes the
//! solve produces, and builds on that to simulate reflected Brownian motion
//! in domains whose boundaries touch, including the planar thorn domains
//! where the reflected process stops being a semimartingale.
//!
//! The layers, bottom to top:
//!
//! * [`grid`], [`path`], [`io`] — time grids, step paths, CSV round-trips;
//! * [`esm`] — the two-sided solver (O(n) recursion plus an O(n²) oracle),
//!   one-sided reductions and the constraint decomposition;
//! * [`verify`] — runtime checkers for the defining conditions of a solve;
//! * [`comparison`] — executable monotonicity checks (domain and input);
//! * [`brownian`], [`boundary`], [`rbm`] — deterministic Brownian-bridge
//!   hierarchies and reflected Brownian motion on cusped boundary families;
//! * [`comb`] — comb/box geometric condition checkers with truncated-series
//!   evidence;
//! * [`experiment`], [`thorn`] — variation-versus-resolution studies in one
//!   and two dimensions;
//! * [`gen`] — seeded random instances for the verification suites.

#![forbid(unsafe_code)]

pub mod boundary;
pub mod brownian;
pub mod comb;
pub mod comparison;
pub mod error;
pub mod esm;
pub mod experiment;
pub mod gen;
pub mod grid;
pub mod io;
pub mod path;
pub mod rbm;
pub mod thorn;
pub mod verify;

pub use boundary::BoundarySpec;
pub use brownian::BrownianHierarchy;
pub use comb::{CombSequence, TruncationPolicy};
pub use comparison::ComparisonInstance;
pub use error::{Error, Result};
pub use esm::{esm_solve, gamma_lower, project, xi_direct, xi_recursive, EsmSolution};
pub use experiment::{TrendThresholds, VariationReport, Verdict};
pub use grid::TimeGrid;
pub use path::{BoundaryPair, GridPath};
pub use thorn::{ExcursionRecord, ThornSpec};
pub use verify::{verify_esp, verify_sp_complementarity, ConditionReport};
