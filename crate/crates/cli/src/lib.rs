//! Experiment runner library behind the `quasirate` binary.
//!
//! The built-in catalog reproduces a standard set of rotation-rate
//! experiments (two self-intersecting planar curves, their scalar delay
//! pairs, two swept 2-torus projections, and a restricted three-body orbit);
//! `estimate` runs the same pipeline on user-supplied observation files.
//! Everything is plain files in, plain files out: observations, lifts and
//! convergence curves as CSV, the final rates as a JSON summary.

pub mod catalog;
pub mod config;
pub mod csvio;
pub mod run;

pub use catalog::{builtin, ExperimentKind, ExperimentSpec};
pub use run::{estimate_from_file, run_experiment, ExitStatus, RunFailure, RunOptions, RunSummary};
