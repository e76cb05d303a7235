//! Per-layer hardware resource assignment for DNN accelerators.
//!
//! Given a model (a list of layers) and a resource budget (chip area,
//! power, or raw PE/buffer counts), this crate searches for the per-layer
//! engine configuration — PE count, buffer tile depth, and optionally a
//! dataflow style — that minimizes latency or energy under the budget.
//!
//! The crate is organized around one evaluation path and several search
//! methods that share it:
//!
//! * [`cost_model`] scores a single layer on a single engine analytically.
//! * [`workloads`] loads models from JSON or by built-in name.
//! * [`search_space`] defines genomes, constraints, objectives, and the
//!   exhaustive oracle for small spaces.
//! * [`rl`] is the main global search: a policy network trained with
//!   policy gradients assigns resources layer by layer.
//! * [`ga`] locally fine-tunes a known-good design in raw value space.
//! * [`baselines`] provides grid, random, annealing, and population
//!   searches over the same space for comparison.
//! * [`config`] and [`cli`] wire everything to files and flags; the
//!   `accel-alloc` binary is a thin shell over [`cli`].
//!
//! The `examples/` directory demonstrates each capability end to end.

pub mod baselines;
pub mod cli;
pub mod config;
pub mod cost_model;
pub mod error;
pub mod ga;
pub mod rl;
pub mod search_space;
pub mod workloads;

pub use error::{Error, Result};
