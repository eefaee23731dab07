//! Weighted-average clock synchronization on independent meeting patterns.
//!
//! Sensors hold an opinion of an unknown global start time `τ*` and refine
//! it by observing each other through noisy relative measurements. This
//! crate simulates the accuracy-weighted averaging rule, computes the
//! Fisher-information bounds that constrain every algorithm on the same
//! pattern, and checks the simulated variances against those bounds.
//!
//! Modules:
//! - [`dist`]: smooth zero-centered families with variance and Fisher information.
//! - [`pattern`]: meeting patterns, relevant sets, the independence check, generators.
//! - [`sync`]: per-sensor update rules and the single-trial runner.
//! - [`bounds`]: the FI recursion, Cramér-Rao floors, convergence-time bound.
//! - [`montecarlo`]: seeded multi-trial experiments and their gates.
//! - [`fisherineq`]: grid-based checks of the Fisher information inequality.
//! - [`config`], [`table`], [`report`]: file formats behind the `fsync` binary.

pub mod bounds;
pub mod config;
pub mod dist;
pub mod error;
pub mod fisherineq;
pub mod montecarlo;
pub mod pattern;
mod quad;
pub mod report;
pub mod stats;
pub mod sync;
pub mod table;

pub use error::{Error, Result};
