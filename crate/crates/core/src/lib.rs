//! Simulation and analysis toolkit for the small-world bias of
//! correlation-based functional connectivity.
//!
//! The pipeline: random structural connectivity ([`model::generate_er`]) ->
//! normalized AR(1) coupling ([`model::build_coupling`]) -> exact or sampled
//! correlation matrix -> density-targeted binarization
//! ([`fc::binarize_to_density`]) -> graph metrics ([`graph::metrics`]) ->
//! relative indices against a null graph ([`nullmodels`]). [`sweep`] runs
//! the pipeline over parameter grids.

pub mod cli;
pub mod error;
pub mod fc;
pub mod graph;
pub mod model;
pub mod nullmodels;
pub mod rng;
pub mod sweep;
pub mod textio;

pub use error::{Error, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
