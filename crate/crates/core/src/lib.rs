//! Simulation and numerical verification toolkit for distance evolution in
//! growing preferential attachment graphs.

pub mod distance_engine;
pub mod edge_weights;
pub mod error;
pub mod experiments;
pub mod greedy_upper;
pub mod io;
pub mod pam_graph;
pub mod rng;
pub mod stats;
pub mod theory;

pub use error::{Error, Result};
