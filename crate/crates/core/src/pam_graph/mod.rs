//! Growing preferential attachment graphs: fixed out-degree (FPA) and
//! variable out-degree (VPA) attachment, weighted edges, time-indexed views.

mod fenwick;
mod graph;
mod params;

pub use fenwick::Fenwick;
pub use graph::{Edge, GrowOptions, GrowingGraph, SamplerKind, VpaMode, NO_EDGE};
pub use params::ModelParams;
