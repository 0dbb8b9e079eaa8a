//! Exact graph and weighted distances on time-restricted views, warm-started
//! distance evolution, and neighbourhood boundary sizes.

mod search;
mod trajectory;

pub use search::{bidirectional_bfs, bidirectional_dijkstra, Workspace};
pub use trajectory::{evolve_distance, TheoryCurve, TrajPoint, Trajectory};

use std::cmp::Ordering;
use std::collections::{BinaryHeap, VecDeque};
use std::fmt;

use serde::{Serialize, Serializer};

use crate::pam_graph::GrowingGraph;

/// A distance, or the unreachable sentinel.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Distance<T> {
    Finite(T),
    Unreachable,
}

impl<T: Copy> Distance<T> {
    pub fn finite(self) -> Option<T> {
        match self {
            Self::Finite(d) => Some(d),
            Self::Unreachable => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Self::Finite(_))
    }
}

impl<T: Copy + Into<f64>> Distance<T> {
    pub fn to_f64(self) -> f64 {
        match self {
            Self::Finite(d) => d.into(),
            Self::Unreachable => f64::INFINITY,
        }
    }
}

impl<T: Copy + PartialOrd> PartialOrd for Distance<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (Self::Finite(a), Self::Finite(b)) => a.partial_cmp(b),
            (Self::Finite(_), Self::Unreachable) => Some(Ordering::Less),
            (Self::Unreachable, Self::Finite(_)) => Some(Ordering::Greater),
            (Self::Unreachable, Self::Unreachable) => Some(Ordering::Equal),
        }
    }
}

impl<T: fmt::Display> fmt::Display for Distance<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Finite(d) => d.fmt(f),
            Self::Unreachable => f.write_str("inf"),
        }
    }
}

impl<T: Serialize> Serialize for Distance<T> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Self::Finite(d) => d.serialize(s),
            Self::Unreachable => s.serialize_str("inf"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Mode {
    Graph,
    Weighted,
}

/// The graph as it was at time `time`: vertices 1..=time and the edges they created.
#[derive(Clone, Copy)]
pub struct View<'a> {
    graph: &'a GrowingGraph,
    time: u32,
}

impl<'a> View<'a> {
    pub fn at(graph: &'a GrowingGraph, time: u32) -> Self {
        Self { graph, time: time.min(graph.t()) }
    }

    pub fn now(graph: &'a GrowingGraph) -> Self {
        Self::at(graph, graph.t())
    }

    pub fn time(&self) -> u32 {
        self.time
    }

    pub fn graph(&self) -> &'a GrowingGraph {
        self.graph
    }

    /// Calls `f(neighbour, weight)` for every edge at `v` present at this time.
    #[inline]
    pub fn for_each_neighbor(&self, v: u32, mut f: impl FnMut(u32, f64)) {
        for e in self.graph.out_edges(v) {
            f(e.low, e.weight);
        }
        for id in self.graph.in_edge_ids(v) {
            let e = self.graph.edge(id);
            if e.high <= self.time {
                f(e.high, e.weight);
            }
        }
    }
}

#[derive(PartialEq)]
pub(crate) struct HeapItem(pub f64, pub u32);

impl Eq for HeapItem {}

impl Ord for HeapItem {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then_with(|| other.1.cmp(&self.1))
    }
}

impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn check_vertex(view: &View<'_>, x: u32) {
    assert!(x >= 1 && x <= view.time, "vertex {x} not present at time {}", view.time);
}

/// Hop distance by plain breadth-first search.
pub fn exact_hops(view: &View<'_>, x: u32, y: u32) -> Distance<u32> {
    check_vertex(view, x);
    check_vertex(view, y);
    if x == y {
        return Distance::Finite(0);
    }
    let mut dist = vec![u32::MAX; view.time as usize + 1];
    let mut queue = VecDeque::from([x]);
    dist[x as usize] = 0;
    while let Some(u) = queue.pop_front() {
        let du = dist[u as usize];
        let mut hit = false;
        view.for_each_neighbor(u, |w, _| {
            if dist[w as usize] == u32::MAX {
                dist[w as usize] = du + 1;
                hit |= w == y;
                queue.push_back(w);
            }
        });
        if hit {
            return Distance::Finite(du + 1);
        }
    }
    Distance::Unreachable
}

/// Weighted distance by plain Dijkstra.
pub fn exact_weighted(view: &View<'_>, x: u32, y: u32) -> Distance<f64> {
    check_vertex(view, x);
    check_vertex(view, y);
    dijkstra_until(view, x, |v| v == y).map_or(Distance::Unreachable, |(_, d)| Distance::Finite(d))
}

pub fn exact_distance(view: &View<'_>, x: u32, y: u32, mode: Mode) -> Distance<f64> {
    match mode {
        Mode::Graph => match exact_hops(view, x, y) {
            Distance::Finite(h) => Distance::Finite(h as f64),
            Distance::Unreachable => Distance::Unreachable,
        },
        Mode::Weighted => exact_weighted(view, x, y),
    }
}

/// Dijkstra from `src`, stopping at the first settled vertex accepted by
/// `is_target`; returns it with its distance.
pub fn dijkstra_until(view: &View<'_>, src: u32, is_target: impl Fn(u32) -> bool) -> Option<(u32, f64)> {
    let mut dist = vec![f64::INFINITY; view.time as usize + 1];
    let mut done = vec![false; view.time as usize + 1];
    let mut heap = BinaryHeap::from([HeapItem(0.0, src)]);
    dist[src as usize] = 0.0;
    while let Some(HeapItem(d, u)) = heap.pop() {
        if done[u as usize] {
            continue;
        }
        done[u as usize] = true;
        if is_target(u) {
            return Some((u, d));
        }
        view.for_each_neighbor(u, |w, c| {
            let nd = d + c;
            if nd < dist[w as usize] {
                dist[w as usize] = nd;
                heap.push(HeapItem(nd, w));
            }
        });
    }
    None
}

/// |boundary of B(q, k)| for k = 0..=max_radius.
pub fn ball_boundary_sizes(view: &View<'_>, q: u32, max_radius: u32) -> Vec<u64> {
    check_vertex(view, q);
    let mut seen = vec![false; view.time as usize + 1];
    let mut sizes = vec![0u64; max_radius as usize + 1];
    let mut layer = vec![q];
    seen[q as usize] = true;
    sizes[0] = 1;
    for size in sizes.iter_mut().skip(1) {
        let mut next = Vec::new();
        for &u in &layer {
            view.for_each_neighbor(u, |w, _| {
                if !seen[w as usize] {
                    seen[w as usize] = true;
                    next.push(w);
                }
            });
        }
        *size = next.len() as u64;
        if next.is_empty() {
            break;
        }
        layer = next;
    }
    sizes
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::edge_weights::WeightDistribution;
    use crate::pam_graph::{GrowOptions, ModelParams};

    #[test]
    fn distance_ordering_and_display() {
        assert!(Distance::Finite(3u32) < Distance::Unreachable);
        assert_eq!(Distance::<u32>::Unreachable.to_string(), "inf");
        assert_eq!(serde_json::to_string(&Distance::<f64>::Unreachable).unwrap(), "\"inf\"");
    }

    #[test]
    fn views_hide_future_edges() {
        let unit = WeightDistribution::deterministic(1.0).unwrap();
        let mut g = GrowingGraph::new(ModelParams::fpa(1, 0.0).unwrap(), 3, GrowOptions::default());
        g.grow_to(50, &unit).unwrap();
        let view = View::at(&g, 20);
        for v in 1..=20 {
            view.for_each_neighbor(v, |w, _| assert!(w <= 20));
        }
        assert_eq!(exact_hops(&view, 7, 7), Distance::Finite(0));
    }
}
