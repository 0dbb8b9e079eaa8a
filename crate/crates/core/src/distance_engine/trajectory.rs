use serde::Serialize;

use super::{bidirectional_bfs, bidirectional_dijkstra, Distance, View, Workspace};
use crate::edge_weights::WeightDistribution;
use crate::error::{Error, Result};
use crate::pam_graph::GrowingGraph;
use crate::theory::{k_graph, q_weighted, Tau};

/// Inputs for the 2K and 2Q reference curves.
#[derive(Clone, Debug)]
pub struct TheoryCurve {
    pub t: u64,
    pub tau: Tau,
    pub dist: WeightDistribution,
}

impl TheoryCurve {
    pub fn at(&self, t_prime: u64) -> Result<(u32, f64)> {
        let k = k_graph(self.t, t_prime, self.tau)?;
        let q = q_weighted(self.t, t_prime, self.tau, &self.dist)?;
        Ok((2 * k, 2.0 * q))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TrajPoint {
    pub tp: u32,
    pub dg: Distance<u32>,
    pub dl: Option<Distance<f64>>,
    pub two_k: u32,
    pub two_q: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Trajectory {
    pub u: u32,
    pub v: u32,
    pub t: u32,
    pub points: Vec<TrajPoint>,
}

impl Trajectory {
    /// Last recorded time; every sup below is truncated there.
    pub fn horizon(&self) -> u32 {
        self.points.last().map_or(self.t, |p| p.tp)
    }

    pub fn sup_dev_graph(&self) -> f64 {
        self.points
            .iter()
            .map(|p| (p.dg.to_f64() - p.two_k as f64).abs())
            .fold(0.0, f64::max)
    }

    /// sup |d_L - (1 + eps) 2Q|, or None when weighted distances were not tracked.
    pub fn sup_dev_weighted(&self, eps: f64) -> Option<f64> {
        self.points.iter().try_fold(0.0f64, |acc, p| {
            let dl = p.dl?.to_f64();
            Some(acc.max((dl - (1.0 + eps) * p.two_q).abs()))
        })
    }

    pub fn dg_at(&self, tp: u32) -> Option<Distance<u32>> {
        self.points.iter().find(|p| p.tp == tp).map(|p| p.dg)
    }

    /// Number of consecutive checkpoints where a distance increased.
    pub fn monotonicity_violations(&self) -> usize {
        self.points
            .windows(2)
            .filter(|w| {
                let g = w[1].dg > w[0].dg;
                let l = matches!((w[0].dl, w[1].dl), (Some(a), Some(b)) if b > a);
                g || l
            })
            .count()
    }
}

/// Grows `graph` through `checkpoints`, recording d_G (and d_L if `weighted`)
/// between u and v at each one. Each search is capped by the previous value.
#[allow(clippy::too_many_arguments)]
pub fn evolve_distance(
    graph: &mut GrowingGraph,
    dist: &WeightDistribution,
    u: u32,
    v: u32,
    checkpoints: &[u32],
    weighted: bool,
    curve: &TheoryCurve,
    ws: &mut Workspace,
) -> Result<Trajectory> {
    let t = graph.t();
    if u == 0 || v == 0 || u > t || v > t {
        return Err(Error::VertexOutOfRange { v: u.max(v) as u64, bound: t as u64 + 1 });
    }
    if checkpoints.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::TheoryDomain("checkpoints must be sorted".into()));
    }
    let mut points = Vec::with_capacity(checkpoints.len());
    let mut prev_g: Option<u32> = None;
    let mut prev_l: Option<f64> = None;
    for &tp in checkpoints {
        if tp < graph.t() {
            return Err(Error::TheoryDomain(format!("checkpoint {tp} before current time {}", graph.t())));
        }
        graph.grow_to(tp, dist)?;
        let view = View::now(graph);
        let dg = bidirectional_bfs(&view, u, v, prev_g, ws);
        prev_g = dg.finite();
        let dl = weighted.then(|| {
            let d = bidirectional_dijkstra(&view, u, v, prev_l, ws);
            prev_l = d.finite();
            d
        });
        let (two_k, two_q) = curve.at(tp as u64)?;
        points.push(TrajPoint { tp, dg, dl, two_k, two_q });
    }
    Ok(Trajectory { u, v, t, points })
}
