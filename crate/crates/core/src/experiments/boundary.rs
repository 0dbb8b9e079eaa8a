use rayon::prelude::*;
use serde::Serialize;

use super::evolution::replica_seed;
use crate::distance_engine::{ball_boundary_sizes, View};
use crate::error::{Error, Result};
use crate::io::ExperimentConfig;
use crate::pam_graph::GrowingGraph;
use crate::rng::{derive_seed, rng_from_seed};
use crate::stats::median;
use crate::theory::{k_graph, Tau};
use rand::Rng;

/// Largest radius checked: max(K_{t,t'}/2 - 2, 1).
pub fn boundary_radius(t: u64, t_prime: u64, tau: Tau) -> Result<u32> {
    Ok((k_graph(t, t_prime, tau)? / 2).saturating_sub(2).max(1))
}

/// Smallest B with sizes[k] <= exp(2B(1 v log(t'/t))(tau-2)^{-k/2}) for all k.
pub fn minimal_b(sizes: &[u64], t: u64, t_prime: u64, tau: Tau) -> f64 {
    let scale = 2.0 * (t_prime as f64 / t as f64).ln().max(1.0);
    sizes
        .iter()
        .enumerate()
        .filter(|(_, &n)| n > 1)
        .map(|(k, &n)| (n as f64).ln() / (scale * (tau.get() - 2.0).powf(-(k as f64) / 2.0)))
        .fold(0.0, f64::max)
}

/// Smallest grid value >= b (the last one if none is).
pub fn snap_to_grid(b: f64, grid: &[f64]) -> f64 {
    grid.iter().copied().find(|&g| g >= b).unwrap_or(*grid.last().unwrap())
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundarySample {
    pub t: u64,
    pub t_prime: u64,
    pub replica: usize,
    pub q: u32,
    pub sizes: Vec<u64>,
    pub b_exact: f64,
    pub b_grid: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundarySummary {
    pub t: u64,
    pub t_prime: u64,
    pub radius: u32,
    pub median_b: f64,
    pub max_b: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundaryReport {
    pub samples: Vec<BoundarySample>,
    pub per_t: Vec<BoundarySummary>,
}

/// Fitted B per replica for every base time t in the config, with
/// t' = t * t_prime_factor.
pub fn boundary_growth_check(cfg: &ExperimentConfig, t_prime_factor: u64, grid: &[f64]) -> Result<BoundaryReport> {
    if grid.is_empty() || grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::param("b_grid", "must be non-empty and ascending"));
    }
    let mut samples = Vec::new();
    let mut per_t = Vec::new();
    for &t in &cfg.t_list {
        let tp = t * t_prime_factor.max(1);
        let radius = boundary_radius(t, tp, cfg.tau)?;
        let reps: Vec<BoundarySample> = (0..cfg.replicas)
            .into_par_iter()
            .map(|r| -> Result<BoundarySample> {
                let seed = replica_seed(cfg.seed, t, r);
                let mut aux = rng_from_seed(derive_seed(seed, u64::MAX));
                let mut g = GrowingGraph::new(cfg.params, seed, cfg.grow);
                g.grow_to(tp as u32, &cfg.weights)?;
                let q = aux.random_range(1..=t as u32);
                let sizes = ball_boundary_sizes(&View::now(&g), q, radius);
                let b_exact = minimal_b(&sizes, t, tp, cfg.tau);
                Ok(BoundarySample { t, t_prime: tp, replica: r, q, sizes, b_exact, b_grid: snap_to_grid(b_exact, grid) })
            })
            .collect::<Result<_>>()?;
        let bs: Vec<f64> = reps.iter().map(|s| s.b_grid).collect();
        per_t.push(BoundarySummary {
            t,
            t_prime: tp,
            radius,
            median_b: median(&bs),
            max_b: bs.iter().copied().fold(0.0, f64::max),
        });
        samples.extend(reps);
    }
    Ok(BoundaryReport { samples, per_t })
}
