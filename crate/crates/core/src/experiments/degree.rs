use libm::lgamma;
use rand::seq::IndexedRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::edge_weights::WeightDistribution;
use crate::error::{Error, Result};
use crate::pam_graph::{GrowOptions, GrowingGraph, ModelParams};
use crate::rng::{derive_seed, rng_from_seed};
use crate::stats::{mean, std_error, Proportion};

#[derive(Clone, Debug)]
pub struct DegreeWatchConfig {
    pub params: ModelParams,
    pub grow: GrowOptions,
    pub t: u32,
    pub t_max: u32,
    pub s: u32,
    pub replicas: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct WatchedVertex {
    pub replica: usize,
    pub q0: u32,
    pub initial_indegree: u32,
    /// Smallest ratio D(t') / (s (t'/t)^{1/(tau-1)}) over [t, t_max].
    pub min_ratio: f64,
}

impl WatchedVertex {
    /// Whether the barrier delta' s (t'/t)^{1/(tau-1)} is reached.
    pub fn violated(&self, delta_prime: f64) -> bool {
        self.min_ratio <= delta_prime
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ViolationRow {
    pub delta_prime: f64,
    pub freq: Proportion,
}

#[derive(Clone, Debug, Serialize)]
pub struct DegreeWatchReport {
    pub watched: Vec<WatchedVertex>,
    /// Replicas with no vertex of indegree >= s at t.
    pub missing: Vec<usize>,
    pub rows: Vec<ViolationRow>,
}

/// Minimum of D(t') / (s (t'/t)^gamma) along the indegree path of q0.
/// D is a step function and the barrier increases, so only the times just
/// before each arrival and the horizon matter.
pub fn min_barrier_ratio(d0: u32, arrivals: &[u32], t: u32, t_max: u32, s: u32, gamma: f64) -> f64 {
    let barrier = |tp: u32| s as f64 * (tp as f64 / t as f64).powf(gamma);
    let mut d = d0;
    let mut worst = d0 as f64 / barrier(t);
    for &a in arrivals {
        if a > t_max {
            break;
        }
        worst = worst.min(d as f64 / barrier(a - 1));
        d += 1;
    }
    worst.min(d as f64 / barrier(t_max))
}

fn watch_one(cfg: &DegreeWatchConfig, r: usize) -> Result<Option<WatchedVertex>> {
    let seed = derive_seed(derive_seed(cfg.seed, cfg.t as u64), r as u64);
    let mut aux = rng_from_seed(derive_seed(seed, u64::MAX));
    let unit = WeightDistribution::deterministic(1.0)?;
    let mut g = GrowingGraph::new(cfg.params, seed, cfg.grow);
    g.grow_to(cfg.t, &unit)?;
    let Some(dmin) = (1..=cfg.t).map(|v| g.indegree(v)).filter(|&d| d >= cfg.s).min() else {
        return Ok(None);
    };
    let cands: Vec<u32> = (1..=cfg.t).filter(|&v| g.indegree(v) == dmin).collect();
    let q0 = *cands.choose(&mut aux).expect("non-empty");
    g.grow_to(cfg.t_max, &unit)?;
    let mut arrivals: Vec<u32> = g.in_edge_ids(q0).map(|id| g.edge(id).high).filter(|&h| h > cfg.t).collect();
    arrivals.sort_unstable();
    let gamma = 1.0 / (cfg.params.tau() - 1.0);
    Ok(Some(WatchedVertex {
        replica: r,
        q0,
        initial_indegree: dmin,
        min_ratio: min_barrier_ratio(dmin, &arrivals, cfg.t, cfg.t_max, cfg.s, gamma),
    }))
}

/// Fraction of replicas whose watched vertex meets the barrier, per delta'.
pub fn degree_watch(cfg: &DegreeWatchConfig, delta_primes: &[f64]) -> Result<DegreeWatchReport> {
    if cfg.s < 2 {
        return Err(Error::param("s", "must be >= 2"));
    }
    if cfg.t_max < cfg.t {
        return Err(Error::param("t_max", "below t"));
    }
    let out: Vec<Option<WatchedVertex>> =
        (0..cfg.replicas).into_par_iter().map(|r| watch_one(cfg, r)).collect::<Result<_>>()?;
    let missing = out.iter().enumerate().filter(|(_, w)| w.is_none()).map(|(r, _)| r).collect();
    let watched: Vec<WatchedVertex> = out.into_iter().flatten().collect();
    let rows = delta_primes
        .iter()
        .map(|&dp| ViolationRow {
            delta_prime: dp,
            freq: Proportion::new(watched.iter().filter(|w| w.violated(dp)).count() as u64, watched.len() as u64),
        })
        .collect();
    Ok(DegreeWatchReport { watched, missing, rows })
}

/// Z^{(-1)}_{t,t'} for a pure-birth state x >= 2.
pub fn z_minus_one(t: f64, t_prime: f64, gamma: f64, x: f64) -> f64 {
    ((lgamma(t_prime) - lgamma(t)) + (lgamma(t - gamma) - lgamma(t_prime - gamma))).exp() / (x - 1.0)
}

#[derive(Clone, Debug, Serialize)]
pub struct MartingalePoint {
    pub t_prime: u64,
    pub mean: f64,
    pub se: f64,
    /// |mean - 1/(s-1)| / se.
    pub z_score: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct MartingaleReport {
    pub s: u32,
    pub gamma: f64,
    pub expected: f64,
    pub points: Vec<MartingalePoint>,
}

impl MartingaleReport {
    pub fn within(&self, k_se: f64) -> bool {
        self.points.iter().all(|p| p.z_score <= k_se)
    }
}

/// One path of the pure-birth chain X (X_t = s, up-step probability
/// gamma X / t'), read at the given times.
pub fn pure_birth_path<R: Rng + ?Sized>(t: u64, s: u32, gamma: f64, times: &[u64], rng: &mut R) -> Vec<u64> {
    let mut x = s as u64;
    let mut tp = t;
    let mut out = Vec::with_capacity(times.len());
    for &target in times {
        while tp < target {
            if rng.random::<f64>() < gamma * x as f64 / tp as f64 {
                x += 1;
            }
            tp += 1;
        }
        out.push(x);
    }
    out
}

/// Empirical mean of Z^{(-1)} at each checkpoint against its initial value.
pub fn pure_birth_martingale(t: u64, s: u32, gamma: f64, times: &[u64], replicas: usize, seed: u64) -> Result<MartingaleReport> {
    if s < 2 {
        return Err(Error::param("s", "must be >= 2"));
    }
    if !(gamma > 0.0 && gamma < 1.0) || (t as f64) < gamma {
        return Err(Error::param("gamma", "must lie in (0, 1) with t >= gamma"));
    }
    if times.iter().any(|&x| x < t) || times.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::param("times", "must be ascending and >= t"));
    }
    let paths: Vec<Vec<u64>> = (0..replicas)
        .into_par_iter()
        .map(|r| pure_birth_path(t, s, gamma, times, &mut rng_from_seed(derive_seed(seed, r as u64))))
        .collect();
    let expected = 1.0 / (s as f64 - 1.0);
    let points = times
        .iter()
        .enumerate()
        .map(|(j, &tp)| {
            let z: Vec<f64> = paths.iter().map(|p| z_minus_one(t as f64, tp as f64, gamma, p[j] as f64)).collect();
            let (m, se) = (mean(&z), std_error(&z));
            // a spread at rounding level is no spread
            let tol = 1e-12 * expected;
            let z_score = if se > tol {
                (m - expected).abs() / se
            } else if (m - expected).abs() <= tol {
                0.0
            } else {
                f64::INFINITY
            };
            MartingalePoint { t_prime: tp, mean: m, se, z_score }
        })
        .collect();
    Ok(MartingaleReport { s, gamma, expected, points })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn z_starts_at_inverse() {
        assert_eq!(z_minus_one(1000.0, 1000.0, 0.5, 11.0), 0.1);
    }

    #[test]
    fn barrier_ratio_steps() {
        // flat indegree 4 with barrier 2 (t'/t)^1 on [10, 40]: worst at the end
        let r = min_barrier_ratio(4, &[], 10, 40, 2, 1.0);
        assert!((r - 0.5).abs() < 1e-12);
        // an arrival at 20 lifts the path: worst just before it, or at the end
        let r = min_barrier_ratio(4, &[20], 10, 40, 2, 1.0);
        assert!((r - (5.0 / 8.0)).abs() < 1e-12);
    }
}
