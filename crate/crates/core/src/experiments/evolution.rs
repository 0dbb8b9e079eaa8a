use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::distance_engine::{evolve_distance, exact_hops, exact_weighted, TheoryCurve, Trajectory, View, Workspace};
use crate::error::Result;
use crate::io::ExperimentConfig;
use crate::pam_graph::GrowingGraph;
use crate::rng::{derive_seed, rng_from_seed};
use crate::stats::{median, quantile};
use crate::theory::{default_checkpoints, hydro_limit, time_warp};

/// a-grid for the hydrodynamic proxy: T_t(a) stays within 64t for t <= 10^5.
pub const HYDRO_GRID: [f64; 11] = [0.0, 0.055, 0.11, 0.165, 0.22, 0.275, 0.33, 0.385, 0.44, 0.495, 0.55];

/// Margin on the tightness proxy, in hops.
pub const TIGHTNESS_SLACK: f64 = 2.0;

/// Extra factor for the second weighted reference curve 2(1 + eps)Q.
pub const WEIGHTED_EPS: f64 = 0.1;

/// Seed of replica `r` at base time `t`.
pub fn replica_seed(seed: u64, t: u64, r: usize) -> u64 {
    derive_seed(derive_seed(seed, t), r as u64)
}

/// Two distinct uniform vertices of [t].
pub fn typical_pair<R: Rng + ?Sized>(t: u32, rng: &mut R) -> (u32, u32) {
    let u = rng.random_range(1..=t);
    loop {
        let v = rng.random_range(1..=t);
        if v != u {
            return (u, v);
        }
    }
}

pub fn hydro_times(t: u64) -> Vec<u32> {
    HYDRO_GRID.iter().map(|&a| time_warp(t as f64, a).expect("a-grid in range").round() as u32).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct ReplicaResult {
    pub t: u64,
    pub replica: usize,
    pub seed: u64,
    pub horizon: u32,
    pub sup_dev_graph: f64,
    pub sup_dev_weighted: Option<f64>,
    pub sup_dev_weighted_eps: Option<f64>,
    /// max over the a-grid of |d_G(T_t(a)) / log log t - limit(a)|.
    pub hydro_dev: Option<f64>,
    pub monotonicity_violations: usize,
    #[serde(skip)]
    pub trajectory: Trajectory,
}

#[derive(Clone, Debug, Serialize)]
pub struct BaseTimeSummary {
    pub t: u64,
    pub t_max: u64,
    pub replicas: usize,
    pub sup_q10: f64,
    pub sup_q50: f64,
    pub sup_q90: f64,
    pub sup_max: f64,
    pub weighted_sup_q90: Option<f64>,
    pub weighted_eps_sup_q90: Option<f64>,
    pub hydro_median: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct EvolutionReport {
    pub per_t: Vec<BaseTimeSummary>,
    /// q90 of the sup deviation never grows by more than the slack along t_list.
    pub tightness_proxy: bool,
    /// Median hydro deviation strictly decreases along t_list.
    pub hydro_proxy: Option<bool>,
    pub monotonicity_violations: usize,
    #[serde(skip)]
    pub replicas: Vec<ReplicaResult>,
}

/// One replica: grow to t, pick u != v, follow d(u, v) to the horizon.
pub fn run_replica(cfg: &ExperimentConfig, t: u64, r: usize) -> Result<ReplicaResult> {
    let seed = replica_seed(cfg.seed, t, r);
    let mut aux = rng_from_seed(derive_seed(seed, u64::MAX));
    let mut graph = GrowingGraph::new(cfg.params, seed, cfg.grow);
    graph.grow_to(t as u32, &cfg.weights)?;
    let (u, v) = typical_pair(t as u32, &mut aux);
    let t_max = cfg.t_max(t);
    let mut cps = default_checkpoints(t, t_max, cfg.tau, cfg.per_decade)?;
    let hydro = cfg.hydro.then(|| hydro_times(t));
    if let Some(h) = &hydro {
        cps.extend(h.iter().map(|&x| x as u64).filter(|&x| x <= t_max));
        cps.sort_unstable();
        cps.dedup();
    }
    let cps: Vec<u32> = cps.into_iter().map(|x| x as u32).collect();
    let curve = TheoryCurve { t, tau: cfg.tau, dist: cfg.weights.clone() };
    let mut ws = Workspace::default();
    let traj = evolve_distance(&mut graph, &cfg.weights, u, v, &cps, cfg.weighted, &curve, &mut ws)?;
    let hydro_dev = hydro.map(|h| {
        let lnln = (t as f64).ln().ln();
        h.iter()
            .zip(HYDRO_GRID)
            .filter_map(|(&tp, a)| traj.dg_at(tp).map(|d| (d.to_f64() / lnln - hydro_limit(a, cfg.tau)).abs()))
            .fold(0.0, f64::max)
    });
    Ok(ReplicaResult {
        t,
        replica: r,
        seed,
        horizon: traj.horizon(),
        sup_dev_graph: traj.sup_dev_graph(),
        sup_dev_weighted: traj.sup_dev_weighted(0.0),
        sup_dev_weighted_eps: traj.sup_dev_weighted(WEIGHTED_EPS),
        hydro_dev,
        monotonicity_violations: traj.monotonicity_violations(),
        trajectory: traj,
    })
}

pub fn summarize(cfg: &ExperimentConfig, t: u64, reps: &[ReplicaResult]) -> BaseTimeSummary {
    let sups: Vec<f64> = reps.iter().map(|r| r.sup_dev_graph).collect();
    let opt_q90 = |f: fn(&ReplicaResult) -> Option<f64>| -> Option<f64> {
        let xs: Option<Vec<f64>> = reps.iter().map(f).collect();
        xs.map(|x| quantile(&x, 0.9))
    };
    BaseTimeSummary {
        t,
        t_max: cfg.t_max(t),
        replicas: reps.len(),
        sup_q10: quantile(&sups, 0.1),
        sup_q50: quantile(&sups, 0.5),
        sup_q90: quantile(&sups, 0.9),
        sup_max: sups.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        weighted_sup_q90: opt_q90(|r| r.sup_dev_weighted),
        weighted_eps_sup_q90: opt_q90(|r| r.sup_dev_weighted_eps),
        hydro_median: reps.iter().map(|r| r.hydro_dev).collect::<Option<Vec<f64>>>().map(|x| median(&x)),
    }
}

/// All replicas for every base time; results are in (t, replica) order.
pub fn run_evolution_experiment(cfg: &ExperimentConfig) -> Result<EvolutionReport> {
    let mut all = Vec::new();
    let mut per_t = Vec::new();
    for &t in &cfg.t_list {
        let reps: Vec<ReplicaResult> =
            (0..cfg.replicas).into_par_iter().map(|r| run_replica(cfg, t, r)).collect::<Result<_>>()?;
        per_t.push(summarize(cfg, t, &reps));
        all.extend(reps);
    }
    let tightness_proxy = per_t.windows(2).all(|w| w[1].sup_q90 <= w[0].sup_q90 + TIGHTNESS_SLACK);
    let hydro_proxy = cfg.hydro.then(|| {
        per_t.windows(2).all(|w| matches!((w[0].hydro_median, w[1].hydro_median), (Some(a), Some(b)) if b < a))
    });
    Ok(EvolutionReport {
        tightness_proxy,
        hydro_proxy,
        monotonicity_violations: all.iter().map(|r| r.monotonicity_violations).sum(),
        per_t,
        replicas: all,
    })
}

/// Rebuilds a replica's graph to its horizon and recomputes every checkpoint
/// distance from scratch on the time-restricted view. Returns the number of
/// checkpoints where the incremental record disagrees.
pub fn replay_oracle(cfg: &ExperimentConfig, rep: &ReplicaResult) -> Result<usize> {
    let mut g = GrowingGraph::new(cfg.params, rep.seed, cfg.grow);
    g.grow_to(rep.horizon, &cfg.weights)?;
    let tr = &rep.trajectory;
    let mut bad = 0;
    for p in &tr.points {
        let view = View::at(&g, p.tp);
        if exact_hops(&view, tr.u, tr.v) != p.dg {
            bad += 1;
            continue;
        }
        if let Some(dl) = p.dl {
            let exact = exact_weighted(&view, tr.u, tr.v);
            let ok = match (exact.finite(), dl.finite()) {
                (Some(a), Some(b)) => (a - b).abs() <= 1e-9 * a.max(1.0),
                (None, None) => true,
                _ => false,
            };
            if !ok {
                bad += 1;
            }
        }
    }
    Ok(bad)
}
