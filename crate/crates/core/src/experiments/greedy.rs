use rand::seq::IndexedRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::distance_engine::View;
use crate::edge_weights::WeightDistribution;
use crate::error::Result;
use crate::greedy_upper::{
    core_members, core_probe, exact_distance_to_core, find_seed_vertex, greedy_path, hat_time, layer_degree_sums,
    layer_plan, GreedyOutcome, GreedyPath,
};
use crate::pam_graph::{GrowOptions, GrowingGraph, ModelParams};
use crate::rng::{derive_seed, rng_from_seed};
use crate::theory::{checkpoint_times, k_graph, Tau};

/// Where the greedy path starts.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum GreedyStart {
    /// The seed vertex found from a typical vertex.
    #[default]
    Seed,
    /// A uniform vertex of the start layer that is outside the core.
    StartLayer,
}

#[derive(Clone, Debug)]
pub struct GreedyConfig {
    pub params: ModelParams,
    pub grow: GrowOptions,
    pub weights: WeightDistribution,
    pub t: u32,
    pub s0: f64,
    /// Indegree required of the seed vertex; None means s0.
    pub seed_indegree: Option<f64>,
    pub delta_prime: f64,
    /// Checkpoint indices i = 0..levels (only those that exist).
    pub levels: usize,
    pub hop_budget: u32,
    pub seeds: usize,
    pub seed: u64,
    pub core_pairs: usize,
    pub start: GreedyStart,
}

#[derive(Clone, Debug, Serialize)]
pub struct GreedyRecord {
    pub replica: usize,
    pub i: usize,
    pub t: u32,
    pub t_i: u32,
    pub hat_t_i: u32,
    pub kappa: usize,
    pub k_graph: u32,
    pub q: u32,
    pub q0: Option<u32>,
    pub seed_weight: Option<f64>,
    /// q0's indegree at hat_t_i reaches the plan's first threshold s_0^{(i)}.
    pub start_layer_ok: Option<bool>,
    pub q0_in_core: Option<bool>,
    pub success: bool,
    pub failure_level: Option<usize>,
    pub path_len: usize,
    pub path_weight: Option<f64>,
    pub exact_to_core: Option<f64>,
    /// Path weight >= exact distance and path edges present with the stated weight.
    pub sound: Option<bool>,
    pub core_size: usize,
    pub core_graph_diameter_sample: Option<u32>,
    pub connector_counts: Vec<usize>,
    pub layer_degree_sums: Vec<u64>,
}

/// Sum over consecutive pairs of the lightest edge between them, if all are present.
pub fn path_min_weight(view: &View<'_>, vertices: &[u32]) -> Option<f64> {
    vertices.windows(2).try_fold(0.0, |acc, w| {
        let mut best = f64::INFINITY;
        view.for_each_neighbor(w[0], |x, c| {
            if x == w[1] {
                best = best.min(c);
            }
        });
        best.is_finite().then_some(acc + best)
    })
}

fn record(
    cfg: &GreedyConfig,
    tau: Tau,
    g: &GrowingGraph,
    replica: usize,
    i: usize,
    t_i: u32,
    q: u32,
    seed: Option<(u32, f64)>,
    aux: &mut impl Rng,
) -> Result<GreedyRecord> {
    let plan = layer_plan(cfg.t as u64, t_i as u64, tau, cfg.delta_prime, cfg.s0)?;
    let hat = plan.hat_t_i as u32;
    let deg = g.degrees_at(hat);
    let view = View::at(g, t_i);
    let core = core_members(&deg, hat, plan.core_threshold);
    let probe = core_probe(&view, &core, cfg.core_pairs, aux);
    let mut rec = GreedyRecord {
        replica,
        i,
        t: cfg.t,
        t_i,
        hat_t_i: hat,
        kappa: plan.kappa,
        k_graph: k_graph(cfg.t as u64, t_i as u64, tau)?,
        q,
        q0: seed.map(|s| s.0),
        seed_weight: seed.map(|s| s.1),
        start_layer_ok: None,
        q0_in_core: None,
        success: false,
        failure_level: None,
        path_len: 0,
        path_weight: None,
        exact_to_core: None,
        sound: None,
        core_size: core.len(),
        core_graph_diameter_sample: probe.graph_diameter_sample,
        connector_counts: Vec::new(),
        layer_degree_sums: layer_degree_sums(&deg, &plan),
    };
    let start = match cfg.start {
        GreedyStart::Seed => seed.map(|s| s.0),
        GreedyStart::StartLayer => {
            let indeg = g.indegrees_at(hat);
            let cands: Vec<u32> = (1..=hat)
                .filter(|&x| indeg[x as usize] as f64 >= plan.s[0] && (deg[x as usize] as f64) < plan.core_threshold)
                .collect();
            cands.choose(aux).copied()
        }
    };
    rec.q0 = start;
    let Some(q0) = start else { return Ok(rec) };
    rec.start_layer_ok = Some(g.indegrees_at(hat)[q0 as usize] as f64 >= plan.s[0]);
    rec.q0_in_core = Some(core.binary_search(&q0).is_ok());
    let path: GreedyPath = match greedy_path(&view, q0, &plan, &deg) {
        GreedyOutcome::Success(p) => {
            rec.success = true;
            p
        }
        GreedyOutcome::Failed { level, partial } => {
            rec.failure_level = Some(level);
            rec.connector_counts = partial.connector_counts;
            return Ok(rec);
        }
    };
    let exact = exact_distance_to_core(&view, q0, &deg, hat, plan.core_threshold).map(|x| x.1);
    let present = path_min_weight(&view, &path.vertices);
    let ends_in_core = core.binary_search(&path.end()).is_ok();
    rec.sound = Some(match (exact, present) {
        (Some(d), Some(w)) => ends_in_core && (w - path.weight).abs() <= 1e-12 * w.max(1.0) && path.weight >= d,
        _ => false,
    });
    rec.path_len = path.hops();
    rec.path_weight = Some(path.weight);
    rec.exact_to_core = exact;
    rec.connector_counts = path.connector_counts;
    Ok(rec)
}

fn run_seed(cfg: &GreedyConfig, tau: Tau, times: &[u64], r: usize) -> Result<Vec<GreedyRecord>> {
    let seed = derive_seed(derive_seed(cfg.seed, cfg.t as u64), r as u64);
    let mut aux = rng_from_seed(derive_seed(seed, u64::MAX));
    let mut g = GrowingGraph::new(cfg.params, seed, cfg.grow);
    let hat0 = hat_time(cfg.t as u64, cfg.delta_prime) as u32;
    g.grow_to(hat0.max(2), &cfg.weights)?;
    let q = aux.random_range(1..=hat0);
    let indeg = g.indegrees_at(hat0);
    let seed_v = find_seed_vertex(&View::at(&g, hat0), &indeg, q, cfg.seed_indegree.unwrap_or(cfg.s0), cfg.hop_budget).map(|s| (s.q0, s.weight));
    let mut out = Vec::new();
    for (i, &t_i) in times.iter().enumerate() {
        g.grow_to(t_i as u32, &cfg.weights)?;
        out.push(record(cfg, tau, &g, r, i, t_i as u32, q, seed_v, &mut aux)?);
    }
    Ok(out)
}

/// Greedy two-connector paths for every seed and checkpoint index, with the
/// exact distance-to-core oracle alongside.
pub fn greedy_experiment(cfg: &GreedyConfig) -> Result<Vec<GreedyRecord>> {
    let tau = Tau::new(cfg.params.tau())?;
    let times: Vec<u64> = checkpoint_times(cfg.t as u64, tau)?.into_iter().take(cfg.levels.max(1)).collect();
    let per: Vec<Vec<GreedyRecord>> =
        (0..cfg.seeds).into_par_iter().map(|r| run_seed(cfg, tau, &times, r)).collect::<Result<_>>()?;
    Ok(per.into_iter().flatten().collect())
}

/// max over records of kappa - K/2: the smallest M with kappa <= K/2 + M.
pub fn fit_kappa_slack(records: &[GreedyRecord]) -> f64 {
    records.iter().map(|r| r.kappa as f64 - r.k_graph as f64 / 2.0).fold(f64::NEG_INFINITY, f64::max)
}
