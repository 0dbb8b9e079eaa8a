//! Constructive upper bound: seed vertex, degree-threshold layers, greedy
//! two-hop connections into the inner core.

use std::collections::BinaryHeap;

use rand::seq::index::sample;
use rand::Rng;
use serde::Serialize;

use crate::distance_engine::{dijkstra_until, exact_hops, exact_weighted, HeapItem, View};
use crate::error::{Error, Result};
use crate::theory::Tau;

/// epsilon_k = (k + 1)^{-2}.
pub fn epsilon(k: usize) -> f64 {
    ((k + 1) as f64).powi(-2)
}

/// ceil((1 - delta') t_i).
pub fn hat_time(t_i: u64, delta_prime: f64) -> u64 {
    ((1.0 - delta_prime) * t_i as f64).ceil() as u64
}

/// hat_t^{1/(2(tau-1))} log^{-1/2}(hat_t).
pub fn core_threshold(hat_t: u64, tau: Tau) -> f64 {
    let h = hat_t as f64;
    h.powf(1.0 / (2.0 * (tau.get() - 1.0))) / h.ln().sqrt()
}

/// Graph-diameter bound for the inner core, 2(tau-1)/(3-tau) + 6.
pub fn core_diameter_bound(tau: Tau) -> f64 {
    2.0 * (tau.get() - 1.0) / (3.0 - tau.get()) + 6.0
}

#[derive(Clone, Debug, Serialize)]
pub struct LayerPlan {
    pub tau: Tau,
    pub delta_prime: f64,
    pub t: u64,
    pub t_i: u64,
    pub hat_t_i: u64,
    /// s_0^{(i)} .. s_kappa^{(i)}.
    pub s: Vec<f64>,
    pub kappa: usize,
    pub core_threshold: f64,
}

const MAX_LEVELS: usize = 256;

pub fn layer_plan(t: u64, t_i: u64, tau: Tau, delta_prime: f64, s0: f64) -> Result<LayerPlan> {
    if !(delta_prime > 0.0 && delta_prime < 1.0) {
        return Err(Error::param("delta_prime", "must lie in (0, 1)"));
    }
    if !(s0 >= 2.0) {
        return Err(Error::param("s0", format!("{s0} must be >= 2")));
    }
    if t_i < t {
        return Err(Error::LayerPlan(format!("t_i = {t_i} before t = {t}")));
    }
    let hat = hat_time(t_i, delta_prime);
    let cap = core_threshold(hat, tau);
    let first = delta_prime * s0 * (hat as f64 / t as f64).powf(1.0 / (tau.get() - 1.0));
    if first <= 1.0 {
        return Err(Error::LayerPlan(format!("s_0 = {first:.4} <= 1, thresholds cannot grow")));
    }
    let mut s = vec![first];
    for k in 1..MAX_LEVELS {
        let prev = s[k - 1];
        let next = prev.powf((1.0 - epsilon(k)) / (tau.get() - 2.0)).min(cap);
        if next == prev {
            return Ok(LayerPlan { tau, delta_prime, t, t_i, hat_t_i: hat, kappa: k - 1, s, core_threshold: cap });
        }
        s.push(next);
    }
    Err(Error::LayerPlan("threshold sequence did not reach the core".into()))
}

#[derive(Clone, Debug, Serialize)]
pub struct SeedVertex {
    pub q0: u32,
    pub weight: f64,
    pub hops: u32,
}

/// Nearest vertex (by weight, along paths of at most `hop_budget` hops) with
/// indegree >= s0 in `view`; `indeg` holds indegrees at the view's time.
pub fn find_seed_vertex(view: &View<'_>, indeg: &[u32], q: u32, s0: f64, hop_budget: u32) -> Option<SeedVertex> {
    if q == 0 || q > view.time() {
        return None;
    }
    let n = view.time() as usize + 1;
    let mut dist = vec![f64::INFINITY; n];
    let mut hops = vec![0u32; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::from([HeapItem(0.0, q)]);
    dist[q as usize] = 0.0;
    while let Some(HeapItem(d, u)) = heap.pop() {
        if done[u as usize] {
            continue;
        }
        done[u as usize] = true;
        if indeg[u as usize] as f64 >= s0 {
            return Some(SeedVertex { q0: u, weight: d, hops: hops[u as usize] });
        }
        let h = hops[u as usize];
        if h >= hop_budget {
            continue;
        }
        view.for_each_neighbor(u, |w, c| {
            let nd = d + c;
            if nd < dist[w as usize] {
                dist[w as usize] = nd;
                hops[w as usize] = h + 1;
                heap.push(HeapItem(nd, w));
            }
        });
    }
    None
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct GreedyPath {
    /// q0, y_1, pi_1, ..., y_k, pi_k.
    pub vertices: Vec<u32>,
    pub weight: f64,
    /// |A_{k+1}(pi_k)| per level tried.
    pub connector_counts: Vec<usize>,
}

impl GreedyPath {
    pub fn hops(&self) -> usize {
        self.vertices.len().saturating_sub(1)
    }

    pub fn end(&self) -> u32 {
        *self.vertices.last().unwrap()
    }
}

#[derive(Clone, Debug, Serialize)]
pub enum GreedyOutcome {
    Success(GreedyPath),
    Failed { level: usize, partial: GreedyPath },
}

/// Greedy alternating connector/layer path from `q0` in `view` (at t_i),
/// using total degrees `deg` at hat_t_i. Stops on entering the core.
pub fn greedy_path(view: &View<'_>, q0: u32, plan: &LayerPlan, deg: &[u32]) -> GreedyOutcome {
    let hat = plan.hat_t_i as u32;
    let in_core = |x: u32| x <= hat && deg[x as usize] as f64 >= plan.core_threshold;
    let g = view.graph();
    let mut path = GreedyPath { vertices: vec![q0], ..Default::default() };
    let mut cur = q0;
    for k in 0..plan.kappa {
        if in_core(cur) {
            break;
        }
        let need = plan.s[k + 1];
        let mut best: Option<(f64, u32, u32)> = None;
        let mut connectors = 0usize;
        let mut last_y = 0u32;
        for id in g.in_edge_ids(cur) {
            let e1 = g.edge(id);
            let y = e1.high;
            if y <= hat || y > view.time() {
                continue;
            }
            let mut any = false;
            for e2 in g.out_edges(y) {
                let x = e2.low;
                if x == cur || x > hat || (deg[x as usize] as f64) < need {
                    continue;
                }
                any = true;
                let w = e1.weight + e2.weight;
                if best.is_none_or(|(bw, by, bx)| (w, y, x) < (bw, by, bx)) {
                    best = Some((w, y, x));
                }
            }
            if any && y != last_y {
                connectors += 1;
                last_y = y;
            }
        }
        path.connector_counts.push(connectors);
        match best {
            None => return GreedyOutcome::Failed { level: k, partial: path },
            Some((w, y, x)) => {
                path.vertices.extend([y, x]);
                path.weight += w;
                cur = x;
            }
        }
    }
    GreedyOutcome::Success(path)
}

/// Vertices of Core^{(i)} given total degrees `deg` at hat_t.
pub fn core_members(deg: &[u32], hat_t: u32, threshold: f64) -> Vec<u32> {
    (1..=hat_t).filter(|&x| deg[x as usize] as f64 >= threshold).collect()
}

/// D_{L_k}(hat_t) for every layer of the plan.
pub fn layer_degree_sums(deg: &[u32], plan: &LayerPlan) -> Vec<u64> {
    let hat = (plan.hat_t_i as usize).min(deg.len() - 1);
    plan.s
        .iter()
        .map(|&sk| deg[1..=hat].iter().filter(|&&d| d as f64 >= sk).map(|&d| d as u64).sum())
        .collect()
}

/// Exact weighted distance from q0 to the core, with the core vertex reached.
pub fn exact_distance_to_core(view: &View<'_>, q0: u32, deg: &[u32], hat_t: u32, threshold: f64) -> Option<(u32, f64)> {
    dijkstra_until(view, q0, |x| x <= hat_t && deg[x as usize] as f64 >= threshold)
}

#[derive(Clone, Debug, Serialize)]
pub struct CoreProbe {
    pub core_size: usize,
    pub pairs: usize,
    pub graph_diameter_sample: Option<u32>,
    pub weighted_diameter_sample: Option<f64>,
}

/// Exact distances between up to `max_pairs` random core pairs in `view`.
pub fn core_probe<R: Rng + ?Sized>(view: &View<'_>, core: &[u32], max_pairs: usize, rng: &mut R) -> CoreProbe {
    let mut pairs = Vec::new();
    let n = core.len();
    if n >= 2 {
        let all = n * (n - 1) / 2;
        if all <= max_pairs {
            for a in 0..n {
                for b in a + 1..n {
                    pairs.push((core[a], core[b]));
                }
            }
        } else {
            while pairs.len() < max_pairs {
                let ab = sample(rng, n, 2);
                pairs.push((core[ab.index(0)], core[ab.index(1)]));
            }
        }
    }
    let mut gd: Option<u32> = None;
    let mut wd: Option<f64> = None;
    for &(a, b) in &pairs {
        let h = exact_hops(view, a, b).finite().unwrap_or(u32::MAX);
        let w = exact_weighted(view, a, b).finite().unwrap_or(f64::INFINITY);
        gd = Some(gd.map_or(h, |x| x.max(h)));
        wd = Some(wd.map_or(w, |x| x.max(w)));
    }
    CoreProbe { core_size: n, pairs: pairs.len(), graph_diameter_sample: gd, weighted_diameter_sample: wd }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tau25() -> Tau {
        Tau::new(2.5).unwrap()
    }

    #[test]
    fn plan_examples() {
        let p = layer_plan(100_000, 100_000, tau25(), 0.1, 100.0).unwrap();
        assert!((p.s[0] - 9.3217).abs() < 1e-4, "{}", p.s[0]);
        assert!((p.s[1] - 28.46).abs() < 0.01 || p.s[1] == p.core_threshold);
        assert!((core_threshold(90_000, tau25()) - 13.27).abs() < 0.01);
        assert_eq!(core_diameter_bound(tau25()), 12.0);
    }

    #[test]
    fn plan_reaches_cap_and_stops() {
        let p = layer_plan(1_000_000, 1_000_000, tau25(), 0.1, 20.0).unwrap();
        assert_eq!(p.s[p.kappa], p.core_threshold);
        assert!(p.s.windows(2).all(|w| w[0] <= w[1]));
        assert!(p.s.len() == p.kappa + 1);
    }

    #[test]
    fn epsilon_factors_are_proper() {
        let prod: f64 = (1..1000).map(|k| 1.0 - epsilon(k)).product();
        assert!(prod > 0.0 && prod < 1.0);
        assert_eq!(epsilon(1), 0.25);
    }

    #[test]
    fn degenerate_plan_is_rejected() {
        assert!(layer_plan(1000, 1000, tau25(), 0.1, 5.0).is_err());
        assert!(layer_plan(1000, 1000, tau25(), 0.1, 1.0).is_err());
    }
}
