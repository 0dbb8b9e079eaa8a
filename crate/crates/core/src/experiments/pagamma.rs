use rayon::prelude::*;
use serde::Serialize;

use crate::edge_weights::WeightDistribution;
use crate::error::{Error, Result};
use crate::pam_graph::{GrowOptions, GrowingGraph, ModelParams};
use crate::rng::derive_seed;
use crate::theory::path_weight_bound;

pub const MAX_PAGAMMA_T: u32 = 15;
pub const MAX_PATH_LEN: usize = 3;
const SLOTS: usize = 1 << (4 * (MAX_PATH_LEN + 1));

/// Base-16 code of a vertex sequence (vertices are 1..=15, 0 pads).
fn code(path: &[u32]) -> usize {
    path.iter().fold(0usize, |acc, &v| (acc << 4) | v as usize)
}

#[cfg(test)]
fn decode(mut c: usize) -> Vec<u32> {
    let mut out = Vec::new();
    while c > 0 {
        out.push((c & 15) as u32);
        c >>= 4;
    }
    out.reverse();
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct PathEstimate {
    pub path: Vec<u32>,
    pub p: f64,
    pub bound_nu1: f64,
    /// (p / bound)^{1/k}: the smallest nu covering this path.
    pub nu_needed: f64,
    pub rel_ci_width: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct PaGammaReport {
    pub t_max: u32,
    pub path_len: usize,
    pub runs: u64,
    pub gamma: f64,
    pub nu_fit: f64,
    pub worst: PathEstimate,
    /// Paths seen at least once whose 95% interval is wider than 25% of p.
    pub imprecise: Vec<Vec<u32>>,
    pub paths: Vec<PathEstimate>,
}

impl PaGammaReport {
    /// Every enumerated path satisfies p <= nu^k prod(...).
    pub fn bound_holds(&self, nu: f64) -> bool {
        self.paths.iter().all(|e| e.p <= nu.powi(e.path.len() as i32 - 1) * e.bound_nu1 * (1.0 + 1e-12))
    }
}

fn count_present(adj: &[u16], cur: &mut Vec<u32>, max_len: usize, counts: &mut [u32]) {
    let last = *cur.last().unwrap();
    if cur.len() > 1 {
        counts[code(cur)] += 1;
    }
    if cur.len() > max_len {
        return;
    }
    let mut nb = adj[last as usize];
    while nb != 0 {
        let w = nb.trailing_zeros();
        nb &= nb - 1;
        if !cur.contains(&w) {
            cur.push(w);
            count_present(adj, cur, max_len, counts);
            cur.pop();
        }
    }
}

/// All self-avoiding sequences of 2..=max_len+1 vertices from [1, t_max].
pub fn enumerate_paths(t_max: u32, max_len: usize) -> Vec<Vec<u32>> {
    fn rec(t_max: u32, max_len: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() > 1 {
            out.push(cur.clone());
        }
        if cur.len() > max_len {
            return;
        }
        for v in 1..=t_max {
            if !cur.contains(&v) {
                cur.push(v);
                rec(t_max, max_len, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(t_max, max_len, &mut Vec::new(), &mut out);
    out
}

/// Monte Carlo presence probabilities of every short self-avoiding path in
/// PA_{t_max}, and the smallest nu for which the product bound covers them.
pub fn verify_pagamma(params: ModelParams, t_max: u32, path_len: usize, runs: u64, seed: u64) -> Result<PaGammaReport> {
    if !(2..=MAX_PAGAMMA_T).contains(&t_max) {
        return Err(Error::param("t_max", format!("must lie in [2, {MAX_PAGAMMA_T}]")));
    }
    if !(1..=MAX_PATH_LEN).contains(&path_len) {
        return Err(Error::param("path_len", format!("must lie in [1, {MAX_PATH_LEN}]")));
    }
    if runs == 0 {
        return Err(Error::param("runs", "must be >= 1"));
    }
    let unit = WeightDistribution::deterministic(1.0)?;
    let counts = (0..runs)
        .into_par_iter()
        .try_fold(
            || vec![0u32; SLOTS],
            |mut counts, r| -> Result<Vec<u32>> {
                let mut g = GrowingGraph::new(params, derive_seed(seed, r), GrowOptions::default());
                g.grow_to(t_max, &unit)?;
                let mut adj = [0u16; 16];
                for e in g.edges() {
                    adj[e.low as usize] |= 1 << e.high;
                    adj[e.high as usize] |= 1 << e.low;
                }
                let mut cur = Vec::with_capacity(path_len + 1);
                for v in 1..=t_max {
                    cur.push(v);
                    count_present(&adj, &mut cur, path_len, &mut counts);
                    cur.pop();
                }
                Ok(counts)
            },
        )
        .try_reduce(
            || vec![0u32; SLOTS],
            |mut a, b| {
                a.iter_mut().zip(&b).for_each(|(x, y)| *x += y);
                Ok(a)
            },
        )?;
    let gamma = 1.0 / (params.tau() - 1.0);
    let n = runs as f64;
    let paths: Vec<PathEstimate> = enumerate_paths(t_max, path_len)
        .into_iter()
        .map(|path| {
            let c = counts[code(&path)] as f64;
            let p = c / n;
            let as_u64: Vec<u64> = path.iter().map(|&v| v as u64).collect();
            let bound = path_weight_bound(&as_u64, 1.0, gamma);
            let k = (path.len() - 1) as f64;
            let se = (p * (1.0 - p) / n).sqrt();
            PathEstimate {
                nu_needed: (p / bound).powf(1.0 / k),
                rel_ci_width: if p > 0.0 { 2.0 * 1.96 * se / p } else { f64::INFINITY },
                bound_nu1: bound,
                p,
                path,
            }
        })
        .collect();
    let worst = paths.iter().max_by(|a, b| a.nu_needed.total_cmp(&b.nu_needed)).expect("paths exist").clone();
    let imprecise = paths.iter().filter(|e| e.p > 0.0 && e.rel_ci_width > 0.25).map(|e| e.path.clone()).collect();
    Ok(PaGammaReport { t_max, path_len, runs, gamma, nu_fit: worst.nu_needed, worst, imprecise, paths })
}
