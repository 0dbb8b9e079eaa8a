use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use super::{Fenwick, ModelParams};
use crate::edge_weights::WeightDistribution;
use crate::error::{Error, Result};
use crate::rng::{rng_from_seed, SimRng};

pub const NO_EDGE: u32 = u32::MAX;

/// An edge from `high` (its creator, also its arrival time) to `low < high`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Edge {
    pub low: u32,
    pub high: u32,
    pub weight: f64,
}

#[derive(Clone, Copy, Debug)]
struct Slot {
    in_head: u32,
    indeg: u32,
}

const EMPTY_SLOT: Slot = Slot { in_head: NO_EDGE, indeg: 0 };

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum SamplerKind {
    /// Indegree part drawn as the low end of a uniform existing edge,
    /// constant part drawn uniformly.
    #[default]
    EdgeMixture,
    Fenwick,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum VpaMode {
    /// One Bernoulli trial per earlier vertex.
    #[default]
    Scan,
    /// Poisson proposals with per-vertex acceptance; same law as `Scan`.
    Thinned,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct GrowOptions {
    pub sampler: SamplerKind,
    pub vpa_mode: VpaMode,
}

#[derive(Clone, Debug)]
pub struct GrowingGraph {
    params: ModelParams,
    opts: GrowOptions,
    seed: u64,
    t: u32,
    /// FPA: out-edges of vertex `t` placed so far.
    placed: u32,
    edges: Vec<Edge>,
    in_next: Vec<u32>,
    /// Out-edges of v are `edges[out_start[v]..out_start[v + 1]]`; length t + 2.
    out_start: Vec<u32>,
    slots: Vec<Slot>,
    fenwick: Option<Fenwick>,
    max_indeg: u32,
    rng: SimRng,
}

impl GrowingGraph {
    /// The single-vertex graph at t = 1.
    pub fn new(params: ModelParams, seed: u64, opts: GrowOptions) -> Self {
        let fenwick = (opts.sampler == SamplerKind::Fenwick).then(|| {
            let mut f = Fenwick::new();
            f.push(0);
            f
        });
        Self {
            params,
            opts,
            seed,
            t: 1,
            placed: Self::full_count(&params),
            edges: Vec::new(),
            in_next: Vec::new(),
            out_start: vec![0, 0, 0],
            slots: vec![EMPTY_SLOT, EMPTY_SLOT],
            fenwick,
            max_indeg: 0,
            rng: rng_from_seed(seed),
        }
    }

    fn full_count(params: &ModelParams) -> u32 {
        match params {
            ModelParams::Fpa { m, .. } => *m,
            ModelParams::Vpa { .. } => 0,
        }
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn options(&self) -> GrowOptions {
        self.opts
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn rng(&self) -> &SimRng {
        &self.rng
    }

    /// Number of vertices present (including one whose edges are still being placed).
    pub fn t(&self) -> u32 {
        self.t
    }

    pub fn is_complete(&self) -> bool {
        self.placed == Self::full_count(&self.params)
    }

    /// (t, j) of the next edge to be placed under FPA; (t + 1, 1) when complete.
    pub fn cursor(&self) -> (u32, u32) {
        if self.is_complete() {
            (self.t + 1, 1)
        } else {
            (self.t, self.placed + 1)
        }
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: u32) -> &Edge {
        &self.edges[id as usize]
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn indegree(&self, v: u32) -> u32 {
        self.slots[v as usize].indeg
    }

    pub fn out_degree(&self, v: u32) -> u32 {
        self.out_start[v as usize + 1] - self.out_start[v as usize]
    }

    pub fn degree(&self, v: u32) -> u32 {
        self.indegree(v) + self.out_degree(v)
    }

    pub fn max_indegree(&self) -> u32 {
        self.max_indeg
    }

    /// Edge ids of the out-edges of `v`.
    pub fn out_edge_ids(&self, v: u32) -> std::ops::Range<u32> {
        self.out_start[v as usize]..self.out_start[v as usize + 1]
    }

    pub fn out_edges(&self, v: u32) -> &[Edge] {
        let r = self.out_edge_ids(v);
        &self.edges[r.start as usize..r.end as usize]
    }

    /// Edge ids of the in-edges of `v`, newest first.
    pub fn in_edge_ids(&self, v: u32) -> InEdges<'_> {
        InEdges { next: &self.in_next, cur: self.slots[v as usize].in_head }
    }

    /// Number of edges present at time `time` (edges are sorted by arrival).
    pub fn edges_at(&self, time: u32) -> usize {
        let time = time.min(self.t);
        self.out_start[time as usize + 1] as usize
    }

    /// Indegrees at time `time`, indexed by vertex (index 0 unused).
    pub fn indegrees_at(&self, time: u32) -> Vec<u32> {
        let time = time.min(self.t);
        let mut d = vec![0u32; time as usize + 1];
        for e in &self.edges[..self.edges_at(time)] {
            d[e.low as usize] += 1;
        }
        d
    }

    /// Total degrees at time `time`, indexed by vertex (index 0 unused).
    pub fn degrees_at(&self, time: u32) -> Vec<u32> {
        let time = time.min(self.t);
        let mut d = self.indegrees_at(time);
        for (v, dv) in d.iter_mut().enumerate().skip(1) {
            *dv += self.out_degree(v as u32);
        }
        d
    }

    /// Normalising total of the attachment weights for the next placement.
    pub fn sampler_total(&self) -> f64 {
        let (t, _) = self.cursor();
        let n = (t - 1) as f64;
        let s = self.edges.len() as f64;
        match self.params {
            ModelParams::Fpa { m, delta } => s + n * (m as f64 + delta),
            ModelParams::Vpa { gamma, beta } => gamma * s + beta * n,
        }
    }

    /// Probability that the next placement links to `v`:
    /// FPA edge j of vertex t, or VPA vertex t (j ignored).
    pub fn connection_probability(&self, t: u32, j: u32, v: u32) -> Result<f64> {
        if v == 0 || v >= t {
            return Err(Error::VertexOutOfRange { v: v as u64, bound: t as u64 });
        }
        match self.params {
            ModelParams::Fpa { m, delta } => {
                if j == 0 || j > m {
                    return Err(Error::EdgeIndexOutOfRange { j, m });
                }
                self.expect_cursor((t, j))?;
                let md = m as f64 + delta;
                let num = self.indegree(v) as f64 + md;
                let den = (t as f64 - 2.0) * (delta + 2.0 * m as f64) + (j - 1) as f64 + md;
                Ok(num / den)
            }
            ModelParams::Vpa { gamma, beta } => {
                self.expect_cursor((t, 1))?;
                Ok((gamma * self.indegree(v) as f64 + beta) / t as f64)
            }
        }
    }

    fn expect_cursor(&self, want: (u32, u32)) -> Result<()> {
        let have = self.cursor();
        if have != want {
            return Err(Error::StateMismatch {
                expected: format!("(t={}, j={})", want.0, want.1),
                actual: format!("(t={}, j={})", have.0, have.1),
            });
        }
        Ok(())
    }

    /// Draws the target of the next FPA edge without changing the graph.
    pub fn sample_fpa_target<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<u32> {
        let ModelParams::Fpa { m, delta } = self.params else {
            return Err(Error::param("variant", "FPA sampling on a VPA graph"));
        };
        let (t, _) = self.cursor();
        Ok(fpa_target(&self.edges, self.fenwick.as_ref(), t, m as f64 + delta, rng))
    }

    /// Draws the out-neighbours of the next VPA vertex without changing the graph.
    pub fn sample_vpa_targets<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Vec<u32>> {
        let ModelParams::Vpa { gamma, beta } = self.params else {
            return Err(Error::param("variant", "VPA sampling on an FPA graph"));
        };
        let t = self.t + 1;
        Ok(match self.opts.vpa_mode {
            VpaMode::Scan => vpa_scan(&self.slots, t, gamma, beta, rng),
            VpaMode::Thinned => vpa_thinned(&self.slots, &self.edges, self.max_indeg, t, gamma, beta, rng),
        })
    }

    fn open_vertex(&mut self) {
        self.t += 1;
        self.slots.push(EMPTY_SLOT);
        let end = self.edges.len() as u32;
        self.out_start.push(end);
        if let Some(f) = self.fenwick.as_mut() {
            f.push(0);
        }
        self.placed = 0;
    }

    fn push_edge(&mut self, low: u32, high: u32, weight: f64) {
        let id = self.edges.len() as u32;
        assert!(id != NO_EDGE, "edge id space exhausted");
        self.edges.push(Edge { low, high, weight });
        let slot = &mut self.slots[low as usize];
        self.in_next.push(slot.in_head);
        slot.in_head = id;
        slot.indeg += 1;
        self.max_indeg = self.max_indeg.max(slot.indeg);
        if let Some(f) = self.fenwick.as_mut() {
            f.add(low as usize, 1);
        }
        *self.out_start.last_mut().unwrap() = id + 1;
    }

    /// Places the next FPA edge (opening a new vertex if the last one is complete).
    pub fn step_edge(&mut self, dist: &WeightDistribution) -> Result<()> {
        let ModelParams::Fpa { m, delta } = self.params else {
            return Err(Error::param("variant", "edge stepping needs FPA"));
        };
        if self.is_complete() {
            self.open_vertex();
        }
        #[cfg(debug_assertions)]
        {
            let (t, j) = self.cursor();
            let den = (t as f64 - 2.0) * (delta + 2.0 * m as f64) + (j - 1) as f64 + m as f64 + delta;
            debug_assert_eq!(self.edges.len() as u64, m as u64 * (t as u64 - 2) + (j - 1) as u64);
            debug_assert!((self.sampler_total() - den).abs() <= 1e-9 * den);
        }
        let t = self.t;
        let v = fpa_target(&self.edges, self.fenwick.as_ref(), t, m as f64 + delta, &mut self.rng);
        let w = dist.sample(&mut self.rng);
        self.push_edge(v, t, w);
        self.placed += 1;
        Ok(())
    }

    /// Completes the current vertex, or adds a whole new one.
    pub fn step_vertex(&mut self, dist: &WeightDistribution) -> Result<()> {
        match self.params {
            ModelParams::Fpa { .. } => {
                self.step_edge(dist)?;
                while !self.is_complete() {
                    self.step_edge(dist)?;
                }
            }
            ModelParams::Vpa { gamma, beta } => {
                let t = self.t + 1;
                let targets = match self.opts.vpa_mode {
                    VpaMode::Scan => vpa_scan(&self.slots, t, gamma, beta, &mut self.rng),
                    VpaMode::Thinned => {
                        vpa_thinned(&self.slots, &self.edges, self.max_indeg, t, gamma, beta, &mut self.rng)
                    }
                };
                self.open_vertex();
                for v in targets {
                    let w = dist.sample(&mut self.rng);
                    self.push_edge(v, t, w);
                }
            }
        }
        Ok(())
    }

    /// Grows until `time` vertices are present and complete.
    pub fn grow_to(&mut self, time: u32, dist: &WeightDistribution) -> Result<()> {
        if time < self.t {
            return Err(Error::TheoryDomain(format!("cannot grow back from t = {} to {time}", self.t)));
        }
        if !self.is_complete() {
            self.step_vertex(dist)?;
        }
        self.slots.reserve(time.saturating_sub(self.t) as usize);
        self.out_start.reserve(time.saturating_sub(self.t) as usize);
        while self.t < time {
            self.step_vertex(dist)?;
        }
        Ok(())
    }

    /// Rebuilds a graph from an edge list sorted by arrival, with a restored RNG.
    pub fn from_parts(
        params: ModelParams,
        opts: GrowOptions,
        seed: u64,
        t: u32,
        edges: Vec<Edge>,
        rng: SimRng,
    ) -> Result<Self> {
        let mut g = Self::new(params, seed, opts);
        g.rng = rng;
        g.edges.reserve(edges.len());
        let mut idx = 0;
        for v in 2..=t {
            g.open_vertex();
            while idx < edges.len() && edges[idx].high == v {
                let e = edges[idx];
                if e.low == 0 || e.low >= e.high {
                    return Err(Error::Snapshot(format!("edge {idx} ({} {}) is not old-to-young", e.low, e.high)));
                }
                g.push_edge(e.low, e.high, e.weight);
                g.placed += 1;
                idx += 1;
            }
            match params {
                ModelParams::Fpa { m, .. } => {
                    if g.placed > m || (g.placed < m && v < t) || g.placed == 0 {
                        return Err(Error::Snapshot(format!("vertex {v} has {} edges, m = {m}", g.placed)));
                    }
                }
                ModelParams::Vpa { .. } => g.placed = 0,
            }
        }
        if idx < edges.len() {
            return Err(Error::Snapshot(format!("edge {idx} out of order or beyond t = {t}")));
        }
        Ok(g)
    }
}

pub struct InEdges<'a> {
    next: &'a [u32],
    cur: u32,
}

impl Iterator for InEdges<'_> {
    type Item = u32;
    #[inline]
    fn next(&mut self) -> Option<u32> {
        if self.cur == NO_EDGE {
            return None;
        }
        let id = self.cur;
        self.cur = self.next[id as usize];
        Some(id)
    }
}

#[inline]
fn fpa_target<R: Rng + ?Sized>(edges: &[Edge], fenwick: Option<&Fenwick>, t: u32, md: f64, rng: &mut R) -> u32 {
    let n = (t - 1) as u64;
    let s = edges.len() as u64;
    let total = s as f64 + n as f64 * md;
    if rng.random::<f64>() * total < s as f64 {
        match fenwick {
            Some(f) => f.find(rng.random_range(0..s)) as u32,
            None => edges[rng.random_range(0..s) as usize].low,
        }
    } else {
        rng.random_range(1..=n) as u32
    }
}

fn vpa_scan<R: Rng + ?Sized>(slots: &[Slot], t: u32, gamma: f64, beta: f64, rng: &mut R) -> Vec<u32> {
    let inv_t = 1.0 / t as f64;
    let mut out = Vec::new();
    for v in 1..t {
        let p = (gamma * slots[v as usize].indeg as f64 + beta) * inv_t;
        if rng.random::<f64>() < p {
            out.push(v);
        }
    }
    out
}

fn vpa_thinned<R: Rng + ?Sized>(
    slots: &[Slot],
    edges: &[Edge],
    max_indeg: u32,
    t: u32,
    gamma: f64,
    beta: f64,
    rng: &mut R,
) -> Vec<u32> {
    let n = (t - 1) as u64;
    let s = edges.len() as u64;
    let tf = t as f64;
    let degree_mass = gamma * s as f64;
    let total = degree_mass + beta * n as f64;
    let p_max = (gamma * max_indeg as f64 + beta) / tf;
    let c = -(-p_max).ln_1p() / p_max;
    let proposals = Poisson::new(c * total / tf).expect("positive rate").sample(rng) as u64;
    let mut out = Vec::new();
    for _ in 0..proposals {
        let v = if rng.random::<f64>() * total < degree_mass {
            edges[rng.random_range(0..s) as usize].low
        } else {
            rng.random_range(1..=n) as u32
        };
        let p = (gamma * slots[v as usize].indeg as f64 + beta) / tf;
        if rng.random::<f64>() * c * p < -(-p).ln_1p() {
            out.push(v);
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}
