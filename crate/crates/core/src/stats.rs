//! Small summary statistics over replica samples.

use serde::Serialize;

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Standard error of the mean (sample variance, n - 1).
pub fn std_error(xs: &[f64]) -> f64 {
    let n = xs.len();
    if n < 2 {
        return f64::NAN;
    }
    let m = mean(xs);
    let var = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1) as f64;
    (var / n as f64).sqrt()
}

/// Sample quantile, linear interpolation between order statistics (type 7).
pub fn quantile(xs: &[f64], p: f64) -> f64 {
    let mut v: Vec<f64> = xs.to_vec();
    v.sort_by(f64::total_cmp);
    quantile_sorted(&v, p)
}

pub fn quantile_sorted(v: &[f64], p: f64) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    let h = (v.len() - 1) as f64 * p.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    v[lo] + (h - lo as f64) * (v[hi] - v[lo])
}

pub fn median(xs: &[f64]) -> f64 {
    quantile(xs, 0.5)
}

/// Proportion with its binomial standard error.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Proportion {
    pub hits: u64,
    pub n: u64,
    pub p: f64,
    pub se: f64,
}

impl Proportion {
    pub fn new(hits: u64, n: u64) -> Self {
        let p = hits as f64 / n as f64;
        Proportion { hits, n, p, se: (p * (1.0 - p) / n as f64).sqrt() }
    }
}

/// Hill estimator of the tail exponent tau from the top `k` order statistics.
pub fn hill_tau(values: &[f64], k: usize) -> f64 {
    let mut v: Vec<f64> = values.iter().copied().filter(|&x| x > 0.0).collect();
    v.sort_by(|a, b| b.total_cmp(a));
    let k = k.min(v.len() - 1);
    let xk = v[k];
    let s: f64 = v[..k].iter().map(|x| (x / xk).ln()).sum::<f64>() / k as f64;
    1.0 + 1.0 / s
}
