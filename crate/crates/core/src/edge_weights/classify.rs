use serde::Serialize;

use super::WeightDistribution;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SeriesConvention {
    /// Terms F^{-1}(e^{-e^k}).
    DoubleExpDecay,
    /// Terms F^{-1}(exp(exp(-k))); the argument exceeds 1, so every term is undefined.
    AsPrinted,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Finite,
    Infinite,
    Inconclusive,
}

#[derive(Clone, Copy, Debug)]
pub struct ClassifyOptions {
    pub k_max: u32,
    pub divergence_threshold: f64,
    pub convention: SeriesConvention,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        Self { k_max: 64, divergence_threshold: 1e6, convention: SeriesConvention::DoubleExpDecay }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct WeightClassification {
    pub i1_partial: f64,
    pub i2_partial: f64,
    pub i1: Verdict,
    pub i2: Verdict,
}

impl WeightClassification {
    pub fn explosive(&self) -> bool {
        self.i1 == Verdict::Finite
    }

    pub fn i2_finite(&self) -> bool {
        self.i2 == Verdict::Finite
    }

    pub fn inconclusive(&self) -> bool {
        self.i1 == Verdict::Inconclusive || self.i2 == Verdict::Inconclusive
    }
}

const TAIL_RATIOS: usize = 8;
const DECAY_RATIO: f64 = 0.99;
const CONDENSED_LEVELS: u32 = 10;

pub fn classify(dist: &WeightDistribution, opts: &ClassifyOptions) -> WeightClassification {
    if opts.convention == SeriesConvention::AsPrinted {
        return WeightClassification {
            i1_partial: f64::NAN,
            i2_partial: f64::NAN,
            i1: Verdict::Inconclusive,
            i2: Verdict::Inconclusive,
        };
    }
    let b = dist.support_inf();
    let a1 = |k: f64| dist.inverse_at_double_exp(k);
    let a2 = |k: f64| (dist.inverse_at_double_exp(k) - b).max(0.0) / k;

    let i1_partial: f64 = (0..=opts.k_max).map(|k| a1(k as f64)).sum();
    let i2_partial: f64 = (1..=opts.k_max).map(|k| a2(k as f64)).sum();

    let i1 = verdict(i1_partial, condensed_log_terms(|k| a1(k).ln()), opts.divergence_threshold);
    let i2 = verdict(i2_partial, condensed_log_terms(|k| a2(k).ln()), opts.divergence_threshold);
    WeightClassification { i1_partial, i2_partial, i1, i2 }
}

/// Log-terms of the twice Cauchy-condensed series, sum_i 2^i 2^{2^i} a(2^{2^i}),
/// which converges iff sum_k a(k) does for non-increasing a.
fn condensed_log_terms(ln_a: impl Fn(f64) -> f64) -> Vec<f64> {
    let ln2 = std::f64::consts::LN_2;
    (0..CONDENSED_LEVELS)
        .map(|i| {
            let e = 2f64.powi(i as i32);
            i as f64 * ln2 + e * ln2 + ln_a(2f64.powf(e))
        })
        .collect()
}

fn verdict(partial: f64, ln_terms: Vec<f64>, threshold: f64) -> Verdict {
    if partial > threshold {
        return Verdict::Infinite;
    }
    if partial.is_nan() || ln_terms.iter().any(|t| t.is_nan()) {
        return Verdict::Inconclusive;
    }
    let mut condensed_sum = 0.0;
    for t in &ln_terms {
        condensed_sum += t.exp();
        if condensed_sum > threshold {
            return Verdict::Infinite;
        }
    }
    let tail = &ln_terms[ln_terms.len() - TAIL_RATIOS - 1..];
    if tail.iter().all(|t| *t == f64::NEG_INFINITY) {
        return Verdict::Finite;
    }
    let ratios: Vec<f64> = tail
        .windows(2)
        .map(|w| if w[1] == f64::NEG_INFINITY { 0.0 } else { (w[1] - w[0]).exp() })
        .collect();
    if ratios.iter().all(|r| *r >= DECAY_RATIO) {
        Verdict::Infinite
    } else if ratios.iter().all(|r| *r < DECAY_RATIO) {
        Verdict::Finite
    } else {
        Verdict::Inconclusive
    }
}
