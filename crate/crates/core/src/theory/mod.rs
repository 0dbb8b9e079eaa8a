//! Closed-form distance profiles, time warps, checkpoint times, and the
//! lower-bound recursions.

mod good_paths;
mod ledger;

pub use good_paths::{expected_good_paths, path_weight_bound, MAX_ENUM_SIZE};
pub use ledger::{build_ledger, EmptyArgmax, FittedCheck, LedgerColumn, LedgerParams, LowerBoundLedger};

use serde::{Deserialize, Serialize};

use crate::edge_weights::WeightDistribution;
use crate::error::{Error, Result};

/// Power-law exponent restricted to (2, 3).
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Tau(f64);

impl Tau {
    pub fn new(tau: f64) -> Result<Self> {
        if tau > 2.0 && tau < 3.0 {
            Ok(Self(tau))
        } else {
            Err(Error::param("tau", format!("{tau} not in (2, 3)")))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }

    /// gamma = 1 / (tau - 1), in (1/2, 1).
    pub fn gamma(self) -> f64 {
        1.0 / (self.0 - 1.0)
    }

    /// |log(tau - 2)|.
    pub fn abs_log(self) -> f64 {
        (self.0 - 2.0).ln().abs()
    }
}

impl TryFrom<f64> for Tau {
    type Error = Error;
    fn try_from(v: f64) -> Result<Self> {
        Self::new(v)
    }
}

impl From<Tau> for f64 {
    fn from(t: Tau) -> f64 {
        t.0
    }
}

pub const MIN_BASE_TIME: u64 = 16;

fn check_times(t: f64, t_prime: f64) -> Result<()> {
    if !(t >= MIN_BASE_TIME as f64) {
        return Err(Error::TheoryDomain(format!("t = {t} below {MIN_BASE_TIME}")));
    }
    if !(t_prime >= t) {
        return Err(Error::TheoryDomain(format!("t' = {t_prime} before t = {t}")));
    }
    Ok(())
}

/// K_{t,t'} for real-valued times.
pub fn k_graph_real(t: f64, t_prime: f64, tau: Tau) -> Result<u32> {
    check_times(t, t_prime)?;
    let num = t.ln().ln() - (t_prime / t).ln().max(1.0).ln();
    let half = (num / tau.abs_log()).floor();
    Ok(2 * half.max(1.0) as u32)
}

pub fn k_graph(t: u64, t_prime: u64, tau: Tau) -> Result<u32> {
    k_graph_real(t as f64, t_prime as f64, tau)
}

/// Q_{t,t'} = sum_{k=1}^{K} F^{-1}(exp(-(tau-2)^{-k/2})).
pub fn q_weighted_real(t: f64, t_prime: f64, tau: Tau, dist: &WeightDistribution) -> Result<f64> {
    let k = k_graph_real(t, t_prime, tau)?;
    Ok((1..=k).map(|j| dist.inverse_at_double_exp(0.5 * j as f64 * tau.abs_log())).sum())
}

pub fn q_weighted(t: u64, t_prime: u64, tau: Tau, dist: &WeightDistribution) -> Result<f64> {
    q_weighted_real(t as f64, t_prime as f64, tau, dist)
}

/// T_t(a) = t exp(log^a t).
pub fn time_warp(t: f64, a: f64) -> Result<f64> {
    if !(t >= 3.0) || !(a >= 0.0) {
        return Err(Error::TheoryDomain(format!("time_warp needs t >= 3, a >= 0 (t={t}, a={a})")));
    }
    Ok(t * t.ln().powf(a).exp())
}

/// Inverse of `time_warp` in a.
pub fn time_warp_inverse(t: f64, t_prime: f64) -> Result<f64> {
    if !(t >= 3.0) || !(t_prime >= t * std::f64::consts::E) {
        return Err(Error::TheoryDomain(format!("t' = {t_prime} below t e")));
    }
    Ok((t_prime / t).ln().ln() / t.ln().ln())
}

/// T_g(t) = t^{1 + (tau-2)^{-g/4}}.
pub fn time_warp_g(t: u64, g: f64, tau: Tau) -> Result<f64> {
    let k = k_graph(t, t, tau)?;
    if !(g >= 0.0 && g <= 2.0 * k as f64) {
        return Err(Error::TheoryDomain(format!("g = {g} outside [0, {}]", 2 * k)));
    }
    Ok((t as f64).powf(1.0 + (tau.get() - 2.0).powf(-g / 4.0)))
}

/// (1 - min(a, 1)) * 4 / |log(tau - 2)|.
pub fn hydro_limit(a: f64, tau: Tau) -> f64 {
    (1.0 - a.min(1.0)) * 4.0 / tau.abs_log()
}

/// t_i = min{t' : K_{t,t} - K_{t,t'} = 2i}, for every i the clamp K >= 2 allows.
pub fn checkpoint_times(t: u64, tau: Tau) -> Result<Vec<u64>> {
    let k0 = k_graph(t, t, tau)?;
    let mut out = vec![t];
    let mut lo = t;
    let mut i = 1u32;
    while k0 >= 2 * i + 2 {
        let target = k0 - 2 * i;
        let mut hi = lo.max(1);
        while k_graph(t, hi, tau)? > target {
            if hi > u64::MAX / 4 {
                return Ok(out);
            }
            lo = hi;
            hi *= 2;
        }
        // smallest t' in (lo, hi] with K <= target
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if k_graph(t, mid, tau)? > target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        if k_graph(t, hi, tau)? == target {
            out.push(hi);
        }
        lo = hi;
        i += 1;
    }
    Ok(out)
}

/// The t_i together with a log-spaced grid (`per_decade` points per decade)
/// from t up to `t_max`, sorted and deduplicated.
pub fn default_checkpoints(t: u64, t_max: u64, tau: Tau, per_decade: u32) -> Result<Vec<u64>> {
    let mut pts: Vec<u64> = checkpoint_times(t, tau)?.into_iter().filter(|&x| x <= t_max).collect();
    let step = 10f64.powf(1.0 / per_decade as f64);
    let mut x = t as f64;
    while x <= t_max as f64 {
        pts.push(x.round() as u64);
        x *= step;
    }
    pts.push(t_max);
    pts.sort_unstable();
    pts.dedup();
    Ok(pts)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tau25() -> Tau {
        Tau::new(2.5).unwrap()
    }

    #[test]
    fn tau_domain() {
        assert!(Tau::new(2.0).is_err());
        assert!(Tau::new(3.0).is_err());
        assert!((tau25().gamma() - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn k_examples() {
        assert_eq!(k_graph(1_000_000, 1_000_000, tau25()).unwrap(), 6);
        let tp = 1e6 * (std::f64::consts::E.powi(2)).exp();
        assert_eq!(k_graph_real(1e6, tp, tau25()).unwrap(), 2);
        assert_eq!(k_graph(1_000_000, u64::MAX, tau25()).unwrap(), 2);
        assert!(k_graph(15, 20, tau25()).is_err());
        assert!(k_graph(100, 99, tau25()).is_err());
    }

    #[test]
    fn q_examples() {
        let det = WeightDistribution::deterministic(1.0).unwrap();
        assert_eq!(q_weighted(1_000_000, 1_000_000, tau25(), &det).unwrap(), 6.0);
        let exp = WeightDistribution::exponential(1.0).unwrap();
        let q = q_weighted(1_000_000, 1_000_000, tau25(), &exp).unwrap();
        assert!((q - 0.5072).abs() < 1e-4, "{q}");
    }

    #[test]
    fn warp_examples() {
        let e = std::f64::consts::E;
        assert!((time_warp(1000.0, 0.0).unwrap() - 1000.0 * e).abs() < 1e-9);
        assert!((time_warp(1000.0, 1.0).unwrap() / 1e6 - 1.0).abs() < 1e-12);
        let g = time_warp_g(1000, 4.0, tau25()).unwrap();
        assert!((g / 1e9 - 1.0).abs() < 1e-12);
        let a = time_warp_inverse(1e4, time_warp(1e4, 0.37).unwrap()).unwrap();
        assert!((a - 0.37).abs() < 1e-12);
    }

    #[test]
    fn hydro_examples() {
        assert!((hydro_limit(0.0, tau25()) - 5.7708).abs() < 1e-4);
        assert_eq!(hydro_limit(1.0, tau25()), 0.0);
        assert_eq!(hydro_limit(7.0, tau25()), 0.0);
        assert!((hydro_limit(0.5, tau25()) - 2.8854).abs() < 1e-4);
    }

    #[test]
    fn checkpoint_examples() {
        let ts = checkpoint_times(1_000_000, tau25()).unwrap();
        assert_eq!(ts[0], 1_000_000);
        assert!((ts[1] as f64 / 5.623413e6 - 1.0).abs() < 1e-6, "{ts:?}");
        let e = std::f64::consts::E;
        assert!(ts[1] as f64 >= 1e6 * e && ts[1] as f64 <= 1e6 * e.powi(4));
        for w in ts.windows(2) {
            assert!(w[0] < w[1]);
        }
    }
}
