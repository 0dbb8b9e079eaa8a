use serde::Serialize;

use super::{k_graph, Tau};
use crate::error::{Error, Result};

/// What to do when no x >= 2 satisfies the threshold inequality.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum EmptyArgmax {
    Reject,
    /// Record l = 2 and flag the level.
    FloorAtTwo,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct LedgerParams {
    pub tau: Tau,
    pub t: u64,
    pub nu: f64,
    pub c_rec: f64,
    pub delta_prime: f64,
    pub empty_argmax: EmptyArgmax,
}

impl LedgerParams {
    pub fn new(tau: Tau, t: u64) -> Self {
        Self { tau, t, nu: 1.0, c_rec: 1.1, delta_prime: 0.1, empty_argmax: EmptyArgmax::Reject }
    }

    fn validate(&self) -> Result<()> {
        if !(self.nu > 0.0) {
            return Err(Error::param("nu", "must be > 0"));
        }
        if !(self.c_rec > 1.0) {
            return Err(Error::param("c_rec", "must be > 1"));
        }
        if !(self.delta_prime > 0.0 && self.delta_prime < 1.0) {
            return Err(Error::param("delta_prime", "must lie in (0, 1)"));
        }
        Ok(())
    }
}

/// All arrays for one t'. Index k of `alpha`/`beta` holds the value on [0, k)
/// (index 0 unused); `phi[i][k]`, `psi[i][k]` hold the segment [i, k).
#[derive(Clone, Debug, Serialize)]
pub struct LedgerColumn {
    pub t_prime: u64,
    pub ell: Vec<u64>,
    pub floored: Vec<bool>,
    pub eta: Vec<f64>,
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    pub phi: Vec<Vec<f64>>,
    pub psi: Vec<Vec<f64>>,
    pub b_phi: Vec<f64>,
    pub b_psi: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct LowerBoundLedger {
    pub params: LedgerParams,
    pub gamma: f64,
    pub k_max: usize,
    pub columns: Vec<LedgerColumn>,
}

/// Largest integer x >= 2 with alpha x^{1-gamma} <= (k log t')^{-3}.
fn argmax_threshold(alpha: f64, k: usize, t_prime: f64, gamma: f64) -> Option<u64> {
    let rhs = -3.0 * (k as f64 * t_prime.ln()).ln();
    let ok = |x: u64| alpha.ln() + (1.0 - gamma) * (x as f64).ln() <= rhs;
    if !ok(2) {
        return None;
    }
    let (mut lo, mut hi) = (2u64, 4u64);
    while ok(hi) {
        lo = hi;
        if hi >= 1 << 62 {
            return Some(hi);
        }
        hi *= 2;
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if ok(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(lo)
}

fn build_column(p: &LedgerParams, gamma: f64, k_max: usize, t_prime: u64) -> Result<LedgerColumn> {
    let tp = t_prime as f64;
    let (nu, c) = (p.nu, p.c_rec);
    let mut ell = vec![0u64; k_max + 1];
    let mut floored = vec![false; k_max + 1];
    let mut eta = vec![0.0; k_max + 1];
    let mut alpha = vec![f64::NAN; k_max + 1];
    let mut beta = vec![f64::NAN; k_max + 1];

    let check_eta = |k: usize, l: u64| -> Result<f64> {
        let e = tp / l as f64;
        if e < std::f64::consts::E {
            return Err(Error::Ledger(format!("eta_{k} = {e:.4} < e at t' = {t_prime}")));
        }
        Ok(e)
    };

    ell[0] = (p.delta_prime * p.t as f64).ceil() as u64;
    eta[0] = check_eta(0, ell[0])?;
    let l0 = ell[0] as f64;
    if k_max >= 1 {
        alpha[1] = nu * l0.powf(gamma - 1.0);
        beta[1] = nu * l0.powf(-gamma);
    }
    for k in 1..=k_max {
        ell[k] = match argmax_threshold(alpha[k], k, tp, gamma) {
            Some(x) => x,
            None => match p.empty_argmax {
                EmptyArgmax::FloorAtTwo => {
                    floored[k] = true;
                    2
                }
                EmptyArgmax::Reject => {
                    return Err(Error::Ledger(format!("no threshold x >= 2 at level {k}, t' = {t_prime}")))
                }
            },
        };
        eta[k] = check_eta(k, ell[k])?;
        if k < k_max {
            let lk = ell[k] as f64;
            alpha[k + 1] = c * (alpha[k] * eta[k].ln() + beta[k] * tp.powf(2.0 * gamma - 1.0));
            beta[k + 1] = c * (alpha[k] * lk.powf(1.0 - 2.0 * gamma) + beta[k] * eta[k].ln());
        }
    }

    let mut phi = vec![vec![f64::NAN; k_max + 1]; k_max + 1];
    let mut psi = vec![vec![f64::NAN; k_max + 1]; k_max + 1];
    for i in 0..k_max {
        phi[i][i + 1] = nu * tp.powf(gamma - 1.0);
        psi[i][i + 1] = 0.0;
        for k in i + 2..=k_max {
            let (f, s) = (phi[i][k - 1], psi[i][k - 1]);
            let le = eta[k - 1].ln();
            phi[i][k] = c * (f * le + s * tp.powf(2.0 * gamma - 1.0));
            psi[i][k] = c * (f * (ell[k - 1] as f64).powf(1.0 - 2.0 * gamma) + s * le);
        }
    }

    let mut b_phi = vec![f64::NAN; k_max + 1];
    let mut b_psi = vec![f64::NAN; k_max + 1];
    for k in 2..=k_max {
        b_phi[k] = (1..k).map(|i| beta[i] * phi[i][k]).sum();
        b_psi[k] = (1..k).map(|i| beta[i] * psi[i][k]).sum();
    }

    Ok(LedgerColumn { t_prime, ell, floored, eta, alpha, beta, phi, psi, b_phi, b_psi })
}

/// Builds one column per t' for levels 0..=k_max (default K_{t,t}).
pub fn build_ledger(params: &LedgerParams, t_primes: &[u64], k_max: Option<usize>) -> Result<LowerBoundLedger> {
    params.validate()?;
    let k_max = match k_max {
        Some(k) => k,
        None => k_graph(params.t, params.t, params.tau)? as usize,
    };
    let gamma = params.tau.gamma();
    let columns = t_primes
        .iter()
        .map(|&tp| {
            if tp < params.t {
                return Err(Error::TheoryDomain(format!("t' = {tp} before t = {}", params.t)));
            }
            build_column(params, gamma, k_max, tp)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LowerBoundLedger { params: *params, gamma, k_max, columns })
}

/// Outcome of a numeric check with a constant fitted at k = 2.
#[derive(Clone, Debug, Serialize)]
pub struct FittedCheck {
    pub constant: f64,
    pub checked: usize,
    /// (t', k) pairs where the inequality failed.
    pub failures: Vec<(u64, usize)>,
}

impl FittedCheck {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

const REL_SLACK: f64 = 1e-12;

impl LowerBoundLedger {
    pub fn floored_levels(&self) -> usize {
        self.columns.iter().map(|c| c.floored.iter().filter(|f| **f).count()).sum()
    }

    /// Smallest C meeting the k = 2 base case of the induction:
    /// B_2^phi <= C alpha_2 t'^{-gamma} in every column, and c C >= nu.
    pub fn fit_c(&self) -> f64 {
        let g = self.gamma;
        let from_data = self
            .columns
            .iter()
            .map(|col| col.b_phi[2] * (col.t_prime as f64).powf(g) / col.alpha[2])
            .fold(0.0, f64::max);
        from_data.max(self.params.nu / self.params.c_rec)
    }

    /// B_k^psi <= C (k-2) beta_k t'^{-gamma} and B_k^phi <= C (k-1) alpha_k t'^{-gamma}
    /// for 2 <= k <= k_max.
    pub fn check_convolution_bounds(&self, c_const: f64) -> FittedCheck {
        let g = self.gamma;
        let mut failures = Vec::new();
        let mut checked = 0;
        for col in &self.columns {
            let tpg = (col.t_prime as f64).powf(-g);
            for k in 2..=self.k_max {
                checked += 1;
                let psi_ok = col.b_psi[k] <= c_const * (k - 2) as f64 * col.beta[k] * tpg * (1.0 + REL_SLACK);
                let phi_ok = col.b_phi[k] <= c_const * (k - 1) as f64 * col.alpha[k] * tpg * (1.0 + REL_SLACK);
                if !(psi_ok && phi_ok) {
                    failures.push((col.t_prime, k));
                }
            }
        }
        FittedCheck { constant: c_const, checked, failures }
    }

    fn a2_scale(&self, t_prime: u64, k: usize) -> f64 {
        let r = (t_prime as f64 / self.params.t as f64).ln().max(1.0);
        r * (self.params.tau.get() - 2.0).powf(-(k as f64) / 2.0)
    }

    /// Smallest B with t'/l_2 <= exp(B (1 v log(t'/t)) (tau-2)^{-1}) in every column.
    pub fn fit_b(&self) -> f64 {
        self.columns
            .iter()
            .map(|col| col.eta[2].ln() / self.a2_scale(col.t_prime, 2))
            .fold(0.0, f64::max)
    }

    /// t'/l_k <= exp(B (1 v log(t'/t)) (tau-2)^{-k/2}) for 2 <= k <= k_max.
    pub fn check_eta_growth(&self, b_const: f64) -> FittedCheck {
        let mut failures = Vec::new();
        let mut checked = 0;
        for col in &self.columns {
            for k in 2..=self.k_max {
                checked += 1;
                if col.eta[k].ln() > b_const * self.a2_scale(col.t_prime, k) * (1.0 + REL_SLACK) {
                    failures.push((col.t_prime, k));
                }
            }
        }
        FittedCheck { constant: b_const, checked, failures }
    }
}
