//! Edge-weight laws with generalized inverse CDFs, and the explosive /
//! conservative classifiers.

mod classify;
mod table;

pub use classify::{classify, ClassifyOptions, SeriesConvention, Verdict, WeightClassification};
pub use table::InverseTable;

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::Rng;
use rand_distr::Open01;

use crate::error::{Error, Result};

/// Largest CDF value that `TripleFlat` takes strictly below x = 1.
fn triple_flat_jump() -> f64 {
    (-std::f64::consts::E.exp()).exp()
}

#[derive(Clone, Debug, PartialEq)]
pub enum WeightDistribution {
    Deterministic(f64),
    Uniform { lo: f64, hi: f64 },
    Exponential { rate: f64 },
    /// F(x) = exp(-exp(e^{x^-beta})) on (0, 1), F = 1 from x = 1 on.
    TripleFlat { beta: f64 },
    Table(InverseTable),
}

impl WeightDistribution {
    pub fn deterministic(c: f64) -> Result<Self> {
        if !(c.is_finite() && c >= 0.0) {
            return Err(Error::param("det", format!("value {c} must be finite and >= 0")));
        }
        Ok(Self::Deterministic(c))
    }

    pub fn uniform(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo >= 0.0 && lo < hi) {
            return Err(Error::param("unif", format!("need 0 <= lo < hi, got [{lo}, {hi}]")));
        }
        Ok(Self::Uniform { lo, hi })
    }

    pub fn exponential(rate: f64) -> Result<Self> {
        if !(rate.is_finite() && rate > 0.0) {
            return Err(Error::param("exp", format!("rate {rate} must be > 0")));
        }
        Ok(Self::Exponential { rate })
    }

    pub fn triple_flat(beta: f64) -> Result<Self> {
        if !(beta.is_finite() && beta > 0.0) {
            return Err(Error::param("tripleflat", format!("beta {beta} must be > 0")));
        }
        Ok(Self::TripleFlat { beta })
    }

    pub fn cdf(&self, x: f64) -> f64 {
        match self {
            Self::Deterministic(c) => {
                if x >= *c {
                    1.0
                } else {
                    0.0
                }
            }
            Self::Uniform { lo, hi } => ((x - lo) / (hi - lo)).clamp(0.0, 1.0),
            Self::Exponential { rate } => {
                if x <= 0.0 {
                    0.0
                } else {
                    -(-rate * x).exp_m1()
                }
            }
            Self::TripleFlat { beta } => {
                if x <= 0.0 {
                    0.0
                } else if x >= 1.0 {
                    1.0
                } else {
                    (-(x.powf(-beta).exp()).exp()).exp()
                }
            }
            Self::Table(t) => t.cdf(x),
        }
    }

    /// Generalized inverse inf{x : F(x) >= y} for y in (0, 1].
    pub fn inverse_cdf(&self, y: f64) -> Result<f64> {
        if !(y > 0.0 && y <= 1.0) {
            return Err(Error::ProbabilityDomain(y));
        }
        Ok(self.inverse_unchecked(y))
    }

    fn inverse_unchecked(&self, y: f64) -> f64 {
        match self {
            Self::Deterministic(c) => *c,
            Self::Uniform { lo, hi } => lo + (hi - lo) * y,
            Self::Exponential { rate } => -(-y).ln_1p() / rate,
            Self::TripleFlat { beta } => {
                if y > triple_flat_jump() {
                    1.0
                } else {
                    (-y.ln()).ln().ln().powf(-1.0 / beta)
                }
            }
            Self::Table(t) => t.inverse(y),
        }
    }

    /// F^{-1}(exp(-exp(k))), evaluated without forming the (possibly
    /// underflowing) argument where a closed form exists.
    pub fn inverse_at_double_exp(&self, k: f64) -> f64 {
        match self {
            Self::TripleFlat { beta } => {
                if k <= std::f64::consts::E {
                    1.0
                } else {
                    k.ln().powf(-1.0 / beta)
                }
            }
            _ => {
                let y = (-k.exp()).exp();
                if y > 0.0 {
                    self.inverse_unchecked(y)
                } else {
                    self.support_inf()
                }
            }
        }
    }

    /// Left end b of the support.
    pub fn support_inf(&self) -> f64 {
        match self {
            Self::Deterministic(c) => *c,
            Self::Uniform { lo, .. } => *lo,
            Self::Exponential { .. } | Self::TripleFlat { .. } => 0.0,
            Self::Table(t) => t.inverse(f64::MIN_POSITIVE),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            Self::Deterministic(c) => *c,
            _ => {
                let u: f64 = rng.sample(Open01);
                self.inverse_unchecked(u)
            }
        }
    }

    pub fn is_unit(&self) -> bool {
        matches!(self, Self::Deterministic(c) if *c == 1.0)
    }

    /// Parses "det:1", "unif:0:2", "exp:1", "tripleflat:0.5" or "table:<path>".
    pub fn parse_spec(spec: &str) -> Result<Self> {
        let bad = |reason: &str| Error::DistSpec { spec: spec.to_string(), reason: reason.to_string() };
        let (kind, rest) = spec.split_once(':').ok_or_else(|| bad("expected `kind:args`"))?;
        let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad(&format!("`{s}` is not a number")));
        let wrap = |r: Result<Self>| r.map_err(|e| bad(&e.to_string()));
        match kind.trim() {
            "det" => wrap(Self::deterministic(num(rest)?)),
            "unif" => {
                let (a, b) = rest.split_once(':').ok_or_else(|| bad("expected `unif:lo:hi`"))?;
                wrap(Self::uniform(num(a)?, num(b)?))
            }
            "exp" => wrap(Self::exponential(num(rest)?)),
            "tripleflat" => wrap(Self::triple_flat(num(rest)?)),
            "table" => wrap(InverseTable::from_file(Path::new(rest)).map(Self::Table)),
            other => Err(bad(&format!("unknown kind `{other}`"))),
        }
    }
}

impl fmt::Display for WeightDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Deterministic(c) => write!(f, "det:{c}"),
            Self::Uniform { lo, hi } => write!(f, "unif:{lo}:{hi}"),
            Self::Exponential { rate } => write!(f, "exp:{rate}"),
            Self::TripleFlat { beta } => write!(f, "tripleflat:{beta}"),
            Self::Table(t) => write!(f, "table:{}", t.source()),
        }
    }
}

impl FromStr for WeightDistribution {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::parse_spec(s)
    }
}
