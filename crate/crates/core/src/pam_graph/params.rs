use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Attachment rule of the growing graph.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "lowercase")]
pub enum ModelParams {
    /// Fixed out-degree m; edge j of vertex t picks v < t with weight D_v + m + delta.
    Fpa { m: u32, delta: f64 },
    /// Each v < t is linked independently with probability (gamma D_v + beta) / t.
    Vpa { gamma: f64, beta: f64 },
}

impl ModelParams {
    pub fn fpa(m: u32, delta: f64) -> Result<Self> {
        if m < 1 {
            return Err(Error::param("m", "must be >= 1"));
        }
        if !(delta.is_finite() && delta > -(m as f64)) {
            return Err(Error::param("delta", format!("{delta} must exceed -m = -{m}")));
        }
        Ok(Self::Fpa { m, delta })
    }

    pub fn vpa(gamma: f64, beta: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma < 1.0) {
            return Err(Error::param("gamma", format!("{gamma} not in (0, 1)")));
        }
        if !(beta > 0.0 && beta <= 1.0) {
            return Err(Error::param("beta", format!("{beta} not in (0, 1]")));
        }
        Ok(Self::Vpa { gamma, beta })
    }

    pub fn tau(&self) -> f64 {
        match *self {
            Self::Fpa { m, delta } => 3.0 + delta / m as f64,
            Self::Vpa { gamma, .. } => 1.0 + 1.0 / gamma,
        }
    }

    pub fn variant_name(&self) -> &'static str {
        match self {
            Self::Fpa { .. } => "fpa",
            Self::Vpa { .. } => "vpa",
        }
    }
}

impl fmt::Display for ModelParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Fpa { m, delta } => write!(f, "fpa(m={m}, delta={delta})"),
            Self::Vpa { gamma, beta } => write!(f, "vpa(gamma={gamma}, beta={beta})"),
        }
    }
}
