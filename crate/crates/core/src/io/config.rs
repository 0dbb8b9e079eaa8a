//! Key-value run configuration: TOML file plus flag overrides.

use std::path::{Path, PathBuf};

use clap::Args;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::edge_weights::WeightDistribution;
use crate::error::{Error, Result};
use crate::pam_graph::{GrowOptions, ModelParams, SamplerKind, VpaMode};
use crate::theory::Tau;

/// Every key is optional here; `resolve` fills defaults and validates.
/// Doubles as the shared flag set of the CLI (flags win over the file).
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    /// fpa or vpa.
    #[arg(long)]
    pub variant: Option<String>,
    #[arg(long)]
    pub m: Option<u32>,
    #[arg(long, allow_hyphen_values = true)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    /// Single base time (shorthand for t_list = [t]).
    #[arg(long)]
    pub t: Option<u64>,
    #[arg(long, value_delimiter = ',')]
    pub t_list: Option<Vec<u64>>,
    /// Absolute horizon; exclusive with horizon_factor.
    #[arg(long)]
    pub t_max: Option<u64>,
    /// Horizon as a multiple of each base time (default 64).
    #[arg(long)]
    pub horizon_factor: Option<u64>,
    #[arg(long)]
    pub replicas: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Edge-weight law: det:1, unif:lo:hi, exp:rate, tripleflat:beta, table:path.
    #[arg(long)]
    pub weights: Option<String>,
    #[arg(long)]
    pub sampler: Option<SamplerKind>,
    #[arg(long)]
    pub vpa_mode: Option<VpaMode>,
    /// Log-spaced checkpoints per decade, on top of the t_i.
    #[arg(long)]
    pub per_decade: Option<u32>,
    /// Also track the weighted distance.
    #[arg(long)]
    pub weighted: Option<bool>,
    /// Record d at the hydrodynamic a-grid.
    #[arg(long)]
    pub hydro: Option<bool>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

impl clap::ValueEnum for SamplerKind {
    fn value_variants<'a>() -> &'a [Self] {
        &[Self::EdgeMixture, Self::Fenwick]
    }
    fn to_possible_value(&self) -> Option<clap::builder::PossibleValue> {
        Some(clap::builder::PossibleValue::new(match self {
            Self::EdgeMixture => "edge-mixture",
            Self::Fenwick => "fenwick",
        }))
    }
}

impl clap::ValueEnum for VpaMode {
    fn value_variants<'a>() -> &'a [Self] {
        &[Self::Scan, Self::Thinned]
    }
    fn to_possible_value(&self) -> Option<clap::builder::PossibleValue> {
        Some(clap::builder::PossibleValue::new(match self {
            Self::Scan => "scan",
            Self::Thinned => "thinned",
        }))
    }
}

macro_rules! overlay {
    ($base:ident, $top:ident; $($f:ident),*) => {
        $( if $top.$f.is_some() { $base.$f = $top.$f.clone(); } )*
    };
}

impl RawConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.message().to_string()))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    /// Keys set in `flags` replace those in `self`.
    pub fn merged(mut self, flags: &RawConfig) -> Self {
        overlay!(self, flags; variant, m, delta, gamma, beta, t, t_list, t_max, horizon_factor,
            replicas, seed, weights, sampler, vpa_mode, per_decade, weighted, hydro, out_dir);
        self
    }

    pub fn resolve(&self) -> Result<ExperimentConfig> {
        let variant = self.variant.as_deref().ok_or_else(|| Error::param("variant", "missing"))?;
        let params = match variant {
            "fpa" => {
                if self.gamma.is_some() || self.beta.is_some() {
                    return Err(Error::param("gamma", "not a key of the fpa variant"));
                }
                let delta = self.delta.ok_or_else(|| Error::param("delta", "missing"))?;
                ModelParams::fpa(self.m.unwrap_or(1), delta)?
            }
            "vpa" => {
                if self.m.is_some() || self.delta.is_some() {
                    return Err(Error::param("delta", "not a key of the vpa variant"));
                }
                let gamma = self.gamma.ok_or_else(|| Error::param("gamma", "missing"))?;
                ModelParams::vpa(gamma, self.beta.unwrap_or(1.0))?
            }
            other => return Err(Error::param("variant", format!("`{other}` is neither fpa nor vpa"))),
        };
        let tau = Tau::new(params.tau()).map_err(|e| Error::param("delta", e.to_string()))?;
        let t_list = match (&self.t, &self.t_list) {
            (Some(_), Some(_)) => return Err(Error::param("t", "give either t or t_list")),
            (Some(t), None) => vec![*t],
            (None, Some(l)) => l.clone(),
            (None, None) => return Err(Error::param("t", "missing")),
        };
        if t_list.is_empty() || t_list.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::param("t_list", "must be non-empty and strictly ascending"));
        }
        if t_list[0] < 2 || *t_list.last().unwrap() >= u32::MAX as u64 / 128 {
            return Err(Error::param("t_list", "base times must lie in [2, 2^25)"));
        }
        let horizon = match (self.t_max, self.horizon_factor) {
            (Some(_), Some(_)) => return Err(Error::param("t_max", "exclusive with horizon_factor")),
            (Some(tm), None) => {
                if tm < *t_list.last().unwrap() || tm >= u32::MAX as u64 {
                    return Err(Error::param("t_max", format!("{tm} below max(t_list) or too large")));
                }
                Horizon::Absolute(tm)
            }
            (None, f) => {
                let f = f.unwrap_or(64);
                if f < 1 || f > 128 {
                    return Err(Error::param("horizon_factor", "must lie in [1, 128]"));
                }
                Horizon::Factor(f)
            }
        };
        let replicas = self.replicas.unwrap_or(1);
        if replicas < 1 {
            return Err(Error::param("replicas", "must be >= 1"));
        }
        let seed = self.seed.unwrap_or(0);
        if seed > i64::MAX as u64 {
            return Err(Error::param("seed", "must be below 2^63 (TOML integers are signed)"));
        }
        let weights = WeightDistribution::parse_spec(self.weights.as_deref().unwrap_or("det:1"))
            .map_err(|e| Error::param("weights", e.to_string()))?;
        let per_decade = self.per_decade.unwrap_or(8);
        if per_decade < 1 {
            return Err(Error::param("per_decade", "must be >= 1"));
        }
        let weighted = self.weighted.unwrap_or(!weights.is_unit());
        Ok(ExperimentConfig {
            params,
            tau,
            weights,
            t_list,
            horizon,
            replicas,
            seed,
            grow: GrowOptions { sampler: self.sampler.unwrap_or_default(), vpa_mode: self.vpa_mode.unwrap_or_default() },
            per_decade,
            weighted,
            hydro: self.hydro.unwrap_or(false),
            out_dir: self.out_dir.clone(),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum Horizon {
    Absolute(u64),
    Factor(u64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub params: ModelParams,
    pub tau: Tau,
    pub weights: WeightDistribution,
    pub t_list: Vec<u64>,
    pub horizon: Horizon,
    pub replicas: usize,
    pub seed: u64,
    pub grow: GrowOptions,
    pub per_decade: u32,
    pub weighted: bool,
    pub hydro: bool,
    pub out_dir: Option<PathBuf>,
}

impl ExperimentConfig {
    /// T_max for base time `t`.
    pub fn t_max(&self, t: u64) -> u64 {
        match self.horizon {
            Horizon::Absolute(tm) => tm,
            Horizon::Factor(f) => f * t,
        }
    }

    /// Fully explicit form of the config.
    pub fn to_raw(&self) -> RawConfig {
        let (m, delta, gamma, beta) = match self.params {
            ModelParams::Fpa { m, delta } => (Some(m), Some(delta), None, None),
            ModelParams::Vpa { gamma, beta } => (None, None, Some(gamma), Some(beta)),
        };
        let (t_max, horizon_factor) = match self.horizon {
            Horizon::Absolute(tm) => (Some(tm), None),
            Horizon::Factor(f) => (None, Some(f)),
        };
        RawConfig {
            variant: Some(self.params.variant_name().to_string()),
            m,
            delta,
            gamma,
            beta,
            t: None,
            t_list: Some(self.t_list.clone()),
            t_max,
            horizon_factor,
            replicas: Some(self.replicas),
            seed: Some(self.seed),
            weights: Some(self.weights.to_string()),
            sampler: Some(self.grow.sampler),
            vpa_mode: Some(self.grow.vpa_mode),
            per_decade: Some(self.per_decade),
            weighted: Some(self.weighted),
            hydro: Some(self.hydro),
            out_dir: self.out_dir.clone(),
        }
    }

    /// TOML echo of the resolved config; re-parses to the same config.
    pub fn echo(&self) -> String {
        toml::to_string(&self.to_raw()).expect("config serializes")
    }

    /// sha256 of the echo, hex.
    pub fn hash(&self) -> String {
        format!("{:x}", Sha256::digest(self.echo().as_bytes()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_resolves() {
        let c = RawConfig::from_toml("variant = \"fpa\"\nm = 1\ndelta = -0.5\nt = 10000\n").unwrap().resolve().unwrap();
        assert_eq!(c.tau.get(), 2.5);
        assert_eq!(c.t_list, vec![10_000]);
        assert_eq!(c.t_max(10_000), 640_000);
        assert!(c.weights.is_unit());
        assert!(!c.weighted);
    }

    #[test]
    fn domain_error_names_key() {
        let e = RawConfig::from_toml("variant = \"fpa\"\nm = 1\ndelta = -2\nt = 100\n").unwrap().resolve().unwrap_err();
        assert!(e.to_string().contains("delta"), "{e}");
    }

    #[test]
    fn unknown_key_is_an_error() {
        assert!(RawConfig::from_toml("variant = \"fpa\"\nfoo = 1\n").is_err());
    }

    #[test]
    fn echo_round_trips() {
        let c = RawConfig::from_toml("variant = \"vpa\"\ngamma = 0.6\nt_list = [100, 1000]\nweights = \"exp:1\"\n")
            .unwrap()
            .resolve()
            .unwrap();
        let again = RawConfig::from_toml(&c.echo()).unwrap().resolve().unwrap();
        assert_eq!(c, again);
        assert_eq!(c.hash(), again.hash());
    }

    #[test]
    fn flags_win() {
        let file = RawConfig { variant: Some("fpa".into()), delta: Some(-0.5), t: Some(100), seed: Some(1), ..Default::default() };
        let flags = RawConfig { seed: Some(9), ..Default::default() };
        assert_eq!(file.merged(&flags).resolve().unwrap().seed, 9);
    }
}
