use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use pa_evolve::edge_weights::{classify, ClassifyOptions, WeightDistribution};
use pa_evolve::experiments::{self, DegreeWatchConfig, GreedyConfig, GreedyStart};
use pa_evolve::io::{fmt_f64, json_line, read_snapshot, trajectory_lines, write_snapshot, Csv, ExperimentConfig, OutputDir, RawConfig, RunManifest};
use pa_evolve::pam_graph::GrowingGraph;
use pa_evolve::stats::quantile;
use pa_evolve::theory::{self, build_ledger, EmptyArgmax, LedgerParams, Tau};
use pa_evolve::{Error, Result};

#[derive(Parser)]
#[command(name = "pa-evolve", version, about = "Distance evolution in growing preferential attachment graphs")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Common {
    /// TOML config file; flags override its keys.
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    raw: RawConfig,
}

impl Common {
    fn resolve(&self) -> Result<ExperimentConfig> {
        let base = match &self.config {
            Some(p) => RawConfig::from_file(p)?,
            None => RawConfig::default(),
        };
        base.merged(&self.raw).resolve()
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Grow one graph to the first base time and write a snapshot.
    Generate {
        #[command(flatten)]
        common: Common,
        /// Continue growing a saved snapshot instead of starting fresh.
        #[arg(long)]
        from: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Distance trajectories of typical pairs up to the horizon.
    Evolve {
        #[command(flatten)]
        common: Common,
        /// Recompute every checkpoint from scratch and compare.
        #[arg(long)]
        check_oracle: bool,
    },
    /// Closed-form profiles, checkpoint times, weight classification, ledger.
    Theory {
        #[arg(long, default_value_t = 2.5)]
        tau: f64,
        #[arg(long, default_value_t = 1_000_000)]
        t: u64,
        #[arg(long, default_value = "det:1")]
        weights: String,
        /// Also build the lower-bound ledger at t' in {t, t_1, t_2}.
        #[arg(long)]
        ledger: bool,
        #[arg(long, default_value_t = 1.0)]
        nu: f64,
        /// Floor empty argmax levels at 2 instead of failing.
        #[arg(long)]
        floor: bool,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Greedy two-connector paths against the exact distance to the core.
    Greedy {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 20.0)]
        s0: f64,
        /// Seed indegree threshold (defaults to s0).
        #[arg(long)]
        seed_indegree: Option<f64>,
        #[arg(long, default_value_t = 0.1)]
        delta_prime: f64,
        #[arg(long, default_value_t = 2)]
        levels: usize,
        #[arg(long, default_value_t = 10)]
        hop_budget: u32,
        #[arg(long, default_value_t = 32)]
        core_pairs: usize,
        #[arg(long, value_enum, default_value_t = GreedyStart::Seed)]
        start: GreedyStart,
    },
    /// Indegree barrier crossings and the pure-birth martingale.
    DegreeWatch {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 10)]
        s: u32,
        #[arg(long, value_delimiter = ',', default_value = "0.05,0.1")]
        delta_primes: Vec<f64>,
        /// Also simulate the pure-birth martingale with this many replicas.
        #[arg(long)]
        martingale: Option<usize>,
    },
    /// Monte Carlo check of the path-probability product bound.
    VerifyPagamma {
        #[arg(long, default_value_t = 1)]
        m: u32,
        #[arg(long, default_value_t = -0.5, allow_hyphen_values = true)]
        delta: f64,
        #[arg(long, default_value_t = 8)]
        t_max: u32,
        #[arg(long, default_value_t = 3)]
        path_len: usize,
        #[arg(long, default_value_t = 1_000_000)]
        runs: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Fitted neighbourhood-growth constant B per replica.
    Boundary {
        #[command(flatten)]
        common: Common,
        /// t' = factor * t.
        #[arg(long, default_value_t = 1)]
        t_prime_factor: u64,
        #[arg(long, default_value_t = 0.05)]
        grid_step: f64,
        #[arg(long, default_value_t = 10.0)]
        grid_max: f64,
    },
    /// Recompute sup-deviation quantiles from a replicas.jsonl file.
    Report {
        input: PathBuf,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

/// Ok(false) when a hard invariant failed.
fn run(cli: Cli) -> Result<bool> {
    match cli.cmd {
        Cmd::Generate { common, from, out } => generate(&common.resolve()?, from.as_deref(), &out),
        Cmd::Evolve { common, check_oracle } => evolve(&common.resolve()?, check_oracle),
        Cmd::Theory { tau, t, weights, ledger, nu, floor, out_dir } => {
            theory_cmd(tau, t, &weights, ledger, nu, floor, out_dir.as_deref())
        }
        Cmd::Greedy { common, s0, seed_indegree, delta_prime, levels, hop_budget, core_pairs, start } => {
            let cfg = common.resolve()?;
            let g = GreedyConfig {
                params: cfg.params,
                grow: cfg.grow,
                weights: cfg.weights.clone(),
                t: cfg.t_list[0] as u32,
                s0,
                seed_indegree,
                delta_prime,
                levels,
                hop_budget,
                seeds: cfg.replicas,
                seed: cfg.seed,
                core_pairs,
                start,
            };
            greedy(&cfg, &g)
        }
        Cmd::DegreeWatch { common, s, delta_primes, martingale } => degree(&common.resolve()?, s, &delta_primes, martingale),
        Cmd::VerifyPagamma { m, delta, t_max, path_len, runs, seed, out_dir } => {
            let params = pa_evolve::pam_graph::ModelParams::fpa(m, delta)?;
            let rep = experiments::verify_pagamma(params, t_max, path_len, runs, seed)?;
            let mut out = OutputDir::new(out_dir.as_deref())?;
            let mut lines = String::new();
            for p in &rep.paths {
                lines.push_str(&json_line(p));
            }
            if out.dir().is_some() {
                out.write("paths.jsonl", &lines)?;
            }
            out.write("pagamma.json", &json_line(&PaGammaSummary::from(&rep)))?;
            if !rep.imprecise.is_empty() {
                eprintln!("warning: {} paths have a 95% interval wider than 25% of p", rep.imprecise.len());
            }
            Ok(true)
        }
        Cmd::Boundary { common, t_prime_factor, grid_step, grid_max } => {
            let cfg = common.resolve()?;
            if !(grid_step > 0.0 && grid_max >= grid_step) {
                return Err(Error::param("grid_step", "need 0 < grid_step <= grid_max"));
            }
            let n = (grid_max / grid_step).round() as usize;
            let grid: Vec<f64> = (1..=n).map(|i| i as f64 * grid_step).collect();
            let rep = experiments::boundary_growth_check(&cfg, t_prime_factor, &grid)?;
            let mut out = OutputDir::new(cfg.out_dir.as_deref())?;
            let mut lines = String::new();
            for s in &rep.samples {
                lines.push_str(&json_line(s));
            }
            out.write("boundary.jsonl", &lines)?;
            let mut csv = Csv::new(&["t", "t_prime", "radius", "median_b", "max_b"]);
            for s in &rep.per_t {
                csv.row(vec![s.t.to_string(), s.t_prime.to_string(), s.radius.to_string(), fmt_f64(s.median_b), fmt_f64(s.max_b)]);
            }
            out.write("boundary.csv", &csv.render())?;
            Ok(true)
        }
        Cmd::Report { input } => report(&input),
    }
}

fn finish(cfg: &ExperimentConfig, out: &mut OutputDir, start: f64) -> Result<()> {
    if out.dir().is_some() {
        out.write("config.toml", &cfg.echo())?;
        let files = out.files.clone();
        let manifest = RunManifest::new(cfg.hash(), cfg.seed, start, files);
        out.write("manifest.json", &serde_json::to_string_pretty(&manifest)?)?;
    }
    Ok(())
}

fn generate(cfg: &ExperimentConfig, from: Option<&Path>, out: &Path) -> Result<bool> {
    let mut g = match from {
        Some(p) => read_snapshot(p)?,
        None => GrowingGraph::new(cfg.params, cfg.seed, cfg.grow),
    };
    g.grow_to(cfg.t_list[0] as u32, &cfg.weights)?;
    write_snapshot(&g, out)?;
    Ok(true)
}

fn evolve(cfg: &ExperimentConfig, check_oracle: bool) -> Result<bool> {
    let start = pa_evolve::io::records::unix_now();
    let rep = experiments::run_evolution_experiment(cfg)?;
    let mut out = OutputDir::new(cfg.out_dir.as_deref())?;
    let tau = cfg.tau.get();
    let mut traj = String::new();
    for r in &rep.replicas {
        traj.push_str(&trajectory_lines(r.seed, r.replica, tau, &r.trajectory));
    }
    out.write("trajectories.jsonl", &traj)?;
    let mut oracle_bad = 0;
    if check_oracle {
        for r in &rep.replicas {
            oracle_bad += experiments::replay_oracle(cfg, r)?;
        }
    }
    if out.dir().is_some() {
        let mut lines = String::new();
        for r in &rep.replicas {
            lines.push_str(&json_line(r));
        }
        out.write("replicas.jsonl", &lines)?;
        let mut csv = Csv::new(&[
            "t", "t_max", "replicas", "sup_q10", "sup_q50", "sup_q90", "sup_max", "weighted_sup_q90",
            "weighted_eps_sup_q90", "hydro_median",
        ]);
        let opt = |x: Option<f64>| x.map_or(String::new(), fmt_f64);
        for s in &rep.per_t {
            csv.row(vec![
                s.t.to_string(),
                s.t_max.to_string(),
                s.replicas.to_string(),
                fmt_f64(s.sup_q10),
                fmt_f64(s.sup_q50),
                fmt_f64(s.sup_q90),
                fmt_f64(s.sup_max),
                opt(s.weighted_sup_q90),
                opt(s.weighted_eps_sup_q90),
                opt(s.hydro_median),
            ]);
        }
        out.write("summary.csv", &csv.render())?;
        out.write("report.json", &serde_json::to_string_pretty(&rep)?)?;
        finish(cfg, &mut out, start)?;
    }
    eprintln!(
        "tightness proxy (q90 sup non-growth, truncated at T_max): {}; monotonicity violations: {}",
        rep.tightness_proxy, rep.monotonicity_violations
    );
    if check_oracle {
        eprintln!("oracle mismatches: {oracle_bad}");
    }
    Ok(rep.monotonicity_violations == 0 && oracle_bad == 0)
}

#[derive(Serialize)]
struct Profile {
    t: u64,
    t_prime: u64,
    two_k: u32,
    two_q: f64,
}

fn theory_cmd(tau: f64, t: u64, weights: &str, ledger: bool, nu: f64, floor: bool, out_dir: Option<&Path>) -> Result<bool> {
    let tau = Tau::new(tau)?;
    let dist = WeightDistribution::parse_spec(weights)?;
    let mut out = OutputDir::new(out_dir)?;
    let cps = theory::checkpoint_times(t, tau)?;
    let mut lines = String::new();
    for tp in theory::default_checkpoints(t, t * 64, tau, 8)? {
        let k = theory::k_graph(t, tp, tau)?;
        let q = theory::q_weighted(t, tp, tau, &dist)?;
        lines.push_str(&json_line(&Profile { t, t_prime: tp, two_k: 2 * k, two_q: 2.0 * q }));
    }
    out.write("profile.jsonl", &lines)?;
    let mut hydro = Csv::new(&["a", "limit", "tau"]);
    for i in 0..=40 {
        let a = i as f64 * 0.05;
        hydro.row(vec![fmt_f64(a), fmt_f64(theory::hydro_limit(a, tau)), fmt_f64(tau.get())]);
    }
    out.write("hydro.csv", &hydro.render())?;
    let c = classify(&dist, &ClassifyOptions::default());
    out.write("classification.json", &json_line(&serde_json::json!({
        "weights": dist.to_string(),
        "checkpoints": cps,
        "i1": format!("{:?}", c.i1),
        "i2": format!("{:?}", c.i2),
        "explosive": c.explosive(),
        "i2_finite": c.i2_finite(),
    })))?;
    if ledger {
        let mut p = LedgerParams::new(tau, t);
        p.nu = nu;
        p.empty_argmax = if floor { EmptyArgmax::FloorAtTwo } else { EmptyArgmax::Reject };
        let tps: Vec<u64> = cps.iter().copied().take(3).collect();
        let l = build_ledger(&p, &tps, None)?;
        let cc = l.check_convolution_bounds(l.fit_c());
        let bc = l.check_eta_growth(l.fit_b());
        out.write("ledger.json", &json_line(&serde_json::json!({
            "floored_levels": l.floored_levels(),
            "c": cc,
            "b": bc,
        })))?;
        return Ok(cc.passed() && bc.passed());
    }
    Ok(true)
}

fn greedy(cfg: &ExperimentConfig, g: &GreedyConfig) -> Result<bool> {
    let start = pa_evolve::io::records::unix_now();
    let recs = experiments::greedy_experiment(g)?;
    let mut out = OutputDir::new(cfg.out_dir.as_deref())?;
    let mut lines = String::new();
    for r in &recs {
        lines.push_str(&json_line(r));
    }
    out.write("greedy.jsonl", &lines)?;
    finish(cfg, &mut out, start)?;
    let unsound = recs.iter().filter(|r| r.sound == Some(false)).count();
    eprintln!(
        "greedy: {} records, {} successes, {unsound} unsound, kappa slack M = {}",
        recs.len(),
        recs.iter().filter(|r| r.success).count(),
        experiments::fit_kappa_slack(&recs)
    );
    Ok(unsound == 0)
}

fn degree(cfg: &ExperimentConfig, s: u32, delta_primes: &[f64], martingale: Option<usize>) -> Result<bool> {
    let start = pa_evolve::io::records::unix_now();
    let t = cfg.t_list[0];
    let dw = DegreeWatchConfig {
        params: cfg.params,
        grow: cfg.grow,
        t: t as u32,
        t_max: cfg.t_max(t) as u32,
        s,
        replicas: cfg.replicas,
        seed: cfg.seed,
    };
    let rep = experiments::degree_watch(&dw, delta_primes)?;
    let mut out = OutputDir::new(cfg.out_dir.as_deref())?;
    let mut csv = Csv::new(&["delta_prime", "violations", "replicas", "freq", "se"]);
    for r in &rep.rows {
        csv.row(vec![fmt_f64(r.delta_prime), r.freq.hits.to_string(), r.freq.n.to_string(), fmt_f64(r.freq.p), fmt_f64(r.freq.se)]);
    }
    out.write("degree_watch.csv", &csv.render())?;
    if !rep.missing.is_empty() {
        eprintln!("{} replicas had no vertex of indegree >= {s} at t", rep.missing.len());
    }
    if let Some(n) = martingale {
        let gamma = 1.0 / (cfg.tau.get() - 1.0);
        let times: Vec<u64> = (0..=10).map(|j| (t as f64 * 20f64.powf(j as f64 / 10.0)).round() as u64).collect();
        let m = experiments::pure_birth_martingale(t, s, gamma, &times, n, cfg.seed)?;
        out.write("martingale.json", &json_line(&m))?;
    }
    finish(cfg, &mut out, start)?;
    Ok(true)
}

#[derive(Serialize)]
struct PaGammaSummary {
    t_max: u32,
    path_len: usize,
    runs: u64,
    gamma: f64,
    nu_fit: f64,
    worst_path: Vec<u32>,
    worst_p: f64,
    imprecise_paths: usize,
}

impl From<&experiments::PaGammaReport> for PaGammaSummary {
    fn from(r: &experiments::PaGammaReport) -> Self {
        PaGammaSummary {
            t_max: r.t_max,
            path_len: r.path_len,
            runs: r.runs,
            gamma: r.gamma,
            nu_fit: r.nu_fit,
            worst_path: r.worst.path.clone(),
            worst_p: r.worst.p,
            imprecise_paths: r.imprecise.len(),
        }
    }
}

fn report(input: &Path) -> Result<bool> {
    let text = std::fs::read_to_string(input)?;
    let mut by_t: std::collections::BTreeMap<u64, Vec<f64>> = Default::default();
    for line in text.lines().filter(|l| !l.trim().is_empty()) {
        let v: serde_json::Value = serde_json::from_str(line)?;
        let t = v["t"].as_u64().ok_or_else(|| Error::Config("record lacks `t`".into()))?;
        let sup = v["sup_dev_graph"].as_f64().ok_or_else(|| Error::Config("record lacks `sup_dev_graph`".into()))?;
        by_t.entry(t).or_default().push(sup);
    }
    let mut csv = Csv::new(&["t", "replicas", "sup_q50", "sup_q90"]);
    for (t, xs) in &by_t {
        csv.row(vec![t.to_string(), xs.len().to_string(), fmt_f64(quantile(xs, 0.5)), fmt_f64(quantile(xs, 0.9))]);
    }
    print!("{}", csv.render());
    Ok(true)
}
