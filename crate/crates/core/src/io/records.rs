//! JSON-lines and CSV record emission, and the run manifest.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::distance_engine::Trajectory;
use crate::error::Result;

/// 17 significant digits; "inf" for infinities, "nan" for NaN.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

/// JSON token for a float: a number, or the string "inf"/"nan".
pub fn json_f64(x: f64) -> String {
    if x.is_finite() {
        fmt_f64(x)
    } else {
        format!("\"{}\"", fmt_f64(x))
    }
}

/// One line per checkpoint: {"seed","replica","t","tau","tp","dg","dl","twoK","twoQ"}.
pub fn trajectory_lines(seed: u64, replica: usize, tau: f64, traj: &Trajectory) -> String {
    let mut out = String::new();
    for p in &traj.points {
        let dg = p.dg.finite().map_or("\"inf\"".to_string(), |d| d.to_string());
        let dl = match p.dl {
            None => "null".to_string(),
            Some(d) => json_f64(d.to_f64()),
        };
        let _ = writeln!(
            out,
            "{{\"seed\":{seed},\"replica\":{replica},\"t\":{},\"tau\":{},\"u\":{},\"v\":{},\"tp\":{},\"dg\":{dg},\"dl\":{dl},\"twoK\":{},\"twoQ\":{}}}",
            traj.t,
            json_f64(tau),
            traj.u,
            traj.v,
            p.tp,
            p.two_k,
            json_f64(p.two_q),
        );
    }
    out
}

/// Serializes one record as a JSON line via serde (non-finite floats become null).
pub fn json_line<T: Serialize>(rec: &T) -> String {
    let mut s = serde_json::to_string(rec).expect("record serializes");
    s.push('\n');
    s
}

/// CSV table with a fixed header; cells are written as given.
pub struct Csv {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        Csv { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn row(&mut self, cells: Vec<String>) {
        assert_eq!(cells.len(), self.header.len(), "csv row width");
        self.rows.push(cells);
    }

    pub fn render(&self) -> String {
        let mut s = self.header.join(",");
        s.push('\n');
        for r in &self.rows {
            s.push_str(&r.join(","));
            s.push('\n');
        }
        s
    }
}

/// Append-only writer collecting the list of files it produced.
pub struct OutputDir {
    dir: Option<PathBuf>,
    pub files: Vec<PathBuf>,
}

impl OutputDir {
    pub fn new(dir: Option<&Path>) -> Result<Self> {
        if let Some(d) = dir {
            std::fs::create_dir_all(d)?;
        }
        Ok(OutputDir { dir: dir.map(Path::to_path_buf), files: Vec::new() })
    }

    /// Writes `name` (or stdout when there is no directory).
    pub fn write(&mut self, name: &str, contents: &str) -> Result<()> {
        match &self.dir {
            Some(d) => {
                let p = d.join(name);
                std::fs::write(&p, contents)?;
                self.files.push(p);
            }
            None => {
                std::io::stdout().write_all(contents.as_bytes())?;
            }
        }
        Ok(())
    }

    pub fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RunManifest {
    pub config_hash: String,
    pub tool_version: String,
    pub seed: u64,
    pub start_unix: f64,
    pub end_unix: f64,
    pub outputs: Vec<PathBuf>,
}

pub fn unix_now() -> f64 {
    std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0)
}

impl RunManifest {
    pub fn new(config_hash: String, seed: u64, start_unix: f64, outputs: Vec<PathBuf>) -> Self {
        RunManifest {
            config_hash,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            seed,
            start_unix,
            end_unix: unix_now(),
            outputs,
        }
    }
}
