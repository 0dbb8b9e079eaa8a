//! Versioned text snapshots of a growing graph, including its RNG state.

use std::fmt::Write as _;
use std::path::Path;

use rand_chacha::rand_core::SeedableRng;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::pam_graph::{Edge, GrowOptions, GrowingGraph, ModelParams, SamplerKind, VpaMode};
use crate::rng::SimRng;

pub const SNAPSHOT_VERSION: &str = "pa-evolve/v1";

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

fn unhex(s: &str) -> Option<[u8; 32]> {
    if s.len() != 64 {
        return None;
    }
    let mut out = [0u8; 32];
    for (i, o) in out.iter_mut().enumerate() {
        *o = u8::from_str_radix(&s[2 * i..2 * i + 2], 16).ok()?;
    }
    Some(out)
}

fn kebab<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_value(v).ok().and_then(|j| j.as_str().map(str::to_string)).unwrap_or_default()
}

/// Snapshot text: header line, one `low high weight` line per edge, checksum trailer.
pub fn snapshot_string(g: &GrowingGraph) -> String {
    let (m, delta, gamma, beta) = match *g.params() {
        ModelParams::Fpa { m, delta } => (m.to_string(), format!("{delta:.16e}"), "-".into(), "-".into()),
        ModelParams::Vpa { gamma, beta } => ("-".into(), "-".into(), format!("{gamma:.16e}"), format!("{beta:.16e}")),
    };
    let rng = g.rng();
    let opts = g.options();
    let mut body = format!(
        "{SNAPSHOT_VERSION} variant={} m={m} delta={delta} gamma={gamma} beta={beta} seed={} t={} edges={} sampler={} vpa={} rng={}:{}:{}\n",
        g.params().variant_name(),
        g.seed(),
        g.t(),
        g.edge_count(),
        kebab(&opts.sampler),
        kebab(&opts.vpa_mode),
        hex(&rng.get_seed()),
        rng.get_stream(),
        rng.get_word_pos(),
    );
    for e in g.edges() {
        let _ = writeln!(body, "{} {} {:.16e}", e.low, e.high, e.weight);
    }
    let sum = Sha256::digest(body.as_bytes());
    body.push_str(&format!("#checksum={sum:x}\n"));
    body
}

pub fn write_snapshot(g: &GrowingGraph, path: &Path) -> Result<()> {
    std::fs::write(path, snapshot_string(g))?;
    Ok(())
}

pub fn read_snapshot(path: &Path) -> Result<GrowingGraph> {
    parse_snapshot(&std::fs::read_to_string(path)?)
}

pub fn parse_snapshot(text: &str) -> Result<GrowingGraph> {
    let bad = |s: &str| Error::Snapshot(s.to_string());
    let trailer_at = text.rfind("#checksum=").ok_or_else(|| bad("missing checksum trailer (truncated?)"))?;
    let (body, trailer) = text.split_at(trailer_at);
    let expected = trailer.trim_end().trim_start_matches("#checksum=").to_string();
    let found = format!("{:x}", Sha256::digest(body.as_bytes()));
    if expected != found {
        return Err(Error::Checksum { expected, found });
    }
    let mut lines = body.lines();
    let header = lines.next().ok_or_else(|| bad("empty snapshot"))?;
    let mut fields = header.split_whitespace();
    let version = fields.next().unwrap_or("");
    if version != SNAPSHOT_VERSION {
        return Err(bad(&format!("version `{version}`, expected `{SNAPSHOT_VERSION}`")));
    }
    let kv: std::collections::HashMap<&str, &str> = fields.filter_map(|f| f.split_once('=')).collect();
    let get = |k: &str| kv.get(k).copied().ok_or_else(|| bad(&format!("header lacks `{k}`")));
    let num = |k: &str| -> Result<f64> { get(k)?.parse().map_err(|_| bad(&format!("bad `{k}`"))) };
    let int = |k: &str| -> Result<u64> { get(k)?.parse().map_err(|_| bad(&format!("bad `{k}`"))) };
    let params = match get("variant")? {
        "fpa" => ModelParams::fpa(int("m")? as u32, num("delta")?)?,
        "vpa" => ModelParams::vpa(num("gamma")?, num("beta")?)?,
        v => return Err(bad(&format!("unknown variant `{v}`"))),
    };
    let opts = GrowOptions {
        sampler: serde_json::from_value::<SamplerKind>(get("sampler")?.into()).map_err(|_| bad("bad `sampler`"))?,
        vpa_mode: serde_json::from_value::<VpaMode>(get("vpa")?.into()).map_err(|_| bad("bad `vpa`"))?,
    };
    let mut rng_parts = get("rng")?.split(':');
    let seed_bytes = rng_parts.next().and_then(unhex).ok_or_else(|| bad("bad rng seed"))?;
    let stream: u64 = rng_parts.next().and_then(|s| s.parse().ok()).ok_or_else(|| bad("bad rng stream"))?;
    let word_pos: u128 = rng_parts.next().and_then(|s| s.parse().ok()).ok_or_else(|| bad("bad rng position"))?;
    let mut rng = SimRng::from_seed(seed_bytes);
    rng.set_stream(stream);
    rng.set_word_pos(word_pos);
    let n_edges = int("edges")? as usize;
    let mut edges = Vec::with_capacity(n_edges);
    for (i, line) in lines.enumerate() {
        let mut it = line.split_whitespace();
        let mut next = || it.next().ok_or_else(|| bad(&format!("edge line {i} is short")));
        let low = next()?.parse().map_err(|_| bad(&format!("edge line {i}: low")))?;
        let high = next()?.parse().map_err(|_| bad(&format!("edge line {i}: high")))?;
        let weight = next()?.parse().map_err(|_| bad(&format!("edge line {i}: weight")))?;
        edges.push(Edge { low, high, weight });
    }
    if edges.len() != n_edges {
        return Err(bad(&format!("{} edges, header says {n_edges}", edges.len())));
    }
    GrowingGraph::from_parts(params, opts, int("seed")?, int("t")? as u32, edges, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::edge_weights::WeightDistribution;

    #[test]
    fn round_trip_and_continue() {
        let dist = WeightDistribution::exponential(1.0).unwrap();
        let mut g = GrowingGraph::new(ModelParams::fpa(2, -1.0).unwrap(), 5, GrowOptions::default());
        g.grow_to(300, &dist).unwrap();
        let mut h = parse_snapshot(&snapshot_string(&g)).unwrap();
        assert_eq!(g.edges(), h.edges());
        g.grow_to(600, &dist).unwrap();
        h.grow_to(600, &dist).unwrap();
        assert_eq!(g.edges(), h.edges());
    }

    #[test]
    fn empty_graph_is_header_only() {
        let g = GrowingGraph::new(ModelParams::vpa(0.5, 1.0).unwrap(), 1, GrowOptions::default());
        let s = snapshot_string(&g);
        assert_eq!(s.lines().count(), 2);
        assert_eq!(parse_snapshot(&s).unwrap().t(), 1);
    }

    #[test]
    fn corruption_is_detected() {
        let mut g = GrowingGraph::new(ModelParams::fpa(1, 0.0).unwrap(), 3, GrowOptions::default());
        g.grow_to(50, &WeightDistribution::deterministic(1.0).unwrap()).unwrap();
        let s = snapshot_string(&g);
        let mut lines: Vec<&str> = s.lines().collect();
        let n = lines.len();
        lines[n - 2] = "1 50 2.0000000000000000e0";
        let cut = lines.join("\n") + "\n";
        assert!(matches!(parse_snapshot(&cut), Err(Error::Checksum { .. })));
        let truncated = &s[..s.len() / 2];
        assert!(parse_snapshot(truncated).is_err());
    }
}
