use std::path::Path;

use crate::error::{Error, Result};

/// Piecewise-linear inverse CDF through points (y_i, x_i), with the
/// first value held on (0, y_0].
#[derive(Clone, Debug, PartialEq)]
pub struct InverseTable {
    ys: Vec<f64>,
    xs: Vec<f64>,
    source: String,
}

impl InverseTable {
    pub fn new(points: Vec<(f64, f64)>, source: impl Into<String>) -> Result<Self> {
        let source = source.into();
        let bad = |reason: String| Error::DistSpec { spec: format!("table:{source}"), reason };
        if points.is_empty() {
            return Err(bad("table is empty".into()));
        }
        let mut prev = (0.0, 0.0);
        for (i, &(y, x)) in points.iter().enumerate() {
            if !(y > 0.0 && y <= 1.0) || !x.is_finite() || x < 0.0 {
                return Err(bad(format!("row {i}: need 0 < y <= 1 and finite x >= 0")));
            }
            if i > 0 && (y <= prev.0 || x < prev.1) {
                return Err(bad(format!("row {i}: y must increase and x must not decrease")));
            }
            prev = (y, x);
        }
        if prev.0 != 1.0 {
            return Err(bad("last row must have y = 1".into()));
        }
        let (ys, xs) = points.into_iter().unzip();
        Ok(Self { ys, xs, source })
    }

    /// Reads whitespace-separated `y x` rows; `#` starts a comment.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut points = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut it = line.split_whitespace().map(str::parse::<f64>);
            match (it.next(), it.next(), it.next()) {
                (Some(Ok(y)), Some(Ok(x)), None) => points.push((y, x)),
                _ => {
                    return Err(Error::DistSpec {
                        spec: format!("table:{}", path.display()),
                        reason: format!("line {}: expected `y x`", n + 1),
                    })
                }
            }
        }
        Self::new(points, path.display().to_string())
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn inverse(&self, y: f64) -> f64 {
        let i = self.ys.partition_point(|&v| v < y);
        if i == 0 {
            return self.xs[0];
        }
        let i = i.min(self.ys.len() - 1);
        let (y0, y1) = (self.ys[i - 1], self.ys[i]);
        let (x0, x1) = (self.xs[i - 1], self.xs[i]);
        x0 + (x1 - x0) * (y - y0) / (y1 - y0)
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x < self.xs[0] {
            return 0.0;
        }
        let mut lo = (0.0, self.xs[0]);
        for (&y, &xv) in self.ys.iter().zip(&self.xs) {
            if x < xv {
                return lo.0 + (y - lo.0) * (x - lo.1) / (xv - lo.1);
            }
            lo = (y, xv);
        }
        1.0
    }
}
