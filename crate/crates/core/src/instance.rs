//! Cost-matrix data model, OR-Library parsing, and seeded generators.
//!
//! Instances are complete bipartite: `n` servers (rows) against `n`
//! requests (columns), with one nonnegative integer weight per pair.
//! Weights stay exact integers end to end; the perturbation module rounds
//! its magnitude to an integer, so nothing in the pipeline ever needs
//! floating-point weights.

use crate::error::{Error, Result};
use crate::rng::StableRng;
use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use std::fmt::Write as _;

/// Exact edge weight.
pub type Weight = i64;

/// Square nonnegative cost matrix. `at(u, v)` is the weight of serving
/// request `v` (column) with server `u` (row).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostMatrix {
    n: usize,
    weights: Vec<Weight>,
}

/// Min, max and sum of all entries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MatrixStats {
    pub min: Weight,
    pub max: Weight,
    pub sum: Weight,
}

impl CostMatrix {
    /// Build from row-major weights. Rejects `n = 0`, wrong length and
    /// negative entries.
    pub fn new(n: usize, weights: Vec<Weight>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("n must be at least 1".into()));
        }
        if weights.len() != n * n {
            return Err(Error::MalformedInstance {
                expected: n * n,
                found: weights.len(),
            });
        }
        if let Some(position) = weights.iter().position(|&w| w < 0) {
            return Err(Error::NegativeWeight {
                value: weights[position],
                position,
            });
        }
        Ok(Self { n, weights })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn at(&self, server: usize, request: usize) -> Weight {
        self.weights[server * self.n + request]
    }

    /// Row-major view of all entries.
    pub fn entries(&self) -> &[Weight] {
        &self.weights
    }

    pub fn min(&self) -> Weight {
        *self.weights.iter().min().expect("matrix is non-empty")
    }

    pub fn max(&self) -> Weight {
        *self.weights.iter().max().expect("matrix is non-empty")
    }

    /// Exact min, max, and sum in one pass.
    pub fn stats(&self) -> MatrixStats {
        let mut min = Weight::MAX;
        let mut max = Weight::MIN;
        let mut sum = 0;
        for &w in &self.weights {
            min = min.min(w);
            max = max.max(w);
            sum += w;
        }
        MatrixStats { min, max, sum }
    }

    /// OR-Library text form: `n` on the first line, then one row of
    /// space-separated weights per line. Inverse of [`parse_orlib`].
    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{}", self.n);
        for row in self.weights.chunks(self.n) {
            let mut first = true;
            for w in row {
                if !first {
                    out.push(' ');
                }
                let _ = write!(out, "{w}");
                first = false;
            }
            out.push('\n');
        }
        out
    }
}

/// Where an instance came from, for provenance records.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "kebab-case")]
pub enum InstanceMeta {
    /// Parsed from an OR-Library file.
    OrlibFile { label: String },
    /// Generated in-process from a seed.
    Synthetic { label: String, seed: u64 },
}

impl InstanceMeta {
    pub fn label(&self) -> &str {
        match self {
            InstanceMeta::OrlibFile { label } | InstanceMeta::Synthetic { label, .. } => label,
        }
    }
}

/// Parse an OR-Library assignment instance: one integer `n`, then exactly
/// `n²` row-major cost entries, split by any whitespace (the published
/// files wrap rows at arbitrary points).
pub fn parse_orlib(text: &str) -> Result<CostMatrix> {
    let tokens: Vec<&str> = text.split_whitespace().collect();
    let head = *tokens
        .first()
        .ok_or_else(|| Error::InvalidArgument("empty instance text".into()))?;
    let n: usize = head.parse().map_err(|_| Error::ParseToken {
        position: 1,
        token: head.to_string(),
    })?;
    if n == 0 {
        return Err(Error::InvalidArgument("instance size must be at least 1".into()));
    }

    let expected = n * n;
    if tokens.len() - 1 != expected {
        return Err(Error::MalformedInstance {
            expected,
            found: tokens.len() - 1,
        });
    }
    let mut weights = Vec::with_capacity(expected);
    for (index, token) in tokens[1..].iter().enumerate() {
        let value: Weight = token.parse().map_err(|_| Error::ParseToken {
            // 1-based, counting the leading n token.
            position: index + 2,
            token: token.to_string(),
        })?;
        if value < 0 {
            return Err(Error::NegativeWeight {
                value,
                position: index,
            });
        }
        weights.push(value);
    }
    CostMatrix::new(n, weights)
}

/// Generate an `n × n` matrix with entries drawn independently and
/// uniformly from `{lo, …, hi}`. Pure in its arguments: the same
/// `(n, lo, hi, seed)` yields the identical matrix on any platform.
pub fn generate_uniform(n: usize, lo: Weight, hi: Weight, seed: u64) -> Result<CostMatrix> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    if lo > hi {
        return Err(Error::InvalidArgument(format!(
            "empty weight range: lo {lo} > hi {hi}"
        )));
    }
    if lo < 0 {
        return Err(Error::InvalidArgument(format!("negative lo {lo}")));
    }
    let mut rng = StableRng::from_seed(seed);
    let weights = (0..n * n).map(|_| rng.range_i64(lo, hi)).collect();
    CostMatrix::new(n, weights)
}

/// Generate a metric instance from points on a line: `2n` distinct integer
/// coordinates in `[0, span)`, first `n` as servers, last `n` as requests,
/// weight = distance. Distinctness keeps every weight, and hence the
/// optimum, strictly positive.
pub fn generate_line_metric(n: usize, span: u64, seed: u64) -> Result<CostMatrix> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    if span < 2 * n as u64 {
        return Err(Error::InvalidArgument(format!(
            "span {span} too small for {} distinct points",
            2 * n
        )));
    }
    let mut rng = StableRng::from_seed(seed);
    let mut points = Vec::with_capacity(2 * n);
    let mut taken = HashSet::new();
    while points.len() < 2 * n {
        let p = rng.below(span);
        if taken.insert(p) {
            points.push(p as i64);
        }
    }
    let (servers, requests) = points.split_at(n);
    let mut weights = Vec::with_capacity(n * n);
    for &s in servers {
        for &r in requests {
            weights.push((s - r).abs());
        }
    }
    CostMatrix::new(n, weights)
}
