//! Stream parsing, seeded instance generators and memory accounting.

use std::fmt::{self, Write as _};
use std::io::BufRead;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bp_estimate::rank_reduction_stream;
use crate::error::{Error, Result};
use crate::vector::VectorItem;
use crate::vsched::tight_example;

/// Stored item-dependent entries of a summary, measured in words.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MemoryReport {
    pub stored_entries: u64,
    pub peak_entries: u64,
    pub stream_length: u64,
}

impl MemoryReport {
    pub fn new(stored_entries: u64, peak_entries: u64, stream_length: u64) -> Self {
        Self { stored_entries, peak_entries: peak_entries.max(stored_entries), stream_length }
    }
}

fn parse_number(token: &str, line: usize) -> Result<f64> {
    let value: f64 = token
        .parse()
        .map_err(|_| Error::Parse { line, message: format!("'{token}' is not a number") })?;
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::Parse { line, message: format!("'{token}' is not finite") })
    }
}

fn read_error(line: usize, err: std::io::Error) -> Error {
    Error::Parse { line, message: err.to_string() }
}

fn parse_lines<R: BufRead>(source: R, check: impl Fn(f64) -> Option<String>) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for (i, line) in source.lines().enumerate() {
        let line = line.map_err(|e| read_error(i + 1, e))?;
        let token = line.trim();
        if token.is_empty() {
            continue;
        }
        let value = parse_number(token, i + 1)?;
        if let Some(message) = check(value) {
            return Err(Error::Parse { line: i + 1, message });
        }
        out.push(value);
    }
    Ok(out)
}

/// One number per line; blank lines are skipped.
pub fn parse_scalar_stream<R: BufRead>(source: R) -> Result<Vec<f64>> {
    parse_lines(source, |_| None)
}

/// As [`parse_scalar_stream`], additionally requiring every size in `(0, 1]`.
pub fn parse_bp_stream<R: BufRead>(source: R) -> Result<Vec<f64>> {
    parse_lines(source, |v| (!(v > 0.0 && v <= 1.0)).then(|| format!("size {v} is outside (0, 1]")))
}

/// As [`parse_scalar_stream`], additionally requiring every value to be positive.
pub fn parse_positive_stream<R: BufRead>(source: R) -> Result<Vec<f64>> {
    parse_lines(source, |v| (v <= 0.0).then(|| format!("job size {v} is not positive")))
}

/// One job per line, `d` whitespace-separated coordinates in `[0, 1]`. With
/// `d = None` the dimension is taken from the first non-blank line.
pub fn parse_vector_stream<R: BufRead>(source: R, d: Option<usize>) -> Result<Vec<VectorItem>> {
    let mut out = Vec::new();
    let mut dim = d;
    for (i, line) in source.lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(|e| read_error(line_no, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let coords = line
            .split_whitespace()
            .map(|t| parse_number(t, line_no))
            .collect::<Result<Vec<_>>>()?;
        let expected = *dim.get_or_insert(coords.len());
        if coords.len() != expected {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected {expected} coordinates, got {}", coords.len()),
            });
        }
        let item = VectorItem::new(coords)
            .map_err(|e| Error::Parse { line: line_no, message: e.to_string() })?;
        out.push(item);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Ordering {
    Ascending,
    Descending,
    Sawtooth,
}

/// Generator families.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GeneratorKind {
    /// `n` sizes uniform in `(lo, hi]`.
    Uniform { n: usize, lo: f64, hi: f64 },
    /// `n` sizes around `clusters` random centers, each jittered by `spread`.
    Clustered { n: usize, clusters: usize, spread: f64 },
    /// Uniform `(lo, hi]` sizes emitted in an adversarial order.
    SortedAdversarial { n: usize, lo: f64, hi: f64, order: Ordering },
    /// `n` jobs in dimension `d` with coordinates uniform in `[0, hi]`.
    VectorUniform { n: usize, d: usize, hi: f64 },
    TightVsched { machines: usize, gamma: f64 },
    RankReduction { values: Vec<f64>, q: f64 },
}

/// A generated stream.
#[derive(Debug, Clone, PartialEq)]
pub enum Generated {
    Scalar(Vec<f64>),
    Vector(Vec<VectorItem>),
}

impl Generated {
    pub fn len(&self) -> usize {
        match self {
            Generated::Scalar(v) => v.len(),
            Generated::Vector(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl fmt::Display for Generated {
    /// One item per line, every number in shortest round-trip form.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut buf = String::new();
        match self {
            Generated::Scalar(values) => {
                for v in values {
                    writeln!(buf, "{v}")?;
                }
            }
            Generated::Vector(items) => {
                for item in items {
                    let mut first = true;
                    for c in item.coords() {
                        if !first {
                            buf.push(' ');
                        }
                        write!(buf, "{c}")?;
                        first = false;
                    }
                    buf.push('\n');
                }
            }
        }
        f.write_str(&buf)
    }
}

fn check_range(lo: f64, hi: f64) -> Result<()> {
    if lo.is_finite() && hi.is_finite() && 0.0 <= lo && lo < hi && hi <= 1.0 {
        Ok(())
    } else {
        Err(Error::Config(format!("need 0 ≤ lo < hi ≤ 1, got lo={lo}, hi={hi}")))
    }
}

/// Uniform in `(lo, hi]`.
fn uniform_open_closed(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    let u: f64 = rng.gen();
    hi - (hi - lo) * u
}

pub fn generate(kind: &GeneratorKind, seed: u64) -> Result<Generated> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match kind {
        GeneratorKind::Uniform { n, lo, hi } => {
            check_range(*lo, *hi)?;
            Ok(Generated::Scalar((0..*n).map(|_| uniform_open_closed(&mut rng, *lo, *hi)).collect()))
        }
        GeneratorKind::Clustered { n, clusters, spread } => {
            if *clusters == 0 || !(spread.is_finite() && *spread >= 0.0 && *spread < 1.0) {
                return Err(Error::Config("clustered needs clusters ≥ 1 and spread in [0, 1)".into()));
            }
            let centers: Vec<f64> = (0..*clusters).map(|_| uniform_open_closed(&mut rng, 0.0, 1.0)).collect();
            let values = (0..*n)
                .map(|_| {
                    let c = centers[rng.gen_range(0..centers.len())];
                    let x = c + spread * (2.0 * rng.gen::<f64>() - 1.0);
                    x.clamp(f64::MIN_POSITIVE, 1.0)
                })
                .collect();
            Ok(Generated::Scalar(values))
        }
        GeneratorKind::SortedAdversarial { n, lo, hi, order } => {
            check_range(*lo, *hi)?;
            let mut values: Vec<f64> = (0..*n).map(|_| uniform_open_closed(&mut rng, *lo, *hi)).collect();
            values.sort_by(f64::total_cmp);
            match order {
                Ordering::Ascending => {}
                Ordering::Descending => values.reverse(),
                Ordering::Sawtooth => values = sawtooth(&values),
            }
            Ok(Generated::Scalar(values))
        }
        GeneratorKind::VectorUniform { n, d, hi } => {
            if *d == 0 || !(hi.is_finite() && *hi > 0.0 && *hi <= 1.0) {
                return Err(Error::Config("vector-uniform needs d ≥ 1 and hi in (0, 1]".into()));
            }
            let items = (0..*n)
                .map(|_| VectorItem::from_raw((0..*d).map(|_| rng.gen::<f64>() * hi).collect()))
                .collect();
            Ok(Generated::Vector(items))
        }
        GeneratorKind::TightVsched { machines, gamma } => {
            Ok(Generated::Vector(tight_example(*machines, *gamma)?))
        }
        GeneratorKind::RankReduction { values, q } => {
            Ok(Generated::Scalar(rank_reduction_stream(values, *q).map_err(|e| Error::Config(e.to_string()))?))
        }
    }
}

/// Sorted values cut into runs of ten, each run emitted in descending order:
/// the stream falls within a run and jumps up between runs.
fn sawtooth(sorted: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(sorted.len());
    for chunk in sorted.chunks(10) {
        out.extend(chunk.iter().rev());
    }
    out
}
