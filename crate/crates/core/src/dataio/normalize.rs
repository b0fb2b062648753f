use std::fmt;
use std::io::{BufRead, BufReader, Read, Write};
use std::str::FromStr;

use super::Dataset;
use crate::error::{Result, SomError};
use crate::scalar::Scalar;
use crate::som::FeatureVector;

pub const NORMALIZER_FORMAT_VERSION: u32 = 1;
const NORMALIZER_MAGIC: &str = "som-normalizer";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormMethod {
    MinMax,
    ZScore,
    None,
}

impl NormMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            NormMethod::MinMax => "minmax",
            NormMethod::ZScore => "zscore",
            NormMethod::None => "none",
        }
    }
}

impl fmt::Display for NormMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for NormMethod {
    type Err = SomError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "minmax" => Ok(NormMethod::MinMax),
            "zscore" => Ok(NormMethod::ZScore),
            "none" => Ok(NormMethod::None),
            other => Err(SomError::Usage(format!(
                "unknown normalisation '{other}' (expected minmax, zscore or none)"
            ))),
        }
    }
}

/// Per-dimension scaling fitted on training data.
///
/// `stats[d]` is `(min, max)` for min-max scaling and `(mean, stddev)` for
/// z-scores; it is unused for `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizationModel<T> {
    method: NormMethod,
    stats: Vec<(T, T)>,
}

pub fn fit_normalizer<T: Scalar>(data: &Dataset<T>, method: NormMethod) -> Result<NormalizationModel<T>> {
    let dim = data
        .dim()
        .ok_or_else(|| SomError::Empty("cannot fit a normaliser on an empty dataset".into()))?;
    let vectors = data.vectors();
    let n = T::from_usize_lossy(vectors.len());
    let column = |d: usize| vectors.iter().map(move |v| v.as_slice()[d]);

    let stats = (0..dim)
        .map(|d| match method {
            NormMethod::MinMax => column(d).fold((T::infinity(), T::neg_infinity()), |(lo, hi), v| {
                (lo.min(v), hi.max(v))
            }),
            NormMethod::ZScore => {
                let mean = column(d).fold(T::zero(), |a, v| a + v) / n;
                let var = column(d).fold(T::zero(), |a, v| a + (v - mean) * (v - mean)) / n;
                (mean, var.sqrt())
            }
            NormMethod::None => (T::zero(), T::one()),
        })
        .collect();
    Ok(NormalizationModel { method, stats })
}

impl<T: Scalar> NormalizationModel<T> {
    pub fn method(&self) -> NormMethod {
        self.method
    }

    pub fn dim(&self) -> usize {
        self.stats.len()
    }

    pub fn stats(&self) -> &[(T, T)] {
        &self.stats
    }

    /// Whether dimension `d` was constant in the fitted data. Such columns
    /// always scale to 0.
    pub fn is_degenerate(&self, d: usize) -> bool {
        let (a, b) = self.stats[d];
        match self.method {
            NormMethod::MinMax => !(b > a),
            NormMethod::ZScore => !(b > T::zero()),
            NormMethod::None => false,
        }
    }

    pub fn degenerate_columns(&self) -> Vec<usize> {
        (0..self.dim()).filter(|&d| self.is_degenerate(d)).collect()
    }

    /// Scales one vector. Min-max output is clamped to `[0, 1]`.
    pub fn apply_vector(&self, x: &FeatureVector<T>) -> Result<FeatureVector<T>> {
        if x.dim() != self.dim() {
            return Err(SomError::DimensionMismatch {
                expected: self.dim(),
                actual: x.dim(),
            });
        }
        if self.method == NormMethod::None {
            return Ok(x.clone());
        }
        let out = x
            .as_slice()
            .iter()
            .enumerate()
            .map(|(d, &v)| {
                let (a, b) = self.stats[d];
                if self.is_degenerate(d) {
                    return T::zero();
                }
                match self.method {
                    NormMethod::MinMax => ((v - a) / (b - a)).max(T::zero()).min(T::one()),
                    NormMethod::ZScore => (v - a) / b,
                    NormMethod::None => v,
                }
            })
            .collect();
        FeatureVector::new(out)
    }

    pub fn apply(&self, data: &Dataset<T>) -> Result<Dataset<T>> {
        let vectors = data
            .vectors()
            .iter()
            .map(|x| self.apply_vector(x))
            .collect::<Result<Vec<_>>>()?;
        Ok(data.with_vectors(vectors))
    }

    /// Text form: a versioned header followed by one `a b` line per dimension.
    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{NORMALIZER_MAGIC} {NORMALIZER_FORMAT_VERSION}")?;
        writeln!(w, "scalar {}", T::TAG)?;
        writeln!(w, "method {}", self.method)?;
        writeln!(w, "dim {}", self.dim())?;
        for (a, b) in &self.stats {
            writeln!(w, "{a} {b}")?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_from<R: Read>(r: R) -> Result<Self> {
        let bad = |msg: &str| SomError::Format(format!("normaliser file: {msg}"));
        let mut lines = BufReader::new(r).lines();
        let mut next = |what: &str| -> Result<String> {
            match lines.next() {
                Some(l) => Ok(l?.trim_end().to_owned()),
                None => Err(bad(&format!("unexpected end of file, expected {what}"))),
            }
        };
        let field = |line: String, key: &str| -> Result<String> {
            line.strip_prefix(key)
                .and_then(|rest| rest.strip_prefix(' '))
                .map(str::to_owned)
                .ok_or_else(|| bad(&format!("expected '{key}' line, found '{line}'")))
        };

        let version = field(next("header")?, NORMALIZER_MAGIC)?;
        if version != NORMALIZER_FORMAT_VERSION.to_string() {
            return Err(bad(&format!("unsupported format version {version}")));
        }
        let tag = field(next("scalar")?, "scalar")?;
        if tag != T::TAG {
            return Err(bad(&format!("holds {tag} values, expected {}", T::TAG)));
        }
        let method: NormMethod = field(next("method")?, "method")?.parse()?;
        let dim: usize = field(next("dim")?, "dim")?
            .parse()
            .map_err(|_| bad("dimension is not an integer"))?;
        let mut stats = Vec::with_capacity(dim.min(1 << 16));
        for d in 0..dim {
            let line = next("statistics")?;
            let mut parts = line.split(' ');
            let mut value = || -> Result<T> {
                parts
                    .next()
                    .and_then(|p| p.parse::<T>().ok())
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| bad(&format!("malformed statistics for dimension {d}")))
            };
            let pair = (value()?, value()?);
            stats.push(pair);
        }
        if dim == 0 {
            return Err(bad("dimension must be at least 1"));
        }
        Ok(Self { method, stats })
    }
}
