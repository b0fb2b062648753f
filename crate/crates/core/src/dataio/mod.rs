//! CSV ingestion, feature normalisation and train/calibrate/test splits.
//!
//! The accepted dialect is comma-separated, `.` decimal point, UTF-8, with
//! LF or CRLF line endings, an optional single header line and an optional
//! label column holding `normal` or `anomalous`. Categorical features must
//! be encoded numerically beforehand.

mod normalize;
mod split;

pub use normalize::{
    fit_normalizer, NormMethod, NormalizationModel, NORMALIZER_FORMAT_VERSION,
};
pub use split::split;

use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use crate::error::{Result, SomError};
use crate::scalar::Scalar;
use crate::som::FeatureVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Label {
    Normal,
    Anomalous,
}

impl Label {
    pub fn as_str(&self) -> &'static str {
        match self {
            Label::Normal => "normal",
            Label::Anomalous => "anomalous",
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Label {
    type Err = SomError;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("normal") {
            Ok(Label::Normal)
        } else if s.eq_ignore_ascii_case("anomalous") {
            Ok(Label::Anomalous)
        } else {
            Err(SomError::domain(format!(
                "label '{s}' is neither 'normal' nor 'anomalous'"
            )))
        }
    }
}

/// Feature vectors with optional column names and per-row labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset<T> {
    vectors: Vec<FeatureVector<T>>,
    column_names: Option<Vec<String>>,
    labels: Option<Vec<Label>>,
    label_column: Option<String>,
}

impl<T: Scalar> Dataset<T> {
    pub fn new(vectors: Vec<FeatureVector<T>>) -> Result<Self> {
        if let Some(first) = vectors.first() {
            let dim = first.dim();
            if let Some(bad) = vectors.iter().find(|v| v.dim() != dim) {
                return Err(SomError::DimensionMismatch {
                    expected: dim,
                    actual: bad.dim(),
                });
            }
        }
        Ok(Self {
            vectors,
            column_names: None,
            labels: None,
            label_column: None,
        })
    }

    pub fn with_column_names(mut self, names: Vec<String>) -> Result<Self> {
        if let Some(d) = self.dim() {
            if names.len() != d {
                return Err(SomError::DimensionMismatch {
                    expected: d,
                    actual: names.len(),
                });
            }
        }
        self.column_names = Some(names);
        Ok(self)
    }

    /// Attaches labels, stored under `column` when written back out.
    pub fn with_labels(mut self, labels: Vec<Label>, column: impl Into<String>) -> Result<Self> {
        if labels.len() != self.vectors.len() {
            return Err(SomError::domain(format!(
                "{} labels for {} vectors",
                labels.len(),
                self.vectors.len()
            )));
        }
        self.labels = Some(labels);
        self.label_column = Some(column.into());
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Common vector dimension; `None` when empty.
    pub fn dim(&self) -> Option<usize> {
        self.vectors.first().map(FeatureVector::dim)
    }

    pub fn vectors(&self) -> &[FeatureVector<T>] {
        &self.vectors
    }

    pub fn into_vectors(self) -> Vec<FeatureVector<T>> {
        self.vectors
    }

    pub fn column_names(&self) -> Option<&[String]> {
        self.column_names.as_deref()
    }

    pub fn labels(&self) -> Option<&[Label]> {
        self.labels.as_deref()
    }

    pub fn label_column(&self) -> Option<&str> {
        self.label_column.as_deref()
    }

    /// Vectors paired with their labels; `None` if unlabelled.
    pub fn labeled(&self) -> Option<Vec<(FeatureVector<T>, Label)>> {
        let labels = self.labels.as_ref()?;
        Some(self.vectors.iter().cloned().zip(labels.iter().copied()).collect())
    }

    /// Same metadata, rows picked by `indices` in the given order.
    pub(crate) fn select(&self, indices: &[usize]) -> Self {
        Self {
            vectors: indices.iter().map(|&i| self.vectors[i].clone()).collect(),
            column_names: self.column_names.clone(),
            labels: self
                .labels
                .as_ref()
                .map(|l| indices.iter().map(|&i| l[i]).collect()),
            label_column: self.label_column.clone(),
        }
    }

    pub(crate) fn with_vectors(&self, vectors: Vec<FeatureVector<T>>) -> Self {
        Self {
            vectors,
            column_names: self.column_names.clone(),
            labels: self.labels.clone(),
            label_column: self.label_column.clone(),
        }
    }

    /// Writes the dataset as CSV. A header is emitted when column names are
    /// known; the label column, if any, comes last. Values use the shortest
    /// representation that parses back to the same bits.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        if let Some(names) = &self.column_names {
            let mut header: Vec<&str> = names.iter().map(String::as_str).collect();
            if let Some(lc) = &self.label_column {
                header.push(lc);
            }
            out.write_record(&header).map_err(csv_io)?;
        }
        for (i, v) in self.vectors.iter().enumerate() {
            let mut record: Vec<String> = v.as_slice().iter().map(|x| x.to_string()).collect();
            if let Some(labels) = &self.labels {
                record.push(labels[i].to_string());
            }
            out.write_record(&record).map_err(csv_io)?;
        }
        out.flush()?;
        Ok(())
    }
}

fn csv_io(e: csv::Error) -> SomError {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => SomError::Io(io),
        other => SomError::Format(format!("csv error: {other:?}")),
    }
}

/// Parses CSV feature data.
///
/// Rows are numbered by their 1-based line in the source, columns by their
/// 1-based field position. A `label_column` requires a header.
pub fn load_csv<T: Scalar, R: Read>(
    source: R,
    has_header: bool,
    label_column: Option<&str>,
) -> Result<Dataset<T>> {
    if label_column.is_some() && !has_header {
        return Err(SomError::Usage(
            "a label column can only be located by name in a file with a header".into(),
        ));
    }
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(source);

    let mut records = reader.records();
    let mut header: Option<Vec<String>> = None;
    let mut expected: Option<usize> = None;
    if has_header {
        match records.next() {
            None => return Err(SomError::Empty("no rows: input has no header line".into())),
            Some(rec) => {
                let rec = rec.map_err(|e| csv_parse(e, 1))?;
                expected = Some(rec.len());
                header = Some(rec.iter().map(str::to_owned).collect());
            }
        }
    }

    let label_idx = match (label_column, &header) {
        (Some(name), Some(h)) => Some(h.iter().position(|c| c == name).ok_or_else(|| {
            SomError::Usage(format!("label column '{name}' not found in header"))
        })?),
        _ => None,
    };

    let mut vectors = Vec::new();
    let mut labels = Vec::new();
    for rec in records {
        let rec = rec.map_err(|e| csv_parse(e, 0))?;
        let row = rec.position().map_or(0, |p| p.line() as usize);
        let width = *expected.get_or_insert(rec.len());
        if rec.len() != width {
            return Err(SomError::RaggedRow {
                row,
                expected: width,
                found: rec.len(),
            });
        }
        let mut values = Vec::with_capacity(width);
        for (col, field) in rec.iter().enumerate() {
            if Some(col) == label_idx {
                let label = field.parse::<Label>().map_err(|_| SomError::Parse {
                    row,
                    column: col + 1,
                    message: format!("invalid label '{field}' (expected normal or anomalous)"),
                })?;
                labels.push(label);
                continue;
            }
            let v = field.parse::<T>().map_err(|_| SomError::Parse {
                row,
                column: col + 1,
                message: format!("'{field}' is not a number"),
            })?;
            if !v.is_finite() {
                return Err(SomError::Parse {
                    row,
                    column: col + 1,
                    message: format!("'{field}' is not a finite number"),
                });
            }
            values.push(v);
        }
        if values.is_empty() {
            return Err(SomError::Parse {
                row,
                column: 1,
                message: "row has no feature columns".into(),
            });
        }
        vectors.push(FeatureVector::new(values)?);
    }

    if vectors.is_empty() {
        return Err(SomError::Empty("no rows: input contains no data rows".into()));
    }

    let mut ds = Dataset::new(vectors)?;
    if let Some(mut names) = header {
        if let Some(i) = label_idx {
            let name = names.remove(i);
            ds = ds.with_column_names(names)?.with_labels(labels, name)?;
        } else {
            ds = ds.with_column_names(names)?;
        }
    }
    Ok(ds)
}

fn csv_parse(e: csv::Error, fallback_row: usize) -> SomError {
    let row = e
        .position()
        .map_or(fallback_row, |p| p.line() as usize);
    match e.into_kind() {
        csv::ErrorKind::Io(io) => SomError::Io(io),
        csv::ErrorKind::Utf8 { err, .. } => SomError::Parse {
            row,
            column: err.field() + 1,
            message: "field is not valid UTF-8".into(),
        },
        other => SomError::Parse {
            row,
            column: 0,
            message: format!("{other:?}"),
        },
    }
}
