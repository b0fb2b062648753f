//! Unified distance matrix of a trained map.
//!
//! Each node's value is the mean weight-space distance to its 4-connected
//! lattice neighbours. High values mark boundaries between clusters.

use std::fmt::Write as _;
use std::str::FromStr;

use crate::error::{Result, SomError};
use crate::grid::{index_of, neighbors_of, GridShape};
use crate::scalar::{euclidean, Scalar};
use crate::som::SomMap;

#[derive(Debug, Clone, PartialEq)]
pub struct UMatrix<T> {
    shape: GridShape,
    values: Vec<T>,
}

impl<T: Scalar> UMatrix<T> {
    pub fn shape(&self) -> GridShape {
        self.shape
    }

    /// Row-major node values.
    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn get(&self, row: usize, col: usize) -> Option<T> {
        (row < self.shape.rows() && col < self.shape.cols())
            .then(|| self.values[row * self.shape.cols() + col])
    }

    pub fn max(&self) -> T {
        self.values.iter().copied().fold(T::neg_infinity(), T::max)
    }

    pub fn min(&self) -> T {
        self.values.iter().copied().fold(T::infinity(), T::min)
    }

    /// Median; for an even count, the mean of the two middle values.
    pub fn median(&self) -> T {
        let mut v = self.values.clone();
        v.sort_by(|a, b| a.partial_cmp(b).expect("U-Matrix values are finite"));
        let n = v.len();
        if n % 2 == 1 {
            v[n / 2]
        } else {
            (v[n / 2 - 1] + v[n / 2]) / T::from_f64_lossy(2.0)
        }
    }

    pub fn export(&self, format: UMatrixFormat) -> Vec<u8> {
        match format {
            UMatrixFormat::GridCsv => self.to_grid_csv().into_bytes(),
            UMatrixFormat::GrayscaleImage => self.to_pgm().into_bytes(),
        }
    }

    /// One grid row per line, values at full precision.
    pub fn to_grid_csv(&self) -> String {
        let mut out = String::new();
        for row in self.values.chunks_exact(self.shape.cols()) {
            let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }

    /// Pixel intensities: linear min-max scaling to 0..=255, rounded half
    /// away from zero. A constant matrix maps to all zeros.
    pub fn grayscale_pixels(&self) -> Vec<u8> {
        let (lo, hi) = (self.min(), self.max());
        let range = hi - lo;
        let full = T::from_f64_lossy(255.0);
        self.values
            .iter()
            .map(|&v| {
                if range > T::zero() {
                    let p = ((v - lo) * full / range).round();
                    p.to_u8().unwrap_or(255)
                } else {
                    0
                }
            })
            .collect()
    }

    /// Plain (P2) portable graymap.
    pub fn to_pgm(&self) -> String {
        let pixels = self.grayscale_pixels();
        let mut out = String::new();
        let _ = writeln!(out, "P2\n{} {}\n255", self.shape.cols(), self.shape.rows());
        for row in pixels.chunks_exact(self.shape.cols()) {
            let line: Vec<String> = row.iter().map(|p| p.to_string()).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }
}

pub fn compute_umatrix<T: Scalar>(map: &SomMap<T>) -> UMatrix<T> {
    let shape = map.shape();
    let values = shape
        .positions()
        .enumerate()
        .map(|(i, p)| {
            let neighbours = neighbors_of(p, shape);
            if neighbours.is_empty() {
                return T::zero();
            }
            let sum = neighbours.iter().fold(T::zero(), |acc, q| {
                let j = index_of(*q, shape).expect("neighbour lies inside the grid");
                acc + euclidean(map.weight(i), map.weight(j))
            });
            sum / T::from_usize_lossy(neighbours.len())
        })
        .collect();
    UMatrix { shape, values }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UMatrixFormat {
    GridCsv,
    GrayscaleImage,
}

impl UMatrixFormat {
    pub fn tag(&self) -> &'static str {
        match self {
            UMatrixFormat::GridCsv => "grid-csv",
            UMatrixFormat::GrayscaleImage => "grayscale-image",
        }
    }
}

impl FromStr for UMatrixFormat {
    type Err = SomError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "grid-csv" => Ok(UMatrixFormat::GridCsv),
            "grayscale-image" => Ok(UMatrixFormat::GrayscaleImage),
            other => Err(SomError::Usage(format!(
                "unsupported U-Matrix format '{other}' (expected grid-csv or grayscale-image)"
            ))),
        }
    }
}
