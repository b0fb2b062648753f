//! Rectangular lattice geometry.
//!
//! Nodes are indexed row-major: node `i` sits at `(i / cols, i % cols)`.
//! Lattice distances feed the neighbourhood kernel, and the 4-connected
//! neighbour sets feed the U-Matrix.

use crate::error::{Result, SomError};
use crate::scalar::Scalar;

/// Lattice dimensions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GridShape {
    rows: usize,
    cols: usize,
}

impl GridShape {
    pub fn new(rows: usize, cols: usize) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(SomError::domain(format!(
                "grid shape must be at least 1x1, got {rows}x{cols}"
            )));
        }
        rows.checked_mul(cols)
            .ok_or_else(|| SomError::domain("grid node count overflows"))?;
        Ok(Self { rows, cols })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Number of map units, `rows * cols`.
    pub fn node_count(&self) -> usize {
        self.rows * self.cols
    }

    pub fn contains(&self, p: GridPosition) -> bool {
        p.row < self.rows && p.col < self.cols
    }

    pub fn positions(&self) -> impl Iterator<Item = GridPosition> + '_ {
        (0..self.node_count()).map(move |i| GridPosition::new(i / self.cols, i % self.cols))
    }
}

impl std::fmt::Display for GridShape {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}x{}", self.rows, self.cols)
    }
}

/// Lattice coordinate of a node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GridPosition {
    pub row: usize,
    pub col: usize,
}

impl GridPosition {
    pub const fn new(row: usize, col: usize) -> Self {
        Self { row, col }
    }

    /// Squared lattice distance. Exact in integer arithmetic.
    pub fn squared_distance(&self, other: &GridPosition) -> usize {
        let dr = self.row.abs_diff(other.row);
        let dc = self.col.abs_diff(other.col);
        dr * dr + dc * dc
    }
}

impl From<(usize, usize)> for GridPosition {
    fn from((row, col): (usize, usize)) -> Self {
        Self { row, col }
    }
}

/// Maps a flat node index to its lattice coordinate.
pub fn position_of(index: usize, shape: GridShape) -> Result<GridPosition> {
    if index >= shape.node_count() {
        return Err(SomError::domain(format!(
            "node index {index} out of range for {shape} grid"
        )));
    }
    Ok(GridPosition::new(index / shape.cols, index % shape.cols))
}

/// Inverse of [`position_of`].
pub fn index_of(p: GridPosition, shape: GridShape) -> Result<usize> {
    if !shape.contains(p) {
        return Err(SomError::domain(format!(
            "position ({}, {}) outside {shape} grid",
            p.row, p.col
        )));
    }
    Ok(p.row * shape.cols + p.col)
}

/// Euclidean distance between two lattice coordinates.
pub fn grid_distance<T: Scalar>(a: GridPosition, b: GridPosition) -> T {
    T::from_usize_lossy(a.squared_distance(&b)).sqrt()
}

/// In-grid 4-connected neighbours in the fixed order up, down, left, right.
pub fn neighbors_of(p: GridPosition, shape: GridShape) -> Vec<GridPosition> {
    let mut out = Vec::with_capacity(4);
    if p.row > 0 {
        out.push(GridPosition::new(p.row - 1, p.col));
    }
    if p.row + 1 < shape.rows {
        out.push(GridPosition::new(p.row + 1, p.col));
    }
    if p.col > 0 {
        out.push(GridPosition::new(p.row, p.col - 1));
    }
    if p.col + 1 < shape.cols {
        out.push(GridPosition::new(p.row, p.col + 1));
    }
    out
}
