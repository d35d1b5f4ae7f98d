//! Rasterized domain, binary masks, scalar fields and polylines.
//!
//! A grid is an isotropic lattice of cell centers. Cell `(i, j)` (row `i`,
//! column `j`) has its center at
//!
//! ```text
//! origin + spacing * (j + 0.5, i + 0.5)
//! ```
//!
//! so columns run along the first coordinate and rows along the second.
//! Sets are represented by the cell centers they contain; the boundary of a
//! rasterized set lies between cell centers.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Isotropic raster geometry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub origin: [f64; 2],
    pub spacing: f64,
    pub rows: usize,
    pub cols: usize,
}

impl GridSpec {
    pub fn new(origin: [f64; 2], spacing: f64, rows: usize, cols: usize) -> Result<Self> {
        if !(spacing.is_finite() && spacing > 0.0) {
            return Err(Error::InvalidGrid(format!("spacing must be positive, got {spacing}")));
        }
        if !(origin[0].is_finite() && origin[1].is_finite()) {
            return Err(Error::InvalidGrid("origin must be finite".into()));
        }
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidGrid(format!("dims must be at least 1x1, got {rows}x{cols}")));
        }
        Ok(Self { origin, spacing, rows, cols })
    }

    /// Unit-spaced grid with origin at zero, the natural geometry of an image.
    pub fn pixels(rows: usize, cols: usize) -> Result<Self> {
        Self::new([0.0, 0.0], 1.0, rows, cols)
    }

    /// Grid whose cells exactly tile the rectangle `[min, max]`.
    ///
    /// Fails when the implied spacings along the two axes differ by more than
    /// a relative `1e-9`, since anisotropic grids are not supported.
    pub fn from_extent(min: [f64; 2], max: [f64; 2], rows: usize, cols: usize) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidGrid(format!("dims must be at least 1x1, got {rows}x{cols}")));
        }
        let hx = (max[0] - min[0]) / cols as f64;
        let hy = (max[1] - min[1]) / rows as f64;
        if (hx - hy).abs() > 1e-9 * hx.abs().max(hy.abs()) {
            return Err(Error::InvalidGrid(format!(
                "anisotropic extent: spacing {hx} along x but {hy} along y"
            )));
        }
        Self::new(min, hx, rows, cols)
    }

    /// Square `n x n` grid covering the box `[min, max]` enlarged by
    /// `margin` (a fraction of the larger side) on every side.
    pub fn covering(min: [f64; 2], max: [f64; 2], n: usize, margin: f64) -> Result<Self> {
        let w = max[0] - min[0];
        let h = max[1] - min[1];
        let side = w.max(h).max(f64::MIN_POSITIVE) * (1.0 + 2.0 * margin);
        let cx = 0.5 * (min[0] + max[0]);
        let cy = 0.5 * (min[1] + max[1]);
        Self::new([cx - 0.5 * side, cy - 0.5 * side], side / n as f64, n, n)
    }

    pub fn len(&self) -> usize {
        self.rows * self.cols
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn index(&self, row: usize, col: usize) -> usize {
        row * self.cols + col
    }

    #[inline]
    pub fn cell_center(&self, row: usize, col: usize) -> [f64; 2] {
        [
            self.origin[0] + self.spacing * (col as f64 + 0.5),
            self.origin[1] + self.spacing * (row as f64 + 0.5),
        ]
    }

    pub fn cell_area(&self) -> f64 {
        self.spacing * self.spacing
    }

    pub fn area(&self) -> f64 {
        self.len() as f64 * self.cell_area()
    }

    /// Iterator over `(row, col, center)` in row-major order.
    pub fn cells(&self) -> impl Iterator<Item = (usize, usize, [f64; 2])> + '_ {
        (0..self.rows).flat_map(move |i| (0..self.cols).map(move |j| (i, j, self.cell_center(i, j))))
    }

    /// Two grids are compatible when they describe the same lattice.
    pub fn ensure_same(&self, other: &GridSpec) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }
}

/// Half-open rectangle of cell indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    pub row_start: usize,
    pub row_end: usize,
    pub col_start: usize,
    pub col_end: usize,
}

impl Window {
    pub fn full(grid: &GridSpec) -> Self {
        Self { row_start: 0, row_end: grid.rows, col_start: 0, col_end: grid.cols }
    }

    pub fn validate(&self, grid: &GridSpec) -> Result<()> {
        if self.row_start >= self.row_end
            || self.col_start >= self.col_end
            || self.row_end > grid.rows
            || self.col_end > grid.cols
        {
            return Err(Error::InvalidGrid(format!("window {self:?} does not fit {}x{}", grid.rows, grid.cols)));
        }
        Ok(())
    }

    #[inline]
    pub fn contains(&self, row: usize, col: usize) -> bool {
        (self.row_start..self.row_end).contains(&row) && (self.col_start..self.col_end).contains(&col)
    }

    pub fn indices<'a>(&'a self, grid: &'a GridSpec) -> impl Iterator<Item = usize> + 'a {
        (self.row_start..self.row_end)
            .flat_map(move |i| (self.col_start..self.col_end).map(move |j| grid.index(i, j)))
    }
}

/// Set membership of every cell center.
#[derive(Debug, Clone, PartialEq)]
pub struct BinaryMask {
    grid: GridSpec,
    bits: Vec<bool>,
}

impl BinaryMask {
    pub fn new(grid: GridSpec, bits: Vec<bool>) -> Result<Self> {
        if bits.len() != grid.len() {
            return Err(Error::DimMismatch { expected: grid.len(), got: bits.len() });
        }
        Ok(Self { grid, bits })
    }

    pub fn empty(grid: GridSpec) -> Self {
        Self { grid, bits: vec![false; grid.len()] }
    }

    pub fn full(grid: GridSpec) -> Self {
        Self { grid, bits: vec![true; grid.len()] }
    }

    /// Rasterizes a point predicate at the cell centers.
    pub fn from_fn(grid: GridSpec, mut inside: impl FnMut([f64; 2]) -> bool) -> Self {
        let bits = grid.cells().map(|(_, _, x)| inside(x)).collect();
        Self { grid, bits }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> bool {
        self.bits[self.grid.index(row, col)]
    }

    pub fn set(&mut self, row: usize, col: usize, value: bool) {
        let k = self.grid.index(row, col);
        self.bits[k] = value;
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// Lebesgue measure: number of member cells times the cell area.
    pub fn measure(&self) -> f64 {
        self.count() as f64 * self.grid.cell_area()
    }

    pub fn is_empty(&self) -> bool {
        !self.bits.iter().any(|&b| b)
    }

    pub fn is_full(&self) -> bool {
        self.bits.iter().all(|&b| b)
    }

    pub fn complement(&self) -> Self {
        Self { grid: self.grid, bits: self.bits.iter().map(|b| !b).collect() }
    }

    pub fn is_subset_of(&self, other: &BinaryMask) -> bool {
        self.bits.iter().zip(&other.bits).all(|(&a, &b)| !a || b)
    }

    fn zip_with(&self, other: &BinaryMask, f: impl Fn(bool, bool) -> bool) -> Result<Self> {
        self.grid.ensure_same(&other.grid)?;
        let bits = self.bits.iter().zip(&other.bits).map(|(&a, &b)| f(a, b)).collect();
        Ok(Self { grid: self.grid, bits })
    }

    pub fn union(&self, other: &BinaryMask) -> Result<Self> {
        self.zip_with(other, |a, b| a || b)
    }

    pub fn intersection(&self, other: &BinaryMask) -> Result<Self> {
        self.zip_with(other, |a, b| a && b)
    }

    pub fn difference(&self, other: &BinaryMask) -> Result<Self> {
        self.zip_with(other, |a, b| a && !b)
    }

    pub fn symmetric_difference(&self, other: &BinaryMask) -> Result<Self> {
        self.zip_with(other, |a, b| a != b)
    }

    /// Same bits on a different lattice of the same shape.
    pub fn with_grid(&self, grid: GridSpec) -> Result<Self> {
        Self::new(grid, self.bits.clone())
    }
}

/// Finite real value at every cell center.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: GridSpec,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn new(grid: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::DimMismatch { expected: grid.len(), got: values.len() });
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { row: k / grid.cols, col: k % grid.cols });
        }
        Ok(Self { grid, values })
    }

    pub(crate) fn from_raw(grid: GridSpec, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Self { grid, values }
    }

    /// Samples a function at the cell centers.
    pub fn from_fn(grid: GridSpec, f: impl Fn([f64; 2]) -> f64) -> Result<Self> {
        Self::new(grid, grid.cells().map(|(_, _, x)| f(x)).collect())
    }

    pub fn constant(grid: GridSpec, value: f64) -> Result<Self> {
        Self::new(grid, vec![value; grid.len()])
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[self.grid.index(row, col)]
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(self.grid, self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn sub(&self, other: &ScalarField) -> Result<Self> {
        self.grid.ensure_same(&other.grid)?;
        Self::new(self.grid, self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect())
    }

    pub fn with_grid(&self, grid: GridSpec) -> Result<Self> {
        Self::new(grid, self.values.clone())
    }

    /// Bilinear interpolation between cell centers, clamped at the border.
    pub fn interpolate(&self, x: [f64; 2]) -> f64 {
        let g = &self.grid;
        let fx = ((x[0] - g.origin[0]) / g.spacing - 0.5).clamp(0.0, (g.cols - 1) as f64);
        let fy = ((x[1] - g.origin[1]) / g.spacing - 0.5).clamp(0.0, (g.rows - 1) as f64);
        let j0 = (fx.floor() as usize).min(g.cols.saturating_sub(2));
        let i0 = (fy.floor() as usize).min(g.rows.saturating_sub(2));
        let j1 = (j0 + 1).min(g.cols - 1);
        let i1 = (i0 + 1).min(g.rows - 1);
        let tx = fx - j0 as f64;
        let ty = fy - i0 as f64;
        let bottom = self.get(i0, j0) * (1.0 - tx) + self.get(i0, j1) * tx;
        let top = self.get(i1, j0) * (1.0 - tx) + self.get(i1, j1) * tx;
        bottom * (1.0 - ty) + top * ty
    }
}

/// Ordered vertex chain in domain units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polyline {
    pub points: Vec<[f64; 2]>,
    /// When set, the last vertex connects back to the first.
    pub closed: bool,
}

impl Polyline {
    pub fn new(points: Vec<[f64; 2]>, closed: bool) -> Result<Self> {
        if points.len() == 1 {
            return Err(Error::InvalidShape("polyline needs at least two vertices".into()));
        }
        if points.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidShape("consecutive polyline vertices coincide".into()));
        }
        Ok(Self { points, closed })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Segments as vertex pairs, including the closing one.
    pub fn segments(&self) -> impl Iterator<Item = ([f64; 2], [f64; 2])> + '_ {
        let n = self.points.len();
        let count = if self.closed && n > 2 { n } else { n.saturating_sub(1) };
        (0..count).map(move |k| (self.points[k], self.points[(k + 1) % n]))
    }

    pub fn length(&self) -> f64 {
        self.segments().map(|(a, b)| dist(a, b)).sum()
    }

    /// Vertices plus intermediate points so that no gap exceeds `step`.
    pub fn densify(&self, step: f64) -> Vec<[f64; 2]> {
        if self.points.len() < 2 {
            return self.points.clone();
        }
        let mut out = Vec::new();
        for (a, b) in self.segments() {
            let n = (dist(a, b) / step).ceil().max(1.0) as usize;
            for k in 0..n {
                let t = k as f64 / n as f64;
                out.push([a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]);
            }
        }
        if !self.closed {
            out.push(*self.points.last().unwrap());
        }
        out
    }
}

#[inline]
pub(crate) fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}
