//! Intensity matrices, segment matrices and segmentations.
//!
//! Everything in this module uses 0-based row and column indices. The text
//! formats in [`crate::io`] convert to and from the 1-based convention used
//! on disk.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};

/// Largest cell value accepted anywhere in the library (inclusive).
pub const MAX_CELL_VALUE: u64 = 1 << 32;

/// Number of markers in a row: positions where the value changes, with a
/// virtual zero before the first and after the last column.
pub fn markers(row: &[u64]) -> usize {
    let mut prev = 0;
    let mut count = 0;
    for &v in row {
        if v != prev {
            count += 1;
        }
        prev = v;
    }
    if prev != 0 {
        count += 1;
    }
    count
}

/// Largest jump between neighbouring cells of a row, counting the jumps from
/// and to the virtual zero boundary.
pub fn row_difference(row: &[u64]) -> u64 {
    let mut prev = 0;
    let mut best = 0;
    for &v in row {
        best = best.max(v.abs_diff(prev));
        prev = v;
    }
    best.max(prev)
}

/// Sum of all upward jumps in a row (starting from the virtual zero). This is
/// the number of unit segments a stacking decomposition uses.
pub fn total_ascent(row: &[u64]) -> u64 {
    let mut prev = 0;
    let mut sum = 0;
    for &v in row {
        if v > prev {
            sum += v - prev;
        }
        prev = v;
    }
    sum
}

/// A non-negative integer target matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntensityMatrix {
    rows: usize,
    cols: usize,
    cells: Vec<u64>,
    max_value: u64,
    row_difference: u64,
}

impl IntensityMatrix {
    /// Builds a matrix from row-major cells.
    pub fn new(rows: usize, cols: usize, cells: Vec<u64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Parameter(format!(
                "matrix must have at least one row and column, got {rows}x{cols}"
            )));
        }
        if cells.len() != rows * cols {
            return Err(Error::Parameter(format!(
                "expected {} cells for a {rows}x{cols} matrix, got {}",
                rows * cols,
                cells.len()
            )));
        }
        if let Some(pos) = cells.iter().position(|&v| v > MAX_CELL_VALUE) {
            return Err(Error::Parameter(format!(
                "cell ({}, {}) holds {} which exceeds {MAX_CELL_VALUE}",
                pos / cols + 1,
                pos % cols + 1,
                cells[pos]
            )));
        }
        let max_value = cells.iter().copied().max().unwrap_or(0);
        let row_difference = cells
            .chunks(cols)
            .map(self::row_difference)
            .max()
            .unwrap_or(0);
        Ok(IntensityMatrix {
            rows,
            cols,
            cells,
            max_value,
            row_difference,
        })
    }

    pub fn from_rows<R: AsRef<[u64]>>(rows: impl IntoIterator<Item = R>) -> Result<Self> {
        let mut cells = Vec::new();
        let mut n_rows = 0;
        let mut cols = None;
        for row in rows {
            let row = row.as_ref();
            match cols {
                None => cols = Some(row.len()),
                Some(c) if c != row.len() => {
                    return Err(Error::Parameter(format!(
                        "row {} has {} entries, expected {c}",
                        n_rows + 1,
                        row.len()
                    )))
                }
                _ => {}
            }
            cells.extend_from_slice(row);
            n_rows += 1;
        }
        Self::new(n_rows, cols.unwrap_or(0), cells)
    }

    pub fn zeros(rows: usize, cols: usize) -> Result<Self> {
        Self::new(rows, cols, vec![0; rows * cols])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, row: usize, col: usize) -> u64 {
        self.cells[row * self.cols + col]
    }

    pub fn row(&self, row: usize) -> &[u64] {
        &self.cells[row * self.cols..(row + 1) * self.cols]
    }

    pub fn row_iter(&self) -> impl ExactSizeIterator<Item = &[u64]> + '_ {
        self.cells.chunks(self.cols)
    }

    pub fn cells(&self) -> &[u64] {
        &self.cells
    }

    /// Largest entry `h`.
    pub fn max_value(&self) -> u64 {
        self.max_value
    }

    /// Row-difference `D`, the maximum of [`row_difference`] over all rows.
    pub fn row_difference(&self) -> u64 {
        self.row_difference
    }

    pub fn is_zero(&self) -> bool {
        self.max_value == 0
    }
}

impl fmt::Debug for IntensityMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.row_iter()).finish()
    }
}

/// Maximum marker count over all rows.
pub fn rho(matrix: &IntensityMatrix) -> usize {
    matrix.row_iter().map(markers).max().unwrap_or(0)
}

/// `ceil(rho / 2)`, a lower bound on the size of every segmentation.
pub fn lower_bound(matrix: &IntensityMatrix) -> usize {
    rho(matrix).div_ceil(2)
}

/// One interval of a single row carrying a uniform positive value.
/// Columns are 0-based and inclusive.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RowSegment {
    pub first: usize,
    pub last: usize,
    pub value: u64,
}

impl RowSegment {
    pub fn new(first: usize, last: usize, value: u64) -> Self {
        debug_assert!(first <= last && value > 0);
        RowSegment { first, last, value }
    }

    pub fn len(&self) -> usize {
        self.last - self.first + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn check(&self, cols: usize) -> Result<()> {
        if self.first > self.last || self.last >= cols || self.value == 0 {
            return Err(Error::InvalidSegment(format!(
                "interval [{}..{}] value {} in a row of {cols} columns",
                self.first + 1,
                self.last + 1,
                self.value
            )));
        }
        Ok(())
    }
}

/// A single step: one value and at most one interval per row.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SegmentMatrix {
    value: u64,
    intervals: BTreeMap<usize, (usize, usize)>,
}

impl SegmentMatrix {
    /// `intervals` maps a 0-based row to an inclusive 0-based column range.
    pub fn new(value: u64, intervals: BTreeMap<usize, (usize, usize)>) -> Result<Self> {
        if value == 0 {
            return Err(Error::InvalidSegment(
                "segment value must be positive".into(),
            ));
        }
        if intervals.is_empty() {
            return Err(Error::InvalidSegment("segment matrix covers no row".into()));
        }
        if let Some((row, (l, r))) = intervals.iter().find(|(_, (l, r))| l > r) {
            return Err(Error::InvalidSegment(format!(
                "row {} has reversed interval [{}..{}]",
                row + 1,
                l + 1,
                r + 1
            )));
        }
        Ok(SegmentMatrix { value, intervals })
    }

    pub fn single(row: usize, first: usize, last: usize, value: u64) -> Result<Self> {
        Self::new(value, BTreeMap::from([(row, (first, last))]))
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn intervals(&self) -> &BTreeMap<usize, (usize, usize)> {
        &self.intervals
    }

    pub fn interval(&self, row: usize) -> Option<(usize, usize)> {
        self.intervals.get(&row).copied()
    }

    /// Same intervals with the value multiplied by `factor`.
    pub fn scaled(&self, factor: u64) -> Result<Self> {
        let value = self
            .value
            .checked_mul(factor)
            .filter(|v| *v <= MAX_CELL_VALUE)
            .ok_or_else(|| Error::Parameter("scaled segment value overflows".into()))?;
        Ok(SegmentMatrix {
            value,
            intervals: self.intervals.clone(),
        })
    }

    pub fn check(&self, rows: usize, cols: usize) -> Result<()> {
        if self.value == 0 || self.intervals.is_empty() {
            return Err(Error::InvalidSegment(
                "empty or zero-valued segment matrix".into(),
            ));
        }
        for (&row, &(l, r)) in &self.intervals {
            if row >= rows || l > r || r >= cols {
                return Err(Error::InvalidSegment(format!(
                    "row {} interval [{}..{}] outside a {rows}x{cols} matrix",
                    row + 1,
                    l + 1,
                    r + 1
                )));
            }
        }
        Ok(())
    }
}

/// An ordered list of segment matrices meant to sum to a target.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Segmentation {
    rows: usize,
    cols: usize,
    segments: Vec<SegmentMatrix>,
}

impl Segmentation {
    pub fn empty(rows: usize, cols: usize) -> Self {
        Segmentation {
            rows,
            cols,
            segments: Vec::new(),
        }
    }

    pub fn new(rows: usize, cols: usize, segments: Vec<SegmentMatrix>) -> Result<Self> {
        for s in &segments {
            s.check(rows, cols)?;
        }
        Ok(Segmentation {
            rows,
            cols,
            segments,
        })
    }

    pub fn push(&mut self, segment: SegmentMatrix) -> Result<()> {
        segment.check(self.rows, self.cols)?;
        self.segments.push(segment);
        Ok(())
    }

    pub fn extend(&mut self, other: Segmentation) -> Result<()> {
        if other.dims() != self.dims() {
            return Err(Error::DimensionMismatch {
                expected_rows: self.rows,
                expected_cols: self.cols,
                rows: other.rows,
                cols: other.cols,
            });
        }
        self.segments.extend(other.segments);
        Ok(())
    }

    pub fn size(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn segments(&self) -> &[SegmentMatrix] {
        &self.segments
    }

    pub fn into_segments(self) -> Vec<SegmentMatrix> {
        self.segments
    }

    /// Elementwise sum of all segments, wide enough to never overflow.
    pub fn sum(&self) -> Vec<u128> {
        let mut acc = vec![0u128; self.rows * self.cols];
        for s in &self.segments {
            for (&row, &(l, r)) in &s.intervals {
                for c in l..=r.min(self.cols.saturating_sub(1)) {
                    if row < self.rows {
                        acc[row * self.cols + c] += u128::from(s.value);
                    }
                }
            }
        }
        acc
    }

    /// Number of segments per value.
    pub fn value_counts(&self) -> BTreeMap<u64, usize> {
        let mut out = BTreeMap::new();
        for s in &self.segments {
            *out.entry(s.value).or_insert(0) += 1;
        }
        out
    }
}

/// Outcome of [`verify`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Ok,
    /// First cell (row-major order) where the segments do not add up.
    /// `residual` is target minus sum.
    Mismatch {
        row: usize,
        col: usize,
        residual: i128,
    },
}

impl Verdict {
    pub fn is_ok(&self) -> bool {
        matches!(self, Verdict::Ok)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Ok => write!(f, "OK"),
            Verdict::Mismatch { row, col, residual } => write!(
                f,
                "mismatch at ({}, {}): residual {residual}",
                row + 1,
                col + 1
            ),
        }
    }
}

/// Checks that `segmentation` sums exactly to `target`.
pub fn verify(target: &IntensityMatrix, segmentation: &Segmentation) -> Result<Verdict> {
    if target.dims() != segmentation.dims() {
        return Err(Error::DimensionMismatch {
            expected_rows: target.rows,
            expected_cols: target.cols,
            rows: segmentation.rows,
            cols: segmentation.cols,
        });
    }
    for s in &segmentation.segments {
        s.check(target.rows, target.cols)?;
    }
    let sum = segmentation.sum();
    for (idx, (&want, &got)) in target.cells.iter().zip(&sum).enumerate() {
        if u128::from(want) != got {
            return Ok(Verdict::Mismatch {
                row: idx / target.cols,
                col: idx % target.cols,
                residual: i128::from(want) - got as i128,
            });
        }
    }
    Ok(Verdict::Ok)
}
