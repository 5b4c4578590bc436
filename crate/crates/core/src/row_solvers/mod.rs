//! Single-row segmentation algorithms.
//!
//! A row is a slice of non-negative integers. Every solver returns a
//! [`RowSegmentation`] whose segments sum exactly to the row.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::matrix::RowSegment;

mod base3;
mod base4;
mod exact_row;
mod sweep;
mod transform;

pub use base3::{base3_trace, segment_row_base3, Base3Case, Base3Step};
pub use base4::{
    base4_additive_constants, base4_constant, base4_patterns, segment_row_base4, IslandPattern,
};
pub use exact_row::{exact_single_row, ExactRowLimits};
pub use sweep::sweep_single_row;
pub use transform::transform_to_bounded;

/// A list of row segments meant to sum to one row.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RowSegmentation {
    segments: Vec<RowSegment>,
}

impl RowSegmentation {
    pub fn new(segments: Vec<RowSegment>) -> Self {
        RowSegmentation { segments }
    }

    pub fn segments(&self) -> &[RowSegment] {
        &self.segments
    }

    pub fn into_segments(self) -> Vec<RowSegment> {
        self.segments
    }

    pub fn len(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    pub fn push(&mut self, segment: RowSegment) {
        self.segments.push(segment);
    }

    /// Number of segments of each value.
    pub fn counts_by_value(&self) -> BTreeMap<u64, usize> {
        let mut out = BTreeMap::new();
        for s in &self.segments {
            *out.entry(s.value).or_insert(0) += 1;
        }
        out
    }

    pub fn count(&self, value: u64) -> usize {
        self.segments.iter().filter(|s| s.value == value).count()
    }

    pub fn max_value(&self) -> u64 {
        self.segments.iter().map(|s| s.value).max().unwrap_or(0)
    }

    /// Elementwise sum over `cols` columns. Fails if a segment leaves the row.
    pub fn sum(&self, cols: usize) -> Result<Vec<u64>> {
        let mut acc = vec![0u64; cols];
        for s in &self.segments {
            s.check(cols)?;
            for cell in &mut acc[s.first..=s.last] {
                *cell = cell
                    .checked_add(s.value)
                    .ok_or_else(|| Error::RowMismatch("segment sum overflows".into()))?;
            }
        }
        Ok(acc)
    }

    /// Checks that the segments sum exactly to `row`.
    pub fn check_against(&self, row: &[u64]) -> Result<()> {
        let sum = self.sum(row.len())?;
        if let Some(col) = sum.iter().zip(row).position(|(a, b)| a != b) {
            return Err(Error::RowMismatch(format!(
                "column {} sums to {} but the row holds {}",
                col + 1,
                sum[col],
                row[col]
            )));
        }
        Ok(())
    }

    pub fn sorted(mut self) -> Self {
        self.segments.sort();
        self
    }
}

impl FromIterator<RowSegment> for RowSegmentation {
    fn from_iter<I: IntoIterator<Item = RowSegment>>(iter: I) -> Self {
        RowSegmentation::new(iter.into_iter().collect())
    }
}

/// Approximation factor of a single-row solver, as a fraction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Ratio {
    pub num: u64,
    pub den: u64,
}

impl Ratio {
    pub const fn new(num: u64, den: u64) -> Self {
        Ratio { num, den }
    }

    pub fn as_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

/// Upper bound a solver guarantees on every emitted segment value.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ValueBound {
    /// Values never exceed the row-difference of the row.
    RowDifference,
    /// Values never exceed the row maximum.
    RowMaximum,
}

/// A single-row segmentation routine usable by the row-first pipeline.
pub trait SingleRowSolver: Sync {
    fn name(&self) -> &str;

    /// Claimed approximation factor against the single-row optimum.
    fn alpha(&self) -> Ratio;

    fn value_bound(&self) -> ValueBound;

    fn solve(&self, row: &[u64]) -> Result<RowSegmentation>;
}

/// The stack sweep; emits at most `markers(row)` segments, so it is a
/// 2-approximation with values bounded by the row-difference.
#[derive(Clone, Copy, Debug, Default)]
pub struct SweepSolver;

impl SingleRowSolver for SweepSolver {
    fn name(&self) -> &str {
        "sweep"
    }

    fn alpha(&self) -> Ratio {
        Ratio::new(2, 1)
    }

    fn value_bound(&self) -> ValueBound {
        ValueBound::RowDifference
    }

    fn solve(&self, row: &[u64]) -> Result<RowSegmentation> {
        Ok(sweep_single_row(row))
    }
}

/// Exhaustive optimum for short rows with small values.
#[derive(Clone, Copy, Debug, Default)]
pub struct ExactRowSolver {
    pub limits: ExactRowLimits,
}

impl SingleRowSolver for ExactRowSolver {
    fn name(&self) -> &str {
        "exact"
    }

    fn alpha(&self) -> Ratio {
        Ratio::new(1, 1)
    }

    fn value_bound(&self) -> ValueBound {
        ValueBound::RowMaximum
    }

    fn solve(&self, row: &[u64]) -> Result<RowSegmentation> {
        exact_single_row(row, None, self.limits)
    }
}

/// Rejects rows holding a value above `max`.
pub(crate) fn check_alphabet(row: &[u64], max: u64) -> Result<()> {
    match row.iter().position(|&v| v > max) {
        Some(col) => Err(Error::Parameter(format!(
            "column {} holds {}, expected values in 0..={max}",
            col + 1,
            row[col]
        ))),
        None => Ok(()),
    }
}

/// Maximal runs of equal values in a row padded with a zero on both sides.
/// Run bounds are given in padded coordinates (column `c` is position `c + 1`).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct Run {
    pub value: u64,
    pub start: usize,
    pub end: usize,
}

pub(crate) fn padded_runs(row: &[u64]) -> Vec<Run> {
    let mut runs: Vec<Run> = Vec::new();
    let padded = std::iter::once(0)
        .chain(row.iter().copied())
        .chain(std::iter::once(0));
    for (pos, v) in padded.enumerate() {
        match runs.last_mut() {
            Some(run) if run.value == v => run.end = pos,
            _ => runs.push(Run {
                value: v,
                start: pos,
                end: pos,
            }),
        }
    }
    runs
}

/// Converts padded runs `from..=to` into a row segment over real columns.
pub(crate) fn runs_segment(runs: &[Run], from: usize, to: usize, value: u64) -> RowSegment {
    RowSegment::new(runs[from].start - 1, runs[to].end - 1, value)
}

/// Subtracts a segment from a residual row.
pub(crate) fn subtract(residual: &mut [u64], segment: &RowSegment) {
    for cell in &mut residual[segment.first..=segment.last] {
        debug_assert!(*cell >= segment.value);
        *cell -= segment.value;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn runs_include_padding() {
        let runs = padded_runs(&[1, 1, 0, 2]);
        let values: Vec<u64> = runs.iter().map(|r| r.value).collect();
        assert_eq!(values, vec![0, 1, 0, 2, 0]);
        assert_eq!((runs[1].start, runs[1].end), (1, 2));
        assert_eq!(runs_segment(&runs, 1, 1, 1), RowSegment::new(0, 1, 1));
    }

    #[test]
    fn check_against_reports_column() {
        let seg = RowSegmentation::new(vec![RowSegment::new(0, 1, 1)]);
        assert!(seg.check_against(&[1, 1]).is_ok());
        assert!(seg.check_against(&[1, 2]).is_err());
        assert!(seg.check_against(&[1]).is_err());
        assert_eq!(seg.counts_by_value(), BTreeMap::from([(1, 1)]));
    }
}
