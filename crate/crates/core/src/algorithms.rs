//! Full-matrix approximation pipelines.
//!
//! * digit-first (`b2`, `b3`, `b4`): split the matrix into base-`b` digit
//!   layers, segment each layer row by row, pack the rows of each layer and
//!   scale the layers back up;
//! * row-first (`logd`): segment each row of the target with a single-row
//!   solver, cap values at the row-difference, break every segment value
//!   into its binary digits and pack all rows together.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::decompose::{ceil_log, combine_scaled, split_by_base};
use crate::error::{Error, Result};
use crate::matrix::{IntensityMatrix, RowSegment, Segmentation};
use crate::packing::pack_rows;
use crate::row_solvers::{
    segment_row_base3, segment_row_base4, transform_to_bounded, RowSegmentation, SingleRowSolver,
    SweepSolver,
};

/// Each maximal run of non-zero cells becomes one segment. Optimal for 0/1
/// rows.
pub fn segment_row_runs(row: &[u64]) -> RowSegmentation {
    let mut out = RowSegmentation::default();
    let mut col = 0;
    while col < row.len() {
        if row[col] == 0 {
            col += 1;
            continue;
        }
        let start = col;
        while col < row.len() && row[col] == row[start] {
            col += 1;
        }
        out.push(RowSegment::new(start, col - 1, row[start]));
    }
    out
}

/// Digit-first pipeline for base 2, 3 or 4.
pub fn alg_base(matrix: &IntensityMatrix, base: u64) -> Result<Segmentation> {
    let row_solver: fn(&[u64]) -> Result<RowSegmentation> = match base {
        2 => |row| Ok(segment_row_runs(row)),
        3 => segment_row_base3,
        4 => segment_row_base4,
        _ => {
            return Err(Error::Parameter(format!(
                "digit pipeline supports bases 2, 3 and 4, got {base}"
            )))
        }
    };
    let (rows, cols) = matrix.dims();
    let stack = split_by_base(matrix, base)?;
    let layers = stack
        .layers()
        .par_iter()
        .enumerate()
        .map(|(l, layer)| {
            let per_row = layer
                .row_iter()
                .map(row_solver)
                .collect::<Result<Vec<_>>>()?;
            Ok((stack.scale(l), pack_rows(&per_row, cols)?))
        })
        .collect::<Result<Vec<_>>>()?;
    combine_scaled(rows, cols, layers)
}

/// Row-first pipeline with a pluggable single-row solver.
pub fn alg_log_d(
    matrix: &IntensityMatrix,
    solver: &dyn SingleRowSolver,
    digit_base: u64,
) -> Result<Segmentation> {
    if digit_base < 2 {
        return Err(Error::Parameter(format!(
            "digit base must be at least 2, got {digit_base}"
        )));
    }
    let per_row = matrix
        .row_iter()
        .collect::<Vec<_>>()
        .par_iter()
        .map(|row| {
            let solved = solver.solve(row)?;
            solved.check_against(row)?;
            let bounded = transform_to_bounded(row, &solved)?;
            Ok(split_digits(&bounded, digit_base))
        })
        .collect::<Result<Vec<_>>>()?;
    pack_rows(&per_row, matrix.cols())
}

/// Replaces each segment of value `v` by one segment per non-zero digit of
/// `v` in the given base, valued `digit * base^l`, on the same interval.
pub fn split_digits(segs: &RowSegmentation, base: u64) -> RowSegmentation {
    let mut out = RowSegmentation::default();
    for s in segs.segments() {
        let mut rest = s.value;
        let mut scale = 1;
        while rest > 0 {
            let digit = rest % base;
            if digit > 0 {
                out.push(RowSegment::new(s.first, s.last, digit * scale));
            }
            rest /= base;
            scale *= base;
        }
    }
    out
}

/// The pipelines compared in experiments.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Algorithm {
    Base2,
    Base3,
    Base4,
    /// Row-first pipeline with the sweep solver.
    LogD,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [
        Algorithm::Base2,
        Algorithm::Base3,
        Algorithm::Base4,
        Algorithm::LogD,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::Base2 => "b2",
            Algorithm::Base3 => "b3",
            Algorithm::Base4 => "b4",
            Algorithm::LogD => "logd",
        }
    }

    pub fn run(&self, matrix: &IntensityMatrix) -> Result<Segmentation> {
        match self {
            Algorithm::Base2 => alg_base(matrix, 2),
            Algorithm::Base3 => alg_base(matrix, 3),
            Algorithm::Base4 => alg_base(matrix, 4),
            Algorithm::LogD => alg_log_d(matrix, &SweepSolver, 2),
        }
    }

    /// Multiplicative part of the proven guarantee for this instance:
    /// `ceil(log2 h)+1`, `3/2 (ceil(log3 h)+1)`, `11/6 (ceil(log4 h)+1)` and
    /// `2 (ceil(log2 D)+1)` respectively.
    pub fn theoretical_factor(&self, matrix: &IntensityMatrix) -> f64 {
        let h = matrix.max_value();
        match self {
            Algorithm::Base2 => f64::from(ceil_log(h, 2) + 1),
            Algorithm::Base3 => 1.5 * f64::from(ceil_log(h, 3) + 1),
            Algorithm::Base4 => 11.0 / 6.0 * f64::from(ceil_log(h, 4) + 1),
            Algorithm::LogD => 2.0 * f64::from(ceil_log(matrix.row_difference(), 2) + 1),
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::Parameter(format!("unknown algorithm '{s}'")))
    }
}
