//! Segment minimization for intensity matrices.
//!
//! An intensity matrix is decomposed into segment matrices: each has one
//! positive value and, per row, at most one interval of consecutive cells.
//! The library provides the digit-splitting approximation pipelines for
//! bases 2, 3 and 4, the row-first pipeline driven by any single-row solver,
//! the `ceil(rho/2)` lower bound, an exact solver for small instances, the
//! instance generators used in experiments and a benchmark harness.

pub mod algorithms;
pub mod bench;
pub mod decompose;
pub mod error;
pub mod exact;
pub mod generators;
pub mod io;
pub mod matrix;
pub mod packing;
pub mod row_solvers;

pub use algorithms::{alg_base, alg_log_d, Algorithm};
pub use error::{Error, Result};
pub use matrix::{
    lower_bound, markers, rho, row_difference, verify, IntensityMatrix, RowSegment, SegmentMatrix,
    Segmentation, Verdict,
};
