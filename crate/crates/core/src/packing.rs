//! Greedy row packing: stack equal-valued row segments from different rows
//! into shared segment matrices.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::matrix::{SegmentMatrix, Segmentation};
use crate::row_solvers::RowSegmentation;

/// Packs one row segmentation per matrix row into segment matrices.
///
/// For each value `v` (ascending) the `k`-th matrix of value `v` takes the
/// `k`-th `v`-segment of every row that has one, in the row's emission
/// order. This yields exactly `sum over v of max_i n_v(i)` matrices.
pub fn pack_rows(per_row: &[RowSegmentation], cols: usize) -> Result<Segmentation> {
    let mut by_value: BTreeMap<u64, Vec<Vec<(usize, usize)>>> = BTreeMap::new();
    for (row, segs) in per_row.iter().enumerate() {
        for s in segs.segments() {
            s.check(cols)?;
            by_value
                .entry(s.value)
                .or_insert_with(|| vec![Vec::new(); per_row.len()])[row]
                .push((s.first, s.last));
        }
    }
    let mut out = Segmentation::empty(per_row.len(), cols);
    for (value, rows) in by_value {
        let depth = rows.iter().map(Vec::len).max().unwrap_or(0);
        for k in 0..depth {
            let intervals: BTreeMap<usize, (usize, usize)> = rows
                .iter()
                .enumerate()
                .filter_map(|(row, list)| list.get(k).map(|&iv| (row, iv)))
                .collect();
            out.push(SegmentMatrix::new(value, intervals).map_err(|e| {
                Error::InvalidSegment(format!("packing produced a bad matrix: {e}"))
            })?)?;
        }
    }
    Ok(out)
}
