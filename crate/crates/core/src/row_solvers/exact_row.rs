use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::matrix::{markers, total_ascent, RowSegment};

use super::{subtract, RowSegmentation};

/// Size caps for [`exact_single_row`]. Raise them to override the defaults.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExactRowLimits {
    pub max_len: usize,
    pub max_value: u64,
}

impl Default for ExactRowLimits {
    fn default() -> Self {
        ExactRowLimits {
            max_len: 12,
            max_value: 6,
        }
    }
}

/// Minimum-size segmentation of one row by exhaustive search.
///
/// Iterative deepening on the segment count, starting from `ceil(markers/2)`.
/// The leftmost non-zero cell of the residual must be the first column of
/// some segment, so each node branches over that segment's value and end.
/// With `value_cap`, only segments of value at most the cap are used.
pub fn exact_single_row(
    row: &[u64],
    value_cap: Option<u64>,
    limits: ExactRowLimits,
) -> Result<RowSegmentation> {
    let h = row.iter().copied().max().unwrap_or(0);
    if row.len() > limits.max_len || h > limits.max_value {
        return Err(Error::LimitsExceeded(format!(
            "row of length {} with maximum {h} exceeds the exact row limits \
             (length {}, value {})",
            row.len(),
            limits.max_len,
            limits.max_value
        )));
    }
    let cap = value_cap.unwrap_or(u64::MAX);
    if cap == 0 && h > 0 {
        return Err(Error::Parameter("value cap must be positive".into()));
    }
    let mut search = Search {
        cap,
        failed: HashSet::new(),
        path: Vec::new(),
    };
    let mut residual = row.to_vec();
    // Unit stacking always succeeds, so the loop ends by the total ascent.
    for budget in markers(row).div_ceil(2)..=total_ascent(row) as usize {
        if search.dfs(&mut residual, budget) {
            return Ok(RowSegmentation::new(search.path));
        }
    }
    unreachable!("unit segments always segment a row")
}

struct Search {
    cap: u64,
    failed: HashSet<(Vec<u64>, usize)>,
    path: Vec<RowSegment>,
}

impl Search {
    fn dfs(&mut self, residual: &mut Vec<u64>, budget: usize) -> bool {
        let Some(start) = residual.iter().position(|&v| v > 0) else {
            return true;
        };
        if markers(residual).div_ceil(2) > budget {
            return false;
        }
        if self.failed.contains(&(residual.clone(), budget)) {
            return false;
        }
        for value in (1..=residual[start].min(self.cap)).rev() {
            let mut end = start;
            while end + 1 < residual.len() && residual[end + 1] >= value {
                end += 1;
            }
            for last in (start..=end).rev() {
                let seg = RowSegment::new(start, last, value);
                subtract(residual, &seg);
                self.path.push(seg);
                if self.dfs(residual, budget - 1) {
                    return true;
                }
                self.path.pop();
                for cell in &mut residual[start..=last] {
                    *cell += value;
                }
            }
        }
        self.failed.insert((residual.clone(), budget));
        false
    }
}
