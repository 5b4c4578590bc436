//! Rows over `{0, 1, 2}`: at most `rho/2` 1-segments and `rho/4 + 1/2`
//! 2-segments.
//!
//! The row is rewritten step by step. Each step finds the lowest-numbered
//! applicable pattern at its leftmost position, subtracts a few segments and
//! thereby removes a known number of markers:
//!
//! | case | pattern                         | markers | 1-seg | 2-seg |
//! |------|---------------------------------|---------|-------|-------|
//! | 1    | `1 2+ 1`                        | 2       | 1     | 0     |
//! | 2    | `0 1+ 0`                        | 2       | 1     | 0     |
//! | 3    | `0 2+ 1+ 2+ 0`                  | 4       | 2     | 1     |
//! | 4    | two of `0 2+ 1+ 0` / `0 1+ 2+ 0` | 6       | 3     | 1     |
//! | 5    | two of `0 2+ 0`                 | 4       | 2     | 1     |
//! | 6    | one of each kind                | 5       | 2     | 1     |
//! | base | a single remaining island       | <= 3    | <= 1  | 1     |

use crate::error::Result;
use crate::matrix::{markers, RowSegment};

use super::{check_alphabet, padded_runs, runs_segment, subtract, RowSegmentation, Run};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Base3Case {
    One,
    Two,
    Three,
    Four,
    Five,
    Six,
    Base,
}

/// One rewrite step together with the marker counts around it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Base3Step {
    pub case: Base3Case,
    pub segments: Vec<RowSegment>,
    pub markers_before: usize,
    pub markers_after: usize,
}

/// Segments a `{0,1,2}` row.
pub fn segment_row_base3(row: &[u64]) -> Result<RowSegmentation> {
    Ok(base3_trace(row)?
        .into_iter()
        .flat_map(|step| step.segments)
        .collect())
}

/// Runs the rewrite loop and returns every step taken.
pub fn base3_trace(row: &[u64]) -> Result<Vec<Base3Step>> {
    check_alphabet(row, 2)?;
    let mut residual = row.to_vec();
    let mut steps = Vec::new();
    loop {
        let runs = padded_runs(&residual);
        let Some((case, segments)) = next_step(&runs) else {
            break;
        };
        let markers_before = markers(&residual);
        for s in &segments {
            subtract(&mut residual, s);
        }
        steps.push(Base3Step {
            case,
            segments,
            markers_before,
            markers_after: markers(&residual),
        });
    }
    debug_assert!(residual.iter().all(|&v| v == 0));
    Ok(steps)
}

/// Shape of a maximal non-zero stretch once cases 1 to 3 no longer apply.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Island {
    /// `0 2+ 0`, the run index of the 2s.
    Peak(usize),
    /// `0 1+ 2+ 0` or `0 2+ 1+ 0`: run indices of the 1s and of the 2s.
    Step { ones: usize, twos: usize },
}

fn values_at(runs: &[Run], at: usize, pattern: &[u64]) -> bool {
    runs.len() >= at + pattern.len()
        && runs[at..at + pattern.len()]
            .iter()
            .zip(pattern)
            .all(|(r, &v)| r.value == v)
}

fn next_step(runs: &[Run]) -> Option<(Base3Case, Vec<RowSegment>)> {
    let one = |from: usize, to: usize| runs_segment(runs, from, to, 1);
    let two = |at: usize| runs_segment(runs, at, at, 2);

    if let Some(k) = (0..runs.len()).find(|&k| values_at(runs, k, &[1, 2, 1])) {
        return Some((Base3Case::One, vec![one(k + 1, k + 1)]));
    }
    if let Some(k) = (0..runs.len()).find(|&k| values_at(runs, k, &[0, 1, 0])) {
        return Some((Base3Case::Two, vec![one(k + 1, k + 1)]));
    }
    if let Some(k) = (0..runs.len()).find(|&k| values_at(runs, k, &[0, 2, 1, 2, 0])) {
        return Some((
            Base3Case::Three,
            vec![two(k + 1), one(k + 2, k + 3), one(k + 3, k + 3)],
        ));
    }

    let islands = islands(runs);
    let steps: Vec<(usize, usize)> = islands
        .iter()
        .filter_map(|i| match *i {
            Island::Step { ones, twos } => Some((ones, twos)),
            Island::Peak(_) => None,
        })
        .collect();
    let peaks: Vec<usize> = islands
        .iter()
        .filter_map(|i| match *i {
            Island::Peak(at) => Some(at),
            Island::Step { .. } => None,
        })
        .collect();
    // Covers a step island with two 1-segments: one over both runs, one over the 2s.
    let step_by_ones =
        |(ones, twos): (usize, usize)| vec![one(ones.min(twos), ones.max(twos)), one(twos, twos)];
    let step_by_one_and_two = |(ones, twos): (usize, usize)| vec![one(ones, ones), two(twos)];

    if steps.len() >= 2 {
        let mut segs = step_by_ones(steps[0]);
        segs.extend(step_by_one_and_two(steps[1]));
        return Some((Base3Case::Four, segs));
    }
    if peaks.len() >= 2 {
        let at = peaks[1];
        return Some((
            Base3Case::Five,
            vec![two(peaks[0]), one(at, at), one(at, at)],
        ));
    }
    if let (Some(&step), Some(&peak)) = (steps.first(), peaks.first()) {
        let mut segs = vec![two(peak)];
        segs.extend(step_by_ones(step));
        return Some((Base3Case::Six, segs));
    }
    if let Some(&step) = steps.first() {
        return Some((Base3Case::Base, step_by_one_and_two(step)));
    }
    peaks.first().map(|&at| (Base3Case::Base, vec![two(at)]))
}

/// Classifies maximal non-zero stretches. Only called when cases 1 to 3 do
/// not apply, which leaves exactly the two shapes of [`Island`].
fn islands(runs: &[Run]) -> Vec<Island> {
    let mut out = Vec::new();
    let mut k = 0;
    while k < runs.len() {
        if runs[k].value == 0 {
            k += 1;
            continue;
        }
        let start = k;
        while k < runs.len() && runs[k].value != 0 {
            k += 1;
        }
        let island = match &runs[start..k] {
            [r] if r.value == 2 => Island::Peak(start),
            [a, b] if a.value == 1 && b.value == 2 => Island::Step {
                ones: start,
                twos: start + 1,
            },
            [a, b] if a.value == 2 && b.value == 1 => Island::Step {
                ones: start + 1,
                twos: start,
            },
            other => unreachable!("unexpected stretch {other:?} after cases 1-3"),
        };
        out.push(island);
    }
    out
}
