//! Exact optima for small instances.
//!
//! [`exact_opt`] uses the fact that a segmentation with `M_v` matrices of
//! value `v` exists iff every row can be segmented with at most `M_v`
//! segments of each value `v` (pack the rows greedily). So the optimum is the
//! minimum of `sum_v max_i n_v(i)` over one row segmentation per row, and
//! only the Pareto-minimal count vectors of each row matter. Those are found
//! by a column sweep whose states are the multisets of segment values open at
//! a column; the rows are then combined with branch-and-bound against the
//! best pipeline result.
//!
//! [`brute_force_opt`] is an independent cross-check: iterative deepening
//! over whole segment matrices, anchored at the first non-zero cell.

use std::collections::{BTreeMap, HashSet};
use std::time::{Duration, Instant};

use crate::algorithms::Algorithm;
use crate::error::{Error, Result};
use crate::matrix::{lower_bound, IntensityMatrix, RowSegment, Segmentation};
use crate::packing::pack_rows;
use crate::row_solvers::RowSegmentation;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExactLimits {
    pub max_cells: usize,
    pub max_h: u64,
    /// `None` searches until done.
    pub time_budget: Option<Duration>,
}

impl Default for ExactLimits {
    fn default() -> Self {
        ExactLimits {
            max_cells: 64,
            max_h: 6,
            time_budget: Some(Duration::from_secs(30)),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExactStatus {
    Optimal,
    /// The time budget ran out; the segmentation is the best one found.
    Unknown,
}

#[derive(Clone, Debug)]
pub struct ExactOutcome {
    pub segmentation: Segmentation,
    pub status: ExactStatus,
}

impl ExactOutcome {
    pub fn size(&self) -> usize {
        self.segmentation.size()
    }

    pub fn is_optimal(&self) -> bool {
        self.status == ExactStatus::Optimal
    }

    /// The optimum, if it was proven.
    pub fn opt(&self) -> Option<usize> {
        self.is_optimal().then(|| self.size())
    }
}

pub fn check_limits(matrix: &IntensityMatrix, limits: &ExactLimits) -> Result<()> {
    let (rows, cols) = matrix.dims();
    if rows * cols > limits.max_cells || matrix.max_value() > limits.max_h {
        return Err(Error::LimitsExceeded(format!(
            "{rows}x{cols} matrix with maximum {} exceeds the exact limits \
             ({} cells, maximum {})",
            matrix.max_value(),
            limits.max_cells,
            limits.max_h
        )));
    }
    Ok(())
}

/// Minimum-size segmentation, or the best one found within the time budget.
pub fn exact_opt(matrix: &IntensityMatrix, limits: ExactLimits) -> Result<ExactOutcome> {
    check_limits(matrix, &limits)?;
    let deadline = limits.time_budget.map(|d| Instant::now() + d);
    let (rows, cols) = matrix.dims();

    let mut incumbent: Option<Segmentation> = None;
    for alg in Algorithm::ALL {
        let s = alg.run(matrix)?;
        if incumbent.as_ref().is_none_or(|best| s.size() < best.size()) {
            incumbent = Some(s);
        }
    }
    let incumbent = incumbent.expect("at least one pipeline");
    let optimal = |segmentation| {
        Ok(ExactOutcome {
            segmentation,
            status: ExactStatus::Optimal,
        })
    };
    if incumbent.size() <= lower_bound(matrix) {
        return optimal(incumbent);
    }
    let unknown = |segmentation| {
        Ok(ExactOutcome {
            segmentation,
            status: ExactStatus::Unknown,
        })
    };

    let h = matrix.max_value() as usize;
    let mut frontiers = Vec::with_capacity(rows);
    for row in matrix.row_iter() {
        match RowFrontier::build(row, h, deadline) {
            Some(f) => frontiers.push(f),
            None => return unknown(incumbent),
        }
    }
    let Some(choice) = combine_rows(&frontiers, h, incumbent.size(), deadline) else {
        return unknown(incumbent);
    };
    let Some(choice) = choice else {
        return optimal(incumbent);
    };
    let per_row: Vec<RowSegmentation> = frontiers
        .iter()
        .zip(&choice)
        .map(|(f, &k)| f.reconstruct(k))
        .collect();
    optimal(pack_rows(&per_row, cols)?)
}

fn expired(deadline: Option<Instant>) -> bool {
    deadline.is_some_and(|d| Instant::now() >= d)
}

/// `a <= b` componentwise.
fn dominates(a: &[u16], b: &[u16]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

/// Inserts `candidate` unless some kept vector is `<=` it; drops kept vectors
/// it improves on. Returns whether it was inserted.
fn pareto_insert<T>(kept: &mut Vec<(Vec<u16>, T)>, candidate: Vec<u16>, payload: T) -> bool {
    if kept.iter().any(|(k, _)| dominates(k, &candidate)) {
        return false;
    }
    kept.retain(|(k, _)| !dominates(&candidate, k));
    kept.push((candidate, payload));
    true
}

/// Multisets of values in `1..=max` summing to `total`, as non-increasing
/// vectors, skipping any value in `banned`.
fn partitions(total: usize, max: usize, banned: &[u8]) -> Vec<Vec<u8>> {
    fn go(total: usize, max: usize, banned: &[u8], cur: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if total == 0 {
            out.push(cur.clone());
            return;
        }
        for v in (1..=max.min(total)).rev() {
            if banned.contains(&(v as u8)) {
                continue;
            }
            cur.push(v as u8);
            go(total - v, v, banned, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(total, max, banned, &mut Vec::new(), &mut out);
    out
}

/// Distinct sub-multisets of a non-increasing vector, each non-increasing.
fn sub_multisets(set: &[u8]) -> Vec<Vec<u8>> {
    let mut groups: Vec<(u8, usize)> = Vec::new();
    for &v in set {
        match groups.last_mut() {
            Some((g, n)) if *g == v => *n += 1,
            _ => groups.push((v, 1)),
        }
    }
    let mut out = vec![Vec::new()];
    for (v, n) in groups {
        let mut next = Vec::new();
        for base in &out {
            for take in 0..=n {
                let mut s = base.clone();
                s.extend(std::iter::repeat_n(v, take));
                next.push(s);
            }
        }
        out = next;
    }
    out
}

/// `a \ b` for non-increasing multisets with `b` contained in `a`.
fn difference(a: &[u8], b: &[u8]) -> Vec<u8> {
    let mut out = Vec::new();
    let mut j = 0;
    for &v in a {
        if j < b.len() && b[j] == v {
            j += 1;
        } else {
            out.push(v);
        }
    }
    out
}

fn union(a: &[u8], b: &[u8]) -> Vec<u8> {
    let mut out: Vec<u8> = a.iter().chain(b).copied().collect();
    out.sort_unstable_by(|x, y| y.cmp(x));
    out
}

/// Link to the entry a sweep entry was reached from, plus the values kept
/// open across the boundary.
#[derive(Clone, Debug)]
struct Back {
    state: usize,
    entry: usize,
    kept: Vec<u8>,
}

/// Count vectors reaching one open-value multiset, each with its origin.
type Entries = Vec<(Vec<u16>, Option<Back>)>;

type Layer = Vec<(Vec<u8>, Entries)>;

/// Pareto-minimal count vectors of one row, with enough history to rebuild a
/// segmentation for each.
struct RowFrontier {
    /// One layer per boundary: before column 0, ..., after the last column.
    layers: Vec<Layer>,
}

impl RowFrontier {
    fn build(row: &[u64], h: usize, deadline: Option<Instant>) -> Option<Self> {
        let mut layers: Vec<Layer> = vec![vec![(Vec::new(), vec![(vec![0; h], None)])]];
        for &target in row.iter().chain(std::iter::once(&0)) {
            let target = target as usize;
            let prev = layers.last().expect("initial layer");
            let mut next: BTreeMap<Vec<u8>, Entries> = BTreeMap::new();
            for (si, (open, entries)) in prev.iter().enumerate() {
                if expired(deadline) {
                    return None;
                }
                for kept in sub_multisets(open) {
                    let kept_sum: usize = kept.iter().map(|&v| v as usize).sum();
                    if kept_sum > target {
                        continue;
                    }
                    let closed = difference(open, &kept);
                    for fresh in partitions(target - kept_sum, h, &closed) {
                        let state = union(&kept, &fresh);
                        let slot = next.entry(state).or_default();
                        for (ei, (counts, _)) in entries.iter().enumerate() {
                            let mut counts = counts.clone();
                            for &v in &fresh {
                                counts[v as usize - 1] += 1;
                            }
                            let back = Back {
                                state: si,
                                entry: ei,
                                kept: kept.clone(),
                            };
                            pareto_insert(slot, counts, Some(back));
                        }
                    }
                }
            }
            layers.push(next.into_iter().collect());
        }
        Some(RowFrontier { layers })
    }

    /// Count vectors of the finished row (its final state is empty).
    fn vectors(&self) -> impl Iterator<Item = &[u16]> {
        let last = self.layers.last().expect("at least one layer");
        debug_assert_eq!(last.len(), 1);
        last[0].1.iter().map(|(c, _)| c.as_slice())
    }

    fn reconstruct(&self, entry: usize) -> RowSegmentation {
        // Walk back to collect (open multiset, kept) per boundary.
        let mut path: Vec<(&[u8], &[u8])> = Vec::new();
        let (mut state, mut entry) = (0, entry);
        for layer in self.layers.iter().rev() {
            let (open, entries) = &layer[state];
            match &entries[entry].1 {
                Some(back) => {
                    path.push((open, &back.kept));
                    state = back.state;
                    entry = back.entry;
                }
                None => path.push((open, &[])),
            }
        }
        path.reverse();
        // path[b] is the state at boundary b (before column b); path[b].1 is
        // what stayed open from boundary b-1.
        let mut out = RowSegmentation::default();
        let mut open: Vec<(u8, usize)> = Vec::new();
        for (b, window) in path.windows(2).enumerate() {
            let (prev_open, _) = window[0];
            let (now_open, kept) = window[1];
            let closed = difference(prev_open, kept);
            for v in closed {
                let at = open
                    .iter()
                    .rposition(|&(w, _)| w == v)
                    .expect("closing an open value");
                let (_, start) = open.remove(at);
                out.push(RowSegment::new(start, b - 1, u64::from(v)));
            }
            for v in difference(now_open, kept) {
                open.push((v, b));
            }
        }
        debug_assert!(open.is_empty());
        out
    }
}

/// Chooses one frontier vector per row minimising `sum_v max_i`. Returns
/// `None` on timeout, `Some(None)` if nothing beats `bound`.
fn combine_rows(
    frontiers: &[RowFrontier],
    h: usize,
    bound: usize,
    deadline: Option<Instant>,
) -> Option<Option<Vec<usize>>> {
    let mut order: Vec<usize> = (0..frontiers.len()).collect();
    order.sort_by_key(|&i| (frontiers[i].vectors().count(), i));

    let mut states: Vec<(Vec<u16>, Vec<usize>)> = vec![(vec![0; h], Vec::new())];
    for &row in &order {
        let mut next: Vec<(Vec<u16>, Vec<usize>)> = Vec::new();
        for (maxes, picks) in &states {
            if expired(deadline) {
                return None;
            }
            for (k, v) in frontiers[row].vectors().enumerate() {
                let merged: Vec<u16> = maxes.iter().zip(v).map(|(a, b)| *a.max(b)).collect();
                if merged.iter().map(|&x| x as usize).sum::<usize>() >= bound {
                    continue;
                }
                let mut picks = picks.clone();
                picks.push(k);
                pareto_insert(&mut next, merged, picks);
            }
        }
        if next.is_empty() {
            return Some(None);
        }
        states = next;
    }
    let best = states
        .into_iter()
        .min_by_key(|(m, _)| m.iter().map(|&x| x as usize).sum::<usize>())
        .expect("non-empty");
    let mut choice = vec![0; frontiers.len()];
    for (&row, &k) in order.iter().zip(&best.1) {
        choice[row] = k;
    }
    Some(Some(choice))
}

/// Largest instance [`brute_force_opt`] accepts.
pub const BRUTE_FORCE_MAX_CELLS: usize = 12;
pub const BRUTE_FORCE_MAX_H: u64 = 3;

/// Optimum by exhaustive search over segment matrices.
pub fn brute_force_opt(matrix: &IntensityMatrix) -> Result<usize> {
    let (rows, cols) = matrix.dims();
    if rows * cols > BRUTE_FORCE_MAX_CELLS || matrix.max_value() > BRUTE_FORCE_MAX_H {
        return Err(Error::LimitsExceeded(format!(
            "brute force handles at most {BRUTE_FORCE_MAX_CELLS} cells with maximum \
             {BRUTE_FORCE_MAX_H}, got {rows}x{cols} with maximum {}",
            matrix.max_value()
        )));
    }
    let mut search = Brute {
        rows,
        cols,
        failed: HashSet::new(),
    };
    let mut residual = matrix.cells().to_vec();
    let mut budget = lower_bound(matrix);
    loop {
        if search.dfs(&mut residual, budget) {
            return Ok(budget);
        }
        budget += 1;
    }
}

struct Brute {
    rows: usize,
    cols: usize,
    failed: HashSet<(Vec<u64>, usize)>,
}

impl Brute {
    fn dfs(&mut self, residual: &mut [u64], budget: usize) -> bool {
        let Some(anchor) = residual.iter().position(|&v| v > 0) else {
            return true;
        };
        let residual_matrix =
            IntensityMatrix::new(self.rows, self.cols, residual.to_vec()).expect("valid residual");
        if lower_bound(&residual_matrix) > budget {
            return false;
        }
        if self.failed.contains(&(residual.to_vec(), budget)) {
            return false;
        }
        let (row, col) = (anchor / self.cols, anchor % self.cols);
        for value in 1..=residual[anchor] {
            let mut candidates = Vec::new();
            self.candidates(
                residual,
                value,
                (row, col),
                row,
                &mut Vec::new(),
                &mut candidates,
            );
            for seg in candidates {
                self.apply(residual, value, &seg, false);
                let ok = self.dfs(residual, budget - 1);
                self.apply(residual, value, &seg, true);
                if ok {
                    return true;
                }
            }
        }
        self.failed.insert((residual.to_vec(), budget));
        false
    }

    /// Every segment matrix of `value` whose interval in `row` starts at
    /// `col`; rows above `row` are zero and never used.
    fn candidates(
        &self,
        residual: &[u64],
        value: u64,
        (row, col): (usize, usize),
        r: usize,
        cur: &mut Vec<(usize, usize, usize)>,
        out: &mut Vec<Vec<(usize, usize, usize)>>,
    ) {
        if r == self.rows {
            out.push(cur.clone());
            return;
        }
        if r != row {
            self.candidates(residual, value, (row, col), r + 1, cur, out);
        }
        let starts = if r == row { col..col + 1 } else { 0..self.cols };
        for l in starts {
            let mut e = l;
            while e < self.cols && residual[r * self.cols + e] >= value {
                cur.push((r, l, e));
                self.candidates(residual, value, (row, col), r + 1, cur, out);
                cur.pop();
                e += 1;
            }
        }
    }

    fn apply(&self, residual: &mut [u64], value: u64, seg: &[(usize, usize, usize)], undo: bool) {
        for &(r, l, e) in seg {
            for c in l..=e {
                let cell = &mut residual[r * self.cols + c];
                if undo {
                    *cell += value;
                } else {
                    *cell -= value;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::verify;

    fn m(rows: &[&[u64]]) -> IntensityMatrix {
        IntensityMatrix::from_rows(rows.iter().copied()).unwrap()
    }

    fn wide() -> ExactLimits {
        ExactLimits {
            max_h: 16,
            time_budget: None,
            ..ExactLimits::default()
        }
    }

    fn opt(t: &IntensityMatrix) -> usize {
        let out = exact_opt(t, wide()).unwrap();
        assert!(out.is_optimal());
        assert!(verify(t, &out.segmentation).unwrap().is_ok());
        out.size()
    }

    #[test]
    fn documented_examples() {
        assert_eq!(opt(&m(&[&[1]])), 1);
        assert_eq!(opt(&m(&[&[4, 8, 9, 8, 4]])), 3);
        assert!(opt(&m(&[&[1, 0, 1], &[2, 0, 2]])) >= 3);
        assert_eq!(opt(&IntensityMatrix::zeros(2, 3).unwrap()), 0);
    }

    #[test]
    fn brute_force_examples() {
        assert_eq!(brute_force_opt(&m(&[&[1, 1]])).unwrap(), 1);
        assert_eq!(brute_force_opt(&m(&[&[1, 2, 1]])).unwrap(), 2);
        let t = m(&[&[2, 1], &[1, 2]]);
        assert_eq!(brute_force_opt(&t).unwrap(), opt(&t));
        assert!(brute_force_opt(&m(&[&[4]])).is_err());
    }

    #[test]
    fn refuses_outside_limits() {
        let t = m(&[&[7]]);
        assert!(matches!(
            exact_opt(&t, ExactLimits::default()),
            Err(Error::LimitsExceeded(_))
        ));
    }

    #[test]
    fn row_frontier_of_small_row() {
        // [2, 3, 1]: {2,1,1}-style splits; the frontier must hold (1,1,0),
        // e.g. 2 on [0..1] plus 1 on [1..2].
        let f = RowFrontier::build(&[2, 3, 1], 3, None).unwrap();
        let vecs: Vec<Vec<u16>> = f.vectors().map(<[u16]>::to_vec).collect();
        assert!(vecs.contains(&vec![1, 1, 0]));
        for (k, v) in vecs.iter().enumerate() {
            let segs = f.reconstruct(k);
            segs.check_against(&[2, 3, 1]).unwrap();
            for value in 1..=3u64 {
                assert_eq!(segs.count(value), v[value as usize - 1] as usize);
            }
        }
    }

    #[test]
    fn helpers() {
        assert_eq!(sub_multisets(&[2, 1, 1]).len(), 6);
        assert_eq!(difference(&[3, 2, 2, 1], &[2, 1]), vec![3, 2]);
        assert_eq!(partitions(4, 4, &[]).len(), 5);
        assert_eq!(partitions(4, 4, &[1]).len(), 2);
    }

    #[test]
    fn timeout_reports_unknown() {
        let t = m(&[&[3, 1, 4, 1, 5, 2], &[6, 2, 5, 3, 5, 1]]);
        let limits = ExactLimits {
            time_budget: Some(Duration::ZERO),
            ..ExactLimits::default()
        };
        let out = exact_opt(&t, limits).unwrap();
        if !out.is_optimal() {
            assert_eq!(out.opt(), None);
        }
        assert!(verify(&t, &out.segmentation).unwrap().is_ok());
    }
}
