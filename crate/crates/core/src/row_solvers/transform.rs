use crate::error::Result;
use crate::matrix::row_difference;

use super::RowSegmentation;

/// Rewrites a row segmentation so that no segment ends right before another
/// one starts, which caps every value at the row-difference of the row.
///
/// A meeting pair `v1 on [a..i]`, `v2 on [i+1..c]` becomes `min(v1, v2)` on
/// `[a..c]` plus, when the values differ, the difference on the interval of
/// the larger one. The size never grows and the sum of values strictly
/// drops, so the loop terminates.
pub fn transform_to_bounded(
    row: &[u64],
    segmentation: &RowSegmentation,
) -> Result<RowSegmentation> {
    segmentation.check_against(row)?;
    let mut segs = segmentation.segments().to_vec();
    while let Some((x, y)) = meeting_pair(&segs) {
        let (left, right) = (segs[x], segs[y]);
        let low = left.value.min(right.value);
        segs[x].last = right.last;
        segs[x].value = low;
        if left.value > right.value {
            segs[y] = left;
            segs[y].value -= low;
        } else if right.value > left.value {
            segs[y].value -= low;
        } else {
            segs.remove(y);
        }
    }
    let out = RowSegmentation::new(segs);
    debug_assert!(out.max_value() <= row_difference(row));
    debug_assert!(out.check_against(row).is_ok());
    Ok(out)
}

fn meeting_pair(segs: &[crate::matrix::RowSegment]) -> Option<(usize, usize)> {
    segs.iter().enumerate().find_map(|(x, left)| {
        segs.iter()
            .position(|right| right.first == left.last + 1)
            .map(|y| (x, y))
    })
}
