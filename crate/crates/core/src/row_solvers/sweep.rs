use crate::matrix::RowSegment;

use super::RowSegmentation;

/// Left-to-right stack sweep.
///
/// An increase of `d` opens one segment of value `d`. A decrease of `d`
/// closes open segments from the top of the stack until `d` is used up; if
/// the last one only partly closes, the closed part becomes its own segment
/// and the rest stays open with its original start column.
///
/// Emits at most `markers(row)` segments, each valued at most the
/// row-difference of the row.
pub fn sweep_single_row(row: &[u64]) -> RowSegmentation {
    let mut open: Vec<(usize, u64)> = Vec::new();
    let mut out = RowSegmentation::default();
    let mut prev = 0;
    for (col, cur) in row.iter().copied().chain(std::iter::once(0)).enumerate() {
        if cur > prev {
            open.push((col, cur - prev));
        } else if cur < prev {
            let mut drop = prev - cur;
            while drop > 0 {
                let top = open
                    .last_mut()
                    .expect("open segments cover the previous value");
                if top.1 <= drop {
                    drop -= top.1;
                    out.push(RowSegment::new(top.0, col - 1, top.1));
                    open.pop();
                } else {
                    out.push(RowSegment::new(top.0, col - 1, drop));
                    top.1 -= drop;
                    drop = 0;
                }
            }
        }
        prev = cur;
    }
    debug_assert!(open.is_empty());
    out
}
