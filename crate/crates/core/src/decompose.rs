//! Base-`b` digit splitting of a target matrix.

use crate::error::{Error, Result};
use crate::matrix::{IntensityMatrix, Segmentation};

/// Digit layers `P_0..P_k` with `T = sum b^l * P_l`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DigitStack {
    base: u64,
    layers: Vec<IntensityMatrix>,
}

impl DigitStack {
    pub fn base(&self) -> u64 {
        self.base
    }

    pub fn layers(&self) -> &[IntensityMatrix] {
        &self.layers
    }

    /// `b^l` for layer `l`.
    pub fn scale(&self, layer: usize) -> u64 {
        self.base.pow(layer as u32)
    }

    /// Rebuilds the target cell by cell.
    pub fn reconstruct(&self) -> Result<IntensityMatrix> {
        let first = &self.layers[0];
        let mut cells = vec![0u64; first.cells().len()];
        for (l, layer) in self.layers.iter().enumerate() {
            let scale = self.scale(l);
            for (acc, &digit) in cells.iter_mut().zip(layer.cells()) {
                *acc += scale * digit;
            }
        }
        IntensityMatrix::new(first.rows(), first.cols(), cells)
    }
}

/// Number of base-`b` digits of `h`; zero has one digit.
pub fn digit_count(h: u64, base: u64) -> usize {
    let mut n = 1;
    let mut rest = h / base;
    while rest > 0 {
        n += 1;
        rest /= base;
    }
    n
}

/// `ceil(log_b x)`, with `x <= 1` mapping to 0.
pub fn ceil_log(x: u64, base: u64) -> u32 {
    let mut k = 0;
    let mut power: u128 = 1;
    while power < u128::from(x) {
        power *= u128::from(base);
        k += 1;
    }
    k
}

/// Splits `matrix` into its base-`base` digit layers. The number of layers is
/// the digit count of the largest entry.
pub fn split_by_base(matrix: &IntensityMatrix, base: u64) -> Result<DigitStack> {
    if base < 2 {
        return Err(Error::Parameter(format!(
            "base must be at least 2, got {base}"
        )));
    }
    let count = digit_count(matrix.max_value(), base);
    let mut layers = Vec::with_capacity(count);
    let mut rest: Vec<u64> = matrix.cells().to_vec();
    for _ in 0..count {
        let digits: Vec<u64> = rest.iter().map(|v| v % base).collect();
        rest.iter_mut().for_each(|v| *v /= base);
        layers.push(IntensityMatrix::new(matrix.rows(), matrix.cols(), digits)?);
    }
    debug_assert!(rest.iter().all(|&v| v == 0));
    Ok(DigitStack { base, layers })
}

/// Multiplies each layer's segment values by its scale and concatenates.
pub fn combine_scaled(
    rows: usize,
    cols: usize,
    layers: impl IntoIterator<Item = (u64, Segmentation)>,
) -> Result<Segmentation> {
    let mut out = Segmentation::empty(rows, cols);
    for (scale, seg) in layers {
        if seg.dims() != (rows, cols) {
            return Err(Error::DimensionMismatch {
                expected_rows: rows,
                expected_cols: cols,
                rows: seg.dims().0,
                cols: seg.dims().1,
            });
        }
        for s in seg.segments() {
            out.push(s.scaled(scale)?)?;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{rho, verify, SegmentMatrix};

    fn m(rows: &[&[u64]]) -> IntensityMatrix {
        IntensityMatrix::from_rows(rows.iter().copied()).unwrap()
    }

    #[test]
    fn base_three_digits_of_five() {
        let stack = split_by_base(&m(&[&[5]]), 3).unwrap();
        assert_eq!(stack.layers(), &[m(&[&[2]]), m(&[&[1]])]);
    }

    #[test]
    fn adversarial_row_layers() {
        let stack = split_by_base(&m(&[&[4, 8, 9, 8, 4]]), 3).unwrap();
        assert_eq!(
            stack.layers(),
            &[
                m(&[&[1, 2, 0, 2, 1]]),
                m(&[&[1, 2, 0, 2, 1]]),
                m(&[&[0, 0, 1, 0, 0]])
            ]
        );
        for layer in stack.layers() {
            assert!(rho(layer) <= 6);
        }
    }

    #[test]
    fn zero_matrix_has_one_zero_layer() {
        let zero = IntensityMatrix::zeros(2, 3).unwrap();
        let stack = split_by_base(&zero, 2).unwrap();
        assert_eq!(stack.layers(), &[zero]);
    }

    #[test]
    fn rejects_small_base() {
        assert!(split_by_base(&m(&[&[1]]), 1).is_err());
    }

    #[test]
    fn logs_and_digits() {
        assert_eq!(digit_count(0, 3), 1);
        assert_eq!(digit_count(8, 3), 2);
        assert_eq!(digit_count(9, 3), 3);
        assert_eq!(ceil_log(1, 2), 0);
        assert_eq!(ceil_log(9, 3), 2);
        assert_eq!(ceil_log(10, 3), 3);
        assert_eq!(ceil_log(25, 2), 5);
    }

    #[test]
    fn combine_examples() {
        let single =
            |v| Segmentation::new(1, 1, vec![SegmentMatrix::single(0, 0, 0, v).unwrap()]).unwrap();
        let out = combine_scaled(1, 1, [(1, single(2)), (3, single(1))]).unwrap();
        let values: Vec<u64> = out.segments().iter().map(|s| s.value()).collect();
        assert_eq!(values, vec![2, 3]);
        assert!(verify(&m(&[&[5]]), &out).unwrap().is_ok());

        let same = combine_scaled(1, 1, [(1, single(2))]).unwrap();
        assert_eq!(same, single(2));

        assert!(combine_scaled(2, 2, []).unwrap().is_empty());
    }
}
