use proptest::collection::vec;
use proptest::prelude::*;

use segmin::algorithms::{alg_base, alg_log_d, Algorithm};
use segmin::decompose::{combine_scaled, split_by_base};
use segmin::exact::{brute_force_opt, exact_opt, ExactLimits};
use segmin::generators::gen_random;
use segmin::matrix::{markers, row_difference};
use segmin::packing::pack_rows;
use segmin::row_solvers::{
    base4_additive_constants, exact_single_row, segment_row_base3, segment_row_base4,
    sweep_single_row, transform_to_bounded, ExactRowLimits, ExactRowSolver, RowSegmentation,
    SweepSolver,
};
use segmin::{lower_bound, verify, IntensityMatrix, RowSegment, SegmentMatrix, Segmentation};

fn matrix(max_dim: usize, h: u64) -> impl Strategy<Value = IntensityMatrix> {
    (1..=max_dim, 1..=max_dim).prop_flat_map(move |(m, n)| {
        vec(0..=h, m * n).prop_map(move |cells| IntensityMatrix::new(m, n, cells).unwrap())
    })
}

fn row(max_len: usize, h: u64) -> impl Strategy<Value = Vec<u64>> {
    vec(0..=h, 0..=max_len)
}

/// Independent reference: pack count by brute counting.
fn expected_pack_size(per_row: &[RowSegmentation]) -> usize {
    let values: std::collections::BTreeSet<u64> = per_row
        .iter()
        .flat_map(|r| r.segments().iter().map(|s| s.value))
        .collect();
    values
        .into_iter()
        .map(|v| per_row.iter().map(|r| r.count(v)).max().unwrap_or(0))
        .sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn split_then_combine_reconstructs(t in matrix(6, 200), base in 2u64..=4) {
        let stack = split_by_base(&t, base).unwrap();
        prop_assert_eq!(stack.reconstruct().unwrap(), t.clone());
        for layer in stack.layers() {
            prop_assert!(layer.max_value() < base);
        }
        // Unit segments per cell and layer, scaled back, must sum to T.
        let layers = stack.layers().iter().enumerate().map(|(l, layer)| {
            let mut seg = Segmentation::empty(t.rows(), t.cols());
            for r in 0..t.rows() {
                for c in 0..t.cols() {
                    if layer.get(r, c) > 0 {
                        seg.push(SegmentMatrix::single(r, c, c, layer.get(r, c)).unwrap()).unwrap();
                    }
                }
            }
            (stack.scale(l), seg)
        });
        let combined = combine_scaled(t.rows(), t.cols(), layers).unwrap();
        prop_assert!(verify(&t, &combined).unwrap().is_ok());
    }

    #[test]
    fn sweep_is_bounded_by_markers(r in row(14, 30)) {
        let s = sweep_single_row(&r);
        s.check_against(&r).unwrap();
        prop_assert!(s.len() <= markers(&r));
        prop_assert!(s.max_value() <= row_difference(&r));
    }

    #[test]
    fn transform_never_grows(r in row(12, 20)) {
        // One segment per non-zero cell, valued up to h and often above D.
        let input: RowSegmentation = r
            .iter()
            .enumerate()
            .filter(|(_, &v)| v > 0)
            .map(|(c, &v)| RowSegment::new(c, c, v))
            .collect();
        let out = transform_to_bounded(&r, &input).unwrap();
        out.check_against(&r).unwrap();
        prop_assert!(out.len() <= input.len());
        prop_assert!(out.max_value() <= row_difference(&r));
    }

    #[test]
    fn base3_rows_meet_their_bounds(r in row(30, 2)) {
        let s = segment_row_base3(&r).unwrap();
        s.check_against(&r).unwrap();
        let rho = markers(&r);
        prop_assert!(s.count(1) <= rho / 2);
        prop_assert!(s.count(2) * 4 <= rho + 2);
    }

    #[test]
    fn base4_rows_meet_their_bounds(r in row(40, 3)) {
        let s = segment_row_base4(&r).unwrap();
        s.check_against(&r).unwrap();
        let rho = markers(&r) as u64;
        let c = base4_additive_constants();
        for v in 1..=3u64 {
            prop_assert!(2 * v * s.count(v) as u64 <= rho + 2 * v * c[v as usize - 1]);
        }
    }

    #[test]
    fn packing_count_identity(
        rows in vec(vec((0usize..6, 0usize..6, 1u64..4), 0..6), 1..6)
    ) {
        let per_row: Vec<RowSegmentation> = rows
            .iter()
            .map(|segs| {
                segs.iter()
                    .map(|&(a, b, v)| RowSegment::new(a.min(b), a.max(b), v))
                    .collect()
            })
            .collect();
        let packed = pack_rows(&per_row, 6).unwrap();
        prop_assert_eq!(packed.size(), expected_pack_size(&per_row));
    }

    #[test]
    fn every_pipeline_verifies(t in matrix(7, 40)) {
        let lb = lower_bound(&t);
        for alg in Algorithm::ALL {
            let s = alg.run(&t).unwrap();
            prop_assert!(verify(&t, &s).unwrap().is_ok(), "{} failed", alg);
            prop_assert!(s.size() >= lb);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn exact_row_dominates_other_solvers(r in row(10, 4)) {
        let best = exact_single_row(&r, None, ExactRowLimits::default()).unwrap();
        best.check_against(&r).unwrap();
        prop_assert!(best.len() * 2 >= markers(&r));
        prop_assert!(best.len() <= sweep_single_row(&r).len());
        if r.iter().all(|&v| v <= 3) {
            prop_assert!(best.len() <= segment_row_base4(&r).unwrap().len());
        }
        if r.iter().all(|&v| v <= 2) {
            prop_assert!(best.len() <= segment_row_base3(&r).unwrap().len());
        }
    }

    #[test]
    fn log_d_with_exact_rows_verifies(t in matrix(4, 5)) {
        let exact = ExactRowSolver { limits: ExactRowLimits::default() };
        let s = alg_log_d(&t, &exact, 2).unwrap();
        prop_assert!(verify(&t, &s).unwrap().is_ok());
    }
}

#[test]
fn exact_matches_brute_force_on_tiny_instances() {
    let shapes = [
        (1, 4),
        (2, 3),
        (3, 2),
        (2, 4),
        (4, 3),
        (3, 3),
        (1, 8),
        (2, 6),
    ];
    for seed in 0..200u64 {
        let (m, n) = shapes[seed as usize % shapes.len()];
        let t = gen_random(m, n, 1 + seed % 3, seed).unwrap();
        let exact = exact_opt(&t, ExactLimits::default()).unwrap();
        assert!(exact.is_optimal());
        assert!(verify(&t, &exact.segmentation).unwrap().is_ok());
        assert_eq!(
            exact.size(),
            brute_force_opt(&t).unwrap(),
            "seed {seed}: {t:?}"
        );
    }
}

#[test]
fn exact_sits_between_lower_bound_and_pipelines() {
    for seed in 0..100u64 {
        let t = gen_random(1 + seed as usize % 5, 1 + seed as usize % 7, seed % 7, seed).unwrap();
        let exact = exact_opt(&t, ExactLimits::default()).unwrap();
        assert!(exact.is_optimal());
        assert!(lower_bound(&t) <= exact.size());
        for alg in Algorithm::ALL {
            assert!(exact.size() <= alg.run(&t).unwrap().size());
        }
        let again = exact_opt(&t, ExactLimits::default()).unwrap();
        assert_eq!(again.segmentation, exact.segmentation);
    }
}

#[test]
fn base_pipelines_accept_every_base() {
    let t = gen_random(5, 5, 50, 9).unwrap();
    for b in 2..=4 {
        assert!(verify(&t, &alg_base(&t, b).unwrap()).unwrap().is_ok());
    }
    assert!(alg_log_d(&t, &SweepSolver, 3).is_ok());
}
