//! Instance generators. All randomness comes from a seeded ChaCha8 stream, so
//! a `(params, seed)` pair yields the same matrix on every platform.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::matrix::{IntensityMatrix, SegmentMatrix, Segmentation, MAX_CELL_VALUE};

/// Parameters of the Gaussian-peak generator.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianParams {
    pub rows: usize,
    pub cols: usize,
    pub num_peaks: usize,
    /// Amplitudes are drawn uniformly from this closed range.
    pub amp_range: (f64, f64),
    /// Spread in cells; defaults to `min(rows, cols) / 6`.
    pub sigma: Option<f64>,
    /// Multiplier applied to every peak.
    pub gain: f64,
    /// Peak centres are drawn from the central box covering this fraction of
    /// each dimension.
    pub center_fraction: f64,
    pub seed: u64,
}

impl GaussianParams {
    pub fn new(rows: usize, cols: usize, seed: u64) -> Self {
        GaussianParams {
            rows,
            cols,
            num_peaks: 7,
            amp_range: (1.0, 25.0),
            sigma: None,
            gain: 2.0,
            center_fraction: 0.5,
            seed,
        }
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
            .unwrap_or_else(|| self.rows.min(self.cols) as f64 / 6.0)
    }
}

/// Sum of isotropic Gaussian bumps, each `gain * A / (2 pi)` at its centre
/// and falling off as `exp(-r^2 / (2 sigma^2))` with `r` in cells, evaluated
/// at cell centres and floored.
pub fn gen_gaussian(p: &GaussianParams) -> Result<IntensityMatrix> {
    if p.rows == 0 || p.cols == 0 {
        return Err(Error::Parameter(
            "matrix dimensions must be positive".into(),
        ));
    }
    let sigma = p.sigma();
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::Parameter(format!(
            "sigma must be positive, got {sigma}"
        )));
    }
    let (lo, hi) = p.amp_range;
    if !(0.0 <= lo && lo <= hi && hi.is_finite()) {
        return Err(Error::Parameter(format!(
            "bad amplitude range [{lo}, {hi}]"
        )));
    }
    if !(0.0..=1.0).contains(&p.center_fraction) || !(p.gain >= 0.0 && p.gain.is_finite()) {
        return Err(Error::Parameter(
            "center fraction must lie in [0, 1] and gain must be non-negative".into(),
        ));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let centre = |len: usize, rng: &mut ChaCha8Rng| {
        let span = len as f64 * p.center_fraction;
        let start = (len as f64 - span) / 2.0;
        start + rng.gen::<f64>() * span
    };
    let peaks: Vec<(f64, f64, f64)> = (0..p.num_peaks)
        .map(|_| {
            let amp = lo + rng.gen::<f64>() * (hi - lo);
            let r = centre(p.rows, &mut rng);
            let c = centre(p.cols, &mut rng);
            (amp, r, c)
        })
        .collect();

    let two_var = 2.0 * sigma * sigma;
    let mut cells = Vec::with_capacity(p.rows * p.cols);
    for i in 0..p.rows {
        for j in 0..p.cols {
            let (y, x) = (i as f64 + 0.5, j as f64 + 0.5);
            let total: f64 = peaks
                .iter()
                .map(|&(amp, r, c)| {
                    let d2 = (y - r).powi(2) + (x - c).powi(2);
                    p.gain * amp / (2.0 * PI) * (-d2 / two_var).exp()
                })
                .sum();
            cells.push((total.floor() as u64).min(MAX_CELL_VALUE));
        }
    }
    IntensityMatrix::new(p.rows, p.cols, cells)
}

fn check_base(b: u64) -> Result<()> {
    if b < 2 {
        return Err(Error::Parameter(format!(
            "base must be at least 2, got {b}"
        )));
    }
    Ok(())
}

fn repunit(b: u64, k: u32) -> Result<u64> {
    (0..k)
        .try_fold(0u64, |acc, l| acc.checked_add(b.checked_pow(l)?))
        .filter(|&r| r.checked_mul(b).is_some_and(|top| top <= MAX_CELL_VALUE))
        .ok_or_else(|| Error::Parameter(format!("base {b} with {k} layers overflows")))
}

/// The single row `sum_{l<k} b^l (1 2 .. b-1 0 b-1 .. 2 1) + b^k e_b`, on
/// which the base-`b` pipeline needs `2(b-1)k + 1` segments while `b`
/// suffice.
pub fn gen_adversarial(b: u64, k: u32) -> Result<IntensityMatrix> {
    check_base(b)?;
    if k == 0 {
        return Err(Error::Parameter("k must be at least 1".into()));
    }
    let unit = repunit(b, k)?;
    let n = 2 * b as usize - 1;
    let mid = b as usize - 1;
    let row: Vec<u64> = (0..n)
        .map(|c| {
            if c == mid {
                b.pow(k)
            } else {
                let step = if c < mid { c + 1 } else { n - c };
                step as u64 * unit
            }
        })
        .collect();
    IntensityMatrix::new(1, n, row)
}

/// The `b`-segment solution of [`gen_adversarial`]: nested intervals of the
/// repunit value plus a unit in the middle.
pub fn adversarial_witness(b: u64, k: u32) -> Result<Segmentation> {
    check_base(b)?;
    let unit = repunit(b, k)?;
    let n = 2 * b as usize - 1;
    let mid = b as usize - 1;
    let mut segs: Vec<SegmentMatrix> = (0..mid)
        .map(|i| SegmentMatrix::single(0, i, n - 1 - i, unit))
        .collect::<Result<_>>()?;
    segs.push(SegmentMatrix::single(0, mid, mid, 1)?);
    Segmentation::new(1, n, segs)
}

/// `(b-1) x (2 cols - 1)` matrix whose row `i` (1-based) holds `i` in every
/// other column, starting with the first.
pub fn gen_harmonic(b: u64, cols: usize) -> Result<IntensityMatrix> {
    check_base(b)?;
    if cols == 0 {
        return Err(Error::Parameter("cols must be at least 1".into()));
    }
    let width = 2 * cols - 1;
    let rows = (1..b).map(|i| {
        (0..width)
            .map(|c| if c % 2 == 0 { i } else { 0 })
            .collect::<Vec<_>>()
    });
    IntensityMatrix::from_rows(rows)
}

/// Independent uniform cells in `0..=h`.
pub fn gen_random(rows: usize, cols: usize, h: u64, seed: u64) -> Result<IntensityMatrix> {
    if rows == 0 || cols == 0 {
        return Err(Error::Parameter(
            "matrix dimensions must be positive".into(),
        ));
    }
    if h > MAX_CELL_VALUE {
        return Err(Error::Parameter(format!(
            "h must be at most {MAX_CELL_VALUE}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cells = (0..rows * cols).map(|_| rng.gen_range(0..=h)).collect();
    IntensityMatrix::new(rows, cols, cells)
}
