#![allow(dead_code)]

use balbound::{SampledSignal, StateSpaceModel, TimeGrid};
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform_vec<R: Rng>(rng: &mut R, n: usize, lo: f64, hi: f64) -> DVector<f64> {
    DVector::from_fn(n, |_, _| rng.gen_range(lo..hi))
}

pub fn random_orthogonal<R: Rng>(rng: &mut R, n: usize) -> DMatrix<f64> {
    let m = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
    m.qr().q()
}

/// Real block-diagonal spectrum in `[re_min, re_max]` (roughly a third
/// complex pairs), mild upper coupling, conjugated by a random orthogonal
/// matrix.
pub fn stable_matrix<R: Rng>(rng: &mut R, n: usize, re_min: f64, re_max: f64) -> DMatrix<f64> {
    let mut d = DMatrix::zeros(n, n);
    let mut i = 0;
    while i < n {
        let re = rng.gen_range(re_min..re_max);
        if i + 1 < n && rng.gen_bool(0.35) {
            let im = rng.gen_range(0.2..4.0);
            d[(i, i)] = re;
            d[(i + 1, i + 1)] = re;
            d[(i, i + 1)] = im;
            d[(i + 1, i)] = -im;
            i += 2;
        } else {
            d[(i, i)] = re;
            i += 1;
        }
    }
    for r in 0..n {
        for c in r + 2..n {
            d[(r, c)] = 0.3 * rng.gen_range(-1.0..1.0);
        }
    }
    let q = random_orthogonal(rng, n);
    &q * d * q.transpose()
}

pub fn random_model<R: Rng>(rng: &mut R, n: usize) -> StateSpaceModel {
    let a = stable_matrix(rng, n, -5.0, -0.2);
    let b = uniform_vec(rng, n, -1.0, 1.0);
    let c = uniform_vec(rng, n, -1.0, 1.0);
    let d = if rng.gen_bool(0.5) {
        0.0
    } else {
        rng.gen_range(-0.5..0.5)
    };
    StateSpaceModel::new(a, b, c, d).unwrap()
}

/// Sum of a few sinusoids with random (non-harmonic) frequencies below
/// `f_max` rad/s plus an offset.
pub fn band_limited_input<R: Rng>(rng: &mut R, grid: TimeGrid, f_max: f64) -> SampledSignal {
    let terms: Vec<(f64, f64, f64)> = (0..4)
        .map(|_| {
            (
                rng.gen_range(-1.0..1.0),
                rng.gen_range(0.0..f_max),
                rng.gen_range(0.0..std::f64::consts::TAU),
            )
        })
        .collect();
    let offset = rng.gen_range(-0.5..0.5);
    SampledSignal::from_fn(grid, move |t| {
        offset
            + terms
                .iter()
                .map(|(a, w, p)| a * (w * t + p).sin())
                .sum::<f64>()
    })
}

pub fn rel_diff(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}
