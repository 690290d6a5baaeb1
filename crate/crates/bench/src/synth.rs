//! Seeded random stable SISO models.

use balbound::StateSpaceModel;
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{BenchError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSpec {
    pub n: usize,
    pub seed: u64,
    /// Real parts of the eigenvalues lie in `[re_min, re_max]`.
    pub re_min: f64,
    pub re_max: f64,
    /// Imaginary parts of complex pairs lie in `(0, im_max]`.
    pub im_max: f64,
    /// Expected fraction of eigenvalues in complex pairs.
    pub complex_fraction: f64,
}

impl SyntheticSpec {
    pub fn new(n: usize, seed: u64) -> Self {
        Self {
            n,
            seed,
            re_min: -5.0,
            re_max: -0.1,
            im_max: 5.0,
            complex_fraction: 0.5,
        }
    }
}

/// `A = Q D Qᵀ` with `D` real block diagonal carrying the prescribed
/// spectrum and `Q` a random orthogonal matrix; `b`, `c` uniform in
/// `[-1, 1]`, `d = 0`. Identical seeds give bitwise-identical models.
pub fn synthesize_model(spec: &SyntheticSpec) -> Result<StateSpaceModel> {
    if spec.n == 0 {
        return Err(BenchError::Config("`synth.n` must be positive".into()));
    }
    if !(spec.re_min <= spec.re_max && spec.re_max < 0.0 && spec.re_min.is_finite()) {
        return Err(BenchError::Config(format!(
            "spectral band [{}, {}] must lie strictly in the left half-plane",
            spec.re_min, spec.re_max
        )));
    }
    if !(0.0..=1.0).contains(&spec.complex_fraction) || !(spec.im_max > 0.0) {
        return Err(BenchError::Config(
            "`synth.complex_fraction` must be in [0, 1] and `synth.im_max` positive".into(),
        ));
    }
    let n = spec.n;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut d = DMatrix::zeros(n, n);
    let mut i = 0;
    while i < n {
        let re = rng.gen_range(spec.re_min..=spec.re_max);
        if i + 1 < n && rng.gen_bool(spec.complex_fraction) {
            let im = spec.im_max * (1.0 - rng.gen::<f64>());
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
    let g = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
    let q = g.qr().q();
    let a = &q * d * q.transpose();
    let b = DVector::from_fn(n, |_, _| rng.gen_range(-1.0..1.0));
    let c = DVector::from_fn(n, |_, _| rng.gen_range(-1.0..1.0));
    Ok(StateSpaceModel::new(a, b, c, 0.0)?)
}
