use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::lti::{l2_norm, trapezoid, SampledSignal, TimeGrid};

/// Samples per harmonic required of the grid.
pub const MIN_POINTS_PER_ORDER: usize = 20;

/// Truncated Fourier series
/// `w(t) = λ₀ + Σ_{ℓ=1}^{K} λ_ℓ cos(2πℓt/T) + λ_{K+ℓ} sin(2πℓt/T)`
/// of a sampled input, with coefficients by trapezoidal quadrature.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierApproximation {
    pub k: usize,
    pub t_final: f64,
    /// `λ₀ … λ_{2K}`
    pub lambda: Vec<f64>,
    /// `‖w‖` from the coefficients.
    pub norm_wk: f64,
    /// Trapezoidal `‖u‖`.
    pub norm_u: f64,
    /// Trapezoidal `‖u − w‖` from the sampled difference.
    pub remainder_direct: f64,
}

/// `cos` and `sin` of `2πj/(m−1)` for `j = 0..m−1`; harmonic `ℓ` at node `k`
/// is entry `ℓk mod (m−1)`, so discrete orthogonality holds to round-off.
struct HarmonicTable {
    period: usize,
    cos: Vec<f64>,
    sin: Vec<f64>,
}

impl HarmonicTable {
    fn new(grid: &TimeGrid) -> Self {
        let period = grid.len() - 1;
        let (mut cos, mut sin) = (vec![0.0; period], vec![0.0; period]);
        for j in 0..period {
            let th = 2.0 * PI * j as f64 / period as f64;
            cos[j] = libm::cos(th);
            sin[j] = libm::sin(th);
        }
        Self { period, cos, sin }
    }

    #[inline]
    fn at(&self, harmonic: usize, node: usize) -> (f64, f64) {
        let j = (harmonic * node) % self.period;
        (self.cos[j], self.sin[j])
    }
}

pub fn fourier_approximation(u: &SampledSignal, k: usize) -> Result<FourierApproximation> {
    let grid = *u.grid();
    let m = grid.len();
    if k > 0 && m < MIN_POINTS_PER_ORDER * k {
        return Err(Error::UnderResolvedGrid { k, m });
    }
    let t = grid.t_final();
    let h = grid.step();
    let table = HarmonicTable::new(&grid);
    let vals = u.values();

    let mut lambda = vec![0.0; 2 * k + 1];
    lambda[0] = trapezoid(vals, h) / t;
    let mut wc = vec![0.0; m];
    let mut ws = vec![0.0; m];
    for l in 1..=k {
        for (node, &v) in vals.iter().enumerate() {
            let (c, s) = table.at(l, node);
            wc[node] = v * c;
            ws[node] = v * s;
        }
        lambda[l] = trapezoid(&wc, h) / (0.5 * t);
        lambda[k + l] = trapezoid(&ws, h) / (0.5 * t);
    }

    let norm_wk_sq =
        t * lambda[0] * lambda[0] + 0.5 * t * lambda[1..].iter().map(|x| x * x).sum::<f64>();
    let w = sample_series(&lambda, k, &table, m);
    let diff: Vec<f64> = vals
        .iter()
        .zip(&w)
        .map(|(a, b)| (a - b) * (a - b))
        .collect();

    Ok(FourierApproximation {
        k,
        t_final: t,
        lambda,
        norm_wk: libm::sqrt(norm_wk_sq),
        norm_u: l2_norm(u),
        remainder_direct: libm::sqrt(trapezoid(&diff, h).max(0.0)),
    })
}

fn sample_series(lambda: &[f64], k: usize, table: &HarmonicTable, m: usize) -> Vec<f64> {
    (0..m)
        .map(|node| {
            let mut acc = lambda[0];
            for l in 1..=k {
                let (c, s) = table.at(l, node);
                acc += lambda[l] * c + lambda[k + l] * s;
            }
            acc
        })
        .collect()
}

impl FourierApproximation {
    /// Angular frequency of harmonic `ℓ`.
    pub fn frequency(&self, l: usize) -> f64 {
        2.0 * PI * l as f64 / self.t_final
    }

    pub fn cos_coeff(&self, l: usize) -> f64 {
        self.lambda[l]
    }

    /// Coefficient of `sin(2πℓt/T)`, `ℓ ≥ 1`.
    pub fn sin_coeff(&self, l: usize) -> f64 {
        self.lambda[self.k + l]
    }

    pub fn evaluate(&self, t: f64) -> f64 {
        let mut acc = self.lambda[0];
        for l in 1..=self.k {
            let th = self.frequency(l) * t;
            acc += self.lambda[l] * libm::cos(th) + self.lambda[self.k + l] * libm::sin(th);
        }
        acc
    }

    /// `w` sampled on `grid`.
    pub fn sample(&self, grid: &TimeGrid) -> SampledSignal {
        if grid.t_final() == self.t_final {
            let table = HarmonicTable::new(grid);
            let vals = sample_series(&self.lambda, self.k, &table, grid.len());
            SampledSignal::new(*grid, vals).expect("length matches grid")
        } else {
            SampledSignal::from_fn(*grid, |t| self.evaluate(t))
        }
    }

    /// `sqrt(max(0, ‖u‖² − ‖w‖²))`, valid by orthogonality of `w` and `u − w`.
    pub fn remainder_identity(&self) -> f64 {
        libm::sqrt((self.norm_u * self.norm_u - self.norm_wk * self.norm_wk).max(0.0))
    }
}

/// `‖u − w‖`: the orthogonality identity, falling back to the sampled
/// difference when the two disagree by more than `1e-6 ‖u‖`.
pub fn remainder_norm(fa: &FourierApproximation) -> f64 {
    let id = fa.remainder_identity();
    if (id - fa.remainder_direct).abs() > 1e-6 * fa.norm_u {
        fa.remainder_direct
    } else {
        id
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> TimeGrid {
        TimeGrid::new(2.0 * PI, 2000).unwrap()
    }

    #[test]
    fn constant_input() {
        let u = SampledSignal::from_fn(grid(), |_| 3.0);
        let fa = fourier_approximation(&u, 4).unwrap();
        assert!((fa.lambda[0] - 3.0).abs() < 1e-14);
        assert!(fa.lambda[1..].iter().all(|x| x.abs() < 1e-13));
        assert!(remainder_norm(&fa) < 1e-6);
    }

    #[test]
    fn single_cosine() {
        let t = 3.0;
        let g = TimeGrid::new(t, 1000).unwrap();
        let u = SampledSignal::from_fn(g, |x| libm::cos(2.0 * PI * x / t));
        let fa = fourier_approximation(&u, 2).unwrap();
        for (i, l) in fa.lambda.iter().enumerate() {
            let want = if i == 1 { 1.0 } else { 0.0 };
            assert!((l - want).abs() < 1e-6, "lambda[{i}] = {l}");
        }
        let fa0 = fourier_approximation(&u, 0).unwrap();
        assert!(fa0.lambda[0].abs() < 1e-12);
        assert!((remainder_norm(&fa0) - libm::sqrt(t / 2.0)).abs() < 1e-9);
    }

    #[test]
    fn exact_series_has_zero_remainder() {
        let lam = [0.5, 1.0, -0.25, 0.0, 2.0, 0.3, -0.7];
        let src = FourierApproximation {
            k: 3,
            t_final: 2.0 * PI,
            lambda: lam.to_vec(),
            norm_wk: 0.0,
            norm_u: 0.0,
            remainder_direct: 0.0,
        };
        let u = src.sample(&grid());
        let fa = fourier_approximation(&u, 3).unwrap();
        for (a, b) in fa.lambda.iter().zip(lam) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(remainder_norm(&fa) < 1e-6);
        assert!(fa.remainder_direct < 1e-12);
    }

    #[test]
    fn under_resolved_grid_rejected() {
        let g = TimeGrid::new(1.0, 100).unwrap();
        let u = SampledSignal::zeros(g);
        assert!(matches!(
            fourier_approximation(&u, 6),
            Err(Error::UnderResolvedGrid { k: 6, m: 100 })
        ));
        assert!(fourier_approximation(&u, 5).is_ok());
    }
}
