use alloc::vec::Vec;
use core::f64::consts::PI;

use nalgebra::DVector;
use num_complex::Complex64;

use super::error_system::ErrorSystem;
use super::fourier::FourierApproximation;
use crate::error::{Error, Result};
use crate::linalg::SchurShiftedSolver;
use crate::lti::{SampledSignal, TimeGrid};

/// Resolvent actions `Π_ℓ = (iα_ℓ I − A̲)⁻¹ b̲` of the error system at the
/// Fourier frequencies `α_ℓ = 2πℓ/T`, `ℓ = 0..=K_max`, and the transfer
/// values `c̲ Π_ℓ + d̲`.
#[derive(Debug, Clone)]
pub struct ErrorMoments {
    pub t_final: f64,
    pub moments: Vec<DVector<Complex64>>,
    pub transfer: Vec<Complex64>,
}

impl ErrorMoments {
    pub fn compute(es: &ErrorSystem, t_final: f64, k_max: usize) -> Result<Self> {
        es.model().require_stable()?;
        let solver = SchurShiftedSolver::new(es.schur());
        let b = es.model().b();
        let c = es.model().c();
        let d = es.model().d();
        let mut moments = Vec::with_capacity(k_max + 1);
        let mut transfer = Vec::with_capacity(k_max + 1);
        for l in 0..=k_max {
            let alpha = 2.0 * PI * l as f64 / t_final;
            let sol = solver.solve(b, alpha)?.solution;
            let g = c
                .iter()
                .zip(sol.iter())
                .fold(Complex64::new(d, 0.0), |acc, (ci, xi)| acc + xi * *ci);
            moments.push(sol);
            transfer.push(g);
        }
        Ok(Self {
            t_final,
            moments,
            transfer,
        })
    }

    pub fn k_max(&self) -> usize {
        self.moments.len() - 1
    }

    fn check(&self, fa: &FourierApproximation) -> Result<()> {
        if fa.k > self.k_max() {
            return Err(Error::OrderExceedsCache {
                k: fa.k,
                k_max: self.k_max(),
            });
        }
        if (fa.t_final - self.t_final).abs() > 1e-12 * self.t_final {
            return Err(Error::HorizonMismatch {
                expected: self.t_final,
                found: fa.t_final,
            });
        }
        Ok(())
    }

    /// `‖F_st(w)‖²` from the closed form; no solves.
    pub fn steady_norm_sq(&self, fa: &FourierApproximation) -> Result<f64> {
        self.check(fa)?;
        let t = self.t_final;
        let mut acc = t * self.transfer[0].norm_sqr() * fa.lambda[0] * fa.lambda[0];
        for l in 1..=fa.k {
            let (a, b) = (fa.cos_coeff(l), fa.sin_coeff(l));
            acc += 0.5 * t * self.transfer[l].norm_sqr() * (a * a + b * b);
        }
        Ok(acc)
    }

    /// Initial state of the steady-state trajectory driven by `w`.
    pub fn steady_initial_state(&self, fa: &FourierApproximation) -> Result<DVector<f64>> {
        self.check(fa)?;
        let mut x = self.moments[0].map(|z| z.re) * fa.lambda[0];
        for l in 1..=fa.k {
            let (a, b) = (fa.cos_coeff(l), fa.sin_coeff(l));
            for (xi, z) in x.iter_mut().zip(self.moments[l].iter()) {
                *xi += a * z.re + b * z.im;
            }
        }
        Ok(x)
    }

    pub fn steady_state(&self, fa: &FourierApproximation) -> Result<SteadyStateData> {
        let norm_sq = self.steady_norm_sq(fa)?;
        Ok(SteadyStateData {
            moments: self.moments[..=fa.k].to_vec(),
            transfer: self.transfer[..=fa.k].to_vec(),
            x_st0: self.steady_initial_state(fa)?,
            norm_fst: libm::sqrt(norm_sq.max(0.0)),
        })
    }

    /// Steady-state output `Σ λ_ℓ F_st(φ_ℓ)` evaluated analytically on a grid.
    pub fn steady_output(
        &self,
        fa: &FourierApproximation,
        grid: &TimeGrid,
    ) -> Result<SampledSignal> {
        self.check(fa)?;
        let g0 = self.transfer[0].re;
        Ok(SampledSignal::from_fn(*grid, |t| {
            let mut y = g0 * fa.lambda[0];
            for l in 1..=fa.k {
                let g = self.transfer[l];
                let th = fa.frequency(l) * t;
                let (c, s) = (libm::cos(th), libm::sin(th));
                y += fa.cos_coeff(l) * (g.re * c - g.im * s)
                    + fa.sin_coeff(l) * (g.im * c + g.re * s);
            }
            y
        }))
    }
}

/// Moments, steady-state initial condition and steady-state output norm for
/// one Fourier approximation.
#[derive(Debug, Clone)]
pub struct SteadyStateData {
    pub moments: Vec<DVector<Complex64>>,
    pub transfer: Vec<Complex64>,
    pub x_st0: DVector<f64>,
    pub norm_fst: f64,
}

pub fn steady_state_moments(
    es: &ErrorSystem,
    fa: &FourierApproximation,
) -> Result<SteadyStateData> {
    ErrorMoments::compute(es, fa.t_final, fa.k)?.steady_state(fa)
}
