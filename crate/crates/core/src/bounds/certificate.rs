use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use super::error_system::{error_gramian, initial_condition_bound, ErrorGramian, ErrorSystem};
use super::fourier::{fourier_approximation, remainder_norm, FourierApproximation};
use super::steady_state::ErrorMoments;
use crate::error::{Error, Result};
use crate::linalg::symmetric_eigen;
use crate::lti::{l2_norm_simpson, Propagator, SampledSignal, StateSpaceModel};
use crate::reduction::{GramianPair, ReducedModel};

/// Terms of the a posteriori error bound and the a priori comparator.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub k: usize,
    /// `‖F_st(w)‖`
    pub term_steady: f64,
    /// `sqrt(x_cᵀ Q̲ x_c)`
    pub term_transient: f64,
    /// `α ‖u − w‖`
    pub term_rest: f64,
    pub gamma: f64,
    /// `α ‖u‖ + Δ_{x0}`
    pub apriori: f64,
    /// `sqrt(x̲0ᵀ Q̲ x̲0)`, zero for zero initial states.
    pub delta_x0: f64,
    pub norm_u: f64,
    /// `‖u − w‖ / ‖u‖`
    pub remainder_rel: f64,
    pub actual_error: Option<f64>,
}

impl BoundReport {
    fn assemble(
        fa: &FourierApproximation,
        alpha: f64,
        steady: f64,
        transient: f64,
        delta_x0: f64,
    ) -> Self {
        let rest = remainder_norm(fa);
        let term_rest = alpha * rest;
        let norm_u = fa.norm_u;
        Self {
            k: fa.k,
            term_steady: steady,
            term_transient: transient,
            term_rest,
            gamma: steady + transient + term_rest,
            apriori: alpha * norm_u + delta_x0,
            delta_x0,
            norm_u,
            remainder_rel: if norm_u > 0.0 { rest / norm_u } else { 0.0 },
            actual_error: None,
        }
    }

    pub fn with_actual_error(mut self, err: f64) -> Self {
        self.actual_error = Some(err);
        self
    }

    /// `true` when the measured error (if any) is below `gamma + slack`.
    pub fn is_rigorous(&self, slack: f64) -> bool {
        self.actual_error.is_none_or(|e| e <= self.gamma + slack)
    }
}

/// One-shot a posteriori bound. Recomputes the error system, its Schur form
/// and the moments; use [`OfflineBound`] to evaluate many inputs.
#[allow(clippy::too_many_arguments)]
pub fn aposteriori_bound(
    fom: &StateSpaceModel,
    rom: &StateSpaceModel,
    u: &SampledSignal,
    x0: &DVector<f64>,
    x0_rom: &DVector<f64>,
    k: usize,
    alpha: f64,
    eg: &ErrorGramian,
) -> Result<BoundReport> {
    let es = ErrorSystem::with_fom_schur(fom, rom, &crate::linalg::schur(fom.a())?)?;
    let fa = fourier_approximation(u, k)?;
    let moments = ErrorMoments::compute(&es, fa.t_final, k)?;
    let ss = moments.steady_state(&fa)?;
    let xe0 = es.stack_state(x0, x0_rom)?;
    let xc = &xe0 - &ss.x_st0;
    let transient = initial_condition_bound(eg, &xc)?;
    let delta = if xe0.iter().all(|&v| v == 0.0) {
        0.0
    } else {
        initial_condition_bound(eg, &xe0)?
    };
    Ok(BoundReport::assemble(
        &fa,
        alpha,
        ss.norm_fst,
        transient,
        delta,
    ))
}

/// Input-independent data for evaluating the bound: the error system, its
/// Gramian with a symmetric factor `F` (`FᵀF = Q̲`), the moments up to
/// `K_max` and their images under `F`.
#[derive(Debug, Clone)]
pub struct OfflineBound {
    es: ErrorSystem,
    eg: ErrorGramian,
    moments: ErrorMoments,
    alpha: f64,
    factor: DMatrix<f64>,
    factor_re: Vec<DVector<f64>>,
    factor_im: Vec<DVector<f64>>,
}

pub fn offline_precompute(
    fom: &StateSpaceModel,
    rom: &ReducedModel,
    fom_gramians: &GramianPair,
    k_max: usize,
    t_final: f64,
) -> Result<OfflineBound> {
    if !(t_final > 0.0 && t_final.is_finite()) {
        return Err(Error::InvalidGrid("final time must be positive and finite"));
    }
    let es = ErrorSystem::with_fom_schur(fom, &rom.model, &fom_gramians.schur)?;
    let eg = error_gramian(fom, &rom.model, fom_gramians)?;
    let moments = ErrorMoments::compute(&es, t_final, k_max)?;
    let factor = gramian_factor(&eg.assembled())?;
    let factor_re = moments
        .moments
        .iter()
        .map(|p| &factor * p.map(|z| z.re))
        .collect();
    let factor_im = moments
        .moments
        .iter()
        .map(|p| &factor * p.map(|z| z.im))
        .collect();
    Ok(OfflineBound {
        es,
        eg,
        moments,
        alpha: rom.alpha,
        factor,
        factor_re,
        factor_im,
    })
}

/// `F = diag(sqrt(max(μ,0))) Vᵀ` from `Q̲ = V diag(μ) Vᵀ`.
fn gramian_factor(q: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let eig = symmetric_eigen(q)?;
    let mut f = eig.eigenvectors.transpose();
    for (i, mut row) in f.row_iter_mut().enumerate() {
        row *= libm::sqrt(eig.eigenvalues[i].max(0.0));
    }
    Ok(f)
}

impl OfflineBound {
    pub fn error_system(&self) -> &ErrorSystem {
        &self.es
    }

    pub fn gramian(&self) -> &ErrorGramian {
        &self.eg
    }

    pub fn moments(&self) -> &ErrorMoments {
        &self.moments
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn k_max(&self) -> usize {
        self.moments.k_max()
    }

    pub fn t_final(&self) -> f64 {
        self.moments.t_final
    }

    /// Online evaluation: quadrature, scalar sums and vector norms only.
    pub fn evaluate(
        &self,
        u: &SampledSignal,
        x0: &DVector<f64>,
        x0_rom: &DVector<f64>,
        k: usize,
    ) -> Result<BoundReport> {
        if k > self.k_max() {
            return Err(Error::OrderExceedsCache {
                k,
                k_max: self.k_max(),
            });
        }
        let fa = fourier_approximation(u, k)?;
        let norm_sq = self.moments.steady_norm_sq(&fa)?;
        let xe0 = self.es.stack_state(x0, x0_rom)?;

        // F x_c = F x̲0 − F x_st0
        let mut fxc = &self.factor_re[0] * (-fa.lambda[0]);
        for l in 1..=k {
            fxc.axpy(-fa.cos_coeff(l), &self.factor_re[l], 1.0);
            fxc.axpy(-fa.sin_coeff(l), &self.factor_im[l], 1.0);
        }
        let delta = if xe0.iter().all(|&v| v == 0.0) {
            0.0
        } else {
            let fx0 = &self.factor * &xe0;
            fxc += &fx0;
            fx0.norm()
        };
        Ok(BoundReport::assemble(
            &fa,
            self.alpha,
            libm::sqrt(norm_sq.max(0.0)),
            fxc.norm(),
            delta,
        ))
    }

    /// Evaluate the bound and attach the measured error from an error-system
    /// simulation (see [`measured_error`]).
    pub fn evaluate_with_error(
        &self,
        u: &SampledSignal,
        x0: &DVector<f64>,
        x0_rom: &DVector<f64>,
        k: usize,
    ) -> Result<BoundReport> {
        let report = self.evaluate(u, x0, x0_rom, k)?;
        let e = self
            .es
            .simulate(&u.refined(), &self.es.stack_state(x0, x0_rom)?)?;
        Ok(report.with_actual_error(l2_norm_simpson(&e)))
    }
}

/// `‖y − ŷ‖` from two separate simulations driven by the piecewise-linear
/// interpolant of `u`, sampled on the refined grid and integrated with
/// Simpson's rule.
pub fn measured_error(
    fom: &StateSpaceModel,
    rom: &StateSpaceModel,
    u: &SampledSignal,
    x0: &DVector<f64>,
    x0_rom: &DVector<f64>,
) -> Result<f64> {
    let y = refined_output(fom, u, x0)?;
    rom_error(&y, rom, u, x0_rom)
}

/// Output for the piecewise-linear interpolant of `u` on the refined grid.
pub fn refined_output(
    model: &StateSpaceModel,
    u: &SampledSignal,
    x0: &DVector<f64>,
) -> Result<SampledSignal> {
    let fine = u.refined();
    Ok(Propagator::new(model, fine.grid())?.run(&fine, x0)?.0)
}

/// `‖y − ŷ‖` given a full-model output `y` from [`refined_output`].
pub fn rom_error(
    y: &SampledSignal,
    rom: &StateSpaceModel,
    u: &SampledSignal,
    x0_rom: &DVector<f64>,
) -> Result<f64> {
    let yr = refined_output(rom, u, x0_rom)?;
    Ok(l2_norm_simpson(&y.sub(&yr)?))
}
