use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::{schur, solve_lyapunov_schur, solve_sylvester_schur, LyapunovKind, SchurForm};
use crate::lti::{Propagator, SampledSignal, StateSpaceModel};
use crate::reduction::GramianPair;

/// Block composition of a full and a reduced model whose output is the
/// reduction error `y − ŷ`:
/// `A = diag(A_f, A_r)`, `b = [b_f; b_r]`, `c = [c_f, −c_r]`, `d = d_f − d_r`.
#[derive(Debug, Clone)]
pub struct ErrorSystem {
    model: StateSpaceModel,
    fom_order: usize,
    schur: SchurForm,
}

/// Build the error system, computing Schur forms of both subsystems.
pub fn build_error_system(fom: &StateSpaceModel, rom: &StateSpaceModel) -> Result<ErrorSystem> {
    let sf = schur(fom.a())?;
    ErrorSystem::with_fom_schur(fom, rom, &sf)
}

impl ErrorSystem {
    /// Build the error system reusing a Schur form of the full model's `A`.
    pub fn with_fom_schur(
        fom: &StateSpaceModel,
        rom: &StateSpaceModel,
        fom_schur: &SchurForm,
    ) -> Result<Self> {
        let (nf, nr) = (fom.order(), rom.order());
        if fom_schur.dim() != nf {
            return Err(Error::DimensionMismatch {
                what: "full-model Schur form",
                expected: nf,
                found: fom_schur.dim(),
            });
        }
        let n = nf + nr;
        let mut a = DMatrix::zeros(n, n);
        a.view_mut((0, 0), (nf, nf)).copy_from(fom.a());
        a.view_mut((nf, nf), (nr, nr)).copy_from(rom.a());
        let mut b = DVector::zeros(n);
        b.rows_mut(0, nf).copy_from(fom.b());
        b.rows_mut(nf, nr).copy_from(rom.b());
        let mut c = DVector::zeros(n);
        c.rows_mut(0, nf).copy_from(fom.c());
        c.rows_mut(nf, nr).copy_from(&(-rom.c()));
        // Exact when the feedthroughs agree.
        let d = if fom.d() == rom.d() {
            0.0
        } else {
            fom.d() - rom.d()
        };
        let rom_schur = schur(rom.a())?;
        let sf = SchurForm::block_diagonal(fom_schur, &rom_schur);
        let model = StateSpaceModel::from_parts(a, b, c, d, sf.spectral_abscissa());
        Ok(Self {
            model,
            fom_order: nf,
            schur: sf,
        })
    }

    pub fn model(&self) -> &StateSpaceModel {
        &self.model
    }

    pub fn fom_order(&self) -> usize {
        self.fom_order
    }

    pub fn rom_order(&self) -> usize {
        self.model.order() - self.fom_order
    }

    pub fn schur(&self) -> &SchurForm {
        &self.schur
    }

    pub fn is_stable(&self) -> bool {
        self.model.is_stable()
    }

    /// Stack full and reduced initial states.
    pub fn stack_state(&self, x0: &DVector<f64>, x0_rom: &DVector<f64>) -> Result<DVector<f64>> {
        if x0.len() != self.fom_order {
            return Err(Error::DimensionMismatch {
                what: "full-model initial state",
                expected: self.fom_order,
                found: x0.len(),
            });
        }
        if x0_rom.len() != self.rom_order() {
            return Err(Error::DimensionMismatch {
                what: "reduced-model initial state",
                expected: self.rom_order(),
                found: x0_rom.len(),
            });
        }
        let mut x = DVector::zeros(self.model.order());
        x.rows_mut(0, self.fom_order).copy_from(x0);
        x.rows_mut(self.fom_order, self.rom_order())
            .copy_from(x0_rom);
        Ok(x)
    }

    /// Error-system output for `input` from the stacked initial state.
    pub fn simulate(&self, input: &SampledSignal, x0: &DVector<f64>) -> Result<SampledSignal> {
        Ok(Propagator::new(&self.model, input.grid())?
            .run(input, x0)?
            .0)
    }
}

/// Observability Gramian of the error system in block form
/// `[[Q, S], [Sᵀ, Q̂]]`.
#[derive(Debug, Clone)]
pub struct ErrorGramian {
    pub q: DMatrix<f64>,
    pub s: DMatrix<f64>,
    pub qhat: DMatrix<f64>,
}

/// Assemble the error Gramian reusing the full model's observability Gramian
/// and Schur form from `fom_gramians`.
pub fn error_gramian(
    fom: &StateSpaceModel,
    rom: &StateSpaceModel,
    fom_gramians: &GramianPair,
) -> Result<ErrorGramian> {
    fom.require_stable()?;
    rom.require_stable()?;
    if fom_gramians.q.nrows() != fom.order() {
        return Err(Error::DimensionMismatch {
            what: "full-model observability Gramian",
            expected: fom.order(),
            found: fom_gramians.q.nrows(),
        });
    }
    let rom_schur = schur(rom.a())?;
    let cc_hat = rom.c() * rom.c().transpose();
    let qhat = solve_lyapunov_schur(&rom_schur, &cc_hat, LyapunovKind::Observability)?;
    // Aᵀ S + S Â − cᵀ ĉ = 0
    let cross = -(fom.c() * rom.c().transpose());
    let s = solve_sylvester_schur(&fom_gramians.schur, true, &rom_schur, false, &cross)?;
    Ok(ErrorGramian {
        q: fom_gramians.q.clone(),
        s,
        qhat,
    })
}

impl ErrorGramian {
    pub fn dim(&self) -> usize {
        self.q.nrows() + self.qhat.nrows()
    }

    pub fn assembled(&self) -> DMatrix<f64> {
        let (nf, nr) = (self.q.nrows(), self.qhat.nrows());
        let mut m = DMatrix::zeros(nf + nr, nf + nr);
        m.view_mut((0, 0), (nf, nf)).copy_from(&self.q);
        m.view_mut((0, nf), (nf, nr)).copy_from(&self.s);
        m.view_mut((nf, 0), (nr, nf)).copy_from(&self.s.transpose());
        m.view_mut((nf, nf), (nr, nr)).copy_from(&self.qhat);
        m
    }

    /// `xᵀ Q̲ x` evaluated blockwise.
    pub fn quadratic_form(&self, x: &DVector<f64>) -> Result<f64> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                what: "error-system state",
                expected: self.dim(),
                found: x.len(),
            });
        }
        let nf = self.q.nrows();
        let x1 = x.rows(0, nf);
        let x2 = x.rows(nf, self.qhat.nrows());
        Ok(x1.dot(&(&self.q * x1)) + 2.0 * x1.dot(&(&self.s * x2)) + x2.dot(&(&self.qhat * x2)))
    }
}

/// `sqrt(max(0, x̲ᵀ Q̲ x̲))`: the infinite-horizon output energy of the error
/// system released from `x̲` with zero input, an upper bound on any finite
/// horizon.
pub fn initial_condition_bound(eg: &ErrorGramian, xc: &DVector<f64>) -> Result<f64> {
    Ok(libm::sqrt(eg.quadratic_form(xc)?.max(0.0)))
}
