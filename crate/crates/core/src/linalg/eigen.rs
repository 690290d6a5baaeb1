use nalgebra::{DMatrix, Dyn, SymmetricEigen, SVD};

use crate::error::{Error, Result};

const MAX_SWEEPS_PER_ROW: usize = 200;

/// Eigendecomposition of the symmetric part of `m` with a bounded number of
/// QR iterations.
pub fn symmetric_eigen(m: &DMatrix<f64>) -> Result<SymmetricEigen<f64, Dyn>> {
    let sym = (m + m.transpose()) * 0.5;
    let cap = MAX_SWEEPS_PER_ROW * sym.nrows().max(1);
    SymmetricEigen::try_new(sym, f64::EPSILON, cap)
        .ok_or(Error::NoConvergence("symmetric eigendecomposition"))
}

/// Full SVD with a bounded number of iterations.
pub fn svd(m: &DMatrix<f64>) -> Result<SVD<f64, Dyn, Dyn>> {
    let cap = MAX_SWEEPS_PER_ROW * m.nrows().max(m.ncols()).max(1);
    SVD::try_new(m.clone(), true, true, f64::EPSILON, cap).ok_or(Error::NoConvergence("SVD"))
}
