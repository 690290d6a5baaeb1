//! Dense matrix-equation kernels.

use core::sync::atomic::{AtomicUsize, Ordering};

mod eigen;
mod expm;
mod schur;
mod shifted;
mod sylvester;

pub use eigen::{svd, symmetric_eigen};
pub use expm::expm;
pub use schur::{schur, Block, SchurForm};
pub use shifted::{shifted_solve, SchurShiftedSolver, ShiftedSolve};
pub use sylvester::{
    lyapunov_residual, solve_lyapunov, solve_lyapunov_schur, solve_sylvester,
    solve_sylvester_schur, sylvester_residual, LyapunovKind,
};

/// Relative residual target for Lyapunov and Sylvester solves.
pub const MATRIX_EQUATION_RESIDUAL_TOL: f64 = 1e-8;
/// Relative residual target for shifted solves.
pub const SHIFTED_RESIDUAL_TOL: f64 = 1e-10;
/// Relative eigenvalue gap below which Sylvester operands are rejected.
pub const EIGEN_GAP_TOL: f64 = 1e-10;

static SOLVES: AtomicUsize = AtomicUsize::new(0);

/// Number of matrix-equation and shifted linear solves performed by this
/// process so far. Used to audit that online bound evaluations never solve.
pub fn solve_count() -> usize {
    SOLVES.load(Ordering::Relaxed)
}

pub(crate) fn record_solve() {
    SOLVES.fetch_add(1, Ordering::Relaxed);
}
