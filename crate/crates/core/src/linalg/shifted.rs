//! Resolvent actions `(iα I − A)⁻¹ b` at real frequencies `α`.

use alloc::vec;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::record_solve;
use super::schur::SchurForm;
use crate::error::{Error, Result};

/// Solution of one shifted linear system.
#[derive(Debug, Clone)]
pub struct ShiftedSolve {
    pub alpha: f64,
    pub solution: DVector<Complex64>,
}

impl ShiftedSolve {
    /// `‖(iα I − A) x − b‖₂`.
    pub fn residual(&self, a: &DMatrix<f64>, b: &DVector<f64>) -> f64 {
        let ax = complexify(a) * &self.solution;
        let shift = Complex64::new(0.0, self.alpha);
        let sq: f64 = self
            .solution
            .iter()
            .zip(ax.iter())
            .zip(b.iter())
            .map(|((x, ax), b)| (shift * x - ax - b).norm_sqr())
            .sum();
        libm::sqrt(sq)
    }
}

fn complexify(a: &DMatrix<f64>) -> DMatrix<Complex64> {
    a.map(|v| Complex64::new(v, 0.0))
}

/// Dense complex LU solve of `(iα I − A) x = b`.
pub fn shifted_solve(a: &DMatrix<f64>, b: &DVector<f64>, alpha: f64) -> Result<ShiftedSolve> {
    let n = a.nrows();
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.nrows(),
            cols: a.ncols(),
        });
    }
    if b.len() != n {
        return Err(Error::DimensionMismatch {
            what: "shifted solve right-hand side",
            expected: n,
            found: b.len(),
        });
    }
    record_solve();
    let mut m = -complexify(a);
    for i in 0..n {
        m[(i, i)] += Complex64::new(0.0, alpha);
    }
    let rhs = b.map(|v| Complex64::new(v, 0.0));
    let solution = m
        .lu()
        .solve(&rhs)
        .filter(|x| x.iter().all(|v| v.re.is_finite() && v.im.is_finite()))
        .ok_or(Error::Singular("shifted matrix iαI − A"))?;
    Ok(ShiftedSolve { alpha, solution })
}

/// Shifted solver reusing a real Schur form: each solve is a quasi-triangular
/// back substitution, `O(N²)`.
#[derive(Debug, Clone)]
pub struct SchurShiftedSolver<'a> {
    schur: &'a SchurForm,
}

impl<'a> SchurShiftedSolver<'a> {
    pub fn new(schur: &'a SchurForm) -> Self {
        Self { schur }
    }

    pub fn solve(&self, b: &DVector<f64>, alpha: f64) -> Result<ShiftedSolve> {
        let f = self.schur;
        let n = f.dim();
        if b.len() != n {
            return Err(Error::DimensionMismatch {
                what: "shifted solve right-hand side",
                expected: n,
                found: b.len(),
            });
        }
        record_solve();
        let z = f.q.transpose() * b;
        let t = &f.t;
        let shift = Complex64::new(0.0, alpha);
        let mut y = vec![Complex64::new(0.0, 0.0); n];
        let tiny = f64::EPSILON * t.norm().max(alpha.abs()).max(f64::MIN_POSITIVE);

        for blk in f.blocks().iter().rev() {
            let i = blk.start;
            let mut rhs = [Complex64::new(z[i], 0.0), Complex64::new(0.0, 0.0)];
            if blk.size == 2 {
                rhs[1] = Complex64::new(z[i + 1], 0.0);
            }
            for (r, rv) in rhs.iter_mut().enumerate().take(blk.size) {
                for j in blk.end()..n {
                    *rv += t[(i + r, j)] * y[j];
                }
            }
            if blk.size == 1 {
                let d = shift - t[(i, i)];
                if d.norm() <= tiny {
                    return Err(Error::Singular("shifted matrix iαI − A"));
                }
                y[i] = rhs[0] / d;
            } else {
                let m11 = shift - t[(i, i)];
                let m12 = Complex64::new(-t[(i, i + 1)], 0.0);
                let m21 = Complex64::new(-t[(i + 1, i)], 0.0);
                let m22 = shift - t[(i + 1, i + 1)];
                let det = m11 * m22 - m12 * m21;
                if det.norm() <= tiny * tiny {
                    return Err(Error::Singular("shifted matrix iαI − A"));
                }
                y[i] = (m22 * rhs[0] - m12 * rhs[1]) / det;
                y[i + 1] = (m11 * rhs[1] - m21 * rhs[0]) / det;
            }
        }

        let mut x = DVector::from_element(n, Complex64::new(0.0, 0.0));
        for (k, yk) in y.iter().enumerate() {
            for i in 0..n {
                x[i] += f.q[(i, k)] * yk;
            }
        }
        Ok(ShiftedSolve { alpha, solution: x })
    }
}
