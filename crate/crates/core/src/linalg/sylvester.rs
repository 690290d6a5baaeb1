//! Bartels–Stewart solvers for `op(A) X + X op(B) + C = 0` and the two
//! Lyapunov equations built on it.

use alloc::vec::Vec;

use nalgebra::DMatrix;

use super::schur::{schur, Block, SchurForm};
use super::{record_solve, EIGEN_GAP_TOL};
use crate::error::{Error, Result};

/// Which Lyapunov equation to solve for a Hurwitz `A`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LyapunovKind {
    /// `Aᵀ X + X A + W = 0`
    Observability,
    /// `A X + X Aᵀ + W = 0`
    Controllability,
}

/// A quasi-triangular Schur factor used either as is (upper) or transposed
/// (lower).
#[derive(Clone, Copy)]
struct QuasiTri<'a> {
    t: &'a DMatrix<f64>,
    blocks: &'a [Block],
    transposed: bool,
}

impl QuasiTri<'_> {
    fn upper(&self) -> bool {
        !self.transposed
    }

    /// Dense copy of `op(T)[rows, cols]`.
    fn sub(&self, r0: usize, nr: usize, c0: usize, nc: usize) -> DMatrix<f64> {
        if self.transposed {
            self.t.view((c0, r0), (nc, nr)).transpose()
        } else {
            self.t.view((r0, c0), (nr, nc)).into_owned()
        }
    }
}

/// Solve `A X + X B + C = 0` for general square `A` (p×p) and `B` (q×q).
pub fn solve_sylvester(
    a: &DMatrix<f64>,
    b: &DMatrix<f64>,
    c: &DMatrix<f64>,
) -> Result<DMatrix<f64>> {
    let sa = schur(a)?;
    let sb = schur(b)?;
    solve_sylvester_schur(&sa, false, &sb, false, c)
}

/// Solve `op(A) X + X op(B) + C = 0` given real Schur forms of `A` and `B`,
/// where `op` transposes when the corresponding flag is set.
pub fn solve_sylvester_schur(
    sa: &SchurForm,
    a_transposed: bool,
    sb: &SchurForm,
    b_transposed: bool,
    c: &DMatrix<f64>,
) -> Result<DMatrix<f64>> {
    let (p, q) = (sa.dim(), sb.dim());
    if c.nrows() != p {
        return Err(Error::DimensionMismatch {
            what: "Sylvester right-hand side rows",
            expected: p,
            found: c.nrows(),
        });
    }
    if c.ncols() != q {
        return Err(Error::DimensionMismatch {
            what: "Sylvester right-hand side columns",
            expected: q,
            found: c.ncols(),
        });
    }
    if c.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("Sylvester right-hand side"));
    }
    record_solve();

    check_disjoint_spectra(sa, sb)?;

    let l = QuasiTri {
        t: &sa.t,
        blocks: sa.blocks(),
        transposed: a_transposed,
    };
    let r = QuasiTri {
        t: &sb.t,
        blocks: sb.blocks(),
        transposed: b_transposed,
    };
    let f = -(sa.q.transpose() * c * &sb.q);
    let y = triangular_sylvester(l, r, f)?;
    Ok(&sa.q * y * sb.q.transpose())
}

fn check_disjoint_spectra(sa: &SchurForm, sb: &SchurForm) -> Result<()> {
    let scale = sa.t.norm() + sb.t.norm();
    let tol = EIGEN_GAP_TOL * scale;
    let ea = sa.eigenvalues();
    let eb = sb.eigenvalues();
    let mut gap = f64::INFINITY;
    for la in &ea {
        for lb in &eb {
            gap = gap.min((la + lb).norm());
        }
    }
    if gap <= tol {
        return Err(Error::CommonEigenvalue { gap });
    }
    Ok(())
}

/// Solve `L Y + Y R = F` with `L`, `R` quasi-triangular.
fn triangular_sylvester(l: QuasiTri<'_>, r: QuasiTri<'_>, f: DMatrix<f64>) -> Result<DMatrix<f64>> {
    let (p, q) = (f.nrows(), f.ncols());
    let mut y = DMatrix::<f64>::zeros(p, q);

    let col_order: Vec<Block> = if r.upper() {
        r.blocks.to_vec()
    } else {
        r.blocks.iter().rev().copied().collect()
    };
    let row_order: Vec<Block> = if l.upper() {
        l.blocks.iter().rev().copied().collect()
    } else {
        l.blocks.to_vec()
    };

    for cb in &col_order {
        let sj = cb.size;
        // Couple to the already solved column blocks.
        let (k0, kn) = if r.upper() {
            (0, cb.start)
        } else {
            (cb.end(), q - cb.end())
        };
        let mut rhs = f.columns(cb.start, sj).into_owned();
        if kn > 0 {
            let coupling = y.columns(k0, kn) * r.sub(k0, kn, cb.start, sj);
            rhs -= coupling;
        }
        let rjj = r.sub(cb.start, sj, cb.start, sj);

        let mut ycol = DMatrix::<f64>::zeros(p, sj);
        for rb in &row_order {
            let si = rb.size;
            let (m0, mn) = if l.upper() {
                (rb.end(), p - rb.end())
            } else {
                (0, rb.start)
            };
            let mut g = rhs.rows(rb.start, si).into_owned();
            if mn > 0 {
                g -= l.sub(rb.start, si, m0, mn) * ycol.rows(m0, mn);
            }
            let lii = l.sub(rb.start, si, rb.start, si);
            let blk = small_sylvester(&lii, &rjj, &g)?;
            ycol.rows_mut(rb.start, si).copy_from(&blk);
        }
        y.columns_mut(cb.start, sj).copy_from(&ycol);
    }
    Ok(y)
}

/// Solve `L Y + Y R = G` for blocks of size at most 2 via the Kronecker form.
fn small_sylvester(l: &DMatrix<f64>, r: &DMatrix<f64>, g: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let (si, sj) = (l.nrows(), r.nrows());
    let n = si * sj;
    let idx = |row: usize, col: usize| row + col * si;
    let mut m = [[0.0f64; 4]; 4];
    let mut rhs = [0.0f64; 4];
    for col in 0..sj {
        for row in 0..si {
            let e = idx(row, col);
            rhs[e] = g[(row, col)];
            for k in 0..si {
                m[e][idx(k, col)] += l[(row, k)];
            }
            for k in 0..sj {
                m[e][idx(row, k)] += r[(k, col)];
            }
        }
    }
    let scale = l.abs().max() + r.abs().max();
    let sol = gauss_solve(&mut m, &mut rhs, n, scale)?;
    Ok(DMatrix::from_fn(si, sj, |row, col| sol[idx(row, col)]))
}

fn gauss_solve(
    m: &mut [[f64; 4]; 4],
    rhs: &mut [f64; 4],
    n: usize,
    scale: f64,
) -> Result<[f64; 4]> {
    for k in 0..n {
        let piv = (k..n)
            .max_by(|&a, &b| m[a][k].abs().total_cmp(&m[b][k].abs()))
            .unwrap_or(k);
        if m[piv][k].abs() <= f64::EPSILON * scale.max(f64::MIN_POSITIVE) {
            return Err(Error::CommonEigenvalue {
                gap: m[piv][k].abs(),
            });
        }
        m.swap(k, piv);
        rhs.swap(k, piv);
        for i in k + 1..n {
            let fac = m[i][k] / m[k][k];
            for j in k..n {
                m[i][j] -= fac * m[k][j];
            }
            rhs[i] -= fac * rhs[k];
        }
    }
    let mut x = [0.0; 4];
    for i in (0..n).rev() {
        let mut s = rhs[i];
        for j in i + 1..n {
            s -= m[i][j] * x[j];
        }
        x[i] = s / m[i][i];
    }
    Ok(x)
}

/// Solve a Lyapunov equation for Hurwitz `A`; the result is symmetrized.
pub fn solve_lyapunov(a: &DMatrix<f64>, w: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let sa = schur(a)?;
    solve_lyapunov_schur(&sa, w, LyapunovKind::Observability)
}

/// Lyapunov solve reusing a precomputed Schur form of `A`.
pub fn solve_lyapunov_schur(
    sa: &SchurForm,
    w: &DMatrix<f64>,
    kind: LyapunovKind,
) -> Result<DMatrix<f64>> {
    let abscissa = sa.spectral_abscissa();
    if !(abscissa < 0.0) {
        return Err(Error::NotHurwitz { abscissa });
    }
    if !w.is_square() || w.nrows() != sa.dim() {
        return Err(Error::DimensionMismatch {
            what: "Lyapunov right-hand side",
            expected: sa.dim(),
            found: w.nrows(),
        });
    }
    let x = match kind {
        LyapunovKind::Observability => solve_sylvester_schur(sa, true, sa, false, w)?,
        LyapunovKind::Controllability => solve_sylvester_schur(sa, false, sa, true, w)?,
    };
    Ok(symmetrize(x))
}

pub(crate) fn symmetrize(x: DMatrix<f64>) -> DMatrix<f64> {
    let xt = x.transpose();
    (x + xt) * 0.5
}

/// Frobenius norm of `Aᵀ X + X A + W` (or `A X + X Aᵀ + W`).
pub fn lyapunov_residual(
    a: &DMatrix<f64>,
    x: &DMatrix<f64>,
    w: &DMatrix<f64>,
    kind: LyapunovKind,
) -> f64 {
    match kind {
        LyapunovKind::Observability => (a.transpose() * x + x * a + w).norm(),
        LyapunovKind::Controllability => (a * x + x * a.transpose() + w).norm(),
    }
}

/// Frobenius norm of `A X + X B + C`.
pub fn sylvester_residual(
    a: &DMatrix<f64>,
    b: &DMatrix<f64>,
    c: &DMatrix<f64>,
    x: &DMatrix<f64>,
) -> f64 {
    (a * x + x * b + c).norm()
}
