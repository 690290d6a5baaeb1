//! Real Schur decomposition `A = Q T Qᵀ` by Householder reduction to upper
//! Hessenberg form followed by the Francis double-shift QR iteration.
//!
//! The iteration follows the classical EISPACK `orthes`/`hqr2` pair with the
//! eigenvector back-substitution removed. Converged real pairs are rotated to
//! upper triangular form, so every remaining 2x2 diagonal block carries a
//! complex conjugate eigenvalue pair.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Iteration budget per eigenvalue before giving up.
const ITERATIONS_PER_EIGENVALUE: usize = 60;

/// A diagonal block of a quasi-upper-triangular matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Block {
    pub start: usize,
    pub size: usize,
}

impl Block {
    pub fn end(&self) -> usize {
        self.start + self.size
    }
}

/// Real Schur form of a square matrix.
#[derive(Debug, Clone)]
pub struct SchurForm {
    /// Orthogonal Schur vectors.
    pub q: DMatrix<f64>,
    /// Quasi-upper-triangular factor with 1x1 and 2x2 diagonal blocks.
    pub t: DMatrix<f64>,
    blocks: Vec<Block>,
}

impl SchurForm {
    pub fn dim(&self) -> usize {
        self.t.nrows()
    }

    /// Diagonal block partition of `t`, top to bottom.
    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    /// Eigenvalues read off the diagonal blocks, in block order.
    pub fn eigenvalues(&self) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(self.dim());
        for blk in &self.blocks {
            let i = blk.start;
            if blk.size == 1 {
                out.push(Complex64::new(self.t[(i, i)], 0.0));
            } else {
                let (re, im) = block_eigen(
                    self.t[(i, i)],
                    self.t[(i, i + 1)],
                    self.t[(i + 1, i)],
                    self.t[(i + 1, i + 1)],
                );
                out.push(Complex64::new(re, im));
                out.push(Complex64::new(re, -im));
            }
        }
        out
    }

    /// Largest real part over the spectrum.
    pub fn spectral_abscissa(&self) -> f64 {
        self.eigenvalues()
            .iter()
            .map(|l| l.re)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Schur form of `diag(A₁, A₂)` from the forms of `A₁` and `A₂`.
    pub fn block_diagonal(first: &SchurForm, second: &SchurForm) -> SchurForm {
        let (n1, n2) = (first.dim(), second.dim());
        let n = n1 + n2;
        let mut q = DMatrix::zeros(n, n);
        let mut t = DMatrix::zeros(n, n);
        q.view_mut((0, 0), (n1, n1)).copy_from(&first.q);
        q.view_mut((n1, n1), (n2, n2)).copy_from(&second.q);
        t.view_mut((0, 0), (n1, n1)).copy_from(&first.t);
        t.view_mut((n1, n1), (n2, n2)).copy_from(&second.t);
        let blocks = first
            .blocks
            .iter()
            .copied()
            .chain(second.blocks.iter().map(|b| Block {
                start: b.start + n1,
                size: b.size,
            }))
            .collect();
        SchurForm { q, t, blocks }
    }

    /// Reassemble `Q T Qᵀ`.
    pub fn reconstruct(&self) -> DMatrix<f64> {
        &self.q * &self.t * self.q.transpose()
    }
}

/// Real and (nonnegative) imaginary part of the eigenvalues of a 2x2 block
/// known to carry a complex pair.
fn block_eigen(a: f64, b: f64, c: f64, d: f64) -> (f64, f64) {
    let p = 0.5 * (a - d);
    let disc = p * p + b * c;
    let re = 0.5 * (a + d);
    (re, libm::sqrt(f64::max(-disc, 0.0)))
}

/// Compute the real Schur form of `a`.
pub fn schur(a: &DMatrix<f64>) -> Result<SchurForm> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.nrows(),
            cols: a.ncols(),
        });
    }
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("Schur input"));
    }
    let n = a.nrows();
    if n == 0 {
        return Ok(SchurForm {
            q: DMatrix::zeros(0, 0),
            t: DMatrix::zeros(0, 0),
            blocks: Vec::new(),
        });
    }

    let mut h = RowMajor::from_dmatrix(a);
    let mut v = RowMajor::identity(n);
    hessenberg(&mut h, &mut v);
    francis_qr(&mut h, &mut v)?;

    // Clean up negligible subdiagonal entries left behind by deflation.
    for i in 0..n {
        for j in 0..i.saturating_sub(1) {
            h[(i, j)] = 0.0;
        }
    }
    let mut blocks = Vec::new();
    let mut i = 0;
    while i < n {
        if i + 1 < n && h[(i + 1, i)] != 0.0 {
            let (_, im) = block_eigen(h[(i, i)], h[(i, i + 1)], h[(i + 1, i)], h[(i + 1, i + 1)]);
            if im > 0.0 {
                blocks.push(Block { start: i, size: 2 });
                i += 2;
                continue;
            }
            // A real pair that escaped standardization: rotate it now.
            standardize_real_pair(&mut h, &mut v, i);
        }
        if i + 1 < n {
            h[(i + 1, i)] = 0.0;
        }
        blocks.push(Block { start: i, size: 1 });
        i += 1;
    }

    Ok(SchurForm {
        q: v.into_dmatrix(),
        t: h.into_dmatrix(),
        blocks,
    })
}

/// Rotate the 2x2 block at `i` with real eigenvalues into upper triangular form.
fn standardize_real_pair(h: &mut RowMajor, v: &mut RowMajor, i: usize) {
    let n = h.n;
    let (a, b, c, d) = (h[(i, i)], h[(i, i + 1)], h[(i + 1, i)], h[(i + 1, i + 1)]);
    let p = 0.5 * (a - d);
    let disc = p * p + b * c;
    let z = if p >= 0.0 {
        p + libm::sqrt(disc.max(0.0))
    } else {
        p - libm::sqrt(disc.max(0.0))
    };
    // Eigenvector of the block for eigenvalue d + z is (z, c).
    let r = libm::hypot(z, c);
    if r == 0.0 {
        return;
    }
    let (cs, sn) = (z / r, c / r);
    for j in i..n {
        let x = h[(i, j)];
        let y = h[(i + 1, j)];
        h[(i, j)] = cs * x + sn * y;
        h[(i + 1, j)] = -sn * x + cs * y;
    }
    for r_ in 0..n.min(i + 2) {
        let x = h[(r_, i)];
        let y = h[(r_, i + 1)];
        h[(r_, i)] = cs * x + sn * y;
        h[(r_, i + 1)] = -sn * x + cs * y;
    }
    for r_ in 0..n {
        let x = v[(r_, i)];
        let y = v[(r_, i + 1)];
        v[(r_, i)] = cs * x + sn * y;
        v[(r_, i + 1)] = -sn * x + cs * y;
    }
}

/// Row-major scratch matrix; the QR sweeps are row oriented.
struct RowMajor {
    n: usize,
    data: Vec<f64>,
}

impl RowMajor {
    fn from_dmatrix(a: &DMatrix<f64>) -> Self {
        let n = a.nrows();
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                data[i * n + j] = a[(i, j)];
            }
        }
        Self { n, data }
    }

    fn identity(n: usize) -> Self {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            data[i * n + i] = 1.0;
        }
        Self { n, data }
    }

    fn into_dmatrix(self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.n, self.n, &self.data)
    }
}

impl core::ops::Index<(usize, usize)> for RowMajor {
    type Output = f64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n + j]
    }
}

impl core::ops::IndexMut<(usize, usize)> for RowMajor {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.n + j]
    }
}

/// Householder reduction to upper Hessenberg form, accumulating the
/// orthogonal transformation into `v`.
fn hessenberg(h: &mut RowMajor, v: &mut RowMajor) {
    let n = h.n;
    if n < 3 {
        return;
    }
    let high = n - 1;
    let mut ort = vec![0.0; n];

    for m in 1..high {
        let scale: f64 = (m..=high).map(|i| h[(i, m - 1)].abs()).sum();
        if scale == 0.0 {
            continue;
        }
        let mut hh = 0.0;
        for i in (m..=high).rev() {
            ort[i] = h[(i, m - 1)] / scale;
            hh += ort[i] * ort[i];
        }
        let mut g = libm::sqrt(hh);
        if ort[m] > 0.0 {
            g = -g;
        }
        hh -= ort[m] * g;
        ort[m] -= g;

        for j in m..n {
            let mut f = 0.0;
            for i in (m..=high).rev() {
                f += ort[i] * h[(i, j)];
            }
            f /= hh;
            for i in m..=high {
                h[(i, j)] -= f * ort[i];
            }
        }
        for i in 0..=high {
            let mut f = 0.0;
            for j in (m..=high).rev() {
                f += ort[j] * h[(i, j)];
            }
            f /= hh;
            for j in m..=high {
                h[(i, j)] -= f * ort[j];
            }
        }
        ort[m] *= scale;
        h[(m, m - 1)] = scale * g;
    }

    for m in (1..high).rev() {
        if h[(m, m - 1)] == 0.0 {
            continue;
        }
        for i in m + 1..=high {
            ort[i] = h[(i, m - 1)];
        }
        for j in m..=high {
            let mut g = 0.0;
            for i in m..=high {
                g += ort[i] * v[(i, j)];
            }
            // Double division avoids possible underflow.
            g = (g / ort[m]) / h[(m, m - 1)];
            for i in m..=high {
                v[(i, j)] += g * ort[i];
            }
        }
    }

    for i in 2..n {
        for j in 0..i - 1 {
            h[(i, j)] = 0.0;
        }
    }
}

/// Francis double-shift QR iteration on an upper Hessenberg matrix.
fn francis_qr(h: &mut RowMajor, v: &mut RowMajor) -> Result<()> {
    let nn = h.n;
    let eps = f64::EPSILON;
    let mut exshift = 0.0;
    let (mut p, mut q, mut r, mut s, mut z): (f64, f64, f64, f64, f64);
    let (mut w, mut x, mut y);

    let mut norm = 0.0;
    for i in 0..nn {
        for j in i.saturating_sub(1)..nn {
            norm += h[(i, j)].abs();
        }
    }

    let budget = ITERATIONS_PER_EIGENVALUE * nn.max(1);
    let mut total_iter = 0usize;
    let mut iter = 0usize;
    // `n` is the index of the active trailing row; loop while n >= 0.
    let mut n = nn as isize - 1;
    while n >= 0 {
        let nu = n as usize;
        let mut l = nu;
        while l > 0 {
            s = h[(l - 1, l - 1)].abs() + h[(l, l)].abs();
            if s == 0.0 {
                s = norm;
            }
            if h[(l, l - 1)].abs() < eps * s {
                break;
            }
            l -= 1;
        }

        if l == nu {
            // One root.
            h[(nu, nu)] += exshift;
            if nu > 0 {
                h[(nu, nu - 1)] = 0.0;
            }
            n -= 1;
            iter = 0;
        } else if l + 1 == nu {
            // Two roots.
            w = h[(nu, nu - 1)] * h[(nu - 1, nu)];
            p = (h[(nu - 1, nu - 1)] - h[(nu, nu)]) / 2.0;
            q = p * p + w;
            z = libm::sqrt(q.abs());
            h[(nu, nu)] += exshift;
            h[(nu - 1, nu - 1)] += exshift;

            if q >= 0.0 {
                z = if p >= 0.0 { p + z } else { p - z };
                x = h[(nu, nu - 1)];
                s = x.abs() + z.abs();
                p = x / s;
                q = z / s;
                r = libm::sqrt(p * p + q * q);
                p /= r;
                q /= r;

                for j in nu - 1..nn {
                    z = h[(nu - 1, j)];
                    h[(nu - 1, j)] = q * z + p * h[(nu, j)];
                    h[(nu, j)] = q * h[(nu, j)] - p * z;
                }
                for i in 0..=nu {
                    z = h[(i, nu - 1)];
                    h[(i, nu - 1)] = q * z + p * h[(i, nu)];
                    h[(i, nu)] = q * h[(i, nu)] - p * z;
                }
                for i in 0..nn {
                    z = v[(i, nu - 1)];
                    v[(i, nu - 1)] = q * z + p * v[(i, nu)];
                    v[(i, nu)] = q * v[(i, nu)] - p * z;
                }
                h[(nu, nu - 1)] = 0.0;
            }
            if nu >= 2 {
                h[(nu - 1, nu - 2)] = 0.0;
            }
            n -= 2;
            iter = 0;
        } else {
            x = h[(nu, nu)];
            y = 0.0;
            w = 0.0;
            if l < nu {
                y = h[(nu - 1, nu - 1)];
                w = h[(nu, nu - 1)] * h[(nu - 1, nu)];
            }

            // Wilkinson's ad hoc shift.
            if iter == 10 {
                exshift += x;
                for i in 0..=nu {
                    h[(i, i)] -= x;
                }
                s = h[(nu, nu - 1)].abs() + h[(nu - 1, nu - 2)].abs();
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }

            // Second exceptional shift.
            if iter == 30 {
                s = (y - x) / 2.0;
                s = s * s + w;
                if s > 0.0 {
                    s = libm::sqrt(s);
                    if y < x {
                        s = -s;
                    }
                    s = x - w / ((y - x) / 2.0 + s);
                    for i in 0..=nu {
                        h[(i, i)] -= s;
                    }
                    exshift += s;
                    x = 0.964;
                    y = x;
                    w = x;
                }
            }

            iter += 1;
            total_iter += 1;
            if total_iter > budget {
                return Err(Error::SchurNoConvergence {
                    iterations: total_iter,
                });
            }

            // Look for two consecutive small subdiagonal elements.
            let mut m = nu - 2;
            loop {
                z = h[(m, m)];
                r = x - z;
                s = y - z;
                p = (r * s - w) / h[(m + 1, m)] + h[(m, m + 1)];
                q = h[(m + 1, m + 1)] - z - r - s;
                r = h[(m + 2, m + 1)];
                s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                if h[(m, m - 1)].abs() * (q.abs() + r.abs())
                    < eps
                        * (p.abs() * (h[(m - 1, m - 1)].abs() + z.abs() + h[(m + 1, m + 1)].abs()))
                {
                    break;
                }
                m -= 1;
            }

            for i in m + 2..=nu {
                h[(i, i - 2)] = 0.0;
                if i > m + 2 {
                    h[(i, i - 3)] = 0.0;
                }
            }

            // Double QR step on rows l..=n and columns m..=n.
            for k in m..nu {
                let notlast = k != nu - 1;
                if k != m {
                    p = h[(k, k - 1)];
                    q = h[(k + 1, k - 1)];
                    r = if notlast { h[(k + 2, k - 1)] } else { 0.0 };
                    x = p.abs() + q.abs() + r.abs();
                    if x == 0.0 {
                        continue;
                    }
                    p /= x;
                    q /= x;
                    r /= x;
                }
                s = libm::sqrt(p * p + q * q + r * r);
                if p < 0.0 {
                    s = -s;
                }
                if s != 0.0 {
                    if k != m {
                        h[(k, k - 1)] = -s * x;
                    } else if l != m {
                        h[(k, k - 1)] = -h[(k, k - 1)];
                    }
                    p += s;
                    x = p / s;
                    y = q / s;
                    z = r / s;
                    q /= p;
                    r /= p;

                    for j in k..nn {
                        p = h[(k, j)] + q * h[(k + 1, j)];
                        if notlast {
                            p += r * h[(k + 2, j)];
                            h[(k + 2, j)] -= p * z;
                        }
                        h[(k, j)] -= p * x;
                        h[(k + 1, j)] -= p * y;
                    }
                    for i in 0..=nu.min(k + 3) {
                        p = x * h[(i, k)] + y * h[(i, k + 1)];
                        if notlast {
                            p += z * h[(i, k + 2)];
                            h[(i, k + 2)] -= p * r;
                        }
                        h[(i, k)] -= p;
                        h[(i, k + 1)] -= p * q;
                    }
                    for i in 0..nn {
                        p = x * v[(i, k)] + y * v[(i, k + 1)];
                        if notlast {
                            p += z * v[(i, k + 2)];
                            v[(i, k + 2)] -= p * r;
                        }
                        v[(i, k)] -= p;
                        v[(i, k + 1)] -= p * q;
                    }
                }
            }
        }
    }
    Ok(())
}
