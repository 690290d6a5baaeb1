//! Gramians, square-root balancing, and the two balancing-related reduced
//! models: balanced truncation (BT) and singular perturbation approximation
//! (SPA), both carrying the a priori constant `2 Σ_{j>n} σ_j`.

use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;
use core::sync::atomic::{AtomicUsize, Ordering};

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::{schur, solve_lyapunov_schur, svd, symmetric_eigen, LyapunovKind, SchurForm};
use crate::lti::StateSpaceModel;

/// Hankel singular values below this fraction of `σ₁` are treated as zero
/// when forming the balancing transformation.
pub const BALANCE_RANK_TOL: f64 = 1e-13;
/// Minimum relative gap `σ_n − σ_{n+1}` (in units of `σ₁`) for a valid cut.
pub const HSV_GAP_TOL: f64 = 1e-10;

/// Controllability and observability Gramians of a stable model, with the
/// Schur form of `A` they were computed from.
#[derive(Debug, Clone)]
pub struct GramianPair {
    /// `A P + P Aᵀ + b bᵀ = 0`
    pub p: DMatrix<f64>,
    /// `Aᵀ Q + Q A + cᵀ c = 0`
    pub q: DMatrix<f64>,
    pub schur: SchurForm,
}

static GRAMIAN_SOLVES: AtomicUsize = AtomicUsize::new(0);

/// Number of calls to [`gramians`] so far in this process.
pub fn gramian_count() -> usize {
    GRAMIAN_SOLVES.load(Ordering::Relaxed)
}

pub fn gramians(model: &StateSpaceModel) -> Result<GramianPair> {
    model.require_stable()?;
    GRAMIAN_SOLVES.fetch_add(1, Ordering::Relaxed);
    let sf = schur(model.a())?;
    let bb = model.b() * model.b().transpose();
    let cc = model.c() * model.c().transpose();
    let p = solve_lyapunov_schur(&sf, &bb, LyapunovKind::Controllability)?;
    let q = solve_lyapunov_schur(&sf, &cc, LyapunovKind::Observability)?;
    Ok(GramianPair { p, q, schur: sf })
}

/// Square-root balancing of a stable model.
///
/// `tb` is `r × N` and `tb_inv` is `N × r`, where `r` is the number of Hankel
/// singular values above [`BALANCE_RANK_TOL`]`·σ₁`; `tb · tb_inv = I_r`.
/// States beyond `r` are numerically uncontrollable or unobservable.
#[derive(Debug, Clone)]
pub struct BalancedRealization {
    pub tb: DMatrix<f64>,
    pub tb_inv: DMatrix<f64>,
    /// All `N` Hankel singular values, nonincreasing.
    pub hsv: Vec<f64>,
    a: DMatrix<f64>,
    b: DVector<f64>,
    c: DVector<f64>,
    d: f64,
}

impl BalancedRealization {
    pub fn full_order(&self) -> usize {
        self.hsv.len()
    }

    /// Dimension of the balanced (numerically minimal) realization.
    pub fn rank(&self) -> usize {
        self.tb.nrows()
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn b(&self) -> &DVector<f64> {
        &self.b
    }

    pub fn c(&self) -> &DVector<f64> {
        &self.c
    }

    /// `2 Σ_{j>n} σ_j`.
    pub fn apriori_constant(&self, n: usize) -> f64 {
        2.0 * self.hsv.iter().skip(n).sum::<f64>()
    }

    fn check_order(&self, n: usize) -> Result<()> {
        let full = self.full_order();
        if n == 0 || n >= full {
            return Err(Error::InvalidOrder { n, full });
        }
        if n > self.rank() {
            return Err(Error::RankDeficient {
                n,
                rank: self.rank(),
            });
        }
        let (sn, snext) = (self.hsv[n - 1], self.hsv[n]);
        if sn - snext < HSV_GAP_TOL * self.hsv[0] {
            return Err(Error::HsvGap {
                n,
                sigma_n: sn,
                sigma_next: snext,
            });
        }
        Ok(())
    }
}

fn psd_factor(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let eig = symmetric_eigen(m)?;
    let mut f = eig.eigenvectors;
    for (j, &lam) in eig.eigenvalues.iter().enumerate() {
        let s = libm::sqrt(lam.max(0.0));
        f.column_mut(j).scale_mut(s);
    }
    Ok(f)
}

pub fn balance(model: &StateSpaceModel, gram: &GramianPair) -> Result<BalancedRealization> {
    let n = model.order();
    if gram.p.nrows() != n || gram.q.nrows() != n {
        return Err(Error::DimensionMismatch {
            what: "Gramian size",
            expected: n,
            found: gram.p.nrows(),
        });
    }
    let lp = psd_factor(&gram.p)?;
    let lq = psd_factor(&gram.q)?;
    let m = lq.transpose() * &lp;
    let svd = svd(&m)?;
    let (u, vt) = match (svd.u, svd.v_t) {
        (Some(u), Some(vt)) => (u, vt),
        _ => return Err(Error::Singular("balancing SVD")),
    };
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    let hsv: Vec<f64> = order
        .iter()
        .map(|&i| svd.singular_values[i].max(0.0))
        .collect();

    let sigma1 = hsv[0];
    let rank = hsv
        .iter()
        .take_while(|&&s| s > BALANCE_RANK_TOL * sigma1 && s > 0.0)
        .count();
    if rank == 0 {
        return Err(Error::RankDeficient { n: 1, rank: 0 });
    }

    let mut tb = DMatrix::<f64>::zeros(rank, n);
    let mut tb_inv = DMatrix::<f64>::zeros(n, rank);
    for (k, &idx) in order.iter().take(rank).enumerate() {
        let scale = 1.0 / libm::sqrt(hsv[k]);
        let zk = u.column(idx);
        let yk = vt.row(idx).transpose();
        tb.row_mut(k).copy_from(&((&lq * zk).transpose() * scale));
        tb_inv.column_mut(k).copy_from(&(&lp * yk * scale));
    }

    let a = &tb * model.a() * &tb_inv;
    let b = &tb * model.b();
    let c = tb_inv.transpose() * model.c();
    Ok(BalancedRealization {
        tb,
        tb_inv,
        hsv,
        a,
        b,
        c,
        d: model.d(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    BalancedTruncation,
    SingularPerturbation,
}

impl Method {
    pub fn short_name(&self) -> &'static str {
        match self {
            Method::BalancedTruncation => "bt",
            Method::SingularPerturbation => "spa",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::BalancedTruncation => f.write_str("BT"),
            Method::SingularPerturbation => f.write_str("SPA"),
        }
    }
}

impl FromStr for Method {
    type Err = &'static str;

    fn from_str(s: &str) -> core::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "bt" => Ok(Method::BalancedTruncation),
            "spa" => Ok(Method::SingularPerturbation),
            _ => Err("expected BT or SPA"),
        }
    }
}

/// A reduced model together with its a priori error constant.
#[derive(Debug, Clone)]
pub struct ReducedModel {
    pub model: StateSpaceModel,
    pub method: Method,
    /// `2 Σ_{j>n} σ_j`
    pub alpha: f64,
    /// Rows of the balancing transformation kept by the reduction (`n × N`);
    /// `W x0` is the balanced projection of a full initial state.
    pub projection: DMatrix<f64>,
}

impl ReducedModel {
    pub fn order(&self) -> usize {
        self.model.order()
    }

    /// Balanced projection `W x0` of a full-order initial state.
    pub fn project_state(&self, x0: &DVector<f64>) -> DVector<f64> {
        &self.projection * x0
    }
}

fn finish(
    model: StateSpaceModel,
    method: Method,
    bal: &BalancedRealization,
    n: usize,
) -> Result<ReducedModel> {
    if !model.is_stable() {
        return Err(Error::UnstableReducedModel {
            abscissa: model.spectral_abscissa(),
        });
    }
    Ok(ReducedModel {
        model,
        method,
        alpha: bal.apriori_constant(n),
        projection: bal.tb.rows(0, n).into_owned(),
    })
}

pub fn truncate_bt(bal: &BalancedRealization, n: usize) -> Result<ReducedModel> {
    bal.check_order(n)?;
    let a = bal.a.view((0, 0), (n, n)).into_owned();
    let b = bal.b.rows(0, n).into_owned();
    let c = bal.c.rows(0, n).into_owned();
    let model = StateSpaceModel::new(a, b, c, bal.d)?;
    finish(model, Method::BalancedTruncation, bal, n)
}

pub fn truncate_spa(bal: &BalancedRealization, n: usize) -> Result<ReducedModel> {
    bal.check_order(n)?;
    let r = bal.rank();
    let a11 = bal.a.view((0, 0), (n, n)).into_owned();
    let b1 = bal.b.rows(0, n).into_owned();
    let c1 = bal.c.rows(0, n).into_owned();
    if r == n {
        let model = StateSpaceModel::new(a11, b1, c1, bal.d)?;
        return finish(model, Method::SingularPerturbation, bal, n);
    }
    let k = r - n;
    let a12 = bal.a.view((0, n), (n, k));
    let a21 = bal.a.view((n, 0), (k, n));
    let a22 = bal.a.view((n, n), (k, k)).into_owned();
    let b2 = bal.b.rows(n, k);
    let c2 = bal.c.rows(n, k);

    let mut rhs = DMatrix::<f64>::zeros(k, n + 1);
    rhs.view_mut((0, 0), (k, n)).copy_from(&a21);
    rhs.view_mut((0, n), (k, 1)).copy_from(&b2);
    let lu = a22.lu();
    let sol = lu
        .solve(&rhs)
        .filter(|s| s.iter().all(|v| v.is_finite()))
        .ok_or(Error::Singular("residualized block A22"))?;
    let xa = sol.view((0, 0), (k, n));
    let xb = sol.column(n);

    let a = a11 - a12 * xa;
    let b = b1 - a12 * xb;
    let c = c1 - xa.transpose() * c2;
    let d = bal.d - c2.dot(&xb);
    let model = StateSpaceModel::new(a, b, c, d)?;
    finish(model, Method::SingularPerturbation, bal, n)
}

/// Reduce with the given method.
pub fn reduce(bal: &BalancedRealization, n: usize, method: Method) -> Result<ReducedModel> {
    match method {
        Method::BalancedTruncation => truncate_bt(bal, n),
        Method::SingularPerturbation => truncate_spa(bal, n),
    }
}
