mod common;

use balbound::linalg::{
    expm, lyapunov_residual, schur, solve_lyapunov, solve_lyapunov_schur, solve_sylvester,
    solve_sylvester_schur, sylvester_residual, LyapunovKind,
};
use balbound::reduction::gramians;
use balbound::Error;
use common::*;
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::Rng;

const GL5: [(f64, f64); 5] = [
    (0.0, 0.568_888_888_888_889),
    (-0.538_469_310_105_683, 0.478_628_670_499_366),
    (0.538_469_310_105_683, 0.478_628_670_499_366),
    (-0.906_179_845_938_664, 0.236_926_885_056_189),
    (0.906_179_845_938_664, 0.236_926_885_056_189),
];

/// `∫₀^∞ e^{Aᵀt} W e^{At} dt` by composite Gauss–Legendre on a short
/// interval followed by doubling `X(2t) = X(t) + e^{Aᵀt} X(t) e^{At}`.
fn quadrature_gramian(a: &DMatrix<f64>, w: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    let h = 0.25 / a.norm().max(1.0);
    let pieces = 8;
    let dh = h / pieces as f64;
    let mut x = DMatrix::zeros(n, n);
    for p in 0..pieces {
        let mid = (p as f64 + 0.5) * dh;
        for (node, weight) in GL5 {
            let t = mid + 0.5 * dh * node;
            let e = expm(&(a * t)).unwrap();
            x += e.transpose() * w * &e * (0.5 * dh * weight);
        }
    }
    let mut e = expm(&(a * h)).unwrap();
    for _ in 0..60 {
        x = &x + e.transpose() * &x * &e;
        e = &e * &e;
        if e.norm() < 1e-18 {
            break;
        }
    }
    x
}

#[test]
fn diagonal_closed_form() {
    let mut r = rng(11);
    for n in [1usize, 2, 5, 12, 40] {
        let lam: Vec<f64> = (0..n).map(|_| -r.gen_range(0.1..10.0)).collect();
        let a = DMatrix::from_diagonal(&DVector::from_vec(lam.clone()));
        let c = uniform_vec(&mut r, n, -1.0, 1.0);
        let w = &c * c.transpose();
        let x = solve_lyapunov(&a, &w).unwrap();
        for i in 0..n {
            for j in 0..n {
                let want = -w[(i, j)] / (lam[i] + lam[j]);
                assert!(
                    (x[(i, j)] - want).abs() <= 1e-10 * want.abs().max(1.0),
                    "n={n} ({i},{j})"
                );
            }
        }
    }
}

#[test]
fn lyapunov_matches_quadrature_oracle() {
    let mut r = rng(12);
    for _ in 0..10 {
        let n = r.gen_range(1..=8);
        let a = stable_matrix(&mut r, n, -3.0, -0.3);
        let c = uniform_vec(&mut r, n, -1.0, 1.0);
        let w = &c * c.transpose();
        let x = solve_lyapunov(&a, &w).unwrap();
        let oracle = quadrature_gramian(&a, &w);
        let rel = (&x - &oracle).norm() / oracle.norm();
        assert!(rel < 1e-4, "n={n} rel={rel:e}");
    }
}

#[test]
fn random_residuals() {
    let mut r = rng(13);
    for trial in 0..50 {
        let n = r.gen_range(1..=100);
        let model = random_model(&mut r, n);
        let g = gramians(&model).unwrap();
        let bb = model.b() * model.b().transpose();
        let cc = model.c() * model.c().transpose();
        let rp = lyapunov_residual(model.a(), &g.p, &bb, LyapunovKind::Controllability);
        let rq = lyapunov_residual(model.a(), &g.q, &cc, LyapunovKind::Observability);
        assert!(
            rp <= 1e-8 * bb.norm().max(1.0),
            "trial {trial} n={n} P residual {rp:e}"
        );
        assert!(
            rq <= 1e-8 * cc.norm().max(1.0),
            "trial {trial} n={n} Q residual {rq:e}"
        );

        let m = r.gen_range(1..=12);
        let b = stable_matrix(&mut r, m, -4.0, -0.1);
        let c = DMatrix::from_fn(n, m, |_, _| r.gen_range(-1.0..1.0));
        let x = solve_sylvester(model.a(), &b, &c).unwrap();
        let rs = sylvester_residual(model.a(), &b, &c, &x);
        assert!(
            rs <= 1e-8 * c.norm().max(1.0),
            "trial {trial} sylvester residual {rs:e}"
        );
    }
}

#[test]
fn transposed_operands_reuse_schur_forms() {
    let mut r = rng(14);
    let a = stable_matrix(&mut r, 9, -3.0, -0.2);
    let b = stable_matrix(&mut r, 4, -2.0, -0.5);
    let c = DMatrix::from_fn(9, 4, |_, _| r.gen_range(-1.0..1.0));
    let (sa, sb) = (schur(&a).unwrap(), schur(&b).unwrap());
    let x = solve_sylvester_schur(&sa, true, &sb, false, &c).unwrap();
    assert!(sylvester_residual(&a.transpose(), &b, &c, &x) < 1e-10);
    let x = solve_sylvester_schur(&sa, false, &sb, true, &c).unwrap();
    assert!(sylvester_residual(&a, &b.transpose(), &c, &x) < 1e-10);

    let w = &c * c.transpose();
    let p = solve_lyapunov_schur(&sa, &w, LyapunovKind::Controllability).unwrap();
    assert!(lyapunov_residual(&a, &p, &w, LyapunovKind::Controllability) < 1e-10);
    assert!((&p - p.transpose()).norm() == 0.0);
}

#[test]
fn spectrum_clash_and_instability_are_errors() {
    let a = DMatrix::from_row_slice(2, 2, &[-1.0, 0.0, 0.0, -2.0]);
    let b = DMatrix::from_row_slice(1, 1, &[1.0]);
    let c = DMatrix::from_element(2, 1, 1.0);
    assert!(matches!(
        solve_sylvester(&a, &b, &c),
        Err(Error::CommonEigenvalue { .. })
    ));
    let unstable = DMatrix::from_row_slice(2, 2, &[0.1, 1.0, 0.0, -1.0]);
    assert!(matches!(
        solve_lyapunov(&unstable, &DMatrix::identity(2, 2)),
        Err(Error::NotHurwitz { .. })
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn lyapunov_solution_is_symmetric_psd(seed in any::<u64>(), n in 1usize..20) {
        let mut r = rng(seed);
        let model = random_model(&mut r, n);
        let g = gramians(&model).unwrap();
        let scale = g.q.norm().max(1e-300);
        prop_assert!((&g.q - g.q.transpose()).norm() == 0.0);
        let min_eig = g.q.clone().symmetric_eigen().eigenvalues.min();
        prop_assert!(min_eig >= -1e-10 * scale);
    }

    #[test]
    fn schur_reconstructs(seed in any::<u64>(), n in 1usize..40) {
        let mut r = rng(seed);
        let a = DMatrix::from_fn(n, n, |_, _| r.gen_range(-2.0..2.0));
        let sf = schur(&a).unwrap();
        prop_assert!((sf.reconstruct() - &a).norm() <= 1e-12 * a.norm().max(1.0));
        let orth = sf.q.transpose() * &sf.q - DMatrix::<f64>::identity(n, n);
        prop_assert!(orth.norm() <= 1e-12 * n as f64);
    }
}
