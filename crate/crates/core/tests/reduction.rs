mod common;

use balbound::linalg::{schur, solve_lyapunov_schur, LyapunovKind};
use balbound::reduction::{balance, gramians, reduce, truncate_bt, truncate_spa};
use balbound::{Error, Method, StateSpaceModel};
use common::*;
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::Rng;

#[test]
fn spa_preserves_dc_gain() {
    let mut r = rng(31);
    let mut checked = 0;
    while checked < 20 {
        let n = r.gen_range(3..25);
        let fom = random_model(&mut r, n);
        let bal = balance(&fom, &gramians(&fom).unwrap()).unwrap();
        let k = r.gen_range(1..n.min(bal.rank()));
        let Ok(spa) = truncate_spa(&bal, k) else {
            continue;
        };
        let (g, gr) = (fom.dc_gain().unwrap(), spa.model.dc_gain().unwrap());
        assert!(
            rel_diff(g, gr) < 1e-8 || (g - gr).abs() < 1e-12,
            "n={n} k={k}: {g} vs {gr}"
        );
        let bt = truncate_bt(&bal, k).unwrap();
        assert_eq!(bt.alpha, spa.alpha);
        checked += 1;
    }
}

#[test]
fn hsv_squares_are_eigenvalues_of_pq() {
    let mut r = rng(32);
    for _ in 0..10 {
        let n = r.gen_range(2..15);
        let fom = random_model(&mut r, n);
        let g = gramians(&fom).unwrap();
        let bal = balance(&fom, &g).unwrap();
        let pq = &g.p * &g.q;
        let mut ev: Vec<f64> = schur(&pq)
            .unwrap()
            .eigenvalues()
            .iter()
            .map(|z| z.re)
            .collect();
        ev.sort_by(|a, b| b.total_cmp(a));
        for (s, l) in bal.hsv.iter().zip(&ev) {
            assert!((s * s - l).abs() <= 1e-8 * ev[0], "{} vs {}", s * s, l);
        }
    }
}

#[test]
fn balanced_gramians_are_diagonal() {
    let mut r = rng(33);
    for _ in 0..10 {
        let n = r.gen_range(2..20);
        let fom = random_model(&mut r, n);
        let bal = balance(&fom, &gramians(&fom).unwrap()).unwrap();
        let rk = bal.rank();
        let sf = schur(bal.a()).unwrap();
        let p = solve_lyapunov_schur(
            &sf,
            &(bal.b() * bal.b().transpose()),
            LyapunovKind::Controllability,
        )
        .unwrap();
        let q = solve_lyapunov_schur(
            &sf,
            &(bal.c() * bal.c().transpose()),
            LyapunovKind::Observability,
        )
        .unwrap();
        let sig = DMatrix::from_diagonal(&DVector::from_iterator(
            rk,
            bal.hsv.iter().take(rk).copied(),
        ));
        assert!((&p - &sig).norm() <= 1e-8 * bal.hsv[0]);
        assert!((&q - &sig).norm() <= 1e-8 * bal.hsv[0]);
        let id = &bal.tb * &bal.tb_inv;
        assert!((id - DMatrix::<f64>::identity(rk, rk)).norm() < 1e-8);
    }
}

#[test]
fn order_errors() {
    let mut r = rng(34);
    let fom = random_model(&mut r, 6);
    let bal = balance(&fom, &gramians(&fom).unwrap()).unwrap();
    assert!(matches!(
        reduce(&bal, 0, Method::BalancedTruncation),
        Err(Error::InvalidOrder { .. })
    ));
    assert!(matches!(
        reduce(&bal, 6, Method::SingularPerturbation),
        Err(Error::InvalidOrder { .. })
    ));

    // Two identical decoupled copies give repeated HSVs.
    let a = DMatrix::from_diagonal(&DVector::from_vec(vec![-1.0, -1.0, -3.0]));
    let m = StateSpaceModel::new(
        a,
        DVector::from_vec(vec![1.0, 1.0, 1.0]),
        DVector::from_vec(vec![1.0, 1.0, 1.0]),
        0.0,
    )
    .unwrap();
    let bal = balance(&m, &gramians(&m).unwrap()).unwrap();
    assert_eq!(bal.rank(), 2);
    assert!(matches!(reduce(&bal, 2, Method::BalancedTruncation), Ok(rom) if rom.alpha < 1e-12));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn reduced_models_are_stable_with_nonincreasing_alpha(seed in any::<u64>(), n in 3usize..20) {
        let mut r = rng(seed);
        let fom = random_model(&mut r, n);
        let bal = balance(&fom, &gramians(&fom).unwrap()).unwrap();
        prop_assert!(bal.hsv.windows(2).all(|w| w[0] >= w[1]));
        let mut last = f64::INFINITY;
        for k in 1..n.min(bal.rank()) {
            for method in [Method::BalancedTruncation, Method::SingularPerturbation] {
                match reduce(&bal, k, method) {
                    Ok(rom) => {
                        prop_assert!(rom.model.is_stable());
                        prop_assert!(rom.alpha <= last);
                        prop_assert_eq!(rom.alpha, bal.apriori_constant(k));
                    }
                    Err(Error::HsvGap { .. }) => {}
                    Err(e) => prop_assert!(false, "{e}"),
                }
            }
            last = bal.apriori_constant(k);
        }
    }
}
