mod common;

use std::f64::consts::PI;

use balbound::bounds::{
    aposteriori_bound, build_error_system, error_gramian, fourier_approximation,
    initial_condition_bound, measured_error, offline_precompute, remainder_norm,
    steady_state_moments, FourierApproximation,
};
use balbound::lti::l2_norm_simpson;
use balbound::reduction::{balance, gramians, reduce, GramianPair};
use balbound::{Error, Method, ReducedModel, SampledSignal, StateSpaceModel, TimeGrid};
use common::*;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

fn scalar(a: f64, b: f64, c: f64, d: f64) -> StateSpaceModel {
    StateSpaceModel::new(
        DMatrix::from_element(1, 1, a),
        DVector::from_element(1, b),
        DVector::from_element(1, c),
        d,
    )
    .unwrap()
}

struct Case {
    fom: StateSpaceModel,
    gram: GramianPair,
    rom: ReducedModel,
}

fn random_case(r: &mut ChaCha8Rng, n_max: usize) -> Case {
    loop {
        let n = r.gen_range(3..=n_max);
        let fom = random_model(r, n);
        let gram = gramians(&fom).unwrap();
        let bal = balance(&fom, &gram).unwrap();
        let k = r.gen_range(1..bal.rank().min(n - 1).max(2));
        let method = if r.gen_bool(0.5) {
            Method::BalancedTruncation
        } else {
            Method::SingularPerturbation
        };
        if let Ok(rom) = reduce(&bal, k, method) {
            return Case { fom, gram, rom };
        }
    }
}

fn random_grid(r: &mut ChaCha8Rng) -> TimeGrid {
    let t = if r.gen_bool(0.5) {
        2.0 * PI
    } else {
        r.gen_range(1.0..8.0)
    };
    TimeGrid::new(t, 2000).unwrap()
}

/// Exact K-term Fourier sum with random coefficients.
fn fourier_sum(r: &mut ChaCha8Rng, grid: TimeGrid, k: usize) -> SampledSignal {
    let lambda: Vec<f64> = (0..2 * k + 1).map(|_| r.gen_range(-1.0..1.0)).collect();
    let fa = FourierApproximation {
        k,
        t_final: grid.t_final(),
        lambda,
        norm_wk: 0.0,
        norm_u: 0.0,
        remainder_direct: 0.0,
    };
    fa.sample(&grid)
}

#[test]
fn scalar_error_gramian() {
    let fom = scalar(-1.0, 1.0, 1.0, 0.0);
    let rom = scalar(-2.0, 1.0, 1.0, 0.0);
    let g = gramians(&fom).unwrap();
    let eg = error_gramian(&fom, &rom, &g).unwrap();
    assert!((eg.q[(0, 0)] - 0.5).abs() < 1e-15);
    assert!((eg.qhat[(0, 0)] - 0.25).abs() < 1e-15);
    assert!((eg.s[(0, 0)] + 1.0 / 3.0).abs() < 1e-15);
}

#[test]
fn identical_models_have_singular_error_gramian() {
    let mut r = rng(41);
    let fom = random_model(&mut r, 7);
    let g = gramians(&fom).unwrap();
    let eg = error_gramian(&fom, &fom, &g).unwrap();
    assert!((&eg.s + &eg.q).norm() <= 1e-10 * eg.q.norm());
    assert!((&eg.qhat - &eg.q).norm() <= 1e-10 * eg.q.norm());
    let v = uniform_vec(&mut r, 7, -1.0, 1.0);
    let xc = DVector::from_iterator(14, v.iter().chain(v.iter()).copied());
    assert!(initial_condition_bound(&eg, &xc).unwrap() < 1e-6);
    assert_eq!(
        initial_condition_bound(&eg, &DVector::zeros(14)).unwrap(),
        0.0
    );

    let es = build_error_system(&fom, &fom).unwrap();
    let u = SampledSignal::from_fn(TimeGrid::new(2.0 * PI, 500).unwrap(), |t| t.cos());
    let ss = steady_state_moments(&es, &fourier_approximation(&u, 3).unwrap()).unwrap();
    assert!(ss.norm_fst < 1e-12);
}

#[test]
fn assembled_error_gramian_solves_error_lyapunov_equation() {
    let mut r = rng(42);
    for _ in 0..5 {
        let case = random_case(&mut r, 25);
        let eg = error_gramian(&case.fom, &case.rom.model, &case.gram).unwrap();
        let es = build_error_system(&case.fom, &case.rom.model).unwrap();
        let q = eg.assembled();
        let a = es.model().a();
        let c = es.model().c();
        let res = a.transpose() * &q + &q * a + c * c.transpose();
        assert!(res.norm() <= 1e-8 * (c.norm_squared()).max(1.0));
        assert!((&q - q.transpose()).norm() <= 1e-12 * q.norm());
        let min = q.clone().symmetric_eigen().eigenvalues.min();
        assert!(min >= -1e-10 * q.norm());
    }
}

#[test]
fn scalar_steady_state_closed_form() {
    // Error system diag(-1, -2), b = [1; 1], c = [1, -1], w = cos t on [0, 2π].
    let fom = scalar(-1.0, 1.0, 1.0, 0.0);
    let rom = scalar(-2.0, 1.0, 1.0, 0.0);
    let es = build_error_system(&fom, &rom).unwrap();
    let grid = TimeGrid::new(2.0 * PI, 2000).unwrap();
    let fa = fourier_approximation(&SampledSignal::from_fn(grid, f64::cos), 1).unwrap();
    let ss = steady_state_moments(&es, &fa).unwrap();
    let i = Complex64::i();
    let g1 = 1.0 / (i + 1.0) - 1.0 / (i + 2.0);
    assert!((ss.transfer[1] - g1).norm() < 1e-14);
    assert!(rel_diff(ss.norm_fst, PI.sqrt() * g1.norm()) < 1e-6);

    // Started from x_st0 the response is exactly periodic.
    let w = fa.sample(&grid);
    let y = es.simulate(&w, &ss.x_st0).unwrap();
    assert!(rel_diff(y.l2_norm(), ss.norm_fst) < 1e-5);
}

#[test]
fn zero_input_and_state_give_zero_bound() {
    let mut r = rng(43);
    let case = random_case(&mut r, 12);
    let eg = error_gramian(&case.fom, &case.rom.model, &case.gram).unwrap();
    let u = SampledSignal::zeros(TimeGrid::new(3.0, 800).unwrap());
    let (n, k) = (case.fom.order(), case.rom.order());
    let rep = aposteriori_bound(
        &case.fom,
        &case.rom.model,
        &u,
        &DVector::zeros(n),
        &DVector::zeros(k),
        5,
        case.rom.alpha,
        &eg,
    )
    .unwrap();
    assert_eq!(rep.gamma, 0.0);
    assert_eq!(rep.apriori, 0.0);
}

#[test]
fn offline_matches_one_shot_and_respects_cache() {
    let mut r = rng(44);
    let case = random_case(&mut r, 20);
    let grid = TimeGrid::new(2.0 * PI, 1500).unwrap();
    let off = offline_precompute(&case.fom, &case.rom, &case.gram, 12, grid.t_final()).unwrap();
    let eg = error_gramian(&case.fom, &case.rom.model, &case.gram).unwrap();
    for k in [0, 3, 12] {
        let u = band_limited_input(&mut r, grid, 10.0);
        let x0 = uniform_vec(&mut r, case.fom.order(), -1.0, 1.0);
        let x0r = uniform_vec(&mut r, case.rom.order(), -1.0, 1.0);
        let a = off.evaluate(&u, &x0, &x0r, k).unwrap();
        let b = aposteriori_bound(
            &case.fom,
            &case.rom.model,
            &u,
            &x0,
            &x0r,
            k,
            case.rom.alpha,
            &eg,
        )
        .unwrap();
        assert!(
            rel_diff(a.gamma, b.gamma) < 1e-10,
            "{} vs {}",
            a.gamma,
            b.gamma
        );
        assert!(rel_diff(a.term_steady, b.term_steady) < 1e-12);
        assert!((a.term_transient - b.term_transient).abs() < 1e-9 * b.term_transient.max(1e-3));
        assert!(rel_diff(a.apriori, b.apriori) < 1e-10);
        assert_eq!(a, off.evaluate(&u, &x0, &x0r, k).unwrap());
    }
    let u = SampledSignal::zeros(grid);
    let (x0, x0r) = (
        DVector::zeros(case.fom.order()),
        DVector::zeros(case.rom.order()),
    );
    assert!(matches!(
        off.evaluate(&u, &x0, &x0r, 13),
        Err(Error::OrderExceedsCache { k: 13, k_max: 12 })
    ));
    let other = SampledSignal::zeros(TimeGrid::new(5.0, 1500).unwrap());
    assert!(matches!(
        off.evaluate(&other, &x0, &x0r, 2),
        Err(Error::HorizonMismatch { .. })
    ));
}

#[test]
fn tightness_for_exact_fourier_input_from_steady_state() {
    let mut r = rng(45);
    for _ in 0..10 {
        let case = random_case(&mut r, 20);
        let grid = random_grid(&mut r);
        let k = [1usize, 3, 10][r.gen_range(0..3)];
        let u = fourier_sum(&mut r, grid, k);
        let off = offline_precompute(&case.fom, &case.rom, &case.gram, k, grid.t_final()).unwrap();
        let fa = fourier_approximation(&u, k).unwrap();
        let xst = off.moments().steady_initial_state(&fa).unwrap();
        let n = case.fom.order();
        let (x0, x0r) = (
            xst.rows(0, n).into_owned(),
            xst.rows(n, case.rom.order()).into_owned(),
        );
        let rep = off.evaluate_with_error(&u, &x0, &x0r, k).unwrap();
        assert!(rep.term_rest < 1e-8 * rep.norm_u.max(1.0) * case.rom.alpha.max(1.0));
        assert!(rep.term_transient < 1e-6 * rep.gamma.max(1e-6));
        let e = rep.actual_error.unwrap();
        // Absolute floor for near-exact reductions where both are round-off.
        assert!(
            (e - rep.gamma).abs() <= 2e-3 * rep.gamma + 1e-9,
            "e={e} gamma={}",
            rep.gamma
        );
    }
}

#[test]
fn initial_condition_bound_is_asymptotically_exact() {
    let mut r = rng(46);
    for _ in 0..8 {
        let n = r.gen_range(2..8);
        let a = stable_matrix(&mut r, n, -4.0, -1.0);
        let fom = StateSpaceModel::new(
            a,
            uniform_vec(&mut r, n, -1.0, 1.0),
            uniform_vec(&mut r, n, -1.0, 1.0),
            0.0,
        )
        .unwrap();
        let gram = gramians(&fom).unwrap();
        let bal = balance(&fom, &gram).unwrap();
        let Ok(rom) = reduce(&bal, 1, Method::BalancedTruncation) else {
            continue;
        };
        let eg = error_gramian(&fom, &rom.model, &gram).unwrap();
        let es = build_error_system(&fom, &rom.model).unwrap();
        let t = 20.0 / -es.model().spectral_abscissa();
        assert!((es.model().spectral_abscissa() * t).exp() < 1e-8);
        let m = (t * es.model().a().norm() * 100.0).max(20_000.0) as usize;
        let grid = TimeGrid::new(t, m).unwrap();
        let xc = uniform_vec(&mut r, n + 1, -1.0, 1.0);
        let y = es.simulate(&SampledSignal::zeros(grid), &xc).unwrap();
        let bound = initial_condition_bound(&eg, &xc).unwrap();
        let sim = l2_norm_simpson(&y);
        assert!(
            bound >= sim * (1.0 - 1e-9),
            "bound={bound} sim={sim} trap={}",
            y.l2_norm()
        );
        assert!(rel_diff(bound, y.l2_norm()) < 1e-3);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn gamma_bounds_the_reduction_error(seed in any::<u64>(), ki in 0usize..4) {
        let mut r = rng(seed);
        let k = [0usize, 1, 3, 10][ki];
        let case = random_case(&mut r, 30);
        let grid = random_grid(&mut r);
        let u = band_limited_input(&mut r, grid, 10.0);
        let x0 = uniform_vec(&mut r, case.fom.order(), -1.0, 1.0);
        let x0r = uniform_vec(&mut r, case.rom.order(), -1.0, 1.0);
        let off = offline_precompute(&case.fom, &case.rom, &case.gram, k, grid.t_final()).unwrap();
        let rep = off.evaluate(&u, &x0, &x0r, k).unwrap();
        let e = measured_error(&case.fom, &case.rom.model, &u, &x0, &x0r).unwrap();
        prop_assert!(e <= rep.gamma + 1e-6, "e={} gamma={}", e, rep.gamma);
        prop_assert!(e <= rep.apriori + 1e-6);
        prop_assert!(rep.term_steady >= 0.0 && rep.term_transient >= 0.0 && rep.term_rest >= 0.0);
        prop_assert_eq!(rep.gamma, rep.term_steady + rep.term_transient + rep.term_rest);
    }

    #[test]
    fn apriori_bound_holds_from_rest(seed in any::<u64>()) {
        let mut r = rng(seed);
        let case = random_case(&mut r, 30);
        let grid = random_grid(&mut r);
        let u = band_limited_input(&mut r, grid, 10.0);
        let (x0, x0r) = (DVector::zeros(case.fom.order()), DVector::zeros(case.rom.order()));
        let e = measured_error(&case.fom, &case.rom.model, &u, &x0, &x0r).unwrap();
        prop_assert!(e <= case.rom.alpha * u.l2_norm() + 1e-6);
    }

    #[test]
    fn three_way_split_reproduces_error(seed in any::<u64>(), k in 0usize..8) {
        let mut r = rng(seed);
        let case = random_case(&mut r, 20);
        let grid = random_grid(&mut r);
        let u = band_limited_input(&mut r, grid, 10.0);
        let x0 = uniform_vec(&mut r, case.fom.order(), -1.0, 1.0);
        let x0r = uniform_vec(&mut r, case.rom.order(), -1.0, 1.0);
        let es = build_error_system(&case.fom, &case.rom.model).unwrap();
        let fa = fourier_approximation(&u, k).unwrap();
        let ss = steady_state_moments(&es, &fa).unwrap();
        let xe0 = es.stack_state(&x0, &x0r).unwrap();
        let w = fa.sample(&grid);
        let y_st = es.simulate(&w, &ss.x_st0).unwrap();
        let y_xc = es.simulate(&SampledSignal::zeros(grid), &(&xe0 - &ss.x_st0)).unwrap();
        let y_rest = es.simulate(&u.sub(&w).unwrap(), &DVector::zeros(xe0.len())).unwrap();
        let e = es.simulate(&u, &xe0).unwrap();
        for i in 0..grid.len() {
            let sum = y_st.values()[i] + y_xc.values()[i] + y_rest.values()[i];
            prop_assert!((sum - e.values()[i]).abs() < 1e-8);
        }
    }

    #[test]
    fn steady_norm_matches_sampled_steady_output(seed in any::<u64>(), k in 0usize..12) {
        let mut r = rng(seed);
        let case = random_case(&mut r, 20);
        let grid = random_grid(&mut r);
        let u = band_limited_input(&mut r, grid, 10.0);
        let es = build_error_system(&case.fom, &case.rom.model).unwrap();
        let fa = fourier_approximation(&u, k).unwrap();
        let off = offline_precompute(&case.fom, &case.rom, &case.gram, k, grid.t_final()).unwrap();
        let ss = steady_state_moments(&es, &fa).unwrap();
        let y = off.moments().steady_output(&fa, &grid).unwrap();
        prop_assume!(ss.norm_fst > 1e-10);
        prop_assert!(rel_diff(ss.norm_fst, y.l2_norm()) < 1e-5);
    }

    #[test]
    fn parseval_and_nested_remainders(seed in any::<u64>()) {
        let mut r = rng(seed);
        let grid = random_grid(&mut r);
        let u = band_limited_input(&mut r, grid, 25.0);
        let mut last = f64::INFINITY;
        for k in 0..=20 {
            let fa = fourier_approximation(&u, k).unwrap();
            let sampled = fa.sample(&grid).l2_norm();
            prop_assert!(rel_diff(fa.norm_wk, sampled) < 1e-5 || fa.norm_wk < 1e-12);
            prop_assert!(fa.norm_wk <= fa.norm_u * (1.0 + 1e-12));
            let rest = remainder_norm(&fa);
            prop_assert!((rest - fa.remainder_direct).abs() <= 1e-6 * fa.norm_u);
            prop_assert!(rest <= last * (1.0 + 1e-12) + 1e-14);
            last = rest;
        }
    }
}
