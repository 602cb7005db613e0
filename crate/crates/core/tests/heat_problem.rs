mod common;

use common::*;
use heatvqe_core::heat::{self, GridParams, HeatProblem, OracleSolver, SpectrumKind};
use heatvqe_core::linalg::real_vector;
use heatvqe_core::{Complex64, Error};
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::Rng;

#[test]
fn matrix_matches_stencil() {
    for n in 2..=5 {
        let m = heat::build_matrix(n, 0.37).unwrap();
        let s = stencil(n, 0.37);
        for i in 0..1 << n {
            for j in 0..1 << n {
                assert_eq!(m.get(i, j), Complex64::new(s[(i, j)], 0.0), "({i},{j})");
            }
        }
        assert!(m.is_hermitian());
    }
}

#[test]
fn spectrum_matches_symmetric_eigensolver() {
    let mut r = rng(1);
    for n in 2..=7 {
        let c: f64 = r.random_range(0.05..3.0);
        let eig = stencil(n, c).symmetric_eigen().eigenvalues;
        let want = sorted(eig.iter().copied().collect());
        let got = sorted(heat::spectrum(n, c).unwrap());
        for (a, b) in got.iter().zip(&want) {
            assert!((a - b).abs() < 1e-10, "n={n}: {a} vs {b}");
        }
    }
}

#[test]
fn dft_diagonalizes_matrix_in_index_order() {
    for n in 2..=6 {
        let c = 0.8;
        let f = dft(n);
        let a = stencil(n, c).map(|x| Complex64::new(x, 0.0));
        let d = &f * a * f.adjoint();
        let lam = heat::spectrum(n, c).unwrap();
        for i in 0..1 << n {
            for j in 0..1 << n {
                let want = if i == j { lam[i] } else { 0.0 };
                assert!((d[(i, j)] - want).norm() < 1e-10, "n={n} ({i},{j})");
            }
        }
    }
}

#[test]
fn library_qft_is_the_dft_matrix() {
    let mut r = rng(2);
    for n in 2..=6 {
        let v = random_unit(1 << n, &mut r);
        let want: Vec<Complex64> = (dft(n) * vec_na(&v)).iter().copied().collect();
        assert!(max_diff(&heat::fourier_coefficients(&v), &want) < 1e-12);
    }
}

#[test]
fn fourier_diagonal_operator_rebuilds_the_matrix() {
    for n in 2..=6 {
        let m = heat::build_matrix(n, 1.3).unwrap();
        let f = heat::fourier_diagonal_operator(&heat::spectrum(n, 1.3).unwrap()).unwrap();
        assert!(m.max_abs_diff(&f) < 1e-12, "n={n}");
    }
}

#[test]
fn substituted_spectrum_agrees_with_shift_construction() {
    for n in 2..=8 {
        for c in [0.0f64, 0.1, 1.0, 2.5] {
            let a = heat::substituted_spectrum(n, c).unwrap();
            let b = heat::substituted_spectrum_via_shift(n, c).unwrap();
            let size = 1usize << n;
            for k in 0..size {
                assert!((a[k] - b[k]).abs() < 1e-12, "n={n} c={c} k={k}");
                assert!((a[k] - a[(size - k) % size]).abs() < 1e-12);
            }
            // The substitute is exact on the slowest mode and tight near it.
            assert_eq!(a[0], -c);
            let sine = heat::spectrum(n, c).unwrap();
            let k1 = (a[1] - sine[1]).abs();
            assert!(k1 <= 4.0 * std::f64::consts::PI.powi(4) / (3.0 * (size * size * size * size) as f64) + 1e-12);
            // Extremal mode of the substitute sits at −c − π².
            let pi2 = std::f64::consts::PI.powi(2);
            assert!((a[size / 2] + c + pi2).abs() < 1e-12);
        }
    }
}

#[test]
fn substituted_matrix_is_hermitian_and_circulant() {
    let m = heat::build_substituted_matrix(4, 0.5).unwrap();
    assert!(m.hermitian_deviation() < 1e-12);
    let size = 16;
    for i in 0..size {
        for j in 0..size {
            let shifted = m.get((i + 1) % size, (j + 1) % size);
            assert!((m.get(i, j) - shifted).norm() < 1e-12);
        }
    }
}

#[test]
fn condition_number_matches_extreme_eigenvalues() {
    let mut r = rng(3);
    for _ in 0..20 {
        let c: f64 = r.random_range(0.01..10.0);
        let n = r.random_range(2..=8);
        let lam = heat::spectrum(n, c).unwrap();
        let hi = lam.iter().fold(0.0f64, |a, x| a.max(x.abs()));
        let lo = lam.iter().fold(f64::INFINITY, |a, x| a.min(x.abs()));
        let kappa = heat::condition_number(c).unwrap();
        assert!((kappa - hi / lo).abs() <= 1e-12 * kappa, "c={c}");
    }
    assert_eq!(heat::condition_number(0.0f64), Err(Error::DivergentConditionNumber));
    assert!(matches!(heat::condition_number(-1.0f64), Err(Error::InvalidGridParameter(_))));
}

#[test]
fn lu_solve_matches_nalgebra() {
    let mut r = rng(4);
    for n in 2..=6 {
        let c: f64 = r.random_range(0.1..2.0);
        let m = heat::build_matrix(n, c).unwrap();
        let b = random_unit(1 << n, &mut r);
        let got = heat::classical_solve(&m, &b).unwrap();
        let want = dense_solve(&to_na(&m), &b);
        assert!(max_diff(&got, &want) < 1e-10, "n={n}");
    }
}

#[test]
fn spectral_solve_matches_lu() {
    let mut r = rng(5);
    for n in 2..=7 {
        let c: f64 = r.random_range(0.1..2.0);
        let b = random_unit(1 << n, &mut r);
        let x = heat::spectral_solve(&heat::spectrum(n, c).unwrap(), &b).unwrap();
        let y = heat::classical_solve(&heat::build_matrix(n, c).unwrap(), &b).unwrap();
        assert!(max_diff(&x, &y) < 1e-10);
        assert!(max_diff(&heat::apply_matrix(c, &x), &b) < 1e-12);
    }
}

#[test]
fn zero_c_is_solvable_only_on_zero_mean_data() {
    let n = 3;
    let eigs = heat::spectrum(n, 0.0).unwrap();
    let mut b = random_unit(8, &mut rng(6));
    let mean = b.iter().sum::<Complex64>() / 8.0;
    b.iter_mut().for_each(|z| *z -= mean);
    let x = heat::spectral_solve(&eigs, &b).unwrap();
    assert!(max_diff(&heat::apply_matrix(0.0, &x), &b) < 1e-12);
    assert!(x.iter().sum::<Complex64>().norm() < 1e-12);

    let ones = vec![Complex64::new(1.0, 0.0); 8];
    assert_eq!(heat::spectral_solve(&eigs, &ones), Err(Error::Singular));
}

#[test]
fn invalid_inputs_are_rejected() {
    assert_eq!(heat::build_matrix(1, 1.0f64).unwrap_err(), Error::TooFewQubits { n: 1, min: 2 });
    assert!(matches!(heat::spectrum(3, f64::NAN), Err(Error::InvalidGridParameter(_))));
    assert!(matches!(heat::build_matrix(3, -0.5f64), Err(Error::InvalidGridParameter(_))));
    if heat::dense_cap_qubits() < 20 {
        assert!(matches!(heat::build_matrix(20, 1.0f64), Err(Error::CapExceeded { qubits: 20, .. })));
    }
    let grid = GridParams::from_c(3, 1.0, 2).unwrap();
    assert!(matches!(heat::build_rhs(&[0.0; 4], &[0.0; 8], &grid), Err(Error::LengthMismatch { .. })));
    assert!(HeatProblem::new(grid, vec![0.0; 5], vec![]).is_err());
}

#[test]
fn grid_from_steps_derives_c() {
    let g = GridParams::from_steps(4, 3, 0.1f64, 0.02, 0.5).unwrap();
    assert!((g.c - 0.1 * 0.1 / (0.5 * 0.02)).abs() < 1e-15);
    let h = GridParams::from_c(4, 2.0f64, 3).unwrap();
    assert!((h.dz * h.dz / (h.a2 * h.dt) - 2.0).abs() < 1e-12);
    assert_eq!(h.n_z(), 16);
}

#[test]
fn problem_json_roundtrip() {
    let grid = GridParams::from_c(3, 0.75, 4).unwrap();
    let chi: Vec<f64> = (0..8).map(|i| (i as f64 * 0.7).sin()).collect();
    let f = vec![vec![0.25; 8], vec![-0.5; 8]];
    let p = HeatProblem::new(grid, chi, f).unwrap();
    let back = HeatProblem::<f64>::from_json(&p.to_json().unwrap()).unwrap();
    assert_eq!(back.chi, p.chi);
    assert_eq!(back.f, p.f);
    assert_eq!(back.grid.n, 3);
    assert!((back.grid.c - 0.75).abs() < 1e-12);
    assert!(HeatProblem::<f64>::from_json("{\"n\":3}").is_err());
}

#[test]
fn oracle_evolution_tracks_reference_exactly() {
    let grid = GridParams::from_c(4, 1.5, 6).unwrap();
    let chi: Vec<f64> = (0..16).map(|i| (2.0 * std::f64::consts::PI * i as f64 / 16.0).cos() + 0.3).collect();
    let p = HeatProblem::new(grid, chi.clone(), vec![vec![0.01; 16]]).unwrap();
    let mut solver = OracleSolver { kind: SpectrumKind::Sine };
    let rep = heat::time_step_evolve(&p, &mut solver, 6, SpectrumKind::Sine).unwrap();
    assert_eq!(rep.trajectory.len(), 7);
    assert!(rep.infidelity.iter().all(|&e| e < 1e-14));
    assert!(rep.bound_violations.is_empty());

    // Each layer really solves the implicit step against the previous one.
    for t in 1..rep.trajectory.len() {
        let prev: Vec<f64> = rep.trajectory[t - 1].iter().map(|z| z.re).collect();
        let b = real_vector(&heat::build_rhs(&prev, &[0.01; 16], &grid).unwrap());
        assert!(max_diff(&heat::apply_matrix(1.5, &rep.trajectory[t]), &b) < 1e-12);
    }
    // Diffusion damps the oscillating mode.
    let amp = |v: &[Complex64]| heat::fourier_coefficients(v)[1].norm();
    assert!(amp(&rep.trajectory[6]) < amp(&rep.trajectory[0]));

    let mut buf = Vec::new();
    heat::write_trajectory_csv(&mut buf, &rep.trajectory).unwrap();
    assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 1 + 7 * 16);
}

#[test]
fn multidim_matrix_is_a_kronecker_sum() {
    let (n, c) = (2, 0.6);
    let a0 = stencil(n, 0.0);
    let id = DMatrix::<f64>::identity(4, 4);
    let want = a0.kronecker(&id) + id.kronecker(&a0) - DMatrix::<f64>::identity(16, 16) * c;
    let got = heat::build_multidim_matrix(n, c, 2).unwrap();
    for i in 0..16 {
        for j in 0..16 {
            assert!((got.get(i, j).re - want[(i, j)]).abs() < 1e-14);
        }
    }
    // Per-axis DFT diagonalizes it with the library spectrum in index order.
    let f = dft_axes(n, 2);
    let d = &f * to_na(&got) * f.adjoint();
    let lam = heat::multidim_spectrum(n, c, 2, SpectrumKind::Sine).unwrap();
    for i in 0..16 {
        assert!((d[(i, i)].re - lam[i]).abs() < 1e-10);
    }
    assert!(heat::build_multidim_matrix(n, c, 0).is_err());
}

#[test]
fn single_precision_agrees_with_double() {
    let b64 = random_unit(16, &mut rng(7));
    let b32: Vec<heatvqe_core::C<f32>> = b64.iter().map(|z| heatvqe_core::C::new(z.re as f32, z.im as f32)).collect();
    let x64 = heat::spectral_solve(&heat::spectrum(4, 0.9f64).unwrap(), &b64).unwrap();
    let x32 = heat::spectral_solve(&heat::spectrum(4, 0.9f32).unwrap(), &b32).unwrap();
    for (a, b) in x64.iter().zip(&x32) {
        assert!((a.re - b.re as f64).abs() < 1e-4 && (a.im - b.im as f64).abs() < 1e-4);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn implicit_step_conserves_mean(n in 2usize..6, c in 0.05f64..5.0, seed in any::<u64>()) {
        let mut r = rng(seed);
        let u: Vec<f64> = (0..1 << n).map(|_| r.random_range(-1.0..1.0)).collect();
        let grid = GridParams::from_c(n, c, 1).unwrap();
        let b = heat::build_rhs(&u, &vec![0.0; 1 << n], &grid).unwrap();
        let x = heat::spectral_solve(&heat::spectrum(n, c).unwrap(), &real_vector(&b)).unwrap();
        let before: f64 = u.iter().sum();
        let after: f64 = x.iter().map(|z| z.re).sum();
        prop_assert!((before - after).abs() < 1e-10 * (1.0 + before.abs()));
    }

    #[test]
    fn error_closed_form_matches_recursion(eps in 1e-6f64..1e-1, c in 0.01f64..5.0, n_tau in 1usize..12) {
        let closed = heat::error_accumulation(eps, c, n_tau).unwrap();
        let rec = heat::error_accumulation_recursive(eps, c, n_tau).unwrap();
        prop_assert!((closed - rec).abs() <= 1e-12 * rec);
    }

    #[test]
    fn apply_matrix_matches_dense(n in 2usize..6, c in 0.0f64..4.0, seed in any::<u64>()) {
        let x = random_unit(1 << n, &mut rng(seed));
        let dense = heat::build_matrix(n, c).unwrap().apply(&x);
        prop_assert!(max_diff(&heat::apply_matrix(c, &x), &dense) < 1e-13);
    }
}
