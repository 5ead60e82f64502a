//! End-to-end checks across the coefficient, operator and quadrature layers
//! in two complex dimensions.

use fock_core::multiindex::enumerate_degree;
use fock_core::quadrature::{
    bargmann_quad, gauss_hermite_grid, integrate_gaussian_c, toeplitz_matrix_quad, wick_apply_quad,
};
use fock_core::series::{eval_basis, hermite_eval};
use fock_core::symbolcalc::{
    antiwick_to_wick, apply_operator, compose_kernels, kernel_to_wick, operator_matrix, psd_check, wick_to_kernel,
};
use fock_core::{Complex64, KernelCoeffs, MultiIndex, SeriesCoeffs};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn mi(e: &[u32]) -> MultiIndex {
    MultiIndex::new(e.to_vec()).unwrap()
}

fn random_symbol(rng: &mut ChaCha8Rng, n: u32) -> KernelCoeffs {
    let idx = enumerate_degree(2, n);
    let mut k = KernelCoeffs::square(2);
    for a in &idx {
        for b in &idx {
            k.insert(a.clone(), b.clone(), c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .unwrap();
        }
    }
    k
}

fn random_series(rng: &mut ChaCha8Rng, n: u32) -> SeriesCoeffs {
    SeriesCoeffs::from_entries(
        2,
        enumerate_degree(2, n).into_iter().map(|a| (a, c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))),
    )
    .unwrap()
}

#[test]
fn wick_operator_matches_its_integral_in_two_dimensions() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let a = random_symbol(&mut rng, 1);
    let f = random_series(&mut rng, 2);
    let g = apply_operator(&wick_to_kernel(&a, 3).unwrap(), &f).unwrap();
    for _ in 0..3 {
        let z = [c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)), c(rng.random_range(-1.0..1.0), 0.3)];
        let q = wick_apply_quad(|z, w| a.evaluate(z, w), |w| f.evaluate(w), &z, 24).unwrap();
        assert!((q - g.evaluate(&z)).norm() < 1e-9, "{q} vs {}", g.evaluate(&z));
    }
}

#[test]
fn monomials_are_orthonormal_in_two_dimensions() {
    let grid = gauss_hermite_grid(8, 4, &[0.0; 4], 1.0).unwrap();
    let idx = enumerate_degree(2, 2);
    for a in &idx {
        for b in &idx {
            let v = integrate_gaussian_c(
                |z| eval_basis(a, z).unwrap() * eval_basis(b, z).unwrap().conj(),
                2,
                &grid,
            )
            .unwrap();
            let expected = if a == b { 1.0 } else { 0.0 };
            assert!((v - expected).norm() < 1e-12, "{a:?} {b:?}: {v}");
        }
    }
}

#[test]
fn hermite_functions_are_orthonormal_and_map_to_monomials() {
    // h_α h_β carries e^{−|x|²}, so a unit-scale grid integrates it exactly.
    let grid = gauss_hermite_grid(12, 2, &[0.0, 0.0], 1.0).unwrap();
    let idx = enumerate_degree(2, 3);
    for a in &idx {
        for b in &idx {
            let v = grid
                .integrate_plain(|x| c(hermite_eval(a, x).unwrap() * hermite_eval(b, x).unwrap(), 0.0))
                .unwrap();
            let expected = if a == b { 1.0 } else { 0.0 };
            assert!((v - expected).norm() < 1e-12, "{a:?} {b:?}: {v}");
        }
    }
    let z = [c(0.4, -0.9), c(-1.1, 0.2)];
    for a in &idx {
        let v = bargmann_quad(|x| c(hermite_eval(a, x).unwrap(), 0.0), &z, 24).unwrap();
        assert!((v - eval_basis(a, &z).unwrap()).norm() < 1e-10);
    }
}

#[test]
fn toeplitz_matrix_of_the_harmonic_oscillator_in_two_dimensions() {
    let n = 2;
    let quad = toeplitz_matrix_quad(
        |x, xi| c(0.5 * (x.iter().map(|v| v * v).sum::<f64>() + xi.iter().map(|v| v * v).sum::<f64>()), 0.0),
        2,
        n,
        12,
    )
    .unwrap();
    let symbol = KernelCoeffs::from_entries(
        2,
        2,
        [((mi(&[1, 0]), mi(&[1, 0])), c(1.0, 0.0)), ((mi(&[0, 1]), mi(&[0, 1])), c(1.0, 0.0))],
    )
    .unwrap();
    let route = operator_matrix(&wick_to_kernel(&antiwick_to_wick(&symbol).unwrap(), n).unwrap(), n).unwrap();
    assert!(quad.max_abs_diff(&route) < 1e-10);
    // |z|² in anti-Wick form is N + d: eigenvalues |α| + 2.
    for (i, a) in route.indices().iter().enumerate() {
        assert!((route.get(i, i) - f64::from(a.degree() + 2)).norm() < 1e-12);
    }
    let v = psd_check(&route, 1e-12).unwrap();
    assert!(v.psd && (v.min_eigenvalue.unwrap() - 2.0).abs() < 1e-10);
}

#[test]
fn composition_is_sequential_application() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let k1 = random_symbol(&mut rng, 2);
    let k2 = random_symbol(&mut rng, 2);
    let f = random_series(&mut rng, 3);
    let once = apply_operator(&compose_kernels(&k2, &k1).unwrap(), &f).unwrap();
    let twice = apply_operator(&k2, &apply_operator(&k1, &f).unwrap()).unwrap();
    assert!(once.sub(&twice).unwrap().max_abs() < 1e-12);
}

#[test]
fn kernel_round_trip_in_two_dimensions() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let a = random_symbol(&mut rng, 2);
    let k = wick_to_kernel(&a, 12).unwrap();
    let back = kernel_to_wick(&k, 12).unwrap();
    assert!(back.sub(&a).unwrap().max_abs() < 1e-10);
}
