//! Acceptance gate: one line per criterion, non-zero exit if any fails.
//!
//! Inputs are standard complex Gaussian coefficients drawn from ChaCha8
//! streams with fixed seeds. Default scale is `d = 1`, truncation 16 and 64
//! Gauss–Hermite nodes per axis.

use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use fock_core::binomial::{ell2_inner, ell2_r_norm, s0, s0_inverse, t0, t0_star};
use fock_core::multiindex::enumerate_degree;
use fock_core::quadrature::{
    antiwick_apply_quad, bargmann_quad, rank_one_check, stft_gaussian_quad, toeplitz_matrix_quad, twisted_product_quad,
    uv_map, wick_apply_quad, DEFAULT_NODES,
};
use fock_core::series::{a2_inner, diamond, eval_basis, eval_series, hermite_eval, ladder, multiply, LadderMode};
use fock_core::symbolcalc::{
    a2_r_norm, antiwick_to_wick, apply_operator, operator_matrix, psd_check, t0_bound_constant,
    twisted_product, wick_to_antiwick, wick_to_kernel,
};
use fock_core::{Complex64, KernelCoeffs, MultiIndex};
use fockcalc::random::{complex_gaussian, random_kernel, random_point, random_series};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const N: u32 = 16;
const M: usize = DEFAULT_NODES;
const SAMPLES: usize = 200;
const SEED: u64 = 0x5eed_f0c4;

struct Outcome {
    pass: bool,
    detail: String,
}

type Criterion = (&'static str, fn() -> Outcome);

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn rng_for(id: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(SEED ^ id)
}

fn mi(k: u32) -> MultiIndex {
    MultiIndex::scalar(k)
}

fn max_abs_diff(a: &KernelCoeffs, b: &KernelCoeffs) -> f64 {
    a.sub(b).unwrap().max_abs()
}

const LAW_TS: [Complex64; 3] = [c_const(1.0, 0.0), c_const(-1.0, 0.0), c_const(0.5, 0.3)];

const fn c_const(re: f64, im: f64) -> Complex64 {
    Complex64 { re, im }
}

fn inverse_laws() -> Outcome {
    let mut rng = rng_for(1);
    let mut worst = Vec::new();
    let mut pass = true;
    for d in [1, 2] {
        for t in LAW_TS {
            let (mut et, mut es) = (0.0f64, 0.0f64);
            for _ in 0..SAMPLES {
                let x = random_kernel(&mut rng, d, N);
                let scale = x.max_abs();
                et = et.max(max_abs_diff(&t0(&t0(&x, t, N).unwrap(), -t, N).unwrap(), &x) / scale);
                es = es.max(max_abs_diff(&t0_star(&t0_star(&x, t).unwrap(), -t).unwrap(), &x) / scale);
            }
            pass &= et <= 1e-10 && es <= 1e-10;
            worst.push(format!("d={d} t={t}: {et:.1e}/{es:.1e}"));
        }
    }
    outcome(pass, format!("relative sup error T/T* (tol 1e-10): {}", worst.join(", ")))
}

fn adjoint_law() -> Outcome {
    let mut rng = rng_for(2);
    let mut worst = 0.0f64;
    for i in 0..SAMPLES {
        let t = LAW_TS[i % 3];
        let x = random_kernel(&mut rng, 1, N);
        let y = random_kernel(&mut rng, 1, N);
        let lhs = ell2_inner(&t0(&x, t, N).unwrap(), &y);
        let rhs = ell2_inner(&x, &t0_star(&y, t.conj()).unwrap());
        worst = worst.max((lhs - rhs).norm() / (x.l2_norm() * y.l2_norm()));
    }
    outcome(worst <= 1e-10, format!("max |<Tc,d> - <c,T*d>| / |c||d| = {worst:.1e} (tol 1e-10)"))
}

fn conjugation_law() -> Outcome {
    let mut rng = rng_for(3);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let x = random_kernel(&mut rng, 1, N);
        let t = complex_gaussian(&mut rng);
        let lhs = t0(&x, -t, N).unwrap();
        let rhs = s0_inverse(&t0(&s0(&x), t, N).unwrap());
        worst = worst.max(max_abs_diff(&lhs, &rhs));
        let lhs = t0_star(&x, -t).unwrap();
        let rhs = s0_inverse(&t0_star(&s0(&x), t).unwrap());
        worst = worst.max(max_abs_diff(&lhs, &rhs));
    }
    outcome(worst <= 1e-12, format!("max entrywise error {worst:.1e} (tol 1e-12)"))
}

fn berezin_ordering() -> Outcome {
    let number = antiwick_to_wick(&KernelCoeffs::basis(mi(1), mi(1))).unwrap();
    let expected = KernelCoeffs::from_entries(1, 1, [((mi(1), mi(1)), c(1.0, 0.0)), ((mi(0), mi(0)), c(1.0, 0.0))]).unwrap();
    let e_number = max_abs_diff(&number, &expected);
    // |z|⁴ = 2 e₂(z) e₂(z̄) in anti-Wick form is z²w̄² + 4zw̄ + 2 in Wick form.
    let quartic = antiwick_to_wick(&KernelCoeffs::basis(mi(2), mi(2)).scale(c(2.0, 0.0))).unwrap();
    let expected = KernelCoeffs::from_entries(
        1,
        1,
        [((mi(2), mi(2)), c(2.0, 0.0)), ((mi(1), mi(1)), c(4.0, 0.0)), ((mi(0), mi(0)), c(2.0, 0.0))],
    )
    .unwrap();
    let e_quartic = max_abs_diff(&quartic, &expected);
    let mut rng = rng_for(4);
    let mut e_round = 0.0f64;
    for i in 0..SAMPLES {
        let d = 1 + i % 2;
        let a = random_kernel(&mut rng, d, if d == 1 { 6 } else { 4 });
        e_round = e_round.max(max_abs_diff(&wick_to_antiwick(&antiwick_to_wick(&a).unwrap()).unwrap(), &a));
    }
    let worst = e_number.max(e_quartic).max(e_round);
    outcome(
        worst <= 1e-12,
        format!("|z|²: {e_number:.1e}, |z|⁴: {e_quartic:.1e}, round trip: {e_round:.1e} (tol 1e-12)"),
    )
}

fn factorial(k: u32) -> f64 {
    (1..=k).map(f64::from).product()
}

fn multi_factorial(a: &MultiIndex) -> f64 {
    a.entries().iter().map(|&k| factorial(k)).product()
}

/// Taylor coefficients of `e^{t(z,w)} a(z, w)` up to degree `n`, through
/// plain monomials `z^p w̄^q` and a discrete convolution with
/// `Σ_κ t^{|κ|} z^κ w̄^κ / κ!`.
fn exponential_multiplier_oracle(a: &KernelCoeffs, t: Complex64, n: u32) -> KernelCoeffs {
    let d = a.dim_out();
    let shifts = enumerate_degree(d, n);
    let mut out = Vec::new();
    for ((p, q), v) in a.iter() {
        let mono = v / (multi_factorial(p) * multi_factorial(q)).sqrt();
        for k in &shifts {
            let (pk, qk) = (p.add(k), q.add(k));
            if pk.degree() > n || qk.degree() > n {
                continue;
            }
            let term = mono * t.powu(k.degree()) / multi_factorial(k);
            out.push(((pk.clone(), qk.clone()), term * (multi_factorial(&pk) * multi_factorial(&qk)).sqrt()));
        }
    }
    KernelCoeffs::from_entries(d, d, out).unwrap()
}

fn exponential_multiplier() -> Outcome {
    let mut rng = rng_for(5);
    let mut worst = 0.0f64;
    for i in 0..SAMPLES {
        let d = if i % 4 == 3 { 2 } else { 1 };
        let a = random_kernel(&mut rng, d, 6);
        let t = LAW_TS[i % 3];
        let got = t0(&a, t, N).unwrap();
        let want = exponential_multiplier_oracle(&a, t, N);
        worst = worst.max(max_abs_diff(&got, &want));
    }
    outcome(worst <= 1e-10, format!("max entrywise error vs convolution oracle {worst:.1e} (tol 1e-10)"))
}

fn quadrature_agreement() -> Outcome {
    let mut rng = rng_for(6);
    let (mut e_wick, mut e_anti) = (0.0f64, 0.0f64);
    for _ in 0..10 {
        let a = random_kernel(&mut rng, 1, 4);
        let aw = antiwick_to_wick(&a).unwrap();
        for _ in 0..5 {
            let f = random_series(&mut rng, 1, 6);
            let wick = apply_operator(&wick_to_kernel(&a, 10).unwrap(), &f).unwrap();
            let anti = apply_operator(&wick_to_kernel(&aw, 10).unwrap(), &f).unwrap();
            for _ in 0..10 {
                let z = random_point(&mut rng, 1, 2.0);
                let q = wick_apply_quad(|z, w| a.evaluate(z, w), |w| f.evaluate(w), &z, M).unwrap();
                e_wick = e_wick.max((q - wick.evaluate(&z)).norm());
                let q = antiwick_apply_quad(|w| a.evaluate(w, w), |w| f.evaluate(w), &z, M).unwrap();
                e_anti = e_anti.max((q - anti.evaluate(&z)).norm());
            }
        }
    }
    outcome(
        e_wick.max(e_anti) <= 1e-7,
        format!("Wick {e_wick:.1e}, anti-Wick {e_anti:.1e} (tol 1e-7)"),
    )
}

fn rank_one_suite() -> Outcome {
    let mut rng = rng_for(7);
    let indices: Vec<MultiIndex> = (0..=3).map(mi).collect();
    let (mut worst, mut simplest) = (0.0f64, 0.0f64);
    for t in [c(1.0, 0.0), c(-1.0, 0.0), c(2.0, 0.0)] {
        for _ in 0..5 {
            let z = random_point(&mut rng, 1, 1.5);
            let w = random_point(&mut rng, 1, 1.5);
            for a in &indices {
                for b in &indices {
                    let r = rank_one_check(a, b, t, &z, &w, M).unwrap();
                    worst = worst.max((r.lhs - r.rhs).norm());
                }
            }
            let r = rank_one_check(&mi(0), &mi(0), t, &z, &w, M).unwrap();
            simplest = simplest.max((r.lhs - 1.0).norm());
        }
    }
    outcome(
        worst <= 1e-6 && simplest <= 1e-10,
        format!("lhs vs rhs {worst:.1e} (tol 1e-6), constant symbol {simplest:.1e} (tol 1e-10)"),
    )
}

fn explicit_bound() -> Outcome {
    let mut rng = rng_for(8);
    let mut violations = 0;
    let mut max_ratio = 0.0f64;
    for _ in 0..100 {
        let b = random_kernel(&mut rng, 1, N);
        let t = Complex64::from_polar(rng.random_range(0.0..=1.0f64).sqrt(), rng.random_range(0.0..std::f64::consts::TAU));
        let tb = t0(&b, t, 64).unwrap();
        for (r1, r2) in [(1.0, 3.0), (1.0, 4.0), (0.5, 2.0)] {
            let ratio = ell2_r_norm(&tb, r2) / (t0_bound_constant(r1, r2, 1).unwrap() * ell2_r_norm(&b, r1));
            max_ratio = max_ratio.max(ratio);
            if ratio.is_nan() || ratio > 1.0 {
                violations += 1;
            }
        }
    }
    outcome(violations == 0, format!("{violations} violations, max lhs/rhs {max_ratio:.3}"))
}

fn norm_transfer() -> Outcome {
    let mut rng = rng_for(9);
    let symbols: Vec<KernelCoeffs> = (0..100).map(|_| random_kernel(&mut rng, 1, 6)).collect();
    let trend = |r1: f64, grid: [f64; 3], image: &dyn Fn(&KernelCoeffs) -> KernelCoeffs| -> Vec<f64> {
        let images: Vec<KernelCoeffs> = symbols.iter().map(image).collect();
        grid.iter()
            .map(|&r2| {
                symbols
                    .iter()
                    .zip(&images)
                    .map(|(a, b)| a2_r_norm(b, r2).unwrap() / a2_r_norm(a, r1).unwrap())
                    .fold(0.0, f64::max)
            })
            .collect()
    };
    let ok = |v: &[f64]| v.iter().all(|x| x.is_finite()) && v.windows(2).all(|w| w[1] <= w[0]);
    let aw = trend(1.0, [2.5, 4.0, 8.0], &|a| wick_to_antiwick(a).unwrap());
    let ker = trend(0.5, [1.5, 3.0, 6.0], &|a| wick_to_kernel(a, 48).unwrap());
    outcome(
        ok(&aw) && ok(&ker),
        format!("anti-Wick r1=1: {aw:.3?}; kernel r1=0.5: {ker:.3?}"),
    )
}

fn toeplitz_cross_check() -> Outcome {
    let n = 6;
    let id = toeplitz_matrix_quad(|_, _| c(1.0, 0.0), 1, n, M).unwrap();
    let eye = operator_matrix(&KernelCoeffs::identity(1, n), n).unwrap();
    let e_one = id.max_abs_diff(&eye);
    let number = toeplitz_matrix_quad(|x, xi| c(0.5 * (x[0] * x[0] + xi[0] * xi[0]), 0.0), 1, n, M).unwrap();
    let route = operator_matrix(&wick_to_kernel(&antiwick_to_wick(&KernelCoeffs::basis(mi(1), mi(1))).unwrap(), n).unwrap(), n)
        .unwrap();
    let e_number = number.max_abs_diff(&route);
    outcome(
        e_one.max(e_number) <= 1e-6,
        format!("symbol 1 vs identity {e_one:.1e}, (x²+ξ²)/2 vs anti-Wick route {e_number:.1e} (tol 1e-6)"),
    )
}

fn bargmann_hermite() -> Outcome {
    let mut rng = rng_for(11);
    let points: Vec<Vec<Complex64>> = (0..10).map(|_| random_point(&mut rng, 1, 2.0)).collect();
    let (mut e_b, mut e_s) = (0.0f64, 0.0f64);
    for k in 0..=8 {
        let alpha = mi(k);
        let h = |x: &[f64]| c(hermite_eval(&alpha, x).unwrap(), 0.0);
        for z in &points {
            let exact = eval_basis(&alpha, z).unwrap();
            e_b = e_b.max((bargmann_quad(h, z, M).unwrap() - exact).norm());
            let via_stft = uv_map(|x, xi| stft_gaussian_quad(h, x, xi, M).unwrap(), &[z[0].re], &[z[0].im]);
            e_s = e_s.max((via_stft - exact).norm());
        }
    }
    outcome(
        e_b <= 1e-8 && e_s <= 1e-7,
        format!("Bargmann {e_b:.1e} (tol 1e-8), STFT factorization {e_s:.1e} (tol 1e-7)"),
    )
}

fn positivity() -> Outcome {
    let n = 12;
    let diag = |entries: &[(u32, f64)]| {
        KernelCoeffs::from_entries(1, 1, entries.iter().map(|&(k, v)| ((mi(k), mi(k)), c(v, 0.0)))).unwrap()
    };
    let symbols = [
        ("1", diag(&[(0, 1.0)])),
        ("|z|²", diag(&[(1, 1.0)])),
        ("|z|⁴", diag(&[(2, 2.0)])),
        ("(1+|z|²)²", diag(&[(0, 1.0), (1, 2.0), (2, 2.0)])),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, a) in symbols {
        let m = operator_matrix(&wick_to_kernel(&antiwick_to_wick(&a).unwrap(), n).unwrap(), n).unwrap();
        let v = psd_check(&m, 1e-10).unwrap();
        let min = v.min_eigenvalue.unwrap_or(f64::NAN);
        pass &= v.hermitian && min >= -1e-10;
        parts.push(format!("{name}: min eig {min:.3}"));
    }
    outcome(pass, parts.join(", "))
}

fn twisted_product_agreement() -> Outcome {
    let mut rng = rng_for(13);
    let (mut e_matrix, mut e_quad, mut e_assoc) = (0.0f64, 0.0f64, 0.0f64);
    let n = 14;
    for _ in 0..10 {
        let a1 = random_kernel(&mut rng, 1, 3);
        let a2 = random_kernel(&mut rng, 1, 3);
        let coeff = twisted_product(&a1, &a2).unwrap();
        let m1 = operator_matrix(&wick_to_kernel(&a1, n).unwrap(), n).unwrap();
        let m2 = operator_matrix(&wick_to_kernel(&a2, n).unwrap(), n).unwrap();
        // Kernel entries couple degrees differing by at most 3, so the
        // product of the truncated matrices is exact on the degree n - 3 block.
        let block = m1.matmul(&m2).unwrap().to_kernel().truncated(n - 3);
        let via_symbol = wick_to_kernel(&coeff, n).unwrap().truncated(n - 3);
        e_matrix = e_matrix.max(max_abs_diff(&block, &via_symbol));
        for _ in 0..5 {
            let z = random_point(&mut rng, 1, 1.0);
            let w = random_point(&mut rng, 1, 1.0);
            let q = twisted_product_quad(|x, y| a1.evaluate(x, y), |x, y| a2.evaluate(x, y), &z, &w, M).unwrap();
            e_quad = e_quad.max((q - coeff.evaluate(&z, &w)).norm());
        }
        let a3 = random_kernel(&mut rng, 1, 3);
        let left = twisted_product(&coeff, &a3).unwrap();
        let right = twisted_product(&a1, &twisted_product(&a2, &a3).unwrap()).unwrap();
        e_assoc = e_assoc.max(max_abs_diff(&left, &right) / left.max_abs());
    }
    outcome(
        e_matrix.max(e_quad) <= 1e-7 && e_assoc <= 1e-10,
        format!("matrix {e_matrix:.1e}, quadrature {e_quad:.1e} (tol 1e-7), associativity {e_assoc:.1e} relative (tol 1e-10)"),
    )
}

fn series_algebra() -> Outcome {
    let mut rng = rng_for(14);
    let (mut e_mul, mut e_ladder, mut e_diamond) = (0.0f64, 0.0f64, 0.0f64);
    for d in [1, 2] {
        for _ in 0..20 {
            let f1 = random_series(&mut rng, d, 6);
            let f2 = random_series(&mut rng, d, 6);
            let g = random_series(&mut rng, d, 8);
            let product = multiply(&f1, &f2).unwrap();
            let z = random_point(&mut rng, d, 2.0);
            let pointwise = f1.evaluate(&z) * f2.evaluate(&z);
            e_mul = e_mul.max((eval_series(&product, &z).unwrap() - pointwise).norm());
            for axis in 0..d {
                let lhs = a2_inner(&ladder(&f1, axis, LadderMode::Multiply).unwrap(), &g).unwrap();
                let rhs = a2_inner(&f1, &ladder(&g, axis, LadderMode::Differentiate).unwrap()).unwrap();
                e_ladder = e_ladder.max((lhs - rhs).norm());
            }
            let lhs = a2_inner(&diamond(&f1, &f2).unwrap(), &g).unwrap();
            let rhs = a2_inner(&f2, &multiply(&f1.conj(), &g).unwrap()).unwrap();
            e_diamond = e_diamond.max((lhs - rhs).norm());
        }
    }
    outcome(
        e_mul.max(e_ladder).max(e_diamond) <= 1e-10,
        format!("multiply {e_mul:.1e}, ladder adjoint {e_ladder:.1e}, diamond adjoint {e_diamond:.1e} (tol 1e-10)"),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 14] = [
        ("inverse laws", inverse_laws),
        ("adjoint law", adjoint_law),
        ("conjugation law", conjugation_law),
        ("Berezin ordering identities", berezin_ordering),
        ("exponential multiplier", exponential_multiplier),
        ("quadrature vs coefficients", quadrature_agreement),
        ("rank-one Wick/anti-Wick identity", rank_one_suite),
        ("explicit T bound", explicit_bound),
        ("norm transfer trend", norm_transfer),
        ("Toeplitz cross-check", toeplitz_cross_check),
        ("Bargmann-Hermite", bargmann_hermite),
        ("positivity", positivity),
        ("twisted product", twisted_product_agreement),
        ("series algebra", series_algebra),
    ];
    let start = Instant::now();
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let result = panic::catch_unwind(AssertUnwindSafe(run))
            .unwrap_or_else(|e| {
                let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
                outcome(false, format!("panicked: {}", msg.unwrap_or_default()))
            });
        if !result.pass {
            failed += 1;
        }
        println!(
            "{} {:>2} {name}: {} [{:.1}s]",
            if result.pass { "PASS" } else { "FAIL" },
            i + 1,
            result.detail,
            t.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {} passed, {failed} failed in {:.1}s", criteria.len() - failed, start.elapsed().as_secs_f64());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
