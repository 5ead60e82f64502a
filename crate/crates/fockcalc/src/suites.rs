//! Deterministic verification suites behind `fockcalc verify`.
//!
//! Every suite draws its inputs from a ChaCha8 stream seeded with the
//! user's seed, checks each case against a fixed tolerance and reports the
//! largest error seen together with the first failing case.

use std::fmt;
use std::str::FromStr;

use fock_core::binomial::{ell2_inner, ell2_r_norm, s0, s0_inverse, t0, t0_star};
use fock_core::multiindex::enumerate_degree;
use fock_core::quadrature::{
    antiwick_apply_quad, bargmann_quad, rank_one_check, stft_gaussian_quad, toeplitz_matrix_quad, twisted_product_quad,
    uv_map, wick_apply_quad,
};
use fock_core::series::{eval_basis, hermite_eval};
use fock_core::symbolcalc::{antiwick_to_wick, apply_operator, operator_matrix, t0_bound_constant, twisted_product, wick_to_kernel};
use fock_core::{Complex64, KernelCoeffs, MultiIndex, OperatorMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{CliError, CliResult};
use crate::random::{random_kernel, random_point, random_series};
use crate::report::{FailedCase, VerifyReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Identities,
    Quadrature,
    Toeplitz,
    Bounds,
    AppendixB,
}

impl Suite {
    pub const ALL: [Suite; 5] = [Suite::Identities, Suite::Quadrature, Suite::Toeplitz, Suite::Bounds, Suite::AppendixB];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Identities => "identities",
            Suite::Quadrature => "quadrature",
            Suite::Toeplitz => "toeplitz",
            Suite::Bounds => "bounds",
            Suite::AppendixB => "appendixB",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = CliError;

    fn from_str(text: &str) -> CliResult<Self> {
        Suite::ALL
            .into_iter()
            .find(|s| s.name().eq_ignore_ascii_case(text))
            .ok_or_else(|| CliError::precondition(format!("unknown suite {text:?}")))
    }
}

struct Tracker {
    cases: usize,
    max_error: f64,
    failure: Option<FailedCase>,
}

impl Tracker {
    fn new() -> Self {
        Tracker { cases: 0, max_error: 0.0, failure: None }
    }

    fn check(&mut self, error: f64, tolerance: f64, case: impl FnOnce() -> String) {
        self.cases += 1;
        // NaN counts as a failure and poisons max_error on purpose.
        if error.is_nan() || error > self.max_error {
            self.max_error = error;
        }
        if (error.is_nan() || error > tolerance) && self.failure.is_none() {
            self.failure = Some(FailedCase { case: case(), error, tolerance });
        }
    }

    fn finish(self, suite: Suite, seed: u64) -> VerifyReport {
        VerifyReport {
            suite: suite.name().into(),
            seed,
            cases: self.cases,
            max_error: self.max_error,
            pass: self.failure.is_none(),
            failure: self.failure,
        }
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn rel_diff(x: &KernelCoeffs, y: &KernelCoeffs) -> CliResult<f64> {
    Ok(x.sub(y)?.max_abs() / y.max_abs().max(f64::MIN_POSITIVE))
}

/// Runs `suite` with quadrature rules of `nodes` points per axis.
pub fn run(suite: Suite, seed: u64, nodes: usize) -> CliResult<VerifyReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tr = Tracker::new();
    match suite {
        Suite::Identities => identities(&mut rng, &mut tr)?,
        Suite::Quadrature => quadrature(&mut rng, &mut tr, nodes)?,
        Suite::Toeplitz => toeplitz(&mut tr, nodes)?,
        Suite::Bounds => bounds(&mut rng, &mut tr)?,
        Suite::AppendixB => appendix_b(&mut rng, &mut tr, nodes)?,
    }
    Ok(tr.finish(suite, seed))
}

const IDENTITY_TOL: f64 = 1e-10;
const CONJUGATION_TOL: f64 = 1e-12;

/// Inverse, adjoint and conjugation laws of the binomial operators.
fn identities(rng: &mut ChaCha8Rng, tr: &mut Tracker) -> CliResult<()> {
    const DEGREE: u32 = 4;
    const OUT: u32 = 8;
    let ts = [c(1.0, 0.0), c(-1.0, 0.0), c(0.5, 0.3)];
    for d in [1, 2] {
        for t in ts {
            for rep in 0..10 {
                let x = random_kernel(rng, d, DEGREE);
                let label = |law: &str| format!("{law}, d = {d}, t = {t}, sample {rep}");
                let back = t0(&t0(&x, t, OUT)?, -t, OUT)?;
                tr.check(rel_diff(&back, &x)?, IDENTITY_TOL, || label("T(-t) T(t) = id"));
                let back = t0_star(&t0_star(&x, t)?, -t)?;
                tr.check(rel_diff(&back, &x)?, IDENTITY_TOL, || label("T*(-t) T*(t) = id"));

                let y = random_kernel(rng, d, OUT);
                let lhs = ell2_inner(&t0(&x, t, OUT)?, &y);
                let rhs = ell2_inner(&x, &t0_star(&y, t.conj())?);
                let err = (lhs - rhs).norm() / (x.l2_norm() * y.l2_norm());
                tr.check(err, IDENTITY_TOL, || label("adjoint"));

                let lhs = t0(&x, -t, OUT)?;
                let rhs = s0_inverse(&t0(&s0(&x), t, OUT)?);
                tr.check(rel_diff(&rhs, &lhs)?, CONJUGATION_TOL, || label("S⁻¹ T(t) S = T(-t)"));
                let lhs = t0_star(&x, -t)?;
                let rhs = s0_inverse(&t0_star(&s0(&x), t)?);
                tr.check(rel_diff(&rhs, &lhs)?, CONJUGATION_TOL, || label("S⁻¹ T*(t) S = T*(-t)"));
            }
        }
    }
    Ok(())
}

const QUAD_TOL: f64 = 1e-7;
const BARGMANN_TOL: f64 = 1e-8;

/// Coefficient routes against direct quadrature of the defining integrals.
fn quadrature(rng: &mut ChaCha8Rng, tr: &mut Tracker, nodes: usize) -> CliResult<()> {
    for sym in 0..10 {
        let a = random_kernel(rng, 1, 4);
        let aw_as_wick = antiwick_to_wick(&a)?;
        for fi in 0..5 {
            let f = random_series(rng, 1, 6);
            let n = 4 + 6;
            let wick = apply_operator(&wick_to_kernel(&a, n)?, &f)?;
            let anti = apply_operator(&wick_to_kernel(&aw_as_wick, n)?, &f)?;
            for pi in 0..10 {
                let z = random_point(rng, 1, 2.0);
                let label = |route: &str| format!("{route}, symbol {sym}, F {fi}, point {pi}");
                let q = wick_apply_quad(|z, w| a.evaluate(z, w), |w| f.evaluate(w), &z, nodes)?;
                tr.check((q - wick.evaluate(&z)).norm(), QUAD_TOL, || label("Wick"));
                let q = antiwick_apply_quad(|w| a.evaluate(w, w), |w| f.evaluate(w), &z, nodes)?;
                tr.check((q - anti.evaluate(&z)).norm(), QUAD_TOL, || label("anti-Wick"));
            }
        }
    }

    for k in 0..=8u32 {
        let alpha = MultiIndex::scalar(k);
        let h = |x: &[f64]| c(hermite_eval(&alpha, x).unwrap_or(f64::NAN), 0.0);
        for pi in 0..3 {
            let z = random_point(rng, 1, 2.0);
            let exact = eval_basis(&alpha, &z)?;
            let v = bargmann_quad(h, &z, nodes)?;
            tr.check((v - exact).norm(), BARGMANN_TOL, || format!("Bargmann of h_{k}, point {pi}"));
            // bargmann_quad above already rejected an invalid node count.
            let v = uv_map(
                |x, xi| stft_gaussian_quad(h, x, xi, nodes).unwrap_or(c(f64::NAN, 0.0)),
                &[z[0].re],
                &[z[0].im],
            );
            tr.check((v - exact).norm(), QUAD_TOL, || format!("STFT factorization of h_{k}, point {pi}"));
        }
    }

    for pair in 0..10 {
        let a1 = random_kernel(rng, 1, 3);
        let a2 = random_kernel(rng, 1, 3);
        let coeff = twisted_product(&a1, &a2)?;
        for pi in 0..3 {
            let z = random_point(rng, 1, 1.0);
            let w = random_point(rng, 1, 1.0);
            let q = twisted_product_quad(|x, y| a1.evaluate(x, y), |x, y| a2.evaluate(x, y), &z, &w, nodes)?;
            tr.check((q - coeff.evaluate(&z, &w)).norm(), QUAD_TOL, || format!("twisted product, pair {pair}, point {pi}"));
        }
    }
    Ok(())
}

const TOEPLITZ_TOL: f64 = 1e-6;

/// Toeplitz matrices by phase-space quadrature against the anti-Wick
/// coefficient route, at truncation degree 6.
type PhaseSymbol = Box<dyn Fn(&[f64], &[f64]) -> Complex64>;

fn toeplitz(tr: &mut Tracker, nodes: usize) -> CliResult<()> {
    const N: u32 = 6;
    let mi = MultiIndex::scalar;
    let aw_matrix = |a: KernelCoeffs| -> CliResult<OperatorMatrix> {
        Ok(operator_matrix(&wick_to_kernel(&antiwick_to_wick(&a)?, N)?, N)?)
    };
    let one = KernelCoeffs::basis(mi(0), mi(0));
    let number = KernelCoeffs::basis(mi(1), mi(1));
    let square = KernelCoeffs::basis(mi(2), mi(2)).scale(c(2.0, 0.0));
    let radial = |x: &[f64], xi: &[f64]| 0.5 * (x[0] * x[0] + xi[0] * xi[0]);
    let cases: [(&str, PhaseSymbol, KernelCoeffs); 3] = [
        ("1", Box::new(|_, _| c(1.0, 0.0)), one),
        ("(x² + ξ²)/2", Box::new(move |x, xi| c(radial(x, xi), 0.0)), number),
        ("((x² + ξ²)/2)²", Box::new(move |x, xi| c(radial(x, xi).powi(2), 0.0)), square),
    ];
    for (name, symbol, aw) in cases {
        let quad = toeplitz_matrix_quad(symbol, 1, N, nodes)?;
        let coeff = aw_matrix(aw)?;
        tr.check(quad.max_abs_diff(&coeff), TOEPLITZ_TOL, || format!("Toeplitz symbol {name}"));
    }
    let id = toeplitz_matrix_quad(|_, _| c(1.0, 0.0), 1, N, nodes)?;
    let eye = operator_matrix(&KernelCoeffs::identity(1, N), N)?;
    tr.check(id.max_abs_diff(&eye), TOEPLITZ_TOL, || String::from("Toeplitz symbol 1 is the identity"));
    Ok(())
}

/// `‖T₀,ₜ b‖_{ℓ²,r₂} ≤ (1 − (1 + r₁)/r₂)^{−d} ‖b‖_{ℓ²,r₁}` for `|t| ≤ 1`.
/// The reported error is the largest excess ratio `lhs/rhs − 1`, clamped
/// at zero; the tolerance is zero.
fn bounds(rng: &mut ChaCha8Rng, tr: &mut Tracker) -> CliResult<()> {
    const PAIRS: [(f64, f64); 3] = [(1.0, 3.0), (1.0, 4.0), (0.5, 2.0)];
    for rep in 0..100 {
        let d = if rep % 5 == 4 { 2 } else { 1 };
        let (degree, out) = if d == 1 { (5, 48) } else { (3, 24) };
        let b = random_kernel(rng, d, degree);
        let t = c(1.0, 0.0) * rng.random_range(0.0..=1.0f64).sqrt()
            * Complex64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU));
        let tb = t0(&b, t, out)?;
        for (r1, r2) in PAIRS {
            let lhs = ell2_r_norm(&tb, r2);
            let rhs = t0_bound_constant(r1, r2, d)? * ell2_r_norm(&b, r1);
            let excess = (lhs / rhs - 1.0).max(0.0);
            tr.check(excess, 0.0, || format!("sample {rep}, d = {d}, t = {t}, (r1, r2) = ({r1}, {r2})"));
        }
    }
    Ok(())
}

const APPENDIX_TOL: f64 = 1e-6;
const SIMPLEST_TOL: f64 = 1e-10;

/// Rank-one Wick/anti-Wick identity for all `α, β ≤ 3` in one dimension.
fn appendix_b(rng: &mut ChaCha8Rng, tr: &mut Tracker, nodes: usize) -> CliResult<()> {
    let indices = enumerate_degree(1, 3);
    for t in [c(1.0, 0.0), c(-1.0, 0.0), c(2.0, 0.0)] {
        for pi in 0..5 {
            let z = random_point(rng, 1, 1.5);
            let w = random_point(rng, 1, 1.5);
            for alpha in &indices {
                for beta in &indices {
                    let r = rank_one_check(alpha, beta, t, &z, &w, nodes)?;
                    tr.check((r.lhs - r.rhs).norm(), APPENDIX_TOL, || {
                        format!("alpha = {alpha:?}, beta = {beta:?}, t = {t}, point {pi}")
                    });
                }
            }
            let zero = MultiIndex::zero(1);
            let r = rank_one_check(&zero, &zero, t, &z, &w, nodes)?;
            tr.check((r.lhs - 1.0).norm(), SIMPLEST_TOL, || format!("constant symbol, t = {t}, point {pi}"));
        }
    }
    Ok(())
}
