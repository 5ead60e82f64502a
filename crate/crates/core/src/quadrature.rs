//! Gauss–Hermite quadrature for the integral forms of the Fock-space
//! operators, used as an oracle independent of the coefficient calculus.
//!
//! Every integrand here is a polynomial (or Hermite function) times a
//! Gaussian. The grids are centred at the peak of the Gaussian modulus, and
//! the Gaussian is folded into the integrand exponent together with
//! `+|u|²` (the rule's own weight) so that no huge or tiny intermediate
//! factor is formed.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::multiindex::{enumerate_degree, MultiIndex};
use crate::series::eval_basis;
use crate::sum::{pairwise, CompensatedSum};
use crate::symbolcalc::OperatorMatrix;

/// Nodes per real axis used when the caller has no preference.
pub const DEFAULT_NODES: usize = 64;
/// Largest rule the Newton iteration is trusted for.
pub const MAX_NODES: usize = 256;
/// Largest complex dimension accepted by the `ℂ^d` integrals.
pub const MAX_COMPLEX_DIM: usize = 3;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Number of zeros of the degree-`m` Hermite polynomial below `x`, by a
/// Sturm count on its Jacobi matrix (zero diagonal, off-diagonal `√(k/2)`).
fn zeros_below(m: usize, x: f64) -> usize {
    let mut count = 0;
    let mut q = -x;
    for k in 0..m {
        if k > 0 {
            let b2 = k as f64 / 2.0;
            q = -x - b2 / q;
        }
        if q == 0.0 {
            q = -f64::EPSILON * (1.0 + x.abs());
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Orthonormal Hermite values `(p_m(x), p_{m−1}(x))` without the Gaussian.
fn hermite_pair(m: usize, x: f64) -> (f64, f64) {
    let (mut p1, mut p2) = (libm::pow(PI, -0.25), 0.0);
    for j in 1..=m {
        let jf = j as f64;
        let p3 = p2;
        p2 = p1;
        p1 = x * libm::sqrt(2.0 / jf) * p2 - libm::sqrt((jf - 1.0) / jf) * p3;
    }
    (p1, p2)
}

/// Nodes (ascending) and weights of the `m`-point rule for `∫ g(x) e^{−x²} dx`.
///
/// Nodes are bracketed by bisection on a Sturm sequence, then polished by
/// Newton steps; weights are `2 / (√(2m) p_{m−1}(x))²`.
pub fn gauss_hermite_rule(m: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if m < 2 {
        return Err(Error::Precondition(format!("need at least 2 nodes, got {m}")));
    }
    if m > MAX_NODES {
        return Err(Error::Precondition(format!("at most {MAX_NODES} nodes are supported, got {m}")));
    }
    let bound = libm::sqrt(2.0 * m as f64) + 1.0;
    let scale = libm::sqrt(2.0 * m as f64);
    let mut x = vec![0.0; m];
    let mut w = vec![0.0; m];
    for k in m / 2..m {
        // Zero number k (ascending) lies in (lo, hi].
        let (mut lo, mut hi) = (-bound, bound);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if zeros_below(m, mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let mut z = 0.5 * (lo + hi);
        let mut pp = 0.0;
        for _ in 0..3 {
            let (p1, p2) = hermite_pair(m, z);
            pp = scale * p2;
            let next = z - p1 / pp;
            if (lo..=hi).contains(&next) {
                z = next;
            }
        }
        if m % 2 == 1 && k == m / 2 {
            z = 0.0;
            pp = scale * hermite_pair(m, 0.0).1;
        }
        x[k] = z;
        x[m - 1 - k] = -z;
        w[k] = 2.0 / (pp * pp);
        w[m - 1 - k] = w[k];
    }
    if x.iter().chain(&w).any(|v| !v.is_finite()) || x.windows(2).any(|p| p[0] >= p[1]) {
        return Err(Error::Precondition(format!("node computation failed for m = {m}")));
    }
    Ok((x, w))
}

/// Tensor Gauss–Hermite rule for `∫_{ℝ^dims} g(x) e^{−|(x−c)/s|²} dx`.
///
/// The `m^dims` nodes are never materialized; sums run axis by axis with a
/// pairwise reduction, so results are reproducible bit for bit.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureGrid {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    dims: usize,
    center: Vec<f64>,
    scale: f64,
}

/// Builds a tensor grid with `m` nodes per axis.
pub fn gauss_hermite_grid(m: usize, dims: usize, center: &[f64], scale: f64) -> Result<QuadratureGrid> {
    if center.len() != dims {
        return Err(Error::DimensionMismatch { expected: dims, found: center.len() });
    }
    if dims == 0 {
        return Err(Error::Precondition(String::from("grid dimension must be positive")));
    }
    if !(scale > 0.0 && scale.is_finite()) || center.iter().any(|c| !c.is_finite()) {
        return Err(Error::Domain(format!("invalid grid centre or scale {scale}")));
    }
    let (nodes, weights) = gauss_hermite_rule(m)?;
    Ok(QuadratureGrid { nodes, weights, dims, center: center.to_vec(), scale })
}

impl QuadratureGrid {
    /// Nodes per axis.
    pub fn nodes_per_axis(&self) -> usize {
        self.nodes.len()
    }

    /// Total real dimension.
    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Number of tensor nodes, `m^dims`.
    pub fn len(&self) -> usize {
        self.nodes.len().pow(self.dims as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Standardized 1-D rule (nodes, weights) for `e^{−x²}`.
    pub fn rule(&self) -> (&[f64], &[f64]) {
        (&self.nodes, &self.weights)
    }

    /// Node `i` (odometer order, last axis fastest) and its weight.
    pub fn node(&self, mut i: usize) -> (Vec<f64>, f64) {
        let m = self.nodes.len();
        let mut x = vec![0.0; self.dims];
        let mut w = 1.0;
        for axis in (0..self.dims).rev() {
            let k = i % m;
            i /= m;
            x[axis] = self.center[axis] + self.scale * self.nodes[k];
            w *= self.scale * self.weights[k];
        }
        (x, w)
    }

    /// `Σ weights`, which equals `(√π s)^dims`.
    pub fn total_mass(&self) -> f64 {
        let s: f64 = self.weights.iter().sum();
        libm::pow(self.scale * s, self.dims as f64)
    }

    fn nested(&self, axis: usize, x: &mut [f64], u2: f64, g: &mut dyn FnMut(&[f64], f64) -> Complex64) -> Complex64 {
        if axis == self.dims {
            return g(x, u2);
        }
        let mut terms = Vec::with_capacity(self.nodes.len());
        for (&u, &w) in self.nodes.iter().zip(&self.weights) {
            x[axis] = self.center[axis] + self.scale * u;
            let inner = self.nested(axis + 1, x, u2 + u * u, g);
            terms.push(inner * (w * self.scale));
        }
        pairwise(&terms)
    }

    /// `Σ_i w_i g(x_i, |u_i|²)` with `u_i = (x_i − c)/s`.
    fn sum(&self, mut g: impl FnMut(&[f64], f64) -> Complex64) -> Result<Complex64> {
        let mut finite = true;
        let mut x = vec![0.0; self.dims];
        let total = self.nested(0, &mut x, 0.0, &mut |x, u2| {
            let v = g(x, u2);
            if !v.is_finite() {
                finite = false;
            }
            v
        });
        if !finite || !total.is_finite() {
            return Err(Error::NonFinite("quadrature integrand"));
        }
        Ok(total)
    }

    /// `∫ g(x) e^{−|(x−c)/s|²} dx`.
    pub fn integrate(&self, mut g: impl FnMut(&[f64]) -> Complex64) -> Result<Complex64> {
        self.sum(|x, _| g(x))
    }

    /// `∫ f(x) dx` for integrands that carry their own Gaussian decay.
    pub fn integrate_plain(&self, mut f: impl FnMut(&[f64]) -> Complex64) -> Result<Complex64> {
        self.sum(|x, u2| f(x) * libm::exp(u2))
    }
}

fn check_complex_dim(d: usize) -> Result<()> {
    if d == 0 || d > MAX_COMPLEX_DIM {
        return Err(Error::Precondition(format!(
            "complex dimension must lie in 1..={MAX_COMPLEX_DIM}, got {d}"
        )));
    }
    Ok(())
}

/// Interleaved real coordinates `(Re z₁, Im z₁, …)` of a complex point.
fn real_coords(z: &[Complex64]) -> Vec<f64> {
    z.iter().flat_map(|v| [v.re, v.im]).collect()
}

fn complex_point(x: &[f64], out: &mut [Complex64]) {
    for (j, v) in out.iter_mut().enumerate() {
        *v = Complex64::new(x[2 * j], x[2 * j + 1]);
    }
}

/// `(z, w) = Σ z_j conj(w_j)`.
fn sesq(z: &[Complex64], w: &[Complex64]) -> Complex64 {
    z.iter().zip(w).map(|(a, b)| a * b.conj()).sum()
}

fn norm_sqr(z: &[Complex64]) -> f64 {
    z.iter().map(|v| v.norm_sqr()).sum()
}

/// Runs `body(v, |u|²)` over a `ℂ^d` grid centred at `center` with unit
/// scale, where the grid weight is `e^{−|v − center|²}`.
fn complex_sum(
    center: &[Complex64],
    m: usize,
    mut body: impl FnMut(&[Complex64], f64) -> Complex64,
) -> Result<Complex64> {
    let d = center.len();
    check_complex_dim(d)?;
    let grid = gauss_hermite_grid(m, 2 * d, &real_coords(center), 1.0)?;
    let mut v = vec![ZERO; d];
    grid.sum(|x, u2| {
        complex_point(x, &mut v);
        body(&v, u2)
    })
}

/// `∫ f dμ = π^{−d} ∫ f(z) e^{−|z|²} dλ(z)` on a grid of real dimension `2d`
/// with interleaved real and imaginary parts.
pub fn integrate_gaussian_c(f: impl Fn(&[Complex64]) -> Complex64, d: usize, grid: &QuadratureGrid) -> Result<Complex64> {
    check_complex_dim(d)?;
    if grid.dims() != 2 * d {
        return Err(Error::DimensionMismatch { expected: 2 * d, found: grid.dims() });
    }
    let mut v = vec![ZERO; d];
    let total = grid.sum(|x, u2| {
        complex_point(x, &mut v);
        f(&v) * libm::exp(u2 - norm_sqr(&v))
    })?;
    Ok(total * libm::pow(PI, -(d as f64)))
}

/// Wick operator `π^{−d} ∫ a(z, w) F(w) e^{(z,w)} e^{−|w|²} dλ(w)`.
///
/// The modulus of `e^{(z,w) − |w|²}` is `e^{|z|²/4 − |w − z/2|²}`, so the
/// grid is centred at `w = z/2`.
pub fn wick_apply_quad(
    a: impl Fn(&[Complex64], &[Complex64]) -> Complex64,
    f: impl Fn(&[Complex64]) -> Complex64,
    z: &[Complex64],
    m: usize,
) -> Result<Complex64> {
    let center: Vec<Complex64> = z.iter().map(|v| v * 0.5).collect();
    let total = complex_sum(&center, m, |w, u2| {
        a(z, w) * f(w) * (sesq(z, w) - norm_sqr(w) + u2).exp()
    })?;
    Ok(total * libm::pow(PI, -(z.len() as f64)))
}

/// Anti-Wick operator `π^{−d} ∫ a(w, w) F(w) e^{(z,w)} e^{−|w|²} dλ(w)`.
pub fn antiwick_apply_quad(
    a_diag: impl Fn(&[Complex64]) -> Complex64,
    f: impl Fn(&[Complex64]) -> Complex64,
    z: &[Complex64],
    m: usize,
) -> Result<Complex64> {
    wick_apply_quad(|_, w| a_diag(w), f, z, m)
}

/// `−(z − v, w − v) + |v − (z+w)/2|²`, whose real part does not depend on `v`.
fn berezin_exponent(z: &[Complex64], w: &[Complex64], v: &[Complex64], u2: f64) -> Complex64 {
    let mut e = Complex64::new(u2, 0.0);
    for j in 0..v.len() {
        e -= (z[j] - v[j]) * (w[j] - v[j]).conj();
    }
    e
}

fn midpoint(z: &[Complex64], w: &[Complex64]) -> Result<Vec<Complex64>> {
    if z.len() != w.len() {
        return Err(Error::DimensionMismatch { expected: z.len(), found: w.len() });
    }
    Ok(z.iter().zip(w).map(|(a, b)| (a + b) * 0.5).collect())
}

/// Berezin transform `π^{−d} ∫ a(v, v) e^{−(z − v, w − v)} dλ(v)`: the Wick
/// symbol, at `(z, w)`, of the anti-Wick operator with symbol `a`.
pub fn berezin_transform_quad(
    a_diag: impl Fn(&[Complex64]) -> Complex64,
    z: &[Complex64],
    w: &[Complex64],
    m: usize,
) -> Result<Complex64> {
    let center = midpoint(z, w)?;
    let total = complex_sum(&center, m, |v, u2| a_diag(v) * berezin_exponent(z, w, v, u2).exp())?;
    Ok(total * libm::pow(PI, -(z.len() as f64)))
}

/// Twisted product `π^{−d} ∫ a₁(z, v) a₂(v, w) e^{−(z − v, w − v)} dλ(v)`.
pub fn twisted_product_quad(
    a1: impl Fn(&[Complex64], &[Complex64]) -> Complex64,
    a2: impl Fn(&[Complex64], &[Complex64]) -> Complex64,
    z: &[Complex64],
    w: &[Complex64],
    m: usize,
) -> Result<Complex64> {
    let center = midpoint(z, w)?;
    let total = complex_sum(&center, m, |v, u2| a1(z, v) * a2(v, w) * berezin_exponent(z, w, v, u2).exp())?;
    Ok(total * libm::pow(PI, -(z.len() as f64)))
}

/// Bargmann transform `∫ 𝔄(z, y) f(y) dy` with kernel
/// `𝔄(z, y) = π^{−d/4} exp(−½(⟨z, z⟩ + |y|²) + √2⟨z, y⟩)`.
///
/// For `f` with Gaussian decay `e^{−|y|²/2}` the integrand modulus peaks at
/// `y = Re z / √2`, where the grid is centred.
pub fn bargmann_quad(f: impl Fn(&[f64]) -> Complex64, z: &[Complex64], m: usize) -> Result<Complex64> {
    let d = z.len();
    check_complex_dim(d)?;
    let center: Vec<f64> = z.iter().map(|v| v.re / SQRT_2).collect();
    let grid = gauss_hermite_grid(m, d, &center, 1.0)?;
    let zz: Complex64 = z.iter().map(|v| v * v).sum();
    let total = grid.sum(|y, u2| {
        let yy: f64 = y.iter().map(|t| t * t).sum();
        let zy: Complex64 = z.iter().zip(y).map(|(a, b)| a * b).sum();
        let e = -0.5 * (zz + yy) + SQRT_2 * zy + u2;
        e.exp() * f(y)
    })?;
    Ok(total * libm::pow(PI, -0.25 * d as f64))
}

/// `φ(x) = π^{−d/4} e^{−|x|²/2}`.
pub fn gaussian_window(x: &[f64]) -> f64 {
    let xx: f64 = x.iter().map(|t| t * t).sum();
    libm::pow(PI, -0.25 * x.len() as f64) * libm::exp(-0.5 * xx)
}

/// Short-time Fourier transform with the Gaussian window,
/// `(2π)^{−d/2} ∫ f(y) φ(y − x) e^{−i⟨y,ξ⟩} dy`, on a grid centred at `x/2`.
pub fn stft_gaussian_quad(f: impl Fn(&[f64]) -> Complex64, x: &[f64], xi: &[f64], m: usize) -> Result<Complex64> {
    let d = x.len();
    check_complex_dim(d)?;
    if xi.len() != d {
        return Err(Error::DimensionMismatch { expected: d, found: xi.len() });
    }
    let center: Vec<f64> = x.iter().map(|t| 0.5 * t).collect();
    let grid = gauss_hermite_grid(m, d, &center, 1.0)?;
    let total = grid.sum(|y, u2| {
        let shifted: f64 = y.iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum();
        let phase: f64 = y.iter().zip(xi).map(|(a, b)| a * b).sum();
        let e = Complex64::new(u2 - 0.5 * shifted, -phase);
        f(y) * e.exp()
    })?;
    Ok(total * libm::pow(2.0 * PI, -0.5 * d as f64) * libm::pow(PI, -0.25 * d as f64))
}

/// `(U G)(x + iξ) = (2π)^{d/2} e^{(|x|²+|ξ|²)/2} e^{−i⟨x,ξ⟩} G(√2x, −√2ξ)`,
/// taking a phase-space function to an entire function.
pub fn uv_map(g: impl Fn(&[f64], &[f64]) -> Complex64, x: &[f64], xi: &[f64]) -> Complex64 {
    let d = x.len();
    let sx: Vec<f64> = x.iter().map(|t| SQRT_2 * t).collect();
    let sxi: Vec<f64> = xi.iter().map(|t| -SQRT_2 * t).collect();
    let r2: f64 = x.iter().chain(xi).map(|t| t * t).sum();
    let phase: f64 = x.iter().zip(xi).map(|(a, b)| a * b).sum();
    let e = Complex64::new(0.5 * r2, -phase);
    libm::pow(2.0 * PI, 0.5 * d as f64) * e.exp() * g(&sx, &sxi)
}

/// Inverse of [`uv_map`]:
/// `(U⁻¹F)(x, ξ) = (2π)^{−d/2} e^{−(|x|²+|ξ|²)/4} e^{−i⟨x,ξ⟩/2} F((x − iξ)/√2)`.
pub fn uv_inv(f: impl Fn(&[Complex64]) -> Complex64, x: &[f64], xi: &[f64]) -> Complex64 {
    let d = x.len();
    let z: Vec<Complex64> = x.iter().zip(xi).map(|(a, b)| Complex64::new(*a, -*b) / SQRT_2).collect();
    let r2: f64 = x.iter().chain(xi).map(|t| t * t).sum();
    let phase: f64 = x.iter().zip(xi).map(|(a, b)| a * b).sum();
    let e = Complex64::new(-0.25 * r2, -0.5 * phase);
    libm::pow(2.0 * PI, -0.5 * d as f64) * e.exp() * f(&z)
}

/// Matrix of the Toeplitz (localization) operator with symbol `𝔞(x, ξ)` in
/// the Hermite basis: `M(j, k) = ∫∫ 𝔞 · V_φh_k · conj(V_φh_j) dx dξ`, where
/// `V_φh_k = U⁻¹ e_k`.
///
/// `|V_φh_k|²` carries the factor `e^{−(|x|²+|ξ|²)/2}`, hence a grid on
/// `ℝ^{2d}` centred at the origin with scale `√2`.
pub fn toeplitz_matrix_quad(
    symbol: impl Fn(&[f64], &[f64]) -> Complex64,
    d: usize,
    n: u32,
    m: usize,
) -> Result<OperatorMatrix> {
    check_complex_dim(d)?;
    let indices = enumerate_degree(d, n);
    let side = indices.len();
    let grid = gauss_hermite_grid(m, 2 * d, &vec![0.0; 2 * d], SQRT_2)?;
    let mut acc = vec![CompensatedSum::default(); side * side];
    let mut stft = vec![ZERO; side];
    let mut finite = true;
    for i in 0..grid.len() {
        let (node, w) = grid.node(i);
        let (x, xi) = node.split_at(d);
        let u2: f64 = node.iter().map(|t| t * t).sum::<f64>() / 2.0;
        for (k, alpha) in indices.iter().enumerate() {
            stft[k] = uv_inv(|z| eval_basis(alpha, z).unwrap_or(ZERO), x, xi);
        }
        let s = symbol(x, xi) * (w * libm::exp(u2));
        if !s.is_finite() {
            finite = false;
        }
        for j in 0..side {
            let left = stft[j].conj() * s;
            for k in 0..side {
                acc[j * side + k].add(left * stft[k]);
            }
        }
    }
    if !finite {
        return Err(Error::NonFinite("Toeplitz symbol"));
    }
    OperatorMatrix::from_data(d, n, acc.iter().map(|a| a.value()).collect())
}

/// Both sides of the rank-one Wick/anti-Wick identity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankOneCheck {
    /// `π^{−d} ∫ e_α(t₀v) e_β(t₀v̄) e^{−(z − v, w − v)} dλ(v)` by quadrature.
    pub lhs: Complex64,
    /// `Σ_{γ ≤ α,β} (C(α,γ) C(β,γ))^{1/2} t^{|γ|} e_{α−γ}(t₀z) e_{β−γ}(t₀w̄)`.
    pub rhs: Complex64,
}

/// Evaluates both sides of the identity expressing the anti-Wick symbol
/// `e_α(t₀v) e_β(t₀v̄)` in Wick form, with `t₀` the principal square root of
/// `t`.
pub fn rank_one_check(
    alpha: &MultiIndex,
    beta: &MultiIndex,
    t: Complex64,
    z: &[Complex64],
    w: &[Complex64],
    m: usize,
) -> Result<RankOneCheck> {
    if t == ZERO {
        return Err(Error::Domain(String::from("t must be nonzero")));
    }
    let d = z.len();
    if alpha.dim() != d || beta.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, found: alpha.dim().min(beta.dim()) });
    }
    let t0 = t.sqrt();
    let lhs = berezin_transform_quad(
        |v| {
            let a: Vec<Complex64> = v.iter().map(|x| t0 * x).collect();
            let b: Vec<Complex64> = v.iter().map(|x| t0 * x.conj()).collect();
            eval_basis(alpha, &a).unwrap_or(ZERO) * eval_basis(beta, &b).unwrap_or(ZERO)
        },
        z,
        w,
        m,
    )?;
    let tz: Vec<Complex64> = z.iter().map(|x| t0 * x).collect();
    let tw: Vec<Complex64> = w.iter().map(|x| t0 * x.conj()).collect();
    let mut rhs = CompensatedSum::default();
    let bound = alpha.min(beta);
    for gamma in enumerate_degree(d, bound.degree()) {
        if !gamma.le(&bound) {
            continue;
        }
        let (Some(a), Some(b)) = (alpha.checked_sub(&gamma), beta.checked_sub(&gamma)) else {
            continue;
        };
        let weight = crate::multiindex::sqrt_multi_binomial(alpha, &gamma)
            * crate::multiindex::sqrt_multi_binomial(beta, &gamma);
        rhs.add(weight * t.powu(gamma.degree()) * eval_basis(&a, &tz)? * eval_basis(&b, &tw)?);
    }
    Ok(RankOneCheck { lhs, rhs: rhs.value() })
}
