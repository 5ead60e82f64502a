//! Conversions between kernels, Wick symbols and anti-Wick symbols, and the
//! operator algebra built on them.
//!
//! A kernel `K(z, w) = Σ c(α, β) e_α(z) e_β(w̄)` acts on `F = Σ f(β) e_β` by
//! `(KF)(α) = Σ_β c(α, β) f(β)`, so coefficient maps double as (infinite)
//! matrices. A Wick symbol `a` has kernel `e^{(z,w)} a(z, w)`, which on the
//! coefficient side is `T₀,₁`. Anti-Wick symbols reach Wick symbols through
//! `T₀,₁*`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::binomial::{t0, t0_star};
use crate::error::{check_dim, Error, Result};
use crate::linalg::hermitian_eigenvalues;
use crate::multiindex::{enumerate_degree, rank, MultiIndex};
use crate::series::{KernelCoeffs, SeriesCoeffs};
use crate::sum::CompensatedSum;

/// Kernel of the Wick operator with symbol `a`, exact for all entries with
/// `|α|, |β| ≤ max(out_degree, deg a)`.
pub fn wick_to_kernel(a: &KernelCoeffs, out_degree: u32) -> Result<KernelCoeffs> {
    let n = out_degree.max(a.max_degree().unwrap_or(0));
    t0(a, Complex64::new(1.0, 0.0), n)
}

/// Wick symbol of the kernel `k`, retaining degrees up to `out_degree`.
pub fn kernel_to_wick(k: &KernelCoeffs, out_degree: u32) -> Result<KernelCoeffs> {
    t0(k, Complex64::new(-1.0, 0.0), out_degree)
}

/// Wick symbol of the anti-Wick operator with symbol `a`.
pub fn antiwick_to_wick(a: &KernelCoeffs) -> Result<KernelCoeffs> {
    t0_star(a, Complex64::new(1.0, 0.0))
}

/// Anti-Wick symbol of the Wick operator with symbol `a`.
pub fn wick_to_antiwick(a: &KernelCoeffs) -> Result<KernelCoeffs> {
    t0_star(a, Complex64::new(-1.0, 0.0))
}

/// Applies the kernel `k` to the series `f`.
pub fn apply_operator(k: &KernelCoeffs, f: &SeriesCoeffs) -> Result<SeriesCoeffs> {
    check_dim(k.dim_in(), f.dim())?;
    let mut acc: BTreeMap<MultiIndex, CompensatedSum> = BTreeMap::new();
    for ((a, b), v) in k.iter() {
        let x = f.get(b);
        if x.norm() > 0.0 {
            acc.entry(a.clone()).or_default().add(v * x);
        }
    }
    SeriesCoeffs::from_entries(k.dim_out(), acc.into_iter().map(|(a, s)| (a, s.value())))
}

/// Kernel of `K₂ ∘ K₁`: `c₃(α, γ) = Σ_β c₂(α, β) c₁(β, γ)`.
pub fn compose_kernels(k2: &KernelCoeffs, k1: &KernelCoeffs) -> Result<KernelCoeffs> {
    check_dim(k2.dim_in(), k1.dim_out())?;
    let mut rows: BTreeMap<&MultiIndex, Vec<(&MultiIndex, Complex64)>> = BTreeMap::new();
    for ((b, g), &v) in k1.iter() {
        rows.entry(b).or_default().push((g, v));
    }
    let mut acc: BTreeMap<(MultiIndex, MultiIndex), CompensatedSum> = BTreeMap::new();
    for ((a, b), &v2) in k2.iter() {
        if let Some(row) = rows.get(b) {
            for &(g, v1) in row {
                acc.entry((a.clone(), g.clone())).or_default().add(v2 * v1);
            }
        }
    }
    let mut out = KernelCoeffs::new(k2.dim_out(), k1.dim_in());
    for ((a, g), s) in acc {
        out.accumulate(a, g, s.value());
    }
    out.prune();
    Ok(out)
}

/// Wick symbol of `Op(a₁) ∘ Op(a₂)`.
///
/// The product symbol has degree at most `deg a₁ + deg a₂` in each
/// variable. Kernel entries satisfy `|α| − |β| = |a| − |b|` for some support
/// entry `(a, b)`, so kernels truncated at twice that degree make every
/// retained product entry exact.
pub fn twisted_product(a1: &KernelCoeffs, a2: &KernelCoeffs) -> Result<KernelCoeffs> {
    let d = a1.square_dim()?;
    check_dim(d, a2.square_dim()?)?;
    if a1.is_empty() || a2.is_empty() {
        return Ok(KernelCoeffs::square(d));
    }
    let top = a1.max_degree().unwrap_or(0) + a2.max_degree().unwrap_or(0);
    let k1 = wick_to_kernel(a1, 2 * top)?;
    let k2 = wick_to_kernel(a2, 2 * top)?;
    let k = compose_kernels(&k1, &k2)?.truncated(top);
    kernel_to_wick(&k, top)
}

/// Dense truncation of a square kernel to `|α|, |β| ≤ N`, rows and columns
/// ordered as in [`enumerate_degree`].
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    degree: u32,
    dim: usize,
    indices: Vec<MultiIndex>,
    data: Vec<Complex64>,
}

impl OperatorMatrix {
    /// Zero matrix of truncation degree `n`.
    pub fn zeros(dim: usize, n: u32) -> Self {
        let indices = enumerate_degree(dim, n);
        let side = indices.len();
        OperatorMatrix { degree: n, dim, indices, data: vec![Complex64::new(0.0, 0.0); side * side] }
    }

    /// Builds a matrix from row-major entries.
    pub fn from_data(dim: usize, n: u32, data: Vec<Complex64>) -> Result<Self> {
        let mut m = Self::zeros(dim, n);
        if data.len() != m.data.len() {
            return Err(Error::Precondition(format!(
                "expected {} matrix entries, found {}",
                m.data.len(),
                data.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("matrix entry"));
        }
        m.data = data;
        Ok(m)
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of rows (and columns).
    pub fn side(&self) -> usize {
        self.indices.len()
    }

    pub fn indices(&self) -> &[MultiIndex] {
        &self.indices
    }

    /// Row-major entries.
    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.side() + j]
    }

    /// Entry at `(α, β)`, or zero outside the truncation.
    pub fn entry(&self, alpha: &MultiIndex, beta: &MultiIndex) -> Complex64 {
        if alpha.dim() != self.dim || beta.dim() != self.dim {
            return Complex64::new(0.0, 0.0);
        }
        if alpha.degree() > self.degree || beta.degree() > self.degree {
            return Complex64::new(0.0, 0.0);
        }
        self.get(rank(alpha), rank(beta))
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        check_dim(self.dim, other.dim)?;
        if self.degree != other.degree {
            return Err(Error::Precondition(format!(
                "truncation degrees differ: {} and {}",
                self.degree, other.degree
            )));
        }
        let n = self.side();
        let mut out = Self::zeros(self.dim, self.degree);
        for i in 0..n {
            for j in 0..n {
                let mut acc = CompensatedSum::default();
                for k in 0..n {
                    acc.add(self.data[i * n + k] * other.data[k * n + j]);
                }
                out.data[i * n + j] = acc.value();
            }
        }
        Ok(out)
    }

    pub fn adjoint(&self) -> Self {
        let n = self.side();
        let mut out = self.clone();
        for i in 0..n {
            for j in 0..n {
                out.data[i * n + j] = self.data[j * n + i].conj();
            }
        }
        out
    }

    /// Largest entrywise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// Matrix-vector product on the coefficient vector of `f` restricted to
    /// the truncation.
    pub fn apply(&self, f: &SeriesCoeffs) -> Result<SeriesCoeffs> {
        check_dim(self.dim, f.dim())?;
        let n = self.side();
        let x: Vec<Complex64> = self.indices.iter().map(|b| f.get(b)).collect();
        let mut out = SeriesCoeffs::new(self.dim);
        for i in 0..n {
            let mut acc = CompensatedSum::default();
            for (a, b) in self.data[i * n..(i + 1) * n].iter().zip(&x) {
                acc.add(a * b);
            }
            let v = acc.value();
            if v.norm() > 0.0 {
                out.insert(self.indices[i].clone(), v)?;
            }
        }
        Ok(out)
    }

    /// Sparse kernel with the nonzero entries of the matrix.
    pub fn to_kernel(&self) -> KernelCoeffs {
        let n = self.side();
        let mut k = KernelCoeffs::square(self.dim);
        for (pos, &v) in self.data.iter().enumerate() {
            if v.norm() > 0.0 {
                k.insert_unchecked(self.indices[pos / n].clone(), self.indices[pos % n].clone(), v);
            }
        }
        k
    }
}

/// Dense matrix of `k` over `enumerate_degree(d, n)`.
pub fn operator_matrix(k: &KernelCoeffs, n: u32) -> Result<OperatorMatrix> {
    let d = k.square_dim()?;
    let mut m = OperatorMatrix::zeros(d, n);
    let side = m.side();
    for ((a, b), &v) in k.iter() {
        if a.degree() <= n && b.degree() <= n {
            m.data[rank(a) * side + rank(b)] = v;
        }
    }
    Ok(m)
}

/// Outcome of [`psd_check`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsdVerdict {
    pub hermitian: bool,
    pub psd: bool,
    /// Smallest eigenvalue; only computed for Hermitian input.
    pub min_eigenvalue: Option<f64>,
}

/// Decides whether `m` is Hermitian and positive semi-definite up to `tol`.
pub fn psd_check(m: &OperatorMatrix, tol: f64) -> Result<PsdVerdict> {
    if tol.is_nan() || tol < 0.0 {
        return Err(Error::Domain(format!("tolerance must be non-negative, got {tol}")));
    }
    if m.max_abs_diff(&m.adjoint()) > tol {
        return Ok(PsdVerdict { hermitian: false, psd: false, min_eigenvalue: None });
    }
    let eig = hermitian_eigenvalues(m.data(), m.side())?;
    let min = eig.first().copied().unwrap_or(0.0);
    Ok(PsdVerdict { hermitian: true, psd: min >= -tol, min_eigenvalue: Some(min) })
}

/// `L²` norm of `K(z, w)` against `e^{−r(|z|²+|w|²)}`:
/// `(π^{d₁+d₂} Σ |c(α, β)|² r^{−(|α|+|β|+d₁+d₂)})^{1/2}`.
pub fn a2_r_norm(k: &KernelCoeffs, r: f64) -> Result<f64> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::Domain(format!("radius must be positive, got {r}")));
    }
    let dims = (k.dim_out() + k.dim_in()) as f64;
    let ln_r = libm::log(r);
    let mut s = 0.0;
    for ((a, b), v) in k.iter() {
        s += v.norm_sqr() * libm::exp(-f64::from(a.degree() + b.degree()) * ln_r);
    }
    Ok(libm::sqrt(s * libm::pow(core::f64::consts::PI / r, dims)))
}

/// `(1 − (1 + r₁)/r₂)^{−d}`, the operator bound of `T₀,ₜ` (`|t| ≤ 1`) from
/// `ℓ²_{r₁}` to `ℓ²_{r₂}`.
pub fn t0_bound_constant(r1: f64, r2: f64, d: usize) -> Result<f64> {
    if !(r1 > 0.0 && r2 > 1.0 + r1) {
        return Err(Error::Domain(format!("need r1 > 0 and r2 > 1 + r1, got r1 = {r1}, r2 = {r2}")));
    }
    Ok(libm::pow(1.0 - (1.0 + r1) / r2, -(d as f64)))
}
