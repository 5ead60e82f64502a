//! Sparse coefficient representations of power series and kernels, basis
//! evaluation, products, pairings and ladder operators.
//!
//! A [`SeriesCoeffs`] stores `F = Σ c(α) e_α` and a [`KernelCoeffs`] stores
//! `K(z, w) = Σ c(α, β) e_α(z) e_β(w̄)` where `e_α(z) = z^α / √(α!)`. The
//! second index of a kernel is always paired with the *conjugate* of the
//! second argument, so a kernel, a Wick symbol and an anti-Wick symbol share
//! one representation.

use alloc::collections::btree_map::{BTreeMap, Entry};
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
use num_traits::Zero;

use crate::error::{check_dim, Error, Result};
use crate::multiindex::{sqrt_multi_binomial, MultiIndex};

/// Entries whose modulus falls below this are removed from sparse maps.
pub const DROP_THRESHOLD: f64 = 1e-300;

fn ensure_finite(v: Complex64) -> Result<()> {
    if v.re.is_finite() && v.im.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite("coefficient"))
    }
}

fn accumulate<K: Ord>(map: &mut BTreeMap<K, Complex64>, key: K, value: Complex64) {
    match map.entry(key) {
        Entry::Vacant(e) => {
            e.insert(value);
        }
        Entry::Occupied(mut e) => {
            *e.get_mut() += value;
        }
    }
}

fn prune<K: Ord>(map: &mut BTreeMap<K, Complex64>) {
    map.retain(|_, v| v.norm() >= DROP_THRESHOLD);
}

/// Table `t[j][k] = e_k(z_j) = z_j^k / √(k!)` for one point.
pub(crate) fn basis_table(z: &[Complex64], max_degree: u32) -> Vec<Vec<Complex64>> {
    z.iter()
        .map(|&zj| {
            let mut row = Vec::with_capacity(max_degree as usize + 1);
            let mut t = Complex64::new(1.0, 0.0);
            row.push(t);
            for k in 1..=max_degree {
                t = t * zj / libm::sqrt(f64::from(k));
                row.push(t);
            }
            row
        })
        .collect()
}

fn table_lookup(table: &[Vec<Complex64>], alpha: &MultiIndex) -> Complex64 {
    alpha
        .entries()
        .iter()
        .zip(table)
        .fold(Complex64::new(1.0, 0.0), |acc, (&a, row)| acc * row[a as usize])
}

fn max_entry(alpha: &MultiIndex) -> u32 {
    alpha.entries().iter().copied().max().unwrap_or(0)
}

/// Finitely supported power series `Σ c(α) e_α` on `ℂ^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesCoeffs {
    dim: usize,
    entries: BTreeMap<MultiIndex, Complex64>,
}

impl SeriesCoeffs {
    /// The zero series on `ℂ^dim`.
    pub fn new(dim: usize) -> Self {
        assert!(dim >= 1, "dimension must be positive");
        SeriesCoeffs { dim, entries: BTreeMap::new() }
    }

    /// Builds a series from `(α, c(α))` pairs; repeated indices accumulate.
    pub fn from_entries(dim: usize, entries: impl IntoIterator<Item = (MultiIndex, Complex64)>) -> Result<Self> {
        let mut s = Self::new(dim);
        for (alpha, value) in entries {
            check_dim(dim, alpha.dim())?;
            ensure_finite(value)?;
            accumulate(&mut s.entries, alpha, value);
        }
        prune(&mut s.entries);
        Ok(s)
    }

    /// `e_α`.
    pub fn basis(alpha: MultiIndex) -> Self {
        let dim = alpha.dim();
        let mut s = Self::new(dim);
        s.entries.insert(alpha, Complex64::new(1.0, 0.0));
        s
    }

    /// The constant function 1.
    pub fn one(dim: usize) -> Self {
        Self::basis(MultiIndex::zero(dim))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Sets `c(α)`, overwriting any previous value.
    pub fn insert(&mut self, alpha: MultiIndex, value: Complex64) -> Result<()> {
        check_dim(self.dim, alpha.dim())?;
        ensure_finite(value)?;
        if value.norm() < DROP_THRESHOLD {
            self.entries.remove(&alpha);
        } else {
            self.entries.insert(alpha, value);
        }
        Ok(())
    }

    pub fn get(&self, alpha: &MultiIndex) -> Complex64 {
        self.entries.get(alpha).copied().unwrap_or_else(Complex64::zero)
    }

    /// Entries in (degree, lex) order.
    pub fn iter(&self) -> impl Iterator<Item = (&MultiIndex, &Complex64)> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Largest total degree in the support.
    pub fn max_degree(&self) -> Option<u32> {
        self.entries.keys().map(MultiIndex::degree).max()
    }

    pub fn scale(&self, lambda: Complex64) -> Self {
        let mut out = self.clone();
        out.entries.values_mut().for_each(|v| *v *= lambda);
        prune(&mut out.entries);
        out
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        check_dim(self.dim, other.dim)?;
        let mut out = self.clone();
        for (k, v) in &other.entries {
            accumulate(&mut out.entries, k.clone(), *v);
        }
        prune(&mut out.entries);
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    /// Entrywise conjugate coefficients, i.e. the series `z ↦ conj(F(z̄))`.
    pub fn conj(&self) -> Self {
        let mut out = self.clone();
        out.entries.values_mut().for_each(|v| *v = v.conj());
        out
    }

    /// Keeps only entries with `|α| ≤ n`.
    pub fn truncated(&self, n: u32) -> Self {
        SeriesCoeffs {
            dim: self.dim,
            entries: self.entries.iter().filter(|(k, _)| k.degree() <= n).map(|(k, v)| (k.clone(), *v)).collect(),
        }
    }

    /// Largest coefficient modulus.
    pub fn max_abs(&self) -> f64 {
        self.entries.values().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Evaluates the series at `z`. Panics if `z.len() != dim`.
    pub fn evaluate(&self, z: &[Complex64]) -> Complex64 {
        assert_eq!(z.len(), self.dim, "point dimension mismatch");
        let top = self.entries.keys().map(max_entry).max().unwrap_or(0);
        let table = basis_table(z, top);
        self.entries.iter().fold(Complex64::zero(), |acc, (alpha, c)| acc + c * table_lookup(&table, alpha))
    }
}

/// Finitely supported kernel `Σ c(α, β) e_α(z) e_β(w̄)` on `ℂ^{d_out} × ℂ^{d_in}`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelCoeffs {
    dim_out: usize,
    dim_in: usize,
    entries: BTreeMap<(MultiIndex, MultiIndex), Complex64>,
}

impl KernelCoeffs {
    /// The zero kernel; `dim_out` pairs with the first index, `dim_in` with the second.
    pub fn new(dim_out: usize, dim_in: usize) -> Self {
        assert!(dim_out >= 1 && dim_in >= 1, "dimensions must be positive");
        KernelCoeffs { dim_out, dim_in, entries: BTreeMap::new() }
    }

    pub fn square(dim: usize) -> Self {
        Self::new(dim, dim)
    }

    /// Builds a kernel from `((α, β), c)` pairs; repeated indices accumulate.
    pub fn from_entries(
        dim_out: usize,
        dim_in: usize,
        entries: impl IntoIterator<Item = ((MultiIndex, MultiIndex), Complex64)>,
    ) -> Result<Self> {
        let mut k = Self::new(dim_out, dim_in);
        for ((a, b), value) in entries {
            check_dim(dim_out, a.dim())?;
            check_dim(dim_in, b.dim())?;
            ensure_finite(value)?;
            accumulate(&mut k.entries, (a, b), value);
        }
        prune(&mut k.entries);
        Ok(k)
    }

    /// Single entry `e_α(z) e_β(w̄)`.
    pub fn basis(alpha: MultiIndex, beta: MultiIndex) -> Self {
        let mut k = Self::new(alpha.dim(), beta.dim());
        k.entries.insert((alpha, beta), Complex64::new(1.0, 0.0));
        k
    }

    /// Diagonal ones for `|α| ≤ n`: the degree-`n` truncation of `e^{(z,w)}`,
    /// i.e. the kernel of the identity operator.
    pub fn identity(dim: usize, n: u32) -> Self {
        let mut k = Self::square(dim);
        for a in crate::multiindex::enumerate_degree(dim, n) {
            k.entries.insert((a.clone(), a), Complex64::new(1.0, 0.0));
        }
        k
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    /// The common dimension of a square kernel.
    pub fn square_dim(&self) -> Result<usize> {
        check_dim(self.dim_out, self.dim_in)?;
        Ok(self.dim_out)
    }

    /// Sets `c(α, β)`, overwriting any previous value.
    pub fn insert(&mut self, alpha: MultiIndex, beta: MultiIndex, value: Complex64) -> Result<()> {
        check_dim(self.dim_out, alpha.dim())?;
        check_dim(self.dim_in, beta.dim())?;
        ensure_finite(value)?;
        if value.norm() < DROP_THRESHOLD {
            self.entries.remove(&(alpha, beta));
        } else {
            self.entries.insert((alpha, beta), value);
        }
        Ok(())
    }

    pub(crate) fn accumulate(&mut self, alpha: MultiIndex, beta: MultiIndex, value: Complex64) {
        accumulate(&mut self.entries, (alpha, beta), value);
    }

    pub(crate) fn prune(&mut self) {
        prune(&mut self.entries);
    }

    /// Builds a kernel from entries already sorted by key, dropping values
    /// below the storage threshold.
    pub(crate) fn from_sorted(dim_out: usize, dim_in: usize, entries: Vec<((MultiIndex, MultiIndex), Complex64)>) -> Self {
        let entries = entries.into_iter().filter(|(_, v)| v.norm() >= DROP_THRESHOLD).collect();
        KernelCoeffs { dim_out, dim_in, entries }
    }

    pub(crate) fn insert_unchecked(&mut self, alpha: MultiIndex, beta: MultiIndex, value: Complex64) {
        if value.norm() >= DROP_THRESHOLD {
            self.entries.insert((alpha, beta), value);
        }
    }

    pub fn get(&self, alpha: &MultiIndex, beta: &MultiIndex) -> Complex64 {
        // BTreeMap lookups need an owned tuple key.
        self.entries
            .get(&(alpha.clone(), beta.clone()))
            .copied()
            .unwrap_or_else(Complex64::zero)
    }

    /// Entries ordered by first index, then second index.
    pub fn iter(&self) -> impl Iterator<Item = (&(MultiIndex, MultiIndex), &Complex64)> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `max(|α|, |β|)` over the support.
    pub fn max_degree(&self) -> Option<u32> {
        self.entries.keys().map(|(a, b)| a.degree().max(b.degree())).max()
    }

    /// Keeps only entries with `|α| ≤ n` and `|β| ≤ n`.
    pub fn truncated(&self, n: u32) -> Self {
        KernelCoeffs {
            dim_out: self.dim_out,
            dim_in: self.dim_in,
            entries: self
                .entries
                .iter()
                .filter(|((a, b), _)| a.degree() <= n && b.degree() <= n)
                .map(|(k, v)| (k.clone(), *v))
                .collect(),
        }
    }

    pub fn scale(&self, lambda: Complex64) -> Self {
        let mut out = self.clone();
        out.entries.values_mut().for_each(|v| *v *= lambda);
        prune(&mut out.entries);
        out
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.combine(other, Complex64::new(1.0, 0.0))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.combine(other, Complex64::new(-1.0, 0.0))
    }

    /// `self + sign · other` by a linear merge of the sorted supports.
    fn combine(&self, other: &Self, sign: Complex64) -> Result<Self> {
        check_dim(self.dim_out, other.dim_out)?;
        check_dim(self.dim_in, other.dim_in)?;
        let mut merged = Vec::with_capacity(self.entries.len() + other.entries.len());
        let mut left = self.entries.iter().peekable();
        let mut right = other.entries.iter().peekable();
        loop {
            let order = match (left.peek(), right.peek()) {
                (None, None) => break,
                (Some(_), None) => core::cmp::Ordering::Less,
                (None, Some(_)) => core::cmp::Ordering::Greater,
                (Some((a, _)), Some((b, _))) => a.cmp(b),
            };
            match order {
                core::cmp::Ordering::Less => {
                    let (k, v) = left.next().unwrap();
                    merged.push((k.clone(), *v));
                }
                core::cmp::Ordering::Greater => {
                    let (k, v) = right.next().unwrap();
                    merged.push((k.clone(), sign * v));
                }
                core::cmp::Ordering::Equal => {
                    let (k, v) = left.next().unwrap();
                    let (_, w) = right.next().unwrap();
                    merged.push((k.clone(), v + sign * w));
                }
            }
        }
        Ok(Self::from_sorted(self.dim_out, self.dim_in, merged))
    }

    /// `c(α, β) ↦ c(β, α)`.
    pub fn transpose(&self) -> Self {
        KernelCoeffs {
            dim_out: self.dim_in,
            dim_in: self.dim_out,
            entries: self.entries.iter().map(|((a, b), v)| ((b.clone(), a.clone()), *v)).collect(),
        }
    }

    /// Kernel of the Hilbert-space adjoint: `c(α, β) ↦ conj(c(β, α))`.
    pub fn adjoint(&self) -> Self {
        let mut t = self.transpose();
        t.entries.values_mut().for_each(|v| *v = v.conj());
        t
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.values().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Plain `ℓ²` norm of the coefficients.
    pub fn l2_norm(&self) -> f64 {
        libm::sqrt(self.entries.values().map(|v| v.norm_sqr()).sum())
    }

    /// Evaluates `Σ c(α, β) e_α(z) e_β(w̄)`. Panics on dimension mismatch.
    pub fn evaluate(&self, z: &[Complex64], w: &[Complex64]) -> Complex64 {
        assert_eq!(z.len(), self.dim_out, "first point dimension mismatch");
        assert_eq!(w.len(), self.dim_in, "second point dimension mismatch");
        let (top_a, top_b) = self
            .entries
            .keys()
            .fold((0, 0), |(x, y), (a, b)| (x.max(max_entry(a)), y.max(max_entry(b))));
        let wbar: Vec<Complex64> = w.iter().map(|v| v.conj()).collect();
        let tz = basis_table(z, top_a);
        let tw = basis_table(&wbar, top_b);
        self.entries.iter().fold(Complex64::zero(), |acc, ((a, b), c)| {
            acc + c * table_lookup(&tz, a) * table_lookup(&tw, b)
        })
    }
}

/// `e_α(z) = z^α / √(α!)`.
pub fn eval_basis(alpha: &MultiIndex, z: &[Complex64]) -> Result<Complex64> {
    check_dim(alpha.dim(), z.len())?;
    let table = basis_table(z, max_entry(alpha));
    Ok(table_lookup(&table, alpha))
}

/// `F(z) = Σ c(α) e_α(z)`.
pub fn eval_series(f: &SeriesCoeffs, z: &[Complex64]) -> Result<Complex64> {
    check_dim(f.dim, z.len())?;
    Ok(f.evaluate(z))
}

/// `K(z, w) = Σ c(α, β) e_α(z) e_β(w̄)`.
pub fn eval_kernel(k: &KernelCoeffs, z: &[Complex64], w: &[Complex64]) -> Result<Complex64> {
    check_dim(k.dim_out, z.len())?;
    check_dim(k.dim_in, w.len())?;
    Ok(k.evaluate(z, w))
}

/// Pointwise product `F₁·F₂` in coefficient form:
/// `c(α) = Σ_{α₁+α₂=α} C(α, α₁)^{1/2} c₁(α₁) c₂(α₂)`.
pub fn multiply(f1: &SeriesCoeffs, f2: &SeriesCoeffs) -> Result<SeriesCoeffs> {
    check_dim(f1.dim, f2.dim)?;
    let mut out = SeriesCoeffs::new(f1.dim);
    for (a1, c1) in &f1.entries {
        for (a2, c2) in &f2.entries {
            let alpha = a1.add(a2);
            let w = sqrt_multi_binomial(&alpha, a1);
            accumulate(&mut out.entries, alpha, c1 * c2 * w);
        }
    }
    prune(&mut out.entries);
    Ok(out)
}

/// Sesquilinear `A²` pairing `(F, G) = Σ c_F(α) conj(c_G(α))`.
pub fn a2_inner(f: &SeriesCoeffs, g: &SeriesCoeffs) -> Result<Complex64> {
    check_dim(f.dim, g.dim)?;
    Ok(f.entries
        .iter()
        .filter_map(|(a, cf)| g.entries.get(a).map(|cg| cf * cg.conj()))
        .fold(Complex64::zero(), |acc, t| acc + t))
}

/// Bilinear `A²` pairing `⟨F, G⟩ = Σ c_F(α) c_G(α)`.
pub fn a2_bilinear(f: &SeriesCoeffs, g: &SeriesCoeffs) -> Result<Complex64> {
    check_dim(f.dim, g.dim)?;
    Ok(f.entries
        .iter()
        .filter_map(|(a, cf)| g.entries.get(a).map(|cg| cf * cg))
        .fold(Complex64::zero(), |acc, t| acc + t))
}

/// Which ladder operator [`ladder`] applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LadderMode {
    /// Multiplication by `z_j`: `z_j e_α = √(α_j + 1) e_{α+e_j}`.
    Multiply,
    /// Differentiation `∂_j e_α = √(α_j) e_{α−e_j}`.
    Differentiate,
}

/// Applies `z_j` or `∂_{z_j}` (`axis` is zero based).
pub fn ladder(f: &SeriesCoeffs, axis: usize, mode: LadderMode) -> Result<SeriesCoeffs> {
    if axis >= f.dim {
        return Err(Error::Precondition(alloc::format!(
            "axis {axis} out of range for dimension {}",
            f.dim
        )));
    }
    let mut out = SeriesCoeffs::new(f.dim);
    for (alpha, c) in &f.entries {
        let k = alpha.entries()[axis];
        match mode {
            LadderMode::Multiply => {
                let factor = libm::sqrt(f64::from(k + 1));
                out.entries.insert(alpha.with_axis(axis, k + 1), c * factor);
            }
            LadderMode::Differentiate => {
                if k > 0 {
                    let factor = libm::sqrt(f64::from(k));
                    out.entries.insert(alpha.with_axis(axis, k - 1), c * factor);
                }
            }
        }
    }
    Ok(out)
}

/// `F₁ ⋄ F₂ = F₁(∇_z) F₂`, the multiplication adjoint to `G ↦ F₀·G` with
/// `F₀(z) = conj(F₁(z̄))`.
///
/// Uses the closed form `∂^α e_β = √(β!/(β−α)!) e_{β−α}`, so that
/// `(F₁ ⋄ F₂)(γ) = Σ_α c₁(α) c₂(α+γ) C(α+γ, α)^{1/2}`.
pub fn diamond(f1: &SeriesCoeffs, f2: &SeriesCoeffs) -> Result<SeriesCoeffs> {
    check_dim(f1.dim, f2.dim)?;
    let mut out = SeriesCoeffs::new(f1.dim);
    for (alpha, c1) in &f1.entries {
        for (beta, c2) in &f2.entries {
            if let Some(gamma) = beta.checked_sub(alpha) {
                let w = sqrt_multi_binomial(beta, alpha);
                accumulate(&mut out.entries, gamma, c1 * c2 * w);
            }
        }
    }
    prune(&mut out.entries);
    Ok(out)
}

/// One-dimensional Hermite functions `h_0, …, h_n` at `x` via the
/// normalized three-term recurrence.
pub fn hermite_functions(n: u32, x: f64) -> Vec<f64> {
    let mut h = vec![0.0; n as usize + 1];
    h[0] = libm::pow(PI, -0.25) * libm::exp(-0.5 * x * x);
    if n >= 1 {
        h[1] = core::f64::consts::SQRT_2 * x * h[0];
    }
    for k in 1..n as usize {
        let kf = k as f64;
        h[k + 1] = libm::sqrt(2.0 / (kf + 1.0)) * x * h[k] - libm::sqrt(kf / (kf + 1.0)) * h[k - 1];
    }
    h
}

/// `h_α(x) = Π_j h_{α_j}(x_j)`, the `L²(ℝ^d)`-normalized Hermite function.
pub fn hermite_eval(alpha: &MultiIndex, x: &[f64]) -> Result<f64> {
    check_dim(alpha.dim(), x.len())?;
    Ok(alpha
        .entries()
        .iter()
        .zip(x)
        .map(|(&k, &xj)| hermite_functions(k, xj)[k as usize])
        .product())
}
