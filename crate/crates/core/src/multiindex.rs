//! Multi-indices `α ∈ ℕ^d` and the exact combinatorics built on them.
//!
//! Multi-indices are ordered by total degree first and lexicographically
//! within a degree. Every sparse coefficient map in the crate iterates in
//! this order, which makes serialized output deterministic.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use crate::error::{check_dim, Error, Result};

/// A multi-index `α = (α₁, …, α_d)` with `d ≥ 1`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    /// Builds a multi-index from its entries. Fails on an empty slice.
    pub fn new(entries: impl Into<Vec<u32>>) -> Result<Self> {
        let entries = entries.into();
        if entries.is_empty() {
            return Err(Error::Precondition("multi-index must have at least one entry".into()));
        }
        Ok(MultiIndex(entries))
    }

    /// The zero multi-index in dimension `d`.
    pub fn zero(d: usize) -> Self {
        assert!(d >= 1, "dimension must be positive");
        MultiIndex(vec![0; d])
    }

    /// The unit multi-index `e_j` in dimension `d`.
    pub fn unit(d: usize, axis: usize) -> Self {
        let mut m = Self::zero(d);
        m.0[axis] = 1;
        m
    }

    /// One-dimensional multi-index `(k)`.
    pub fn scalar(k: u32) -> Self {
        MultiIndex(vec![k])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    /// Total degree `|α|`.
    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    /// Componentwise `self ≤ other`.
    pub fn le(&self, other: &Self) -> bool {
        self.0.len() == other.0.len() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// `self − other`, or `None` when some component would become negative.
    pub fn checked_sub(&self, other: &Self) -> Option<Self> {
        if self.0.len() != other.0.len() {
            return None;
        }
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<_>>>()
            .map(MultiIndex)
    }

    /// Componentwise sum. Panics on dimension mismatch.
    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim(), "multi-index dimension mismatch");
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub(crate) fn with_axis(&self, axis: usize, value: u32) -> Self {
        let mut m = self.clone();
        m.0[axis] = value;
        m
    }

    /// Componentwise minimum.
    pub fn min(&self, other: &Self) -> Self {
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| *a.min(b)).collect())
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.len().cmp(&other.0.len()))
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, ")")
    }
}

impl From<u32> for MultiIndex {
    fn from(k: u32) -> Self {
        MultiIndex::scalar(k)
    }
}

/// All multi-indices of dimension `d` and total degree exactly `n`, in
/// lexicographic order.
pub fn enumerate_exact_degree(d: usize, n: u32) -> Vec<MultiIndex> {
    assert!(d >= 1, "dimension must be positive");
    let mut out = Vec::new();
    let mut current = vec![0u32; d];
    fill(&mut current, 0, n, &mut out);
    out
}

fn fill(current: &mut [u32], pos: usize, remaining: u32, out: &mut Vec<MultiIndex>) {
    if pos + 1 == current.len() {
        current[pos] = remaining;
        out.push(MultiIndex(current.to_vec()));
        return;
    }
    for k in 0..=remaining {
        current[pos] = k;
        fill(current, pos + 1, remaining - k, out);
    }
}

/// All `α ∈ ℕ^d` with `|α| ≤ n`, sorted by (degree, lex). The result has
/// `C(n + d, d)` elements.
pub fn enumerate_degree(d: usize, n: u32) -> Vec<MultiIndex> {
    (0..=n).flat_map(|k| enumerate_exact_degree(d, k)).collect()
}

/// Number of multi-indices of dimension `d` with `|α| ≤ n`, i.e. `C(n + d, d)`.
pub fn count_up_to_degree(d: usize, n: u32) -> usize {
    binomial(n + d as u32, d as u32).expect("index count overflow") as usize
}

/// Position of `α` in the (degree, lex) order produced by [`enumerate_degree`].
/// The position does not depend on the truncation degree.
pub fn rank(alpha: &MultiIndex) -> usize {
    rank_entries(&alpha.0)
}

pub(crate) fn rank_entries(entries: &[u32]) -> usize {
    let d = entries.len();
    let n: u32 = entries.iter().sum();
    let below = if n == 0 { 0 } else { count_up_to_degree(d, n - 1) };
    let mut within = 0usize;
    let mut rem = n;
    for (j, &a) in entries.iter().enumerate().take(d - 1) {
        let parts = (d - j - 1) as u32;
        // compositions of rem - v into `parts` parts, summed over v < a
        let all = binomial(rem + parts, parts).expect("rank overflow");
        let rest = binomial(rem - a + parts, parts).expect("rank overflow");
        within += (all - rest) as usize;
        rem -= a;
    }
    below + within
}

/// Exact binomial coefficient `C(n, k)`; zero when `k > n`.
pub fn binomial(n: u32, k: u32) -> Result<u128> {
    if k > n {
        return Ok(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) is divisible by (i + 1) after the multiplication.
        acc = acc
            .checked_mul(u128::from(n - i))
            .ok_or(Error::Overflow("binomial coefficient"))?
            / u128::from(i + 1);
    }
    Ok(acc)
}

/// `Π_j C(α_j, γ_j)`; zero when `γ ≰ α`.
pub fn multi_binomial(alpha: &MultiIndex, gamma: &MultiIndex) -> Result<u128> {
    check_dim(alpha.dim(), gamma.dim())?;
    alpha.0.iter().zip(&gamma.0).try_fold(1u128, |acc, (&a, &g)| {
        acc.checked_mul(binomial(a, g)?).ok_or(Error::Overflow("multi-binomial"))
    })
}

/// `α! = Π_j α_j!`, with overflow reported as an error.
pub fn multi_factorial(alpha: &MultiIndex) -> Result<u128> {
    let mut acc: u128 = 1;
    for &a in &alpha.0 {
        for k in 2..=a {
            acc = acc
                .checked_mul(u128::from(k))
                .ok_or(Error::Overflow("multi-factorial"))?;
        }
    }
    Ok(acc)
}

/// `ln(α!)` in floating point, usable far beyond the exact range.
pub fn ln_multi_factorial(alpha: &MultiIndex) -> f64 {
    alpha.0.iter().map(|&a| ln_factorial(a)).sum()
}

pub(crate) fn ln_factorial(k: u32) -> f64 {
    if k < 2 {
        0.0
    } else {
        libm::lgamma(f64::from(k) + 1.0)
    }
}

/// Floating-point value of `C(n, k)` computed exactly and rounded once.
pub(crate) fn binomial_f64(n: u32, k: u32) -> f64 {
    match binomial(n, k) {
        Ok(v) => v as f64,
        Err(_) => libm::exp(ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)),
    }
}

/// `√(Π_j C(α_j, γ_j))` as a float.
pub(crate) fn sqrt_multi_binomial(alpha: &MultiIndex, gamma: &MultiIndex) -> f64 {
    match multi_binomial(alpha, gamma) {
        Ok(v) => libm::sqrt(v as f64),
        Err(_) => alpha
            .0
            .iter()
            .zip(&gamma.0)
            .map(|(&a, &g)| libm::sqrt(binomial_f64(a, g)))
            .product(),
    }
}
