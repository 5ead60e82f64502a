//! The binomial transition operators `T₀,ₜ`, `T₀,ₜ*` and `S₀` acting on
//! square kernel coefficients `c(α, β)`:
//!
//! ```text
//! (T₀,ₜ c)(α, β)  = Σ_{γ ≤ α, β} (C(α,γ) C(β,γ))^{1/2} t^{|γ|} c(α−γ, β−γ)
//! (T₀,ₜ* c)(α, β) = Σ_γ (C(α+γ,γ) C(β+γ,γ))^{1/2} t^{|γ|} c(α+γ, β+γ)
//! (S₀ c)(α, β)    = i^{|α+β|} c(α, β)
//! ```
//!
//! `T₀,ₜ` realizes multiplication by `e^{t(z,w)}`; its output has unbounded
//! support, so callers choose a truncation degree. Every retained entry only
//! depends on lower-degree inputs and is therefore exact. `T₀,ₜ*` maps
//! finitely supported input to finitely supported output and needs no
//! truncation.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::Result;
use crate::multiindex::{count_up_to_degree, enumerate_degree, rank, rank_entries, MultiIndex};
use crate::series::{KernelCoeffs, DROP_THRESHOLD};
use crate::sum::CompensatedSum;

/// Extra degrees [`t0_default`] keeps beyond the input support.
pub const DEFAULT_EXTENSION: u32 = 8;

/// Shift table over all indices with `|α| ≤ degree`, in enumeration order.
/// For index `i` and shift `s` with `|α_i| + |γ_s| ≤ degree` it records the
/// rank of `α_i + γ_s` and `Π_j C(α_ij + γ_sj, γ_sj)`.
struct ShiftTable {
    index: Vec<MultiIndex>,
    limit: Vec<usize>,
    shift_degree: Vec<usize>,
    target: Vec<u32>,
    weight: Vec<f64>,
}

impl ShiftTable {
    fn new(dim: usize, degree: u32) -> Self {
        let index = enumerate_degree(dim, degree);
        let n = index.len();
        let pascal = pascal(degree);
        let limit: Vec<usize> = index.iter().map(|a| count_up_to_degree(dim, degree - a.degree())).collect();
        let shift_degree = index.iter().map(|g| g.degree() as usize).collect();
        let mut target = vec![0u32; n * n];
        let mut weight = vec![0.0; n * n];
        let mut sum = vec![0u32; dim];
        for (i, a) in index.iter().enumerate() {
            for (s, g) in index[..limit[i]].iter().enumerate() {
                let mut w = 1.0;
                for ((slot, &x), &y) in sum.iter_mut().zip(a.entries()).zip(g.entries()) {
                    *slot = x + y;
                    w *= pascal[(x + y) as usize][y as usize];
                }
                target[i * n + s] = rank_entries(&sum) as u32;
                weight[i * n + s] = w;
            }
        }
        ShiftTable { index, limit, shift_degree, target, weight }
    }

    fn len(&self) -> usize {
        self.index.len()
    }

    fn into_kernel(self, dim: usize, acc: &[CompensatedSum]) -> KernelCoeffs {
        // Enumeration order is the index order, so the entries come out sorted.
        let n = self.len();
        let entries = acc
            .iter()
            .enumerate()
            .map(|(pos, sum)| (pos, sum.value()))
            .filter(|(_, v)| v.norm() >= DROP_THRESHOLD)
            .map(|(pos, v)| ((self.index[pos / n].clone(), self.index[pos % n].clone()), v))
            .collect();
        KernelCoeffs::from_sorted(dim, dim, entries)
    }
}

/// Rows `0..=n` of Pascal's triangle in floating point, exact while the
/// entries stay below `2^53`.
fn pascal(n: u32) -> Vec<Vec<f64>> {
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(n as usize + 1);
    for i in 0..=n as usize {
        let mut row = vec![1.0; i + 1];
        for k in 1..i {
            row[k] = rows[i - 1][k - 1] + rows[i - 1][k];
        }
        rows.push(row);
    }
    rows
}

fn powers(t: Complex64, n: u32) -> Vec<Complex64> {
    let mut p = Vec::with_capacity(n as usize + 1);
    let mut acc = Complex64::new(1.0, 0.0);
    p.push(acc);
    for _ in 0..n {
        acc *= t;
        p.push(acc);
    }
    p
}

/// `T₀,ₜ c`, retaining all entries with `|α|, |β| ≤ out_degree`.
pub fn t0(c: &KernelCoeffs, t: Complex64, out_degree: u32) -> Result<KernelCoeffs> {
    let d = c.square_dim()?;
    let table = ShiftTable::new(d, out_degree);
    let n = table.len();
    let pw = powers(t, out_degree);
    let mut acc = vec![CompensatedSum::default(); n * n];
    for ((a, b), &v) in c.iter() {
        if a.degree() > out_degree || b.degree() > out_degree {
            continue;
        }
        let (ia, ib) = (rank(a), rank(b));
        let limit = table.limit[ia].min(table.limit[ib]);
        let (ra, rb) = (&table.target[ia * n..], &table.target[ib * n..]);
        let (wa, wb) = (&table.weight[ia * n..], &table.weight[ib * n..]);
        for s in 0..limit {
            let x = v * pw[table.shift_degree[s]] * libm::sqrt(wa[s] * wb[s]);
            acc[ra[s] as usize * n + rb[s] as usize].add(x);
        }
    }
    Ok(table.into_kernel(d, &acc))
}

/// Truncation degree used by [`t0_default`]: support degree plus
/// [`DEFAULT_EXTENSION`].
pub fn default_out_degree(c: &KernelCoeffs) -> u32 {
    c.max_degree().unwrap_or(0) + DEFAULT_EXTENSION
}

/// [`t0`] with the default truncation degree.
pub fn t0_default(c: &KernelCoeffs, t: Complex64) -> Result<KernelCoeffs> {
    t0(c, t, default_out_degree(c))
}

/// `T₀,ₜ* c`; exact on finitely supported input.
pub fn t0_star(c: &KernelCoeffs, t: Complex64) -> Result<KernelCoeffs> {
    let d = c.square_dim()?;
    let top = c.max_degree().unwrap_or(0);
    let table = ShiftTable::new(d, top);
    let n = table.len();
    let pw = powers(t, top);
    let mut dense = vec![Complex64::new(0.0, 0.0); n * n];
    for ((a, b), &v) in c.iter() {
        dense[rank(a) * n + rank(b)] = v;
    }
    // Gather: output (α, β) collects input (α + γ, β + γ).
    let mut acc = vec![CompensatedSum::default(); n * n];
    for ia in 0..n {
        for ib in 0..n {
            let limit = table.limit[ia].min(table.limit[ib]);
            let cell = &mut acc[ia * n + ib];
            for s in 0..limit {
                let v = dense[table.target[ia * n + s] as usize * n + table.target[ib * n + s] as usize];
                if v.re != 0.0 || v.im != 0.0 {
                    let w = libm::sqrt(table.weight[ia * n + s] * table.weight[ib * n + s]);
                    cell.add(v * pw[table.shift_degree[s]] * w);
                }
            }
        }
    }
    Ok(table.into_kernel(d, &acc))
}

fn i_power(k: u32) -> Complex64 {
    match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// `S₀ c`: entrywise multiplication by `i^{|α|+|β|}`.
pub fn s0(c: &KernelCoeffs) -> KernelCoeffs {
    let mut out = KernelCoeffs::new(c.dim_out(), c.dim_in());
    for ((a, b), &v) in c.iter() {
        out.insert_unchecked(a.clone(), b.clone(), v * i_power(a.degree() + b.degree()));
    }
    out
}

/// `S₀⁻¹ c`: entrywise multiplication by `(−i)^{|α|+|β|}`.
pub fn s0_inverse(c: &KernelCoeffs) -> KernelCoeffs {
    let mut out = KernelCoeffs::new(c.dim_out(), c.dim_in());
    for ((a, b), &v) in c.iter() {
        out.insert_unchecked(a.clone(), b.clone(), v * i_power(3 * (a.degree() + b.degree())));
    }
    out
}

/// `‖c‖_{ℓ²_r} = (Σ |c(α, β)|² r^{−(|α|+|β|)})^{1/2}`.
pub fn ell2_r_norm(c: &KernelCoeffs, r: f64) -> f64 {
    let ln_r = libm::log(r);
    let s: f64 = c
        .iter()
        .map(|((a, b), v)| v.norm_sqr() * libm::exp(-f64::from(a.degree() + b.degree()) * ln_r))
        .sum();
    libm::sqrt(s)
}

/// `Σ c(α, β) conj(d(α, β))`.
pub fn ell2_inner(c: &KernelCoeffs, d: &KernelCoeffs) -> Complex64 {
    let mut acc = CompensatedSum::default();
    for ((a, b), v) in c.iter() {
        let w = d.get(a, b);
        if w.norm() > 0.0 {
            acc.add(v * w.conj());
        }
    }
    acc.value()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn k1(a: u32, b: u32) -> KernelCoeffs {
        KernelCoeffs::basis(MultiIndex::scalar(a), MultiIndex::scalar(b))
    }

    fn from_list(list: &[(u32, u32, f64)]) -> KernelCoeffs {
        KernelCoeffs::from_entries(
            1,
            1,
            list.iter().map(|&(a, b, v)| ((MultiIndex::scalar(a), MultiIndex::scalar(b)), c(v, 0.0))),
        )
        .unwrap()
    }

    fn random_kernel(rng: &mut ChaCha8Rng, d: usize, n: u32) -> KernelCoeffs {
        let idx = enumerate_degree(d, n);
        let mut k = KernelCoeffs::square(d);
        for a in &idx {
            for b in &idx {
                k.insert(a.clone(), b.clone(), c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).unwrap();
            }
        }
        k
    }

    fn max_diff(a: &KernelCoeffs, b: &KernelCoeffs) -> f64 {
        a.sub(b).unwrap().max_abs()
    }

    #[test]
    fn t0_of_unit_is_exponential_series() {
        let t = c(0.4, -0.7);
        let out = t0(&k1(0, 0), t, 10).unwrap();
        assert_eq!(out.len(), 11);
        for k in 0..=10u32 {
            let expected = t.powu(k);
            assert!((out.get(&MultiIndex::scalar(k), &MultiIndex::scalar(k)) - expected).norm() < 1e-15);
        }
    }

    #[test]
    fn t0_of_off_diagonal_unit() {
        let out = t0(&k1(1, 0), c(1.0, 0.0), 9).unwrap();
        for k in 0..=8u32 {
            let v = out.get(&MultiIndex::scalar(k + 1), &MultiIndex::scalar(k));
            assert_abs_diff_eq!(v.re, f64::from(k + 1).sqrt(), epsilon = 1e-14);
        }
        assert_eq!(out.len(), 9);
    }

    #[test]
    fn t0_at_zero_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let k = random_kernel(&mut rng, 2, 3);
        assert_eq!(t0(&k, c(0.0, 0.0), 3).unwrap(), k);
        assert_eq!(t0_default(&k, c(0.0, 0.0)).unwrap(), k);
    }

    #[test]
    fn t0_star_examples() {
        for t in [c(1.0, 0.0), c(-2.0, 0.5)] {
            assert_eq!(t0_star(&k1(0, 0), t).unwrap(), k1(0, 0));
        }
        assert_eq!(t0_star(&k1(1, 1), c(1.0, 0.0)).unwrap(), from_list(&[(1, 1, 1.0), (0, 0, 1.0)]));
        assert_eq!(t0_star(&k1(1, 1), c(-1.0, 0.0)).unwrap(), from_list(&[(1, 1, 1.0), (0, 0, -1.0)]));
        assert_eq!(
            t0_star(&k1(2, 2), c(1.0, 0.0)).unwrap(),
            from_list(&[(2, 2, 1.0), (1, 1, 2.0), (0, 0, 1.0)])
        );
    }

    #[test]
    fn s0_examples() {
        assert_eq!(s0(&k1(0, 0)), k1(0, 0));
        assert_eq!(s0(&k1(1, 1)), k1(1, 1).scale(c(-1.0, 0.0)));
        assert_eq!(s0(&k1(2, 1)), k1(2, 1).scale(c(0.0, -1.0)));
        let k = k1(2, 1).add(&k1(0, 3)).unwrap();
        assert_eq!(s0_inverse(&s0(&k)), k);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let k = KernelCoeffs::new(1, 2);
        assert!(t0(&k, c(1.0, 0.0), 3).is_err());
        assert!(t0_star(&k, c(1.0, 0.0)).is_err());
    }

    #[test]
    fn semigroup_in_t() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let k = random_kernel(&mut rng, 1, 4);
        let (t1, t2) = (c(0.3, 0.2), c(-0.5, 0.1));
        let lhs = t0(&t0(&k, t2, 12).unwrap(), t1, 12).unwrap();
        let rhs = t0(&k, t1 + t2, 12).unwrap();
        assert!(max_diff(&lhs, &rhs) < 1e-12);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn inverse_laws(seed in 0u64..100_000, d in 1usize..3, tr in -1.0f64..1.0, ti in -1.0f64..1.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let k = random_kernel(&mut rng, d, 3);
            let t = c(tr, ti);
            let back = t0(&t0(&k, t, 8).unwrap(), -t, 8).unwrap();
            prop_assert!(max_diff(&back, &k) <= 1e-10 * k.max_abs());
            let back = t0_star(&t0_star(&k, t).unwrap(), -t).unwrap();
            prop_assert!(max_diff(&back, &k) <= 1e-10 * k.max_abs());
        }

        #[test]
        fn conjugation_laws(seed in 0u64..100_000, tr in -1.5f64..1.5, ti in -1.5f64..1.5) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let k = random_kernel(&mut rng, 2, 2);
            let t = c(tr, ti);
            let lhs = t0(&k, -t, 6).unwrap();
            let rhs = s0_inverse(&t0(&s0(&k), t, 6).unwrap());
            prop_assert!(max_diff(&lhs, &rhs) <= 1e-12 * lhs.max_abs().max(1.0));
            let lhs = t0_star(&k, -t).unwrap();
            let rhs = s0_inverse(&t0_star(&s0(&k), t).unwrap());
            prop_assert!(max_diff(&lhs, &rhs) <= 1e-12 * lhs.max_abs().max(1.0));
        }

        #[test]
        fn adjoint_law(seed in 0u64..100_000, tr in -1.0f64..1.0, ti in -1.0f64..1.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = random_kernel(&mut rng, 1, 4);
            let b = random_kernel(&mut rng, 1, 9);
            let t = c(tr, ti);
            // b has degree 9, so the truncation at 9 keeps every paired entry.
            let lhs = ell2_inner(&t0(&a, t, 9).unwrap(), &b);
            let rhs = ell2_inner(&a, &t0_star(&b, t.conj()).unwrap());
            prop_assert!((lhs - rhs).norm() <= 1e-10 * a.l2_norm() * b.l2_norm());
        }

        #[test]
        fn explicit_ell2_bound(seed in 0u64..100_000, tr in -0.7f64..0.7, ti in -0.7f64..0.7) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let b = random_kernel(&mut rng, 1, 5);
            for (r1, r2) in [(1.0, 3.0), (1.0, 4.0), (0.5, 2.0)] {
                let lhs = ell2_r_norm(&t0(&b, c(tr, ti), 24).unwrap(), r2);
                let constant = 1.0 / (1.0 - (1.0 + r1) / r2);
                prop_assert!(lhs <= constant * ell2_r_norm(&b, r1));
            }
        }
    }
}
