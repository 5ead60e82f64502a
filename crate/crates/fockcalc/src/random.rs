//! Random coefficient generators with standard complex Gaussian entries:
//! real and imaginary parts independent `N(0, 1/2)`, so `E|c|² = 1`.

use fock_core::multiindex::enumerate_degree;
use fock_core::{Complex64, KernelCoeffs, MultiIndex, SeriesCoeffs};
use rand::Rng;
use rand_distr::StandardNormal;

pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Dense kernel on `ℂ^dim` with every `|α|, |β| ≤ degree` populated.
pub fn random_kernel<R: Rng + ?Sized>(rng: &mut R, dim: usize, degree: u32) -> KernelCoeffs {
    let idx = enumerate_degree(dim, degree);
    let entries = idx
        .iter()
        .flat_map(|a| idx.iter().map(move |b| (a.clone(), b.clone())))
        .map(|key| (key, complex_gaussian(rng)))
        .collect::<Vec<_>>();
    KernelCoeffs::from_entries(dim, dim, entries).expect("dimensions agree")
}

/// Dense series on `ℂ^dim` with every `|α| ≤ degree` populated.
pub fn random_series<R: Rng + ?Sized>(rng: &mut R, dim: usize, degree: u32) -> SeriesCoeffs {
    let entries: Vec<(MultiIndex, Complex64)> =
        enumerate_degree(dim, degree).into_iter().map(|a| (a, complex_gaussian(rng))).collect();
    SeriesCoeffs::from_entries(dim, entries).expect("dimensions agree")
}

/// Point with independent standard complex Gaussian coordinates, rescaled
/// into the ball of the given radius when it falls outside.
pub fn random_point<R: Rng + ?Sized>(rng: &mut R, dim: usize, radius: f64) -> Vec<Complex64> {
    let z: Vec<Complex64> = (0..dim).map(|_| complex_gaussian(rng)).collect();
    let norm = z.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    if norm > radius {
        z.iter().map(|v| v * (radius / norm)).collect()
    } else {
        z
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn entries_have_unit_second_moment() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 20_000;
        let m: f64 = (0..n).map(|_| complex_gaussian(&mut rng).norm_sqr()).sum::<f64>() / n as f64;
        assert!((m - 1.0).abs() < 0.05);
    }

    #[test]
    fn generators_are_dense_and_bounded() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        assert_eq!(random_kernel(&mut rng, 2, 2).len(), 36);
        assert_eq!(random_series(&mut rng, 1, 6).len(), 7);
        for _ in 0..100 {
            let z = random_point(&mut rng, 2, 2.0);
            assert!(z.iter().map(|v| v.norm_sqr()).sum::<f64>() <= 4.0 + 1e-12);
        }
    }
}
