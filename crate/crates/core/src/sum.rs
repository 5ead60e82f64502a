//! Accurate summation helpers shared by the coefficient operators and the
//! quadrature rules.

use num_complex::Complex64;

/// Neumaier-compensated accumulator for complex terms.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct CompensatedSum {
    re: (f64, f64),
    im: (f64, f64),
}

#[inline]
fn neumaier(acc: &mut (f64, f64), x: f64) {
    let (s, c) = *acc;
    let t = s + x;
    let c = if s.abs() >= x.abs() {
        c + ((s - t) + x)
    } else {
        c + ((x - t) + s)
    };
    *acc = (t, c);
}

impl CompensatedSum {
    #[inline]
    pub(crate) fn add(&mut self, z: Complex64) {
        neumaier(&mut self.re, z.re);
        neumaier(&mut self.im, z.im);
    }

    #[inline]
    pub(crate) fn value(&self) -> Complex64 {
        Complex64::new(self.re.0 + self.re.1, self.im.0 + self.im.1)
    }
}

/// Deterministic pairwise (tree) reduction. Leaves of up to 32 terms are
/// summed sequentially.
pub(crate) fn pairwise(terms: &[Complex64]) -> Complex64 {
    const LEAF: usize = 32;
    if terms.len() <= LEAF {
        terms.iter().fold(Complex64::new(0.0, 0.0), |acc, &t| acc + t)
    } else {
        let mid = terms.len() / 2;
        pairwise(&terms[..mid]) + pairwise(&terms[mid..])
    }
}
