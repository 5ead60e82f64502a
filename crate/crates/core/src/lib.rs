//! Coefficient-level operator calculus on the Bargmann–Fock space.
//!
//! Power series `F = Σ c(α) e_α` with `e_α(z) = z^α / √(α!)` and two-variable
//! expansions `K(z, w) = Σ c(α, β) e_α(z) e_β(w̄)` are stored as sparse
//! coefficient maps. On top of them the crate provides
//!
//! * the binomial transition operators `T₀,ₜ`, `T₀,ₜ*` and `S₀` ([`binomial`]),
//! * conversions between kernels, Wick symbols and anti-Wick symbols,
//!   operator application, composition and the twisted product
//!   ([`symbolcalc`]),
//! * weight families and growth diagnostics for the coefficient space
//!   hierarchy ([`spaces`]),
//! * an independent Gauss–Hermite quadrature oracle for the integral forms
//!   of the same operators ([`quadrature`]).
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]
#![deny(missing_debug_implementations)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod binomial;
pub mod error;
pub mod linalg;
pub mod multiindex;
pub mod quadrature;
pub mod series;
pub mod spaces;
pub mod symbolcalc;

mod sum;

pub use error::{Error, Result};
pub use multiindex::MultiIndex;
pub use num_complex::Complex64;
pub use series::{KernelCoeffs, SeriesCoeffs};
pub use symbolcalc::OperatorMatrix;
