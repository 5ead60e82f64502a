//! Weight families for the coefficient spaces of analytic functions and
//! kernels, and finite-truncation diagnostics for membership.
//!
//! Membership in these spaces is an asymptotic statement quantified over
//! radii, so nothing here decides it. [`classify`] instead evaluates the
//! relevant weighted norms on a grid of radii, flags norms whose shell
//! profile is still increasing at the truncation edge, and combines the
//! per-radius outcomes with the family's quantifiers in three-valued logic.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::multiindex::{ln_multi_factorial, MultiIndex};
use crate::series::{KernelCoeffs, SeriesCoeffs};

/// Growth index `s`. `Flat(σ)` sits between the reals below `1/2` and the
/// reals from `1/2` on.
#[derive(Debug, Clone, Copy)]
pub enum GrowthOrder {
    Zero,
    Real(f64),
    Flat(f64),
    Infinity,
}

impl GrowthOrder {
    pub fn real(s: f64) -> Result<Self> {
        if s > 0.0 && s.is_finite() {
            Ok(GrowthOrder::Real(s))
        } else {
            Err(Error::Domain(format!("real growth order must be positive and finite, got {s}")))
        }
    }

    pub fn flat(sigma: f64) -> Result<Self> {
        if sigma > 0.0 && sigma.is_finite() {
            Ok(GrowthOrder::Flat(sigma))
        } else {
            Err(Error::Domain(format!("flat index must be positive and finite, got {sigma}")))
        }
    }

    fn key(&self) -> (u8, f64) {
        match *self {
            GrowthOrder::Zero => (0, 0.0),
            GrowthOrder::Real(s) if s < 0.5 => (1, s),
            GrowthOrder::Flat(sigma) => (2, sigma),
            GrowthOrder::Real(s) => (3, s),
            GrowthOrder::Infinity => (4, 0.0),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, GrowthOrder::Zero)
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, GrowthOrder::Infinity)
    }
}

impl PartialEq for GrowthOrder {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for GrowthOrder {}

impl PartialOrd for GrowthOrder {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for GrowthOrder {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, x) = self.key();
        let (b, y) = other.key();
        a.cmp(&b).then(x.total_cmp(&y))
    }
}

impl fmt::Display for GrowthOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GrowthOrder::Zero => write!(f, "zero"),
            GrowthOrder::Real(s) => write!(f, "real:{s}"),
            GrowthOrder::Flat(sigma) => write!(f, "flat:{sigma}"),
            GrowthOrder::Infinity => write!(f, "inf"),
        }
    }
}

/// Parses `zero`, `inf`, `real:<s>` or `flat:<σ>`.
impl FromStr for GrowthOrder {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let text = text.trim();
        match text {
            "zero" | "0" => return Ok(GrowthOrder::Zero),
            "inf" | "infinity" => return Ok(GrowthOrder::Infinity),
            _ => {}
        }
        let bad = || Error::Domain(format!("unrecognized growth order '{text}'"));
        let (kind, value) = text.split_once(':').ok_or_else(bad)?;
        let value: f64 = value.trim().parse().map_err(|_| bad())?;
        match kind.trim() {
            "real" => GrowthOrder::real(value),
            "flat" => GrowthOrder::flat(value),
            _ => Err(bad()),
        }
    }
}

/// `ϑ_{r,s}` for a fixed order and radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightSpec {
    pub order: GrowthOrder,
    pub r: f64,
}

impl WeightSpec {
    pub fn new(order: GrowthOrder, r: f64) -> Result<Self> {
        if r > 0.0 && r.is_finite() {
            Ok(WeightSpec { order, r })
        } else {
            Err(Error::Domain(format!("weight radius must be positive, got {r}")))
        }
    }

    /// `ln ϑ_{r,s}(α)`, possibly `+∞`.
    pub fn ln_theta(&self, alpha: &MultiIndex) -> f64 {
        let n = f64::from(alpha.degree());
        match self.order {
            GrowthOrder::Real(s) => self.r * libm::pow(n, 1.0 / (2.0 * s)),
            GrowthOrder::Flat(sigma) => n * libm::log(self.r) + ln_multi_factorial(alpha) / (2.0 * sigma),
            GrowthOrder::Infinity => 0.5 * self.r * libm::log1p(n * n),
            // |α| = r belongs to the finite clause.
            GrowthOrder::Zero if n <= self.r => 0.0,
            GrowthOrder::Zero => f64::INFINITY,
        }
    }
}

/// `ϑ_{r,s}(α)`; `+∞` for the zero order beyond `r`.
pub fn theta_weight(w: &WeightSpec, alpha: &MultiIndex) -> f64 {
    libm::exp(w.ln_theta(alpha))
}

fn ln_omega(s1: GrowthOrder, s2: GrowthOrder, r1: f64, r2: f64, a2: &MultiIndex, a1: &MultiIndex) -> Result<f64> {
    let num = WeightSpec::new(s2, r2)?.ln_theta(a2);
    let den = WeightSpec::new(s1, r1)?.ln_theta(a1);
    if num.is_infinite() || den.is_infinite() {
        return Err(Error::Domain(format!("weight is infinite at ({a2:?}, {a1:?})")));
    }
    Ok(num - den)
}

/// `ω_{s₁,s₂;r₁,r₂}(α₂, α₁) = ϑ_{r₂,s₂}(α₂) / ϑ_{r₁,s₁}(α₁)`.
pub fn omega_weight(
    s1: GrowthOrder,
    s2: GrowthOrder,
    r1: f64,
    r2: f64,
    alpha2: &MultiIndex,
    alpha1: &MultiIndex,
) -> Result<f64> {
    Ok(libm::exp(ln_omega(s1, s2, r1, r2, alpha2, alpha1)?))
}

/// Which of the two pointwise bound families to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KappaKind {
    First,
    Second,
}

/// Pointwise weights `κ_{j,r,s}(z)` and, with `zero_variant`, `κ⁰_{j,r,s}(z)`,
/// which replaces the `s = 1/2` case by `e^{r|z|²}`.
pub fn kappa_weight(kind: KappaKind, zero_variant: bool, r: f64, s: GrowthOrder, z: &[Complex64]) -> Result<f64> {
    Ok(libm::exp(ln_kappa(kind, zero_variant, r, s, z)?))
}

/// Logarithm of [`kappa_weight`].
pub fn ln_kappa(kind: KappaKind, zero_variant: bool, r: f64, s: GrowthOrder, z: &[Complex64]) -> Result<f64> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::Domain(format!("radius must be positive, got {r}")));
    }
    let norm_sqr: f64 = z.iter().map(|v| v.norm_sqr()).sum();
    let norm = libm::sqrt(norm_sqr);
    let unsupported = || Error::Domain(format!("no pointwise weight of kind {kind:?} for order {s}"));
    if zero_variant && matches!(s, GrowthOrder::Real(v) if v == 0.5) {
        return Ok(r * norm_sqr);
    }
    let value = match (kind, s) {
        (KappaKind::First, GrowthOrder::Real(v)) if v < 0.5 => {
            let bracket = 0.5 * libm::log1p(norm_sqr);
            r * libm::pow(bracket, 1.0 / (1.0 - 2.0 * v))
        }
        (KappaKind::First, GrowthOrder::Flat(sigma)) => r * libm::pow(norm, 2.0 * sigma / (sigma + 1.0)),
        (KappaKind::First, GrowthOrder::Real(v)) => 0.5 * norm_sqr - r * libm::pow(norm, 1.0 / v),
        (KappaKind::First, GrowthOrder::Infinity) => 0.5 * norm_sqr - 0.5 * r * libm::log1p(norm_sqr),
        (KappaKind::Second, GrowthOrder::Flat(sigma)) if sigma > 1.0 => {
            r * libm::pow(norm, 2.0 * sigma / (sigma - 1.0))
        }
        (KappaKind::Second, GrowthOrder::Real(v)) if v >= 0.5 => 0.5 * norm_sqr + r * libm::pow(norm, 1.0 / v),
        (KappaKind::Second, GrowthOrder::Infinity) => 0.5 * norm_sqr + 0.5 * r * libm::log1p(norm_sqr),
        _ => return Err(unsupported()),
    };
    Ok(value)
}

/// `‖{c_k w_k}‖_{ℓ^p}` from pairs `(c_k, ln w_k)`, evaluated in log space.
/// `p = ∞` gives the weighted supremum.
pub fn weighted_norm(terms: impl IntoIterator<Item = (Complex64, f64)>, p: f64) -> Result<f64> {
    if p.is_nan() || p <= 0.0 {
        return Err(Error::Domain(format!("exponent must lie in (0, ∞], got {p}")));
    }
    let mut logs = Vec::new();
    for (c, ln_w) in terms {
        let m = c.norm();
        if m == 0.0 {
            continue;
        }
        if ln_w == f64::INFINITY {
            return Err(Error::Domain(String::from("weight is infinite on the support")));
        }
        logs.push(libm::log(m) + ln_w);
    }
    let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if logs.is_empty() || top == f64::NEG_INFINITY {
        return Ok(0.0);
    }
    if p == f64::INFINITY {
        return Ok(libm::exp(top));
    }
    let s: f64 = logs.iter().map(|&l| libm::exp(p * (l - top))).sum();
    Ok(libm::exp(top + libm::log(s) / p))
}

/// Weighted norm of a series against `ϑ_{r,s}`.
pub fn series_weighted_norm(c: &SeriesCoeffs, w: &WeightSpec, p: f64) -> Result<f64> {
    weighted_norm(c.iter().map(|(a, &v)| (v, w.ln_theta(a))), p)
}

/// Weight on kernel entries `(α₂, α₁)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelWeight {
    /// `ϑ_{r,s₂}(α₂) ϑ_{r,s₁}(α₁)`, or its reciprocal.
    Product { s1: GrowthOrder, s2: GrowthOrder, r: f64, inverse: bool },
    /// `ω_{s₁,s₂;r₁,r₂}(α₂, α₁)`, or its reciprocal.
    Mixed { s1: GrowthOrder, s2: GrowthOrder, r1: f64, r2: f64, inverse: bool },
}

impl KernelWeight {
    /// `ln` of the weight, `+∞` where it is infinite.
    pub fn ln_weight(&self, a2: &MultiIndex, a1: &MultiIndex) -> f64 {
        let (ln, inverse) = match *self {
            KernelWeight::Product { s1, s2, r, inverse } => {
                let x = WeightSpec { order: s2, r }.ln_theta(a2);
                let y = WeightSpec { order: s1, r }.ln_theta(a1);
                (x + y, inverse)
            }
            KernelWeight::Mixed { s1, s2, r1, r2, inverse } => {
                let x = WeightSpec { order: s2, r: r2 }.ln_theta(a2);
                let y = WeightSpec { order: s1, r: r1 }.ln_theta(a1);
                // An infinite numerator or denominator makes the quotient
                // undefined; treat it as unbounded in either orientation.
                if x.is_infinite() || y.is_infinite() {
                    return f64::INFINITY;
                }
                (x - y, inverse)
            }
        };
        if inverse {
            -ln
        } else {
            ln
        }
    }
}

/// Weighted norm of a kernel.
pub fn kernel_weighted_norm(c: &KernelCoeffs, w: &KernelWeight, p: f64) -> Result<f64> {
    weighted_norm(c.iter().map(|((a, b), &v)| (v, w.ln_weight(a, b))), p)
}

/// The twelve coefficient space families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpaceFamily {
    A,
    A0,
    Adual,
    A0dual,
    B,
    B0,
    Bstar,
    B0star,
    C,
    C0,
    Cstar,
    C0star,
}

impl SpaceFamily {
    pub const ALL: [SpaceFamily; 12] = [
        SpaceFamily::A,
        SpaceFamily::A0,
        SpaceFamily::Adual,
        SpaceFamily::A0dual,
        SpaceFamily::B,
        SpaceFamily::B0,
        SpaceFamily::Bstar,
        SpaceFamily::B0star,
        SpaceFamily::C,
        SpaceFamily::C0,
        SpaceFamily::Cstar,
        SpaceFamily::C0star,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            SpaceFamily::A => "A",
            SpaceFamily::A0 => "A0",
            SpaceFamily::Adual => "Adual",
            SpaceFamily::A0dual => "A0dual",
            SpaceFamily::B => "B",
            SpaceFamily::B0 => "B0",
            SpaceFamily::Bstar => "Bstar",
            SpaceFamily::B0star => "B0star",
            SpaceFamily::C => "C",
            SpaceFamily::C0 => "C0",
            SpaceFamily::Cstar => "Cstar",
            SpaceFamily::C0star => "C0star",
        }
    }

    /// Families indexed by `0` require positive orders; the others require
    /// finite orders.
    fn needs_positive(&self) -> bool {
        matches!(
            self,
            SpaceFamily::A0 | SpaceFamily::A0dual | SpaceFamily::B0 | SpaceFamily::B0star | SpaceFamily::C0 | SpaceFamily::C0star
        )
    }

    fn quantifiers(&self) -> Pattern {
        use Quantifier::{Exists, ForAll};
        use Radius::{In, Out};
        match self {
            SpaceFamily::A => Pattern::Single(Exists, false),
            SpaceFamily::A0 => Pattern::Single(ForAll, false),
            SpaceFamily::Adual => Pattern::Single(ForAll, true),
            SpaceFamily::A0dual => Pattern::Single(Exists, true),
            SpaceFamily::B => Pattern::Nested(ForAll, In, Exists, false),
            SpaceFamily::B0 => Pattern::Nested(ForAll, Out, Exists, false),
            SpaceFamily::B0star => Pattern::Nested(ForAll, In, Exists, true),
            SpaceFamily::Bstar => Pattern::Nested(ForAll, Out, Exists, true),
            SpaceFamily::C => Pattern::Nested(Exists, Out, ForAll, false),
            SpaceFamily::C0 => Pattern::Nested(Exists, In, ForAll, false),
            SpaceFamily::C0star => Pattern::Nested(Exists, Out, ForAll, true),
            SpaceFamily::Cstar => Pattern::Nested(Exists, In, ForAll, true),
        }
    }
}

impl fmt::Display for SpaceFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SpaceFamily {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let t = text.trim();
        let alias = match t {
            "A'" | "A_dual" | "Aprime" => "Adual",
            "A0'" | "A0_dual" | "A0prime" => "A0dual",
            "B*" => "Bstar",
            "B0*" => "B0star",
            "C*" => "Cstar",
            "C0*" => "C0star",
            other => other,
        };
        SpaceFamily::ALL
            .iter()
            .find(|f| f.name().eq_ignore_ascii_case(alias))
            .copied()
            .ok_or_else(|| Error::Domain(format!("unknown space family '{text}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Quantifier {
    Exists,
    ForAll,
}

/// `In` is the radius `r₁` attached to the second index, `Out` is `r₂`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Radius {
    In,
    Out,
}

#[derive(Debug, Clone, Copy)]
enum Pattern {
    /// Quantifier over the single radius, and whether the weight is inverted.
    Single(Quantifier, bool),
    /// Outer quantifier and its radius, inner quantifier, inverted weight.
    Nested(Quantifier, Radius, Quantifier, bool),
}

/// A family with its pair of orders `(s₁, s₂)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpaceSpec {
    pub family: SpaceFamily,
    pub s1: GrowthOrder,
    pub s2: GrowthOrder,
}

impl SpaceSpec {
    /// Checks admissibility of the orders for the family.
    pub fn new(family: SpaceFamily, s1: GrowthOrder, s2: GrowthOrder) -> Result<Self> {
        let ok = if family.needs_positive() {
            !s1.is_zero() && !s2.is_zero()
        } else {
            !s1.is_infinite() && !s2.is_infinite()
        };
        if !ok {
            return Err(Error::Domain(format!("orders ({s1}, {s2}) are not admissible for family {family}")));
        }
        Ok(SpaceSpec { family, s1, s2 })
    }

    /// Lebesgue exponent used for the weighted norms: `2` when an order is
    /// infinite, `∞` otherwise.
    pub fn exponent(&self) -> f64 {
        if self.s1.is_infinite() || self.s2.is_infinite() {
            2.0
        } else {
            f64::INFINITY
        }
    }
}

impl fmt::Display for SpaceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({}, {})", self.family, self.s1, self.s2)
    }
}

/// Outcome of a single weighted-norm evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstantStatus {
    /// Finite, settled shell profile, within the cap.
    Bounded,
    /// Finite and settled but above the cap.
    Large,
    /// Shell profile still increasing at the truncation edge, or an
    /// infinite weight on the support.
    Divergent,
}

/// Three-valued diagnostic outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Consistent,
    Inconsistent,
    Indeterminate,
}

impl Verdict {
    pub fn name(&self) -> &'static str {
        match self {
            Verdict::Consistent => "Consistent",
            Verdict::Inconsistent => "Inconsistent",
            Verdict::Indeterminate => "Indeterminate",
        }
    }

    fn and(self, other: Verdict) -> Verdict {
        use Verdict::*;
        match (self, other) {
            (Inconsistent, _) | (_, Inconsistent) => Inconsistent,
            (Consistent, Consistent) => Consistent,
            _ => Indeterminate,
        }
    }

    fn or(self, other: Verdict) -> Verdict {
        use Verdict::*;
        match (self, other) {
            (Consistent, _) | (_, Consistent) => Consistent,
            (Inconsistent, Inconsistent) => Inconsistent,
            _ => Indeterminate,
        }
    }

    fn fold(q: Quantifier, items: impl IntoIterator<Item = Verdict>) -> Verdict {
        match q {
            Quantifier::ForAll => items.into_iter().fold(Verdict::Consistent, Verdict::and),
            Quantifier::Exists => items.into_iter().fold(Verdict::Inconsistent, Verdict::or),
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One evaluated radius (or radius pair).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FittedConstant {
    /// `r₁`; for single-radius families equal to `r₂`.
    pub r1: f64,
    /// `r₂`.
    pub r2: f64,
    /// Weighted norm, `None` when infinite.
    pub constant: Option<f64>,
    pub status: ConstantStatus,
}

/// Result of [`classify`].
#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticReport {
    pub space: SpaceSpec,
    /// Largest degree in the support of the classified coefficients.
    pub truncation: u32,
    pub r_grid: Vec<f64>,
    pub constants: Vec<FittedConstant>,
    /// For nested families: each outer radius with the smallest inner radius
    /// on the grid whose constant is bounded, if any.
    pub inner_radii: Vec<(f64, Option<f64>)>,
    pub verdict: Verdict,
}

/// Default radius grid for [`classify`].
pub const DEFAULT_R_GRID: [f64; 3] = [1.0, 2.0, 4.0];

/// Factor over the median finite constant beyond which a constant counts as
/// large.
pub const CAP_FACTOR: f64 = 10.0;

fn median(values: &mut [f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(f64::total_cmp);
    let n = values.len();
    Some(if n % 2 == 1 { values[n / 2] } else { 0.5 * (values[n / 2 - 1] + values[n / 2]) })
}

/// Weighted norm plus a divergence flag from the per-shell profile.
fn evaluate(c: &KernelCoeffs, w: &KernelWeight, p: f64) -> (Option<f64>, bool) {
    // Shell value: weighted ℓ^p mass of the entries with |α₂| + |α₁| = n.
    let mut shells: Vec<(u32, Vec<(Complex64, f64)>)> = Vec::new();
    for ((a, b), &v) in c.iter() {
        if v.norm() == 0.0 {
            continue;
        }
        let ln_w = w.ln_weight(a, b);
        if ln_w == f64::INFINITY {
            return (None, true);
        }
        let n = a.degree() + b.degree();
        match shells.iter_mut().find(|(k, _)| *k == n) {
            Some((_, items)) => items.push((v, ln_w)),
            None => shells.push((n, alloc::vec![(v, ln_w)])),
        }
    }
    shells.sort_by_key(|(n, _)| *n);
    let profile: Vec<f64> = shells
        .iter()
        .map(|(_, items)| weighted_norm(items.iter().copied(), p).unwrap_or(f64::INFINITY))
        .collect();
    let total = weighted_norm(shells.iter().flat_map(|(_, items)| items.iter().copied()), p).ok();
    let total = total.filter(|t| t.is_finite());
    let k = profile.len();
    let rising = k >= 3 && profile[k - 3] < profile[k - 2] && profile[k - 2] < profile[k - 1];
    (total, rising || total.is_none())
}

/// Heuristic membership diagnostic for `c` in `space` on the radius grid.
pub fn classify(c: &KernelCoeffs, space: &SpaceSpec, r_grid: &[f64]) -> Result<DiagnosticReport> {
    if r_grid.is_empty() {
        return Err(Error::Precondition(String::from("radius grid is empty")));
    }
    if let Some(r) = r_grid.iter().find(|r| !(**r > 0.0 && r.is_finite())) {
        return Err(Error::Domain(format!("radii must be positive and finite, got {r}")));
    }
    let mut grid = r_grid.to_vec();
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    let p = space.exponent();
    let (s1, s2) = (space.s1, space.s2);
    let truncation = c.max_degree().unwrap_or(0);

    let pattern = space.family.quantifiers();
    let pairs: Vec<(f64, f64)> = match pattern {
        Pattern::Single(..) => grid.iter().map(|&r| (r, r)).collect(),
        Pattern::Nested(..) => grid.iter().flat_map(|&r1| grid.iter().map(move |&r2| (r1, r2))).collect(),
    };
    let raw: Vec<(f64, f64, Option<f64>, bool)> = pairs
        .iter()
        .map(|&(r1, r2)| {
            let w = match pattern {
                Pattern::Single(_, inverse) => KernelWeight::Product { s1, s2, r: r1, inverse },
                Pattern::Nested(_, _, _, inverse) => KernelWeight::Mixed { s1, s2, r1, r2, inverse },
            };
            let (value, divergent) = evaluate(c, &w, p);
            (r1, r2, value, divergent)
        })
        .collect();
    let mut settled: Vec<f64> = raw.iter().filter(|x| !x.3).filter_map(|x| x.2).collect();
    let cap = median(&mut settled).map(|m| CAP_FACTOR * m);
    let constants: Vec<FittedConstant> = raw
        .iter()
        .map(|&(r1, r2, constant, divergent)| {
            let status = match (divergent, constant, cap) {
                (true, _, _) | (_, None, _) => ConstantStatus::Divergent,
                (false, Some(v), Some(cap)) if v > cap => ConstantStatus::Large,
                _ => ConstantStatus::Bounded,
            };
            FittedConstant { r1, r2, constant, status }
        })
        .collect();

    let truth = |s: ConstantStatus| match s {
        ConstantStatus::Bounded => Verdict::Consistent,
        ConstantStatus::Large => Verdict::Indeterminate,
        ConstantStatus::Divergent => Verdict::Inconsistent,
    };
    let mut inner_radii = Vec::new();
    let verdict = if c.iter().all(|(_, v)| v.norm() == 0.0) {
        Verdict::Consistent
    } else {
        match pattern {
            Pattern::Single(q, _) => Verdict::fold(q, constants.iter().map(|k| truth(k.status))),
            Pattern::Nested(outer, radius, inner, _) => {
                let pick = |k: &FittedConstant| match radius {
                    Radius::In => (k.r1, k.r2),
                    Radius::Out => (k.r2, k.r1),
                };
                let per_outer: Vec<Verdict> = grid
                    .iter()
                    .map(|&ro| {
                        let row: Vec<&FittedConstant> = constants.iter().filter(|k| pick(k).0 == ro).collect();
                        let witness = row
                            .iter()
                            .filter(|k| k.status == ConstantStatus::Bounded)
                            .map(|k| pick(k).1)
                            .fold(None, |m: Option<f64>, r| Some(m.map_or(r, |m| m.min(r))));
                        inner_radii.push((ro, witness));
                        Verdict::fold(inner, row.iter().map(|k| truth(k.status)))
                    })
                    .collect();
                Verdict::fold(outer, per_outer)
            }
        }
    };
    Ok(DiagnosticReport { space: *space, truncation, r_grid: grid, constants, inner_radii, verdict })
}

/// Result of [`verify_pointwise_bound`].
#[derive(Debug, Clone, PartialEq)]
pub struct BoundCheck {
    /// `max |f| / bound` over the grid.
    pub constant: f64,
    /// Grid position attaining the constant.
    pub argmax: usize,
    /// Grid positions whose ratio exceeds the cap.
    pub violations: Vec<usize>,
    pub cap: f64,
}

/// Compares `|f(z, w)|` against a positive bound on a grid of points. The
/// cap defaults to ten times the median ratio.
pub fn verify_pointwise_bound<P>(
    f: impl Fn(&P) -> Complex64,
    bound: impl Fn(&P) -> f64,
    grid: &[P],
    cap: Option<f64>,
) -> Result<BoundCheck> {
    if grid.is_empty() {
        return Err(Error::Precondition(String::from("evaluation grid is empty")));
    }
    let mut ratios = Vec::with_capacity(grid.len());
    for point in grid {
        let v = f(point);
        if !v.is_finite() {
            return Err(Error::NonFinite("evaluator output"));
        }
        let b = bound(point);
        if !(b > 0.0 && b.is_finite()) {
            return Err(Error::Precondition(format!("bound must be positive and finite, got {b}")));
        }
        ratios.push(v.norm() / b);
    }
    let (argmax, constant) = ratios
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (i, r)| if r > best.1 { (i, r) } else { best });
    let cap = match cap {
        Some(c) => c,
        None => CAP_FACTOR * median(&mut ratios.clone()).unwrap_or(0.0),
    };
    let violations = ratios.iter().enumerate().filter(|(_, &r)| r > cap).map(|(i, _)| i).collect();
    Ok(BoundCheck { constant, argmax, violations, cap })
}
