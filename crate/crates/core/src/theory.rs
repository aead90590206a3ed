//! Closed-form predictions and the first-moment certificate.
//!
//! The central objects are the increasing map
//!
//! ```text
//! F_r(z) = z * ((z+1)^(r-1) - z^(r-1)) / ((z+1)^r - z^r),   z >= 0,
//! ```
//!
//! which rises from 0 toward `(r-1)/r`, its inverse [`solve_z2`], the
//! companion quantity `z1 = d / (r ((z2+1)^r - z2^r))`, and the
//! first-moment value whose negativity certifies that independent sets of
//! density `c` are absent with high probability. Natural logarithms
//! throughout.
//!
//! [`first_moment_value`] evaluates the defining expression
//!
//! ```text
//! h(d/r) + h(dc) + h(d(1-c)) - h(c) - h(1-c) - h(d)
//!     - (d/r) ln z1 - dc ln z2,        h(x) = x ln x,
//! ```
//!
//! in an algebraically identical arrangement in which the `O(d ln d)`
//! contributions cancel symbolically instead of numerically, so tiny `c`
//! does not lose the result to cancellation. [`first_moment_value_direct`]
//! keeps the literal term-by-term form as an independent second route; the
//! two are compared in tests and in the validation suite.

use alloc::vec::Vec;
use core::fmt;

#[cfg(not(feature = "std"))]
#[allow(unused_imports)]
use num_traits::Float;

/// Residual tolerance the solver guarantees on `|F_r(z2) - c|`.
pub const Z2_RESIDUAL_TOL: f64 = 1e-12;

const MAX_BRACKET_DOUBLINGS: u32 = 200;

#[derive(Debug, Clone, PartialEq)]
pub enum TheoryError {
    /// `r` outside the supported range for this operation.
    BadUniformity { r: u32, min: u32 },
    /// `c` outside the open interval `(0, (r-1)/r)`.
    COutOfRange { c: f64, hi: f64 },
    /// `d` outside the operation's domain.
    DOutOfRange { d: f64, min: f64 },
    /// `eps <= 0`.
    EpsOutOfRange { eps: f64 },
    /// `z` negative or non-finite where a nonnegative real is required.
    ZOutOfRange { z: f64 },
    /// Could not bracket the root within the doubling budget; `c` is too
    /// close to the supremum `(r-1)/r` to be representable.
    BracketFailed { c: f64 },
    /// Bisection collapsed without meeting the residual tolerance.
    NoConvergence { z: f64, residual: f64 },
}

impl fmt::Display for TheoryError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::BadUniformity { r, min } => write!(f, "r = {r} not supported (need r >= {min})"),
            Self::COutOfRange { c, hi } => write!(f, "c = {c} outside the open interval (0, {hi})"),
            Self::DOutOfRange { d, min } => write!(f, "d = {d} outside domain (need d > {min})"),
            Self::EpsOutOfRange { eps } => write!(f, "eps = {eps} must be positive"),
            Self::ZOutOfRange { z } => write!(f, "z = {z} must be a nonnegative real"),
            Self::BracketFailed { c } => write!(f, "failed to bracket z2 for c = {c}"),
            Self::NoConvergence { z, residual } => {
                write!(f, "bisection stalled at z = {z} with residual {residual}")
            }
        }
    }
}

impl core::error::Error for TheoryError {}

/// `(z+1)^r - z^r`, evaluated without cancellation for large `z`.
pub fn pow_diff(z: f64, r: u32) -> f64 {
    debug_assert!(z >= 0.0);
    if z <= 1.0 {
        (z + 1.0).powi(r as i32) - z.powi(r as i32)
    } else {
        // (z+1)^r - z^r = z^r * expm1(r * ln1p(1/z))
        z.powi(r as i32) * (r as f64 * (1.0 / z).ln_1p()).exp_m1()
    }
}

/// `ln((z+1)^r - z^r)` with full relative accuracy near `z = 0`, where the
/// value sits just above `ln 1`. Binomial expansion gives
/// `(z+1)^r - z^r = 1 + sum_{k=1}^{r-1} C(r,k) z^k` exactly, so the small
/// case is an `ln_1p` of a positive polynomial.
pub fn ln_pow_diff(z: f64, r: u32) -> f64 {
    debug_assert!(z >= 0.0);
    if z < 1.0 {
        // Horner over k = r-1 .. 1 of C(r,k) z^k.
        let mut acc = 0.0f64;
        for k in (1..r).rev() {
            acc = (acc + binomial(r as usize, k as usize)) * z;
        }
        acc.ln_1p()
    } else {
        (r as f64) * z.ln() + (r as f64 * (1.0 / z).ln_1p()).exp_m1().ln()
    }
}

/// Left-hand side `F_r(z)` of the defining equation for `z2`.
///
/// Strictly increasing on `z >= 0`, from 0 toward `(r-1)/r`.
pub fn z2_equation_lhs(r: u32, z: f64) -> f64 {
    debug_assert!(r >= 2);
    if z == 0.0 {
        return 0.0;
    }
    // F_r(z) = (t^(r-1) - 1) / (t^r - 1) with t = 1 + 1/z, written with
    // expm1/ln1p so large z does not cancel.
    let ln_t = (1.0 / z).ln_1p();
    (((r - 1) as f64) * ln_t).exp_m1() / ((r as f64) * ln_t).exp_m1()
}

/// Solves `F_r(z) = c` for the unique positive root, `r >= 3`,
/// `0 < c < (r-1)/r`.
///
/// Geometric bracket expansion from `[0, 1]` followed by bisection run to
/// interval collapse; the result satisfies `|F_r(z) - c| <= 1e-12`.
pub fn solve_z2(r: u32, c: f64) -> Result<f64, TheoryError> {
    if r < 3 {
        return Err(TheoryError::BadUniformity { r, min: 3 });
    }
    let hi_limit = (r as f64 - 1.0) / r as f64;
    if !(c > 0.0 && c < hi_limit) || !c.is_finite() {
        return Err(TheoryError::COutOfRange { c, hi: hi_limit });
    }
    let mut lo = 0.0f64;
    let mut hi = 1.0f64;
    let mut doublings = 0;
    while z2_equation_lhs(r, hi) < c {
        lo = hi;
        hi *= 2.0;
        doublings += 1;
        if doublings > MAX_BRACKET_DOUBLINGS {
            return Err(TheoryError::BracketFailed { c });
        }
    }
    // Bisect to full f64 interval collapse; monotonicity makes the sign
    // test unambiguous.
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if z2_equation_lhs(r, mid) < c {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let z = hi;
    let residual = (z2_equation_lhs(r, z) - c).abs();
    if residual <= Z2_RESIDUAL_TOL {
        Ok(z)
    } else {
        Err(TheoryError::NoConvergence { z, residual })
    }
}

/// `z1 = d / (r ((z2+1)^r - z2^r))`. Accepts the degenerate endpoint
/// `z2 = 0`.
pub fn z1_of(r: u32, d: f64, z2: f64) -> Result<f64, TheoryError> {
    if r < 2 {
        return Err(TheoryError::BadUniformity { r, min: 2 });
    }
    if !(d > 0.0) || !d.is_finite() {
        return Err(TheoryError::DOutOfRange { d, min: 0.0 });
    }
    if !(z2 >= 0.0) || !z2.is_finite() {
        return Err(TheoryError::ZOutOfRange { z: z2 });
    }
    Ok(d / (r as f64 * pow_diff(z2, r)))
}

fn check_fm_domain(r: u32, d: f64, c: f64) -> Result<(), TheoryError> {
    if r < 3 {
        return Err(TheoryError::BadUniformity { r, min: 3 });
    }
    if !(d >= 2.0) || !d.is_finite() {
        return Err(TheoryError::DOutOfRange { d, min: 2.0 });
    }
    let hi = (r as f64 - 1.0) / r as f64;
    if !(c > 0.0 && c < hi) {
        return Err(TheoryError::COutOfRange { c, hi });
    }
    Ok(())
}

/// First-moment value at `(r, d, c)`, cancellation-free arrangement.
///
/// Negative means the expected number of independent sets of density `c`
/// vanishes, certifying `alpha < c n` w.h.p.
pub fn first_moment_value(r: u32, d: f64, c: f64) -> Result<f64, TheoryError> {
    check_fm_domain(r, d, c)?;
    let z2 = solve_z2(r, c)?;
    let rf = r as f64;
    // ln(c / ((1-c) z2)) without forming the near-unit quotient: for small
    // c the root satisfies z2 ~ c/(1-c), and this difference of logs keeps
    // full relative accuracy there.
    let ln_ratio = c.ln() - (-c).ln_1p() - z2.ln();
    let value = d * c * ln_ratio + (d / rf) * ln_pow_diff(z2, r) + d * (-c).ln_1p()
        - c * c.ln()
        - (1.0 - c) * (-c).ln_1p();
    Ok(value)
}

/// Literal term-by-term evaluation of the defining sum of `h(x) = x ln x`
/// terms. Kept as an independent route for cross-checking; large `d` with
/// tiny `c` cancels catastrophically here, which is exactly why
/// [`first_moment_value`] exists.
pub fn first_moment_value_direct(r: u32, d: f64, c: f64) -> Result<f64, TheoryError> {
    check_fm_domain(r, d, c)?;
    let z2 = solve_z2(r, c)?;
    let z1 = z1_of(r, d, z2)?;
    let rf = r as f64;
    let h = |x: f64| x * x.ln();
    Ok(h(d / rf) + h(d * c) + h(d * (1.0 - c)) - h(c) - h(1.0 - c) - h(d)
        - (d / rf) * z1.ln()
        - d * c * z2.ln())
}

/// Predicted chromatic number `((r-1) d / (r ln d))^(1/(r-1))`, `d > 1`.
pub fn predicted_chi(r: u32, d: f64) -> Result<f64, TheoryError> {
    if r < 2 {
        return Err(TheoryError::BadUniformity { r, min: 2 });
    }
    if !(d > 1.0) || !d.is_finite() {
        return Err(TheoryError::DOutOfRange { d, min: 1.0 });
    }
    let rf = r as f64;
    Ok((((rf - 1.0) * d) / (rf * d.ln())).powf(1.0 / (rf - 1.0)))
}

/// Predicted independence fraction `(r ln d / ((r-1) d))^(1/(r-1))`,
/// the exact reciprocal of [`predicted_chi`].
pub fn predicted_alpha_frac(r: u32, d: f64) -> Result<f64, TheoryError> {
    if r < 2 {
        return Err(TheoryError::BadUniformity { r, min: 2 });
    }
    if !(d > 1.0) || !d.is_finite() {
        return Err(TheoryError::DOutOfRange { d, min: 1.0 });
    }
    let rf = r as f64;
    Ok(((rf * d.ln()) / ((rf - 1.0) * d)).powf(1.0 / (rf - 1.0)))
}

/// Everything the first-moment certificate evaluates at one `(r, d, eps)`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TheoryReport {
    pub r: u32,
    pub d: f64,
    pub eps: f64,
    /// Candidate independence fraction `(1+eps) * alpha_frac_pred`.
    pub c: f64,
    pub z2: f64,
    pub z1: f64,
    pub fm_value: f64,
    /// `fm_value < 0`: the bound `alpha < c n` is certified w.h.p.
    pub certified: bool,
    pub chi_pred: f64,
    pub alpha_frac_pred: f64,
}

/// Outcome of [`certify_alpha_upper`]: either a full evaluation or an
/// explicit report that `d` is too small for this `eps`.
#[derive(Debug, Clone, PartialEq)]
pub enum AlphaCertificate {
    Evaluated(TheoryReport),
    /// `c = (1+eps) * alpha_frac_pred` fell outside `(0, (r-1)/r)`, so the
    /// certificate is not evaluable at this `(r, d, eps)`.
    DTooSmall { r: u32, d: f64, eps: f64, c: f64, c_limit: f64 },
}

impl AlphaCertificate {
    pub fn certified(&self) -> bool {
        matches!(self, Self::Evaluated(rep) if rep.certified)
    }

    pub fn report(&self) -> Option<&TheoryReport> {
        match self {
            Self::Evaluated(rep) => Some(rep),
            Self::DTooSmall { .. } => None,
        }
    }
}

/// Evaluates the first-moment certificate at
/// `c = (1+eps) (r ln d / ((r-1) d))^(1/(r-1))`.
pub fn certify_alpha_upper(r: u32, d: f64, eps: f64) -> Result<AlphaCertificate, TheoryError> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(TheoryError::EpsOutOfRange { eps });
    }
    if !(d >= 2.0) || !d.is_finite() {
        return Err(TheoryError::DOutOfRange { d, min: 2.0 });
    }
    let alpha_frac_pred = predicted_alpha_frac(r, d)?;
    let chi_pred = predicted_chi(r, d)?;
    let c = (1.0 + eps) * alpha_frac_pred;
    let c_limit = (r as f64 - 1.0) / r as f64;
    if !(c > 0.0 && c < c_limit) {
        return Ok(AlphaCertificate::DTooSmall { r, d, eps, c, c_limit });
    }
    let z2 = solve_z2(r, c)?;
    let z1 = z1_of(r, d, z2)?;
    let fm_value = first_moment_value(r, d, c)?;
    Ok(AlphaCertificate::Evaluated(TheoryReport {
        r,
        d,
        eps,
        c,
        z2,
        z1,
        fm_value,
        certified: fm_value < 0.0,
        chi_pred,
        alpha_frac_pred,
    }))
}

/// Class-profile thresholds `kappa_j = (10 d / r) C(r, j) a^j` for
/// `j = 1..r-1`, where `a` is the class-fraction scale.
pub fn kappa_thresholds(r: usize, d: f64, class_frac: f64) -> Vec<f64> {
    let mut kappa = Vec::with_capacity(r.saturating_sub(1));
    for j in 1..r {
        kappa.push((10.0 * d / r as f64) * binomial(r, j) * class_frac.powi(j as i32));
    }
    kappa
}

fn binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    let mut acc = 1.0f64;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}
