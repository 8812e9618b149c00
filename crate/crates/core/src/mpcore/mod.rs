//! Adaptive-precision real arithmetic: π to arbitrary digits, certified
//! `sin(n)` for arbitrarily large integers, and checks of the two-sided bound
//! `(2/π)|x| <= |sin x| <= |x|` on `[-π/2, π/2]`.
//!
//! Precision escalates on a fixed ladder of working precisions (powers of two
//! times 64 bits) until the requested digits are certified, so results are a
//! deterministic function of the inputs.

mod ball;
mod decimal;
pub mod elementary;
mod mag;
mod pi;

use std::sync::atomic::{AtomicU64, Ordering};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub use ball::{Ball, ErrorBoundedValue};
pub use decimal::HighPrecisionReal;
pub use mag::Mag;
pub use pi::{cached_bits as pi_cached_bits, pi_ball};

use crate::error::{Error, Result};

pub const DEFAULT_PRECISION_CAP: u64 = 100_000;

/// Bits of slack allowed above the digit cap for guard bits.
const CAP_SLACK_BITS: u64 = 256;

static PRECISION_CAP: AtomicU64 = AtomicU64::new(DEFAULT_PRECISION_CAP);

/// Maximum decimal digits any computation may request.
pub fn precision_cap() -> u64 {
    PRECISION_CAP.load(Ordering::Relaxed)
}

pub fn set_precision_cap(digits: u64) {
    PRECISION_CAP.store(digits.max(1), Ordering::Relaxed);
}

pub fn bits_for_digits(digits: u64) -> u64 {
    (digits as f64 * std::f64::consts::LOG2_10).ceil() as u64
}

pub(crate) fn check_bits(bits: u64) -> Result<()> {
    let digits = (bits.saturating_sub(CAP_SLACK_BITS) as f64 / std::f64::consts::LOG2_10).ceil() as u64;
    let cap = precision_cap();
    if digits > cap {
        Err(Error::ResourceLimit { requested: digits, cap })
    } else {
        Ok(())
    }
}

fn check_digits(digits: u64) -> Result<()> {
    let cap = precision_cap();
    if digits > cap {
        Err(Error::ResourceLimit { requested: digits, cap })
    } else {
        Ok(())
    }
}

/// Smallest rung `64 * 2^j` of the precision ladder that is at least `bits`.
pub(crate) fn ladder(bits: u64) -> u32 {
    let mut p = 64u64;
    while p < bits {
        p *= 2;
    }
    p.min(u32::MAX as u64) as u32
}

/// Upper bound on the number of decimal digits of `n`.
pub(crate) fn decimal_digits(n: &BigUint) -> u64 {
    (n.bits() as f64 * std::f64::consts::LOG10_2).floor() as u64 + 1
}

/// A ball together with its certified rounding to a number of significant digits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertifiedValue {
    pub value: Ball,
    /// Correctly rounded to `rounded.digits()` significant digits.
    pub rounded: HighPrecisionReal,
}

/// π rounded to `digits` significant digits.
pub fn pi_to(digits: u32) -> Result<HighPrecisionReal> {
    if digits == 0 {
        return Err(Error::InvalidArgument("digits must be at least 1".into()));
    }
    check_digits(digits as u64)?;
    let mut bits = ladder(bits_for_digits(digits as u64) + 32);
    loop {
        let pi = pi_ball(bits)?;
        if let Some(r) = pi.round_sig(digits) {
            return Ok(r);
        }
        bits *= 2;
    }
}

/// `n = m·π + residual` with `m` the nearest integer to `n/π`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionResult {
    pub m: BigUint,
    pub residual: Ball,
}

impl ReductionResult {
    /// `sin(n) = (-1)^m sin(residual)`.
    pub fn m_is_odd(&self) -> bool {
        self.m.is_odd()
    }
}

/// The nearest integer to `n/π`, certified.
pub(crate) fn nearest_multiple(n: &BigUint) -> Result<BigUint> {
    let mut bits = ladder(n.bits() + 64);
    loop {
        let pi = pi_ball(bits)?;
        let q = Ball::from(n).div(&pi, bits).expect("pi is bounded away from zero");
        let m = elementary::nearest_integer(&q);
        let frac = q.sub(&Ball::exact_int(m.clone()), bits);
        if frac.abs_upper() < Mag::pow2(-1) {
            return Ok(m.to_biguint().expect("n/pi is positive"));
        }
        bits *= 2;
    }
}

/// `n - m·π` using π to `pi_bits` bits (no further rounding).
fn residual_with(n: &BigUint, m: &BigUint, pi_bits: u32) -> Result<Ball> {
    let pi = pi_ball(pi_bits)?;
    let exact = u32::MAX;
    let mpi = Ball::from(m).mul(&pi, exact);
    Ok(Ball::from(n).sub(&mpi, exact))
}

/// Residual with relative error at most `2^-prec`.
fn residual_relative(n: &BigUint, m: &BigUint, prec: u32) -> Result<Ball> {
    if m.is_zero() {
        return Ok(Ball::from(n));
    }
    let nb = n.bits() as u32;
    let mut extra = 32u32;
    loop {
        let r = residual_with(n, m, nb + prec + extra)?;
        let target = Mag::pow2(-(prec as i64));
        match r.rel_error() {
            Some(rel) if rel <= target => return Ok(r.round(prec + 8)),
            _ => {
                // |r| ~ 2^top, so about -top more bits of π are needed
                let deficit = r.mid_top().map_or(extra, |t| (-t).max(0) as u32);
                extra = extra.max(deficit) * 2;
            }
        }
    }
}

/// Reduces `n` by the nearest multiple of π.
///
/// The residual `r = n - m·π` satisfies `|r| <= π/2` and
/// `abs_error < 10^-target_digits * max(|r|, 10^-target_digits)`.
pub fn reduce_mod_pi(n: &BigUint, target_digits: u32) -> Result<ReductionResult> {
    if n.is_zero() {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    check_bits(n.bits())?;
    let m = nearest_multiple(n)?;
    if m.is_zero() {
        return Ok(ReductionResult { residual: Ball::from(n), m });
    }
    let tbits = bits_for_digits(target_digits as u64) as u32;
    // 2^-(tbits+1) <= 10^-target_digits
    let floor = Mag::pow2(-(tbits as i64) - 1);
    let mut extra = 32u32;
    loop {
        let pi_bits = n.bits() as u32 + tbits + extra;
        let r = residual_with(n, &m, pi_bits)?;
        let scale = r.abs_lower().max(floor);
        let tol = scale.mul(floor);
        if r.radius() < tol {
            return Ok(ReductionResult { m, residual: r.round(pi_bits) });
        }
        extra *= 2;
    }
}

/// `sin(n)` with its first `target_digits` significant digits certified.
///
/// Works at relative precision, so tiny values such as `sin(355)` come out
/// with as many correct digits as large ones.
pub fn sin_of_integer(n: &BigUint, target_digits: u32) -> Result<CertifiedValue> {
    if n.is_zero() {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    if target_digits == 0 {
        return Err(Error::InvalidArgument("target_digits must be at least 1".into()));
    }
    check_digits(target_digits as u64)?;
    check_bits(n.bits())?;
    let m = nearest_multiple(n)?;
    let mut prec = ladder(bits_for_digits(decimal_digits(n) + target_digits as u64 + 10));
    loop {
        check_bits(prec as u64)?;
        let (value, _) = sin_with_residual(n, &m, prec)?;
        if let Some(rounded) = value.round_sig(target_digits) {
            return Ok(CertifiedValue { value, rounded });
        }
        prec = prec.saturating_mul(2);
    }
}

/// `(sin(n), n - m·π)` at relative precision about `2^-prec`, given the nearest multiple `m`.
pub(crate) fn sin_with_residual(n: &BigUint, m: &BigUint, prec: u32) -> Result<(Ball, Ball)> {
    let r = residual_relative(n, m, prec + 8)?;
    let s = elementary::sin(&r, prec)?;
    Ok((if m.is_odd() { s.neg() } else { s }, r))
}

/// Slacks in `(2/π)|x| <= |sin x| <= |x|`.
#[derive(Clone, Debug)]
pub struct SineBoundSlacks {
    /// `|x| - |sin x|`, nonnegative for every real `x`.
    pub upper: Ball,
    /// `|sin x| - (2/π)|x|`, nonnegative on `|x| <= π/2`; a domain error outside.
    pub lower: Result<Ball>,
}

impl SineBoundSlacks {
    /// Both slacks have lower endpoint strictly above `-tolerance`.
    pub fn certified_nonnegative(&self, tolerance: Mag) -> bool {
        let ok = |b: &Ball| above_minus(b, tolerance);
        ok(&self.upper) && self.lower.as_ref().is_ok_and(ok)
    }
}

fn above_minus(b: &Ball, tolerance: Mag) -> bool {
    let (m, e) = b.lower();
    if !m.is_negative() {
        return true;
    }
    Mag::from_biguint(m.magnitude(), e) < tolerance
}

/// Evaluates both slacks of the sine bounds at `x`, carrying `digits` decimal digits.
pub fn sine_bound_slacks(x: &Ball, digits: u32) -> Result<SineBoundSlacks> {
    let prec = bits_for_digits(digits as u64) as u32 + 32;
    check_bits(prec as u64)?;
    let s = elementary::sin(x, prec)?.abs();
    let ax = x.abs();
    let upper = ax.sub(&s, prec);
    let pi = pi_ball(prec + 8)?;
    let half_pi = pi.mul_2exp(-1);
    let lower = if ax.sub(&half_pi, prec).is_positive() {
        Err(Error::Domain(format!("|x| = {} exceeds pi/2", ax.to_decimal(12))))
    } else {
        let two_over_pi = Ball::exact_int(2).div(&pi, prec + 8).expect("pi is positive");
        Ok(s.sub(&two_over_pi.mul(&ax, prec + 8), prec))
    };
    Ok(SineBoundSlacks { upper, lower })
}

/// Convenience wrapper taking a decimal argument.
pub fn sine_bound_slacks_decimal(x: &HighPrecisionReal, digits: u32) -> Result<SineBoundSlacks> {
    let prec = bits_for_digits(digits as u64) as u32 + 64;
    sine_bound_slacks(&Ball::from_decimal(x, prec), digits)
}

/// Parses a decimal integer (≥ 1) into a `BigUint`.
pub fn parse_natural(s: &str) -> Result<BigUint> {
    let n = s
        .trim()
        .parse::<BigUint>()
        .map_err(|_| Error::InvalidArgument(format!("not a natural number: {s:?}")))?;
    if n.is_zero() {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    Ok(n)
}

/// Parses a rational written as a decimal (`7.6064`, `1e-3`) or a fraction (`5/2`).
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let t = s.trim();
    if let Some((a, b)) = t.split_once('/') {
        let bad = || Error::InvalidArgument(format!("not a rational number: {s:?}"));
        let num = a.trim().parse::<BigInt>().map_err(|_| bad())?;
        let den = b.trim().parse::<BigInt>().map_err(|_| bad())?;
        if den.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(num, den));
    }
    let (num, den) = t.parse::<HighPrecisionReal>()?.to_fraction();
    Ok(BigRational::new(num, den))
}

/// Exact decimal when the expansion terminates, `p/q` otherwise.
pub fn format_rational(x: &BigRational) -> String {
    if x.is_integer() {
        return x.numer().to_string();
    }
    let mut d = x.denom().clone();
    let (mut twos, mut fives) = (0u64, 0u64);
    while d.is_even() {
        d >>= 1u8;
        twos += 1;
    }
    while (&d % 5u8).is_zero() {
        d /= 5u8;
        fives += 1;
    }
    if !d.is_one() {
        return format!("{}/{}", x.numer(), x.denom());
    }
    let k = twos.max(fives);
    let scaled = x * BigRational::from_integer(decimal::pow10(k));
    HighPrecisionReal::new(scaled.to_integer(), -(k as i64), 1).to_string()
}
