//! sin, ln and exp on balls.
//!
//! Each series runs in fixed point at `2^-p` with a running count of the
//! rounding error in units of the last place; the count plus a truncation
//! bound becomes the radius of the result.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::ball::Ball;
use super::mag::Mag;
use super::pi::pi_ball;
use crate::error::{Error, Result};

const GUARD: u32 = 32;

/// `mid * 2^exp` at scale `2^-p`, with its error in ulps.
fn to_fixed(mid: &BigInt, exp: i64, p: u32) -> (BigInt, u64) {
    let sh = exp + p as i64;
    if sh >= 0 {
        (mid << sh as u64, 0)
    } else {
        (mid >> (-sh) as u64, 1)
    }
}

fn bit_len(k: i64) -> u32 {
    64 - k.unsigned_abs().leading_zeros()
}

/// sin(r) for fixed-point `|r| <= 2`.
fn sin_fixed(r: &BigInt, p: u32) -> (BigInt, u64) {
    let r2 = (r * r) >> p as u64;
    let mut term = r.clone();
    let mut sum = r.clone();
    let mut err = 0u64;
    let mut k = 1u64;
    loop {
        term = (&term * &r2) >> p as u64;
        term = -(term / BigInt::from((2 * k) * (2 * k + 1)));
        // ratio r^2/((2k)(2k+1)) <= 2/3, so per-term error stays below 6 ulps
        err += 6;
        if term.is_zero() {
            break;
        }
        sum += &term;
        k += 1;
    }
    (sum, err + 6)
}

/// atanh(z) for fixed-point `|z| <= 1/3`.
fn atanh_fixed(z: &BigInt, p: u32) -> (BigInt, u64) {
    let z2 = (z * z) >> p as u64;
    let mut pw = z.clone();
    let mut sum = z.clone();
    let mut err = 0u64;
    let mut j = 1u64;
    loop {
        pw = (&pw * &z2) >> p as u64;
        let t = &pw / BigInt::from(2 * j + 1);
        err += 3;
        if t.is_zero() {
            break;
        }
        sum += t;
        j += 1;
    }
    (sum, err + 4)
}

/// ln 2 at scale `2^-p`, as `2 atanh(1/3)`.
fn ln2_fixed(p: u32) -> (BigInt, u64) {
    let third = (BigInt::one() << p as u64) / 3u8;
    let (s, e) = atanh_fixed(&third, p);
    (s << 1u8, 2 * (e + 2))
}

pub fn ln2(prec: u32) -> Ball {
    let p = prec + GUARD;
    let (v, e) = ln2_fixed(p);
    Ball::with_radius(v, -(p as i64), Mag::from_u64(e, -(p as i64))).round(prec)
}

/// sin of a ball with `|mid| < 2`.
fn sin_small(x: &Ball, prec: u32) -> Ball {
    let (mid, exp) = x.mid();
    let Some(top) = x.mid_top() else {
        // |sin y| <= |y| <= rad
        return Ball::with_radius(BigInt::zero(), 0, x.radius());
    };
    let p = prec + GUARD + (-top).max(0) as u32;
    let (rf, e1) = to_fixed(mid, exp, p);
    let (s, e2) = sin_fixed(&rf, p);
    let e = -(p as i64);
    Ball::with_radius(s, e, Mag::from_u64(e1 + e2, e))
        .add_error(x.radius())
        .round(prec)
}

/// sin of a ball. Arguments of magnitude 2 or more are reduced by the nearest
/// multiple of π first.
pub fn sin(x: &Ball, prec: u32) -> Result<Ball> {
    let top = match x.mid_top() {
        Some(t) if t > 1 => t,
        _ => return Ok(sin_small(x, prec)),
    };
    let pb = (top + prec as i64 + 64) as u32;
    let pi = pi_ball(pb)?;
    let q = x.div(&pi, 64).expect("pi is bounded away from zero");
    let m = nearest_integer(&q);
    let mpi = Ball::exact_int(m.clone()).mul(&pi, pb + top as u32);
    let r = x.sub(&mpi, pb + top as u32);
    if r.mid_top().is_some_and(|t| t > 1) {
        return Ok(Ball::with_radius(BigInt::zero(), 0, Mag::from_u64(1, 0)));
    }
    let s = sin_small(&r, prec);
    Ok(if m.is_odd() { s.neg() } else { s })
}

/// Midpoint rounded to the nearest integer, ties away from zero.
pub(crate) fn nearest_integer(x: &Ball) -> BigInt {
    let (mid, exp) = x.mid();
    if exp >= 0 {
        return mid << exp as u64;
    }
    let sh = (-exp) as u64;
    let half = BigInt::one() << (sh - 1);
    let q = (mid.abs() + half) >> sh;
    if mid.is_negative() {
        -q
    } else {
        q
    }
}

/// ln of a certainly positive ball, with absolute error about `2^-prec`.
pub fn ln(x: &Ball, prec: u32) -> Result<Ball> {
    if !x.is_positive() {
        return Err(Error::Domain("logarithm of a value not certainly positive".into()));
    }
    let (mid, exp) = x.mid();
    let k = exp + mid.bits() as i64 - 1;
    let p = prec + GUARD + bit_len(k);
    let one = BigInt::one() << p as u64;
    let (y, e1) = to_fixed(mid, exp - k, p);
    // z = (y-1)/(y+1) in [0, 1/3); dz/dy <= 1/2
    let z = ((&y - &one) << p as u64) / (&y + &one);
    let (s, e2) = atanh_fixed(&z, p);
    // d atanh/dz <= 9/8
    let mut err = 2 * (e2 + 2 * (1 + e1));
    let mut total = s << 1u8;
    if k != 0 {
        let (l2, e3) = ln2_fixed(p);
        total += l2 * k;
        err += k.unsigned_abs() * e3;
    }
    let e = -(p as i64);
    let mut out = Ball::with_radius(total, e, Mag::from_u64(err, e));
    if !x.radius().is_zero() {
        let lip = x.radius().div(x.abs_lower()).expect("positive ball");
        out = out.add_error(lip);
    }
    Ok(out.round(prec))
}

/// exp of a ball, with relative error about `2^-prec`.
pub fn exp(y: &Ball, prec: u32) -> Result<Ball> {
    let yf = y.to_f64();
    if !yf.is_finite() || yf.abs() > 2f64.powi(40) {
        return Err(Error::Domain(format!("exponent {yf:e} out of range")));
    }
    let k = (yf / std::f64::consts::LN_2).round() as i64;
    let p = prec + GUARD + bit_len(k);
    let one = BigInt::one() << p as u64;
    let (mid, e) = y.mid();
    let (ym, e1) = to_fixed(mid, e, p);
    let (l2, e3) = ln2_fixed(p);
    let r = ym - l2 * k;
    let er = e1 + k.unsigned_abs() * e3;
    if r.abs() > one {
        return Err(Error::Domain("exp argument reduction failed".into()));
    }
    let mut term = one.clone();
    let mut sum = one;
    let mut err = 0u64;
    let mut j = 1u64;
    loop {
        term = ((&term * &r) >> p as u64) / BigInt::from(j);
        err += 4;
        if term.is_zero() {
            break;
        }
        sum += &term;
        j += 1;
    }
    // an error of `er` ulps in r moves exp(r) by at most e^1 * er
    err += 3 * er + 4;
    let shift = k - p as i64;
    let mut out = Ball::with_radius(sum, shift, Mag::from_u64(err, shift));
    if !y.radius().is_zero() {
        let rho = y.radius().to_f64();
        if rho > 700.0 {
            return Err(Error::Domain("exp argument radius too wide".into()));
        }
        let factor = Mag::from_f64(rho.exp_m1() * (1.0 + 1e-12) + f64::MIN_POSITIVE);
        out = out.add_error(out.abs_upper().mul(factor));
    }
    Ok(out.round(prec))
}

/// `base^exponent` for a positive base.
pub fn pow(base: &Ball, exponent: &Ball, prec: u32) -> Result<Ball> {
    let work = prec + 16;
    let l = ln(base, work + 16)?;
    exp(&l.mul(exponent, work + 16), work).map(|b| b.round(prec))
}
