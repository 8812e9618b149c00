//! π by Chudnovsky binary splitting, behind a process-wide cache that only grows.

use std::sync::RwLock;

use num_bigint::{BigInt, BigUint};
use num_traits::One;

use super::ball::Ball;
use super::mag::Mag;
use super::check_bits;
use crate::error::Result;

/// π ≈ `mid * 2^-bits` with error below `STORE_ULPS` units of the last place.
struct PiStore {
    bits: u64,
    mid: BigInt,
}

const STORE_ULPS: u64 = 2;
const GUARD_BITS: u64 = 64;

static STORE: RwLock<Option<PiStore>> = RwLock::new(None);

// 640320^3 / 24
const C3_OVER_24: u64 = 10_939_058_860_032_000;

fn split(a: u64, b: u64) -> (BigInt, BigInt, BigInt) {
    if b - a == 1 {
        let (p, q) = if a == 0 {
            (BigInt::one(), BigInt::one())
        } else {
            let p = BigInt::from(6 * a - 5) * (2 * a - 1) * (6 * a - 1);
            let q = BigInt::from(a) * a * a * C3_OVER_24;
            (p, q)
        };
        let mut t = &p * (BigInt::from(545_140_134u64) * a + 13_591_409u64);
        if a % 2 == 1 {
            t = -t;
        }
        return (p, q, t);
    }
    let m = (a + b) / 2;
    let (pam, qam, tam) = split(a, m);
    let (pmb, qmb, tmb) = split(m, b);
    (&pam * pmb, &qam * &qmb, qmb * tam + pam * tmb)
}

/// Fixed-point π to `bits` fractional bits, error below 2 ulps.
fn chudnovsky(bits: u64) -> BigInt {
    let work = bits + GUARD_BITS;
    // each term contributes log2(151931373056000) ~ 47.1 bits
    let terms = work / 47 + 2;
    let (_, q, t) = split(0, terms);
    let sqrt_c: BigUint = (BigUint::from(10_005u32) << (2 * work)).sqrt();
    let num = q * 426_880u32 * BigInt::from(sqrt_c);
    (num / t) >> GUARD_BITS
}

/// Ball around π whose midpoint has at most `bits` bits and radius at most `2^(2-bits)`.
pub fn pi_ball(bits: u32) -> Result<Ball> {
    check_bits(bits as u64)?;
    let need = bits as u64 + 8;
    {
        let guard = STORE.read().unwrap_or_else(|e| e.into_inner());
        if let Some(store) = guard.as_ref().filter(|s| s.bits >= need) {
            return Ok(slice(store, need, bits));
        }
    }
    let mut guard = STORE.write().unwrap_or_else(|e| e.into_inner());
    let current = guard.as_ref().map_or(0, |s| s.bits);
    if current < need {
        let target = need.max(2 * current).max(512);
        *guard = Some(PiStore { bits: target, mid: chudnovsky(target) });
    }
    let store = guard.as_ref().expect("store populated above");
    Ok(slice(store, need, bits))
}

fn slice(store: &PiStore, need: u64, bits: u32) -> Ball {
    let drop = store.bits - need;
    let mid = &store.mid >> drop;
    // truncation adds at most one unit at `need`
    let rad = Mag::from_u64(STORE_ULPS, -(store.bits as i64)).add(Mag::pow2(-(need as i64)));
    Ball::with_radius(mid, -(need as i64), rad).round(bits)
}

/// Current number of cached bits (diagnostics).
pub fn cached_bits() -> u64 {
    STORE.read().unwrap_or_else(|e| e.into_inner()).as_ref().map_or(0, |s| s.bits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    #[test]
    fn encloses_known_rational_bounds() {
        // 3.14159265358979323846 < π < 3.14159265358979323847
        let lo = BigRational::new(314159265358979323846u128.into(), BigInt::from(10u8).pow(20));
        let hi = BigRational::new(314159265358979323847u128.into(), BigInt::from(10u8).pow(20));
        let pi = pi_ball(100).unwrap();
        let (a, b) = pi.bounds();
        assert!(a > lo && b < hi);
        assert!(pi.radius() <= Mag::pow2(-98));
    }

    #[test]
    fn small_slices_are_consistent() {
        let a = pi_ball(64).unwrap();
        let b = pi_ball(2000).unwrap();
        assert!(a.overlaps(&b));
        assert!(cached_bits() >= 2008);
    }
}
