//! Unsigned upper bounds with a short mantissa, used as ball radii.
//!
//! A [`Mag`] is `man * 2^exp` with `man` held to [`MAG_BITS`] bits. Every
//! constructor and operation rounds away from zero unless the name says
//! `down`, so a `Mag` produced by arithmetic on upper bounds is still an upper
//! bound.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigUint;

const MAG_BITS: u32 = 30;

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Mag {
    man: u64,
    exp: i64,
}

#[allow(clippy::should_implement_trait)]
impl Mag {
    pub const ZERO: Mag = Mag { man: 0, exp: 0 };

    fn normalize(man: u128, exp: i64, round_up: bool) -> Mag {
        if man == 0 {
            return Mag::ZERO;
        }
        let bits = 128 - man.leading_zeros();
        if bits > MAG_BITS {
            let shift = bits - MAG_BITS;
            let lost = man & ((1u128 << shift) - 1) != 0;
            let mut m = man >> shift;
            let mut e = exp + shift as i64;
            if lost && round_up {
                m += 1;
                if m == 1u128 << MAG_BITS {
                    m >>= 1;
                    e += 1;
                }
            }
            Mag { man: m as u64, exp: e }
        } else {
            let shift = MAG_BITS - bits;
            Mag {
                man: (man << shift) as u64,
                exp: exp - shift as i64,
            }
        }
    }

    /// Upper bound for `n * 2^exp`.
    pub fn from_biguint(n: &BigUint, exp: i64) -> Mag {
        Self::from_biguint_rounded(n, exp, true)
    }

    /// Lower bound for `n * 2^exp`.
    pub fn from_biguint_down(n: &BigUint, exp: i64) -> Mag {
        Self::from_biguint_rounded(n, exp, false)
    }

    fn from_biguint_rounded(n: &BigUint, exp: i64, up: bool) -> Mag {
        let bits = n.bits();
        if bits <= 120 {
            let v = n.iter_u64_digits().rev().fold(0u128, |acc, d| (acc << 64) | d as u128);
            return Self::normalize(v, exp, up);
        }
        let shift = bits - 64;
        let top: BigUint = n >> shift;
        let lost = n.trailing_zeros().is_some_and(|tz| tz < shift);
        let top = top.iter_u64_digits().next().unwrap_or(0) as u128;
        Self::normalize((top << 1) | lost as u128, exp + shift as i64 - 1, up)
    }

    pub fn from_u64(n: u64, exp: i64) -> Mag {
        Self::normalize(n as u128, exp, true)
    }

    /// Exactly `2^exp`.
    pub fn pow2(exp: i64) -> Mag {
        Mag {
            man: 1 << (MAG_BITS - 1),
            exp: exp - (MAG_BITS as i64 - 1),
        }
    }

    /// Upper bound for a nonnegative finite `f64`.
    pub fn from_f64(x: f64) -> Mag {
        assert!(x >= 0.0 && x.is_finite(), "Mag::from_f64 needs a finite nonnegative value");
        if x == 0.0 {
            return Mag::ZERO;
        }
        let bits = x.to_bits();
        let raw_exp = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (man, exp) = if raw_exp == 0 {
            (frac, -1074)
        } else {
            (frac | (1u64 << 52), raw_exp - 1075)
        };
        Self::normalize(man as u128, exp, true)
    }

    pub fn is_zero(self) -> bool {
        self.man == 0
    }

    pub fn add(self, other: Mag) -> Mag {
        if self.is_zero() {
            return other;
        }
        if other.is_zero() {
            return self;
        }
        let (hi, lo) = if self.exp >= other.exp { (self, other) } else { (other, self) };
        let d = (hi.exp - lo.exp) as u64;
        if d > 62 {
            // lo < 2^(hi.exp - 2), absorbed by one extra unit two bits down
            return Self::normalize(((hi.man as u128) << 2) | 1, hi.exp - 2, true);
        }
        Self::normalize(((hi.man as u128) << d) + lo.man as u128, lo.exp, true)
    }

    pub fn mul(self, other: Mag) -> Mag {
        if self.is_zero() || other.is_zero() {
            return Mag::ZERO;
        }
        Self::normalize(self.man as u128 * other.man as u128, self.exp + other.exp, true)
    }

    pub fn mul_u64(self, k: u64) -> Mag {
        self.mul(Mag::from_u64(k, 0))
    }

    pub fn mul_2exp(self, e: i64) -> Mag {
        if self.is_zero() {
            self
        } else {
            Mag { man: self.man, exp: self.exp + e }
        }
    }

    /// Upper bound for `self / lower`, where `lower` is a lower bound of the divisor.
    /// Returns `None` when the divisor bound is zero.
    pub fn div(self, lower: Mag) -> Option<Mag> {
        if lower.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Mag::ZERO);
        }
        let q = ((self.man as u128) << 64) / lower.man as u128 + 1;
        Some(Self::normalize(q, self.exp - 64 - lower.exp, true))
    }

    /// Approximate base-2 logarithm (exact to a few ulps of `f64`). `-inf` for zero.
    pub fn log2(self) -> f64 {
        if self.is_zero() {
            f64::NEG_INFINITY
        } else {
            (self.man as f64).log2() + self.exp as f64
        }
    }

    /// Approximate value; saturates to `inf` / `0` outside the `f64` range.
    pub fn to_f64(self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let e = self.exp.clamp(-2000, 2000) as i32;
        (self.man as f64) * 2f64.powi(e)
    }

    /// Exponent `e` with `self < 2^e`.
    pub fn exp_upper(self) -> i64 {
        self.exp + MAG_BITS as i64
    }

    /// Mantissa and binary exponent: the bound equals `man * 2^exp`.
    pub fn parts(self) -> (u64, i64) {
        (self.man, self.exp)
    }
}

impl Ord for Mag {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.is_zero(), other.is_zero()) {
            (true, true) => Ordering::Equal,
            (true, false) => Ordering::Less,
            (false, true) => Ordering::Greater,
            // normalized mantissas share a bit length
            (false, false) => self.exp.cmp(&other.exp).then(self.man.cmp(&other.man)),
        }
    }
}

impl PartialOrd for Mag {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Mag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Mag({}*2^{} ~ {:e})", self.man, self.exp, self.to_f64())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_rounds_up() {
        let third = Mag::from_u64(1, 0).div(Mag::from_u64(3, 0)).unwrap();
        assert!(third.to_f64() >= 1.0 / 3.0);
        assert!(third.to_f64() < 1.0 / 3.0 * (1.0 + 1e-8));
        let s = Mag::from_u64(3, 0).add(Mag::pow2(-200));
        assert!(s > Mag::from_u64(3, 0));
        let p = Mag::from_u64((1 << 31) + 1, 0).mul(Mag::from_u64((1 << 31) + 1, 0));
        assert!(p.to_f64() >= ((1u128 << 31) + 1).pow(2) as f64);
    }

    #[test]
    fn ordering_and_bigs() {
        let big = BigUint::from(1u8) << 500usize;
        let up = Mag::from_biguint(&(&big + 1u8), 0);
        let down = Mag::from_biguint_down(&(&big + 1u8), 0);
        assert!(down <= up);
        assert_eq!(down, Mag::pow2(500));
        assert!(up > Mag::pow2(500));
        assert!(Mag::ZERO < Mag::pow2(-10_000));
        assert_eq!(Mag::from_f64(0.5), Mag::pow2(-1));
    }
}
