//! Midpoint-radius balls over dyadic rationals.
//!
//! A [`Ball`] stands for the closed interval `[mid*2^exp - rad, mid*2^exp + rad]`.
//! Every operation returns a ball that contains the exact result for every
//! choice of points in the operand balls. The `prec` argument bounds the bit
//! length of the result midpoint; rounding error goes into the radius.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::decimal::{round_fraction_sig, HighPrecisionReal};
use super::mag::Mag;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Ball {
    mid: BigInt,
    exp: i64,
    rad: Mag,
}

/// An approximation together with a certified absolute error bound.
pub type ErrorBoundedValue = Ball;

/// `x * 2^e` as `f64`, saturating.
pub(crate) fn ldexp(mut x: f64, mut e: i64) -> f64 {
    while e > 1000 {
        x *= 2f64.powi(1000);
        e -= 1000;
        if x.is_infinite() {
            return x;
        }
    }
    while e < -1000 {
        x *= 2f64.powi(-1000);
        e += 1000;
        if x == 0.0 {
            return x;
        }
    }
    x * 2f64.powi(e as i32)
}

fn dyadic_fraction(m: &BigInt, e: i64) -> (BigInt, BigInt) {
    if e >= 0 {
        (m << e as u64, BigInt::one())
    } else {
        (m.clone(), BigInt::one() << e.unsigned_abs())
    }
}

fn mag_int(m: Mag) -> (BigInt, i64) {
    let (man, exp) = m.parts();
    (BigInt::from(man), exp)
}

impl Ball {
    pub fn zero() -> Ball {
        Ball { mid: BigInt::zero(), exp: 0, rad: Mag::ZERO }
    }

    pub fn exact_int(n: impl Into<BigInt>) -> Ball {
        Ball { mid: n.into(), exp: 0, rad: Mag::ZERO }
    }

    /// Exactly `mid * 2^exp`.
    pub fn dyadic(mid: BigInt, exp: i64) -> Ball {
        Ball { mid, exp, rad: Mag::ZERO }
    }

    pub fn with_radius(mid: BigInt, exp: i64, rad: Mag) -> Ball {
        Ball { mid, exp, rad }
    }

    /// Ball around `num / den`.
    pub fn from_fraction(num: &BigInt, den: &BigInt, prec: u32) -> Ball {
        assert!(!den.is_zero(), "zero denominator");
        let (num, den) = if den.is_negative() { (-num, -den) } else { (num.clone(), den.clone()) };
        if num.is_zero() {
            return Ball::zero();
        }
        let s = (den.bits() as i64 + prec as i64 + 2 - num.bits() as i64).max(0);
        let (q, r) = (num << s as u64).div_rem(&den);
        let rad = if r.is_zero() { Mag::ZERO } else { Mag::pow2(-s) };
        Ball { mid: q, exp: -s, rad }.round(prec)
    }

    pub fn from_ratio(x: &BigRational, prec: u32) -> Ball {
        Ball::from_fraction(x.numer(), x.denom(), prec)
    }

    pub fn from_decimal(x: &HighPrecisionReal, prec: u32) -> Ball {
        let (n, d) = x.to_fraction();
        Ball::from_fraction(&n, &d, prec)
    }

    /// Midpoint mantissa and exponent.
    pub fn mid(&self) -> (&BigInt, i64) {
        (&self.mid, self.exp)
    }

    pub fn radius(&self) -> Mag {
        self.rad
    }

    /// Certified absolute error bound; alias of [`Ball::radius`].
    pub fn abs_error(&self) -> Mag {
        self.rad
    }

    pub fn is_exact(&self) -> bool {
        self.rad.is_zero()
    }

    pub fn add_error(&self, err: Mag) -> Ball {
        Ball { mid: self.mid.clone(), exp: self.exp, rad: self.rad.add(err) }
    }

    /// `e` with `|mid| < 2^e`; `None` for a zero midpoint.
    pub fn mid_top(&self) -> Option<i64> {
        if self.mid.is_zero() {
            None
        } else {
            Some(self.exp + self.mid.bits() as i64)
        }
    }

    /// Rounds the midpoint to at most `prec` bits.
    pub fn round(mut self, prec: u32) -> Ball {
        let bits = self.mid.bits();
        if bits <= prec as u64 {
            return self;
        }
        let s = bits - prec as u64;
        if self.mid.trailing_zeros().is_some_and(|tz| tz >= s) {
            self.mid >>= s;
            self.exp += s as i64;
            return self;
        }
        let neg = self.mid.is_negative();
        let half = BigUint::one() << (s - 1);
        let q: BigUint = (self.mid.magnitude() + half) >> s;
        self.mid = BigInt::from(q);
        if neg {
            self.mid = -self.mid;
        }
        self.rad = self.rad.add(Mag::pow2(self.exp + s as i64 - 1));
        self.exp += s as i64;
        self
    }

    pub fn neg(&self) -> Ball {
        Ball { mid: -&self.mid, exp: self.exp, rad: self.rad }
    }

    pub fn abs(&self) -> Ball {
        Ball { mid: self.mid.abs(), exp: self.exp, rad: self.rad }
    }

    pub fn mul_2exp(&self, e: i64) -> Ball {
        Ball { mid: self.mid.clone(), exp: self.exp + e, rad: self.rad.mul_2exp(e) }
    }

    pub fn add(&self, other: &Ball, prec: u32) -> Ball {
        let rad = self.rad.add(other.rad);
        let (ta, tb) = match (self.mid_top(), other.mid_top()) {
            (_, None) => return Ball { rad, ..self.clone() }.round(prec),
            (None, _) => return Ball { rad, ..other.clone() }.round(prec),
            (Some(a), Some(b)) => (a, b),
        };
        let gap = prec as i64 + 16;
        if tb < ta - gap {
            return Ball { mid: self.mid.clone(), exp: self.exp, rad: rad.add(Mag::pow2(tb)) }.round(prec);
        }
        if ta < tb - gap {
            return Ball { mid: other.mid.clone(), exp: other.exp, rad: rad.add(Mag::pow2(ta)) }.round(prec);
        }
        let e = self.exp.min(other.exp);
        let mid = (&self.mid << (self.exp - e) as u64) + (&other.mid << (other.exp - e) as u64);
        Ball { mid, exp: e, rad }.round(prec)
    }

    pub fn sub(&self, other: &Ball, prec: u32) -> Ball {
        self.add(&other.neg(), prec)
    }

    fn mid_mag(&self) -> Mag {
        Mag::from_biguint(self.mid.magnitude(), self.exp)
    }

    pub fn mul(&self, other: &Ball, prec: u32) -> Ball {
        let mid = &self.mid * &other.mid;
        let rad = self
            .mid_mag()
            .mul(other.rad)
            .add(other.mid_mag().mul(self.rad))
            .add(self.rad.mul(other.rad));
        Ball { mid, exp: self.exp + other.exp, rad }.round(prec)
    }

    pub fn sqr(&self, prec: u32) -> Ball {
        self.mul(self, prec)
    }

    pub fn pow_u32(&self, k: u32, prec: u32) -> Ball {
        let work = prec + 2 * (32 - k.leading_zeros()) + 4;
        let mut result = Ball::exact_int(1);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = result.mul(&base, work);
            }
            k >>= 1;
            if k > 0 {
                base = base.sqr(work);
            }
        }
        result.round(prec)
    }

    /// `self / other`; `None` when `other` may be zero.
    pub fn div(&self, other: &Ball, prec: u32) -> Option<Ball> {
        if other.contains_zero() {
            return None;
        }
        if self.mid.is_zero() && self.rad.is_zero() {
            return Some(Ball::zero());
        }
        let s = (other.mid.bits() as i64 + prec as i64 + 2 - self.mid.bits() as i64).max(0);
        let (q, r) = (&self.mid << s as u64).div_rem(&other.mid);
        let qexp = self.exp - s - other.exp;
        let mut rad = if r.is_zero() { Mag::ZERO } else { Mag::pow2(qexp) };
        if !self.rad.is_zero() || !other.rad.is_zero() {
            let qmag = Mag::from_biguint(&(q.magnitude() + 1u8), qexp);
            let numer = self.rad.add(qmag.mul(other.rad));
            rad = rad.add(numer.div(other.abs_lower())?);
        }
        Some(Ball { mid: q, exp: qexp, rad }.round(prec))
    }

    pub fn recip(&self, prec: u32) -> Option<Ball> {
        Ball::exact_int(1).div(self, prec)
    }

    fn endpoint(&self, upper: bool) -> (BigInt, i64) {
        if self.rad.is_zero() {
            return (self.mid.clone(), self.exp);
        }
        let (rm, re) = mag_int(self.rad);
        let e = self.exp.min(re);
        let m = &self.mid << (self.exp - e) as u64;
        let r = rm << (re - e) as u64;
        (if upper { m + r } else { m - r }, e)
    }

    /// Exact lower endpoint as `(mantissa, exp)`.
    pub fn lower(&self) -> (BigInt, i64) {
        self.endpoint(false)
    }

    /// Exact upper endpoint as `(mantissa, exp)`.
    pub fn upper(&self) -> (BigInt, i64) {
        self.endpoint(true)
    }

    /// Both endpoints as exact rationals.
    pub fn bounds(&self) -> (BigRational, BigRational) {
        let to_ratio = |(m, e): (BigInt, i64)| {
            let (n, d) = dyadic_fraction(&m, e);
            BigRational::new(n, d)
        };
        (to_ratio(self.lower()), to_ratio(self.upper()))
    }

    pub fn contains_zero(&self) -> bool {
        !self.lower().0.is_positive() && !self.upper().0.is_negative()
    }

    /// Certainly strictly positive.
    pub fn is_positive(&self) -> bool {
        self.lower().0.is_positive()
    }

    /// Certainly strictly negative.
    pub fn is_negative(&self) -> bool {
        self.upper().0.is_negative()
    }

    /// Lower bound for `|x|` over the ball (zero if the ball touches zero).
    pub fn abs_lower(&self) -> Mag {
        if self.mid.is_zero() {
            return Mag::ZERO;
        }
        let (rm, re) = mag_int(self.rad);
        let e = self.exp.min(re);
        let m = BigInt::from(self.mid.magnitude().clone()) << (self.exp - e) as u64;
        let r = rm << (re - e) as u64;
        let d = m - r;
        if d.is_positive() {
            Mag::from_biguint_down(d.magnitude(), e)
        } else {
            Mag::ZERO
        }
    }

    /// Upper bound for `|x|` over the ball.
    pub fn abs_upper(&self) -> Mag {
        self.mid_mag().add(self.rad)
    }

    /// Orders the ball against a rational; `None` when `x` lies inside the ball.
    pub fn cmp_ratio(&self, x: &BigRational) -> Option<Ordering> {
        let cmp_point = |(m, e): (BigInt, i64)| {
            let (n, d) = dyadic_fraction(&m, e);
            (n * x.denom()).cmp(&(x.numer() * d))
        };
        let lo = cmp_point(self.lower());
        if lo == Ordering::Greater {
            return Some(Ordering::Greater);
        }
        let hi = cmp_point(self.upper());
        match (lo, hi) {
            (_, Ordering::Less) => Some(Ordering::Less),
            (Ordering::Equal, Ordering::Equal) => Some(Ordering::Equal),
            _ => None,
        }
    }

    pub fn contains_ratio(&self, x: &BigRational) -> bool {
        let (lo, hi) = self.bounds();
        &lo <= x && x <= &hi
    }

    /// Whether `other` lies entirely inside `self`.
    pub fn contains(&self, other: &Ball) -> bool {
        let (a, b) = self.bounds();
        let (c, d) = other.bounds();
        a <= c && d <= b
    }

    pub fn overlaps(&self, other: &Ball) -> bool {
        let (a, b) = self.bounds();
        let (c, d) = other.bounds();
        a <= d && c <= b
    }

    /// Midpoint as `f64` (approximate).
    pub fn to_f64(&self) -> f64 {
        if self.mid.is_zero() {
            return 0.0;
        }
        let bits = self.mid.bits();
        let shift = bits.saturating_sub(60);
        let top = (&self.mid >> shift).to_f64().unwrap_or(0.0);
        ldexp(top, self.exp + shift as i64)
    }

    /// Number of leading significant decimal digits guaranteed by the radius:
    /// the largest `d` with `rad <= 10^-d * min|x|`. `None` for an exact value.
    pub fn certified_digits(&self) -> Option<u32> {
        if self.rad.is_zero() {
            return None;
        }
        let lower = self.abs_lower();
        if lower.is_zero() {
            return Some(0);
        }
        let rel = (self.rad.log2() - lower.log2()) * std::f64::consts::LOG10_2;
        Some((-rel - 1e-9).floor().max(0.0) as u32)
    }

    /// Relative error bound `rad / min|x|` as an upper bound; `None` if the ball touches zero.
    pub fn rel_error(&self) -> Option<Mag> {
        self.rad.div(self.abs_lower())
    }

    /// The value rounded to `digits` significant decimal digits, if every point of
    /// the ball rounds to the same result.
    pub fn round_sig(&self, digits: u32) -> Option<HighPrecisionReal> {
        assert!(digits >= 1);
        if self.contains_zero() {
            return None;
        }
        let (lm, le) = self.lower();
        let (ln, ld) = dyadic_fraction(&lm, le);
        let lo = round_fraction_sig(&ln, &ld, digits);
        if self.rad.is_zero() {
            return Some(HighPrecisionReal::new(lo.0, lo.1, digits));
        }
        let (um, ue) = self.upper();
        let (un, ud) = dyadic_fraction(&um, ue);
        let hi = round_fraction_sig(&un, &ud, digits);
        (lo == hi).then(|| HighPrecisionReal::new(lo.0, lo.1, digits))
    }

    /// Midpoint rounded to `digits` significant digits (not certified).
    pub fn to_decimal(&self, digits: u32) -> HighPrecisionReal {
        if self.mid.is_zero() {
            return HighPrecisionReal::new(BigInt::zero(), 0, digits);
        }
        let (n, d) = dyadic_fraction(&self.mid, self.exp);
        let (m, e) = round_fraction_sig(&n, &d, digits);
        HighPrecisionReal::new(m, e, digits)
    }
}

impl From<i64> for Ball {
    fn from(n: i64) -> Ball {
        Ball::exact_int(n)
    }
}

impl From<&BigUint> for Ball {
    fn from(n: &BigUint) -> Ball {
        Ball::exact_int(BigInt::from(n.clone()))
    }
}

impl fmt::Debug for Ball {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{} +/- {:.3e}]", self.to_decimal(20), self.rad.to_f64())
    }
}

impl fmt::Display for Ball {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = self.certified_digits().unwrap_or(20).clamp(1, 40);
        write!(f, "{}", self.to_decimal(digits))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ratio(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn fraction_enclosure() {
        let third = Ball::from_fraction(&1.into(), &3.into(), 100);
        assert!(third.contains_ratio(&ratio(1, 3)));
        assert!(third.radius() <= Mag::pow2(-100));
        assert_eq!(third.round_sig(10).unwrap().to_string(), "0.3333333333");
        let exact = Ball::from_fraction(&3.into(), &8.into(), 10);
        assert!(exact.is_exact());
    }

    #[test]
    fn arithmetic_encloses_exact_results() {
        let p = 120;
        let a = Ball::from_fraction(&2.into(), &7.into(), p);
        let b = Ball::from_fraction(&(-5).into(), &11.into(), p);
        assert!(a.add(&b, p).contains_ratio(&(ratio(2, 7) + ratio(-5, 11))));
        assert!(a.sub(&b, p).contains_ratio(&(ratio(2, 7) - ratio(-5, 11))));
        assert!(a.mul(&b, p).contains_ratio(&(ratio(2, 7) * ratio(-5, 11))));
        assert!(a.div(&b, p).unwrap().contains_ratio(&(ratio(2, 7) / ratio(-5, 11))));
        assert!(a.pow_u32(5, p).contains_ratio(&num_traits::pow(ratio(2, 7), 5)));
        assert!(a.div(&Ball::zero(), p).is_none());
    }

    #[test]
    fn negligible_addend_goes_to_radius() {
        let big = Ball::exact_int(1);
        let tiny = Ball::dyadic(BigInt::from(3), -500);
        let s = big.add(&tiny, 64);
        assert!(s.contains_ratio(&(ratio(1, 1) + BigRational::new(3.into(), BigInt::one() << 500u32))));
        assert!(s.radius() <= Mag::pow2(-400));
    }

    #[test]
    fn comparisons() {
        let x = Ball::with_radius(BigInt::from(3), 0, Mag::pow2(-4));
        assert_eq!(x.cmp_ratio(&ratio(2, 1)), Some(Ordering::Greater));
        assert_eq!(x.cmp_ratio(&ratio(4, 1)), Some(Ordering::Less));
        assert_eq!(x.cmp_ratio(&ratio(3, 1)), None);
        assert!(x.is_positive());
        assert!(!x.contains_zero());
        assert_eq!(x.certified_digits(), Some(1));
        let near_zero = Ball::with_radius(BigInt::from(1), -10, Mag::pow2(-9));
        assert!(near_zero.contains_zero());
        assert!(near_zero.round_sig(1).is_none());
    }

    #[test]
    fn round_sig_refuses_straddling_balls() {
        // 0.15 +/- 2^-20 straddles the 1-digit rounding boundary at 0.15
        let x = Ball::from_fraction(&15.into(), &100.into(), 60).add_error(Mag::pow2(-20));
        assert!(x.round_sig(1).is_none());
        assert_eq!(x.round_sig(1), None);
        assert!(x.round_sig(2).is_some());
    }
}
