//! Decimal scaled-integer reals.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::error::Error;

/// A decimal number `mantissa * 10^exp10` carried to `digits` significant digits.
///
/// The value itself is exact; `digits` records how many leading digits the
/// producer vouches for.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HighPrecisionReal {
    mantissa: BigInt,
    exp10: i64,
    digits: u32,
}

pub(crate) fn pow10(k: u64) -> BigInt {
    num_traits::pow(BigInt::from(10u8), k as usize)
}

impl HighPrecisionReal {
    pub fn new(mantissa: BigInt, exp10: i64, digits: u32) -> Self {
        HighPrecisionReal { mantissa, exp10, digits }
    }

    /// An exact integer, carrying as many digits as it has.
    pub fn from_integer(n: impl Into<BigInt>) -> Self {
        let n: BigInt = n.into();
        let digits = if n.is_zero() { 1 } else { n.abs().to_string().len() as u32 };
        HighPrecisionReal { mantissa: n, exp10: 0, digits }
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mantissa
    }

    pub fn exp10(&self) -> i64 {
        self.exp10
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mantissa.is_negative()
    }

    /// Value as `(numerator, denominator)` with a positive denominator.
    pub fn to_fraction(&self) -> (BigInt, BigInt) {
        if self.exp10 >= 0 {
            (&self.mantissa * pow10(self.exp10 as u64), BigInt::from(1u8))
        } else {
            (self.mantissa.clone(), pow10(self.exp10.unsigned_abs()))
        }
    }

    /// Nearest `f64`, adequate for diagnostics and plotting.
    pub fn to_f64(&self) -> f64 {
        self.to_string().parse().unwrap_or(f64::NAN)
    }

    /// Decimal exponent of the leading digit, `floor(log10 |x|)`.
    pub fn leading_exp10(&self) -> i64 {
        if self.mantissa.is_zero() {
            return 0;
        }
        self.exp10 + self.mantissa.abs().to_string().len() as i64 - 1
    }
}

/// Rounds `num / den` (den > 0) to the nearest integer, ties away from zero.
pub(crate) fn round_div(num: &BigInt, den: &BigInt) -> BigInt {
    let two_num: BigInt = num.abs() << 1u32;
    let q = (two_num + den).div_floor(&(den << 1u32));
    if num.is_negative() {
        -q
    } else {
        q
    }
}

/// Rounds the exact fraction `num / den` (den > 0, num != 0) to `digits` significant
/// decimal digits, returning `(mantissa, exp10)`.
pub(crate) fn round_fraction_sig(num: &BigInt, den: &BigInt, digits: u32) -> (BigInt, i64) {
    debug_assert!(!num.is_zero() && den.is_positive());
    // log10 estimate from bit lengths, corrected below
    let est = (num.bits() as f64 - den.bits() as f64) * std::f64::consts::LOG10_2;
    let mut lead = est.floor() as i64;
    let lo = pow10(digits as u64 - 1);
    let hi = pow10(digits as u64);
    loop {
        let scale = digits as i64 - 1 - lead;
        let (n, d) = if scale >= 0 {
            (num * pow10(scale as u64), den.clone())
        } else {
            (num.clone(), den * pow10(scale.unsigned_abs()))
        };
        let q = round_div(&n, &d);
        let a = q.abs();
        if a >= hi {
            lead += 1;
        } else if a < lo {
            lead -= 1;
        } else {
            return (q, -scale);
        }
    }
}

impl fmt::Display for HighPrecisionReal {
    /// Plain positional notation for moderate magnitudes, scientific otherwise.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.mantissa.is_zero() {
            return f.write_str("0");
        }
        let sign = if self.mantissa.is_negative() { "-" } else { "" };
        let ds = self.mantissa.abs().to_string();
        let lead = self.leading_exp10();
        if (-7..21).contains(&lead) {
            let point = ds.len() as i64 + self.exp10; // digits before the decimal point
            let body = if point <= 0 {
                format!("0.{}{}", "0".repeat((-point) as usize), ds)
            } else if point as usize >= ds.len() {
                format!("{}{}", ds, "0".repeat(point as usize - ds.len()))
            } else {
                format!("{}.{}", &ds[..point as usize], &ds[point as usize..])
            };
            write!(f, "{sign}{body}")
        } else {
            let (head, tail) = ds.split_at(1);
            if tail.is_empty() {
                write!(f, "{sign}{head}e{lead}")
            } else {
                write!(f, "{sign}{head}.{tail}e{lead}")
            }
        }
    }
}

impl FromStr for HighPrecisionReal {
    type Err = Error;

    /// Parses `[-+]digits[.digits][e[-+]digits]`; `digits` counts significant digits written.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || Error::InvalidArgument(format!("not a decimal number: {s:?}"));
        let t = s.trim();
        let (body, exp) = match t.find(['e', 'E']) {
            Some(i) => (&t[..i], t[i + 1..].parse::<i64>().map_err(|_| bad())?),
            None => (t, 0),
        };
        let (neg, body) = match body.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, body.strip_prefix('+').unwrap_or(body)),
        };
        let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(bad());
        }
        if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let all = format!("{int_part}{frac_part}");
        let mag = BigInt::parse_bytes(all.as_bytes(), 10).ok_or_else(bad)?;
        let sig = all.trim_start_matches('0').len().max(1) as u32;
        let mantissa = if neg { -mag } else { mag };
        Ok(HighPrecisionReal {
            mantissa,
            exp10: exp - frac_part.len() as i64,
            digits: sig,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hpr(m: i64, e: i64) -> HighPrecisionReal {
        HighPrecisionReal::new(BigInt::from(m), e, 1)
    }

    #[test]
    fn display_forms() {
        assert_eq!(hpr(3141592654, -9).to_string(), "3.141592654");
        assert_eq!(hpr(-3014435336, -14).to_string(), "-0.00003014435336");
        assert_eq!(hpr(1479809109, -19).to_string(), "1.479809109e-10");
        assert_eq!(hpr(25, 3).to_string(), "25000");
        assert_eq!(hpr(7, 30).to_string(), "7e30");
        assert_eq!(hpr(0, 5).to_string(), "0");
    }

    #[test]
    fn parse_roundtrip() {
        for s in ["3.141592654", "-0.00003014435336", "1.479809109e-10", "25000", "0.5"] {
            let x: HighPrecisionReal = s.parse().unwrap();
            assert_eq!(x.to_string(), s);
        }
        let x: HighPrecisionReal = "0.00120".parse().unwrap();
        assert_eq!(x.digits(), 3);
        assert!("1.2.3".parse::<HighPrecisionReal>().is_err());
        assert!("".parse::<HighPrecisionReal>().is_err());
    }

    #[test]
    fn sig_rounding() {
        let (m, e) = round_fraction_sig(&BigInt::from(22), &BigInt::from(7), 5);
        assert_eq!((m, e), (BigInt::from(31429), -4));
        let (m, e) = round_fraction_sig(&BigInt::from(99996), &BigInt::from(10), 4);
        assert_eq!((m, e), (BigInt::from(1000), 1));
        let (m, e) = round_fraction_sig(&BigInt::from(-1), &BigInt::from(3000), 2);
        assert_eq!((m, e), (BigInt::from(-33), -5));
    }
}
