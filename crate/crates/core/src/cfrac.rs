//! Certified continued fractions, convergents and irrationality-exponent witnesses.
//!
//! Quotients are emitted only while both endpoints of the input interval agree
//! on them. Each step of the expansion is monotone on the interval, so every
//! point in between shares the emitted prefix.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::mpcore::elementary::ln;
use crate::mpcore::{bits_for_digits, check_bits, ladder, pi_ball, Ball, Mag};

/// Something that can be enclosed in a ball at a requested precision.
pub trait RealSource {
    fn enclose(&self, prec: u32) -> Result<Ball>;

    /// The exact value, when it is a known rational.
    fn as_rational(&self) -> Option<BigRational> {
        None
    }
}

/// π at any precision, from the shared cache.
#[derive(Clone, Copy, Debug, Default)]
pub struct Pi;

impl RealSource for Pi {
    fn enclose(&self, prec: u32) -> Result<Ball> {
        pi_ball(prec)
    }
}

/// A fixed ball; its precision does not improve on request.
impl RealSource for Ball {
    fn enclose(&self, _prec: u32) -> Result<Ball> {
        Ok(self.clone())
    }

    fn as_rational(&self) -> Option<BigRational> {
        self.is_exact().then(|| self.bounds().0)
    }
}

/// An exact rational.
impl RealSource for BigRational {
    fn enclose(&self, prec: u32) -> Result<Ball> {
        Ok(Ball::from_ratio(self, prec))
    }

    fn as_rational(&self) -> Option<BigRational> {
        Some(self.clone())
    }
}

/// Why an expansion stopped.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Termination {
    /// The input is an exact rational and its expansion is complete.
    Complete,
    /// `max_terms` quotients were produced.
    MaxTerms,
    /// The input interval no longer determines the next quotient.
    PrecisionExhausted,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CFExpansion {
    partial_quotients: Vec<BigInt>,
    termination: Termination,
}

impl CFExpansion {
    /// `[a0; a1, a2, ...]`, all certified.
    pub fn partial_quotients(&self) -> &[BigInt] {
        &self.partial_quotients
    }

    pub fn certified_count(&self) -> usize {
        self.partial_quotients.len()
    }

    pub fn termination(&self) -> Termination {
        self.termination
    }

    pub fn is_exhausted(&self) -> bool {
        self.termination == Termination::PrecisionExhausted
    }

    /// Builds an expansion from known quotients (no certification implied).
    pub fn from_quotients(quotients: Vec<BigInt>) -> Result<CFExpansion> {
        if quotients.iter().skip(1).any(|a| a < &BigInt::one()) {
            return Err(Error::InvalidArgument("partial quotients after a0 must be >= 1".into()));
        }
        Ok(CFExpansion { partial_quotients: quotients, termination: Termination::Complete })
    }

    /// The value of the quotient list as an exact fraction, folded from the back.
    pub fn fold(&self) -> Option<BigRational> {
        let (last, rest) = self.partial_quotients.split_last()?;
        let mut acc = BigRational::from_integer(last.clone());
        for a in rest.iter().rev() {
            acc = BigRational::from_integer(a.clone()) + acc.recip();
        }
        Some(acc)
    }
}

/// Interval endpoint `num/den` with `den > 0`.
#[derive(Clone)]
struct Frac {
    num: BigInt,
    den: BigInt,
}

impl Frac {
    fn new(num: BigInt, den: BigInt) -> Frac {
        if den.is_negative() {
            Frac { num: -num, den: -den }
        } else {
            Frac { num, den }
        }
    }

    fn floor(&self) -> BigInt {
        self.num.div_floor(&self.den)
    }

    /// `1 / (self - a)`, or `None` when `self == a`.
    fn step(&self, a: &BigInt) -> Option<Frac> {
        let rem = &self.num - a * &self.den;
        (!rem.is_zero()).then(|| Frac::new(self.den.clone(), rem))
    }

    fn same(&self, other: &Frac) -> bool {
        &self.num * &other.den == &other.num * &self.den
    }
}

/// Drops a trailing quotient 1 into its predecessor: `[..., a, 1] = [..., a+1]`.
fn normalize_tail(q: &mut Vec<BigInt>) {
    if q.len() > 1 && q.last().is_some_and(|a| a.is_one()) {
        q.pop();
        if let Some(a) = q.last_mut() {
            *a += 1;
        }
    }
}

/// Expands every real in `[lo, hi]` simultaneously.
pub fn expand_interval(lo: &BigRational, hi: &BigRational, max_terms: usize) -> Result<CFExpansion> {
    if lo > hi {
        return Err(Error::InvalidArgument("empty interval".into()));
    }
    if lo.floor() != hi.floor() {
        return Err(Error::InvalidArgument(
            "interval does not determine the integer part".into(),
        ));
    }
    let mut a = Frac::new(lo.numer().clone(), lo.denom().clone());
    let mut b = Frac::new(hi.numer().clone(), hi.denom().clone());
    let exact = a.same(&b);
    let mut quotients = Vec::new();
    let termination = loop {
        if quotients.len() >= max_terms {
            break Termination::MaxTerms;
        }
        let qa = a.floor();
        if qa != b.floor() {
            break Termination::PrecisionExhausted;
        }
        let (na, nb) = (a.step(&qa), b.step(&qa));
        quotients.push(qa);
        match (na, nb) {
            (None, None) if exact => {
                normalize_tail(&mut quotients);
                break Termination::Complete;
            }
            // the map x -> 1/(x - a) reverses order
            (Some(na), Some(nb)) => {
                a = nb;
                b = na;
            }
            _ => break Termination::PrecisionExhausted,
        }
    };
    Ok(CFExpansion { partial_quotients: quotients, termination })
}

/// Certified expansion of the real enclosed by `x`.
pub fn expand(x: &Ball, max_terms: usize) -> Result<CFExpansion> {
    let (lo, hi) = x.bounds();
    expand_interval(&lo, &hi, max_terms)
}

/// Complete expansion of an exact rational (capped at `max_terms`).
pub fn expand_rational(x: &BigRational, max_terms: usize) -> CFExpansion {
    expand_interval(x, x, max_terms).expect("a point interval always determines a0")
}

/// One convergent `p/q` of a continued fraction.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Convergent {
    pub index: usize,
    pub p: BigInt,
    pub q: BigUint,
}

impl Convergent {
    pub fn to_ratio(&self) -> BigRational {
        BigRational::new(self.p.clone(), BigInt::from(self.q.clone()))
    }
}

/// Convergents by the three-term recurrence, one per quotient.
pub fn convergents(expansion: &CFExpansion) -> Vec<Convergent> {
    let (mut p_prev, mut p) = (BigInt::zero(), BigInt::one());
    let (mut q_prev, mut q) = (BigInt::one(), BigInt::zero());
    expansion
        .partial_quotients()
        .iter()
        .enumerate()
        .map(|(index, a)| {
            let p_next = a * &p + &p_prev;
            let q_next = a * &q + &q_prev;
            p_prev = std::mem::replace(&mut p, p_next);
            q_prev = std::mem::replace(&mut q, q_next);
            Convergent {
                index,
                p: p.clone(),
                q: q.to_biguint().expect("denominators are positive"),
            }
        })
        .collect()
}

/// How many convergents to produce.
#[derive(Clone, Debug)]
pub enum ConvergentBound {
    Count(usize),
    /// All convergents with `q <= max_q`.
    MaxQ(BigUint),
}

/// Certified convergents of `x`, refining the enclosure until the bound is met.
///
/// For an exact rational the list may end early, once the expansion is complete.
pub fn certified_convergents(x: &dyn RealSource, bound: &ConvergentBound) -> Result<Vec<Convergent>> {
    let mut prec = match bound {
        // quotients of a typical real cost about 3.4 bits each
        ConvergentBound::Count(k) => ladder(4 * *k as u64 + 64),
        ConvergentBound::MaxQ(q) => ladder(3 * q.bits() + 64),
    };
    let mut last_radius = None;
    loop {
        check_bits(prec as u64)?;
        let ball = x.enclose(prec)?;
        let max_terms = match bound {
            ConvergentBound::Count(k) => *k,
            ConvergentBound::MaxQ(_) => usize::MAX,
        };
        let exp = expand(&ball, max_terms)?;
        let convs = convergents(&exp);
        let done = match bound {
            ConvergentBound::Count(k) => convs.len() >= *k,
            ConvergentBound::MaxQ(q) => convs.last().is_some_and(|c| &c.q > q),
        };
        if done || exp.termination() == Termination::Complete {
            return Ok(match bound {
                ConvergentBound::Count(_) => convs,
                ConvergentBound::MaxQ(q) => convs.into_iter().filter(|c| &c.q <= q).collect(),
            });
        }
        if last_radius == Some(ball.radius()) {
            return Err(Error::InvalidArgument(format!(
                "input precision exhausted after {} quotients",
                exp.certified_count()
            )));
        }
        last_radius = Some(ball.radius());
        prec = prec.saturating_mul(2);
    }
}

/// `|x - p/q| = q^-delta` for one convergent.
#[derive(Clone, Debug)]
pub struct ExponentWitness {
    pub convergent: Convergent,
    pub delta: Ball,
    /// `|x - p/q|`.
    pub residual: Ball,
}

/// Default number of significant digits reported for `delta`.
pub const DELTA_DIGITS: u32 = 6;

/// Certifies `|x - p/q|` and the exponent `delta = -ln|x - p/q| / ln q` to `target_digits`.
pub fn exponent_witness(x: &dyn RealSource, c: &Convergent, target_digits: u32) -> Result<ExponentWitness> {
    if c.q < BigUint::from(2u8) {
        return Err(Error::InvalidArgument("witness needs q >= 2 (ln q = 0 otherwise)".into()));
    }
    let qbits = c.q.bits();
    let q = BigInt::from(c.q.clone());
    if x.as_rational().is_some_and(|r| r == c.to_ratio()) {
        return Err(Error::Domain("x equals the convergent; no witness exists".into()));
    }
    let mut prec = ladder(bits_for_digits(target_digits as u64 + 4) + 2 * qbits + 32);
    let mut last_radius = None;
    loop {
        check_bits(prec as u64)?;
        let work = prec + 4 * qbits as u32 + 32;
        let xb = x.enclose(work)?;
        let pq = Ball::from_fraction(&c.p, &q, work);
        let diff = xb.sub(&pq, work);
        if !diff.contains_zero() {
            let residual = diff.abs();
            let ln_r = ln(&residual, prec)?;
            let ln_q = ln(&Ball::exact_int(q.clone()), prec)?;
            if let Some(delta) = ln_r.div(&ln_q, prec).map(|d| d.neg()) {
                let rel = Mag::pow2(-(bits_for_digits(target_digits as u64) as i64) - 1);
                let good = |b: &Ball| b.rel_error().is_some_and(|e| e <= rel);
                if good(&residual) && good(&delta) {
                    return Ok(ExponentWitness { convergent: c.clone(), delta, residual });
                }
            }
        }
        if last_radius == Some(xb.radius()) {
            return Err(Error::InvalidArgument("input precision too low for this witness".into()));
        }
        last_radius = Some(xb.radius());
        prec = prec.saturating_mul(2);
    }
}

/// Largest witness exponent among convergents with `2 <= q <= max_q`.
///
/// An empirical statistic of how well `x` is approximated up to `max_q`; it is
/// neither an upper nor a lower bound on the irrationality measure.
#[derive(Clone, Debug)]
pub struct MuScan {
    pub max_delta: Ball,
    pub argmax: Convergent,
    pub witnesses: Vec<ExponentWitness>,
}

pub fn mu_witness_scan(x: &dyn RealSource, max_q: &BigUint) -> Result<MuScan> {
    let convs = certified_convergents(x, &ConvergentBound::MaxQ(max_q.clone()))?;
    let two = BigUint::from(2u8);
    let witnesses = convs
        .iter()
        .filter(|c| c.q >= two)
        .map(|c| exponent_witness(x, c, 10))
        .collect::<Result<Vec<_>>>()?;
    let best = witnesses
        .iter()
        .fold(None::<&ExponentWitness>, |best, w| match best {
            Some(b) if b.delta.to_f64() >= w.delta.to_f64() => Some(b),
            _ => Some(w),
        })
        .ok_or_else(|| Error::InvalidArgument(format!("no convergent with 2 <= q <= {max_q}")))?;
    Ok(MuScan {
        max_delta: best.delta.clone(),
        argmax: best.convergent.clone(),
        witnesses: witnesses.clone(),
    })
}

/// `|q x - p|` as `f64` for quick diagnostics.
pub fn approximation_gap(x: &dyn RealSource, c: &Convergent) -> Result<f64> {
    let qb = Ball::exact_int(BigInt::from(c.q.clone()));
    let prec = 64 + 2 * c.q.bits() as u32;
    let v = x.enclose(prec)?.mul(&qb, prec).sub(&Ball::exact_int(c.p.clone()), prec);
    Ok(v.to_f64().abs())
}

impl std::fmt::Display for Convergent {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}", self.p, self.q)
    }
}

/// Convenience: `q` as `f64`.
pub fn q_f64(c: &Convergent) -> f64 {
    c.q.to_f64().unwrap_or(f64::INFINITY)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mpcore::pi_ball;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&a| BigInt::from(a)).collect()
    }

    #[test]
    fn pi_at_50_digits() {
        let pi = pi_ball(170).unwrap();
        let e = expand(&pi, 10).unwrap();
        assert_eq!(e.partial_quotients(), ints(&[3, 7, 15, 1, 292, 1, 1, 1, 2, 1]).as_slice());
        assert_eq!(e.termination(), Termination::MaxTerms);
    }

    #[test]
    fn exact_rational_terminates() {
        let e = expand_rational(&BigRational::new(22.into(), 7.into()), 5);
        assert_eq!(e.partial_quotients(), ints(&[3, 7]).as_slice());
        assert_eq!(e.termination(), Termination::Complete);
        let e = expand_rational(&BigRational::new((-7).into(), 3.into()), 5);
        assert_eq!(e.partial_quotients(), ints(&[-3, 1, 2]).as_slice());
        assert_eq!(e.fold().unwrap(), BigRational::new((-7).into(), 3.into()));
    }

    #[test]
    fn low_precision_exhausts() {
        let pi5 = Ball::from_fraction(&314159.into(), &100000.into(), 40).add_error(Mag::from_f64(1e-5));
        let e = expand(&pi5, 20).unwrap();
        assert!(e.is_exhausted());
        assert!(e.certified_count() < 20);
        assert!(e.certified_count() >= 2);
    }

    #[test]
    fn ambiguous_integer_part_rejected() {
        let x = Ball::exact_int(3).add_error(Mag::pow2(-4));
        assert!(expand(&x, 5).is_err());
    }

    #[test]
    fn convergent_lists() {
        let convs = certified_convergents(&Pi, &ConvergentBound::Count(5)).unwrap();
        let got: Vec<String> = convs.iter().map(|c| c.to_string()).collect();
        assert_eq!(got, ["3/1", "22/7", "333/106", "355/113", "103993/33102"]);
        let single = convergents(&CFExpansion::from_quotients(ints(&[3])).unwrap());
        assert_eq!(single.len(), 1);
        assert_eq!(single[0].to_string(), "3/1");
        let upto = certified_convergents(&Pi, &ConvergentBound::MaxQ(BigUint::from(1000u32))).unwrap();
        assert_eq!(upto.last().unwrap().q, BigUint::from(113u32));
    }

    #[test]
    fn witnesses() {
        let c = Convergent { index: 1, p: 22.into(), q: 7u8.into() };
        let w = exponent_witness(&Pi, &c, 10).unwrap();
        assert_eq!(w.delta.round_sig(4).unwrap().to_string(), "3.429");
        let c = Convergent { index: 3, p: 355.into(), q: 113u8.into() };
        let w = exponent_witness(&Pi, &c, 10).unwrap();
        assert_eq!(w.delta.round_sig(4).unwrap().to_string(), "3.202");
        let c = Convergent { index: 0, p: 3.into(), q: 1u8.into() };
        assert!(exponent_witness(&Pi, &c, 10).is_err());
    }

    #[test]
    fn witness_scan() {
        // 22/7 has the larger exponent among q <= 120 (3.4293 vs 3.2020 for 355/113)
        let s = mu_witness_scan(&Pi, &BigUint::from(120u32)).unwrap();
        assert_eq!(s.argmax.to_string(), "22/7");
        assert_eq!(s.witnesses.len(), 3);
        assert!(mu_witness_scan(&Pi, &BigUint::from(1u32)).is_err());
    }

    #[test]
    fn rational_source_has_no_witness_for_itself() {
        let x = BigRational::new(22.into(), 7.into());
        let c = Convergent { index: 1, p: 22.into(), q: 7u8.into() };
        assert!(matches!(exponent_witness(&x, &c, 6), Err(Error::Domain(_))));
    }
}
