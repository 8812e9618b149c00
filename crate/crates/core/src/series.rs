//! Error-bounded terms and partial sums of `sum 1/(n^u |sin n|^v)`, spike
//! search, the two-subsequence diagnostic, and envelope fits.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::cfrac::{approximation_gap, certified_convergents, Convergent, ConvergentBound, Pi};
use crate::error::{Error, Result};
use crate::mpcore::elementary::{exp, ln};
use crate::mpcore::{
    bits_for_digits, check_bits, format_rational, ladder, nearest_multiple, parse_rational,
    sin_of_integer, sin_with_residual, Ball, CertifiedValue, HighPrecisionReal, Mag,
};

/// Exponents `(u, v)` of the term `1/(n^u |sin n|^v)`, both strictly positive.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SeriesParams {
    u: BigRational,
    v: BigRational,
}

impl SeriesParams {
    pub fn new(u: BigRational, v: BigRational) -> Result<SeriesParams> {
        if !u.is_positive() || !v.is_positive() {
            return Err(Error::InvalidArgument(format!(
                "exponents must be positive, got u = {}, v = {}",
                format_rational(&u),
                format_rational(&v)
            )));
        }
        Ok(SeriesParams { u, v })
    }

    pub fn from_integers(u: i64, v: i64) -> Result<SeriesParams> {
        SeriesParams::new(BigRational::from_integer(u.into()), BigRational::from_integer(v.into()))
    }

    /// Parses each exponent as a decimal or a fraction.
    pub fn parse(u: &str, v: &str) -> Result<SeriesParams> {
        SeriesParams::new(parse_rational(u)?, parse_rational(v)?)
    }

    /// The Flint Hills exponents `(3, 2)`.
    pub fn flint_hills() -> SeriesParams {
        SeriesParams::from_integers(3, 2).expect("positive")
    }

    pub fn u(&self) -> &BigRational {
        &self.u
    }

    pub fn v(&self) -> &BigRational {
        &self.v
    }

    fn integer_exponents(&self) -> Option<(u32, u32)> {
        let small = |x: &BigRational| x.is_integer().then(|| x.to_integer().to_u32()).flatten();
        Some((small(&self.u)?, small(&self.v)?))
    }
}

impl fmt::Display for SeriesParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", format_rational(&self.u), format_rational(&self.v))
    }
}

/// One certified term.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TermEvaluation {
    pub n: BigUint,
    /// `1/(n^u |sin n|^v)`.
    pub term: Ball,
    /// The term correctly rounded to the requested digits.
    pub rounded: HighPrecisionReal,
    /// Nearest integer to `n/π`.
    pub m: BigUint,
    /// `n - m·π`.
    pub residual: Ball,
}

/// Term at working precision `prec` given the nearest multiple `m`.
fn term_ball(n: &BigUint, m: &BigUint, params: &SeriesParams, prec: u32) -> Result<(Ball, Ball)> {
    let work = prec + 16;
    let (s, r) = sin_with_residual(n, m, work)?;
    let s = s.abs();
    let t = match params.integer_exponents() {
        Some((u, v)) => {
            let nu = Ball::exact_int(BigInt::from(n.pow(u)));
            nu.mul(&s.pow_u32(v, work), work).recip(work)
        }
        None => {
            let lnn = ln(&Ball::from(n), work + 16)?;
            let lns = ln(&s, work + 16)?;
            let ub = Ball::from_ratio(&params.u, work + 32);
            let vb = Ball::from_ratio(&params.v, work + 32);
            let arg = ub.mul(&lnn, work + 16).add(&vb.mul(&lns, work + 16), work + 16).neg();
            Some(exp(&arg, work)?)
        }
    };
    let t = t.ok_or_else(|| Error::Domain(format!("|sin {n}| not separated from zero")))?;
    Ok((t.round(prec), r))
}

/// Term whose relative error is at most `2^-rel_bits`.
fn term_relative(n: &BigUint, m: &BigUint, params: &SeriesParams, rel_bits: u32) -> Result<(Ball, Ball)> {
    let target = Mag::pow2(-(rel_bits as i64));
    let mut prec = ladder(rel_bits as u64 + 8);
    loop {
        check_bits(prec as u64)?;
        let (t, r) = term_ball(n, m, params, prec)?;
        if t.rel_error().is_some_and(|e| e <= target) {
            return Ok((t, r));
        }
        prec = prec.saturating_mul(2);
    }
}

/// Certified value of `1/(n^u |sin n|^v)`, correctly rounded to `target_digits`.
pub fn term(n: &BigUint, params: &SeriesParams, target_digits: u32) -> Result<TermEvaluation> {
    if n.is_zero() {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    if target_digits == 0 {
        return Err(Error::InvalidArgument("target_digits must be at least 1".into()));
    }
    let m = nearest_multiple(n)?;
    let mut prec = ladder(bits_for_digits(target_digits as u64 + 6));
    loop {
        check_bits(prec as u64)?;
        let (t, residual) = term_ball(n, &m, params, prec)?;
        if let Some(rounded) = t.round_sig(target_digits) {
            return Ok(TermEvaluation { n: n.clone(), term: t, rounded, m, residual });
        }
        prec = prec.saturating_mul(2);
    }
}

/// Default certified digits for partial sums.
pub const DEFAULT_SUM_DIGITS: u32 = 12;

const CHUNK: u64 = 4096;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialSum {
    pub upto_n: u64,
    pub sum: Ball,
    pub params: SeriesParams,
}

/// Streaming summation over consecutive `n`.
///
/// Terms of a chunk are evaluated in parallel and added in index order, so the
/// result does not depend on the thread count. Every term carries relative
/// error below `2^-(bits+8)`; since all terms are positive, every prefix sum
/// meets the same relative bound.
pub struct PartialSummer {
    params: SeriesParams,
    term_bits: u32,
    sum_prec: u32,
    next_n: u64,
    sum: Ball,
}

impl PartialSummer {
    /// Summer certifying `target_digits` for sums of up to `max_n` terms.
    pub fn new(params: SeriesParams, target_digits: u32, max_n: u64) -> PartialSummer {
        let bits = bits_for_digits(target_digits as u64) as u32;
        let nbits = 64 - max_n.leading_zeros();
        PartialSummer {
            params,
            term_bits: bits + 8,
            sum_prec: bits + nbits + 24,
            next_n: 1,
            sum: Ball::zero(),
        }
    }

    pub fn upto(&self) -> u64 {
        self.next_n - 1
    }

    pub fn advance_to(&mut self, upto: u64) -> Result<PartialSum> {
        while self.next_n <= upto {
            let end = (self.next_n + CHUNK - 1).min(upto);
            let terms = eval_range(self.next_n, end, |n| {
                let nb = BigUint::from(n);
                let m = nearest_multiple(&nb)?;
                term_relative(&nb, &m, &self.params, self.term_bits).map(|(t, _)| t)
            })?;
            for t in &terms {
                self.sum = self.sum.add(t, self.sum_prec);
            }
            self.next_n = end + 1;
        }
        Ok(PartialSum { upto_n: self.upto(), sum: self.sum.clone(), params: self.params.clone() })
    }
}

fn eval_range<T: Send>(start: u64, end: u64, f: impl Fn(u64) -> Result<T> + Sync + Send) -> Result<Vec<T>> {
    (start..=end).into_par_iter().map(f).collect()
}

/// `sum_{n=1..max_n} 1/(n^u |sin n|^v)` with relative error below `10^-target_digits`.
pub fn partial_sum(max_n: u64, params: &SeriesParams, target_digits: u32) -> Result<PartialSum> {
    partial_sum_checkpoints(max_n, params, target_digits, &[], |_| {})
}

/// As [`partial_sum`], reporting the running sum at each checkpoint on the way.
pub fn partial_sum_checkpoints(
    max_n: u64,
    params: &SeriesParams,
    target_digits: u32,
    checkpoints: &[u64],
    mut on_checkpoint: impl FnMut(&PartialSum),
) -> Result<PartialSum> {
    if max_n == 0 {
        return Err(Error::InvalidArgument("max_n must be at least 1".into()));
    }
    if target_digits == 0 {
        return Err(Error::InvalidArgument("target_digits must be at least 1".into()));
    }
    let mut summer = PartialSummer::new(params.clone(), target_digits, max_n);
    let mut stops: Vec<u64> = checkpoints.iter().copied().filter(|&c| c >= 1 && c < max_n).collect();
    stops.sort_unstable();
    stops.dedup();
    for stop in stops {
        on_checkpoint(&summer.advance_to(stop)?);
    }
    let out = summer.advance_to(max_n)?;
    let want = Mag::pow2(-(bits_for_digits(target_digits as u64) as i64));
    if !out.sum.rel_error().is_some_and(|e| e <= want) {
        return Err(Error::Domain("partial sum failed to certify; report this".into()));
    }
    Ok(out)
}

/// Half-width of the window examined around each convergent numerator.
pub const SPIKE_WINDOW: u64 = 2;

/// Certified digits carried by spike records.
pub const SPIKE_DIGITS: u32 = 10;

#[derive(Clone, Debug)]
pub struct SpikeFailure {
    pub n: u64,
    pub error: Error,
}

#[derive(Clone, Debug)]
pub struct SpikeReport {
    /// All `n` with certified term above the threshold, ascending.
    pub spikes: Vec<TermEvaluation>,
    /// Candidates that could not be decided within the precision cap.
    pub failures: Vec<SpikeFailure>,
    /// Every `n <= scan_limit` was examined directly.
    pub scan_limit: u64,
    /// Convergent-guided candidates examined above `scan_limit`.
    pub guided_candidates: usize,
}

/// Whether `term(n) > threshold`, certified.
fn exceeds(n: u64, params: &SeriesParams, threshold: &BigRational) -> Result<bool> {
    let nb = BigUint::from(n);
    let m = nearest_multiple(&nb)?;
    let mut prec = 64u32;
    loop {
        check_bits(prec as u64)?;
        let (t, _) = term_ball(&nb, &m, params, prec)?;
        match t.cmp_ratio(threshold) {
            Some(Ordering::Greater) => return Ok(true),
            Some(_) => return Ok(false),
            None => prec = prec.saturating_mul(2),
        }
    }
}

/// Residual bound for a spike: `term(n) > T` forces `|n - mπ| < rho(n)`,
/// with `rho(n) = (π/2) (T n^u)^(-1/v)` because `|sin r| >= (2/π)|r|` on `|r| <= π/2`.
fn spike_radius(n: f64, u: f64, v: f64, t: f64) -> f64 {
    std::f64::consts::FRAC_PI_2 * (-(t.ln() + u * n.ln()) / v).exp()
}

/// Smallest `n0` such that every spike above `n0` sits at a multiple of a
/// convergent numerator of π.
///
/// By Legendre's criterion, `|n - mπ| < 1/(2m)` makes `n/m` a multiple of a
/// convergent. A spike has `|n - mπ| < rho(n)`, and `rho(n) (2n/π + 1) <= 1`
/// is sufficient; that product is `g(n) = T^(-1/v) n^(-u/v) (n + π/2)`, which
/// decreases once `u >= v`. A factor-2 margin absorbs floating-point error.
fn legendre_cutoff(max_n: u64, params: &SeriesParams, threshold: &BigRational) -> u64 {
    let f = |x: &BigRational| x.to_f64().unwrap_or(f64::NAN);
    let (u, v, t) = (f(&params.u), f(&params.v), f(threshold));
    let ratio = u / v;
    if ratio.is_nan() || ratio < 1.0 || !t.is_finite() {
        return max_n;
    }
    let g = |n: u64| {
        let n = n as f64;
        (-(t.ln() + u * n.ln()) / v).exp() * (n + std::f64::consts::FRAC_PI_2)
    };
    if g(max_n) > 0.5 {
        return max_n;
    }
    let (mut lo, mut hi) = (1u64, max_n);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if g(mid) <= 0.5 {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    lo
}

/// Convergent-guided candidates above `scan_limit`: multiples `k·p` of every
/// convergent numerator with `k |p - qπ| < 2 rho(k p)`, plus a window of
/// `SPIKE_WINDOW` around each numerator.
fn guided_candidates(max_n: u64, scan_limit: u64, params: &SeriesParams, threshold: &BigRational) -> Result<BTreeSet<u64>> {
    let mut out = BTreeSet::new();
    if scan_limit >= max_n {
        return Ok(out);
    }
    let f = |x: &BigRational| x.to_f64().unwrap_or(f64::NAN);
    let (u, v, t) = (f(&params.u), f(&params.v), f(threshold));
    let max_q = BigUint::from(max_n / 3 + 2);
    let convs: Vec<Convergent> = certified_convergents(&Pi, &ConvergentBound::MaxQ(max_q))?;
    for c in &convs {
        let Some(p) = c.p.to_u64() else { continue };
        if p > max_n + SPIKE_WINDOW {
            continue;
        }
        for n in p.saturating_sub(SPIKE_WINDOW).max(1)..=p + SPIKE_WINDOW {
            if n > scan_limit && n <= max_n {
                out.insert(n);
            }
        }
        let gap = approximation_gap(&Pi, c)?;
        let mut k = 1u64;
        while let Some(n) = k.checked_mul(p).filter(|&n| n <= max_n) {
            if k as f64 * gap >= 2.0 * spike_radius(n as f64, u, v, t) {
                break;
            }
            if n > scan_limit {
                out.insert(n);
            }
            k += 1;
        }
    }
    Ok(out)
}

/// Certifies candidates in ascending chunks, reporting each spike as soon as its chunk is done.
fn certify_spikes(
    candidates: Vec<u64>,
    params: &SeriesParams,
    threshold: &BigRational,
    on_spike: &mut dyn FnMut(&TermEvaluation),
) -> (Vec<TermEvaluation>, Vec<SpikeFailure>) {
    let mut spikes = Vec::new();
    let mut failures = Vec::new();
    for chunk in candidates.chunks(CHUNK as usize) {
        let decided: Vec<(u64, Result<Option<TermEvaluation>>)> = chunk
            .par_iter()
            .map(|&n| {
                let r = exceeds(n, params, threshold).and_then(|hit| {
                    if hit {
                        term(&BigUint::from(n), params, SPIKE_DIGITS).map(Some)
                    } else {
                        Ok(None)
                    }
                });
                (n, r)
            })
            .collect();
        for (n, d) in decided {
            match d {
                Ok(Some(t)) => {
                    on_spike(&t);
                    spikes.push(t);
                }
                Ok(None) => {}
                Err(error) => failures.push(SpikeFailure { n, error }),
            }
        }
    }
    (spikes, failures)
}

fn check_spike_args(max_n: u64, threshold: &BigRational) -> Result<()> {
    if max_n == 0 {
        return Err(Error::InvalidArgument("max_n must be at least 1".into()));
    }
    if !threshold.is_positive() {
        return Err(Error::InvalidArgument("threshold must be positive".into()));
    }
    Ok(())
}

/// All `n <= max_n` whose certified term exceeds `threshold`.
///
/// Indices up to the Legendre cutoff are scanned directly; above it only the
/// convergent-guided candidates can qualify. Candidates that cannot be decided
/// are reported in `failures`, never dropped.
pub fn spikes(max_n: u64, params: &SeriesParams, threshold: &BigRational) -> Result<SpikeReport> {
    spikes_streaming(max_n, params, threshold, |_| {})
}

/// As [`spikes`], calling `on_spike` for each spike in ascending order of `n`.
pub fn spikes_streaming(
    max_n: u64,
    params: &SeriesParams,
    threshold: &BigRational,
    mut on_spike: impl FnMut(&TermEvaluation),
) -> Result<SpikeReport> {
    check_spike_args(max_n, threshold)?;
    let scan_limit = legendre_cutoff(max_n, params, threshold);
    let guided = guided_candidates(max_n, scan_limit, params, threshold)?;
    let guided_candidates = guided.len();
    let candidates: Vec<u64> = (1..=scan_limit).chain(guided).collect();
    let (spikes, failures) = certify_spikes(candidates, params, threshold, &mut on_spike);
    Ok(SpikeReport { spikes, failures, scan_limit, guided_candidates })
}

/// Reference scan over every `n <= max_n`.
pub fn spikes_exhaustive(max_n: u64, params: &SeriesParams, threshold: &BigRational) -> Result<SpikeReport> {
    check_spike_args(max_n, threshold)?;
    let (spikes, failures) = certify_spikes((1..=max_n).collect(), params, threshold, &mut |_| {});
    Ok(SpikeReport { spikes, failures, scan_limit: max_n, guided_candidates: 0 })
}

/// Terms at `n = p_i` and `n = p_i + 1` for the `i`-th convergent `p_i/q_i` of π.
#[derive(Clone, Debug)]
pub struct SubsequenceDiagnostic {
    pub convergent: Convergent,
    pub at_p: TermEvaluation,
    pub at_p_plus_1: TermEvaluation,
    /// `|sin(p_i + 1)|`, which tends to `sin 1` as `i` grows.
    pub abs_sin_p_plus_1: CertifiedValue,
    pub sin_one: CertifiedValue,
}

pub const DIAGNOSTIC_DIGITS: u32 = 10;

pub fn subsequence_diagnostic(index: usize, params: &SeriesParams) -> Result<SubsequenceDiagnostic> {
    let convs = certified_convergents(&Pi, &ConvergentBound::Count(index + 1))?;
    let convergent = convs
        .get(index)
        .cloned()
        .ok_or_else(|| Error::InvalidArgument(format!("convergent {index} unavailable")))?;
    let p = convergent.p.to_biguint().expect("convergents of pi are positive");
    let p1 = &p + 1u8;
    let at_p = term(&p, params, DIAGNOSTIC_DIGITS)?;
    let at_p_plus_1 = term(&p1, params, DIAGNOSTIC_DIGITS)?;
    let s = sin_of_integer(&p1, DIAGNOSTIC_DIGITS)?;
    let abs_sin_p_plus_1 = CertifiedValue {
        value: s.value.abs(),
        rounded: s.value.abs().round_sig(DIAGNOSTIC_DIGITS).expect("already certified"),
    };
    let sin_one = sin_of_integer(&BigUint::from(1u8), DIAGNOSTIC_DIGITS)?;
    Ok(SubsequenceDiagnostic { convergent, at_p, at_p_plus_1, abs_sin_p_plus_1, sin_one })
}

/// Fit of `term(n) <= C n^-e` over `n <= max_n`, with `e = u - (mu - 1) v - epsilon`.
#[derive(Clone, Debug)]
pub struct EnvelopeFit {
    pub exponent: BigRational,
    /// `max_n term(n) n^e`, the smallest admissible constant.
    pub fitted_c: Ball,
    pub argmax: u64,
    /// Indices where `term(n) n^e` exceeds every earlier value: each one
    /// violates the constant fitted on the indices before it. The last is `argmax`.
    pub violations: Vec<u64>,
}

const ENVELOPE_BITS: u32 = 64;

/// `term(n) n^e = exp((e - u) ln n - v ln|sin n|)`.
fn scaled_term(n: u64, params: &SeriesParams, e: &BigRational) -> Result<Ball> {
    let nb = BigUint::from(n);
    let m = nearest_multiple(&nb)?;
    let prec = ENVELOPE_BITS;
    let work = prec + 32;
    let (s, _) = sin_with_residual(&nb, &m, work)?;
    let lnn = ln(&Ball::from(&nb), work)?;
    let lns = ln(&s.abs(), work)?;
    let a = Ball::from_ratio(&(e - &params.u), work + 32);
    let vb = Ball::from_ratio(&params.v, work + 32);
    let arg = a.mul(&lnn, work).sub(&vb.mul(&lns, work), work);
    exp(&arg, prec)
}

pub fn envelope_check(max_n: u64, params: &SeriesParams, mu: &BigRational, epsilon: &BigRational) -> Result<EnvelopeFit> {
    if max_n == 0 {
        return Err(Error::InvalidArgument("max_n must be at least 1".into()));
    }
    if mu < &BigRational::from_integer(2.into()) {
        return Err(Error::InvalidArgument("mu must be at least 2".into()));
    }
    if !epsilon.is_positive() {
        return Err(Error::InvalidArgument("epsilon must be positive".into()));
    }
    let one = BigRational::from_integer(1.into());
    let exponent = &params.u - (mu - one) * &params.v - epsilon;
    let mut best: Option<(u64, Ball)> = None;
    let mut violations = Vec::new();
    let mut start = 1u64;
    while start <= max_n {
        let end = (start + CHUNK - 1).min(max_n);
        let vals = eval_range(start, end, |n| scaled_term(n, params, &exponent))?;
        for (n, val) in (start..=end).zip(vals) {
            if best.as_ref().is_none_or(|(_, b)| val.to_f64() > b.to_f64()) {
                violations.push(n);
                best = Some((n, val));
            }
        }
        start = end + 1;
    }
    let (argmax, fitted_c) = best.expect("max_n >= 1");
    Ok(EnvelopeFit { exponent, fitted_c, argmax, violations })
}
