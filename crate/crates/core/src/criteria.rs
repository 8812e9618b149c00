//! Classification of `(u, v)` pairs from bounds on the irrationality measure μ(π).
//!
//! With `c = 1 + u/v`, the terms `1/(n^u |sin n|^v)` tend to zero when μ(π) < c
//! and are unbounded when μ(π) > c. The series converges when μ(π) < `1 + (u-1)/v`.

use std::fmt;

use num_rational::BigRational;
use num_traits::One;

use crate::error::{Error, Result};
use crate::mpcore::{format_rational, parse_rational};
use crate::series::SeriesParams;

/// Interval `[lower, upper]` known to contain μ(π).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MuBounds {
    lower: BigRational,
    upper: BigRational,
    pub lower_source: String,
    pub upper_source: String,
}

/// Salikhov's 7.6063... rounded up, so the stored bound never understates it.
pub const DEFAULT_MU_UPPER: &str = "7.6064";

fn two() -> BigRational {
    BigRational::from_integer(2.into())
}

impl MuBounds {
    pub fn new(lower: BigRational, upper: BigRational) -> Result<MuBounds> {
        MuBounds::with_sources(lower, upper, "user supplied", "user supplied")
    }

    pub fn with_sources(
        lower: BigRational,
        upper: BigRational,
        lower_source: impl Into<String>,
        upper_source: impl Into<String>,
    ) -> Result<MuBounds> {
        if lower < two() {
            return Err(Error::InvalidArgument(format!(
                "lower bound {} is below 2, but mu(pi) >= 2 for every irrational",
                format_rational(&lower)
            )));
        }
        if upper < lower {
            return Err(Error::InvalidArgument(format!(
                "upper bound {} is below lower bound {}",
                format_rational(&upper),
                format_rational(&lower)
            )));
        }
        Ok(MuBounds { lower, upper, lower_source: lower_source.into(), upper_source: upper_source.into() })
    }

    /// Parses optional overrides of the default bounds.
    pub fn parse(lower: Option<&str>, upper: Option<&str>) -> Result<MuBounds> {
        let d = MuBounds::default();
        let (lower, lower_source) = match lower {
            Some(s) => (parse_rational(s)?, "user supplied".to_string()),
            None => (d.lower, d.lower_source),
        };
        let (upper, upper_source) = match upper {
            Some(s) => (parse_rational(s)?, "user supplied".to_string()),
            None => (d.upper, d.upper_source),
        };
        MuBounds::with_sources(lower, upper, lower_source, upper_source)
    }

    pub fn lower(&self) -> &BigRational {
        &self.lower
    }

    pub fn upper(&self) -> &BigRational {
        &self.upper
    }
}

impl Default for MuBounds {
    fn default() -> MuBounds {
        MuBounds {
            lower: two(),
            upper: parse_rational(DEFAULT_MU_UPPER).expect("valid literal"),
            lower_source: "pi is irrational (Dirichlet)".into(),
            upper_source: "Salikhov 2008, 7.6063... rounded up".into(),
        }
    }
}

impl fmt::Display for MuBounds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} <= mu(pi) <= {}", format_rational(&self.lower), format_rational(&self.upper))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VerdictKind {
    SequenceToZero,
    SequenceDiverges,
    SeriesConverges,
    Unknown,
}

impl VerdictKind {
    pub fn as_str(self) -> &'static str {
        match self {
            VerdictKind::SequenceToZero => "SequenceToZero",
            VerdictKind::SequenceDiverges => "SequenceDiverges",
            VerdictKind::SeriesConverges => "SeriesConverges",
            VerdictKind::Unknown => "Unknown",
        }
    }
}

impl fmt::Display for VerdictKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Statement used to reach a verdict.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Theorem {
    /// μ(π) < 1 + u/v implies the terms tend to zero.
    SequenceToZero,
    /// μ(π) > 1 + u/v implies the terms are unbounded.
    SequenceDiverges,
    /// μ(π) < 1 + (u-1)/v implies the series converges.
    SeriesConverges,
}

impl Theorem {
    pub fn id(self) -> &'static str {
        match self {
            Theorem::SequenceToZero => "terms-vanish",
            Theorem::SequenceDiverges => "terms-unbounded",
            Theorem::SeriesConverges => "series-converges",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Relation {
    Less,
    Greater,
}

impl Relation {
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Less => "<",
            Relation::Greater => ">",
        }
    }
}

/// "If μ(π) `relation` `threshold` then `kind`".
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MuCondition {
    pub kind: VerdictKind,
    pub relation: Relation,
    pub threshold: BigRational,
    pub theorem: Theorem,
}

impl fmt::Display for MuCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: mu(pi) {} {} ({})",
            self.kind,
            self.relation.symbol(),
            format_rational(&self.threshold),
            self.theorem.id()
        )
    }
}

/// Instantiated inequality behind a definite verdict.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Justification {
    pub theorem: Theorem,
    pub inequality: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub kind: VerdictKind,
    /// Present for every definite verdict.
    pub justification: Option<Justification>,
    /// Ranges of μ(π) under which each outcome would hold.
    pub conditions: Vec<MuCondition>,
}

impl Verdict {
    pub fn summary(&self) -> String {
        match &self.justification {
            Some(j) => format!("{} by {}: {}", self.kind, j.theorem.id(), j.inequality),
            None => {
                let parts: Vec<String> = self.conditions.iter().map(|c| c.to_string()).collect();
                format!("Unknown; {}", parts.join("; "))
            }
        }
    }
}

/// `1 + u/v`.
pub fn sequence_threshold(params: &SeriesParams) -> BigRational {
    BigRational::one() + params.u() / params.v()
}

/// `1 + (u-1)/v`.
pub fn series_threshold(params: &SeriesParams) -> BigRational {
    BigRational::one() + (params.u() - BigRational::one()) / params.v()
}

fn sequence_conditions(params: &SeriesParams) -> Vec<MuCondition> {
    let c = sequence_threshold(params);
    vec![
        MuCondition { kind: VerdictKind::SequenceToZero, relation: Relation::Less, threshold: c.clone(), theorem: Theorem::SequenceToZero },
        MuCondition { kind: VerdictKind::SequenceDiverges, relation: Relation::Greater, threshold: c, theorem: Theorem::SequenceDiverges },
    ]
}

fn series_condition(params: &SeriesParams) -> MuCondition {
    MuCondition {
        kind: VerdictKind::SeriesConverges,
        relation: Relation::Less,
        threshold: series_threshold(params),
        theorem: Theorem::SeriesConverges,
    }
}

fn definite(kind: VerdictKind, theorem: Theorem, inequality: String, conditions: Vec<MuCondition>) -> Verdict {
    Verdict { kind, justification: Some(Justification { theorem, inequality }), conditions }
}

/// Behaviour of the terms `1/(n^u |sin n|^v)`. Boundary equality is `Unknown`.
pub fn classify_sequence(params: &SeriesParams, bounds: &MuBounds) -> Verdict {
    let c = sequence_threshold(params);
    let conditions = sequence_conditions(params);
    let fc = format_rational(&c);
    if bounds.upper < c {
        let ineq = format!("mu(pi) <= {} < 1 + u/v = {}", format_rational(&bounds.upper), fc);
        definite(VerdictKind::SequenceToZero, Theorem::SequenceToZero, ineq, conditions)
    } else if bounds.lower > c {
        let ineq = format!("mu(pi) >= {} > 1 + u/v = {}", format_rational(&bounds.lower), fc);
        definite(VerdictKind::SequenceDiverges, Theorem::SequenceDiverges, ineq, conditions)
    } else {
        Verdict { kind: VerdictKind::Unknown, justification: None, conditions }
    }
}

/// Behaviour of the series. Divergent terms are reported as `SequenceDiverges`.
pub fn classify_series(params: &SeriesParams, bounds: &MuBounds) -> Verdict {
    let s = series_threshold(params);
    let mut conditions = vec![series_condition(params)];
    conditions.extend(sequence_conditions(params));
    if bounds.upper < s {
        let ineq = format!("mu(pi) <= {} < 1 + (u-1)/v = {}", format_rational(&bounds.upper), format_rational(&s));
        return definite(VerdictKind::SeriesConverges, Theorem::SeriesConverges, ineq, conditions);
    }
    let seq = classify_sequence(params, bounds);
    match seq.kind {
        VerdictKind::SequenceDiverges => Verdict { conditions, ..seq },
        _ => Verdict { kind: VerdictKind::Unknown, justification: None, conditions },
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Observation {
    SequenceConverges,
    SequenceDiverges,
    SeriesDiverges,
}

impl Observation {
    pub fn as_str(self) -> &'static str {
        match self {
            Observation::SequenceConverges => "SequenceConverges",
            Observation::SequenceDiverges => "SequenceDiverges",
            Observation::SeriesDiverges => "SeriesDiverges",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Direction {
    AtMost,
    AtLeast,
}

impl Direction {
    pub fn symbol(self) -> &'static str {
        match self {
            Direction::AtMost => "<=",
            Direction::AtLeast => ">=",
        }
    }
}

/// How an implied bound compares with the known bounds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Strength {
    /// Narrows the known interval.
    NonTrivial,
    /// Already implied by the known interval.
    Trivial,
    /// Disjoint from the known interval.
    Contradictory,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ImpliedBound {
    pub direction: Direction,
    pub value: BigRational,
    pub strength: Strength,
}

impl ImpliedBound {
    pub fn is_trivial(&self) -> bool {
        self.strength == Strength::Trivial
    }
}

impl fmt::Display for ImpliedBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "mu(pi) {} {}", self.direction.symbol(), format_rational(&self.value))
    }
}

/// Bound on μ(π) that would follow from `observation`, judged against the defaults.
pub fn implied_mu_bound(params: &SeriesParams, observation: Observation) -> ImpliedBound {
    implied_mu_bound_with(params, observation, &MuBounds::default())
}

pub fn implied_mu_bound_with(params: &SeriesParams, observation: Observation, bounds: &MuBounds) -> ImpliedBound {
    let (direction, value) = match observation {
        Observation::SequenceConverges => (Direction::AtMost, sequence_threshold(params)),
        Observation::SequenceDiverges => (Direction::AtLeast, sequence_threshold(params)),
        Observation::SeriesDiverges => (Direction::AtLeast, series_threshold(params)),
    };
    let strength = match direction {
        Direction::AtMost if value < bounds.lower => Strength::Contradictory,
        Direction::AtMost if value >= bounds.upper => Strength::Trivial,
        Direction::AtLeast if value > bounds.upper => Strength::Contradictory,
        Direction::AtLeast if value <= bounds.lower => Strength::Trivial,
        _ => Strength::NonTrivial,
    };
    ImpliedBound { direction, value, strength }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundHistoryEntry {
    pub year: u32,
    /// Set when the result appeared over several years ending in `year`.
    pub first_year: Option<u32>,
    pub author: &'static str,
    pub bound: BigRational,
}

impl BoundHistoryEntry {
    pub fn years(&self) -> String {
        match self.first_year {
            Some(y) => format!("{y}-{}", self.year),
            None => self.year.to_string(),
        }
    }
}

/// Published upper bounds on μ(π), oldest first.
pub fn bound_history() -> Vec<BoundHistoryEntry> {
    let rows: [(u32, Option<u32>, &str, &str); 5] = [
        (1953, None, "Mahler", "30"),
        (1974, None, "Mignotte", "20"),
        (1982, None, "Chudnovsky", "19.8899944"),
        (1993, Some(1990), "Hata", "8.016045"),
        (2008, None, "Salikhov", "7.6063"),
    ];
    rows.iter()
        .map(|&(year, first_year, author, bound)| BoundHistoryEntry {
            year,
            first_year,
            author,
            bound: parse_rational(bound).expect("valid literal"),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(u: i64, v: i64) -> SeriesParams {
        SeriesParams::from_integers(u, v).unwrap()
    }

    fn r(s: &str) -> BigRational {
        parse_rational(s).unwrap()
    }

    #[test]
    fn default_bounds() {
        let b = MuBounds::default();
        assert_eq!(b.lower(), &r("2"));
        assert_eq!(b.upper(), &r("7.6064"));
        assert!(MuBounds::new(r("1.9"), r("3")).is_err());
        assert!(MuBounds::new(r("3"), r("2.5")).is_err());
        assert!(MuBounds::parse(None, Some("2.5")).is_ok());
    }

    #[test]
    fn sequence_examples() {
        let b = MuBounds::default();
        for (u, v) in [(7, 1), (14, 2), (20, 3)] {
            assert_eq!(classify_sequence(&p(u, v), &b).kind, VerdictKind::SequenceToZero);
        }
        let d = classify_sequence(&p(1, 2), &b);
        assert_eq!(d.kind, VerdictKind::SequenceDiverges);
        assert_eq!(d.justification.unwrap().inequality, "mu(pi) >= 2 > 1 + u/v = 1.5");
        let fh = classify_sequence(&p(3, 2), &b);
        assert_eq!(fh.kind, VerdictKind::Unknown);
        assert_eq!(fh.conditions[0].to_string(), "SequenceToZero: mu(pi) < 2.5 (terms-vanish)");
    }

    #[test]
    fn series_examples() {
        let b = MuBounds::default();
        for (u, v) in [(8, 1), (15, 2), (21, 3)] {
            let verdict = classify_series(&p(u, v), &b);
            assert_eq!(verdict.kind, VerdictKind::SeriesConverges);
            assert_eq!(verdict.justification.unwrap().theorem.id(), "series-converges");
        }
        assert_eq!(classify_series(&p(3, 2), &b).kind, VerdictKind::Unknown);
        assert_eq!(classify_series(&p(7, 1), &b).kind, VerdictKind::Unknown);
        assert_eq!(classify_series(&p(1, 2), &b).kind, VerdictKind::SequenceDiverges);
        let s = classify_series(&p(8, 1), &b).summary();
        assert_eq!(s, "SeriesConverges by series-converges: mu(pi) <= 7.6064 < 1 + (u-1)/v = 8");
    }

    #[test]
    fn boundary_is_unknown() {
        let b = MuBounds::new(r("2"), r("2.5")).unwrap();
        assert_eq!(classify_sequence(&p(3, 2), &b).kind, VerdictKind::Unknown);
        let b = MuBounds::new(r("2.5"), r("3")).unwrap();
        assert_eq!(classify_sequence(&p(3, 2), &b).kind, VerdictKind::Unknown);
        let b = MuBounds::new(r("2"), r("2.49")).unwrap();
        assert_eq!(classify_sequence(&p(3, 2), &b).kind, VerdictKind::SequenceToZero);
    }

    #[test]
    fn implied_examples() {
        let fh = p(3, 2);
        let b = implied_mu_bound(&fh, Observation::SequenceConverges);
        assert_eq!((b.direction, b.value.clone(), b.strength), (Direction::AtMost, r("5/2"), Strength::NonTrivial));
        assert_eq!(b.to_string(), "mu(pi) <= 2.5");
        let b = implied_mu_bound(&fh, Observation::SeriesDiverges);
        assert_eq!((b.direction, b.value.clone()), (Direction::AtLeast, r("2")));
        assert!(b.is_trivial());
        let b = implied_mu_bound(&p(5, 1), Observation::SequenceDiverges);
        assert_eq!((b.direction, b.value.clone(), b.strength), (Direction::AtLeast, r("6"), Strength::NonTrivial));
        let b = implied_mu_bound(&p(1, 2), Observation::SequenceConverges);
        assert_eq!(b.strength, Strength::Contradictory);
        let b = implied_mu_bound(&p(8, 1), Observation::SequenceConverges);
        assert_eq!(b.strength, Strength::Trivial);
    }

    #[test]
    fn history_table() {
        let h = bound_history();
        assert_eq!(h.len(), 5);
        assert_eq!(h[0].bound, r("30"));
        assert_eq!(h[0].author, "Mahler");
        assert_eq!(h[4].bound, r("7.6063"));
        assert_eq!(h[3].years(), "1990-1993");
        assert!(h.windows(2).all(|w| w[0].bound >= w[1].bound && w[0].year <= w[1].year));
        assert!(h[4].bound < *MuBounds::default().upper());
    }
}
