//! Certified numerics around the series `sum 1/(n^u |sin n|^v)`.
//!
//! * [`mpcore`]: balls, π, argument reduction and certified `sin(n)`.
//! * [`cfrac`]: certified continued fractions, convergents, irrationality-exponent witnesses.
//! * [`series`]: error-bounded terms, partial sums, spike search, envelope fits.
//! * [`criteria`]: convergence verdicts for `(u, v)` under bounds on the irrationality measure of π.

pub mod error;
pub mod cfrac;
pub mod mpcore;
pub mod series;
pub mod criteria;

pub use error::{Error, Result};
pub use mpcore::{
    sine_bound_slacks, pi_to, reduce_mod_pi, sin_of_integer, Ball, CertifiedValue, ErrorBoundedValue,
    HighPrecisionReal, Mag, ReductionResult,
};
pub use series::{partial_sum, spikes, term, SeriesParams, TermEvaluation};
pub use criteria::{bound_history, classify_sequence, classify_series, implied_mu_bound, MuBounds, Verdict, VerdictKind};
