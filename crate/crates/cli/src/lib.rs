//! The `flint` command line: certified π, continued fractions, sines, terms,
//! partial sums, spike scans and convergence classification.
//!
//! Data records go to stdout as JSON lines or CSV; diagnostics go to stderr.
//! Exit status is 0 on success, 1 on a domain error, 2 on a usage error and 3
//! when the precision cap is hit.

pub mod output;

use std::io::Write;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use flint_core::cfrac::{
    certified_convergents, exponent_witness, Convergent, ConvergentBound, Pi, DELTA_DIGITS,
};
use flint_core::criteria::{
    bound_history, classify_sequence, classify_series, implied_mu_bound_with, MuBounds, Observation,
    Strength, Verdict, VerdictKind,
};
use flint_core::mpcore::{format_rational, parse_natural, parse_rational, set_precision_cap};
use flint_core::series::{
    envelope_check, partial_sum_checkpoints, spikes_streaming, subsequence_diagnostic, term, SeriesParams,
    TermEvaluation, DEFAULT_SUM_DIGITS, DIAGNOSTIC_DIGITS,
};
use flint_core::{pi_to, sin_of_integer, Error};

pub use output::{certified_rounding, read_csv, read_json_lines, Format, OutputRecord, RecordWriter};

#[derive(Debug, Parser)]
#[command(name = "flint", version, about = "Certified computations around sum 1/(n^u |sin n|^v)")]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "json")]
    pub format: Format,

    /// Largest number of decimal digits any intermediate may carry.
    #[arg(long, global = true, env = "FLINT_PRECISION_CAP", value_name = "DIGITS")]
    pub precision_cap: Option<u64>,

    /// Record wall-clock time in each record's `elapsed_ms`.
    #[arg(long, global = true)]
    pub timing: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Exponents {
    /// Exponent of n (decimal or p/q).
    #[arg(long, allow_hyphen_values = true)]
    pub u: String,
    /// Exponent of |sin n| (decimal or p/q).
    #[arg(long, allow_hyphen_values = true)]
    pub v: String,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// π correctly rounded to D significant digits.
    Pi {
        #[arg(long)]
        digits: u32,
    },
    /// Certified convergents of π.
    Convergents {
        #[arg(long, conflicts_with = "max_q", required_unless_present = "max_q")]
        count: Option<usize>,
        #[arg(long)]
        max_q: Option<String>,
    },
    /// Exponent delta with |π - p/q| = q^-delta for one convergent.
    Witness {
        #[arg(long)]
        convergent_index: usize,
        #[arg(long, default_value_t = DELTA_DIGITS)]
        digits: u32,
    },
    /// sin(n) correctly rounded to D significant digits.
    Sin {
        #[arg(long)]
        n: String,
        #[arg(long)]
        digits: u32,
    },
    /// One term 1/(n^u |sin n|^v).
    Term {
        #[arg(long)]
        n: String,
        #[command(flatten)]
        exponents: Exponents,
        #[arg(long, default_value_t = 15)]
        digits: u32,
    },
    /// Partial sum over n <= N, with progress records at powers of ten.
    Sum {
        #[arg(long)]
        max_n: u64,
        #[command(flatten)]
        exponents: Exponents,
        #[arg(long, default_value_t = DEFAULT_SUM_DIGITS)]
        digits: u32,
    },
    /// Every n <= N whose term exceeds the threshold.
    Spikes {
        #[arg(long)]
        max_n: u64,
        #[command(flatten)]
        exponents: Exponents,
        #[arg(long)]
        threshold: String,
    },
    /// Terms at p and p + 1 for the i-th convergent p/q of π.
    Diag {
        #[arg(long)]
        convergent_index: usize,
        #[command(flatten)]
        exponents: Exponents,
    },
    /// Smallest C with term(n) <= C n^-(u - (mu-1) v - eps) for n <= N.
    Envelope {
        #[arg(long)]
        max_n: u64,
        #[command(flatten)]
        exponents: Exponents,
        #[arg(long)]
        mu: String,
        #[arg(long)]
        eps: String,
    },
    /// Convergence verdict for (u, v) under bounds on the irrationality measure of π.
    Classify {
        #[command(flatten)]
        exponents: Exponents,
        #[arg(long)]
        mu_lower: Option<String>,
        #[arg(long)]
        mu_upper: Option<String>,
    },
    /// Published upper bounds on the irrationality measure of π.
    History,
}

#[derive(Debug)]
enum Failure {
    Core(Error),
    Io(std::io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

type Outcome = Result<(), Failure>;

struct Ctx<'a, W: Write> {
    writer: RecordWriter<W>,
    err: &'a mut dyn Write,
    timing: bool,
    start: Instant,
}

impl<W: Write> Ctx<'_, W> {
    fn emit(&mut self, mut record: OutputRecord) -> Outcome {
        if self.timing {
            record.elapsed_ms = Some(self.start.elapsed().as_millis() as u64);
        }
        Ok(self.writer.write(&record)?)
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    if let Some(cap) = cli.precision_cap {
        set_precision_cap(cap);
    }
    let mut ctx = Ctx { writer: RecordWriter::new(cli.format, out), err, timing: cli.timing, start: Instant::now() };
    match execute(&cli.command, &mut ctx) {
        Ok(()) => 0,
        Err(Failure::Io(e)) => {
            let _ = writeln!(ctx.err, "error: {e}");
            1
        }
        Err(Failure::Core(e)) => {
            let _ = writeln!(ctx.err, "error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::ResourceLimit { .. } => 3,
        Error::InvalidArgument(_) => 2,
        Error::Domain(_) => 1,
    }
}

fn params(e: &Exponents) -> Result<SeriesParams, Error> {
    SeriesParams::parse(&e.u, &e.v)
}

fn with_exponents(r: OutputRecord, e: &Exponents) -> OutputRecord {
    r.input("u", &e.u).input("v", &e.v)
}

fn nth_convergent(index: usize) -> Result<Convergent, Error> {
    certified_convergents(&Pi, &ConvergentBound::Count(index + 1))?
        .get(index)
        .cloned()
        .ok_or_else(|| Error::InvalidArgument(format!("convergent {index} unavailable")))
}

fn term_outputs(r: OutputRecord, t: &TermEvaluation, digits: u32) -> OutputRecord {
    r.out("n", &t.n)
        .out("m", &t.m)
        .real("term", &t.rounded)
        .ball("residual", &t.residual, digits)
        .digits(t.rounded.digits())
}

fn verdict_fields(r: OutputRecord, prefix: &str, v: &Verdict) -> OutputRecord {
    let conditions: Vec<String> = v.conditions.iter().map(|c| c.to_string()).collect();
    let r = r
        .out(&format!("{prefix}kind"), v.kind)
        .out(&format!("{prefix}justification"), v.summary())
        .out(&format!("{prefix}conditions"), conditions.join("; "));
    match &v.justification {
        Some(j) => r.out(&format!("{prefix}theorem"), j.theorem.id()),
        None => r.out(&format!("{prefix}theorem"), "none"),
    }
}

fn strength_name(s: Strength) -> &'static str {
    match s {
        Strength::NonTrivial => "non-trivial",
        Strength::Trivial => "trivial",
        Strength::Contradictory => "contradictory",
    }
}

fn execute<W: Write>(command: &Command, ctx: &mut Ctx<'_, W>) -> Outcome {
    match command {
        Command::Pi { digits } => {
            let pi = pi_to(*digits)?;
            ctx.emit(OutputRecord::new("pi").input("digits", digits).real("pi", &pi).digits(*digits))
        }
        Command::Convergents { count, max_q } => {
            let (bound, base) = match (count, max_q) {
                (Some(k), _) => (ConvergentBound::Count(*k), OutputRecord::new("convergents").input("count", k)),
                (None, Some(q)) => {
                    let q = parse_natural(q)?;
                    (ConvergentBound::MaxQ(q.clone()), OutputRecord::new("convergents").input("max_q", q))
                }
                (None, None) => unreachable!("clap requires one bound"),
            };
            for c in certified_convergents(&Pi, &bound)? {
                ctx.emit(base.clone().out("index", c.index).out("p", &c.p).out("q", &c.q))?;
            }
            Ok(())
        }
        Command::Witness { convergent_index, digits } => {
            let c = nth_convergent(*convergent_index)?;
            let w = exponent_witness(&Pi, &c, *digits)?;
            let delta = certified_rounding(&w.delta, *digits);
            ctx.emit(
                OutputRecord::new("witness")
                    .input("convergent_index", convergent_index)
                    .input("digits", digits)
                    .out("p", &c.p)
                    .out("q", &c.q)
                    .ball("gap", &w.residual, *digits)
                    .digits(delta.digits())
                    .real("delta", &delta),
            )
        }
        Command::Sin { n, digits } => {
            let nb = parse_natural(n)?;
            let s = sin_of_integer(&nb, *digits)?;
            ctx.emit(
                OutputRecord::new("sin")
                    .input("n", &nb)
                    .input("digits", digits)
                    .real("sin", &s.rounded)
                    .digits(*digits),
            )
        }
        Command::Term { n, exponents, digits } => {
            let nb = parse_natural(n)?;
            let t = term(&nb, &params(exponents)?, *digits)?;
            let r = with_exponents(OutputRecord::new("term"), exponents).input("n", &nb).input("digits", digits);
            ctx.emit(term_outputs(r, &t, *digits))
        }
        Command::Sum { max_n, exponents, digits } => {
            let p = params(exponents)?;
            let base = with_exponents(OutputRecord::new("sum"), exponents)
                .input("max_n", max_n)
                .input("digits", digits);
            let checkpoints: Vec<u64> = (0..20).map(|k| 10u64.pow(k)).take_while(|&c| c < *max_n).collect();
            let mut io_error = None;
            let record = |s: &flint_core::series::PartialSum| {
                base.clone()
                    .out("upto_n", s.upto_n)
                    .ball("sum", &s.sum, *digits)
                    .digits(*digits)
            };
            let total = partial_sum_checkpoints(*max_n, &p, *digits, &checkpoints, |s| {
                if io_error.is_none() {
                    io_error = ctx.emit(record(s)).err();
                }
            })?;
            if let Some(e) = io_error {
                return Err(e);
            }
            ctx.emit(record(&total))
        }
        Command::Spikes { max_n, exponents, threshold } => {
            let p = params(exponents)?;
            let t = parse_rational(threshold)?;
            let base = with_exponents(OutputRecord::new("spikes"), exponents)
                .input("max_n", max_n)
                .input("threshold", threshold);
            let mut io_error = None;
            let report = spikes_streaming(*max_n, &p, &t, |s| {
                if io_error.is_none() {
                    io_error = ctx.emit(term_outputs(base.clone(), s, s.rounded.digits())).err();
                }
            })?;
            if let Some(e) = io_error {
                return Err(e);
            }
            writeln!(
                ctx.err,
                "spikes: {} found; scanned n <= {} directly, {} convergent-guided candidates above",
                report.spikes.len(),
                report.scan_limit,
                report.guided_candidates
            )?;
            if let Some(first) = report.failures.first() {
                for f in &report.failures {
                    writeln!(ctx.err, "undecided n = {}: {}", f.n, f.error)?;
                }
                return Err(first.error.clone().into());
            }
            Ok(())
        }
        Command::Diag { convergent_index, exponents } => {
            let d = subsequence_diagnostic(*convergent_index, &params(exponents)?)?;
            ctx.emit(
                with_exponents(OutputRecord::new("diag"), exponents)
                    .input("convergent_index", convergent_index)
                    .out("p", &d.convergent.p)
                    .out("q", &d.convergent.q)
                    .real("term_p", &d.at_p.rounded)
                    .real("term_p_plus_1", &d.at_p_plus_1.rounded)
                    .real("abs_sin_p_plus_1", &d.abs_sin_p_plus_1.rounded)
                    .real("sin_one", &d.sin_one.rounded)
                    .digits(DIAGNOSTIC_DIGITS),
            )
        }
        Command::Envelope { max_n, exponents, mu, eps } => {
            let p = params(exponents)?;
            let fit = envelope_check(*max_n, &p, &parse_rational(mu)?, &parse_rational(eps)?)?;
            let c = certified_rounding(&fit.fitted_c, 10);
            let violations: Vec<String> = fit.violations.iter().map(u64::to_string).collect();
            ctx.emit(
                with_exponents(OutputRecord::new("envelope"), exponents)
                    .input("max_n", max_n)
                    .input("mu", mu)
                    .input("eps", eps)
                    .out("exponent", format_rational(&fit.exponent))
                    .real("fitted_c", &c)
                    .out("argmax", fit.argmax)
                    .out("violations", violations.join(" "))
                    .digits(c.digits()),
            )
        }
        Command::Classify { exponents, mu_lower, mu_upper } => {
            let p = params(exponents)?;
            let bounds = MuBounds::parse(mu_lower.as_deref(), mu_upper.as_deref())?;
            let seq = classify_sequence(&p, &bounds);
            let ser = classify_series(&p, &bounds);
            let overall = if ser.kind == VerdictKind::Unknown { &seq } else { &ser };
            let mut r = with_exponents(OutputRecord::new("classify"), exponents)
                .input("mu_lower", format_rational(bounds.lower()))
                .input("mu_upper", format_rational(bounds.upper()));
            r = verdict_fields(r, "", overall);
            r = verdict_fields(r, "sequence_", &seq);
            r = verdict_fields(r, "series_", &ser);
            for (name, obs) in [
                ("if_sequence_converges", Observation::SequenceConverges),
                ("if_sequence_diverges", Observation::SequenceDiverges),
                ("if_series_diverges", Observation::SeriesDiverges),
            ] {
                let b = implied_mu_bound_with(&p, obs, &bounds);
                r = r.out(&format!("implied_{name}"), format!("{b} ({})", strength_name(b.strength)));
            }
            ctx.emit(r)
        }
        Command::History => {
            let default_upper = MuBounds::default();
            for e in bound_history() {
                ctx.emit(
                    OutputRecord::new("history")
                        .out("author", e.author)
                        .out("years", e.years())
                        .out("bound", format_rational(&e.bound))
                        .out("default_upper", format_rational(default_upper.upper())),
                )?;
            }
            Ok(())
        }
    }
}
