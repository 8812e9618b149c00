//! Output records and their JSON-lines and CSV renderings.

use std::collections::BTreeMap;
use std::io::{self, Write};

use flint_core::{Ball, HighPrecisionReal};
use serde::{Deserialize, Serialize};

/// One row of command output. Real numbers are decimal strings; each one has a
/// sibling `<name>_digits` holding its certified significant digits.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputRecord {
    pub command: String,
    pub inputs: BTreeMap<String, String>,
    pub outputs: BTreeMap<String, String>,
    pub certified_digits: Option<u32>,
    pub elapsed_ms: Option<u64>,
}

impl OutputRecord {
    pub fn new(command: &str) -> OutputRecord {
        OutputRecord { command: command.to_string(), ..OutputRecord::default() }
    }

    pub fn input(mut self, key: &str, value: impl ToString) -> Self {
        self.inputs.insert(key.to_string(), value.to_string());
        self
    }

    pub fn out(mut self, key: &str, value: impl ToString) -> Self {
        self.outputs.insert(key.to_string(), value.to_string());
        self
    }

    /// A correctly rounded value and its digit count.
    pub fn real(self, key: &str, value: &HighPrecisionReal) -> Self {
        self.out(key, value).out(&format!("{key}_digits"), value.digits())
    }

    /// A ball rounded to at most `digits` certified digits.
    pub fn ball(self, key: &str, value: &Ball, digits: u32) -> Self {
        let r = certified_rounding(value, digits);
        self.real(key, &r)
    }

    pub fn digits(mut self, d: u32) -> Self {
        self.certified_digits = Some(d);
        self
    }
}

/// Correct rounding to the largest digit count up to `digits` that the ball fixes.
pub fn certified_rounding(value: &Ball, digits: u32) -> HighPrecisionReal {
    let cap = value.certified_digits().map_or(digits, |c| c.min(digits)).max(1);
    (1..=cap)
        .rev()
        .find_map(|d| value.round_sig(d))
        .unwrap_or_else(|| HighPrecisionReal::new(0.into(), 0, 0))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Streams records, flushing after each one.
pub struct RecordWriter<W: Write> {
    format: Format,
    out: W,
    header: Option<Vec<String>>,
}

impl<W: Write> RecordWriter<W> {
    pub fn new(format: Format, out: W) -> Self {
        RecordWriter { format, out, header: None }
    }

    pub fn write(&mut self, record: &OutputRecord) -> io::Result<()> {
        match self.format {
            Format::Json => {
                serde_json::to_writer(&mut self.out, record)?;
                writeln!(self.out)?;
            }
            Format::Csv => {
                let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(&mut self.out);
                let columns = csv_columns(record);
                if self.header.is_none() {
                    w.write_record(&columns)?;
                    self.header = Some(columns.clone());
                }
                if self.header.as_ref() != Some(&columns) {
                    return Err(io::Error::new(io::ErrorKind::InvalidData, "record shape changed mid-stream"));
                }
                w.write_record(csv_row(record))?;
                w.flush()?;
            }
        }
        self.out.flush()
    }
}

fn csv_columns(r: &OutputRecord) -> Vec<String> {
    let mut c = vec!["command".to_string(), "certified_digits".to_string(), "elapsed_ms".to_string()];
    c.extend(r.inputs.keys().map(|k| format!("input.{k}")));
    c.extend(r.outputs.keys().map(|k| format!("output.{k}")));
    c
}

fn csv_row(r: &OutputRecord) -> Vec<String> {
    let opt = |v: Option<String>| v.unwrap_or_default();
    let mut row = vec![
        r.command.clone(),
        opt(r.certified_digits.map(|d| d.to_string())),
        opt(r.elapsed_ms.map(|d| d.to_string())),
    ];
    row.extend(r.inputs.values().cloned());
    row.extend(r.outputs.values().cloned());
    row
}

/// Parses CSV produced by [`RecordWriter`] back into records.
pub fn read_csv(text: &str) -> Result<Vec<OutputRecord>, csv::Error> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let header = reader.headers()?.clone();
    let mut records = Vec::new();
    for row in reader.records() {
        let row = row?;
        let mut r = OutputRecord::default();
        for (name, value) in header.iter().zip(row.iter()) {
            match name {
                "command" => r.command = value.to_string(),
                "certified_digits" => r.certified_digits = value.parse().ok(),
                "elapsed_ms" => r.elapsed_ms = value.parse().ok(),
                _ => {
                    if let Some(k) = name.strip_prefix("input.") {
                        r.inputs.insert(k.to_string(), value.to_string());
                    } else if let Some(k) = name.strip_prefix("output.") {
                        r.outputs.insert(k.to_string(), value.to_string());
                    }
                }
            }
        }
        records.push(r);
    }
    Ok(records)
}

/// Parses JSON-lines output.
pub fn read_json_lines(text: &str) -> serde_json::Result<Vec<OutputRecord>> {
    text.lines().filter(|l| !l.trim().is_empty()).map(serde_json::from_str).collect()
}
