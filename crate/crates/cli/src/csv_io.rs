//! Sweep CSV writer and its read-back.

use qcorr_core::bell::BellBranch;
use qcorr_core::sweep::CorrelationReport;

use crate::error::CliError;
use crate::format::fmt_num;

pub const SWEEP_HEADER: [&str; 13] = [
    "theta",
    "damping",
    "concurrence",
    "bell_S",
    "bell_branch",
    "steering_T16",
    "unsteering_tU",
    "unsteering_TU",
    "entangled",
    "bell_nonlocal",
    "steerable",
    "unsteerable",
    "undetermined",
];

pub fn csv_writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new())
}

pub fn finish(w: csv::Writer<Vec<u8>>) -> Result<Vec<u8>, CliError> {
    w.into_inner()
        .map_err(|e| CliError::Io(std::io::Error::other(e.to_string())))
}

fn flag(b: bool) -> String {
    if b { "1" } else { "0" }.to_string()
}

fn opt(x: Option<f64>) -> String {
    x.map(fmt_num).unwrap_or_default()
}

pub fn report_record(r: &CorrelationReport) -> Vec<String> {
    let f = r.flags;
    vec![
        fmt_num(r.point.theta()),
        fmt_num(r.point.damping()),
        fmt_num(r.concurrence),
        fmt_num(r.bell_s),
        r.bell_branch.as_str().to_string(),
        fmt_num(r.t16),
        opt(r.t_u),
        opt(r.scaled_t_u),
        flag(f.entangled),
        flag(f.bell_nonlocal),
        flag(f.steerable),
        flag(f.unsteerable),
        flag(f.undetermined),
    ]
}

pub fn write_sweep_csv(reports: &[CorrelationReport]) -> Result<Vec<u8>, CliError> {
    let mut w = csv_writer();
    w.write_record(SWEEP_HEADER)?;
    for r in reports {
        w.write_record(report_record(r))?;
    }
    finish(w)
}

/// One parsed line of a sweep CSV.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub theta: f64,
    pub damping: f64,
    pub concurrence: f64,
    pub bell_s: f64,
    pub bell_branch: BellBranch,
    pub t16: f64,
    pub t_u: Option<f64>,
    pub scaled_t_u: Option<f64>,
    /// entangled, bell_nonlocal, steerable, unsteerable, undetermined.
    pub flags: [bool; 5],
}

fn num(field: &str, name: &str, line: usize) -> Result<f64, CliError> {
    let x: f64 = field
        .parse()
        .map_err(|_| CliError::Input(format!("line {line}: {name} = {field:?} is not a number")))?;
    if !x.is_finite() {
        return Err(CliError::Input(format!(
            "line {line}: {name} is not finite"
        )));
    }
    Ok(x)
}

fn opt_num(field: &str, name: &str, line: usize) -> Result<Option<f64>, CliError> {
    if field.is_empty() {
        Ok(None)
    } else {
        num(field, name, line).map(Some)
    }
}

fn parse_flag(field: &str, name: &str, line: usize) -> Result<bool, CliError> {
    match field {
        "0" => Ok(false),
        "1" => Ok(true),
        _ => Err(CliError::Input(format!(
            "line {line}: {name} = {field:?} is not 0/1"
        ))),
    }
}

/// Parses a sweep CSV; the header must match [`SWEEP_HEADER`] exactly.
pub fn parse_sweep_csv(text: &str) -> Result<Vec<SweepRow>, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(text.as_bytes());
    let header = reader.headers()?.clone();
    if header.iter().ne(SWEEP_HEADER) {
        return Err(CliError::Input(format!("unexpected header {:?}", header)));
    }
    let mut rows = Vec::new();
    for (k, rec) in reader.records().enumerate() {
        let rec = rec?;
        let line = k + 2;
        if rec.len() != SWEEP_HEADER.len() {
            return Err(CliError::Input(format!("line {line}: expected 13 fields")));
        }
        let f = |i: usize| &rec[i];
        rows.push(SweepRow {
            theta: num(f(0), "theta", line)?,
            damping: num(f(1), "damping", line)?,
            concurrence: num(f(2), "concurrence", line)?,
            bell_s: num(f(3), "bell_S", line)?,
            bell_branch: f(4)
                .parse()
                .map_err(|e| CliError::Input(format!("line {line}: {e}")))?,
            t16: num(f(5), "steering_T16", line)?,
            t_u: opt_num(f(6), "unsteering_tU", line)?,
            scaled_t_u: opt_num(f(7), "unsteering_TU", line)?,
            flags: [
                parse_flag(f(8), "entangled", line)?,
                parse_flag(f(9), "bell_nonlocal", line)?,
                parse_flag(f(10), "steerable", line)?,
                parse_flag(f(11), "unsteerable", line)?,
                parse_flag(f(12), "undetermined", line)?,
            ],
        });
    }
    Ok(rows)
}
