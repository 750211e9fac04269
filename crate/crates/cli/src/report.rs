use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::config::Format;
use crate::failure::Failure;

/// One verified property. `pass` is decided by the constructor that made it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Record {
    pub check_id: String,
    pub paper_ref: String,
    pub lhs: f64,
    pub rhs: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Record {
    /// `lhs <= rhs + tolerance`.
    pub fn at_most(id: impl Into<String>, paper_ref: &str, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        Self {
            check_id: id.into(),
            paper_ref: paper_ref.into(),
            lhs,
            rhs,
            tolerance,
            pass: lhs <= rhs + tolerance,
        }
    }

    /// `|lhs - rhs| <= tolerance`.
    pub fn close(id: impl Into<String>, paper_ref: &str, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        Self {
            check_id: id.into(),
            paper_ref: paper_ref.into(),
            lhs,
            rhs,
            tolerance,
            pass: (lhs - rhs).abs() <= tolerance,
        }
    }

    /// Both sides are truth values, recorded as 0/1.
    pub fn agree(id: impl Into<String>, paper_ref: &str, lhs: bool, rhs: bool) -> Self {
        Self::close(id, paper_ref, f64::from(u8::from(lhs)), f64::from(u8::from(rhs)), 0.0)
    }

    pub fn failed(id: impl Into<String>, paper_ref: &str) -> Self {
        Self {
            check_id: id.into(),
            paper_ref: paper_ref.into(),
            lhs: f64::NAN,
            rhs: f64::NAN,
            tolerance: f64::NAN,
            pass: false,
        }
    }
}

pub fn render(records: &[Record], format: Format) -> Result<Vec<u8>, Failure> {
    match format {
        Format::Json => {
            let mut out = serde_json::to_vec_pretty(records).map_err(|e| Failure::Io(e.to_string()))?;
            out.push(b'\n');
            Ok(out)
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for r in records {
                w.serialize(r).map_err(|e| Failure::Io(e.to_string()))?;
            }
            w.into_inner().map_err(|e| Failure::Io(e.to_string()))
        }
    }
}

/// Writes to `out`, or to stdout when absent.
pub fn emit(records: &[Record], format: Format, out: Option<&Path>) -> Result<(), Failure> {
    let bytes = render(records, format)?;
    match out {
        Some(p) => std::fs::write(p, bytes).map_err(|e| Failure::Io(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(&bytes)?;
            Ok(stdout.flush()?)
        }
    }
}
