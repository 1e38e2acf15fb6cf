//! CSV tables and JSON reports. Formatting is fixed so that identical runs
//! produce identical bytes.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use backlund::verify::{GridReport, TableRow};
use serde::Serialize;

use crate::fail::Failure;

pub const CSV_HEADER: [&str; 5] = ["z", "y", "dy", "d2y", "residual"];

/// `{:.16e}` keeps 17 significant digits, enough to round-trip an `f64`.
fn sci(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn sink(path: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    match path {
        Some(p) => {
            let f = File::create(p).map_err(|e| Failure::input("", format!("cannot create {}: {e}", p.display())))?;
            Ok(Box::new(BufWriter::new(f)))
        }
        None => Ok(Box::new(io::stdout().lock())),
    }
}

fn io_failure(e: impl std::fmt::Display) -> Failure {
    Failure::input("", format!("write error: {e}"))
}

pub fn write_table(out: &mut dyn Write, rows: &[TableRow]) -> Result<(), Failure> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER).map_err(io_failure)?;
    for r in rows {
        w.write_record([sci(r.z), sci(r.y), sci(r.dy), sci(r.d2y), sci(r.residual)])
            .map_err(io_failure)?;
    }
    w.flush().map_err(io_failure)
}

pub fn write_json<T: Serialize>(out: &mut dyn Write, value: &T) -> Result<(), Failure> {
    serde_json::to_writer_pretty(&mut *out, value).map_err(io_failure)?;
    writeln!(out).map_err(io_failure)?;
    out.flush().map_err(io_failure)
}

#[derive(Debug, Serialize)]
pub struct VerifyReport {
    pub problem: String,
    pub tolerance: f64,
    pub n_points: usize,
    pub max_abs_residual: f64,
    pub max_rel_residual: f64,
    pub argmax_z: f64,
    pub pass: bool,
}

impl VerifyReport {
    pub fn new(problem: &str, g: &GridReport) -> Self {
        Self {
            problem: problem.to_string(),
            tolerance: g.tolerance,
            n_points: g.n_points,
            max_abs_residual: g.max_abs_residual,
            max_rel_residual: g.max_rel_residual,
            argmax_z: g.argmax_z,
            pass: g.pass(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct LadderReport {
    #[serde(flatten)]
    pub grid: VerifyReport,
    #[serde(rename = "R")]
    pub r: f64,
    #[serde(rename = "S")]
    pub s: f64,
    pub steps: Vec<[f64; 2]>,
}

#[derive(Debug, Serialize)]
pub struct CrosscheckReport {
    pub problem: String,
    pub tolerance: f64,
    pub limit: f64,
    pub z0: f64,
    pub z1: f64,
    pub max_deviation: f64,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
    pub pass: bool,
}

#[derive(Debug, Serialize)]
pub struct FdeReport {
    pub problem: String,
    pub tolerance: f64,
    pub samples: usize,
    pub seed: u64,
    pub max_abs_residual: f64,
    pub max_rel_residual: f64,
    pub argmax_z: f64,
    pub argmax_v: f64,
    pub pass: bool,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits_round_trip() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, f64::MIN_POSITIVE] {
            let s = sci(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
        }
        assert_eq!(sci(1.0), "1.0000000000000000e0");
    }

    #[test]
    fn table_has_header() {
        let mut buf = Vec::new();
        let row = TableRow {
            z: 1.0,
            y: 2.0,
            dy: 0.0,
            d2y: 0.0,
            residual: 0.0,
        };
        write_table(&mut buf, &[row]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("z,y,dy,d2y,residual"));
        assert!(lines
            .next()
            .unwrap()
            .starts_with("1.0000000000000000e0,2.0000000000000000e0,"));
    }
}
