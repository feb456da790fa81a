//! CSV ingestion and emission.
//!
//! Input series: header `t,x1,...,xp,y` with strictly increasing integer
//! `t`. Every output file starts with `#` comment lines holding the
//! resolved configuration; readers skip them. Numbers are written in the
//! shortest form that parses back to the same `f64`.

use std::fmt;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use qfcv_core::aci::RollingRun;
use qfcv_core::{IntervalRecord, TimeSeries};

use crate::harness::MetricRow;

#[derive(Debug)]
pub enum CsvError {
    /// Problem with the contents; `row` counts data rows from 1.
    Row { row: usize, msg: String },
    Header(String),
    Io(std::io::Error),
}

impl fmt::Display for CsvError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CsvError::Row { row, msg } => write!(f, "row {row}: {msg}"),
            CsvError::Header(m) => write!(f, "header: {m}"),
            CsvError::Io(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for CsvError {}

impl From<std::io::Error> for CsvError {
    fn from(e: std::io::Error) -> Self {
        CsvError::Io(e)
    }
}

impl From<csv::Error> for CsvError {
    fn from(e: csv::Error) -> Self {
        let row = e.position().map(|p| p.record() as usize).unwrap_or(0);
        match e.into_kind() {
            csv::ErrorKind::Io(io) => CsvError::Io(io),
            kind => CsvError::Row {
                row,
                msg: format!("{kind:?}"),
            },
        }
    }
}

/// Reads a series from `t,x1,...,xp,y` CSV text.
pub fn read_series<R: Read>(input: R) -> Result<TimeSeries, CsvError> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(input);
    let header = rdr.headers()?.clone();
    let cols: Vec<&str> = header.iter().collect();
    if cols.len() < 2 || cols[0] != "t" || cols[cols.len() - 1] != "y" {
        return Err(CsvError::Header(format!(
            "expected t,x1,...,xp,y, got {}",
            cols.join(",")
        )));
    }
    let p = cols.len() - 2;
    for (j, c) in cols[1..=p].iter().enumerate() {
        if *c != format!("x{}", j + 1) {
            return Err(CsvError::Header(format!("column {} should be x{}, got {c}", j + 2, j + 1)));
        }
    }
    let mut series = TimeSeries::new(p);
    let mut last_t: Option<i64> = None;
    let mut x = vec![0.0; p];
    for (i, rec) in rdr.records().enumerate() {
        let row = i + 1;
        let rec = rec?;
        if rec.len() != p + 2 {
            return Err(CsvError::Row {
                row,
                msg: format!("expected {} fields, found {}", p + 2, rec.len()),
            });
        }
        let t: i64 = rec[0].parse().map_err(|_| CsvError::Row {
            row,
            msg: format!("t = {:?} is not an integer", &rec[0]),
        })?;
        if let Some(prev) = last_t {
            if t <= prev {
                return Err(CsvError::Row {
                    row,
                    msg: format!("t = {t} does not increase (previous {prev})"),
                });
            }
        }
        last_t = Some(t);
        let cell = |j: usize| -> Result<f64, CsvError> {
            let s = &rec[j];
            if s.is_empty() {
                return Err(CsvError::Row {
                    row,
                    msg: format!("empty value in column {}", cols[j]),
                });
            }
            let v: f64 = s.parse().map_err(|_| CsvError::Row {
                row,
                msg: format!("{s:?} in column {} is not a number", cols[j]),
            })?;
            if !v.is_finite() {
                return Err(CsvError::Row {
                    row,
                    msg: format!("non-finite value in column {}", cols[j]),
                });
            }
            Ok(v)
        };
        for (j, xj) in x.iter_mut().enumerate() {
            *xj = cell(j + 1)?;
        }
        let y = cell(p + 1)?;
        series.push(&x, y).map_err(|e| CsvError::Row { row, msg: e.to_string() })?;
    }
    if series.is_empty() {
        return Err(CsvError::Row {
            row: 0,
            msg: "no data rows".into(),
        });
    }
    Ok(series)
}

pub fn read_series_file(path: &Path) -> Result<TimeSeries, CsvError> {
    read_series(File::open(path)?)
}

/// `# `-prefixed copy of `text`.
pub fn provenance_block(text: &str) -> String {
    text.lines().map(|l| format!("# {l}\n")).collect()
}

fn writer<W: Write>(mut out: W, provenance: &str) -> Result<csv::Writer<W>, CsvError> {
    out.write_all(provenance_block(provenance).as_bytes())?;
    Ok(csv::Writer::from_writer(out))
}

/// Writes `series` as `t,x1,...,xp,y` with `t = 1..n`.
pub fn write_series<W: Write>(out: W, series: &TimeSeries, provenance: &str) -> Result<(), CsvError> {
    let mut w = writer(out, provenance)?;
    let p = series.dim();
    let mut header = vec!["t".to_string()];
    header.extend((1..=p).map(|j| format!("x{j}")));
    header.push("y".into());
    w.write_record(&header)?;
    for t in 1..=series.len() {
        let mut rec = vec![t.to_string()];
        rec.extend(series.x(t).iter().map(|v| v.to_string()));
        rec.push(series.y(t).to_string());
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Rolling intervals as `t,lo,hi,err_sto,covered,theta`.
pub fn write_rolling<W: Write>(out: W, run: &RollingRun, provenance: &str) -> Result<(), CsvError> {
    let mut w = writer(out, provenance)?;
    w.write_record(["t", "lo", "hi", "err_sto", "covered", "theta"])?;
    for r in &run.records {
        w.write_record([
            r.t.to_string(),
            r.interval.lo.to_string(),
            r.interval.hi.to_string(),
            r.err_sto.to_string(),
            u8::from(r.covered).to_string(),
            r.theta.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// One row per interval: `method,t,alpha,lo,hi,point`.
pub fn write_intervals<W: Write>(out: W, rows: &[(IntervalRecord, f64)], provenance: &str) -> Result<(), CsvError> {
    let mut w = writer(out, provenance)?;
    w.write_record(["method", "t", "alpha", "lo", "hi", "point"])?;
    for (iv, point) in rows {
        w.write_record([
            iv.method.to_string(),
            iv.t.to_string(),
            iv.alpha.to_string(),
            iv.lo.to_string(),
            iv.hi.to_string(),
            point.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_metrics<W: Write>(out: W, rows: &[MetricRow], provenance: &str) -> Result<(), CsvError> {
    let mut w = writer(out, provenance)?;
    w.write_record(MetricRow::HEADER)?;
    for r in rows {
        w.write_record(r.record())?;
    }
    w.flush()?;
    Ok(())
}

/// Generic table writer for summaries.
pub fn write_table<W: Write>(out: W, header: &[&str], rows: &[Vec<String>], provenance: &str) -> Result<(), CsvError> {
    let mut w = writer(out, provenance)?;
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush()?;
    Ok(())
}
