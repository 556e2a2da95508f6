//! Parsing of labeled, chronologically ordered connection logs.
//!
//! The input is a delimited table with a header row, typically the CSV
//! output of a flow exporter. Four columns are mapped by name (source
//! address, destination address, timestamp and label); everything else is
//! carried along as opaque strings and never interpreted.

use std::fmt;
use std::io::{Read, Write};
use std::net::IpAddr;

use chrono::{DateTime, NaiveDate, NaiveDateTime};
use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Label value of the benign class. Compared case-insensitively.
pub const BENIGN: &str = "BENIGN";

/// Epoch microseconds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Timestamp(pub i64);

const NAIVE_FORMATS: &[&str] = &[
    "%Y-%m-%dT%H:%M:%S%.f",
    "%Y-%m-%d %H:%M:%S%.f",
    "%Y-%m-%dT%H:%M",
    "%Y-%m-%d %H:%M",
    "%d/%m/%Y %H:%M:%S%.f",
    "%d/%m/%Y %H:%M",
    "%d/%m/%Y %I:%M:%S %p",
    "%d/%m/%Y %I:%M %p",
];

impl Timestamp {
    pub fn from_micros(us: i64) -> Self {
        Timestamp(us)
    }

    pub fn micros(self) -> i64 {
        self.0
    }

    /// Parses ISO-8601 (with or without offset), day-first `d/m/Y H:M[:S]`
    /// as written by CICFlowMeter, or a bare number of epoch seconds.
    /// Times without an offset are taken as UTC.
    pub fn parse(s: &str) -> Option<Self> {
        let s = s.trim();
        if s.is_empty() {
            return None;
        }
        if let Ok(secs) = s.parse::<f64>() {
            if !secs.is_finite() {
                return None;
            }
            let us = (secs * 1e6).round();
            if us.abs() > i64::MAX as f64 {
                return None;
            }
            return Some(Timestamp(us as i64));
        }
        if let Ok(dt) = DateTime::parse_from_rfc3339(s) {
            return Some(Timestamp(dt.timestamp_micros()));
        }
        for fmt in NAIVE_FORMATS {
            if let Ok(dt) = NaiveDateTime::parse_from_str(s, fmt) {
                return Some(Timestamp(dt.and_utc().timestamp_micros()));
            }
        }
        if let Ok(d) = NaiveDate::parse_from_str(s, "%Y-%m-%d") {
            return Some(Timestamp(d.and_hms_opt(0, 0, 0)?.and_utc().timestamp_micros()));
        }
        None
    }
}

impl fmt::Display for Timestamp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match DateTime::from_timestamp_micros(self.0) {
            Some(dt) => write!(f, "{}", dt.naive_utc().format("%Y-%m-%dT%H:%M:%S%.6f")),
            None => write!(f, "{}", self.0 as f64 / 1e6),
        }
    }
}

/// One flow record.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Connection {
    pub src: String,
    pub dst: String,
    pub ts: Timestamp,
    /// `BENIGN` or an attack name.
    pub label: String,
    /// Unmapped columns, verbatim.
    pub classic: Vec<String>,
}

impl Connection {
    pub fn is_malicious(&self) -> bool {
        is_malicious_label(&self.label)
    }
}

pub fn is_malicious_label(label: &str) -> bool {
    !label.trim().eq_ignore_ascii_case(BENIGN)
}

/// Records sorted by timestamp, ties in input order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ConnectionDataset {
    records: Vec<Connection>,
    classic_columns: Vec<String>,
}

impl ConnectionDataset {
    /// Stable-sorts `records` by timestamp.
    pub fn new(mut records: Vec<Connection>, classic_columns: Vec<String>) -> Self {
        records.sort_by_key(|c| c.ts);
        ConnectionDataset {
            records,
            classic_columns,
        }
    }

    pub fn from_records(records: Vec<Connection>) -> Self {
        Self::new(records, Vec::new())
    }

    pub fn records(&self) -> &[Connection] {
        &self.records
    }

    pub fn classic_columns(&self) -> &[String] {
        &self.classic_columns
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn malicious_count(&self) -> usize {
        self.records.iter().filter(|c| c.is_malicious()).count()
    }

    pub fn benign_count(&self) -> usize {
        self.len() - self.malicious_count()
    }

    /// Number of records strictly before `boundary`.
    pub fn partition_point(&self, boundary: Timestamp) -> usize {
        self.records.partition_point(|c| c.ts < boundary)
    }

    fn subset(&self, records: Vec<Connection>) -> Self {
        ConnectionDataset {
            records,
            classic_columns: self.classic_columns.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColumnMapping {
    pub src: String,
    pub dst: String,
    pub timestamp: String,
    pub label: String,
}

impl Default for ColumnMapping {
    fn default() -> Self {
        ColumnMapping {
            src: "Source IP".into(),
            dst: "Destination IP".into(),
            timestamp: "Timestamp".into(),
            label: "Label".into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BadRecordPolicy {
    #[default]
    FailFast,
    /// Drop malformed rows and count them.
    Skip,
}

#[derive(Debug, Clone)]
pub struct ParseOptions {
    pub columns: ColumnMapping,
    pub delimiter: u8,
    pub bad_records: BadRecordPolicy,
}

impl Default for ParseOptions {
    fn default() -> Self {
        ParseOptions {
            columns: ColumnMapping::default(),
            delimiter: b',',
            bad_records: BadRecordPolicy::FailFast,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Parsed {
    pub dataset: ConnectionDataset,
    pub skipped: usize,
}

fn column_index(headers: &[String], name: &str) -> Result<usize> {
    let name = name.trim();
    headers
        .iter()
        .position(|h| h == name)
        .ok_or_else(|| Error::MissingColumn(name.to_string()))
}

fn parse_endpoint(raw: Option<&str>, field: &'static str, line: u64) -> Result<String> {
    let value = raw.map(str::trim).unwrap_or("");
    if value.is_empty() {
        return Err(Error::MissingField { field, line });
    }
    if value.parse::<IpAddr>().is_err() {
        return Err(Error::InvalidField {
            field,
            value: value.to_string(),
            line,
        });
    }
    Ok(value.to_string())
}

/// Reads a connection table and returns it sorted chronologically.
pub fn parse_connections<R: Read>(source: R, opts: &ParseOptions) -> Result<Parsed> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(opts.delimiter)
        .flexible(true)
        .from_reader(source);
    let headers: Vec<String> = reader
        .headers()?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();
    let src_col = column_index(&headers, &opts.columns.src)?;
    let dst_col = column_index(&headers, &opts.columns.dst)?;
    let ts_col = column_index(&headers, &opts.columns.timestamp)?;
    let label_col = column_index(&headers, &opts.columns.label)?;
    let mapped = [src_col, dst_col, ts_col, label_col];
    let classic_idx: Vec<usize> = (0..headers.len()).filter(|i| !mapped.contains(i)).collect();
    let classic_columns = classic_idx.iter().map(|&i| headers[i].clone()).collect();

    let mut records = Vec::new();
    let mut skipped = 0;
    for row in reader.records() {
        let row = row?;
        let line = row.position().map_or(0, |p| p.line());
        // Blank trailing lines are common in exported CSVs.
        if row.iter().all(|f| f.trim().is_empty()) {
            continue;
        }
        let parsed = (|| -> Result<Connection> {
            let src = parse_endpoint(row.get(src_col), "src", line)?;
            let dst = parse_endpoint(row.get(dst_col), "dst", line)?;
            let raw_ts = row.get(ts_col).unwrap_or("").trim();
            if raw_ts.is_empty() {
                return Err(Error::MissingField {
                    field: "timestamp",
                    line,
                });
            }
            let ts = Timestamp::parse(raw_ts).ok_or_else(|| Error::InvalidField {
                field: "timestamp",
                value: raw_ts.to_string(),
                line,
            })?;
            let label = row.get(label_col).unwrap_or("").trim();
            if label.is_empty() {
                return Err(Error::MissingField {
                    field: "label",
                    line,
                });
            }
            let classic = classic_idx
                .iter()
                .map(|&i| row.get(i).unwrap_or("").to_string())
                .collect();
            Ok(Connection {
                src,
                dst,
                ts,
                label: label.to_string(),
                classic,
            })
        })();
        match (parsed, opts.bad_records) {
            (Ok(c), _) => records.push(c),
            (Err(_), BadRecordPolicy::Skip) => skipped += 1,
            (Err(e), BadRecordPolicy::FailFast) => return Err(e),
        }
    }
    Ok(Parsed {
        dataset: ConnectionDataset::new(records, classic_columns),
        skipped,
    })
}

/// Writes the dataset with the default column names, so that
/// `parse_connections` with default options reads it back unchanged.
pub fn write_connections<W: Write>(d: &ConnectionDataset, sink: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(sink);
    let cols = ColumnMapping::default();
    let mut header = vec![
        cols.src.as_str(),
        cols.dst.as_str(),
        cols.timestamp.as_str(),
        cols.label.as_str(),
    ];
    header.extend(d.classic_columns.iter().map(String::as_str));
    w.write_record(&header)?;
    for c in &d.records {
        let ts = c.ts.to_string();
        let mut row = vec![c.src.as_str(), c.dst.as_str(), ts.as_str(), c.label.as_str()];
        row.extend(c.classic.iter().map(String::as_str));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Splits at `boundary`: records with `ts < boundary` go to the first
/// (training) side, the rest to the second.
pub fn split_train_test(
    d: &ConnectionDataset,
    boundary: Timestamp,
) -> Result<(ConnectionDataset, ConnectionDataset)> {
    let cut = d.partition_point(boundary);
    if cut == 0 {
        return Err(Error::EmptySplit {
            boundary: boundary.to_string(),
            side: "training",
        });
    }
    if cut == d.len() {
        return Err(Error::EmptySplit {
            boundary: boundary.to_string(),
            side: "test",
        });
    }
    let (train, test) = d.records.split_at(cut);
    Ok((d.subset(train.to_vec()), d.subset(test.to_vec())))
}

/// Indices (ascending) of every malicious entry plus an equally sized,
/// uniformly drawn subset of the benign entries.
pub fn undersample_indices(malicious: &[bool], seed: u64) -> Result<Vec<usize>> {
    let (attack, benign): (Vec<usize>, Vec<usize>) =
        (0..malicious.len()).partition(|&i| malicious[i]);
    if benign.len() < attack.len() {
        return Err(Error::InsufficientBenign {
            benign: benign.len(),
            malicious: attack.len(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut keep = attack;
    keep.extend(
        index::sample(&mut rng, benign.len(), keep.len())
            .into_iter()
            .map(|j| benign[j]),
    );
    keep.sort_unstable();
    Ok(keep)
}

/// Keeps all malicious records and a seeded random benign subset of the
/// same size, in chronological order.
pub fn undersample_benign(d: &ConnectionDataset, seed: u64) -> Result<ConnectionDataset> {
    let flags: Vec<bool> = d.records.iter().map(Connection::is_malicious).collect();
    let keep = undersample_indices(&flags, seed)?;
    Ok(d.subset(keep.into_iter().map(|i| d.records[i].clone()).collect()))
}
