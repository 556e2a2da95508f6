//! Derived-dataset file format.
//!
//! Comma-separated text with a fixed 19-column header: `src`, `dst`,
//! `label`, then the eight source metrics and the eight destination metrics
//! (`src_dc` ... `dst_cc2`). Feature values carry 12 significant digits;
//! integers, including the `-10` sentinel, are written without a fraction.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::metrics::FeatureVector;
use crate::pipeline::DerivedRecord;

pub const DERIVED_FEATURES: [&str; 16] = [
    "src_dc",
    "src_in_dc",
    "src_out_dc",
    "src_closeness",
    "src_betweenness",
    "src_eigenvector",
    "src_cc1",
    "src_cc2",
    "dst_dc",
    "dst_in_dc",
    "dst_out_dc",
    "dst_closeness",
    "dst_betweenness",
    "dst_eigenvector",
    "dst_cc1",
    "dst_cc2",
];

pub fn derived_header() -> Vec<&'static str> {
    let mut h = vec!["src", "dst", "label"];
    h.extend(DERIVED_FEATURES);
    h
}

/// Position of a derived feature name, e.g. `src_cc1` -> 6.
pub fn feature_index(name: &str) -> Option<usize> {
    DERIVED_FEATURES.iter().position(|f| *f == name)
}

/// Shortest decimal for `v` rounded to 12 significant digits.
pub fn format_value(v: f64) -> String {
    if v.is_finite() && v == v.trunc() && v.abs() < 1e15 {
        return format!("{}", v as i64);
    }
    let rounded: f64 = format!("{v:.11e}").parse().unwrap_or(v);
    format!("{rounded}")
}

pub fn write_derived<W: Write>(records: &[DerivedRecord], sink: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(derived_header())?;
    for r in records {
        let mut row = vec![r.src.clone(), r.dst.clone(), r.label.clone()];
        row.extend(r.features().iter().map(|&v| format_value(v)));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_derived<R: Read>(source: R) -> Result<Vec<DerivedRecord>> {
    let mut reader = csv::ReaderBuilder::new().flexible(true).from_reader(source);
    let found: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    let expected = derived_header();
    if found != expected {
        return Err(Error::HeaderMismatch {
            expected: expected.join(","),
            found: found.join(","),
        });
    }
    let mut out = Vec::new();
    for row in reader.records() {
        let row = row?;
        let line = row.position().map_or(0, |p| p.line());
        if row.len() != expected.len() {
            return Err(Error::MalformedRow {
                line,
                reason: format!("expected {} fields, found {}", expected.len(), row.len()),
            });
        }
        let mut values = [0.0; 16];
        for (k, slot) in values.iter_mut().enumerate() {
            let raw = row[3 + k].trim();
            *slot = raw.parse().map_err(|_| Error::MalformedRow {
                line,
                reason: format!("{} is not a number: `{raw}`", DERIVED_FEATURES[k]),
            })?;
        }
        let f_src = FeatureVector::from_array(values[..8].try_into().unwrap());
        let f_dst = FeatureVector::from_array(values[8..].try_into().unwrap());
        out.push(DerivedRecord {
            src: row[0].to_string(),
            dst: row[1].to_string(),
            label: row[2].to_string(),
            f_src,
            f_dst,
        });
    }
    Ok(out)
}
