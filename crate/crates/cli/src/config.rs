//! Run settings: command-line flags overlaid by an optional `key = value`
//! file. Keys are the long flag names.

use std::fs;
use std::path::Path;

use graphids::graph::WeightPolicy;
use graphids::ingest::{BadRecordPolicy, ColumnMapping, ParseOptions};
use graphids::modelsel::{TrainConfig, DEFAULT_C_GRID, DEFAULT_GAMMA_GRID};
use graphids::pipeline::Sigma;
use serde::Serialize;
use sha2::{Digest, Sha256};

/// Everything that can influence an output file. Output locations are not
/// part of it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Settings {
    pub sigma: Sigma,
    pub omega: WeightPolicy,
    pub sigmas: Vec<Sigma>,
    pub omegas: Vec<WeightPolicy>,
    pub seed: u64,
    pub boundary: Option<String>,
    pub src_col: String,
    pub dst_col: String,
    pub time_col: String,
    pub label_col: String,
    pub delimiter: char,
    pub skip_bad_records: bool,
    pub c_grid: Vec<f64>,
    pub gamma_grid: Vec<f64>,
    pub ffs_cap: usize,
}

impl Default for Settings {
    fn default() -> Self {
        let cols = ColumnMapping::default();
        Settings {
            sigma: Sigma::All,
            omega: WeightPolicy::Unweighted,
            sigmas: vec![Sigma::Fixed(1), Sigma::Fixed(5), Sigma::All],
            omegas: WeightPolicy::ALL.to_vec(),
            seed: 0,
            boundary: None,
            src_col: cols.src,
            dst_col: cols.dst,
            time_col: cols.timestamp,
            label_col: cols.label,
            delimiter: ',',
            skip_bad_records: false,
            c_grid: DEFAULT_C_GRID.to_vec(),
            gamma_grid: DEFAULT_GAMMA_GRID.to_vec(),
            ffs_cap: 8,
        }
    }
}

fn list<T: std::str::FromStr>(value: &str) -> Result<Vec<T>, String> {
    let items: Result<Vec<T>, _> = value.split(',').map(|v| v.trim().parse()).collect();
    match items {
        Ok(v) if !v.is_empty() => Ok(v),
        _ => Err(format!("invalid list `{value}`")),
    }
}

fn one<T: std::str::FromStr>(value: &str) -> Result<T, String> {
    value.trim().parse().map_err(|_| format!("invalid value `{value}`"))
}

impl Settings {
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        self.assign(key, value.trim()).map_err(|e| format!("{key}: {e}"))
    }

    fn assign(&mut self, key: &str, v: &str) -> Result<(), String> {
        match key {
            "sigma" => self.sigma = one(v)?,
            "omega" => self.omega = one(v)?,
            "sigmas" => self.sigmas = list(v)?,
            "omegas" => self.omegas = list(v)?,
            "seed" => self.seed = one(v)?,
            "boundary" => self.boundary = Some(v.to_string()),
            "src-col" => self.src_col = v.to_string(),
            "dst-col" => self.dst_col = v.to_string(),
            "time-col" => self.time_col = v.to_string(),
            "label-col" => self.label_col = v.to_string(),
            "delimiter" => self.delimiter = one(v)?,
            "skip-bad-records" => self.skip_bad_records = one(v)?,
            "c-grid" => self.c_grid = list(v)?,
            "gamma-grid" => self.gamma_grid = list(v)?,
            "ffs-cap" => self.ffs_cap = one(v)?,
            _ => return Err("unknown setting".into()),
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<(), String> {
        let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| format!("{}:{}: expected key = value", path.display(), n + 1))?;
            self.set(k.trim(), v)
                .map_err(|e| format!("{}:{}: {e}", path.display(), n + 1))?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.ffs_cap == 0 {
            return Err("ffs-cap must be at least 1".into());
        }
        if self.sigmas.is_empty() || self.omegas.is_empty() {
            return Err("sigmas and omegas must not be empty".into());
        }
        let positive = |g: &[f64]| g.iter().all(|v| v.is_finite() && *v > 0.0);
        if !positive(&self.c_grid) || !positive(&self.gamma_grid) {
            return Err("grid values must be positive".into());
        }
        if !self.delimiter.is_ascii() {
            return Err("delimiter must be a single ASCII character".into());
        }
        Ok(())
    }

    pub fn parse_options(&self) -> ParseOptions {
        ParseOptions {
            columns: ColumnMapping {
                src: self.src_col.clone(),
                dst: self.dst_col.clone(),
                timestamp: self.time_col.clone(),
                label: self.label_col.clone(),
            },
            delimiter: self.delimiter as u8,
            bad_records: if self.skip_bad_records {
                BadRecordPolicy::Skip
            } else {
                BadRecordPolicy::FailFast
            },
        }
    }

    pub fn train_config(&self) -> TrainConfig {
        let mut cfg = TrainConfig {
            seed: self.seed,
            c_grid: self.c_grid.clone(),
            gamma_grid: self.gamma_grid.clone(),
            ..Default::default()
        };
        cfg.ffs.cap = self.ffs_cap;
        cfg
    }

    /// SHA-256 over the settings, the command and the digests of its inputs.
    pub fn digest(&self, command: &str, inputs: &[String]) -> String {
        let body = serde_json::json!({ "command": command, "settings": self, "inputs": inputs });
        hex::encode(Sha256::digest(body.to_string().as_bytes()))
    }
}

pub fn file_digest(path: &Path) -> std::io::Result<String> {
    Ok(hex::encode(Sha256::digest(fs::read(path)?)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keys_override() {
        let mut s = Settings::default();
        s.set("sigma", "5").unwrap();
        s.set("omega", "m").unwrap();
        s.set("c-grid", "1, 10").unwrap();
        s.set("sigmas", "N").unwrap();
        assert_eq!(s.sigma, Sigma::Fixed(5));
        assert_eq!(s.omega, WeightPolicy::Mixed);
        assert_eq!(s.c_grid, vec![1.0, 10.0]);
        assert_eq!(s.sigmas, vec![Sigma::All]);
        assert!(s.set("sigma", "0").is_err());
        assert!(s.set("colour", "blue").is_err());
        assert!(s.set("gamma-grid", "").is_err());
    }

    #[test]
    fn digest_tracks_settings_and_inputs() {
        let a = Settings::default();
        let mut b = a.clone();
        assert_eq!(a.digest("extract", &[]), b.digest("extract", &[]));
        b.seed = 1;
        assert_ne!(a.digest("extract", &[]), b.digest("extract", &[]));
        assert_ne!(a.digest("extract", &[]), a.digest("extract", &["x".into()]));
        assert_ne!(a.digest("extract", &[]), a.digest("train", &[]));
    }
}
