//! Block-wise graph population and generation of the derived dataset.
//!
//! Connections are grouped into blocks of `sigma` records. Every record is
//! described by the metrics of its two endpoints on the graph snapshot
//! selected by [`block_index`]: `phi = sigma * ceil(i / sigma) - 1` while
//! `ceil(i / sigma) < ceil(n / sigma)`, and the final graph `n - 1` for the
//! last block. With `sigma = n` the whole dataset is a single block and
//! every record sees the final graph.
//!
//! [`generate`] walks the dataset once, inserting connections up to each
//! block boundary and computing the snapshot metrics there, so no snapshot
//! is ever copied.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{NodeId, TrafficGraph, WeightPolicy};
use crate::ingest::{is_malicious_label, undersample_indices, ConnectionDataset, Timestamp};
use crate::metrics::{FeatureVector, SnapshotMetrics};

/// Block size: a fixed count, or the whole dataset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sigma {
    Fixed(usize),
    All,
}

impl Sigma {
    pub fn resolve(self, n: usize) -> usize {
        match self {
            Sigma::Fixed(s) => s,
            Sigma::All => n,
        }
    }
}

impl fmt::Display for Sigma {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sigma::Fixed(s) => write!(f, "{s}"),
            Sigma::All => f.write_str("N"),
        }
    }
}

impl FromStr for Sigma {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("n") || s.eq_ignore_ascii_case("all") {
            return Ok(Sigma::All);
        }
        match s.parse::<usize>() {
            Ok(v) if v >= 1 => Ok(Sigma::Fixed(v)),
            _ => Err(Error::InvalidParameter(format!(
                "block size must be a positive integer or N, got `{s}`"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockSchedule {
    sigma: usize,
    n: usize,
}

impl BlockSchedule {
    pub fn new(sigma: usize, n: usize) -> Result<Self> {
        if sigma == 0 || sigma > n {
            return Err(Error::InvalidBlockSize { sigma, n });
        }
        Ok(BlockSchedule { sigma, n })
    }

    pub fn sigma(&self) -> usize {
        self.sigma
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of blocks, `ceil(n / sigma)`.
    pub fn blocks(&self) -> usize {
        self.n.div_ceil(self.sigma)
    }
}

/// Snapshot index for record `i`; `None` is the empty graph before the
/// first insertion.
pub fn block_index(i: usize, schedule: &BlockSchedule) -> Result<Option<usize>> {
    let BlockSchedule { sigma, n } = *schedule;
    if i >= n {
        return Err(Error::IndexOutOfRange { index: i, len: n });
    }
    if sigma == n {
        return Ok(Some(n - 1));
    }
    let block = i.div_ceil(sigma);
    if block < schedule.blocks() {
        Ok((sigma * block).checked_sub(1))
    } else {
        Ok(Some(n - 1))
    }
}

/// One row of the derived dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DerivedRecord {
    pub src: String,
    pub dst: String,
    pub label: String,
    pub f_src: FeatureVector,
    pub f_dst: FeatureVector,
}

impl DerivedRecord {
    pub fn is_malicious(&self) -> bool {
        is_malicious_label(&self.label)
    }

    /// Source metrics followed by destination metrics.
    pub fn features(&self) -> [f64; 16] {
        let mut out = [0.0; 16];
        out[..8].copy_from_slice(&self.f_src.to_array());
        out[8..].copy_from_slice(&self.f_dst.to_array());
        out
    }
}

fn block_features(
    metrics: Option<&SnapshotMetrics<'_>>,
    names: &[&str],
) -> HashMap<String, FeatureVector> {
    let Some(m) = metrics else {
        return names
            .iter()
            .map(|n| (n.trim().to_string(), FeatureVector::UNSEEN))
            .collect();
    };
    let mut ids: Vec<NodeId> = names.iter().filter_map(|n| m.graph().node_id(n)).collect();
    ids.sort_unstable();
    ids.dedup();
    let computed: Vec<(NodeId, FeatureVector)> =
        ids.par_iter().map(|&v| (v, m.node_features(v))).collect();
    let mut cache: HashMap<String, FeatureVector> = computed
        .into_iter()
        .map(|(v, f)| (m.graph().name(v).to_string(), f))
        .collect();
    for n in names {
        cache
            .entry(n.trim().to_string())
            .or_insert(FeatureVector::UNSEEN);
    }
    cache
}

/// Builds the derived dataset: one record per connection, in input order.
pub fn generate(
    d: &ConnectionDataset,
    schedule: &BlockSchedule,
    policy: WeightPolicy,
) -> Result<Vec<DerivedRecord>> {
    if d.is_empty() {
        return Err(Error::Empty("connection dataset"));
    }
    if schedule.n() != d.len() {
        return Err(Error::InvalidParameter(format!(
            "schedule covers {} records but the dataset has {}",
            schedule.n(),
            d.len()
        )));
    }
    let records = d.records();
    let mut graph = TrafficGraph::new();
    let mut inserted = 0;
    let mut out = Vec::with_capacity(records.len());
    let mut start = 0;
    while start < records.len() {
        let phi = block_index(start, schedule)?;
        let mut end = start + 1;
        while end < records.len() && block_index(end, schedule)? == phi {
            end += 1;
        }
        let target = phi.map_or(0, |p| p + 1);
        for c in &records[inserted..target] {
            graph.update(&c.src, &c.dst);
        }
        inserted = inserted.max(target);

        let block = &records[start..end];
        let names: Vec<&str> = block
            .iter()
            .flat_map(|c| [c.src.as_str(), c.dst.as_str()])
            .collect();
        let metrics = phi.map(|_| SnapshotMetrics::compute(&graph, policy));
        let cache = block_features(metrics.as_ref(), &names);
        for c in block {
            out.push(DerivedRecord {
                src: c.src.clone(),
                dst: c.dst.clone(),
                label: c.label.clone(),
                f_src: cache[c.src.trim()],
                f_dst: cache[c.dst.trim()],
            });
        }
        start = end;
    }
    Ok(out)
}

/// Splits derived records (aligned with `d`) at `boundary` and undersamples
/// the benign part of the training side with `seed`.
pub fn split_derived(
    d: &ConnectionDataset,
    derived: &[DerivedRecord],
    boundary: Timestamp,
    seed: u64,
) -> Result<(Vec<DerivedRecord>, Vec<DerivedRecord>)> {
    if derived.len() != d.len() {
        return Err(Error::DimensionMismatch {
            expected: d.len(),
            found: derived.len(),
        });
    }
    let cut = d.partition_point(boundary);
    for (side, empty) in [("training", cut == 0), ("test", cut == d.len())] {
        if empty {
            return Err(Error::EmptySplit {
                boundary: boundary.to_string(),
                side,
            });
        }
    }
    let (train, test) = derived.split_at(cut);
    let flags: Vec<bool> = train.iter().map(DerivedRecord::is_malicious).collect();
    let keep = undersample_indices(&flags, seed)?;
    Ok((keep.into_iter().map(|i| train[i].clone()).collect(), test.to_vec()))
}
