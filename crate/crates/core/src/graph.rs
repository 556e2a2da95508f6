//! Directed traffic graph with integer edge weights.
//!
//! Every connection `(src, dst)` either inserts the edge with weight 1 or
//! increments the weight of the existing edge. Weights are always stored;
//! whether a metric looks at them is decided by [`WeightPolicy`] when the
//! metric is computed.

use std::collections::HashMap;
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::ConnectionDataset;

/// Dense node index, assigned in order of first appearance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub src: NodeId,
    pub dst: NodeId,
    pub weight: u64,
}

impl Edge {
    #[inline]
    pub fn is_self_loop(&self) -> bool {
        self.src == self.dst
    }
}

/// How edge weights enter the metrics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightPolicy {
    /// Every edge counts once and has length 1.
    Unweighted,
    /// Weights are degree contributions, traversal lengths and adjacency magnitudes.
    Weighted,
    /// Weights count for the degree metrics only.
    Mixed,
}

impl WeightPolicy {
    pub const ALL: [WeightPolicy; 3] = [
        WeightPolicy::Unweighted,
        WeightPolicy::Weighted,
        WeightPolicy::Mixed,
    ];

    /// Contribution of an edge to a degree sum.
    #[inline]
    pub fn degree_weight(self, w: u64) -> u64 {
        match self {
            WeightPolicy::Unweighted => 1,
            WeightPolicy::Weighted | WeightPolicy::Mixed => w,
        }
    }

    /// Length of an edge in shortest-path metrics, and its magnitude in the
    /// adjacency operator.
    #[inline]
    pub fn path_weight(self, w: u64) -> u64 {
        match self {
            WeightPolicy::Weighted => w,
            WeightPolicy::Unweighted | WeightPolicy::Mixed => 1,
        }
    }

    pub fn short_name(self) -> &'static str {
        match self {
            WeightPolicy::Unweighted => "u",
            WeightPolicy::Weighted => "w",
            WeightPolicy::Mixed => "m",
        }
    }
}

impl fmt::Display for WeightPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WeightPolicy::Unweighted => "unweighted",
            WeightPolicy::Weighted => "weighted",
            WeightPolicy::Mixed => "mixed",
        })
    }
}

impl FromStr for WeightPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "u" | "unweighted" => Ok(WeightPolicy::Unweighted),
            "w" | "weighted" => Ok(WeightPolicy::Weighted),
            "m" | "mixed" => Ok(WeightPolicy::Mixed),
            other => Err(Error::InvalidParameter(format!(
                "unknown weight policy `{other}` (expected unweighted, weighted or mixed)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct TrafficGraph {
    names: Vec<String>,
    ids: HashMap<String, NodeId>,
    edges: Vec<Edge>,
    edge_ids: HashMap<(NodeId, NodeId), usize>,
    out_adj: Vec<Vec<usize>>,
    in_adj: Vec<Vec<usize>>,
}

impl TrafficGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn node_count(&self) -> usize {
        self.names.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn node_id(&self, name: &str) -> Option<NodeId> {
        self.ids.get(name.trim()).copied()
    }

    pub fn name(&self, v: NodeId) -> &str {
        &self.names[v.index()]
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.names.len() as u32).map(NodeId)
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn weight(&self, src: &str, dst: &str) -> Option<u64> {
        let s = self.node_id(src)?;
        let d = self.node_id(dst)?;
        self.edge_ids.get(&(s, d)).map(|&e| self.edges[e].weight)
    }

    /// Outgoing edges of `v`, self-loops included.
    pub fn out_edges(&self, v: NodeId) -> impl Iterator<Item = &Edge> + '_ {
        self.out_adj[v.index()].iter().map(move |&e| &self.edges[e])
    }

    /// Incoming edges of `v`, self-loops included.
    pub fn in_edges(&self, v: NodeId) -> impl Iterator<Item = &Edge> + '_ {
        self.in_adj[v.index()].iter().map(move |&e| &self.edges[e])
    }

    fn intern(&mut self, name: &str) -> NodeId {
        if let Some(&id) = self.ids.get(name) {
            return id;
        }
        let id = NodeId(self.names.len() as u32);
        self.names.push(name.to_string());
        self.ids.insert(name.to_string(), id);
        self.out_adj.push(Vec::new());
        self.in_adj.push(Vec::new());
        id
    }

    /// Adds both endpoints and inserts `(src, dst)` with weight 1, or bumps
    /// the weight of the existing edge.
    pub fn update(&mut self, src: &str, dst: &str) {
        let s = self.intern(src.trim());
        let d = self.intern(dst.trim());
        match self.edge_ids.get(&(s, d)) {
            Some(&e) => self.edges[e].weight += 1,
            None => {
                let e = self.edges.len();
                self.edges.push(Edge {
                    src: s,
                    dst: d,
                    weight: 1,
                });
                self.edge_ids.insert((s, d), e);
                self.out_adj[s.index()].push(e);
                self.in_adj[d.index()].push(e);
            }
        }
    }

    /// Sorted `src,dst,weight` lines.
    pub fn edge_list(&self) -> Vec<(String, String, u64)> {
        let mut list: Vec<_> = self
            .edges
            .iter()
            .map(|e| {
                (
                    self.name(e.src).to_string(),
                    self.name(e.dst).to_string(),
                    e.weight,
                )
            })
            .collect();
        list.sort();
        list
    }

    pub fn write_edge_list<W: Write>(&self, mut sink: W) -> Result<()> {
        for (s, d, w) in self.edge_list() {
            writeln!(sink, "{s},{d},{w}")?;
        }
        Ok(())
    }
}

/// Graphs are equal when they have the same node names and the same
/// weighted edges, regardless of insertion order.
impl PartialEq for TrafficGraph {
    fn eq(&self, other: &Self) -> bool {
        if self.node_count() != other.node_count() || self.edge_count() != other.edge_count() {
            return false;
        }
        let mut a: Vec<&String> = self.names.iter().collect();
        let mut b: Vec<&String> = other.names.iter().collect();
        a.sort();
        b.sort();
        a == b && self.edge_list() == other.edge_list()
    }
}

impl Eq for TrafficGraph {}

/// Folds the first `upto + 1` connections into an empty graph; `None` is
/// the empty graph that precedes the first connection.
pub fn populate(d: &ConnectionDataset, upto: Option<usize>) -> Result<TrafficGraph> {
    let mut g = TrafficGraph::new();
    let Some(last) = upto else {
        return Ok(g);
    };
    if last >= d.len() {
        return Err(Error::IndexOutOfRange {
            index: last,
            len: d.len(),
        });
    }
    for c in &d.records()[..=last] {
        g.update(&c.src, &c.dst);
    }
    Ok(g)
}
