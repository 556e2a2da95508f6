//! Node metrics of a traffic-graph snapshot.
//!
//! Eight values are extracted per node, always in this order:
//!
//! | field         | meaning                                    | domain            |
//! |---------------|--------------------------------------------|-------------------|
//! | `dc`          | degree (in + out)                          | `[0, ∞)`          |
//! | `in_dc`       | in-degree                                  | `[0, ∞)`          |
//! | `out_dc`      | out-degree                                 | `[0, ∞)`          |
//! | `closeness`   | Wasserman–Faust closeness over out-paths   | `[0, 1] ∪ {-10}`  |
//! | `betweenness` | normalized directed betweenness            | `[0, 1] ∪ {-10}`  |
//! | `eigenvector` | max-normalized dominant eigenvector        | `[0, 1] ∪ {-10}`  |
//! | `cc1`         | clustering coefficient, distance 1         | `[0, 1]`          |
//! | `cc2`         | clustering coefficient, distance 2         | `[0, 1]`          |
//!
//! `-10` stands in for values that are infinite or undefined: a node that
//! reaches nobody, a node not yet present in the snapshot, or a power
//! iteration that did not converge. Self-loops never contribute to any
//! metric.

mod clustering;
mod degree;
mod eigenvector;
mod paths;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{NodeId, TrafficGraph, WeightPolicy};

pub use clustering::{clustering, clustering_pair, UndirectedView};
pub use degree::{degree, degree_of, Direction};
pub use eigenvector::{eigenvector, eigenvector_all, EIGEN_MAX_ITER, EIGEN_TOL};
pub use paths::{betweenness, closeness, shortest_path_metrics, PathMetrics};

/// Out-of-range stand-in for infinite or undefined values.
pub const SENTINEL: f64 = -10.0;

pub const FEATURE_NAMES: [&str; 8] = [
    "dc",
    "in_dc",
    "out_dc",
    "closeness",
    "betweenness",
    "eigenvector",
    "cc1",
    "cc2",
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub dc: f64,
    pub in_dc: f64,
    pub out_dc: f64,
    pub closeness: f64,
    pub betweenness: f64,
    pub eigenvector: f64,
    pub cc1: f64,
    pub cc2: f64,
}

impl FeatureVector {
    /// Features of a node that is not in the snapshot.
    pub const UNSEEN: FeatureVector = FeatureVector {
        dc: 0.0,
        in_dc: 0.0,
        out_dc: 0.0,
        closeness: SENTINEL,
        betweenness: SENTINEL,
        eigenvector: SENTINEL,
        cc1: 0.0,
        cc2: 0.0,
    };

    pub fn to_array(&self) -> [f64; 8] {
        [
            self.dc,
            self.in_dc,
            self.out_dc,
            self.closeness,
            self.betweenness,
            self.eigenvector,
            self.cc1,
            self.cc2,
        ]
    }

    pub fn from_array(v: [f64; 8]) -> Self {
        FeatureVector {
            dc: v[0],
            in_dc: v[1],
            out_dc: v[2],
            closeness: v[3],
            betweenness: v[4],
            eigenvector: v[5],
            cc1: v[6],
            cc2: v[7],
        }
    }

    /// Checks the per-field domains.
    pub fn is_valid(&self) -> bool {
        let unit_or_sentinel = |x: f64| (0.0..=1.0).contains(&x) || x == SENTINEL;
        self.dc >= 0.0
            && self.in_dc >= 0.0
            && self.out_dc >= 0.0
            && self.dc == self.in_dc + self.out_dc
            && unit_or_sentinel(self.closeness)
            && unit_or_sentinel(self.betweenness)
            && unit_or_sentinel(self.eigenvector)
            && (0.0..=1.0).contains(&self.cc1)
            && (0.0..=1.0).contains(&self.cc2)
    }
}

/// Whole-graph metrics of one snapshot. Betweenness, closeness and
/// eigenvector centrality are computed for every node up front; degrees and
/// clustering are computed per node on request.
pub struct SnapshotMetrics<'g> {
    graph: &'g TrafficGraph,
    policy: WeightPolicy,
    paths: PathMetrics,
    eigen: Option<Vec<f64>>,
    undirected: UndirectedView,
}

impl<'g> SnapshotMetrics<'g> {
    pub fn compute(graph: &'g TrafficGraph, policy: WeightPolicy) -> Self {
        let (paths, eigen) = rayon::join(
            || shortest_path_metrics(graph, policy),
            || eigenvector_all(graph, policy),
        );
        SnapshotMetrics {
            graph,
            policy,
            paths,
            eigen,
            undirected: UndirectedView::new(graph),
        }
    }

    pub fn graph(&self) -> &'g TrafficGraph {
        self.graph
    }

    pub fn node_features(&self, v: NodeId) -> FeatureVector {
        let (in_dc, out_dc) = degree_of(self.graph, v, self.policy);
        let (cc1, cc2) = self.undirected.clustering_pair(v);
        FeatureVector {
            dc: in_dc + out_dc,
            in_dc,
            out_dc,
            closeness: self.paths.closeness[v.index()],
            betweenness: self.paths.betweenness[v.index()],
            eigenvector: self.eigen.as_ref().map_or(SENTINEL, |e| e[v.index()]),
            cc1,
            cc2,
        }
    }

    /// Features of `name`, or [`FeatureVector::UNSEEN`] if it is not a node.
    pub fn features(&self, name: &str) -> FeatureVector {
        match self.graph.node_id(name) {
            Some(v) => self.node_features(v),
            None => FeatureVector::UNSEEN,
        }
    }
}

/// All eight metrics of `v`; nodes absent from `g` get the unseen vector.
pub fn extract(g: &TrafficGraph, v: &str, policy: WeightPolicy) -> FeatureVector {
    if g.node_id(v).is_none() {
        return FeatureVector::UNSEEN;
    }
    SnapshotMetrics::compute(g, policy).features(v)
}

pub(crate) fn lookup(g: &TrafficGraph, v: &str) -> Result<NodeId> {
    g.node_id(v).ok_or_else(|| Error::UnknownNode(v.to_string()))
}
