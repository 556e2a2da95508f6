use crate::error::Result;
use crate::graph::{NodeId, TrafficGraph, WeightPolicy};

use super::lookup;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    In,
    Out,
    Both,
}

/// `(in, out)` degree of `v`; edge counts under the unweighted policy,
/// weight sums otherwise.
pub fn degree_of(g: &TrafficGraph, v: NodeId, policy: WeightPolicy) -> (f64, f64) {
    let sum = |it: &mut dyn Iterator<Item = &crate::graph::Edge>| -> u64 {
        it.filter(|e| !e.is_self_loop())
            .map(|e| policy.degree_weight(e.weight))
            .sum()
    };
    let d_in = sum(&mut g.in_edges(v));
    let d_out = sum(&mut g.out_edges(v));
    (d_in as f64, d_out as f64)
}

pub fn degree(g: &TrafficGraph, v: &str, policy: WeightPolicy, direction: Direction) -> Result<f64> {
    let (d_in, d_out) = degree_of(g, lookup(g, v)?, policy);
    Ok(match direction {
        Direction::In => d_in,
        Direction::Out => d_out,
        Direction::Both => d_in + d_out,
    })
}
