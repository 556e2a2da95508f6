//! Closeness and betweenness from one shortest-path pass per source.
//!
//! Edge lengths are 1, or the raw weight under [`WeightPolicy::Weighted`].
//! Distances are integers, so equal-length paths compare exactly and path
//! counts are never split by rounding. Betweenness uses Brandes' dependency
//! accumulation; predecessors are recovered from incoming edges instead of
//! being stored.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, VecDeque};

use rayon::prelude::*;

use crate::error::Result;
use crate::graph::{NodeId, TrafficGraph, WeightPolicy};

use super::{lookup, SENTINEL};

const UNREACHED: u64 = u64::MAX;

#[derive(Debug, Clone, PartialEq)]
pub struct PathMetrics {
    pub closeness: Vec<f64>,
    pub betweenness: Vec<f64>,
}

struct Scratch {
    dist: Vec<u64>,
    sigma: Vec<f64>,
    delta: Vec<f64>,
    order: Vec<u32>,
    queue: VecDeque<u32>,
    heap: BinaryHeap<Reverse<(u64, u32)>>,
}

impl Scratch {
    fn new(n: usize) -> Self {
        Scratch {
            dist: vec![UNREACHED; n],
            sigma: vec![0.0; n],
            delta: vec![0.0; n],
            order: Vec::with_capacity(n),
            queue: VecDeque::new(),
            heap: BinaryHeap::new(),
        }
    }

    fn reset(&mut self) {
        for &v in &self.order {
            let v = v as usize;
            self.dist[v] = UNREACHED;
            self.sigma[v] = 0.0;
            self.delta[v] = 0.0;
        }
        self.order.clear();
    }

    /// Fills `dist` and `order` (settled nodes by non-decreasing distance).
    fn search(&mut self, g: &TrafficGraph, s: NodeId, policy: WeightPolicy) {
        self.reset();
        self.dist[s.index()] = 0;
        if policy == WeightPolicy::Weighted {
            self.heap.push(Reverse((0, s.0)));
            while let Some(Reverse((d, v))) = self.heap.pop() {
                if d > self.dist[v as usize] || self.sigma[v as usize] != 0.0 {
                    continue;
                }
                // sigma doubles as the "settled" mark until it is filled in.
                self.sigma[v as usize] = 1.0;
                self.order.push(v);
                for e in g.out_edges(NodeId(v)) {
                    if e.is_self_loop() {
                        continue;
                    }
                    let nd = d + e.weight;
                    let w = e.dst.index();
                    if nd < self.dist[w] {
                        self.dist[w] = nd;
                        self.heap.push(Reverse((nd, e.dst.0)));
                    }
                }
            }
            // Nodes that were pushed but are never settled cannot exist: every
            // pushed node is eventually popped at its final distance.
        } else {
            self.queue.push_back(s.0);
            while let Some(v) = self.queue.pop_front() {
                self.order.push(v);
                let d = self.dist[v as usize] + 1;
                for e in g.out_edges(NodeId(v)) {
                    let w = e.dst.index();
                    if self.dist[w] == UNREACHED {
                        self.dist[w] = d;
                        self.queue.push_back(e.dst.0);
                    }
                }
            }
        }
    }

    /// Number of shortest paths from the source to each settled node.
    fn count_paths(&mut self, g: &TrafficGraph, policy: WeightPolicy) {
        let s = self.order[0] as usize;
        self.sigma[s] = 1.0;
        for i in 1..self.order.len() {
            let w = self.order[i] as usize;
            let mut count = 0.0;
            for e in g.in_edges(NodeId(w as u32)) {
                let v = e.src.index();
                if v != w
                    && self.dist[v] != UNREACHED
                    && self.dist[v] + policy.path_weight(e.weight) == self.dist[w]
                {
                    count += self.sigma[v];
                }
            }
            self.sigma[w] = count;
        }
    }

    /// Adds the source's pair dependencies to `acc`.
    fn accumulate(&mut self, g: &TrafficGraph, policy: WeightPolicy, acc: &mut [f64]) {
        for i in (1..self.order.len()).rev() {
            let w = self.order[i] as usize;
            let coeff = (1.0 + self.delta[w]) / self.sigma[w];
            for e in g.in_edges(NodeId(w as u32)) {
                let v = e.src.index();
                if v != w
                    && self.dist[v] != UNREACHED
                    && self.dist[v] + policy.path_weight(e.weight) == self.dist[w]
                {
                    self.delta[v] += self.sigma[v] * coeff;
                }
            }
            acc[w] += self.delta[w];
        }
    }

    fn closeness(&self, n: usize) -> f64 {
        let reached = self.order.len() - 1;
        if reached == 0 {
            return SENTINEL;
        }
        let total: u64 = self.order.iter().map(|&v| self.dist[v as usize]).sum();
        let r = reached as f64;
        (r / total as f64) * (r / (n - 1) as f64)
    }
}

/// Sources are processed in fixed-size chunks whose partial sums are added
/// in chunk order, so the result does not depend on the worker count.
fn chunk_len(n: usize) -> usize {
    n.div_ceil(64).max(16)
}

/// Closeness and betweenness for every node.
pub fn shortest_path_metrics(g: &TrafficGraph, policy: WeightPolicy) -> PathMetrics {
    let n = g.node_count();
    let sources: Vec<u32> = (0..n as u32).collect();
    let partials: Vec<(Vec<f64>, Vec<f64>)> = sources
        .par_chunks(chunk_len(n))
        .map(|chunk| {
            let mut scratch = Scratch::new(n);
            let mut acc = vec![0.0; n];
            let mut close = Vec::with_capacity(chunk.len());
            for &s in chunk {
                scratch.search(g, NodeId(s), policy);
                close.push(scratch.closeness(n));
                scratch.count_paths(g, policy);
                scratch.accumulate(g, policy, &mut acc);
            }
            (close, acc)
        })
        .collect();

    let mut closeness = Vec::with_capacity(n);
    let mut betweenness = vec![0.0; n];
    for (close, acc) in partials {
        closeness.extend(close);
        for (b, a) in betweenness.iter_mut().zip(acc) {
            *b += a;
        }
    }
    if n < 3 {
        betweenness.iter_mut().for_each(|b| *b = 0.0);
    } else {
        let scale = ((n - 1) * (n - 2)) as f64;
        betweenness.iter_mut().for_each(|b| *b /= scale);
    }
    PathMetrics {
        closeness,
        betweenness,
    }
}

pub fn closeness(g: &TrafficGraph, v: &str, policy: WeightPolicy) -> Result<f64> {
    let s = lookup(g, v)?;
    let mut scratch = Scratch::new(g.node_count());
    scratch.search(g, s, policy);
    Ok(scratch.closeness(g.node_count()))
}

pub fn betweenness(g: &TrafficGraph, v: &str, policy: WeightPolicy) -> Result<f64> {
    let id = lookup(g, v)?;
    Ok(shortest_path_metrics(g, policy).betweenness[id.index()])
}
