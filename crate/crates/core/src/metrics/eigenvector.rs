//! Eigenvector centrality by power iteration.
//!
//! Each step aggregates over incoming edges, `x'_v = x_v + Σ_{u→v} a_uv x_u`,
//! i.e. iterates `Aᵀ + I`. The shift leaves the eigenvectors unchanged and
//! keeps the iteration from oscillating on periodic graphs such as
//! bidirectional client/server pairs. The vector is rescaled to a maximum
//! of 1 after every step.

use crate::error::Result;
use crate::graph::{TrafficGraph, WeightPolicy};

use super::{lookup, SENTINEL};

/// Convergence threshold on the max-norm change between iterations.
pub const EIGEN_TOL: f64 = 1e-8;
pub const EIGEN_MAX_ITER: usize = 1000;

/// Centrality of every node, or `None` when the iteration does not converge.
pub fn eigenvector_all(g: &TrafficGraph, policy: WeightPolicy) -> Option<Vec<f64>> {
    let n = g.node_count();
    let mut x = vec![1.0; n];
    let mut next = vec![0.0; n];
    for _ in 0..EIGEN_MAX_ITER {
        for v in g.nodes() {
            let mut acc = x[v.index()];
            for e in g.in_edges(v) {
                if !e.is_self_loop() {
                    acc += policy.path_weight(e.weight) as f64 * x[e.src.index()];
                }
            }
            next[v.index()] = acc;
        }
        let max = next.iter().copied().fold(0.0, f64::max);
        let mut change: f64 = 0.0;
        for (xn, xo) in next.iter_mut().zip(&x) {
            *xn /= max;
            change = change.max((*xn - xo).abs());
        }
        std::mem::swap(&mut x, &mut next);
        if change < EIGEN_TOL {
            return Some(x);
        }
    }
    None
}

pub fn eigenvector(g: &TrafficGraph, v: &str, policy: WeightPolicy) -> Result<f64> {
    let id = lookup(g, v)?;
    Ok(eigenvector_all(g, policy).map_or(SENTINEL, |x| x[id.index()]))
}
