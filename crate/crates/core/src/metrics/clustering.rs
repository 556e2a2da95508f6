//! Local clustering at neighbor distance 1 and 2.
//!
//! Computed on the undirected, unweighted projection of the graph. For a
//! node `v` with neighbors `N(v)`, `k = |N(v)|`, the coefficient at distance
//! `d` is the share of the `k(k-1)/2` neighbor pairs whose distance in the
//! projection with `v` removed is exactly `d`. At `d = 1` this is the
//! usual local clustering coefficient.

use crate::error::{Error, Result};
use crate::graph::{NodeId, TrafficGraph};

use super::lookup;

/// Sorted, deduplicated undirected neighbor lists without self-loops.
pub struct UndirectedView {
    adj: Vec<Vec<u32>>,
}

impl UndirectedView {
    pub fn new(g: &TrafficGraph) -> Self {
        let mut adj = vec![Vec::new(); g.node_count()];
        for e in g.edges() {
            if !e.is_self_loop() {
                adj[e.src.index()].push(e.dst.0);
                adj[e.dst.index()].push(e.src.0);
            }
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        UndirectedView { adj }
    }

    pub fn neighbors(&self, v: NodeId) -> &[u32] {
        &self.adj[v.index()]
    }

    /// `(cc1, cc2)` of `v`.
    pub fn clustering_pair(&self, v: NodeId) -> (f64, f64) {
        let nb = &self.adj[v.index()];
        let k = nb.len();
        if k < 2 {
            return (0.0, 0.0);
        }
        let is_nb = |x: u32| nb.binary_search(&x).is_ok();
        let mut seen = std::collections::HashSet::new();
        let mut adjacent = 0usize;
        let mut at_two = 0usize;
        for &u in nb {
            let nu = &self.adj[u as usize];
            adjacent += nu.iter().filter(|&&y| y > u && is_nb(y)).count();
            // neighbors of v reachable from u in two steps avoiding v, farther than 1
            seen.clear();
            for &x in nu {
                if x == v.0 {
                    continue;
                }
                for &y in &self.adj[x as usize] {
                    if y > u && is_nb(y) && nu.binary_search(&y).is_err() && seen.insert(y) {
                        at_two += 1;
                    }
                }
            }
        }
        let pairs = (k * (k - 1) / 2) as f64;
        (adjacent as f64 / pairs, at_two as f64 / pairs)
    }
}

pub fn clustering_pair(g: &TrafficGraph, v: &str) -> Result<(f64, f64)> {
    let id = lookup(g, v)?;
    Ok(UndirectedView::new(g).clustering_pair(id))
}

/// Clustering coefficient of `v` at neighbor distance `d` (1 or 2).
pub fn clustering(g: &TrafficGraph, v: &str, d: u8) -> Result<f64> {
    let (cc1, cc2) = clustering_pair(g, v)?;
    match d {
        1 => Ok(cc1),
        2 => Ok(cc2),
        _ => Err(Error::InvalidParameter(format!(
            "clustering distance must be 1 or 2, got {d}"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(edges: &[(&str, &str)]) -> TrafficGraph {
        let mut g = TrafficGraph::new();
        for (a, b) in edges {
            g.update(a, b);
        }
        g
    }

    #[test]
    fn triangle() {
        let g = graph(&[("a", "b"), ("c", "b"), ("a", "c")]);
        for v in ["a", "b", "c"] {
            assert_eq!(clustering(&g, v, 1).unwrap(), 1.0);
            assert_eq!(clustering(&g, v, 2).unwrap(), 0.0);
        }
    }

    #[test]
    fn star() {
        let g = graph(&[("c", "x"), ("y", "c"), ("c", "z")]);
        assert_eq!(clustering(&g, "c", 1).unwrap(), 0.0);
        assert_eq!(clustering(&g, "c", 2).unwrap(), 0.0);
        assert_eq!(clustering(&g, "x", 1).unwrap(), 0.0);
    }

    #[test]
    fn four_cycle_distance_two() {
        let g = graph(&[("a", "b"), ("b", "c"), ("c", "d"), ("d", "a")]);
        for v in ["a", "b", "c", "d"] {
            assert_eq!(clustering(&g, v, 1).unwrap(), 0.0);
            assert_eq!(clustering(&g, v, 2).unwrap(), 1.0);
        }
    }

    #[test]
    fn direction_and_duplicates_are_projected_away() {
        let g = graph(&[("a", "b"), ("b", "a"), ("a", "c"), ("c", "b"), ("b", "c"), ("a", "a")]);
        assert_eq!(clustering(&g, "a", 1).unwrap(), 1.0);
        assert!(clustering(&g, "a", 3).is_err());
    }

    #[test]
    fn mixed_distances() {
        // v's neighbors: a, b, c. a-b adjacent, b-w-c at distance 2, a..c at 3
        let g = graph(&[("v", "a"), ("v", "b"), ("v", "c"), ("a", "b"), ("b", "w"), ("w", "c")]);
        let (cc1, cc2) = clustering_pair(&g, "v").unwrap();
        assert!((cc1 - 1.0 / 3.0).abs() < 1e-15);
        assert!((cc2 - 1.0 / 3.0).abs() < 1e-15);
    }
}
