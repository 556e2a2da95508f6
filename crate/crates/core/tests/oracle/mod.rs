//! Brute-force reference implementations of the node metrics, written
//! against a dense edge table and sharing no code with the library.

#![allow(dead_code)]

use graphids::graph::{TrafficGraph, WeightPolicy};
use rand::Rng;

const INF: u64 = u64::MAX / 4;

/// Dense directed graph: `w[u][v]` is the accumulated weight of `u -> v`
/// (0 = no edge). Self-loops are kept in the table but never used.
#[derive(Debug, Clone)]
pub struct Dense {
    pub names: Vec<String>,
    pub w: Vec<Vec<u64>>,
}

impl Dense {
    pub fn n(&self) -> usize {
        self.names.len()
    }

    fn edges(&self) -> impl Iterator<Item = (usize, usize, u64)> + '_ {
        let n = self.n();
        (0..n).flat_map(move |u| (0..n).filter(move |&v| u != v && self.w[u][v] > 0).map(move |v| (u, v, self.w[u][v])))
    }

    /// Library graph built by replaying one `update` per unit of weight in a
    /// shuffled order.
    pub fn to_graph<R: Rng>(&self, rng: &mut R) -> TrafficGraph {
        let mut events = Vec::new();
        for u in 0..self.n() {
            for v in 0..self.n() {
                for _ in 0..self.w[u][v] {
                    events.push((u, v));
                }
            }
        }
        for i in (1..events.len()).rev() {
            events.swap(i, rng.random_range(0..=i));
        }
        let mut g = TrafficGraph::new();
        for (u, v) in events {
            g.update(&self.names[u], &self.names[v]);
        }
        g
    }
}

/// Random graph on up to `max_nodes` nodes with weights in 1..=5. Every node
/// touches at least one edge, possibly only a self-loop.
pub fn random_dense<R: Rng>(rng: &mut R, max_nodes: usize) -> Dense {
    let n = rng.random_range(1..=max_nodes);
    let p: f64 = rng.random_range(0.05..0.6);
    let mut w = vec![vec![0u64; n]; n];
    for (u, row) in w.iter_mut().enumerate() {
        for (v, cell) in row.iter_mut().enumerate() {
            let chance = if u == v { 0.1 } else { p };
            if rng.random_bool(chance) {
                *cell = rng.random_range(1..=5);
            }
        }
    }
    for u in 0..n {
        let touched = (0..n).any(|v| w[u][v] > 0 || w[v][u] > 0);
        if !touched {
            let v = rng.random_range(0..n);
            let wt = rng.random_range(1..=5);
            if rng.random_bool(0.5) {
                w[u][v] = wt;
            } else {
                w[v][u] = wt;
            }
        }
    }
    Dense {
        names: (0..n).map(|i| format!("n{i}")).collect(),
        w,
    }
}

fn degree_w(p: WeightPolicy, w: u64) -> u64 {
    match p {
        WeightPolicy::Unweighted => 1,
        WeightPolicy::Weighted | WeightPolicy::Mixed => w,
    }
}

fn length(p: WeightPolicy, w: u64) -> u64 {
    match p {
        WeightPolicy::Weighted => w,
        _ => 1,
    }
}

pub fn degrees(g: &Dense, p: WeightPolicy) -> Vec<(f64, f64)> {
    let mut out = vec![(0.0, 0.0); g.n()];
    for (u, v, w) in g.edges() {
        out[v].0 += degree_w(p, w) as f64;
        out[u].1 += degree_w(p, w) as f64;
    }
    out
}

/// All-pairs shortest distances by Floyd–Warshall.
pub fn distances(g: &Dense, p: WeightPolicy) -> Vec<Vec<u64>> {
    let n = g.n();
    let mut d = vec![vec![INF; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0;
    }
    for (u, v, w) in g.edges() {
        d[u][v] = d[u][v].min(length(p, w));
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if d[i][k] + d[k][j] < d[i][j] {
                    d[i][j] = d[i][k] + d[k][j];
                }
            }
        }
    }
    d
}

pub fn closeness(g: &Dense, p: WeightPolicy) -> Vec<f64> {
    let d = distances(g, p);
    let n = g.n();
    (0..n)
        .map(|v| {
            let reach: Vec<u64> = (0..n).filter(|&u| u != v && d[v][u] < INF).map(|u| d[v][u]).collect();
            if reach.is_empty() {
                return -10.0;
            }
            let r = reach.len() as f64;
            let total: u64 = reach.iter().sum();
            (r / total as f64) * (r / (n - 1) as f64)
        })
        .collect()
}

/// Enumerates every simple path from `s`, counting those that reach `t`
/// with length `target`, overall and per interior node.
fn count_paths(
    g: &Dense,
    p: WeightPolicy,
    at: usize,
    t: usize,
    len: u64,
    target: u64,
    path: &mut Vec<usize>,
    on_path: &mut [bool],
    total: &mut u64,
    through: &mut [u64],
) {
    if at == t {
        if len == target {
            *total += 1;
            for &x in &path[1..path.len() - 1] {
                through[x] += 1;
            }
        }
        return;
    }
    for next in 0..g.n() {
        let w = g.w[at][next];
        if next == at || w == 0 || on_path[next] {
            continue;
        }
        let l = len + length(p, w);
        if l > target {
            continue;
        }
        on_path[next] = true;
        path.push(next);
        count_paths(g, p, next, t, l, target, path, on_path, total, through);
        path.pop();
        on_path[next] = false;
    }
}

pub fn betweenness(g: &Dense, p: WeightPolicy) -> Vec<f64> {
    let n = g.n();
    if n < 3 {
        return vec![0.0; n];
    }
    let d = distances(g, p);
    let mut b = vec![0.0; n];
    for s in 0..n {
        for t in 0..n {
            if s == t || d[s][t] >= INF {
                continue;
            }
            let mut total = 0;
            let mut through = vec![0u64; n];
            let mut on_path = vec![false; n];
            on_path[s] = true;
            count_paths(g, p, s, t, 0, d[s][t], &mut vec![s], &mut on_path, &mut total, &mut through);
            assert!(total > 0);
            for v in 0..n {
                b[v] += through[v] as f64 / total as f64;
            }
        }
    }
    let norm = ((n - 1) * (n - 2)) as f64;
    b.iter().map(|x| x / norm).collect()
}

/// Dense power iteration of `Aᵀ + I` with max-normalization, the same
/// stopping rule as the library (tolerance 1e-8, 1000 steps).
pub fn eigenvector(g: &Dense, p: WeightPolicy) -> Vec<f64> {
    let n = g.n();
    let a: Vec<Vec<f64>> = (0..n)
        .map(|u| {
            (0..n)
                .map(|v| {
                    let w = g.w[u][v];
                    if u == v || w == 0 {
                        0.0
                    } else if p == WeightPolicy::Weighted {
                        w as f64
                    } else {
                        1.0
                    }
                })
                .collect()
        })
        .collect();
    let mut x = vec![1.0; n];
    for _ in 0..1000 {
        let mut y: Vec<f64> = (0..n).map(|v| x[v] + (0..n).map(|u| a[u][v] * x[u]).sum::<f64>()).collect();
        let m = y.iter().cloned().fold(0.0, f64::max);
        for e in y.iter_mut() {
            *e /= m;
        }
        let delta = x.iter().zip(&y).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        x = y;
        if delta < 1e-8 {
            return x;
        }
    }
    vec![-10.0; n]
}

fn projection(g: &Dense) -> Vec<Vec<bool>> {
    let n = g.n();
    let mut adj = vec![vec![false; n]; n];
    for (u, v, _) in g.edges() {
        adj[u][v] = true;
        adj[v][u] = true;
    }
    adj
}

fn bfs_without(adj: &[Vec<bool>], from: usize, removed: usize) -> Vec<u64> {
    let n = adj.len();
    let mut dist = vec![INF; n];
    dist[from] = 0;
    let mut queue = std::collections::VecDeque::from([from]);
    while let Some(u) = queue.pop_front() {
        for w in 0..n {
            if adj[u][w] && w != removed && dist[w] == INF {
                dist[w] = dist[u] + 1;
                queue.push_back(w);
            }
        }
    }
    dist
}

/// `(cc1, cc2)` per node on the undirected projection.
pub fn clustering(g: &Dense) -> Vec<(f64, f64)> {
    let adj = projection(g);
    let n = g.n();
    (0..n)
        .map(|v| {
            let nb: Vec<usize> = (0..n).filter(|&u| adj[v][u]).collect();
            let k = nb.len();
            if k < 2 {
                return (0.0, 0.0);
            }
            let (mut one, mut two) = (0u64, 0u64);
            for (i, &a) in nb.iter().enumerate() {
                let dist = bfs_without(&adj, a, v);
                for &b in &nb[i + 1..] {
                    match dist[b] {
                        1 => one += 1,
                        2 => two += 1,
                        _ => {}
                    }
                }
            }
            let pairs = (k * (k - 1) / 2) as f64;
            (one as f64 / pairs, two as f64 / pairs)
        })
        .collect()
}

/// All eight metrics per node, in feature order.
pub fn features(g: &Dense, p: WeightPolicy) -> Vec<[f64; 8]> {
    let deg = degrees(g, p);
    let clo = closeness(g, p);
    let bet = betweenness(g, p);
    let eig = eigenvector(g, p);
    let cc = clustering(g);
    (0..g.n())
        .map(|v| [deg[v].0 + deg[v].1, deg[v].0, deg[v].1, clo[v], bet[v], eig[v], cc[v].0, cc[v].1])
        .collect()
}
