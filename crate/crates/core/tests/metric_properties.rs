mod oracle;

use graphids::graph::{TrafficGraph, WeightPolicy};
use graphids::metrics::{closeness, clustering_pair, SnapshotMetrics, SENTINEL};
use oracle::Dense;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn dense(n: usize, edges: &[(usize, usize, u64)]) -> Dense {
    let mut w = vec![vec![0; n]; n];
    for &(u, v, x) in edges {
        w[u][v] = x;
    }
    Dense {
        names: (0..n).map(|i| format!("n{i}")).collect(),
        w,
    }
}

// Expected values below were produced by the brute-force oracle and frozen.
#[test]
fn oracle_frozen_examples() {
    let u = WeightPolicy::Unweighted;
    let path = dense(3, &[(0, 1, 1), (1, 2, 1)]);
    assert_eq!(oracle::closeness(&path, u), vec![2.0 / 3.0, 1.0 / 2.0, -10.0]);
    assert_eq!(oracle::betweenness(&path, u), vec![0.0, 0.5, 0.0]);

    let square = dense(4, &[(0, 1, 1), (1, 2, 1), (2, 3, 1), (3, 0, 1)]);
    assert!(oracle::clustering(&square).iter().all(|&c| c == (0.0, 1.0)));

    let decay = dense(3, &[(0, 1, 1), (1, 2, 1), (2, 1, 1)]);
    let e = oracle::eigenvector(&decay, u);
    assert!(e[0] < 1e-6 && (e[1] - 1.0).abs() < 1e-6 && (e[2] - 1.0).abs() < 1e-6);

    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let g = path.to_graph(&mut rng);
    assert_eq!(closeness(&g, "n0", u).unwrap(), 2.0 / 3.0);
    let g = square.to_graph(&mut rng);
    assert_eq!(clustering_pair(&g, "n0").unwrap(), (0.0, 1.0));
}

fn graph_from(seed: u64) -> (Dense, TrafficGraph) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = oracle::random_dense(&mut rng, 10);
    let g = d.to_graph(&mut rng);
    (d, g)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn values_stay_in_domain(seed in any::<u64>()) {
        let (d, g) = graph_from(seed);
        for policy in WeightPolicy::ALL {
            let m = SnapshotMetrics::compute(&g, policy);
            for name in &d.names {
                let f = m.features(name);
                prop_assert!(f.is_valid());
                prop_assert_eq!(f.dc, f.in_dc + f.out_dc);
                for v in [f.closeness, f.betweenness, f.eigenvector] {
                    prop_assert!(v == SENTINEL || (0.0..=1.0).contains(&v));
                }
                prop_assert!((0.0..=1.0).contains(&f.cc1) && (0.0..=1.0).contains(&f.cc2));
            }
        }
    }

    #[test]
    fn policies_differ_only_where_weights_apply(seed in any::<u64>()) {
        let (d, g) = graph_from(seed);
        let u = SnapshotMetrics::compute(&g, WeightPolicy::Unweighted);
        let w = SnapshotMetrics::compute(&g, WeightPolicy::Weighted);
        let m = SnapshotMetrics::compute(&g, WeightPolicy::Mixed);
        for name in &d.names {
            let (fu, fw, fm) = (u.features(name).to_array(), w.features(name).to_array(), m.features(name).to_array());
            prop_assert_eq!(&fm[3..], &fu[3..]);
            prop_assert_eq!(&fm[..3], &fw[..3]);
            prop_assert_eq!(&fw[6..], &fu[6..]);
        }
    }

    #[test]
    fn unweighted_ignores_multiplicity(seed in any::<u64>()) {
        let (d, g) = graph_from(seed);
        let mut flat = d.clone();
        for row in flat.w.iter_mut() {
            for x in row.iter_mut() {
                *x = (*x).min(1);
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 1);
        let g1 = flat.to_graph(&mut rng);
        let a = SnapshotMetrics::compute(&g, WeightPolicy::Unweighted);
        let b = SnapshotMetrics::compute(&g1, WeightPolicy::Unweighted);
        for name in &d.names {
            let (x, y) = (a.features(name).to_array(), b.features(name).to_array());
            for k in 0..8 {
                prop_assert!((x[k] - y[k]).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn cc1_is_textbook_clustering(seed in any::<u64>()) {
        let (d, g) = graph_from(seed);
        let n = d.n();
        let adj = |a: usize, b: usize| a != b && (d.w[a][b] > 0 || d.w[b][a] > 0);
        for v in 0..n {
            let nb: Vec<usize> = (0..n).filter(|&u| adj(v, u)).collect();
            let k = nb.len();
            let links = nb.iter().enumerate()
                .flat_map(|(i, &a)| nb[i + 1..].iter().map(move |&b| (a, b)))
                .filter(|&(a, b)| adj(a, b))
                .count();
            let expected = if k < 2 { 0.0 } else { 2.0 * links as f64 / (k * (k - 1)) as f64 };
            let (cc1, _) = clustering_pair(&g, &d.names[v]).unwrap();
            prop_assert!((cc1 - expected).abs() < 1e-12);
        }
    }
}
