use std::collections::HashMap;

use rayon::prelude::*;

use super::Matrix;
use crate::error::{Error, Result};

/// `exp(-gamma * |x - y|^2)`.
pub fn rbf(x: &[f64], y: &[f64], gamma: f64) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            found: y.len(),
        });
    }
    if !(gamma > 0.0) {
        return Err(Error::InvalidParameter(format!("gamma must be positive, got {gamma}")));
    }
    Ok(rbf_unchecked(x, y, gamma))
}

#[inline]
pub(crate) fn rbf_unchecked(x: &[f64], y: &[f64], gamma: f64) -> f64 {
    let d2: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
    (-gamma * d2).exp()
}

const PARALLEL_ROW_MIN: usize = 4096;

/// Least-recently-used cache of kernel rows `K(i, ·)` bounded by a byte
/// budget.
pub struct KernelCache<'a> {
    x: &'a Matrix,
    gamma: f64,
    capacity: usize,
    rows: HashMap<usize, (Vec<f64>, u64)>,
    clock: u64,
}

impl<'a> KernelCache<'a> {
    pub fn new(x: &'a Matrix, gamma: f64, budget_bytes: usize) -> Self {
        let row_bytes = (x.rows() * std::mem::size_of::<f64>()).max(1);
        let capacity = (budget_bytes / row_bytes).max(2);
        KernelCache {
            x,
            gamma,
            capacity,
            rows: HashMap::new(),
            clock: 0,
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    fn compute(&self, i: usize) -> Vec<f64> {
        let xi = self.x.row(i);
        let n = self.x.rows();
        if n >= PARALLEL_ROW_MIN {
            (0..n)
                .into_par_iter()
                .map(|k| rbf_unchecked(xi, self.x.row(k), self.gamma))
                .collect()
        } else {
            (0..n)
                .map(|k| rbf_unchecked(xi, self.x.row(k), self.gamma))
                .collect()
        }
    }

    pub fn row(&mut self, i: usize) -> &[f64] {
        self.clock += 1;
        let now = self.clock;
        if !self.rows.contains_key(&i) {
            if self.rows.len() >= self.capacity {
                let oldest = self
                    .rows
                    .iter()
                    .min_by_key(|(_, (_, stamp))| *stamp)
                    .map(|(&k, _)| k)
                    .expect("cache is non-empty");
                self.rows.remove(&oldest);
            }
            let row = self.compute(i);
            self.rows.insert(i, (row, now));
        }
        let entry = self.rows.get_mut(&i).expect("row just inserted");
        entry.1 = now;
        &entry.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_values() {
        assert_eq!(rbf(&[0.3, 0.1], &[0.3, 0.1], 5.0).unwrap(), 1.0);
        let v = rbf(&[0.0, 0.0], &[1.0, 1.0], 1.0).unwrap();
        assert!((v - (-2.0f64).exp()).abs() < 1e-15);
        assert!((v - 0.135335283236613).abs() < 1e-12);
        assert!(rbf(&[0.0, 0.0], &[1.0, 1.0], 2.0).unwrap() < v);
        assert!(rbf(&[0.0], &[1.0, 1.0], 1.0).is_err());
        assert!(rbf(&[0.0], &[1.0], 0.0).is_err());
    }

    #[test]
    fn symmetric_and_bounded() {
        let pts = [[0.0, 1.0], [3.0, -2.0], [0.5, 0.5]];
        for a in &pts {
            for b in &pts {
                let k = rbf(a, b, 0.7).unwrap();
                assert_eq!(k, rbf(b, a, 0.7).unwrap());
                assert!(k > 0.0 && k <= 1.0);
            }
        }
    }

    #[test]
    fn cache_evicts_least_recent() {
        let x = Matrix::from_rows(&[[0.0], [1.0], [2.0], [3.0]]).unwrap();
        let mut c = KernelCache::new(&x, 1.0, 2 * 4 * 8);
        assert_eq!(c.capacity(), 2);
        let r0 = c.row(0).to_vec();
        c.row(1);
        c.row(0);
        c.row(2); // evicts 1
        assert!(c.rows.contains_key(&0) && c.rows.contains_key(&2));
        assert!(!c.rows.contains_key(&1));
        assert_eq!(c.row(0), r0.as_slice());
        assert_eq!(r0[3], (-9.0f64).exp());
    }
}
