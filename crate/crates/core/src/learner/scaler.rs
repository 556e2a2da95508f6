use serde::{Deserialize, Serialize};

use super::Matrix;
use crate::error::{Error, Result};

/// Per-column standardization with training-set statistics. Only masked
/// columns are transformed; bounded metrics pass through untouched.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scaler {
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
    pub mask: Vec<bool>,
}

impl Scaler {
    /// No-op scaler over `cols` columns.
    pub fn identity(cols: usize) -> Self {
        Scaler {
            means: vec![0.0; cols],
            stds: vec![1.0; cols],
            mask: vec![false; cols],
        }
    }

    /// Fits means and population standard deviations. Constant columns are
    /// dropped from the mask.
    pub fn fit(x: &Matrix, mask: &[bool]) -> Result<Self> {
        if x.is_empty() {
            return Err(Error::Empty("feature matrix"));
        }
        if mask.len() != x.cols() {
            return Err(Error::DimensionMismatch {
                expected: x.cols(),
                found: mask.len(),
            });
        }
        let n = x.rows() as f64;
        let mut means = vec![0.0; x.cols()];
        let mut stds = vec![1.0; x.cols()];
        let mut eff = mask.to_vec();
        for j in 0..x.cols() {
            let mean = x.column(j).sum::<f64>() / n;
            let var = x.column(j).map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
            means[j] = mean;
            let sd = var.sqrt();
            if mask[j] && sd > 0.0 && sd.is_finite() {
                stds[j] = sd;
            } else {
                eff[j] = false;
            }
        }
        Ok(Scaler {
            means,
            stds,
            mask: eff,
        })
    }

    pub fn cols(&self) -> usize {
        self.mask.len()
    }

    pub fn transform_row(&self, row: &mut [f64]) {
        for ((v, &on), (m, s)) in row
            .iter_mut()
            .zip(&self.mask)
            .zip(self.means.iter().zip(&self.stds))
        {
            if on {
                *v = (*v - m) / s;
            }
        }
    }

    pub fn transform(&self, x: &Matrix) -> Result<Matrix> {
        if x.cols() != self.cols() {
            return Err(Error::DimensionMismatch {
                expected: self.cols(),
                found: x.cols(),
            });
        }
        let mut out = x.clone();
        for i in 0..out.rows() {
            self.transform_row(out.row_mut(i));
        }
        Ok(out)
    }

    /// Scaler restricted to the given columns, in that order.
    pub fn select(&self, cols: &[usize]) -> Scaler {
        Scaler {
            means: cols.iter().map(|&j| self.means[j]).collect(),
            stds: cols.iter().map(|&j| self.stds[j]).collect(),
            mask: cols.iter().map(|&j| self.mask[j]).collect(),
        }
    }
}

/// Mask over the 16 derived features selecting the unbounded degree metrics.
pub fn degree_mask() -> Vec<bool> {
    (0..16).map(|j| j % 8 < 3).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn two_point_column() {
        let x = Matrix::from_rows(&[[0.0, 0.3], [2.0, -10.0]]).unwrap();
        let s = Scaler::fit(&x, &[true, false]).unwrap();
        assert_eq!((s.means[0], s.stds[0]), (1.0, 1.0));
        let t = s.transform(&x).unwrap();
        assert_eq!(t.column(0).collect::<Vec<_>>(), vec![-1.0, 1.0]);
        assert_eq!(t.column(1).collect::<Vec<_>>(), vec![0.3, -10.0]);
    }

    #[test]
    fn constant_column_passes_through() {
        let x = Matrix::from_rows(&[[4.0], [4.0], [4.0]]).unwrap();
        let s = Scaler::fit(&x, &[true]).unwrap();
        assert!(!s.mask[0]);
        assert_eq!(s.transform(&x).unwrap(), x);
    }

    #[test]
    fn errors() {
        assert!(matches!(Scaler::fit(&Matrix::default(), &[]), Err(Error::Empty(_))));
        let x = Matrix::from_rows(&[[1.0, 2.0]]).unwrap();
        assert!(Scaler::fit(&x, &[true]).is_err());
        let s = Scaler::identity(3);
        assert!(s.transform(&x).is_err());
    }

    #[test]
    fn degree_mask_layout() {
        let m = degree_mask();
        assert_eq!(m.iter().filter(|b| **b).count(), 6);
        assert!(m[0] && m[1] && m[2] && !m[3] && m[8] && !m[15]);
    }

    proptest! {
        #[test]
        fn standardized_columns(rows in prop::collection::vec(prop::collection::vec(-1e3..1e3f64, 3), 2..40)) {
            let x = Matrix::from_rows(&rows).unwrap();
            let s = Scaler::fit(&x, &[true, true, false]).unwrap();
            let t = s.transform(&x).unwrap();
            let n = x.rows() as f64;
            for j in 0..2 {
                if s.mask[j] {
                    let mean = t.column(j).sum::<f64>() / n;
                    let var = t.column(j).map(|v| (v - mean).powi(2)).sum::<f64>() / n;
                    prop_assert!(mean.abs() < 1e-9);
                    prop_assert!((var.sqrt() - 1.0).abs() < 1e-9);
                }
            }
            prop_assert_eq!(t.column(2).collect::<Vec<_>>(), x.column(2).collect::<Vec<_>>());
        }
    }
}
