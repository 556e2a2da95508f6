use serde::{Deserialize, Serialize};

use super::{cross_validate, CvPlan};
use crate::error::Result;
use crate::learner::{Matrix, SvmParams};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Robustness {
    pub k: usize,
    pub fold_f1: Vec<f64>,
    pub mean_f1: f64,
    /// Population standard deviation of `fold_f1`.
    pub std_f1: f64,
    pub fold_support_vectors: Vec<usize>,
    pub mean_support_vectors: f64,
}

/// Per-fold train/evaluate with fixed hyperparameters.
pub fn robustness(x: &Matrix, y: &[bool], params: &SvmParams, plan: &CvPlan) -> Result<Robustness> {
    let cv = cross_validate(x, y, params, plan)?;
    let k = plan.k() as f64;
    let var = cv.fold_f1.iter().map(|f| (f - cv.mean_f1).powi(2)).sum::<f64>() / k;
    Ok(Robustness {
        k: plan.k(),
        mean_f1: cv.mean_f1,
        std_f1: var.sqrt(),
        mean_support_vectors: cv.fold_support_vectors.iter().sum::<usize>() as f64 / k,
        fold_f1: cv.fold_f1,
        fold_support_vectors: cv.fold_support_vectors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modelsel::kfold;

    #[test]
    fn separable_data_is_stable() {
        let rows: Vec<[f64; 1]> = (0..40).map(|i| [if i % 2 == 0 { 1.0 } else { -1.0 } * (1.0 + i as f64 / 40.0)]).collect();
        let y: Vec<bool> = (0..40).map(|i| i % 2 == 0).collect();
        let x = Matrix::from_rows(&rows).unwrap();
        let r = robustness(&x, &y, &SvmParams::new(10.0, 1.0), &kfold(&y, 10, 5).unwrap()).unwrap();
        assert_eq!(r.fold_f1.len(), 10);
        assert_eq!(r.mean_f1, 1.0);
        assert_eq!(r.std_f1, 0.0);
        assert!(r.fold_support_vectors.iter().all(|s| (2..=36).contains(s)));
    }
}
