use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{cross_validate, CvPlan};
use crate::error::{Error, Result};
use crate::learner::{Matrix, SvmParams};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FfsConfig {
    pub cap: usize,
    /// Minimum gain in mean CV F1 for a step to be accepted.
    pub epsilon: f64,
    pub params: SvmParams,
}

impl Default for FfsConfig {
    fn default() -> Self {
        FfsConfig {
            cap: 8,
            epsilon: 1e-4,
            params: SvmParams::new(1.0, 1.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FfsStep {
    pub feature: usize,
    pub f1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FfsResult {
    /// Accepted steps in selection order; the first is the most significant.
    pub steps: Vec<FfsStep>,
}

impl FfsResult {
    pub fn selected(&self) -> Vec<usize> {
        self.steps.iter().map(|s| s.feature).collect()
    }
}

/// Greedy forward selection over the columns in `candidates`.
///
/// Each step adds the candidate with the best mean CV F1; equal scores go to
/// the lower column index. Stops at `cap` or when the best gain is below
/// `epsilon`.
pub fn forward_select(
    x: &Matrix,
    y: &[bool],
    candidates: &[usize],
    cfg: &FfsConfig,
    plan: &CvPlan,
) -> Result<FfsResult> {
    if candidates.is_empty() {
        return Err(Error::InvalidParameter("no candidate features".into()));
    }
    if let Some(&bad) = candidates.iter().find(|&&j| j >= x.cols()) {
        return Err(Error::IndexOutOfRange {
            index: bad,
            len: x.cols(),
        });
    }
    let mut pool: Vec<usize> = candidates.to_vec();
    pool.sort_unstable();
    pool.dedup();

    let mut steps: Vec<FfsStep> = Vec::new();
    let mut chosen: Vec<usize> = Vec::new();
    let mut current = 0.0;
    while chosen.len() < cfg.cap && !pool.is_empty() {
        let scores = pool
            .par_iter()
            .map(|&j| {
                let mut cols = chosen.clone();
                cols.push(j);
                cross_validate(&x.select_columns(&cols), y, &cfg.params, plan).map(|cv| cv.mean_f1)
            })
            .collect::<Result<Vec<f64>>>()?;
        let mut best = 0;
        for (p, &s) in scores.iter().enumerate() {
            if s > scores[best] {
                best = p;
            }
        }
        if scores[best] - current < cfg.epsilon {
            break;
        }
        current = scores[best];
        let feature = pool.remove(best);
        chosen.push(feature);
        steps.push(FfsStep {
            feature,
            f1: current,
        });
    }
    Ok(FfsResult { steps })
}
