//! Model selection on the training side only: standardize, select features
//! greedily, tune `(C, gamma)` on a grid, measure fold-to-fold stability and
//! fit the final model.
//!
//! F1 here is the malicious-class F1 averaged over folds. Folds run in
//! parallel; results are collected in fold order, so scores do not depend on
//! the worker count.

mod cv;
mod evaluate;
mod ffs;
mod grid;
mod robustness;
pub mod scores;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::derived::DERIVED_FEATURES;
use crate::error::{Error, Result};
use crate::learner::{degree_mask, encode_labels, train, Matrix, Scaler, SvmModel, SvmParams};
use crate::pipeline::DerivedRecord;

pub use cv::{kfold, CvPlan};
pub use evaluate::{evaluate, EvaluationReport};
pub use ffs::{forward_select, FfsConfig, FfsResult, FfsStep};
pub use grid::{grid_search, GridCell, GridResult, DEFAULT_C_GRID, DEFAULT_GAMMA_GRID};
pub use robustness::{robustness, Robustness};
pub use scores::{Confusion, Ratio};

#[derive(Debug, Clone, PartialEq)]
pub struct CvScores {
    pub fold_f1: Vec<f64>,
    pub mean_f1: f64,
    pub fold_support_vectors: Vec<usize>,
}

/// Trains on each fold's complement and scores the held-out fold.
pub fn cross_validate(x: &Matrix, y: &[bool], params: &SvmParams, plan: &CvPlan) -> Result<CvScores> {
    if plan.len() != x.rows() || y.len() != x.rows() {
        return Err(Error::DimensionMismatch {
            expected: x.rows(),
            found: plan.len().min(y.len()),
        });
    }
    let labels = encode_labels(y);
    let folds = (0..plan.k())
        .into_par_iter()
        .map(|f| {
            let (train_idx, test_idx) = plan.split(f);
            let ty: Vec<f64> = train_idx.iter().map(|&i| labels[i]).collect();
            let model = train(&x.select_rows(&train_idx), &ty, params)?;
            let pred = model.predict(&x.select_rows(&test_idx))?;
            let truth: Vec<bool> = test_idx.iter().map(|&i| y[i]).collect();
            let hits: Vec<bool> = pred.iter().map(|&p| p > 0.0).collect();
            let conf = Confusion::from_predictions(&truth, &hits);
            Ok((scores::f1(&conf).value, model.n_support()))
        })
        .collect::<Result<Vec<_>>>()?;
    let (fold_f1, fold_support_vectors): (Vec<f64>, Vec<usize>) = folds.into_iter().unzip();
    Ok(CvScores {
        mean_f1: fold_f1.iter().sum::<f64>() / fold_f1.len() as f64,
        fold_f1,
        fold_support_vectors,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub seed: u64,
    /// Folds for feature selection and grid search.
    pub selection_folds: usize,
    pub robustness_folds: usize,
    pub ffs: FfsConfig,
    pub c_grid: Vec<f64>,
    pub gamma_grid: Vec<f64>,
    /// Tolerance and cache budget for every fit; C and gamma are ignored.
    pub solver: SvmParams,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            seed: 0,
            selection_folds: 5,
            robustness_folds: 10,
            ffs: FfsConfig::default(),
            c_grid: DEFAULT_C_GRID.to_vec(),
            gamma_grid: DEFAULT_GAMMA_GRID.to_vec(),
            solver: SvmParams::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionStep {
    pub feature: String,
    pub f1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingReport {
    pub samples: usize,
    pub malicious: usize,
    pub benign: usize,
    pub seed: u64,
    pub selection: Vec<SelectionStep>,
    pub grid: GridResult,
    pub robustness: Robustness,
    pub support_vectors: usize,
    pub converged: bool,
}

/// Runs the whole training procedure on a full-width feature matrix whose
/// columns are named by `names`.
pub fn fit(x: &Matrix, y: &[bool], names: &[&str], cfg: &TrainConfig) -> Result<(SvmModel, TrainingReport)> {
    if names.len() != x.cols() {
        return Err(Error::DimensionMismatch {
            expected: x.cols(),
            found: names.len(),
        });
    }
    if y.len() != x.rows() {
        return Err(Error::DimensionMismatch {
            expected: x.rows(),
            found: y.len(),
        });
    }
    x.check_finite()?;
    let malicious = y.iter().filter(|&&m| m).count();
    if malicious == 0 || malicious == y.len() {
        return Err(Error::SingleClass);
    }

    let mask = if x.cols() == DERIVED_FEATURES.len() {
        degree_mask()
    } else {
        vec![true; x.cols()]
    };
    let scaler = Scaler::fit(x, &mask)?;
    let xs = scaler.transform(x)?;

    let plan = kfold(y, cfg.selection_folds, cfg.seed)?;
    let mut ffs = cfg.ffs;
    ffs.params.tol = cfg.solver.tol;
    ffs.params.cache_bytes = cfg.solver.cache_bytes;
    let candidates: Vec<usize> = (0..x.cols()).collect();
    let selection = forward_select(&xs, y, &candidates, &ffs, &plan)?;
    let selected = selection.selected();
    if selected.is_empty() {
        return Err(Error::InvalidParameter(
            "feature selection found no feature with positive cross-validated F1".into(),
        ));
    }
    let xsel = xs.select_columns(&selected);

    let grid = grid_search(&xsel, y, &cfg.c_grid, &cfg.gamma_grid, &cfg.solver, &plan)?;
    let params = SvmParams {
        c: grid.best.c,
        gamma: grid.best.gamma,
        ..cfg.solver
    };
    let robust = robustness(&xsel, y, &params, &kfold(y, cfg.robustness_folds, cfg.seed)?)?;

    let mut model = train(&xsel, &encode_labels(y), &params)?;
    model.scaler = scaler.select(&selected);
    model.feature_names = selected.iter().map(|&j| names[j].to_string()).collect();
    model.feature_mask = selected;

    let report = TrainingReport {
        samples: y.len(),
        malicious,
        benign: y.len() - malicious,
        seed: cfg.seed,
        selection: selection
            .steps
            .iter()
            .map(|s| SelectionStep {
                feature: names[s.feature].to_string(),
                f1: s.f1,
            })
            .collect(),
        grid,
        robustness: robust,
        support_vectors: model.n_support(),
        converged: model.converged,
    };
    Ok((model, report))
}

/// [`fit`] on derived records.
pub fn fit_records(records: &[DerivedRecord], cfg: &TrainConfig) -> Result<(SvmModel, TrainingReport)> {
    if records.is_empty() {
        return Err(Error::Empty("training set"));
    }
    let rows: Vec<[f64; 16]> = records.iter().map(DerivedRecord::features).collect();
    let y: Vec<bool> = records.iter().map(DerivedRecord::is_malicious).collect();
    fit(&Matrix::from_rows(&rows)?, &y, &DERIVED_FEATURES, cfg)
}
