use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::scores::{f1, f1_benign, fnr, fpr, weighted_f1_of, Confusion, Ratio};
use crate::derived::DERIVED_FEATURES;
use crate::error::{Error, Result};
use crate::learner::{Matrix, SvmModel};
use crate::pipeline::DerivedRecord;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub samples: u64,
    pub confusion: Confusion,
    pub f1_benign: Ratio,
    pub f1_malicious: Ratio,
    pub weighted_f1: Ratio,
    pub fpr: Ratio,
    pub fnr: Ratio,
    /// Missed attacks per label.
    pub false_negatives_by_label: BTreeMap<String, u64>,
    pub support_vectors: usize,
    pub selected_features: Vec<String>,
    pub gamma: f64,
    pub c: f64,
}

impl EvaluationReport {
    pub fn from_confusion(confusion: Confusion, model: &SvmModel) -> Self {
        EvaluationReport {
            samples: confusion.total(),
            confusion,
            f1_benign: f1_benign(&confusion),
            f1_malicious: f1(&confusion),
            weighted_f1: weighted_f1_of(&confusion),
            fpr: fpr(&confusion),
            fnr: fnr(&confusion),
            false_negatives_by_label: BTreeMap::new(),
            support_vectors: model.n_support(),
            selected_features: model.feature_names.clone(),
            gamma: model.gamma,
            c: model.c,
        }
    }

    /// Recomputes every rate from the stored confusion counts and compares
    /// exactly.
    pub fn is_consistent(&self) -> bool {
        let c = &self.confusion;
        self.samples == c.total()
            && self.f1_benign == f1_benign(c)
            && self.f1_malicious == f1(c)
            && self.weighted_f1 == weighted_f1_of(c)
            && self.fpr == fpr(c)
            && self.fnr == fnr(c)
            && self.false_negatives_by_label.values().sum::<u64>() == c.fn_
    }
}

/// A model whose feature names disagree with the derived layout was trained
/// on some other file format.
fn check_layout(model: &SvmModel) -> Result<()> {
    if model.feature_names.is_empty() {
        return Ok(());
    }
    let missing: Vec<&str> = model
        .feature_mask
        .iter()
        .zip(&model.feature_names)
        .filter(|(&j, name)| DERIVED_FEATURES.get(j) != Some(&name.as_str()))
        .map(|(_, name)| name.as_str())
        .collect();
    if missing.is_empty() {
        Ok(())
    } else {
        Err(Error::MissingFeatures(missing.join(", ")))
    }
}

/// Scores `model` on derived records (full 16-feature layout).
pub fn evaluate(model: &SvmModel, records: &[DerivedRecord]) -> Result<EvaluationReport> {
    if records.is_empty() {
        return Err(Error::Empty("test set"));
    }
    check_layout(model)?;
    let rows: Vec<[f64; 16]> = records.iter().map(DerivedRecord::features).collect();
    let predicted = model.predict_full(&Matrix::from_rows(&rows)?)?;
    let mut confusion = Confusion::default();
    let mut missed = BTreeMap::new();
    for (rec, &p) in records.iter().zip(&predicted) {
        let truth = rec.is_malicious();
        confusion.record(truth, p > 0.0);
        if truth && p < 0.0 {
            *missed.entry(rec.label.trim().to_string()).or_insert(0) += 1;
        }
    }
    let mut report = EvaluationReport::from_confusion(confusion, model);
    report.false_negatives_by_label = missed;
    Ok(report)
}
