use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::kernel::rbf_unchecked;
use super::scaler::Scaler;
use super::Matrix;
use crate::error::{Error, Result};

pub const MODEL_FORMAT: &str = "graphids-svm";
pub const MODEL_VERSION: u32 = 1;

/// Trained RBF classifier.
///
/// Support vectors live in the scaled, column-selected space. Inputs to
/// [`SvmModel::predict`] are raw values of the selected columns; inputs to
/// [`SvmModel::predict_full`] are raw rows of the full feature layout, from
/// which `feature_mask` picks the columns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvmModel {
    pub support_vectors: Matrix,
    /// `alpha_i * y_i` per support vector.
    pub dual_coefs: Vec<f64>,
    pub bias: f64,
    pub gamma: f64,
    pub c: f64,
    pub scaler: Scaler,
    pub feature_mask: Vec<usize>,
    #[serde(default)]
    pub feature_names: Vec<String>,
    pub converged: bool,
    pub iterations: usize,
    /// Free-form run metadata (config digest, seed, ...).
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub provenance: BTreeMap<String, String>,
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format: String,
    version: u32,
    #[serde(flatten)]
    model: SvmModel,
}

impl SvmModel {
    pub fn n_support(&self) -> usize {
        self.dual_coefs.len()
    }

    pub fn n_features(&self) -> usize {
        self.feature_mask.len()
    }

    fn decision_scaled(&self, row: &[f64]) -> f64 {
        let mut f = self.bias;
        for (sv, coef) in self.support_vectors.iter_rows().zip(&self.dual_coefs) {
            f += coef * rbf_unchecked(sv, row, self.gamma);
        }
        f
    }

    /// Decision values for raw rows of the selected columns.
    pub fn decision_values(&self, x: &Matrix) -> Result<Vec<f64>> {
        let scaled = self.scaler.transform(x)?;
        Ok(scaled.iter_rows().map(|r| self.decision_scaled(r)).collect())
    }

    /// `+1` (malicious) when the decision value is `>= 0`, else `-1`.
    pub fn predict(&self, x: &Matrix) -> Result<Vec<f64>> {
        Ok(self
            .decision_values(x)?
            .into_iter()
            .map(|f| if f >= 0.0 { 1.0 } else { -1.0 })
            .collect())
    }

    /// Picks the model's columns out of a full-width matrix.
    pub fn select(&self, full: &Matrix) -> Result<Matrix> {
        let need = self.feature_mask.iter().max().map_or(0, |m| m + 1);
        if full.cols() < need {
            let missing: Vec<String> = self
                .feature_mask
                .iter()
                .zip(self.names_or_indices())
                .filter(|(&j, _)| j >= full.cols())
                .map(|(_, name)| name)
                .collect();
            return Err(Error::MissingFeatures(missing.join(", ")));
        }
        Ok(full.select_columns(&self.feature_mask))
    }

    pub fn predict_full(&self, full: &Matrix) -> Result<Vec<f64>> {
        self.predict(&self.select(full)?)
    }

    pub fn decision_values_full(&self, full: &Matrix) -> Result<Vec<f64>> {
        self.decision_values(&self.select(full)?)
    }

    fn names_or_indices(&self) -> Vec<String> {
        if self.feature_names.len() == self.feature_mask.len() {
            self.feature_names.clone()
        } else {
            self.feature_mask.iter().map(|j| format!("#{j}")).collect()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidModel(m));
        if self.dual_coefs.is_empty() || self.dual_coefs.len() != self.support_vectors.rows() {
            return bad(format!(
                "{} dual coefficients for {} support vectors",
                self.dual_coefs.len(),
                self.support_vectors.rows()
            ));
        }
        if self.support_vectors.cols() != self.feature_mask.len()
            || self.scaler.cols() != self.feature_mask.len()
        {
            return bad("feature dimensions disagree".into());
        }
        if !(self.gamma > 0.0) || !(self.c > 0.0) {
            return bad("gamma and C must be positive".into());
        }
        let slack = self.c * (1.0 + 1e-12);
        if self
            .dual_coefs
            .iter()
            .any(|a| !a.is_finite() || *a == 0.0 || a.abs() > slack)
        {
            return bad("dual coefficient outside (0, C]".into());
        }
        if !self.bias.is_finite() {
            return bad("non-finite bias".into());
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        let file = ModelFile {
            format: MODEL_FORMAT.into(),
            version: MODEL_VERSION,
            model: self.clone(),
        };
        Ok(serde_json::to_string_pretty(&file)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ModelFile = serde_json::from_str(text)
            .map_err(|e| Error::InvalidModel(format!("unreadable model: {e}")))?;
        if file.format != MODEL_FORMAT || file.version != MODEL_VERSION {
            return Err(Error::InvalidModel(format!(
                "unsupported format {} v{}",
                file.format, file.version
            )));
        }
        file.model.validate()?;
        Ok(file.model)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }
}
