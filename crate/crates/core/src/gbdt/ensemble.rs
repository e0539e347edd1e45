use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::config::{ModelParams, TrainConfig};
use super::loss::sigmoid;
use super::tree::DecisionTree;
use crate::error::{Error, Result};
use crate::records::{FeatureSchema, FeatureVector};

/// Identity of the cohort a model was trained from, so the held-out split
/// can be rebuilt and checked later.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DataFingerprint {
    pub rows: usize,
    pub sha256: String,
}

impl DataFingerprint {
    /// Hashes the bit patterns of every value and label in row order.
    pub fn of(rows: &[FeatureVector]) -> Self {
        let mut hasher = Sha256::new();
        for row in rows {
            hasher.update((row.values.len() as u64).to_le_bytes());
            for v in &row.values {
                hasher.update(v.to_bits().to_le_bytes());
            }
            hasher.update([row.label]);
        }
        let digest = hasher.finalize();
        let mut hex = String::with_capacity(64);
        for byte in digest.iter() {
            let _ = write!(hex, "{byte:02x}");
        }
        Self {
            rows: rows.len(),
            sha256: hex,
        }
    }
}

/// Additive tree model: `margin(x) = base_score + sum_t tree_t(x)`.
///
/// Leaf values are stored already multiplied by the learning rate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ensemble {
    pub feature_names: FeatureSchema,
    pub base_score: f64,
    pub params: ModelParams,
    pub trees: Vec<DecisionTree>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub training_data: Option<DataFingerprint>,
}

impl Ensemble {
    pub fn new(schema: FeatureSchema, base_score: f64, config: TrainConfig) -> Self {
        Self {
            feature_names: schema,
            base_score,
            params: config.into(),
            trees: Vec::new(),
            training_data: None,
        }
    }

    pub fn schema(&self) -> &FeatureSchema {
        &self.feature_names
    }

    pub fn config(&self) -> &TrainConfig {
        &self.params.config
    }

    pub fn num_features(&self) -> usize {
        self.feature_names.len()
    }

    fn check_input(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.num_features() {
            return Err(Error::LengthMismatch {
                expected: self.num_features(),
                got: x.len(),
            });
        }
        Ok(())
    }

    pub fn predict_margin(&self, x: &[f64]) -> Result<f64> {
        self.check_input(x)?;
        Ok(self.margin(x))
    }

    pub fn predict_proba(&self, x: &[f64]) -> Result<f64> {
        self.predict_margin(x).map(sigmoid)
    }

    /// Margin without the input-length check.
    pub(crate) fn margin(&self, x: &[f64]) -> f64 {
        self.base_score + self.trees.iter().map(|t| t.predict(x)).sum::<f64>()
    }

    pub fn margins(&self, rows: &[FeatureVector]) -> Result<Vec<f64>> {
        rows.iter().map(|r| self.predict_margin(&r.values)).collect()
    }

    pub fn probas(&self, rows: &[FeatureVector]) -> Result<Vec<f64>> {
        rows.iter().map(|r| self.predict_proba(&r.values)).collect()
    }

    /// Structure, covers and feature indices of every tree.
    pub fn validate(&self) -> Result<()> {
        for (t, tree) in self.trees.iter().enumerate() {
            tree.check_structure()
                .and_then(|_| tree.check_covers())
                .map_err(|e| Error::ModelIntegrity(format!("tree {t}: {e}")))?;
            if let Some(f) = tree.max_feature() {
                if f >= self.num_features() {
                    return Err(Error::ModelIntegrity(format!(
                        "tree {t} uses feature {f} outside the {}-feature schema",
                        self.num_features()
                    )));
                }
            }
        }
        if !self.base_score.is_finite() {
            return Err(Error::ModelIntegrity("non-finite base_score".into()));
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let model: Self = serde_json::from_str(text)?;
        model.validate()?;
        Ok(model)
    }
}
