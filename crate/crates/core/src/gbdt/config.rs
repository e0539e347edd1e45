use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Boosting hyperparameters. Defaults are the dropout study's configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub max_bin: usize,
    pub learning_rate: f64,
    pub num_leaves: usize,
    /// Minimum training rows per leaf.
    pub min_data: usize,
    pub num_iterations: usize,
    pub boost_from_average: bool,
    pub lambda_l2: f64,
    /// Minimum hessian sum per child for a split to be legal.
    pub min_sum_hessian: f64,
    pub split_ratio: f64,
    /// Split each class separately so both halves keep the label balance.
    pub stratified: bool,
    pub seed: u64,
    pub early_stopping_rounds: Option<usize>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            max_bin: 512,
            learning_rate: 0.05,
            num_leaves: 10,
            min_data: 100,
            num_iterations: 10_000,
            boost_from_average: true,
            lambda_l2: 0.0,
            min_sum_hessian: 1e-3,
            split_ratio: 0.7,
            stratified: false,
            seed: 42,
            early_stopping_rounds: None,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if self.max_bin < 2 || self.max_bin > usize::from(u16::MAX) + 1 {
            return fail(format!("max_bin must be in [2, 65536], got {}", self.max_bin));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate <= 1.0) {
            return fail(format!(
                "learning_rate must be in (0, 1], got {}",
                self.learning_rate
            ));
        }
        if self.num_leaves < 2 {
            return fail(format!("num_leaves must be >= 2, got {}", self.num_leaves));
        }
        if self.min_data < 1 {
            return fail("min_data must be >= 1".into());
        }
        if !(self.lambda_l2 >= 0.0 && self.lambda_l2.is_finite()) {
            return fail(format!("lambda_l2 must be >= 0, got {}", self.lambda_l2));
        }
        if !(self.min_sum_hessian >= 0.0 && self.min_sum_hessian.is_finite()) {
            return fail(format!(
                "min_sum_hessian must be >= 0, got {}",
                self.min_sum_hessian
            ));
        }
        if !(self.split_ratio > 0.0 && self.split_ratio < 1.0) {
            return fail(format!(
                "split_ratio must be in (0, 1), got {}",
                self.split_ratio
            ));
        }
        if self.early_stopping_rounds == Some(0) {
            return fail("early_stopping_rounds must be positive".into());
        }
        Ok(())
    }
}

/// Parameter block written into model files: the fixed objective settings
/// followed by the full [`TrainConfig`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub boosting_type: String,
    pub objective: String,
    pub metric: String,
    pub verbose: i32,
    #[serde(flatten)]
    pub config: TrainConfig,
}

impl From<TrainConfig> for ModelParams {
    fn from(config: TrainConfig) -> Self {
        Self {
            boosting_type: "gbdt".into(),
            objective: "binary".into(),
            metric: "binary_logloss".into(),
            verbose: -1,
            config,
        }
    }
}
