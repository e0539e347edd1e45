//! The split, bin and boost sequence shared by the command line and tests.

use crate::error::Result;
use crate::gbdt::{
    bin_features, split_train_test, train, BinnedDataset, DataFingerprint, TrainConfig,
    TrainOutput,
};
use crate::records::{FeatureSchema, FeatureVector};

/// A trained model together with the split it was fitted on.
#[derive(Debug, Clone)]
pub struct TrainedRun {
    pub train_rows: Vec<FeatureVector>,
    pub test_rows: Vec<FeatureVector>,
    pub output: TrainOutput,
}

/// Splits `cohort` with `cfg.seed` and `cfg.split_ratio`.
pub fn split(cohort: &[FeatureVector], cfg: &TrainConfig) -> Result<(Vec<FeatureVector>, Vec<FeatureVector>)> {
    cfg.validate()?;
    split_train_test(cohort, cfg.split_ratio, cfg.seed, cfg.stratified)
}

/// Splits `cohort`, bins the training side, and boosts with the held-out
/// side as validation set. The model records a fingerprint of `cohort`.
pub fn fit(schema: &FeatureSchema, cohort: &[FeatureVector], cfg: &TrainConfig) -> Result<TrainedRun> {
    let (train_rows, test_rows) = split(cohort, cfg)?;
    let train_set = bin_features(schema, &train_rows, cfg.max_bin)?;
    let test_set = BinnedDataset::with_mapper(schema.clone(), train_set.mapper().clone(), &test_rows)?;
    let mut output = train(&train_set, Some(&test_set), cfg)?;
    output.ensemble.training_data = Some(DataFingerprint::of(cohort));
    Ok(TrainedRun {
        train_rows,
        test_rows,
        output,
    })
}
