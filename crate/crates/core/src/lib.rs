//! Tabular dropout-risk modeling: cohort records, histogram gradient-boosted
//! trees, binary-classification metrics and exact tree SHAP attributions.
//!
//! The pieces compose into one pipeline:
//!
//! 1. [`records`] produces [`FeatureVector`]s, from CSV or from the seeded
//!    synthetic cohort generator.
//! 2. [`gbdt`] splits, bins and trains a leaf-wise boosted [`Ensemble`].
//! 3. [`metrics`] scores held-out predictions.
//! 4. [`shap`] attributes each prediction to the input features.
//! 5. [`report`] renders the text artifacts (CSV, JSON, SVG).

pub mod error;
pub mod gbdt;
pub mod metrics;
pub mod pipeline;
pub mod records;
pub mod report;
pub mod shap;

pub use error::{Error, Result};
pub use gbdt::{
    split_train_test, train, BinnedDataset, DecisionTree, Ensemble, Node, TrainConfig,
    TrainOutput,
};
pub use metrics::{Confusion, EvalReport};
pub use records::{
    CohortLabel, FeatureSchema, FeatureVector, StudentRecord, SynthConfig, FEATURE_NAMES,
    LABEL_COLUMN,
};
pub use shap::{
    brute_force_shapley, interaction_values, tree_shap, DependenceSeries, ImportanceTable,
    InteractionMatrix, ShapVector,
};
