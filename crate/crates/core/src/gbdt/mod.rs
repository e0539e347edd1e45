//! Histogram-binned, leaf-wise gradient-boosted trees for binary
//! classification under logistic loss.

mod binning;
mod config;
mod ensemble;
mod grow;
mod loss;
mod sampling;
mod train;
mod tree;

pub use binning::{bin_features, BinMapper, BinnedDataset};
pub use config::{ModelParams, TrainConfig};
pub use ensemble::{DataFingerprint, Ensemble};
pub use grow::{grow_tree, split_gain};
pub use loss::{init_base_score, logistic_gradients, sigmoid};
pub use sampling::split_train_test;
pub use train::{train, IterationRecord, TrainOutput};
pub use tree::{DecisionTree, Node};
