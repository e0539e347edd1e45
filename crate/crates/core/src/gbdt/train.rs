use super::binning::BinnedDataset;
use super::config::TrainConfig;
use super::ensemble::Ensemble;
use super::grow::grow_tree;
use super::loss::{fill_gradients, init_base_score, sigmoid};
use crate::error::{Error, Result};
use crate::metrics::log_loss;

/// Losses recorded after one boosting round (1-based `iteration`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationRecord {
    pub iteration: usize,
    pub train_logloss: f64,
    pub valid_logloss: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct TrainOutput {
    pub ensemble: Ensemble,
    pub history: Vec<IterationRecord>,
    /// Iteration with the lowest validation loss when early stopping ran.
    pub best_iteration: Option<usize>,
}

fn logloss_of(labels: &[f64], margins: &[f64]) -> f64 {
    let p: Vec<f64> = margins.iter().map(|&m| sigmoid(m)).collect();
    log_loss(labels, &p).expect("labels and margins have equal length")
}

/// Boosts `cfg.num_iterations` trees on `train`, scoring `valid` after each.
///
/// With `early_stopping_rounds = k`, training stops once the validation loss
/// has not improved for `k` rounds and the ensemble is truncated to its best
/// iteration.
pub fn train(
    train: &BinnedDataset,
    valid: Option<&BinnedDataset>,
    cfg: &TrainConfig,
) -> Result<TrainOutput> {
    cfg.validate()?;
    if let Some(v) = valid {
        if v.schema() != train.schema() || v.mapper() != train.mapper() {
            return Err(Error::SchemaMismatch(
                "validation set must share the training schema and bin boundaries".into(),
            ));
        }
    }
    if cfg.early_stopping_rounds.is_some() && valid.is_none_or(|v| v.num_rows() == 0) {
        return Err(Error::Config(
            "early stopping needs a non-empty validation set".into(),
        ));
    }
    let labels = train.labels();
    let average = init_base_score(labels)?;
    let base = if cfg.boost_from_average { average } else { 0.0 };

    let mut model = Ensemble::new(train.schema().clone(), base, cfg.clone());
    let n = train.num_rows();
    let mut margins = vec![base; n];
    let mut valid_margins = valid.map(|v| vec![base; v.num_rows()]);
    let mut g = vec![0.0; n];
    let mut h = vec![0.0; n];
    let mut history = Vec::with_capacity(cfg.num_iterations);
    let mut best: Option<(usize, f64)> = None;

    for iteration in 1..=cfg.num_iterations {
        fill_gradients(labels, &margins, &mut g, &mut h);
        let mut tree = grow_tree(train, &g, &h, cfg);
        tree.scale(cfg.learning_rate);
        for (i, m) in margins.iter_mut().enumerate() {
            *m += tree.predict(train.row(i));
        }
        let valid_logloss = match (valid, valid_margins.as_mut()) {
            (Some(v), Some(vm)) if v.num_rows() > 0 => {
                for (i, m) in vm.iter_mut().enumerate() {
                    *m += tree.predict(v.row(i));
                }
                Some(logloss_of(v.labels(), vm))
            }
            _ => None,
        };
        model.trees.push(tree);
        history.push(IterationRecord {
            iteration,
            train_logloss: logloss_of(labels, &margins),
            valid_logloss,
        });

        if let (Some(rounds), Some(loss)) = (cfg.early_stopping_rounds, valid_logloss) {
            if best.is_none_or(|(_, b)| loss < b) {
                best = Some((iteration, loss));
            }
            let (best_iter, _) = best.expect("set above");
            if iteration - best_iter >= rounds {
                break;
            }
        }
    }

    let best_iteration = best.map(|(i, _)| i);
    if let Some(i) = best_iteration {
        model.trees.truncate(i);
    }
    Ok(TrainOutput {
        ensemble: model,
        history,
        best_iteration,
    })
}
