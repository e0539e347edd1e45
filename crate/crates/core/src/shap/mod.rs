//! Exact SHAP attributions for tree ensembles, in margin (log-odds) units.
//!
//! Attributions use the path-dependent value function: for a feature set
//! `S`, `v(S)` follows the explained row at splits on features in `S` and
//! otherwise splits the expectation between children in proportion to their
//! training covers. Positive values push toward dropout.

mod oracle;
mod path;
mod summary;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gbdt::{Ensemble, Node};
use crate::records::FeatureVector;
use path::Condition;

pub use oracle::{
    brute_force_interactions, brute_force_shapley, path_dependent_value, used_features,
    MAX_ORACLE_FEATURES,
};
pub use summary::{
    dependence_series, importance_table, interaction_dependence, DependenceSeries,
    ImportanceRow, ImportanceTable, InteractionSeries,
};

/// Per-feature attributions for one row.
#[derive(Debug, Clone, PartialEq)]
pub struct ShapVector {
    pub phi: Vec<f64>,
    /// Cover-weighted expected margin of the model.
    pub base_value: f64,
}

impl ShapVector {
    /// `base_value + sum(phi)`; equals the model margin for the row.
    pub fn output(&self) -> f64 {
        self.base_value + self.phi.iter().sum::<f64>()
    }
}

/// Square matrix of pairwise attributions, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct InteractionMatrix {
    n: usize,
    values: Vec<f64>,
}

impl InteractionMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            values: vec![0.0; n * n],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.values[i * self.n + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.n..(i + 1) * self.n]
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.row(i).iter().sum()).collect()
    }

    /// Largest `|Phi[i][j] - Phi[j][i]|`.
    pub fn asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.n {
            for j in 0..i {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }
}

fn check_row(model: &Ensemble, x: &[f64]) -> Result<()> {
    if x.len() != model.num_features() {
        return Err(Error::LengthMismatch {
            expected: model.num_features(),
            got: x.len(),
        });
    }
    Ok(())
}

fn base_value(model: &Ensemble) -> f64 {
    model.base_score + model.trees.iter().map(|t| t.expected_value()).sum::<f64>()
}

fn shap_unchecked(model: &Ensemble, x: &[f64]) -> ShapVector {
    let mut phi = vec![0.0; model.num_features()];
    for tree in &model.trees {
        path::accumulate(tree, x, &mut phi, None);
    }
    ShapVector {
        phi,
        base_value: base_value(model),
    }
}

/// Exact Shapley values of `x` for the whole ensemble.
///
/// Fails with a model-integrity error when a tree has a zero-cover node or
/// inconsistent covers.
pub fn tree_shap(model: &Ensemble, x: &[f64]) -> Result<ShapVector> {
    check_row(model, x)?;
    model.validate()?;
    Ok(shap_unchecked(model, x))
}

/// [`tree_shap`] for every row, in parallel; output order matches input.
pub fn explain_rows(model: &Ensemble, rows: &[FeatureVector]) -> Result<Vec<ShapVector>> {
    model.validate()?;
    rows.iter().try_for_each(|r| check_row(model, &r.values))?;
    Ok(rows
        .par_iter()
        .map(|r| shap_unchecked(model, &r.values))
        .collect())
}

fn interactions_unchecked(model: &Ensemble, x: &[f64]) -> InteractionMatrix {
    let n = model.num_features();
    let mut out = InteractionMatrix::zeros(n);
    let mut phi = vec![0.0; n];
    let mut on = vec![0.0; n];
    let mut off = vec![0.0; n];
    let mut tree_features = Vec::new();
    for tree in &model.trees {
        path::accumulate(tree, x, &mut phi, None);
        tree_features.clear();
        tree_features.extend(tree.nodes().iter().filter_map(|node| match *node {
            Node::Split { feature, .. } => Some(feature),
            Node::Leaf { .. } => None,
        }));
        tree_features.sort_unstable();
        tree_features.dedup();
        // A feature the tree never splits on has identical on/off attributions.
        for &j in &tree_features {
            on.iter_mut().for_each(|v| *v = 0.0);
            off.iter_mut().for_each(|v| *v = 0.0);
            path::accumulate(tree, x, &mut on, Some(Condition { feature: j, present: true }));
            path::accumulate(tree, x, &mut off, Some(Condition { feature: j, present: false }));
            for k in 0..n {
                if k != j {
                    let half = (on[k] - off[k]) / 2.0;
                    out.set(j, k, out.get(j, k) + half);
                }
            }
        }
    }
    for (i, &p) in phi.iter().enumerate() {
        let off_diagonal: f64 = (0..n).filter(|&j| j != i).map(|j| out.get(i, j)).sum();
        out.set(i, i, p - off_diagonal);
    }
    out
}

/// Exact SHAP interaction values of `x`.
///
/// Off-diagonal entries split each pairwise interaction evenly between
/// `(i, j)` and `(j, i)`; the diagonal holds each feature's main effect, so
/// every row sums to that feature's Shapley value.
pub fn interaction_values(model: &Ensemble, x: &[f64]) -> Result<InteractionMatrix> {
    check_row(model, x)?;
    model.validate()?;
    Ok(interactions_unchecked(model, x))
}

/// [`interaction_values`] for every row, in parallel; output order matches
/// input.
pub fn explain_interactions(
    model: &Ensemble,
    rows: &[FeatureVector],
) -> Result<Vec<InteractionMatrix>> {
    model.validate()?;
    rows.iter().try_for_each(|r| check_row(model, &r.values))?;
    Ok(rows
        .par_iter()
        .map(|r| interactions_unchecked(model, &r.values))
        .collect())
}
