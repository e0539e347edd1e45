//! Exponential-time reference implementations that enumerate feature
//! subsets directly. They share nothing with the path recursion beyond the
//! value-function definition and exist to check it.

use super::{InteractionMatrix, ShapVector};
use crate::error::{Error, Result};
use crate::gbdt::{DecisionTree, Ensemble, Node};

/// Largest number of distinct model features the oracle will enumerate.
pub const MAX_ORACLE_FEATURES: usize = 12;

/// `v(S)` for one tree: follow `x` at splits on features in `S`, otherwise
/// average both children by cover.
pub fn path_dependent_value(tree: &DecisionTree, x: &[f64], in_subset: &dyn Fn(usize) -> bool) -> f64 {
    fn walk(tree: &DecisionTree, node: usize, x: &[f64], in_subset: &dyn Fn(usize) -> bool) -> f64 {
        match *tree.node(node) {
            Node::Leaf { value, .. } => value,
            Node::Split {
                feature,
                threshold,
                left,
                right,
                cover,
            } => {
                if in_subset(feature) {
                    let next = if x[feature] <= threshold { left } else { right };
                    walk(tree, next, x, in_subset)
                } else {
                    let wl = tree.node(left).cover() as f64 / cover as f64;
                    let wr = tree.node(right).cover() as f64 / cover as f64;
                    wl * walk(tree, left, x, in_subset) + wr * walk(tree, right, x, in_subset)
                }
            }
        }
    }
    walk(tree, 0, x, in_subset)
}

/// Sorted distinct features used by any split in the model.
pub fn used_features(model: &Ensemble) -> Vec<usize> {
    let mut used: Vec<usize> = model
        .trees
        .iter()
        .flat_map(|t| t.nodes().iter())
        .filter_map(|n| match *n {
            Node::Split { feature, .. } => Some(feature),
            Node::Leaf { .. } => None,
        })
        .collect();
    used.sort_unstable();
    used.dedup();
    used
}

/// Ensemble `v(S)` for every subset mask over `used`.
fn subset_values(model: &Ensemble, x: &[f64], used: &[usize]) -> Vec<f64> {
    (0..1usize << used.len())
        .map(|mask| {
            let in_subset = |f: usize| {
                used.iter()
                    .position(|&u| u == f)
                    .is_some_and(|k| mask >> k & 1 == 1)
            };
            model
                .trees
                .iter()
                .map(|t| path_dependent_value(t, x, &in_subset))
                .sum::<f64>()
        })
        .collect()
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

fn prepare(model: &Ensemble, x: &[f64]) -> Result<Vec<usize>> {
    if x.len() != model.num_features() {
        return Err(Error::LengthMismatch {
            expected: model.num_features(),
            got: x.len(),
        });
    }
    model.validate()?;
    let used = used_features(model);
    if used.len() > MAX_ORACLE_FEATURES {
        return Err(Error::TooManyFeatures {
            used: used.len(),
            limit: MAX_ORACLE_FEATURES,
        });
    }
    Ok(used)
}

/// Shapley values by enumerating all subsets of the used features:
/// `phi_i = sum_S |S|! (M - |S| - 1)! / M! * (v(S + i) - v(S))`.
/// Features no split uses get 0.
pub fn brute_force_shapley(model: &Ensemble, x: &[f64]) -> Result<ShapVector> {
    let used = prepare(model, x)?;
    let values = subset_values(model, x, &used);
    let m = used.len();
    let mut phi = vec![0.0; model.num_features()];
    for (k, &feature) in used.iter().enumerate() {
        let bit = 1usize << k;
        let mut total = 0.0;
        for mask in 0..1usize << m {
            if mask & bit != 0 {
                continue;
            }
            let s = mask.count_ones() as usize;
            let w = factorial(s) * factorial(m - s - 1) / factorial(m);
            total += w * (values[mask | bit] - values[mask]);
        }
        phi[feature] = total;
    }
    Ok(ShapVector {
        phi,
        base_value: model.base_score + values[0],
    })
}

/// Shapley interaction values by enumeration:
/// `Phi_ij = sum_{S without i,j} |S|! (M - |S| - 2)! / (2 (M - 1)!) *
/// (v(S+i+j) - v(S+i) - v(S+j) + v(S))` off the diagonal, and
/// `Phi_ii = phi_i - sum_{j != i} Phi_ij`.
pub fn brute_force_interactions(model: &Ensemble, x: &[f64]) -> Result<InteractionMatrix> {
    let used = prepare(model, x)?;
    let values = subset_values(model, x, &used);
    let phi = brute_force_shapley(model, x)?.phi;
    let m = used.len();
    let n = model.num_features();
    let mut out = InteractionMatrix::zeros(n);
    for a in 0..m {
        for b in 0..m {
            if a == b {
                continue;
            }
            let (bi, bj) = (1usize << a, 1usize << b);
            let mut total = 0.0;
            for mask in 0..1usize << m {
                if mask & (bi | bj) != 0 {
                    continue;
                }
                let s = mask.count_ones() as usize;
                let w = factorial(s) * factorial(m - s - 2) / (2.0 * factorial(m - 1));
                total += w
                    * (values[mask | bi | bj] - values[mask | bi] - values[mask | bj]
                        + values[mask]);
            }
            out.set(used[a], used[b], total);
        }
    }
    for (i, &p) in phi.iter().enumerate() {
        let off: f64 = (0..n).filter(|&j| j != i).map(|j| out.get(i, j)).sum();
        out.set(i, i, p - off);
    }
    Ok(out)
}
