//! Polynomial-time exact Shapley values for one tree under the
//! path-dependent (cover-weighted) value function.
//!
//! The recursion walks every root-to-leaf path once while maintaining, for
//! the distinct features met so far, the fraction of cover that flows down
//! the path when the feature is absent (`zero_fraction`) or present
//! (`one_fraction`) together with the permutation weights of every subset
//! size. Revisiting a feature deeper in the path first removes ("unwinds")
//! its earlier entry so each feature appears once.

use crate::gbdt::{DecisionTree, Node};

#[derive(Debug, Clone, Copy)]
struct PathElement {
    feature: Option<usize>,
    zero_fraction: f64,
    one_fraction: f64,
    weight: f64,
}

/// Fixes one feature as always present or always absent while attributing
/// the remaining features; used for interaction values.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Condition {
    pub feature: usize,
    pub present: bool,
}

fn extend(path: &mut Vec<PathElement>, zero_fraction: f64, one_fraction: f64, feature: Option<usize>) {
    path.push(PathElement {
        feature,
        zero_fraction,
        one_fraction,
        weight: if path.is_empty() { 1.0 } else { 0.0 },
    });
    let depth = path.len() - 1;
    let denom = (depth + 1) as f64;
    for i in (0..depth).rev() {
        path[i + 1].weight += one_fraction * path[i].weight * (i + 1) as f64 / denom;
        path[i].weight = zero_fraction * path[i].weight * (depth - i) as f64 / denom;
    }
}

fn unwind(path: &mut Vec<PathElement>, index: usize) {
    let depth = path.len() - 1;
    let denom = (depth + 1) as f64;
    let one = path[index].one_fraction;
    let zero = path[index].zero_fraction;
    let mut next_one = path[depth].weight;
    for i in (0..depth).rev() {
        if one != 0.0 {
            let tmp = path[i].weight;
            path[i].weight = next_one * denom / ((i + 1) as f64 * one);
            next_one = tmp - path[i].weight * zero * (depth - i) as f64 / denom;
        } else {
            path[i].weight = path[i].weight * denom / (zero * (depth - i) as f64);
        }
    }
    // Weights stay by position; the feature data shifts left.
    for i in index..depth {
        path[i].feature = path[i + 1].feature;
        path[i].zero_fraction = path[i + 1].zero_fraction;
        path[i].one_fraction = path[i + 1].one_fraction;
    }
    path.pop();
}

/// Total permutation weight of the path with element `index` removed.
fn unwound_sum(path: &[PathElement], index: usize) -> f64 {
    let depth = path.len() - 1;
    let denom = (depth + 1) as f64;
    let one = path[index].one_fraction;
    let zero = path[index].zero_fraction;
    let mut total = 0.0;
    if one != 0.0 {
        let mut next_one = path[depth].weight;
        for i in (0..depth).rev() {
            let tmp = next_one / ((i + 1) as f64 * one);
            total += tmp;
            next_one = path[i].weight - tmp * zero * (depth - i) as f64;
        }
    } else {
        for i in (0..depth).rev() {
            total += path[i].weight / (zero * (depth - i) as f64);
        }
    }
    total * denom
}

struct Walker<'a> {
    tree: &'a DecisionTree,
    x: &'a [f64],
    phi: &'a mut [f64],
    condition: Option<Condition>,
}

impl Walker<'_> {
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        &mut self,
        node: usize,
        parent_path: &[PathElement],
        zero_fraction: f64,
        one_fraction: f64,
        parent_feature: Option<usize>,
        condition_fraction: f64,
    ) {
        if condition_fraction == 0.0 {
            return;
        }
        let mut path = Vec::with_capacity(parent_path.len() + 1);
        path.extend_from_slice(parent_path);
        let conditioned_parent = matches!(
            (self.condition, parent_feature),
            (Some(c), Some(f)) if c.feature == f
        );
        if !conditioned_parent {
            extend(&mut path, zero_fraction, one_fraction, parent_feature);
        }

        match *self.tree.node(node) {
            Node::Leaf { value, .. } => {
                for i in 1..path.len() {
                    let w = unwound_sum(&path, i);
                    let el = path[i];
                    let f = el.feature.expect("non-root path elements carry a feature");
                    self.phi[f] += w * (el.one_fraction - el.zero_fraction) * value * condition_fraction;
                }
            }
            Node::Split {
                feature,
                threshold,
                left,
                right,
                cover,
            } => {
                let (hot, cold) = if self.x[feature] <= threshold {
                    (left, right)
                } else {
                    (right, left)
                };
                let cover = cover as f64;
                let hot_zero = self.tree.node(hot).cover() as f64 / cover;
                let cold_zero = self.tree.node(cold).cover() as f64 / cover;

                let mut incoming_zero = 1.0;
                let mut incoming_one = 1.0;
                if let Some(k) = (1..path.len()).find(|&k| path[k].feature == Some(feature)) {
                    incoming_zero = path[k].zero_fraction;
                    incoming_one = path[k].one_fraction;
                    unwind(&mut path, k);
                }

                let mut hot_condition = condition_fraction;
                let mut cold_condition = condition_fraction;
                if let Some(c) = self.condition {
                    if c.feature == feature {
                        if c.present {
                            cold_condition = 0.0;
                        } else {
                            hot_condition *= hot_zero;
                            cold_condition *= cold_zero;
                        }
                    }
                }

                self.recurse(
                    hot,
                    &path,
                    hot_zero * incoming_zero,
                    incoming_one,
                    Some(feature),
                    hot_condition,
                );
                self.recurse(
                    cold,
                    &path,
                    cold_zero * incoming_zero,
                    0.0,
                    Some(feature),
                    cold_condition,
                );
            }
        }
    }
}

/// Adds the tree's attributions for `x` into `phi`. Covers must be positive.
pub(crate) fn accumulate(
    tree: &DecisionTree,
    x: &[f64],
    phi: &mut [f64],
    condition: Option<Condition>,
) {
    let mut walker = Walker {
        tree,
        x,
        phi,
        condition,
    };
    walker.recurse(0, &[], 1.0, 1.0, None, 1.0);
}
