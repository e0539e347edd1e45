use rayon::prelude::*;

use super::binning::BinnedDataset;
use super::config::TrainConfig;
use super::tree::{DecisionTree, Node};

/// Second-order gain of splitting a node with gradient/hessian sums
/// `(gl + gr, hl + hr)` into the two given children.
///
/// A child with zero regularized hessian makes the candidate invalid and the
/// gain is `-inf`.
pub fn split_gain(gl: f64, hl: f64, gr: f64, hr: f64, lambda_l2: f64) -> f64 {
    let dl = hl + lambda_l2;
    let dr = hr + lambda_l2;
    if dl <= 0.0 || dr <= 0.0 {
        return f64::NEG_INFINITY;
    }
    let g = gl + gr;
    let parent = g * g / (dl + dr - lambda_l2);
    0.5 * (gl * gl / dl + gr * gr / dr - parent)
}

fn leaf_value(g: f64, h: f64, lambda_l2: f64) -> f64 {
    let d = h + lambda_l2;
    if d > 0.0 {
        -g / d
    } else {
        0.0
    }
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    gain: f64,
    feature: usize,
    bin: u16,
    threshold: f64,
}

impl Candidate {
    /// Strictly better gain wins; equal gains keep the earlier (lower
    /// feature, lower bin) candidate.
    fn better_than(&self, other: &Option<Candidate>) -> bool {
        other.is_none_or(|o| self.gain > o.gain)
    }
}

struct Leaf {
    node: usize,
    rows: Vec<u32>,
    sum_g: f64,
    sum_h: f64,
    best: Option<Candidate>,
}

#[derive(Clone, Copy, Default)]
struct Bucket {
    g: f64,
    h: f64,
    n: u32,
}

const PARALLEL_WORK: usize = 1 << 15;

fn best_split(
    data: &BinnedDataset,
    g: &[f64],
    h: &[f64],
    rows: &[u32],
    sum_g: f64,
    sum_h: f64,
    cfg: &TrainConfig,
) -> Option<Candidate> {
    if rows.len() < 2 * cfg.min_data {
        return None;
    }
    let scan = |f: usize| scan_feature(data, f, g, h, rows, sum_g, sum_h, cfg);
    let per_feature: Vec<Option<Candidate>> =
        if rows.len() * data.num_features() >= PARALLEL_WORK {
            (0..data.num_features()).into_par_iter().map(scan).collect()
        } else {
            (0..data.num_features()).map(scan).collect()
        };
    per_feature.into_iter().flatten().fold(None, |best, c| {
        if c.better_than(&best) {
            Some(c)
        } else {
            best
        }
    })
}

#[allow(clippy::too_many_arguments)]
fn scan_feature(
    data: &BinnedDataset,
    feature: usize,
    g: &[f64],
    h: &[f64],
    rows: &[u32],
    sum_g: f64,
    sum_h: f64,
    cfg: &TrainConfig,
) -> Option<Candidate> {
    let n_bins = data.mapper().num_bins(feature);
    if n_bins < 2 {
        return None;
    }
    let bins = data.feature_bins(feature);
    let mut hist = vec![Bucket::default(); n_bins];
    for &r in rows {
        let r = r as usize;
        let b = &mut hist[bins[r] as usize];
        b.g += g[r];
        b.h += h[r];
        b.n += 1;
    }
    let total = rows.len();
    let (mut gl, mut hl, mut nl) = (0.0, 0.0, 0usize);
    let mut best: Option<Candidate> = None;
    for (bin, bucket) in hist[..n_bins - 1].iter().enumerate() {
        gl += bucket.g;
        hl += bucket.h;
        nl += bucket.n as usize;
        let nr = total - nl;
        if nl < cfg.min_data {
            continue;
        }
        if nr < cfg.min_data {
            break;
        }
        let hr = sum_h - hl;
        if hl < cfg.min_sum_hessian || hr < cfg.min_sum_hessian {
            continue;
        }
        let gain = split_gain(gl, hl, sum_g - gl, hr, cfg.lambda_l2);
        if gain.is_finite() && gain > 0.0 {
            let c = Candidate {
                gain,
                feature,
                bin: bin as u16,
                threshold: data.mapper().upper_bounds(feature)[bin],
            };
            if c.better_than(&best) {
                best = Some(c);
            }
        }
    }
    best
}

/// Grows one tree best-first: the leaf whose best split has the largest gain
/// is split next, until `num_leaves` is reached or no leaf has a legal split
/// with positive gain. Leaf values are the unshrunk Newton steps
/// `-G / (H + lambda)`.
pub fn grow_tree(data: &BinnedDataset, g: &[f64], h: &[f64], cfg: &TrainConfig) -> DecisionTree {
    let rows: Vec<u32> = (0..data.num_rows() as u32).collect();
    let sum_g = rows.iter().map(|&r| g[r as usize]).sum();
    let sum_h = rows.iter().map(|&r| h[r as usize]).sum();
    let mut nodes = vec![Node::Leaf {
        value: 0.0,
        cover: rows.len() as u64,
    }];
    let best = best_split(data, g, h, &rows, sum_g, sum_h, cfg);
    let mut leaves = vec![Leaf {
        node: 0,
        rows,
        sum_g,
        sum_h,
        best,
    }];

    while leaves.len() < cfg.num_leaves {
        let mut pick: Option<(usize, f64)> = None;
        for (i, leaf) in leaves.iter().enumerate() {
            if let Some(c) = leaf.best {
                if pick.is_none_or(|(_, gain)| c.gain > gain) {
                    pick = Some((i, c.gain));
                }
            }
        }
        let Some((i, _)) = pick else { break };
        let leaf = leaves.swap_remove(i);
        let split = leaf.best.expect("picked leaf has a split");
        let bins = data.feature_bins(split.feature);
        let (left_rows, right_rows): (Vec<u32>, Vec<u32>) = leaf
            .rows
            .iter()
            .partition(|&&r| bins[r as usize] <= split.bin);

        let left_node = nodes.len();
        nodes.push(Node::Leaf {
            value: 0.0,
            cover: left_rows.len() as u64,
        });
        nodes.push(Node::Leaf {
            value: 0.0,
            cover: right_rows.len() as u64,
        });
        nodes[leaf.node] = Node::Split {
            feature: split.feature,
            threshold: split.threshold,
            left: left_node,
            right: left_node + 1,
            cover: leaf.rows.len() as u64,
        };

        for (node, child_rows) in [(left_node, left_rows), (left_node + 1, right_rows)] {
            let cg: f64 = child_rows.iter().map(|&r| g[r as usize]).sum();
            let ch: f64 = child_rows.iter().map(|&r| h[r as usize]).sum();
            let best = best_split(data, g, h, &child_rows, cg, ch, cfg);
            leaves.push(Leaf {
                node,
                rows: child_rows,
                sum_g: cg,
                sum_h: ch,
                best,
            });
        }
        // Keep creation order so leaf ties resolve the same way every run.
        leaves.sort_by_key(|l| l.node);
    }

    for leaf in &leaves {
        nodes[leaf.node] = Node::Leaf {
            value: leaf_value(leaf.sum_g, leaf.sum_h, cfg.lambda_l2),
            cover: leaf.rows.len() as u64,
        };
    }
    DecisionTree::from_nodes_unchecked(nodes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gbdt::binning::bin_features;
    use crate::gbdt::loss::logistic_gradients;
    use crate::records::{FeatureSchema, FeatureVector};

    fn cfg(min_data: usize, num_leaves: usize) -> TrainConfig {
        TrainConfig {
            min_data,
            num_leaves,
            ..TrainConfig::default()
        }
    }

    #[test]
    fn gain_examples() {
        assert_eq!(split_gain(0.0, 1.0, 0.0, 1.0, 0.0), 0.0);
        assert_eq!(split_gain(-2.0, 1.0, 2.0, 1.0, 0.0), 4.0);
        assert!(split_gain(-2.0, 1.0, 2.0, 1.0, 1e12).abs() < 1e-10);
        assert_eq!(split_gain(1.0, 0.0, 1.0, 1.0, 0.0), f64::NEG_INFINITY);
    }

    /// 1-D, y = 1 iff x > 0, `n` rows split evenly.
    fn threshold_data(n: usize) -> (crate::gbdt::BinnedDataset, Vec<f64>, Vec<f64>) {
        let rows: Vec<FeatureVector> = (0..n)
            .map(|i| {
                let x = i as f64 - (n / 2) as f64 + 0.5;
                FeatureVector::new(vec![x], u8::from(x > 0.0))
            })
            .collect();
        let ds = bin_features(&FeatureSchema::anonymous(1), &rows, 512).unwrap();
        let (g, h) = logistic_gradients(ds.labels(), &vec![0.0; n]);
        (ds, g, h)
    }

    #[test]
    fn zero_gradients_single_leaf() {
        let (ds, _, h) = threshold_data(400);
        let g = vec![0.0; 400];
        let t = grow_tree(&ds, &g, &h, &cfg(100, 10));
        assert_eq!(t.nodes(), &[Node::Leaf { value: 0.0, cover: 400 }]);
    }

    #[test]
    fn too_few_rows_single_leaf() {
        let (ds, g, h) = threshold_data(150);
        let t = grow_tree(&ds, &g, &h, &cfg(100, 10));
        assert_eq!(t.num_leaves(), 1);
        assert_eq!(t.node(0).cover(), 150);
    }

    #[test]
    fn separable_stump_splits_at_zero() {
        let (ds, g, h) = threshold_data(400);
        let t = grow_tree(&ds, &g, &h, &cfg(100, 10));
        match *t.node(0) {
            Node::Split { feature, threshold, .. } => {
                assert_eq!(feature, 0);
                assert_eq!(threshold, 0.0);
            }
            ref n => panic!("root is {n:?}"),
        }
        // Both sides are pure, so no further split gains anything.
        assert_eq!(t.depth(), 1);
        assert!(t.predict(&[-1.0]) < 0.0 && t.predict(&[1.0]) > 0.0);
        t.check_covers().unwrap();
    }

    #[test]
    fn respects_leaf_budget_and_min_data() {
        let rows: Vec<FeatureVector> = (0..600)
            .map(|i| {
                let x = (i * 37 % 600) as f64;
                let z = (i * 11 % 13) as f64;
                FeatureVector::new(vec![x, z], u8::from((x as usize / 50 + z as usize).is_multiple_of(2)))
            })
            .collect();
        let ds = bin_features(&FeatureSchema::anonymous(2), &rows, 512).unwrap();
        let (g, h) = logistic_gradients(ds.labels(), &vec![0.0; 600]);
        for (min_data, leaves) in [(20, 6), (50, 10), (5, 30)] {
            let t = grow_tree(&ds, &g, &h, &cfg(min_data, leaves));
            assert!(t.num_leaves() <= leaves);
            t.check_structure().unwrap();
            t.check_covers().unwrap();
            for n in t.nodes() {
                if n.is_leaf() {
                    assert!(n.cover() >= min_data as u64);
                }
            }
        }
    }

    #[test]
    fn equal_gain_prefers_lower_feature() {
        // Two identical features: the split must use feature 0.
        let rows: Vec<FeatureVector> = (0..40)
            .map(|i| FeatureVector::new(vec![i as f64, i as f64], u8::from(i >= 20)))
            .collect();
        let ds = bin_features(&FeatureSchema::anonymous(2), &rows, 512).unwrap();
        let (g, h) = logistic_gradients(ds.labels(), &vec![0.0; 40]);
        let t = grow_tree(&ds, &g, &h, &cfg(5, 2));
        assert!(matches!(*t.node(0), Node::Split { feature: 0, .. }));
    }
}
