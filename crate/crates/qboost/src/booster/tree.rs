//! Regression-tree structure and the exact greedy split search.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::objective::GradHess;

use super::TrainConfig;

/// A node of a binary regression tree. Rows with `feature < threshold` go
/// left, all others right.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TreeNode {
    Split {
        feature_index: usize,
        threshold: f64,
        left: Box<TreeNode>,
        right: Box<TreeNode>,
    },
    Leaf {
        weight: f64,
    },
}

impl TreeNode {
    /// Route a feature row to its leaf and return the leaf weight.
    pub fn predict_row(&self, features: &[f64]) -> f64 {
        let mut node = self;
        loop {
            match node {
                TreeNode::Leaf { weight } => return *weight,
                TreeNode::Split {
                    feature_index,
                    threshold,
                    left,
                    right,
                } => {
                    node = if features[*feature_index] < *threshold {
                        left
                    } else {
                        right
                    };
                }
            }
        }
    }

    /// Number of node levels; a lone leaf has depth 1.
    pub fn depth(&self) -> usize {
        match self {
            TreeNode::Leaf { .. } => 1,
            TreeNode::Split { left, right, .. } => 1 + left.depth().max(right.depth()),
        }
    }

    pub fn n_leaves(&self) -> usize {
        match self {
            TreeNode::Leaf { .. } => 1,
            TreeNode::Split { left, right, .. } => left.n_leaves() + right.n_leaves(),
        }
    }
}

/// Optimal weight of a leaf holding gradient sum `grad_sum` and hessian sum
/// `hess_sum`: `-G / (H + lambda)`.
pub fn leaf_weight(grad_sum: f64, hess_sum: f64, lambda: f64) -> Result<f64> {
    let denom = hess_sum + lambda;
    if denom <= 0.0 {
        return Err(Error::DegenerateLeaf { hess_sum, lambda });
    }
    Ok(-grad_sum / denom)
}

/// Regularized score of a fixed tree structure given its per-leaf gradient
/// and hessian sums: `-1/2 * sum_j G_j^2 / (H_j + lambda) + gamma * T`.
/// Smaller is better.
pub fn structure_score(leaf_sums: &[(f64, f64)], lambda: f64, gamma: f64) -> Result<f64> {
    let mut total = 0.0;
    for &(grad_sum, hess_sum) in leaf_sums {
        let denom = hess_sum + lambda;
        if denom <= 0.0 {
            return Err(Error::DegenerateLeaf { hess_sum, lambda });
        }
        total += grad_sum * grad_sum / denom;
    }
    Ok(-0.5 * total + gamma * leaf_sums.len() as f64)
}

/// Score improvement from splitting a leaf into (L, R), minus the per-leaf
/// penalty `gamma`. A split is worth taking only when this is positive.
pub fn split_gain(
    grad_left: f64,
    hess_left: f64,
    grad_right: f64,
    hess_right: f64,
    lambda: f64,
    gamma: f64,
) -> Result<f64> {
    let dl = hess_left + lambda;
    let dr = hess_right + lambda;
    let dp = hess_left + hess_right + lambda;
    if dl <= 0.0 || dr <= 0.0 || dp <= 0.0 {
        return Err(Error::DegenerateLeaf {
            hess_sum: dl.min(dr).min(dp) - lambda,
            lambda,
        });
    }
    let grad_parent = grad_left + grad_right;
    Ok(0.5
        * (grad_left * grad_left / dl + grad_right * grad_right / dr
            - grad_parent * grad_parent / dp)
        - gamma)
}

/// A candidate split chosen by [`find_best_split`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitCandidate {
    pub feature_index: usize,
    pub threshold: f64,
    pub gain: f64,
}

impl SplitCandidate {
    /// Total preference order: higher gain wins; ties go to the lower
    /// feature index, then the lower threshold. Keeps parallel reduction
    /// deterministic.
    fn better_than(&self, other: &SplitCandidate) -> bool {
        if self.gain != other.gain {
            return self.gain > other.gain;
        }
        if self.feature_index != other.feature_index {
            return self.feature_index < other.feature_index;
        }
        self.threshold < other.threshold
    }
}

fn pick_better(a: Option<SplitCandidate>, b: Option<SplitCandidate>) -> Option<SplitCandidate> {
    match (a, b) {
        (Some(x), Some(y)) => Some(if x.better_than(&y) { x } else { y }),
        (x, None) => x,
        (None, y) => y,
    }
}

/// Exact greedy search over every feature and every midpoint between
/// consecutive distinct sorted feature values. Returns the candidate with
/// the largest gain subject to `gain > 0` and both children carrying at
/// least `min_child_weight` of hessian mass, or `None` when no candidate
/// qualifies.
pub fn find_best_split(
    rows: &[usize],
    dataset: &Dataset,
    grads: &[GradHess],
    config: &TrainConfig,
) -> Option<SplitCandidate> {
    if rows.len() < 2 {
        return None;
    }
    let mut grad_total = 0.0;
    let mut hess_total = 0.0;
    for &r in rows {
        grad_total += grads[r].g;
        hess_total += grads[r].h;
    }
    (0..dataset.n_features())
        .into_par_iter()
        .map(|feature| {
            scan_feature(feature, rows, dataset.column(feature), grads, grad_total, hess_total, config)
        })
        .reduce(|| None, pick_better)
}

/// Scan one feature: sort the rows by value, sweep a prefix boundary, and
/// evaluate the gain at every distinct-value transition.
fn scan_feature(
    feature: usize,
    rows: &[usize],
    column: &[f64],
    grads: &[GradHess],
    grad_total: f64,
    hess_total: f64,
    config: &TrainConfig,
) -> Option<SplitCandidate> {
    let mut order: Vec<(f64, usize)> = rows.iter().map(|&r| (column[r], r)).collect();
    // Secondary sort on the row index pins the accumulation order when
    // feature values tie, which keeps the float sums reproducible.
    order.sort_unstable_by(|a, b| {
        a.0.partial_cmp(&b.0)
            .expect("finite feature values")
            .then(a.1.cmp(&b.1))
    });

    let mut grad_left = 0.0;
    let mut hess_left = 0.0;
    let mut best: Option<SplitCandidate> = None;
    for window in 0..order.len() - 1 {
        let (value, row) = order[window];
        grad_left += grads[row].g;
        hess_left += grads[row].h;
        let next_value = order[window + 1].0;
        if value >= next_value {
            continue;
        }
        let grad_right = grad_total - grad_left;
        let hess_right = hess_total - hess_left;
        if hess_left < config.min_child_weight || hess_right < config.min_child_weight {
            continue;
        }
        let mut threshold = 0.5 * (value + next_value);
        if threshold <= value {
            // Adjacent doubles can round the midpoint onto the lower value;
            // the upper value induces the same partition under `<`.
            threshold = next_value;
        }
        let Ok(gain) = split_gain(
            grad_left,
            hess_left,
            grad_right,
            hess_right,
            config.lambda,
            config.gamma,
        ) else {
            continue;
        };
        if gain <= 0.0 {
            continue;
        }
        let candidate = SplitCandidate { feature_index: feature, threshold, gain };
        if best.as_ref().is_none_or(|b| candidate.better_than(b)) {
            best = Some(candidate);
        }
    }
    best
}

/// Grow one regression tree by recursive greedy splitting. A node becomes a
/// leaf when it reaches `max_depth` levels, when no split has positive gain,
/// or when its rows hold fewer than two distinct values on every feature.
pub fn grow_tree(dataset: &Dataset, grads: &[GradHess], config: &TrainConfig) -> Result<TreeNode> {
    let rows: Vec<usize> = (0..dataset.n_rows()).collect();
    grow_node(&rows, dataset, grads, config, 1)
}

fn grow_node(
    rows: &[usize],
    dataset: &Dataset,
    grads: &[GradHess],
    config: &TrainConfig,
    depth: usize,
) -> Result<TreeNode> {
    let split = if depth < config.max_depth {
        find_best_split(rows, dataset, grads, config)
    } else {
        None
    };
    match split {
        Some(candidate) => {
            let column = dataset.column(candidate.feature_index);
            let (left_rows, right_rows): (Vec<usize>, Vec<usize>) = rows
                .iter()
                .partition(|&&r| column[r] < candidate.threshold);
            Ok(TreeNode::Split {
                feature_index: candidate.feature_index,
                threshold: candidate.threshold,
                left: Box::new(grow_node(&left_rows, dataset, grads, config, depth + 1)?),
                right: Box::new(grow_node(&right_rows, dataset, grads, config, depth + 1)?),
            })
        }
        None => {
            let mut grad_sum = 0.0;
            let mut hess_sum = 0.0;
            for &r in rows {
                grad_sum += grads[r].g;
                hess_sum += grads[r].h;
            }
            Ok(TreeNode::Leaf {
                weight: leaf_weight(grad_sum, hess_sum, config.lambda)?,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::Dataset;

    fn config(lambda: f64, gamma: f64, max_depth: usize) -> TrainConfig {
        TrainConfig {
            max_depth,
            lambda,
            gamma,
            min_child_weight: 0.0,
            ..TrainConfig::default()
        }
    }

    #[test]
    fn leaf_weight_values() {
        assert!((leaf_weight(4.0, 2.0, 1.0).unwrap() - (-4.0 / 3.0)).abs() < 1e-15);
        assert_eq!(leaf_weight(0.0, 5.0, 1.0).unwrap(), 0.0);
        assert_eq!(leaf_weight(-3.0, 0.0, 1.0).unwrap(), 3.0);
        assert!(leaf_weight(1.0, 0.0, 0.0).is_err());
        assert!(leaf_weight(1.0, -2.0, 1.0).is_err());
    }

    #[test]
    fn structure_score_values() {
        assert_eq!(structure_score(&[(0.0, 1.0)], 0.0, 0.0).unwrap(), 0.0);
        assert_eq!(structure_score(&[(-4.0, 2.0)], 0.0, 0.0).unwrap(), -4.0);
        assert_eq!(
            structure_score(&[(-4.0, 2.0), (4.0, 2.0)], 0.0, 1.0).unwrap(),
            -6.0
        );
        assert!(structure_score(&[(1.0, 0.0)], 0.0, 0.0).is_err());
    }

    #[test]
    fn split_gain_values() {
        assert_eq!(split_gain(-4.0, 2.0, 4.0, 2.0, 0.0, 0.0).unwrap(), 8.0);
        assert_eq!(split_gain(-4.0, 2.0, 4.0, 2.0, 0.0, 1.0).unwrap(), 7.0);
        // Identical halves: hand evaluation 1/2 (2 + 2 - 16/3) = -2/3.
        let gain = split_gain(-2.0, 1.0, -2.0, 1.0, 1.0, 0.0).unwrap();
        assert!((gain - (-2.0 / 3.0)).abs() < 1e-15);
        assert!(split_gain(1.0, 0.0, 1.0, 1.0, 0.0, 0.0).is_err());
    }

    fn two_row_dataset() -> (Dataset, Vec<GradHess>) {
        let ds = Dataset::new(vec!["x".into()], vec![vec![0.0, 1.0]], vec![0.0, 0.0]).unwrap();
        let grads = vec![GradHess { g: -1.0, h: 1.0 }, GradHess { g: 1.0, h: 1.0 }];
        (ds, grads)
    }

    #[test]
    fn best_split_two_rows() {
        let (ds, grads) = two_row_dataset();
        let cfg = config(0.0, 0.0, 8);
        let best = find_best_split(&[0, 1], &ds, &grads, &cfg).unwrap();
        assert_eq!(best.feature_index, 0);
        assert_eq!(best.threshold, 0.5);
        assert_eq!(best.gain, 1.0);
    }

    #[test]
    fn no_split_on_single_row_or_constant_feature() {
        let (ds, grads) = two_row_dataset();
        let cfg = config(0.0, 0.0, 8);
        assert!(find_best_split(&[0], &ds, &grads, &cfg).is_none());

        let flat = Dataset::new(
            vec!["x".into()],
            vec![vec![3.0, 3.0, 3.0]],
            vec![0.0, 0.0, 0.0],
        )
        .unwrap();
        let grads = vec![GradHess { g: 1.0, h: 1.0 }; 3];
        assert!(find_best_split(&[0, 1, 2], &flat, &grads, &cfg).is_none());
    }

    #[test]
    fn no_split_when_gain_not_positive() {
        // Equal gradients on both sides: the centered gain is zero before
        // gamma, so nothing qualifies.
        let ds = Dataset::new(vec!["x".into()], vec![vec![0.0, 1.0]], vec![0.0, 0.0]).unwrap();
        let grads = vec![GradHess { g: 1.0, h: 1.0 }; 2];
        let cfg = config(0.0, 0.0, 8);
        assert!(find_best_split(&[0, 1], &ds, &grads, &cfg).is_none());

        // Positive raw gain wiped out by gamma.
        let (ds, grads) = two_row_dataset();
        let cfg = config(0.0, 1.0, 8);
        assert!(find_best_split(&[0, 1], &ds, &grads, &cfg).is_none());
    }

    #[test]
    fn min_child_weight_blocks_light_children() {
        let (ds, grads) = two_row_dataset();
        let mut cfg = config(0.0, 0.0, 8);
        cfg.min_child_weight = 1.5;
        assert!(find_best_split(&[0, 1], &ds, &grads, &cfg).is_none());
        cfg.min_child_weight = 1.0;
        assert!(find_best_split(&[0, 1], &ds, &grads, &cfg).is_some());
    }

    #[test]
    fn tie_break_prefers_lowest_feature_then_threshold() {
        // Two identical features produce identical gains everywhere.
        let ds = Dataset::new(
            vec!["a".into(), "b".into()],
            vec![vec![0.0, 1.0], vec![0.0, 1.0]],
            vec![0.0, 0.0],
        )
        .unwrap();
        let grads = vec![GradHess { g: -1.0, h: 1.0 }, GradHess { g: 1.0, h: 1.0 }];
        let cfg = config(0.0, 0.0, 8);
        let best = find_best_split(&[0, 1], &ds, &grads, &cfg).unwrap();
        assert_eq!(best.feature_index, 0);
    }

    #[test]
    fn grow_respects_depth_limit() {
        let (ds, grads) = two_row_dataset();
        let tree = grow_tree(&ds, &grads, &config(0.5, 0.0, 1)).unwrap();
        match tree {
            TreeNode::Leaf { weight } => {
                // -(G)/(H + lambda) = -0 / 2.5 = 0 for the summed grads
                assert_eq!(weight, 0.0);
            }
            _ => panic!("expected a single leaf at max_depth = 1"),
        }
    }

    #[test]
    fn grow_two_rows_gives_unit_leaves() {
        let (ds, grads) = two_row_dataset();
        let tree = grow_tree(&ds, &grads, &config(0.0, 0.0, 2)).unwrap();
        match &tree {
            TreeNode::Split { feature_index, threshold, left, right } => {
                assert_eq!(*feature_index, 0);
                assert_eq!(*threshold, 0.5);
                assert_eq!(**left, TreeNode::Leaf { weight: 1.0 });
                assert_eq!(**right, TreeNode::Leaf { weight: -1.0 });
            }
            _ => panic!("expected a root split"),
        }
        assert_eq!(tree.depth(), 2);
        assert_eq!(tree.n_leaves(), 2);
    }

    #[test]
    fn predict_routes_by_threshold() {
        let tree = TreeNode::Split {
            feature_index: 0,
            threshold: 2.0,
            left: Box::new(TreeNode::Leaf { weight: -5.0 }),
            right: Box::new(TreeNode::Split {
                feature_index: 1,
                threshold: 0.0,
                left: Box::new(TreeNode::Leaf { weight: 1.0 }),
                right: Box::new(TreeNode::Leaf { weight: 2.0 }),
            }),
        };
        // Manual traversal: x0 < 2 -> -5; else x1 < 0 -> 1, x1 >= 0 -> 2.
        assert_eq!(tree.predict_row(&[1.9, 99.0]), -5.0);
        assert_eq!(tree.predict_row(&[2.0, -0.1]), 1.0);
        assert_eq!(tree.predict_row(&[3.0, 0.0]), 2.0);
    }

    #[test]
    fn node_serialization_shape() {
        let leaf = TreeNode::Leaf { weight: 0.25 };
        assert_eq!(serde_json::to_string(&leaf).unwrap(), r#"{"weight":0.25}"#);
        let split = TreeNode::Split {
            feature_index: 1,
            threshold: 0.5,
            left: Box::new(TreeNode::Leaf { weight: 1.0 }),
            right: Box::new(TreeNode::Leaf { weight: -1.0 }),
        };
        let json = serde_json::to_string(&split).unwrap();
        let back: TreeNode = serde_json::from_str(&json).unwrap();
        assert_eq!(back, split);
    }
}
