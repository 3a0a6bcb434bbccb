//! Decision trees grown on a bootstrap sample, stored flat in preorder.

use rand::seq::index;
use rand::Rng;

use super::split::{best_split_indexed, SplitScratch};
use super::{ForestError, ForestParams, Sample};
use crate::features::{FeatureVector, N_FEATURES};
use crate::geometry::Label;

/// A tree node. Internal nodes route `features[feature] < threshold` to
/// `left`, everything else to `right`; indices point into [`Tree::nodes`].
#[derive(Debug, Clone, PartialEq)]
pub enum TreeNode {
    Internal { feature: usize, threshold: f64, left: usize, right: usize },
    Leaf { count_above: u64, count_below: u64 },
}

/// Nodes in preorder; the root is `nodes[0]` and every internal node's left
/// child immediately follows it.
#[derive(Debug, Clone, PartialEq)]
pub struct Tree {
    nodes: Vec<TreeNode>,
}

impl Tree {
    /// Checks the preorder layout and child references.
    pub fn from_nodes(nodes: Vec<TreeNode>) -> Result<Self, ForestError> {
        if nodes.is_empty() {
            return Err(ForestError::MalformedTree("tree has no nodes".into()));
        }
        // Walk in preorder and confirm every node is reached exactly once.
        let mut next = 0usize;
        let mut stack = vec![0usize];
        while let Some(i) = stack.pop() {
            if i != next {
                return Err(ForestError::MalformedTree(format!(
                    "node {i} is not in preorder position {next}"
                )));
            }
            next += 1;
            match nodes.get(i) {
                Some(TreeNode::Internal { feature, threshold, left, right }) => {
                    if *feature >= N_FEATURES || threshold.is_nan() {
                        return Err(ForestError::MalformedTree(format!(
                            "node {i} has invalid split ({feature}, {threshold})"
                        )));
                    }
                    if *left != i + 1 || *right <= *left || *right >= nodes.len() {
                        return Err(ForestError::MalformedTree(format!(
                            "node {i} has invalid children ({left}, {right})"
                        )));
                    }
                    stack.push(*right);
                    stack.push(*left);
                }
                Some(TreeNode::Leaf { count_above, count_below }) => {
                    if count_above + count_below == 0 {
                        return Err(ForestError::MalformedTree(format!("leaf {i} is empty")));
                    }
                }
                None => unreachable!(),
            }
        }
        if next != nodes.len() {
            return Err(ForestError::MalformedTree(format!(
                "{} of {} nodes unreachable from the root",
                nodes.len() - next,
                nodes.len()
            )));
        }
        Ok(Self { nodes })
    }

    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    pub fn root(&self) -> &TreeNode {
        &self.nodes[0]
    }

    pub fn leaves(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.nodes.iter().filter_map(|n| match n {
            TreeNode::Leaf { count_above, count_below } => Some((*count_above, *count_below)),
            TreeNode::Internal { .. } => None,
        })
    }

    pub fn depth(&self) -> usize {
        let mut max = 0;
        let mut stack = vec![(0usize, 0usize)];
        while let Some((i, d)) = stack.pop() {
            max = max.max(d);
            if let TreeNode::Internal { left, right, .. } = self.nodes[i] {
                stack.push((left, d + 1));
                stack.push((right, d + 1));
            }
        }
        max
    }

    /// Leaf reached by a feature vector.
    #[inline]
    pub fn leaf_for(&self, x: &FeatureVector) -> (u64, u64) {
        let mut i = 0;
        loop {
            match self.nodes[i] {
                TreeNode::Internal { feature, threshold, left, right } => {
                    i = if x[feature] < threshold { left } else { right };
                }
                TreeNode::Leaf { count_above, count_below } => return (count_above, count_below),
            }
        }
    }

    /// Below-horizon fraction of the leaf reached by `x`.
    #[inline]
    pub fn p_below(&self, x: &FeatureVector) -> f64 {
        let (a, b) = self.leaf_for(x);
        b as f64 / (a + b) as f64
    }
}

struct Task {
    start: usize,
    end: usize,
    /// Internal node whose `right` index is set when this task starts.
    patch_right_of: Option<usize>,
}

/// Grows one unpruned tree on a bootstrap resample of `samples`.
pub fn train_tree<R: Rng + ?Sized>(
    samples: &[Sample],
    params: &ForestParams,
    rng: &mut R,
) -> Result<Tree, ForestError> {
    params.validate()?;
    let n = samples.len();
    if n < params.min_samples_leaf || n == 0 {
        return Err(ForestError::TooFewSamples { got: n, need: params.min_samples_leaf.max(1) });
    }
    if n > u32::MAX as usize {
        return Err(ForestError::InvalidParams(format!("{n} samples exceed u32 indexing")));
    }

    let mut indices: Vec<u32> = (0..n).map(|_| rng.random_range(0..n) as u32).collect();
    let mut nodes = Vec::new();
    let mut scratch = SplitScratch::default();
    let mut stack = vec![Task { start: 0, end: n, patch_right_of: None }];

    while let Some(task) = stack.pop() {
        let here = nodes.len();
        if let Some(parent) = task.patch_right_of {
            if let TreeNode::Internal { right, .. } = &mut nodes[parent] {
                *right = here;
            }
        }
        let slice = &mut indices[task.start..task.end];
        let mut candidates = index::sample(rng, N_FEATURES, params.features_per_split).into_vec();
        candidates.sort_unstable();

        match best_split_indexed(samples, slice, &candidates, params.min_samples_leaf, &mut scratch) {
            None => {
                let above = slice
                    .iter()
                    .filter(|&&i| samples[i as usize].label == Label::Above)
                    .count() as u64;
                nodes.push(TreeNode::Leaf {
                    count_above: above,
                    count_below: slice.len() as u64 - above,
                });
            }
            Some(split) => {
                let mid = partition(slice, |i| {
                    samples[i as usize].features[split.feature] < split.threshold
                });
                nodes.push(TreeNode::Internal {
                    feature: split.feature,
                    threshold: split.threshold,
                    left: here + 1,
                    right: usize::MAX,
                });
                stack.push(Task {
                    start: task.start + mid,
                    end: task.end,
                    patch_right_of: Some(here),
                });
                stack.push(Task { start: task.start, end: task.start + mid, patch_right_of: None });
            }
        }
    }
    Ok(Tree { nodes })
}

/// Stable partition: elements satisfying `pred` first. Returns their count.
fn partition(slice: &mut [u32], pred: impl Fn(u32) -> bool) -> usize {
    let (yes, no): (Vec<u32>, Vec<u32>) = slice.iter().partition(|&&i| pred(i));
    let k = yes.len();
    slice[..k].copy_from_slice(&yes);
    slice[k..].copy_from_slice(&no);
    k
}
