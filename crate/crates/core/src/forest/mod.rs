//! Binary random forest over horizon-side labels, with averaged leaf
//! probabilities and binary entropy as the uncertainty signal.

mod split;
mod tree;

pub use split::{best_split, gini, Split};
pub use tree::{train_tree, Tree, TreeNode};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::features::{FeatureVector, N_FEATURES};
use crate::geometry::Label;

#[derive(Debug, Error, PartialEq)]
pub enum ForestError {
    #[error("invalid forest parameters: {0}")]
    InvalidParams(String),
    #[error("need at least {need} samples, got {got}")]
    TooFewSamples { got: usize, need: usize },
    #[error("no samples")]
    NoSamples,
    #[error("impurity of an empty node is undefined")]
    EmptyNode,
    #[error("probability {0} outside [0, 1]")]
    ProbabilityOutOfRange(f64),
    #[error("malformed tree: {0}")]
    MalformedTree(String),
    #[error("model has {got} trees but parameters say {expected}")]
    TreeCountMismatch { got: usize, expected: usize },
    #[error("entropy threshold {0} outside [0, 1]")]
    InvalidThreshold(f64),
}

/// One training pair: a pixel's features and its horizon side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub features: FeatureVector,
    pub label: Label,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ForestParams {
    pub n_trees: usize,
    pub min_samples_leaf: usize,
    pub features_per_split: usize,
    pub seed: u64,
}

impl Default for ForestParams {
    fn default() -> Self {
        Self { n_trees: 20, min_samples_leaf: 10, features_per_split: 4, seed: 0 }
    }
}

impl ForestParams {
    pub fn validate(&self) -> Result<(), ForestError> {
        if self.n_trees == 0 {
            return Err(ForestError::InvalidParams("n_trees must be at least 1".into()));
        }
        if self.min_samples_leaf == 0 {
            return Err(ForestError::InvalidParams("min_samples_leaf must be at least 1".into()));
        }
        if !(1..=N_FEATURES).contains(&self.features_per_split) {
            return Err(ForestError::InvalidParams(format!(
                "features_per_split must be in 1..={N_FEATURES}, got {}",
                self.features_per_split
            )));
        }
        Ok(())
    }
}

/// Trained forest plus the calibrated entropy threshold used for obstacle maps.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomForestModel {
    params: ForestParams,
    trees: Vec<Tree>,
    entropy_threshold: f64,
}

impl RandomForestModel {
    pub fn new(
        params: ForestParams,
        trees: Vec<Tree>,
        entropy_threshold: f64,
    ) -> Result<Self, ForestError> {
        params.validate()?;
        if trees.len() != params.n_trees {
            return Err(ForestError::TreeCountMismatch { got: trees.len(), expected: params.n_trees });
        }
        if !(0.0..=1.0).contains(&entropy_threshold) {
            return Err(ForestError::InvalidThreshold(entropy_threshold));
        }
        Ok(Self { params, trees, entropy_threshold })
    }

    pub fn params(&self) -> &ForestParams {
        &self.params
    }

    pub fn trees(&self) -> &[Tree] {
        &self.trees
    }

    pub fn entropy_threshold(&self) -> f64 {
        self.entropy_threshold
    }

    pub fn set_entropy_threshold(&mut self, threshold: f64) -> Result<(), ForestError> {
        if !(0.0..=1.0).contains(&threshold) {
            return Err(ForestError::InvalidThreshold(threshold));
        }
        self.entropy_threshold = threshold;
        Ok(())
    }

    /// Mean over trees of the Below fraction in the reached leaf.
    ///
    /// Per-tree values are summed in sorted order so the result does not
    /// depend on the order of the trees.
    pub fn predict_p_below(&self, features: &FeatureVector) -> f64 {
        const INLINE: usize = 64;
        let n = self.trees.len();
        if n <= INLINE {
            let mut buf = [0.0f64; INLINE];
            for (slot, t) in buf.iter_mut().zip(&self.trees) {
                *slot = t.p_below(features);
            }
            mean_sorted(&mut buf[..n])
        } else {
            let mut buf: Vec<f64> = self.trees.iter().map(|t| t.p_below(features)).collect();
            mean_sorted(&mut buf)
        }
    }

    pub fn predict_label(&self, features: &FeatureVector) -> Label {
        if self.predict_p_below(features) >= 0.5 {
            Label::Below
        } else {
            Label::Above
        }
    }

    /// Binary entropy of the forest's prediction.
    pub fn predict_entropy(&self, features: &FeatureVector) -> f64 {
        entropy_bits(self.predict_p_below(features))
    }
}

fn mean_sorted(values: &mut [f64]) -> f64 {
    values.sort_unstable_by(f64::total_cmp);
    let sum: f64 = values.iter().sum();
    (sum / values.len() as f64).clamp(0.0, 1.0)
}

/// Trains `params.n_trees` trees; tree `i` draws from ChaCha8 stream `i` of
/// `params.seed`, so the result is the same for any thread count.
pub fn train_forest(samples: &[Sample], params: &ForestParams) -> Result<RandomForestModel, ForestError> {
    params.validate()?;
    let trees = (0..params.n_trees)
        .into_par_iter()
        .map(|i| {
            let mut rng = tree_stream(params.seed, i);
            train_tree(samples, params, &mut rng)
        })
        .collect::<Result<Vec<_>, _>>()?;
    RandomForestModel::new(*params, trees, 0.0)
}

pub(crate) fn tree_stream(seed: u64, tree_index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(tree_index as u64);
    rng
}

/// `-p log2 p - (1-p) log2 (1-p)` with `0 log 0 = 0`.
pub fn binary_entropy(p: f64) -> Result<f64, ForestError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(ForestError::ProbabilityOutOfRange(p));
    }
    Ok(entropy_bits(p))
}

#[inline]
pub(crate) fn entropy_bits(p: f64) -> f64 {
    let term = |x: f64| if x > 0.0 { -x * x.log2() } else { 0.0 };
    (term(p) + term(1.0 - p)).clamp(0.0, 1.0)
}
