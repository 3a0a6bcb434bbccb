//! Gini impurity and exhaustive threshold search.

use std::cmp::Ordering;

use super::{ForestError, Sample};
use crate::geometry::Label;

/// Binary Gini impurity `2p(1-p)` with `p` the Above fraction.
pub fn gini(count_above: u64, count_below: u64) -> Result<f64, ForestError> {
    let n = count_above + count_below;
    if n == 0 {
        return Err(ForestError::EmptyNode);
    }
    let p = count_above as f64 / n as f64;
    Ok(2.0 * p * (1.0 - p))
}

/// Chosen split: samples with `features[feature] < threshold` go left.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Split {
    pub feature: usize,
    pub threshold: f64,
    /// Parent impurity minus the size-weighted child impurities.
    pub gain: f64,
}

/// Size-weighted child impurity, up to the constant factor `2 / n`, as the
/// exact fraction `(aL bL nR + aR bR nL) / (nL nR)`.
#[derive(Debug, Clone, Copy)]
struct Impurity {
    num: u128,
    den: u128,
}

impl Impurity {
    fn of_children(left: (u64, u64), right: (u64, u64)) -> Self {
        let (al, bl) = (left.0 as u128, left.1 as u128);
        let (ar, br) = (right.0 as u128, right.1 as u128);
        let (nl, nr) = (al + bl, ar + br);
        Impurity { num: al * bl * nr + ar * br * nl, den: nl * nr }
    }

    fn of_parent(a: u64, b: u64) -> Self {
        let (a, b) = (a as u128, b as u128);
        Impurity { num: a * b, den: a + b }
    }

    fn cmp(&self, other: &Impurity) -> Ordering {
        (self.num * other.den).cmp(&(other.num * self.den))
    }

    fn value(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

/// Threshold strictly above `lo` and at most `hi`, normally their midpoint.
#[inline]
pub(crate) fn midpoint(lo: f64, hi: f64) -> f64 {
    let mid = (lo + hi) / 2.0;
    if mid > lo && mid <= hi {
        mid
    } else {
        let mid = lo + (hi - lo) / 2.0;
        if mid > lo && mid <= hi {
            mid
        } else {
            hi
        }
    }
}

/// Reusable buffer for the per-feature sort.
#[derive(Debug, Default)]
pub(crate) struct SplitScratch {
    keyed: Vec<(f64, bool)>,
}

/// Best split over `candidate_features` for the samples selected by `indices`.
///
/// Candidates are visited in ascending feature order and ascending threshold
/// order; only a strictly better impurity replaces the incumbent, so exact
/// ties go to the lowest feature index and then the lowest threshold.
pub(crate) fn best_split_indexed(
    samples: &[Sample],
    indices: &[u32],
    candidate_features: &[usize],
    min_samples_leaf: usize,
    scratch: &mut SplitScratch,
) -> Option<Split> {
    let n = indices.len();
    if n == 0 {
        return None;
    }
    let total_above =
        indices.iter().filter(|&&i| samples[i as usize].label == Label::Above).count() as u64;
    let total_below = n as u64 - total_above;
    let parent = Impurity::of_parent(total_above, total_below);
    if parent.num == 0 {
        return None;
    }
    let min_leaf = min_samples_leaf.max(1);
    if n < 2 * min_leaf {
        return None;
    }

    let mut features: Vec<usize> = candidate_features.to_vec();
    features.sort_unstable();
    features.dedup();

    let mut best: Option<(usize, f64, Impurity)> = None;
    for &feature in &features {
        let keyed = &mut scratch.keyed;
        keyed.clear();
        keyed.extend(indices.iter().map(|&i| {
            let s = &samples[i as usize];
            (s.features[feature], s.label == Label::Above)
        }));
        keyed.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));

        let (mut left_above, mut left_below) = (0u64, 0u64);
        for i in 0..n - 1 {
            if keyed[i].1 {
                left_above += 1;
            } else {
                left_below += 1;
            }
            let left_n = i + 1;
            if left_n < min_leaf {
                continue;
            }
            if n - left_n < min_leaf {
                break;
            }
            let (lo, hi) = (keyed[i].0, keyed[i + 1].0);
            if lo >= hi {
                continue;
            }
            let imp = Impurity::of_children(
                (left_above, left_below),
                (total_above - left_above, total_below - left_below),
            );
            // positive gain: imp / (nL nR) < a b / n, compared exactly
            if (imp.num * parent.den).cmp(&(parent.num * imp.den)) != Ordering::Less {
                continue;
            }
            let better = match &best {
                None => true,
                Some((_, _, b)) => imp.cmp(b) == Ordering::Less,
            };
            if better {
                best = Some((feature, midpoint(lo, hi), imp));
            }
        }
    }

    best.map(|(feature, threshold, imp)| {
        let nf = n as f64;
        let gain = 2.0 * parent.value() / nf - 2.0 * imp.value() / nf;
        Split { feature, threshold, gain }
    })
}

/// Best Gini split of `samples` restricted to `candidate_features`, or `None`
/// when no split leaves `min_samples_leaf` samples on both sides with a
/// strictly positive impurity decrease.
pub fn best_split(
    samples: &[Sample],
    candidate_features: &[usize],
    min_samples_leaf: usize,
) -> Result<Option<Split>, ForestError> {
    if samples.is_empty() {
        return Err(ForestError::NoSamples);
    }
    if let Some(&f) = candidate_features.iter().find(|&&f| f >= crate::features::N_FEATURES) {
        return Err(ForestError::InvalidParams(format!("feature index {f} out of range")));
    }
    let indices: Vec<u32> = (0..samples.len() as u32).collect();
    let mut scratch = SplitScratch::default();
    Ok(best_split_indexed(samples, &indices, candidate_features, min_samples_leaf, &mut scratch))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::N_FEATURES;

    fn sample(values: &[f64], label: Label) -> Sample {
        let mut features = [0.0; N_FEATURES];
        features[..values.len()].copy_from_slice(values);
        Sample { features, label }
    }

    #[test]
    fn gini_examples() {
        assert_eq!(gini(10, 0).unwrap(), 0.0);
        assert_eq!(gini(5, 5).unwrap(), 0.5);
        assert_eq!(gini(3, 1).unwrap(), 0.375);
        assert_eq!(gini(0, 0), Err(ForestError::EmptyNode));
    }

    #[test]
    fn separable_midpoint() {
        let mut s = Vec::new();
        for _ in 0..20 {
            s.push(sample(&[0.1], Label::Above));
            s.push(sample(&[0.9], Label::Below));
        }
        let split = best_split(&s, &[0], 10).unwrap().unwrap();
        assert_eq!(split.feature, 0);
        assert_eq!(split.threshold, 0.5);
        assert!((split.gain - 0.5).abs() < 1e-15);
    }

    #[test]
    fn identical_vectors_do_not_split() {
        let s: Vec<_> = (0..30)
            .map(|i| sample(&[0.3, 0.7], if i % 2 == 0 { Label::Above } else { Label::Below }))
            .collect();
        assert_eq!(best_split(&s, &[0, 1], 1).unwrap(), None);
    }

    #[test]
    fn pure_node_does_not_split() {
        let s: Vec<_> = (0..30).map(|i| sample(&[i as f64], Label::Below)).collect();
        assert_eq!(best_split(&s, &[0], 1).unwrap(), None);
    }

    #[test]
    fn min_leaf_blocks_small_children() {
        // the only informative boundary isolates 3 samples
        let mut s: Vec<_> = (0..3).map(|i| sample(&[i as f64], Label::Above)).collect();
        s.extend((3..20).map(|i| sample(&[i as f64], Label::Below)));
        assert!(best_split(&s, &[0], 3).unwrap().is_some());
        let split = best_split(&s, &[0], 4).unwrap();
        assert!(split.is_none_or(|sp| sp.threshold != 2.5));
        assert_eq!(best_split(&s, &[0], 11).unwrap(), None);
    }

    #[test]
    fn ties_go_to_lowest_feature() {
        let mut s = Vec::new();
        for _ in 0..10 {
            s.push(sample(&[0.0, 0.0], Label::Above));
            s.push(sample(&[1.0, 1.0], Label::Below));
        }
        let split = best_split(&s, &[1, 0], 1).unwrap().unwrap();
        assert_eq!(split.feature, 0);
    }

    #[test]
    fn empty_input_is_an_error() {
        assert_eq!(best_split(&[], &[0], 1), Err(ForestError::NoSamples));
    }

    #[test]
    fn midpoint_stays_between_neighbours() {
        let lo = 1.0f64;
        let hi = f64::from_bits(lo.to_bits() + 1);
        let m = midpoint(lo, hi);
        assert!(m > lo && m <= hi);
        assert_eq!(midpoint(0.1, 0.9), 0.5);
    }
}
