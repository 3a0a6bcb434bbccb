//! Below-horizon ROC analysis against ground-truth floor masks, operating
//! points, and horizon-side classification accuracy.

use std::fmt::Write as _;

use rayon::prelude::*;
use thiserror::Error;

use crate::datasetio::Frame;
use crate::geometry::{horizon_field, CameraIntrinsics, HorizonField, Label};
use crate::forest::RandomForestModel;
use crate::pipeline::{probability_map, PipelineError, UncertaintyMap};

#[derive(Debug, Error, PartialEq)]
pub enum EvalError {
    #[error("no positive (obstacle) scores")]
    NoPositives,
    #[error("no negative (floor) scores")]
    NoNegatives,
    #[error("input {index}: {what} is {got_w}x{got_h}, expected {want_w}x{want_h}")]
    DimensionMismatch {
        index: usize,
        what: &'static str,
        got_w: usize,
        got_h: usize,
        want_w: usize,
        want_h: usize,
    },
    #[error("frame {0} has no ground-truth mask")]
    MissingMask(String),
    #[error("no test frames")]
    NoFrames,
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
}

/// Ground-truth class of a pixel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MaskClass {
    Floor,
    Obstacle,
    /// Excluded from evaluation.
    Ignore,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundTruthMask {
    width: usize,
    height: usize,
    classes: Vec<MaskClass>,
}

impl GroundTruthMask {
    /// Panics if `classes.len() != width * height`.
    pub fn new(width: usize, height: usize, classes: Vec<MaskClass>) -> Self {
        assert_eq!(classes.len(), width * height, "mask size mismatch");
        Self { width, height, classes }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn classes(&self) -> &[MaskClass] {
        &self.classes
    }

    #[inline]
    pub fn get(&self, u: usize, v: usize) -> MaskClass {
        self.classes[v * self.width + u]
    }

    pub fn count(&self, class: MaskClass) -> usize {
        self.classes.iter().filter(|&&c| c == class).count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RocPoint {
    /// A pixel is predicted obstacle when its score is strictly above this.
    pub threshold: f64,
    pub fpr: f64,
    pub tpr: f64,
}

/// ROC points in order of decreasing threshold, from (0, 0) to (1, 1).
#[derive(Debug, Clone, PartialEq)]
pub struct RocCurve {
    points: Vec<RocPoint>,
    auc: f64,
}

impl RocCurve {
    pub fn points(&self) -> &[RocPoint] {
        &self.points
    }

    pub fn auc(&self) -> f64 {
        self.auc
    }

    /// `threshold,fpr,tpr` rows followed by `# auc=<value>`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("threshold,fpr,tpr\n");
        for p in &self.points {
            writeln!(out, "{},{},{}", p.threshold, p.fpr, p.tpr).unwrap();
        }
        writeln!(out, "# auc={}", self.auc).unwrap();
        out
    }
}

/// Sweeps every distinct score (plus sentinels at +/- infinity) and
/// integrates the curve with the trapezoid rule.
pub fn roc_from_scores(positives: &[f64], negatives: &[f64]) -> Result<RocCurve, EvalError> {
    if positives.is_empty() {
        return Err(EvalError::NoPositives);
    }
    if negatives.is_empty() {
        return Err(EvalError::NoNegatives);
    }
    let mut scored: Vec<(f64, bool)> = positives
        .iter()
        .map(|&s| (s, true))
        .chain(negatives.iter().map(|&s| (s, false)))
        .collect();
    scored.sort_unstable_by(|a, b| b.0.total_cmp(&a.0));

    let (np, nn) = (positives.len() as f64, negatives.len() as f64);
    let mut points = vec![RocPoint { threshold: f64::INFINITY, fpr: 0.0, tpr: 0.0 }];
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut i = 0;
    while i < scored.len() {
        let s = scored[i].0;
        // everything strictly above s has been counted
        points.push(RocPoint { threshold: s, fpr: fp as f64 / nn, tpr: tp as f64 / np });
        while i < scored.len() && scored[i].0 == s {
            if scored[i].1 {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
    }
    points.push(RocPoint { threshold: f64::NEG_INFINITY, fpr: 1.0, tpr: 1.0 });

    let auc = points
        .windows(2)
        .map(|w| (w[1].fpr - w[0].fpr) * (w[0].tpr + w[1].tpr) / 2.0)
        .sum();
    Ok(RocCurve { points, auc })
}

/// Pairwise ordering statistic: fraction of (positive, negative) pairs with the
/// positive scored higher, ties counting one half.
pub fn auc_oracle(positives: &[f64], negatives: &[f64]) -> Result<f64, EvalError> {
    if positives.is_empty() {
        return Err(EvalError::NoPositives);
    }
    if negatives.is_empty() {
        return Err(EvalError::NoNegatives);
    }
    let mut twice = 0u64;
    for &p in positives {
        for &n in negatives {
            twice += if p > n {
                2
            } else if p == n {
                1
            } else {
                0
            };
        }
    }
    Ok(twice as f64 / (2.0 * positives.len() as f64 * negatives.len() as f64))
}

/// One test frame's raw (unfiltered) uncertainty with its truth and horizon.
#[derive(Debug, Clone, Copy)]
pub struct RocInput<'a> {
    pub uncertainty: &'a UncertaintyMap,
    pub mask: &'a GroundTruthMask,
    pub field: &'a HorizonField,
}

/// Scores of below-horizon, non-ignored pixels: (obstacle, floor).
pub fn below_horizon_scores(inputs: &[RocInput<'_>]) -> Result<(Vec<f64>, Vec<f64>), EvalError> {
    let mut pos = Vec::new();
    let mut neg = Vec::new();
    for (index, inp) in inputs.iter().enumerate() {
        let (w, h) = (inp.uncertainty.width(), inp.uncertainty.height());
        let mismatch = |what, got_w, got_h| EvalError::DimensionMismatch {
            index,
            what,
            got_w,
            got_h,
            want_w: w,
            want_h: h,
        };
        if (inp.mask.width(), inp.mask.height()) != (w, h) {
            return Err(mismatch("mask", inp.mask.width(), inp.mask.height()));
        }
        if (inp.field.width(), inp.field.height()) != (w, h) {
            return Err(mismatch("horizon field", inp.field.width(), inp.field.height()));
        }
        for (i, (&score, &class)) in inp.uncertainty.values().iter().zip(inp.mask.classes()).enumerate() {
            if inp.field.label_at(i) != Label::Below {
                continue;
            }
            match class {
                MaskClass::Obstacle => pos.push(score),
                MaskClass::Floor => neg.push(score),
                MaskClass::Ignore => {}
            }
        }
    }
    Ok((pos, neg))
}

/// ROC over every below-horizon pixel of the given frames, obstacle pixels
/// being positives and floor pixels negatives.
pub fn roc_below_horizon(inputs: &[RocInput<'_>]) -> Result<RocCurve, EvalError> {
    let (pos, neg) = below_horizon_scores(inputs)?;
    roc_from_scores(&pos, &neg)
}

/// Rates of the curve point at `threshold`; between curve thresholds, the
/// nearest point below it, which has the same predictions.
pub fn operating_point(curve: &RocCurve, threshold: f64) -> (f64, f64) {
    let p = curve
        .points
        .iter()
        .find(|p| p.threshold <= threshold)
        .or(curve.points.last())
        .expect("curve has sentinel points");
    (p.fpr, p.tpr)
}

/// Fraction of pixels, pooled over all frames, whose predicted side
/// (`p_below >= 0.5`) agrees with the geometric horizon label.
pub fn classification_accuracy(
    model: &RandomForestModel,
    frames: &[&Frame],
    intrinsics: &CameraIntrinsics,
) -> Result<f64, EvalError> {
    if frames.is_empty() {
        return Err(EvalError::NoFrames);
    }
    let counts = frames
        .par_iter()
        .map(|f| -> Result<(usize, usize), EvalError> {
            let probs = probability_map(model, &f.image)?;
            let field = horizon_field(intrinsics, &f.attitude);
            if (field.width(), field.height()) != (probs.width(), probs.height()) {
                return Err(EvalError::DimensionMismatch {
                    index: 0,
                    what: "image",
                    got_w: probs.width(),
                    got_h: probs.height(),
                    want_w: field.width(),
                    want_h: field.height(),
                });
            }
            let correct = probs
                .labels()
                .iter()
                .enumerate()
                .filter(|&(i, l)| *l == field.label_at(i))
                .count();
            Ok((correct, probs.values().len()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let (correct, total) = counts.iter().fold((0, 0), |(c, t), (a, b)| (c + a, t + b));
    Ok(correct as f64 / total as f64)
}

/// Mean entropy over ground-truth obstacle and floor pixels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyByClass {
    pub obstacle_mean: f64,
    pub floor_mean: f64,
    pub obstacle_pixels: usize,
    pub floor_pixels: usize,
}

pub fn entropy_by_class(
    pairs: &[(&UncertaintyMap, &GroundTruthMask)],
) -> Result<EntropyByClass, EvalError> {
    let (mut so, mut sf, mut no, mut nf) = (0.0, 0.0, 0usize, 0usize);
    for (index, (u, m)) in pairs.iter().enumerate() {
        if (u.width(), u.height()) != (m.width(), m.height()) {
            return Err(EvalError::DimensionMismatch {
                index,
                what: "mask",
                got_w: m.width(),
                got_h: m.height(),
                want_w: u.width(),
                want_h: u.height(),
            });
        }
        for (&e, &c) in u.values().iter().zip(m.classes()) {
            match c {
                MaskClass::Obstacle => {
                    so += e;
                    no += 1;
                }
                MaskClass::Floor => {
                    sf += e;
                    nf += 1;
                }
                MaskClass::Ignore => {}
            }
        }
    }
    if no == 0 {
        return Err(EvalError::NoPositives);
    }
    if nf == 0 {
        return Err(EvalError::NoNegatives);
    }
    Ok(EntropyByClass {
        obstacle_mean: so / no as f64,
        floor_mean: sf / nf as f64,
        obstacle_pixels: no,
        floor_pixels: nf,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Attitude;
    use proptest::prelude::*;

    #[test]
    fn perfect_and_chance_curves() {
        let c = roc_from_scores(&[0.9, 0.8], &[0.1, 0.2]).unwrap();
        assert_eq!(c.auc(), 1.0);
        let c = roc_from_scores(&[0.3, 0.5, 0.5], &[0.5, 0.3, 0.5]).unwrap();
        assert!((c.auc() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn mann_whitney_example() {
        let c = roc_from_scores(&[0.9, 0.3], &[0.5, 0.1]).unwrap();
        assert!((c.auc() - 0.75).abs() < 1e-12);
        assert_eq!(auc_oracle(&[0.9, 0.3], &[0.5, 0.1]).unwrap(), 0.75);
    }

    #[test]
    fn oracle_examples() {
        assert_eq!(auc_oracle(&[0.9], &[0.1]).unwrap(), 1.0);
        assert_eq!(auc_oracle(&[0.5], &[0.5]).unwrap(), 0.5);
        assert_eq!(auc_oracle(&[], &[0.5]), Err(EvalError::NoPositives));
        assert_eq!(auc_oracle(&[0.1], &[]), Err(EvalError::NoNegatives));
    }

    #[test]
    fn curve_shape() {
        let c = roc_from_scores(&[0.9, 0.4, 0.4], &[0.4, 0.2]).unwrap();
        let pts = c.points();
        assert_eq!((pts[0].fpr, pts[0].tpr), (0.0, 0.0));
        let last = pts.last().unwrap();
        assert_eq!((last.fpr, last.tpr), (1.0, 1.0));
        for w in pts.windows(2) {
            assert!(w[0].threshold > w[1].threshold);
            assert!(w[0].fpr <= w[1].fpr && w[0].tpr <= w[1].tpr);
        }
    }

    #[test]
    fn operating_points() {
        let c = roc_from_scores(&[0.8, 0.5], &[0.5, 0.2]).unwrap();
        assert_eq!(operating_point(&c, 2.0), (0.0, 0.0));
        assert_eq!(operating_point(&c, -1.0), (1.0, 1.0));
        // exact match at 0.5: scores strictly above 0.5
        assert_eq!(operating_point(&c, 0.5), (0.0, 0.5));
        // between 0.5 and 0.8 predictions equal those at 0.5
        assert_eq!(operating_point(&c, 0.64), (0.0, 0.5));
        assert_eq!(operating_point(&c, 0.3), (0.5, 1.0));
    }

    #[test]
    fn three_point_curve_exact_match() {
        let c = RocCurve {
            points: vec![
                RocPoint { threshold: f64::INFINITY, fpr: 0.0, tpr: 0.0 },
                RocPoint { threshold: 0.8, fpr: 0.1, tpr: 0.4 },
                RocPoint { threshold: 0.5, fpr: 0.2, tpr: 0.7 },
                RocPoint { threshold: 0.2, fpr: 0.6, tpr: 0.9 },
                RocPoint { threshold: f64::NEG_INFINITY, fpr: 1.0, tpr: 1.0 },
            ],
            auc: 0.0,
        };
        assert_eq!(operating_point(&c, 0.5), (0.2, 0.7));
    }

    #[test]
    fn csv_layout() {
        let c = roc_from_scores(&[0.75], &[0.25]).unwrap();
        let csv = c.to_csv();
        let lines: Vec<_> = csv.lines().collect();
        assert_eq!(lines[0], "threshold,fpr,tpr");
        assert_eq!(lines[1], "inf,0,0");
        assert_eq!(lines[lines.len() - 2], "-inf,1,1");
        assert_eq!(lines[lines.len() - 1], "# auc=1");
    }

    fn level_field(w: usize, h: usize) -> HorizonField {
        let k = CameraIntrinsics::new(10.0, 10.0, (w as f64 - 1.0) / 2.0, 1.0, w, h).unwrap();
        horizon_field(&k, &Attitude::level())
    }

    #[test]
    fn only_below_horizon_pixels_count() {
        // rows 0 is above the horizon (cy = 1), rows 1.. below
        let field = level_field(2, 3);
        let u = UncertaintyMap::new(2, 3, vec![0.0, 1.0, 0.9, 0.1, 0.8, 0.2]).unwrap();
        let mask = GroundTruthMask::new(
            2,
            3,
            vec![
                MaskClass::Floor,
                MaskClass::Obstacle,
                MaskClass::Obstacle,
                MaskClass::Floor,
                MaskClass::Obstacle,
                MaskClass::Ignore,
            ],
        );
        let c = roc_below_horizon(&[RocInput { uncertainty: &u, mask: &mask, field: &field }]).unwrap();
        assert_eq!(c.auc(), 1.0);
        let (pos, neg) =
            below_horizon_scores(&[RocInput { uncertainty: &u, mask: &mask, field: &field }]).unwrap();
        assert_eq!((pos, neg), (vec![0.9, 0.8], vec![0.1]));
    }

    #[test]
    fn mismatched_mask_is_rejected() {
        let field = level_field(2, 3);
        let u = UncertaintyMap::new(2, 3, vec![0.0; 6]).unwrap();
        let mask = GroundTruthMask::new(3, 2, vec![MaskClass::Floor; 6]);
        assert!(matches!(
            roc_below_horizon(&[RocInput { uncertainty: &u, mask: &mask, field: &field }]),
            Err(EvalError::DimensionMismatch { .. })
        ));
    }

    fn scores() -> impl Strategy<Value = Vec<f64>> {
        proptest::collection::vec((0u32..20).prop_map(|k| k as f64 / 19.0), 1..100)
    }

    proptest! {
        #[test]
        fn trapezoid_matches_oracle(pos in scores(), neg in scores()) {
            let c = roc_from_scores(&pos, &neg).unwrap();
            let o = auc_oracle(&pos, &neg).unwrap();
            prop_assert!((c.auc() - o).abs() < 1e-9);
            for w in c.points().windows(2) {
                prop_assert!(w[0].fpr <= w[1].fpr && w[0].tpr <= w[1].tpr);
            }
        }

        #[test]
        fn positive_scaling_keeps_rates(pos in scores(), neg in scores(), k in 0.01f64..100.0) {
            let a = roc_from_scores(&pos, &neg).unwrap();
            let sp: Vec<f64> = pos.iter().map(|x| x * k).collect();
            let sn: Vec<f64> = neg.iter().map(|x| x * k).collect();
            let b = roc_from_scores(&sp, &sn).unwrap();
            let rates = |c: &RocCurve| c.points().iter().map(|p| (p.fpr, p.tpr)).collect::<Vec<_>>();
            prop_assert_eq!(rates(&a), rates(&b));
            prop_assert_eq!(a.auc(), b.auc());
        }
    }
}
