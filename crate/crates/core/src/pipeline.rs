//! Self-supervised training and per-pixel inference.
//!
//! Training frames are labeled purely by horizon side, the forest is fit on a
//! pooled pixel subsample, and the entropy threshold is calibrated as a
//! nearest-rank percentile of the forest's own entropies on that pool.
//! Inference turns an image into a below-horizon probability per pixel, from
//! which the uncertainty, classification and obstacle maps are derived.

use rand::seq::{index, SliceRandom};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::datasetio::Frame;
use crate::features::{extract_features, FeatureError, FeatureImage};
use crate::forest::{entropy_bits, train_forest, ForestError, ForestParams, RandomForestModel, Sample};
use crate::geometry::{horizon_field, CameraIntrinsics, GeometryError, Label};
use crate::raster::{BitImage, GrayImage, RgbImage};

#[derive(Debug, Error, PartialEq)]
pub enum PipelineError {
    #[error(transparent)]
    Features(#[from] FeatureError),
    #[error(transparent)]
    Forest(#[from] ForestError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("invalid pipeline configuration: {0}")]
    InvalidConfig(String),
    #[error("need at least 2 frames to split into train and test, got {0}")]
    TooFewFrames(usize),
    #[error("frame {frame_id}: image is {got_w}x{got_h} but the camera is {want_w}x{want_h}")]
    FrameSize { frame_id: String, got_w: usize, got_h: usize, want_w: usize, want_h: usize },
    #[error("threshold {0} outside [0, 1]")]
    InvalidThreshold(f64),
    #[error("no training samples were drawn")]
    NoSamples,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PipelineConfig {
    pub forest: ForestParams,
    pub samples_per_frame: usize,
    pub train_fraction: f64,
    /// Percentile in (0, 100] of training entropies used as the obstacle threshold.
    pub threshold_percentile: f64,
    pub split_seed: u64,
    /// Pixels whose |elevation| is below this many radians are not sampled.
    /// Zero disables the band.
    pub horizon_band: f64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            forest: ForestParams::default(),
            samples_per_frame: 1000,
            train_fraction: 0.9,
            threshold_percentile: 25.0,
            split_seed: 0,
            horizon_band: 0.0,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<(), PipelineError> {
        self.forest.validate()?;
        if self.samples_per_frame == 0 {
            return Err(PipelineError::InvalidConfig("samples_per_frame must be at least 1".into()));
        }
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return Err(PipelineError::InvalidConfig(format!(
                "train_fraction must be in (0, 1), got {}",
                self.train_fraction
            )));
        }
        if !(self.threshold_percentile > 0.0 && self.threshold_percentile <= 100.0) {
            return Err(PipelineError::InvalidConfig(format!(
                "threshold_percentile must be in (0, 100], got {}",
                self.threshold_percentile
            )));
        }
        if !(self.horizon_band >= 0.0 && self.horizon_band.is_finite()) {
            return Err(PipelineError::InvalidConfig(format!(
                "horizon_band must be non-negative, got {}",
                self.horizon_band
            )));
        }
        Ok(())
    }
}

fn check_frame_size(frame: &Frame, intrinsics: &CameraIntrinsics) -> Result<(), PipelineError> {
    let (w, h) = (frame.image.width(), frame.image.height());
    if (w, h) != (intrinsics.width, intrinsics.height) {
        return Err(PipelineError::FrameSize {
            frame_id: frame.frame_id.clone(),
            got_w: w,
            got_h: h,
            want_w: intrinsics.width,
            want_h: intrinsics.height,
        });
    }
    Ok(())
}

/// Draws `n` pixels (all pixels when `n` covers the image) and labels each by
/// which side of the projected horizon it lies on.
pub fn self_label(
    frame: &Frame,
    intrinsics: &CameraIntrinsics,
    n: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<Sample>, PipelineError> {
    self_label_with_band(frame, intrinsics, n, 0.0, rng)
}

/// [`self_label`] that skips pixels within `band` radians of the horizon.
pub fn self_label_with_band(
    frame: &Frame,
    intrinsics: &CameraIntrinsics,
    n: usize,
    band: f64,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<Sample>, PipelineError> {
    check_frame_size(frame, intrinsics)?;
    let features = extract_features(&frame.image)?;
    let field = horizon_field(intrinsics, &frame.attitude);

    let eligible: Vec<usize> = if band > 0.0 {
        (0..field.elevations().len()).filter(|&i| field.elevations()[i].abs() >= band).collect()
    } else {
        (0..field.elevations().len()).collect()
    };
    let picked: Vec<usize> = if n >= eligible.len() {
        eligible
    } else {
        index::sample(rng, eligible.len(), n).into_iter().map(|k| eligible[k]).collect()
    };
    Ok(picked
        .into_iter()
        .map(|i| Sample { features: features.pixels()[i], label: field.label_at(i) })
        .collect())
}

/// Number of training frames out of `n`: `ceil(fraction * n)`, capped so at
/// least one frame is left for testing.
pub fn train_count(n: usize, fraction: f64) -> usize {
    let k = (fraction * n as f64 - 1e-9).ceil().max(1.0) as usize;
    k.min(n.saturating_sub(1))
}

/// Seeded frame-level shuffle split. Returns (train, test) frame indices.
pub fn split_indices(
    n: usize,
    train_fraction: f64,
    split_seed: u64,
) -> Result<(Vec<usize>, Vec<usize>), PipelineError> {
    if n < 2 {
        return Err(PipelineError::TooFewFrames(n));
    }
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(PipelineError::InvalidConfig(format!(
            "train_fraction must be in (0, 1), got {train_fraction}"
        )));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(split_seed));
    let k = train_count(n, train_fraction);
    let test = order.split_off(k);
    Ok((order, test))
}

pub fn split_dataset(
    frames: &[Frame],
    train_fraction: f64,
    split_seed: u64,
) -> Result<(Vec<&Frame>, Vec<&Frame>), PipelineError> {
    let (train, test) = split_indices(frames.len(), train_fraction, split_seed)?;
    Ok((
        train.into_iter().map(|i| &frames[i]).collect(),
        test.into_iter().map(|i| &frames[i]).collect(),
    ))
}

/// The `q`-th percentile as the `ceil(q/100 * n)`-th smallest value.
pub fn nearest_rank_percentile(values: &[f64], q: f64) -> Option<f64> {
    if values.is_empty() || !(q > 0.0 && q <= 100.0) {
        return None;
    }
    let mut sorted = values.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let rank = ((q / 100.0) * sorted.len() as f64).ceil().max(1.0) as usize;
    Some(sorted[rank.min(sorted.len()) - 1])
}

const LABEL_STREAM_SALT: u64 = 0x6c61_6265_6c73_0001;

/// Pools self-labeled samples from the training frames (in the given order),
/// using ChaCha8 stream `i` for the `i`-th frame.
pub fn collect_samples(
    frames: &[&Frame],
    intrinsics: &CameraIntrinsics,
    config: &PipelineConfig,
) -> Result<Vec<Sample>, PipelineError> {
    let per_frame = frames
        .par_iter()
        .enumerate()
        .map(|(i, frame)| {
            let mut rng = ChaCha8Rng::seed_from_u64(config.forest.seed ^ LABEL_STREAM_SALT);
            rng.set_stream(i as u64);
            self_label_with_band(frame, intrinsics, config.samples_per_frame, config.horizon_band, &mut rng)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(per_frame.into_iter().flatten().collect())
}

/// Fits the forest on the pooled samples and calibrates its entropy threshold.
pub fn train_on_frames(
    frames: &[&Frame],
    intrinsics: &CameraIntrinsics,
    config: &PipelineConfig,
) -> Result<RandomForestModel, PipelineError> {
    config.validate()?;
    let samples = collect_samples(frames, intrinsics, config)?;
    if samples.is_empty() {
        return Err(PipelineError::NoSamples);
    }
    let mut model = train_forest(&samples, &config.forest)?;
    let entropies: Vec<f64> =
        samples.par_iter().map(|s| model.predict_entropy(&s.features)).collect();
    let threshold = nearest_rank_percentile(&entropies, config.threshold_percentile)
        .ok_or(PipelineError::NoSamples)?;
    model.set_entropy_threshold(threshold)?;
    Ok(model)
}

/// Splits `frames`, then trains and calibrates on the training part.
pub fn train_pipeline(
    frames: &[Frame],
    intrinsics: &CameraIntrinsics,
    config: &PipelineConfig,
) -> Result<RandomForestModel, PipelineError> {
    config.validate()?;
    let (train, _) = split_dataset(frames, config.train_fraction, config.split_seed)?;
    train_on_frames(&train, intrinsics, config)
}

/// Per-pixel forest probability of the Below class.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityMap {
    width: usize,
    height: usize,
    p_below: Vec<f64>,
}

impl ProbabilityMap {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn values(&self) -> &[f64] {
        &self.p_below
    }

    pub fn uncertainty(&self) -> UncertaintyMap {
        UncertaintyMap {
            width: self.width,
            height: self.height,
            entropy: self.p_below.iter().map(|&p| entropy_bits(p)).collect(),
        }
    }

    /// Predicted side per pixel (Below when `p_below >= 0.5`).
    pub fn labels(&self) -> Vec<Label> {
        self.p_below.iter().map(|&p| if p >= 0.5 { Label::Below } else { Label::Above }).collect()
    }

    /// Bitmap with set pixels where the forest predicts Below.
    pub fn classification_bitmap(&self) -> BitImage {
        BitImage::from_pixels(self.width, self.height, self.p_below.iter().map(|&p| p >= 0.5).collect())
    }
}

pub fn probability_map_from_features(model: &RandomForestModel, features: &FeatureImage) -> ProbabilityMap {
    let p_below = features.pixels().par_iter().map(|x| model.predict_p_below(x)).collect();
    ProbabilityMap { width: features.width(), height: features.height(), p_below }
}

pub fn probability_map(model: &RandomForestModel, image: &RgbImage) -> Result<ProbabilityMap, PipelineError> {
    let features = extract_features(image)?;
    Ok(probability_map_from_features(model, &features))
}

/// Per-pixel binary entropy in [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct UncertaintyMap {
    width: usize,
    height: usize,
    entropy: Vec<f64>,
}

impl UncertaintyMap {
    pub fn new(width: usize, height: usize, entropy: Vec<f64>) -> Result<Self, PipelineError> {
        if entropy.len() != width * height {
            return Err(PipelineError::InvalidConfig(format!(
                "{} entropies for a {width}x{height} map",
                entropy.len()
            )));
        }
        if let Some(&bad) = entropy.iter().find(|e| !(0.0..=1.0).contains(*e)) {
            return Err(PipelineError::InvalidThreshold(bad));
        }
        Ok(Self { width, height, entropy })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn values(&self) -> &[f64] {
        &self.entropy
    }

    #[inline]
    pub fn get(&self, u: usize, v: usize) -> f64 {
        self.entropy[v * self.width + u]
    }

    /// 8-bit rendering, `round(255 * entropy)`.
    pub fn to_gray(&self) -> GrayImage {
        GrayImage::from_pixels(
            self.width,
            self.height,
            self.entropy.iter().map(|&e| (e * 255.0).round() as u8).collect(),
        )
    }
}

pub fn uncertainty_map(model: &RandomForestModel, image: &RgbImage) -> Result<UncertaintyMap, PipelineError> {
    Ok(probability_map(model, image)?.uncertainty())
}

/// Binary obstacle mask.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObstacleMap {
    width: usize,
    height: usize,
    obstacle: Vec<bool>,
}

impl ObstacleMap {
    /// Panics if `obstacle.len() != width * height`.
    pub fn new(width: usize, height: usize, obstacle: Vec<bool>) -> Self {
        assert_eq!(obstacle.len(), width * height, "obstacle map size mismatch");
        Self { width, height, obstacle }
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut obstacle = Vec::with_capacity(width * height);
        for v in 0..height {
            for u in 0..width {
                obstacle.push(f(u, v));
            }
        }
        Self { width, height, obstacle }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn values(&self) -> &[bool] {
        &self.obstacle
    }

    #[inline]
    pub fn get(&self, u: usize, v: usize) -> bool {
        self.obstacle[v * self.width + u]
    }

    pub fn count(&self) -> usize {
        self.obstacle.iter().filter(|&&b| b).count()
    }

    pub fn to_bitmap(&self) -> BitImage {
        BitImage::from_pixels(self.width, self.height, self.obstacle.clone())
    }
}

/// Marks pixels whose entropy is strictly above `threshold`.
pub fn threshold_map(map: &UncertaintyMap, threshold: f64) -> Result<ObstacleMap, PipelineError> {
    if !(0.0..=1.0).contains(&threshold) {
        return Err(PipelineError::InvalidThreshold(threshold));
    }
    Ok(ObstacleMap {
        width: map.width,
        height: map.height,
        obstacle: map.entropy.iter().map(|&e| e > threshold).collect(),
    })
}

/// Keeps an obstacle pixel only if at least one of its 8 neighbors is an
/// obstacle in the input map. One pass, reading the input only.
pub fn spatial_filter(map: &ObstacleMap) -> ObstacleMap {
    let (w, h) = (map.width, map.height);
    ObstacleMap::from_fn(w, h, |u, v| {
        if !map.get(u, v) {
            return false;
        }
        let (u0, u1) = (u.saturating_sub(1), (u + 1).min(w - 1));
        let (v0, v1) = (v.saturating_sub(1), (v + 1).min(h - 1));
        (v0..=v1).any(|y| (u0..=u1).any(|x| (x, y) != (u, v) && map.get(x, y)))
    })
}

/// Threshold at the model's calibrated value, then filter.
pub fn obstacle_map(model: &RandomForestModel, uncertainty: &UncertaintyMap) -> Result<ObstacleMap, PipelineError> {
    Ok(spatial_filter(&threshold_map(uncertainty, model.entropy_threshold())?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forest::{Tree, TreeNode};
    use crate::geometry::Attitude;
    use proptest::prelude::*;

    fn frame(img: RgbImage, attitude: Attitude) -> Frame {
        Frame { frame_id: "f".into(), image: img, attitude, camera_height: None, gt_mask: None }
    }

    fn two_color(w: usize, h: usize, split_row: usize) -> RgbImage {
        RgbImage::from_fn(w, h, |_, v| if v < split_row { [40, 90, 230] } else { [60, 140, 40] })
    }

    #[test]
    fn level_frame_full_labeling_counts_rows() {
        let k = CameraIntrinsics::new(30.0, 30.0, 10.0, 7.0, 20, 16).unwrap();
        let f = frame(two_color(20, 16, 7), Attitude::level());
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let s = self_label(&f, &k, 10_000, &mut rng).unwrap();
        assert_eq!(s.len(), 320);
        assert_eq!(s.iter().filter(|x| x.label == Label::Above).count(), 7 * 20);
    }

    #[test]
    fn steep_pitch_labels_everything_below() {
        let k = CameraIntrinsics::new(30.0, 30.0, 10.0, 7.0, 20, 16).unwrap();
        // pitching down puts the horizon row cy + fy tan(pitch) above the image
        let f = frame(two_color(20, 16, 7), Attitude::new(0.0, -1.2).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let s = self_label(&f, &k, 50, &mut rng).unwrap();
        assert_eq!(s.len(), 50);
        assert!(s.iter().all(|x| x.label == Label::Below));
    }

    #[test]
    fn labeling_is_deterministic_and_checks_size() {
        let k = CameraIntrinsics::new(30.0, 30.0, 10.0, 7.0, 20, 16).unwrap();
        let f = frame(two_color(20, 16, 7), Attitude::level());
        let a = self_label(&f, &k, 40, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        let b = self_label(&f, &k, 40, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        assert_eq!(a, b);
        let wrong = frame(two_color(21, 16, 7), Attitude::level());
        assert!(matches!(
            self_label(&wrong, &k, 4, &mut ChaCha8Rng::seed_from_u64(3)),
            Err(PipelineError::FrameSize { .. })
        ));
    }

    #[test]
    fn horizon_band_skips_near_pixels() {
        let k = CameraIntrinsics::new(30.0, 30.0, 10.0, 7.0, 20, 16).unwrap();
        let f = frame(two_color(20, 16, 7), Attitude::level());
        let s = self_label_with_band(&f, &k, 10_000, 0.05, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        // rows 6, 7, 8 are within 1.5 px * (1/30 rad/px) of the horizon
        assert_eq!(s.len(), (16 - 3) * 20);
    }

    #[test]
    fn split_rules() {
        let (tr, te) = split_indices(10, 0.9, 1).unwrap();
        assert_eq!((tr.len(), te.len()), (9, 1));
        let (tr, te) = split_indices(2, 0.9, 1).unwrap();
        assert_eq!((tr.len(), te.len()), (1, 1));
        assert_eq!(split_indices(1, 0.9, 1), Err(PipelineError::TooFewFrames(1)));
        assert_eq!(split_indices(60, 0.9, 5).unwrap(), split_indices(60, 0.9, 5).unwrap());
        let (tr, te) = split_indices(60, 0.9, 5).unwrap();
        assert_eq!((tr.len(), te.len()), (54, 6));
        let mut all: Vec<_> = tr.into_iter().chain(te).collect();
        all.sort();
        assert_eq!(all, (0..60).collect::<Vec<_>>());
    }

    #[test]
    fn percentile_nearest_rank() {
        let v = [0.5, 0.1, 0.4, 0.2, 0.3];
        assert_eq!(nearest_rank_percentile(&v, 100.0), Some(0.5));
        assert_eq!(nearest_rank_percentile(&v, 20.0), Some(0.1));
        assert_eq!(nearest_rank_percentile(&v, 25.0), Some(0.2));
        assert_eq!(nearest_rank_percentile(&v, 1.0), Some(0.1));
        assert_eq!(nearest_rank_percentile(&[], 25.0), None);
        assert_eq!(nearest_rank_percentile(&v, 0.0), None);
    }

    fn two_color_frames(n: usize) -> (Vec<Frame>, CameraIntrinsics) {
        let k = CameraIntrinsics::new(40.0, 40.0, 15.5, 11.5, 32, 24).unwrap();
        let frames = (0..n)
            .map(|i| Frame {
                frame_id: format!("{i:03}"),
                image: two_color(32, 24, 12),
                attitude: Attitude::level(),
                camera_height: Some(1.0),
                gt_mask: None,
            })
            .collect();
        (frames, k)
    }

    #[test]
    fn separable_colors_calibrate_low_threshold() {
        let (frames, k) = two_color_frames(6);
        let cfg = PipelineConfig { samples_per_frame: 200, ..Default::default() };
        let m = train_pipeline(&frames, &k, &cfg).unwrap();
        assert!(m.entropy_threshold() < 0.1, "{}", m.entropy_threshold());
        let u = uncertainty_map(&m, &frames[0].image).unwrap();
        assert_eq!((u.width(), u.height()), (32, 24));
        // a sky-colored pixel well away from the color edge
        assert!(u.get(5, 2) < 0.1);

        let m2 = train_pipeline(&frames, &k, &cfg).unwrap();
        assert_eq!(m, m2);

        let all = PipelineConfig { threshold_percentile: 100.0, ..cfg };
        let mall = train_pipeline(&frames, &k, &all).unwrap();
        let (train, _) = split_dataset(&frames, all.train_fraction, all.split_seed).unwrap();
        let samples = collect_samples(&train, &k, &all).unwrap();
        let max = samples.iter().map(|s| mall.predict_entropy(&s.features)).fold(0.0, f64::max);
        assert_eq!(mall.entropy_threshold(), max);
    }

    #[test]
    fn pure_single_tree_gives_zero_entropy() {
        let t = Tree::from_nodes(vec![
            TreeNode::Internal { feature: 0, threshold: 0.5, left: 1, right: 2 },
            TreeNode::Leaf { count_above: 12, count_below: 0 },
            TreeNode::Leaf { count_above: 0, count_below: 30 },
        ])
        .unwrap();
        let params = ForestParams { n_trees: 1, ..Default::default() };
        let m = RandomForestModel::new(params, vec![t], 0.0).unwrap();
        let img = RgbImage::from_fn(9, 7, |u, v| [(u * 28) as u8, (v * 36) as u8, 100]);
        let u = uncertainty_map(&m, &img).unwrap();
        assert!(u.values().iter().all(|&e| e == 0.0));
    }

    fn umap(values: &[f64]) -> UncertaintyMap {
        UncertaintyMap::new(values.len(), 1, values.to_vec()).unwrap()
    }

    #[test]
    fn thresholding() {
        let m = umap(&[0.2, 0.64, 0.9]);
        assert_eq!(threshold_map(&m, 0.64).unwrap().values(), &[false, false, true]);
        assert_eq!(threshold_map(&umap(&[1.0, 0.3]), 1.0).unwrap().count(), 0);
        assert_eq!(threshold_map(&umap(&[0.0, 0.3]), 0.0).unwrap().values(), &[false, true]);
        assert!(threshold_map(&m, 1.5).is_err());
    }

    fn map_from(rows: &[&str]) -> ObstacleMap {
        let h = rows.len();
        let w = rows[0].len();
        ObstacleMap::from_fn(w, h, |u, v| rows[v].as_bytes()[u] == b'#')
    }

    #[test]
    fn filter_examples() {
        let single = map_from(&[".....", "..#..", "....."]);
        assert_eq!(spatial_filter(&single).count(), 0);
        let pair = map_from(&[".....", "..##.", "....."]);
        assert_eq!(spatial_filter(&pair), pair);
        let plus = map_from(&[".....", "..#..", ".###.", "..#..", "....."]);
        assert_eq!(spatial_filter(&plus), plus);
        let mixed = map_from(&["##...", ".....", "...#."]);
        assert_eq!(spatial_filter(&mixed), map_from(&["##...", ".....", "....."]));
        // a pixel whose only neighbor gets removed still survives this pass
        let chain = map_from(&["#....", ".#...", "....."]);
        assert_eq!(spatial_filter(&chain), chain);
        let corner = map_from(&["#"]);
        assert_eq!(spatial_filter(&corner).count(), 0);
    }

    proptest! {
        #[test]
        fn filter_never_adds(bits in proptest::collection::vec(any::<bool>(), 48)) {
            let m = ObstacleMap::new(8, 6, bits);
            let f = spatial_filter(&m);
            for (a, b) in f.values().iter().zip(m.values()) {
                prop_assert!(!*a || *b);
            }
        }

        #[test]
        fn threshold_monotone(vals in proptest::collection::vec(0.0f64..=1.0, 30), t1 in 0.0f64..=1.0, t2 in 0.0f64..=1.0) {
            let (lo, hi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
            let m = umap(&vals);
            let a = threshold_map(&m, lo).unwrap();
            let b = threshold_map(&m, hi).unwrap();
            for (x, y) in b.values().iter().zip(a.values()) {
                prop_assert!(!*x || *y);
            }
        }
    }
}
