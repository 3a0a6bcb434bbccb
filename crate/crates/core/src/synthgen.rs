//! Synthetic scenes: a flat textured ground plane, a sky gradient and upright
//! rectangular obstacles, rendered by ray casting with exact ground truth.
//!
//! World coordinates are yaw-free and camera-centered: X right, Y up,
//! Z forward, ground plane at `Y = -camera_height`.

use std::f64::consts::FRAC_PI_4;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use thiserror::Error;

use crate::datasetio::{write_dataset, DataError, Frame};
use crate::evaluation::{GroundTruthMask, MaskClass};
use crate::geometry::{Attitude, CameraIntrinsics, GeometryError};
use crate::raster::RgbImage;

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("invalid scene: {0}")]
    InvalidSpec(String),
    #[error("need at least 2 frames, got {0}")]
    TooFewFrames(usize),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Data(#[from] DataError),
}

/// Upright rectangle standing on the ground, facing the camera.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Obstacle {
    /// Lateral offset of the rectangle's center, meters (positive right).
    pub x: f64,
    /// Forward distance of the rectangle's plane, meters.
    pub z: f64,
    pub width: f64,
    pub height: f64,
    /// RGB in `[0, 1]`.
    pub color: [f64; 3],
    /// Amplitude of uniform per-pixel noise added to each channel.
    pub texture: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SceneSpec {
    pub ground_color: [f64; 3],
    pub ground_texture: f64,
    pub sky_horizon: [f64; 3],
    pub sky_zenith: [f64; 3],
    pub obstacles: Vec<Obstacle>,
    pub camera_height: f64,
    pub attitude: Attitude,
    pub seed: u64,
    /// Standard deviation of noise added to the recorded roll and pitch.
    pub attitude_jitter: Option<f64>,
    /// Brightness falls linearly by this fraction from the left to the right
    /// image edge. Zero disables shading.
    pub shading: f64,
}

impl Default for SceneSpec {
    fn default() -> Self {
        Self {
            ground_color: [0.25, 0.5, 0.2],
            ground_texture: 0.04,
            sky_horizon: [0.78, 0.86, 0.95],
            sky_zenith: [0.3, 0.5, 0.85],
            obstacles: Vec::new(),
            camera_height: 1.0,
            attitude: Attitude::level(),
            seed: 0,
            attitude_jitter: None,
            shading: 0.0,
        }
    }
}

impl SceneSpec {
    pub fn validate(&self) -> Result<(), SynthError> {
        let bad = |m: String| Err(SynthError::InvalidSpec(m));
        if !(self.camera_height.is_finite() && self.camera_height > 0.0) {
            return bad(format!("camera height must be positive, got {}", self.camera_height));
        }
        for (i, o) in self.obstacles.iter().enumerate() {
            if !(o.height.is_finite() && o.height > 0.0 && o.width.is_finite() && o.width > 0.0) {
                return bad(format!("obstacle {i} needs positive width and height"));
            }
            if !(o.z.is_finite() && o.z > 0.0 && o.x.is_finite()) {
                return bad(format!("obstacle {i} must be in front of the camera"));
            }
        }
        if let Some(s) = self.attitude_jitter {
            if !(s.is_finite() && s >= 0.0) {
                return bad(format!("attitude jitter must be non-negative, got {s}"));
            }
        }
        if !(0.0..=1.0).contains(&self.shading) {
            return bad(format!("shading must be in [0, 1], got {}", self.shading));
        }
        Ok(())
    }
}

/// A rendered scene before it is given a frame id.
#[derive(Debug, Clone, PartialEq)]
pub struct Rendered {
    pub image: RgbImage,
    pub mask: GroundTruthMask,
    pub true_attitude: Attitude,
    /// The true attitude plus jitter, as an IMU would report it.
    pub recorded_attitude: Attitude,
    pub camera_height: f64,
}

impl Rendered {
    pub fn into_frame(self, frame_id: impl Into<String>) -> Frame {
        Frame {
            frame_id: frame_id.into(),
            image: self.image,
            attitude: self.recorded_attitude,
            camera_height: Some(self.camera_height),
            gt_mask: Some(self.mask),
        }
    }
}

/// What a single pixel ray hits first.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Hit {
    Sky { elevation: f64 },
    Ground { distance: f64 },
    Obstacle { index: usize, distance: f64 },
}

impl Hit {
    pub fn class(&self) -> MaskClass {
        match self {
            Hit::Sky { .. } => MaskClass::Ignore,
            Hit::Ground { .. } => MaskClass::Floor,
            Hit::Obstacle { .. } => MaskClass::Obstacle,
        }
    }
}

/// Casts the ray through pixel position `(u, v)` into the scene.
pub fn cast_ray(spec: &SceneSpec, k: &CameraIntrinsics, u: f64, v: f64) -> Hit {
    let r = spec.attitude.camera_to_level();
    let d = k.ray(u, v);
    let lv: Vec<f64> = (0..3).map(|i| r[i][0] * d[0] + r[i][1] * d[1] + r[i][2] * d[2]).collect();
    let (dx, dy, dz) = (lv[0], -lv[1], lv[2]);
    let norm = (dx * dx + dy * dy + dz * dz).sqrt();

    let mut best: Option<(f64, Hit)> = None;
    if dy < 0.0 {
        let t = spec.camera_height / -dy;
        best = Some((t, Hit::Ground { distance: t * (dx * dx + dz * dz).sqrt() }));
    }
    if dz > 0.0 {
        for (index, o) in spec.obstacles.iter().enumerate() {
            let t = o.z / dz;
            let (x, y) = (t * dx, t * dy);
            let inside = (x - o.x).abs() <= o.width / 2.0
                && y >= -spec.camera_height
                && y <= o.height - spec.camera_height;
            if inside && best.is_none_or(|(bt, _)| t < bt) {
                best = Some((t, Hit::Obstacle { index, distance: o.z }));
            }
        }
    }
    match best {
        Some((_, hit)) => hit,
        None => Hit::Sky { elevation: (dy / norm).asin() },
    }
}

fn lerp(a: [f64; 3], b: [f64; 3], t: f64) -> [f64; 3] {
    [a[0] + (b[0] - a[0]) * t, a[1] + (b[1] - a[1]) * t, a[2] + (b[2] - a[2]) * t]
}

fn to_byte(x: f64) -> u8 {
    (x.clamp(0.0, 1.0) * 255.0).round() as u8
}

/// Renders image and mask at pixel centers; deterministic in `(spec, k)`.
pub fn render_scene(spec: &SceneSpec, k: &CameraIntrinsics) -> Result<Rendered, SynthError> {
    spec.validate()?;
    let (w, h) = (k.width, k.height);
    let mut pixels = vec![[0u8; 3]; w * h];
    let mut classes = vec![MaskClass::Ignore; w * h];
    pixels
        .par_chunks_mut(w)
        .zip(classes.par_chunks_mut(w))
        .enumerate()
        .for_each(|(v, (prow, crow))| {
            // one noise stream per row keeps rows independent of each other
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            rng.set_stream(v as u64);
            for u in 0..w {
                let noise: [f64; 3] = [rng.random(), rng.random(), rng.random()];
                let hit = cast_ray(spec, k, u as f64, v as f64);
                let (base, amp) = match hit {
                    Hit::Sky { elevation } => {
                        let t = (elevation / FRAC_PI_4).clamp(0.0, 1.0);
                        (lerp(spec.sky_horizon, spec.sky_zenith, t), 0.0)
                    }
                    Hit::Ground { .. } => (spec.ground_color, spec.ground_texture),
                    Hit::Obstacle { index, .. } => {
                        let o = &spec.obstacles[index];
                        (o.color, o.texture)
                    }
                };
                let shade = if w > 1 { 1.0 - spec.shading * u as f64 / (w - 1) as f64 } else { 1.0 };
                prow[u] = std::array::from_fn(|c| to_byte((base[c] + amp * (2.0 * noise[c] - 1.0)) * shade));
                crow[u] = hit.class();
            }
        });

    let recorded_attitude = match spec.attitude_jitter {
        Some(s) if s > 0.0 => {
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            rng.set_stream(u64::MAX);
            let n = Normal::new(0.0, s).expect("validated jitter");
            Attitude::new(spec.attitude.roll() + n.sample(&mut rng), spec.attitude.pitch() + n.sample(&mut rng))?
        }
        _ => spec.attitude,
    };
    Ok(Rendered {
        image: RgbImage::from_pixels(w, h, pixels),
        mask: GroundTruthMask::new(w, h, classes),
        true_attitude: spec.attitude,
        recorded_attitude,
        camera_height: spec.camera_height,
    })
}

/// Obstacle colors frames draw from; each draw is jittered slightly.
pub const PALETTE: [[f64; 3]; 6] = [
    [0.80, 0.20, 0.15],
    [0.90, 0.80, 0.25],
    [0.70, 0.70, 0.72],
    [0.55, 0.30, 0.78],
    [0.95, 0.55, 0.15],
    [0.20, 0.22, 0.32],
];

/// Ranges for per-frame randomization. `None` fields keep the base spec.
#[derive(Debug, Clone, PartialEq)]
pub struct Variation {
    /// Replace the base obstacles with this many random ones (inclusive range).
    pub obstacle_count: Option<(usize, usize)>,
    /// Forward distance range, meters.
    pub distance: (f64, f64),
    /// Maximum absolute lateral offset, meters.
    pub lateral: f64,
    pub width: (f64, f64),
    /// Obstacle height as a multiple of camera height.
    pub height_ratio: (f64, f64),
    pub color_jitter: f64,
    /// Noise amplitude of generated obstacles.
    pub texture: f64,
    /// Maximum absolute roll and pitch offsets added to the base attitude.
    pub attitude: f64,
}

impl Variation {
    /// Every frame equals the base scene.
    pub fn none() -> Self {
        Self {
            obstacle_count: None,
            distance: (0.0, 0.0),
            lateral: 0.0,
            width: (0.0, 0.0),
            height_ratio: (0.0, 0.0),
            color_jitter: 0.0,
            texture: 0.0,
            attitude: 0.0,
        }
    }

    pub fn is_none(&self) -> bool {
        self.obstacle_count.is_none() && self.attitude == 0.0
    }
}

impl Default for Variation {
    fn default() -> Self {
        Self {
            obstacle_count: Some((1, 3)),
            distance: (6.0, 14.0),
            lateral: 4.0,
            width: (0.4, 1.0),
            height_ratio: (1.5, 2.6),
            color_jitter: 0.05,
            texture: 0.05,
            attitude: 0.05,
        }
    }
}

fn range<R: Rng>(rng: &mut R, (lo, hi): (f64, f64)) -> f64 {
    if hi > lo {
        rng.random_range(lo..hi)
    } else {
        lo
    }
}

/// Scene spec of frame `i`: the base scene with seeded random changes.
pub fn frame_spec(base: &SceneSpec, variation: &Variation, seed: u64, i: usize) -> Result<SceneSpec, SynthError> {
    if variation.is_none() {
        return Ok(base.clone());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(i as u64);
    let mut spec = base.clone();
    spec.seed = rng.random();
    if let Some((lo, hi)) = variation.obstacle_count {
        let n = rng.random_range(lo..=hi.max(lo));
        spec.obstacles = (0..n)
            .map(|_| {
                let base_color = PALETTE[rng.random_range(0..PALETTE.len())];
                Obstacle {
                    x: range(&mut rng, (-variation.lateral, variation.lateral)),
                    z: range(&mut rng, variation.distance),
                    width: range(&mut rng, variation.width),
                    height: range(&mut rng, variation.height_ratio) * base.camera_height,
                    color: base_color
                        .map(|c| c + range(&mut rng, (-variation.color_jitter, variation.color_jitter))),
                    texture: variation.texture,
                }
            })
            .collect();
    }
    let a = variation.attitude;
    spec.attitude = Attitude::new(
        base.attitude.roll() + range(&mut rng, (-a, a)),
        base.attitude.pitch() + range(&mut rng, (-a, a)),
    )?;
    Ok(spec)
}

pub fn frame_id(i: usize) -> String {
    format!("frame_{i:04}")
}

/// Renders `n` frames (ids `frame_0000`, ...). Deterministic in all arguments.
pub fn generate_frames(
    n: usize,
    base: &SceneSpec,
    variation: &Variation,
    seed: u64,
    k: &CameraIntrinsics,
) -> Result<Vec<Frame>, SynthError> {
    if n < 2 {
        return Err(SynthError::TooFewFrames(n));
    }
    base.validate()?;
    (0..n)
        .into_par_iter()
        .map(|i| Ok(render_scene(&frame_spec(base, variation, seed, i)?, k)?.into_frame(frame_id(i))))
        .collect()
}

/// [`generate_frames`], written to `dir` in the dataset layout.
pub fn generate_dataset(
    dir: &Path,
    n: usize,
    base: &SceneSpec,
    variation: &Variation,
    seed: u64,
    k: &CameraIntrinsics,
) -> Result<Vec<Frame>, SynthError> {
    let frames = generate_frames(n, base, variation, seed, k)?;
    write_dataset(dir, k, &frames)?;
    Ok(frames)
}

/// The camera used by the bundled synthetic datasets: 320x240, about 60
/// degrees horizontal field of view.
pub fn default_intrinsics() -> CameraIntrinsics {
    CameraIntrinsics::new(277.0, 277.0, 159.5, 119.5, 320, 240).expect("valid constants")
}
