//! Horizon projection from camera attitude, above/below pixel labels, and
//! flat-ground distance recovery.
//!
//! Pixel `(u, v)` (u rightward, v downward, origin top-left) views along the
//! camera-frame ray `((u - cx) / fx, (v - cy) / fy, 1)`. The world up vector in
//! the camera frame is `R_roll * R_pitch * (0, -1, 0)`, with pitch about the
//! camera x-axis (positive tilts the optical axis up) and roll about the
//! optical axis. The elevation of a pixel is the signed angle between its ray
//! and the horizontal plane. Yaw never enters.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use thiserror::Error;

use crate::pipeline::ObstacleMap;

/// Default angular margin around the horizon inside which a ray is treated as
/// never reaching the ground.
pub const DEFAULT_HORIZON_EPSILON: f64 = 1e-6;

#[derive(Debug, Error, PartialEq)]
pub enum GeometryError {
    #[error("invalid camera intrinsics: {0}")]
    InvalidIntrinsics(String),
    #[error("invalid attitude: {0}")]
    InvalidAttitude(String),
    #[error("pixel ({u}, {v}) outside {width}x{height} image")]
    OutOfBounds { u: usize, v: usize, width: usize, height: usize },
    #[error("camera height must be positive, got {0}")]
    InvalidHeight(f64),
    #[error("dimension mismatch: obstacle map {map_w}x{map_h}, horizon field {field_w}x{field_h}")]
    DimensionMismatch { map_w: usize, map_h: usize, field_w: usize, field_h: usize },
}

/// Pinhole intrinsics in pixels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CameraIntrinsics {
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
    pub width: usize,
    pub height: usize,
}

impl CameraIntrinsics {
    pub fn new(
        fx: f64,
        fy: f64,
        cx: f64,
        cy: f64,
        width: usize,
        height: usize,
    ) -> Result<Self, GeometryError> {
        let bad = |msg: String| Err(GeometryError::InvalidIntrinsics(msg));
        if !(fx.is_finite() && fx > 0.0 && fy.is_finite() && fy > 0.0) {
            return bad(format!("focal lengths must be positive (fx={fx}, fy={fy})"));
        }
        if width == 0 || height == 0 {
            return bad(format!("image size must be non-zero ({width}x{height})"));
        }
        if !(cx >= 0.0 && cx < width as f64) {
            return bad(format!("cx={cx} outside [0, {width})"));
        }
        if !(cy >= 0.0 && cy < height as f64) {
            return bad(format!("cy={cy} outside [0, {height})"));
        }
        Ok(Self { fx, fy, cx, cy, width, height })
    }

    /// Camera-frame viewing ray of a (possibly fractional) pixel position.
    #[inline]
    pub fn ray(&self, u: f64, v: f64) -> [f64; 3] {
        [(u - self.cx) / self.fx, (v - self.cy) / self.fy, 1.0]
    }
}

/// Camera roll and pitch in radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Attitude {
    roll: f64,
    pitch: f64,
}

impl Attitude {
    pub fn new(roll: f64, pitch: f64) -> Result<Self, GeometryError> {
        if !(roll.is_finite() && (-PI..=PI).contains(&roll)) {
            return Err(GeometryError::InvalidAttitude(format!("roll {roll} outside [-pi, pi]")));
        }
        if !(pitch.is_finite() && pitch > -FRAC_PI_2 && pitch < FRAC_PI_2) {
            return Err(GeometryError::InvalidAttitude(format!(
                "pitch {pitch} outside (-pi/2, pi/2)"
            )));
        }
        Ok(Self { roll, pitch })
    }

    pub fn level() -> Self {
        Self { roll: 0.0, pitch: 0.0 }
    }

    pub fn roll(&self) -> f64 {
        self.roll
    }

    pub fn pitch(&self) -> f64 {
        self.pitch
    }

    /// World up direction expressed in the camera frame (unit length).
    pub fn up_in_camera(&self) -> [f64; 3] {
        // R_pitch * (0, -1, 0) = (0, -cos p, sin p), then rotate about z by roll.
        let (sp, cp) = self.pitch.sin_cos();
        let (sr, cr) = self.roll.sin_cos();
        let (x, y, z) = (0.0, -cp, sp);
        [x * cr - y * sr, x * sr + y * cr, z]
    }

    /// Rotation taking camera-frame vectors to the level-camera frame
    /// (x right, y down, z forward with zero roll and pitch).
    pub fn camera_to_level(&self) -> [[f64; 3]; 3] {
        let (sp, cp) = self.pitch.sin_cos();
        let (sr, cr) = self.roll.sin_cos();
        // M = Rz(roll) * Rx(-pitch); camera_to_level = M^T.
        let rz = [[cr, -sr, 0.0], [sr, cr, 0.0], [0.0, 0.0, 1.0]];
        let rx = [[1.0, 0.0, 0.0], [0.0, cp, sp], [0.0, -sp, cp]];
        let mut m = [[0.0; 3]; 3];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = (0..3).map(|k| rz[i][k] * rx[k][j]).sum();
            }
        }
        let mut t = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                t[i][j] = m[j][i];
            }
        }
        t
    }
}

/// Which side of the horizon a pixel's ray points to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Label {
    Above,
    Below,
}

impl Label {
    /// Pixels exactly on the horizon belong to the ground side.
    #[inline]
    pub fn from_elevation(elevation: f64) -> Self {
        if elevation > 0.0 {
            Label::Above
        } else {
            Label::Below
        }
    }
}

/// Per-pixel elevation angles for one image under one attitude.
#[derive(Debug, Clone, PartialEq)]
pub struct HorizonField {
    width: usize,
    height: usize,
    up: [f64; 3],
    intrinsics: CameraIntrinsics,
    elevation: Vec<f64>,
}

impl HorizonField {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Row-major elevation angles in radians.
    pub fn elevations(&self) -> &[f64] {
        &self.elevation
    }

    /// Elevation at an in-bounds pixel.
    #[inline]
    pub fn elevation(&self, u: usize, v: usize) -> f64 {
        self.elevation[v * self.width + u]
    }

    #[inline]
    pub fn label_at(&self, index: usize) -> Label {
        Label::from_elevation(self.elevation[index])
    }

    pub fn labels(&self) -> Vec<Label> {
        self.elevation.iter().map(|&e| Label::from_elevation(e)).collect()
    }

    /// Elevation of an arbitrary sub-pixel position, evaluated from the ray.
    pub fn elevation_at(&self, u: f64, v: f64) -> f64 {
        elevation_of_ray(self.intrinsics.ray(u, v), self.up)
    }

    /// Continuous row where the horizon crosses column `u`, or `None` when the
    /// horizon is vertical in the image.
    pub fn horizon_row(&self, u: f64) -> Option<f64> {
        let [a, b, c] = self.up;
        if b.abs() < 1e-15 {
            return None;
        }
        let k = &self.intrinsics;
        // a (u - cx)/fx + b (v - cy)/fy + c = 0
        Some(k.cy - k.fy * (c + a * (u - k.cx) / k.fx) / b)
    }
}

#[inline]
fn elevation_of_ray(ray: [f64; 3], up: [f64; 3]) -> f64 {
    let norm = (ray[0] * ray[0] + ray[1] * ray[1] + ray[2] * ray[2]).sqrt();
    let s = (ray[0] * up[0] + ray[1] * up[1] + ray[2] * up[2]) / norm;
    s.clamp(-1.0, 1.0).asin()
}

/// Computes the elevation of every pixel's viewing ray.
pub fn horizon_field(intrinsics: &CameraIntrinsics, attitude: &Attitude) -> HorizonField {
    let up = attitude.up_in_camera();
    let (w, h) = (intrinsics.width, intrinsics.height);
    let mut elevation = Vec::with_capacity(w * h);
    for v in 0..h {
        for u in 0..w {
            elevation.push(elevation_of_ray(intrinsics.ray(u as f64, v as f64), up));
        }
    }
    HorizonField { width: w, height: h, up, intrinsics: *intrinsics, elevation }
}

pub fn pixel_side(field: &HorizonField, u: usize, v: usize) -> Result<Label, GeometryError> {
    if u >= field.width || v >= field.height {
        return Err(GeometryError::OutOfBounds {
            u,
            v,
            width: field.width,
            height: field.height,
        });
    }
    Ok(Label::from_elevation(field.elevation(u, v)))
}

/// Horizontal distance to where a ray of the given elevation meets flat ground
/// `camera_height` below the camera. `Ok(None)` when the ray never descends
/// (elevation at or above `-DEFAULT_HORIZON_EPSILON`).
pub fn ground_distance(elevation: f64, camera_height: f64) -> Result<Option<f64>, GeometryError> {
    ground_distance_with_epsilon(elevation, camera_height, DEFAULT_HORIZON_EPSILON)
}

pub fn ground_distance_with_epsilon(
    elevation: f64,
    camera_height: f64,
    epsilon: f64,
) -> Result<Option<f64>, GeometryError> {
    if !(camera_height.is_finite() && camera_height > 0.0) {
        return Err(GeometryError::InvalidHeight(camera_height));
    }
    let depression = -elevation;
    #[allow(clippy::neg_cmp_op_on_partial_ord)] // NaN lands here too
    if !(depression > epsilon.max(0.0)) {
        return Ok(None);
    }
    Ok(Some(camera_height * cot(depression)))
}

/// Cotangent on (0, pi/2]. Above pi/4 the complement pi/2 - x is exact in
/// binary, so the low word of pi/2 is folded back in with a first-order term.
fn cot(x: f64) -> f64 {
    if x >= FRAC_PI_4 {
        const FRAC_PI_2_LO: f64 = 6.123_233_995_736_766e-17;
        let t = (FRAC_PI_2 - x).tan();
        t + FRAC_PI_2_LO * (1.0 + t * t)
    } else {
        let (s, c) = x.sin_cos();
        c / s
    }
}

/// Nearest ground-contact distance per image column.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ColumnDistance {
    /// No below-horizon obstacle pixel in this column.
    Free,
    Obstacle(f64),
}

/// For each column, the flat-ground distance of its bottom-most obstacle pixel
/// that lies below the horizon.
pub fn column_distances(
    obstacle_map: &ObstacleMap,
    field: &HorizonField,
    camera_height: f64,
) -> Result<Vec<ColumnDistance>, GeometryError> {
    if obstacle_map.width() != field.width || obstacle_map.height() != field.height {
        return Err(GeometryError::DimensionMismatch {
            map_w: obstacle_map.width(),
            map_h: obstacle_map.height(),
            field_w: field.width,
            field_h: field.height,
        });
    }
    if !(camera_height.is_finite() && camera_height > 0.0) {
        return Err(GeometryError::InvalidHeight(camera_height));
    }
    let mut out = Vec::with_capacity(field.width);
    for u in 0..field.width {
        let mut result = ColumnDistance::Free;
        for v in (0..field.height).rev() {
            if !obstacle_map.get(u, v) {
                continue;
            }
            let e = field.elevation(u, v);
            if Label::from_elevation(e) != Label::Below {
                continue;
            }
            if let Some(d) = ground_distance(e, camera_height)? {
                result = ColumnDistance::Obstacle(d);
            }
            break;
        }
        out.push(result);
    }
    Ok(out)
}
