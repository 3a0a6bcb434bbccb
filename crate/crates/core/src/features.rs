//! Per-pixel feature vectors: HSV color, a rotation-invariant uniform LBP code
//! (radius 3, 24 samples) and the nine 3x3 Laws mask responses.
//!
//! Channel layout is fixed: `[H, S, V, LBP/25, L3L3, L3E3, L3S3, E3L3, E3E3,
//! E3S3, S3L3, S3E3, S3S3]`. All neighborhood operations read through
//! symmetric reflection at the image border.

use std::f64::consts::PI;
use std::sync::OnceLock;

use rayon::prelude::*;
use thiserror::Error;

use crate::raster::{GrayImage, RgbImage};

pub const N_FEATURES: usize = 13;
pub const HUE: usize = 0;
pub const SATURATION: usize = 1;
pub const VALUE: usize = 2;
pub const LBP: usize = 3;
/// Index of the first Laws channel; the nine responses follow in order.
pub const LAWS: usize = 4;

pub const CHANNEL_NAMES: [&str; N_FEATURES] = [
    "hue", "saturation", "value", "lbp", "l3l3", "l3e3", "l3s3", "e3l3", "e3e3", "e3s3", "s3l3",
    "s3e3", "s3s3",
];

pub const LBP_RADIUS: f64 = 3.0;
pub const LBP_POINTS: usize = 24;
/// Code assigned to every non-uniform pattern.
pub const LBP_NON_UNIFORM: u8 = LBP_POINTS as u8 + 1;

const PAD: usize = 5;

pub type FeatureVector = [f64; N_FEATURES];

#[derive(Debug, Error, PartialEq)]
pub enum FeatureError {
    #[error("cannot extract features from an empty {0}x{1} image")]
    EmptyImage(usize, usize),
}

/// Standard hexcone conversion; hue is scaled to [0, 1) and is 0 for greys.
pub fn rgb_to_hsv(r: f64, g: f64, b: f64) -> (f64, f64, f64) {
    let max = r.max(g).max(b);
    let min = r.min(g).min(b);
    let delta = max - min;
    if max <= 0.0 || delta <= 0.0 {
        return (0.0, 0.0, max);
    }
    let sector = if max == r {
        (g - b) / delta
    } else if max == g {
        (b - r) / delta + 2.0
    } else {
        (r - g) / delta + 4.0
    };
    let mut h = sector / 6.0;
    if h < 0.0 {
        h += 1.0;
    }
    if h >= 1.0 {
        h -= 1.0;
    }
    (h, delta / max, max)
}

/// Intensity plane in [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct GrayPlane {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl GrayPlane {
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), width * height, "plane size mismatch");
        Self { width, height, data }
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(width * height);
        for v in 0..height {
            for u in 0..width {
                data.push(f(u, v));
            }
        }
        Self { width, height, data }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn get(&self, u: usize, v: usize) -> f64 {
        self.data[v * self.width + u]
    }

    #[inline]
    fn get_reflect(&self, x: isize, y: isize) -> f64 {
        self.get(reflect(x, self.width), reflect(y, self.height))
    }

    /// Copy with `pad` reflected pixels on every side.
    fn padded(&self, pad: usize) -> GrayPlane {
        let w = self.width + 2 * pad;
        let h = self.height + 2 * pad;
        GrayPlane::from_fn(w, h, |u, v| {
            self.get_reflect(u as isize - pad as isize, v as isize - pad as isize)
        })
    }
}

/// Symmetric (edge-repeating) reflection of an index into `0..n`.
#[inline]
fn reflect(i: isize, n: usize) -> usize {
    let n = n as isize;
    let m = i.rem_euclid(2 * n);
    (if m < n { m } else { 2 * n - 1 - m }) as usize
}

/// Rec.601 luma, computed in thousandths so the weights sum to exactly one.
#[inline]
fn luma(rgb: [f64; 3]) -> f64 {
    ((299.0 * rgb[0] + 587.0 * rgb[1] + 114.0 * rgb[2]) / 1000.0).clamp(0.0, 1.0)
}

pub fn to_gray(image: &RgbImage) -> GrayPlane {
    GrayPlane::from_fn(image.width(), image.height(), |u, v| luma(image.get_unit(u, v)))
}

/// Integer offset and fractional weight of one circular sample.
#[derive(Debug, Clone, Copy)]
struct SampleOffset {
    ix: isize,
    iy: isize,
    fx: f64,
    fy: f64,
}

fn lbp_offsets() -> &'static [SampleOffset; LBP_POINTS] {
    static OFFSETS: OnceLock<[SampleOffset; LBP_POINTS]> = OnceLock::new();
    OFFSETS.get_or_init(|| {
        let mut out = [SampleOffset { ix: 0, iy: 0, fx: 0.0, fy: 0.0 }; LBP_POINTS];
        for (k, slot) in out.iter_mut().enumerate() {
            let theta = 2.0 * PI * k as f64 / LBP_POINTS as f64;
            let snap = |x: f64| if (x - x.round()).abs() < 1e-9 { x.round() } else { x };
            let dx = snap(LBP_RADIUS * theta.cos());
            let dy = snap(-LBP_RADIUS * theta.sin());
            let (ix, iy) = (dx.floor(), dy.floor());
            *slot = SampleOffset { ix: ix as isize, iy: iy as isize, fx: dx - ix, fy: dy - iy };
        }
        out
    })
}

/// Bilinear blend written so that equal corners reproduce their value exactly.
#[inline]
fn bilerp(p00: f64, p10: f64, p01: f64, p11: f64, fx: f64, fy: f64) -> f64 {
    let top = p00 + fx * (p10 - p00);
    let bottom = p01 + fx * (p11 - p01);
    top + fy * (bottom - top)
}

/// Maps a 24-bit circular pattern to its riu2 code in `0..=25`.
#[inline]
pub fn riu2_code(pattern: u32) -> u8 {
    let mask = (1u32 << LBP_POINTS) - 1;
    let pattern = pattern & mask;
    let rotated = ((pattern << 1) | (pattern >> (LBP_POINTS - 1))) & mask;
    if (pattern ^ rotated).count_ones() <= 2 {
        pattern.count_ones() as u8
    } else {
        LBP_NON_UNIFORM
    }
}

/// LBP pattern of a pixel: bit `k` is set when sample `k` is at least as bright
/// as the center.
fn lbp_pattern_with(center: f64, mut at: impl FnMut(isize, isize) -> f64) -> u32 {
    let mut pattern = 0u32;
    for (k, o) in lbp_offsets().iter().enumerate() {
        let s = bilerp(
            at(o.ix, o.iy),
            at(o.ix + 1, o.iy),
            at(o.ix, o.iy + 1),
            at(o.ix + 1, o.iy + 1),
            o.fx,
            o.fy,
        );
        if s >= center {
            pattern |= 1 << k;
        }
    }
    pattern
}

/// Rotation-invariant uniform LBP code (0..=25) of one pixel.
///
/// Panics if `(u, v)` is outside the plane.
pub fn lbp_code(gray: &GrayPlane, u: usize, v: usize) -> u8 {
    let center = gray.get(u, v);
    let (u, v) = (u as isize, v as isize);
    riu2_code(lbp_pattern_with(center, |dx, dy| gray.get_reflect(u + dx, v + dy)))
}

const L3: [f64; 3] = [1.0, 2.0, 1.0];
const E3: [f64; 3] = [-1.0, 0.0, 1.0];
const S3: [f64; 3] = [-1.0, 2.0, -1.0];

/// Cross-correlates the nine Laws kernels with a 3x3 neighborhood given as
/// rows of the image. Kernel `XY` has `X` along rows (vertical) and `Y` along
/// columns (horizontal).
#[inline]
fn laws_from_neighborhood(n: [[f64; 3]; 3]) -> [f64; 9] {
    let mut horiz = [[0.0; 3]; 3];
    for (r, row) in n.iter().enumerate() {
        for (j, k) in [L3, E3, S3].iter().enumerate() {
            horiz[j][r] = k[0] * row[0] + k[1] * row[1] + k[2] * row[2];
        }
    }
    let mut out = [0.0; 9];
    for (i, vk) in [L3, E3, S3].iter().enumerate() {
        for j in 0..3 {
            let h = &horiz[j];
            out[i * 3 + j] = vk[0] * h[0] + vk[1] * h[1] + vk[2] * h[2];
        }
    }
    out
}

/// The nine raw Laws responses at one pixel, in L3L3 .. S3S3 order.
///
/// Panics if `(u, v)` is outside the plane.
pub fn laws_responses(gray: &GrayPlane, u: usize, v: usize) -> [f64; 9] {
    assert!(u < gray.width && v < gray.height, "pixel outside plane");
    let (u, v) = (u as isize, v as isize);
    let mut n = [[0.0; 3]; 3];
    for (r, row) in n.iter_mut().enumerate() {
        for (c, cell) in row.iter_mut().enumerate() {
            *cell = gray.get_reflect(u + c as isize - 1, v + r as isize - 1);
        }
    }
    laws_from_neighborhood(n)
}

/// Dense per-pixel feature vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureImage {
    width: usize,
    height: usize,
    data: Vec<FeatureVector>,
}

impl FeatureImage {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn get(&self, u: usize, v: usize) -> &FeatureVector {
        &self.data[v * self.width + u]
    }

    pub fn pixels(&self) -> &[FeatureVector] {
        &self.data
    }

    pub fn channel(&self, c: usize) -> Vec<f64> {
        self.data.iter().map(|f| f[c]).collect()
    }

    pub fn crop(&self, u0: usize, v0: usize, w: usize, h: usize) -> FeatureImage {
        let mut data = Vec::with_capacity(w * h);
        for v in v0..v0 + h {
            data.extend_from_slice(&self.data[v * self.width + u0..v * self.width + u0 + w]);
        }
        FeatureImage { width: w, height: h, data }
    }

    /// One min-max normalized graymap per channel, for inspection.
    pub fn channel_images(&self) -> Vec<GrayImage> {
        (0..N_FEATURES)
            .map(|c| {
                let values = self.channel(c);
                let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
                let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let span = hi - lo;
                let px = values
                    .iter()
                    .map(|&x| if span > 0.0 { ((x - lo) / span * 255.0).round() as u8 } else { 0 })
                    .collect();
                GrayImage::from_pixels(self.width, self.height, px)
            })
            .collect()
    }
}

/// Computes the 13-channel feature vector of every pixel.
pub fn extract_features(image: &RgbImage) -> Result<FeatureImage, FeatureError> {
    let (w, h) = (image.width(), image.height());
    if w == 0 || h == 0 {
        return Err(FeatureError::EmptyImage(w, h));
    }
    let padded = to_gray(image).padded(PAD);
    let pw = padded.width;
    let offsets = lbp_offsets();

    let mut data = vec![[0.0; N_FEATURES]; w * h];
    data.par_chunks_mut(w).enumerate().for_each(|(v, row)| {
        for (u, out) in row.iter_mut().enumerate() {
            let (r, g, b) = {
                let [r, g, b] = image.get_unit(u, v);
                (r, g, b)
            };
            let (hh, ss, vv) = rgb_to_hsv(r, g, b);
            out[HUE] = hh;
            out[SATURATION] = ss;
            out[VALUE] = vv;

            let cu = (u + PAD) as isize;
            let cv = (v + PAD) as isize;
            let at = |x: isize, y: isize| padded.data[y as usize * pw + x as usize];
            let center = at(cu, cv);
            let mut pattern = 0u32;
            for (k, o) in offsets.iter().enumerate() {
                let (x, y) = (cu + o.ix, cv + o.iy);
                let s = bilerp(at(x, y), at(x + 1, y), at(x, y + 1), at(x + 1, y + 1), o.fx, o.fy);
                if s >= center {
                    pattern |= 1 << k;
                }
            }
            out[LBP] = riu2_code(pattern) as f64 / LBP_NON_UNIFORM as f64;

            let mut n = [[0.0; 3]; 3];
            for (r, nrow) in n.iter_mut().enumerate() {
                for (c, cell) in nrow.iter_mut().enumerate() {
                    *cell = at(cu + c as isize - 1, cv + r as isize - 1);
                }
            }
            out[LAWS..].copy_from_slice(&laws_from_neighborhood(n));
        }
    });
    Ok(FeatureImage { width: w, height: h, data })
}
