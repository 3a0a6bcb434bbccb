//! On-disk dataset layout, raster files and model persistence.
//!
//! A dataset directory holds:
//!
//! ```text
//! camera.cfg       fx, fy, cx, cy, width, height as `key = value` lines
//! frames.csv       frame_id,image_path,roll_rad,pitch_rad,height_m,mask_path
//! images/*.ppm     8-bit binary pixmaps
//! masks/*.pgm      8-bit graymaps: 0 floor, 128 ignore, 255 obstacle
//! ```
//!
//! `height_m` and `mask_path` may be empty. Paths are relative to the
//! dataset directory.

mod dataset;
mod model;
pub mod pnm;

pub use dataset::{
    format_camera_cfg, load_dataset, parse_camera_cfg, read_camera_cfg, write_dataset, Dataset,
    CAMERA_FILE, FRAMES_FILE,
};
pub use model::{decode_model, encode_model, load_model, save_model, ModelFormatError, FORMAT_TAG, FORMAT_VERSION};

use std::io::Write;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::evaluation::{GroundTruthMask, MaskClass};
use crate::geometry::Attitude;
use crate::raster::{BitImage, GrayImage, RgbImage};
use pnm::PnmError;

#[derive(Debug, Error)]
pub enum DataError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Image { path: PathBuf, source: PnmError },
    #[error("{path}: {msg}")]
    Camera { path: PathBuf, msg: String },
    #[error("{path}, row {row}: {msg}")]
    FrameRow { path: PathBuf, row: usize, msg: String },
    #[error("frame {frame_id}: referenced file {path} does not exist")]
    MissingFile { frame_id: String, path: PathBuf },
    #[error("frame {frame_id}: {what} is {got_w}x{got_h}, expected {want_w}x{want_h}")]
    Dimensions {
        frame_id: String,
        what: &'static str,
        got_w: usize,
        got_h: usize,
        want_w: usize,
        want_h: usize,
    },
    #[error("{path}: mask value {value} at ({u}, {v}) is not 0, 128 or 255")]
    MaskValue { path: PathBuf, value: u8, u: usize, v: usize },
    #[error("{path}: {source}")]
    Model { path: PathBuf, source: ModelFormatError },
}

/// One image with the attitude it was taken at.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    pub frame_id: String,
    pub image: RgbImage,
    pub attitude: Attitude,
    pub camera_height: Option<f64>,
    pub gt_mask: Option<GroundTruthMask>,
}

pub(crate) fn read_file(path: &Path) -> Result<Vec<u8>, DataError> {
    std::fs::read(path).map_err(|source| DataError::Io { path: path.to_path_buf(), source })
}

/// Writes through a temporary file in the destination directory, then renames.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), DataError> {
    let io = |source| DataError::Io { path: path.to_path_buf(), source };
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(bytes).map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

pub fn mask_to_gray(mask: &GroundTruthMask) -> GrayImage {
    let px = mask
        .classes()
        .iter()
        .map(|c| match c {
            MaskClass::Floor => 0,
            MaskClass::Ignore => 128,
            MaskClass::Obstacle => 255,
        })
        .collect();
    GrayImage::from_pixels(mask.width(), mask.height(), px)
}

/// Decodes the 0 / 128 / 255 mask encoding; `Err((value, u, v))` on any other value.
pub fn mask_from_gray(gray: &GrayImage) -> Result<GroundTruthMask, (u8, usize, usize)> {
    let w = gray.width();
    let classes = gray
        .pixels()
        .iter()
        .enumerate()
        .map(|(i, &p)| match p {
            0 => Ok(MaskClass::Floor),
            128 => Ok(MaskClass::Ignore),
            255 => Ok(MaskClass::Obstacle),
            other => Err((other, i % w.max(1), i / w.max(1))),
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(GroundTruthMask::new(gray.width(), gray.height(), classes))
}

pub fn read_ppm(path: &Path) -> Result<RgbImage, DataError> {
    pnm::decode_ppm(&read_file(path)?).map_err(|source| DataError::Image { path: path.to_path_buf(), source })
}

pub fn read_pgm(path: &Path) -> Result<GrayImage, DataError> {
    pnm::decode_pgm(&read_file(path)?).map_err(|source| DataError::Image { path: path.to_path_buf(), source })
}

pub fn read_pbm(path: &Path) -> Result<BitImage, DataError> {
    pnm::decode_pbm(&read_file(path)?).map_err(|source| DataError::Image { path: path.to_path_buf(), source })
}

pub fn read_mask(path: &Path) -> Result<GroundTruthMask, DataError> {
    mask_from_gray(&read_pgm(path)?).map_err(|(value, u, v)| DataError::MaskValue {
        path: path.to_path_buf(),
        value,
        u,
        v,
    })
}

pub fn write_ppm(path: &Path, img: &RgbImage) -> Result<(), DataError> {
    write_atomic(path, &pnm::encode_ppm(img))
}

pub fn write_pgm(path: &Path, img: &GrayImage) -> Result<(), DataError> {
    write_atomic(path, &pnm::encode_pgm(img))
}

pub fn write_pbm(path: &Path, img: &BitImage) -> Result<(), DataError> {
    write_atomic(path, &pnm::encode_pbm(img))
}

pub fn write_mask(path: &Path, mask: &GroundTruthMask) -> Result<(), DataError> {
    write_pgm(path, &mask_to_gray(mask))
}
