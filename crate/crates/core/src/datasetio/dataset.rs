use std::path::{Path, PathBuf};

use rayon::prelude::*;

use super::{read_file, read_mask, read_ppm, write_atomic, write_mask, write_ppm, DataError, Frame};
use crate::geometry::{Attitude, CameraIntrinsics};

pub const CAMERA_FILE: &str = "camera.cfg";
pub const FRAMES_FILE: &str = "frames.csv";
const HEADER: [&str; 6] = ["frame_id", "image_path", "roll_rad", "pitch_rad", "height_m", "mask_path"];

/// A loaded dataset directory.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub intrinsics: CameraIntrinsics,
    /// Sorted by `frame_id`.
    pub frames: Vec<Frame>,
}

pub fn format_camera_cfg(k: &CameraIntrinsics) -> String {
    format!(
        "fx = {}\nfy = {}\ncx = {}\ncy = {}\nwidth = {}\nheight = {}\n",
        k.fx, k.fy, k.cx, k.cy, k.width, k.height
    )
}

/// Parses `key = value` lines. Blank lines and `#` comments are skipped;
/// all six keys are required exactly once.
pub fn parse_camera_cfg(text: &str) -> Result<CameraIntrinsics, String> {
    let mut vals: [Option<f64>; 6] = [None; 6];
    const KEYS: [&str; 6] = ["fx", "fy", "cx", "cy", "width", "height"];
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("line {}: expected `key = value`", i + 1))?;
        let key = key.trim();
        let slot = KEYS
            .iter()
            .position(|k| *k == key)
            .ok_or_else(|| format!("line {}: unknown key {key:?}", i + 1))?;
        if vals[slot].is_some() {
            return Err(format!("line {}: duplicate key {key:?}", i + 1));
        }
        let v: f64 = value
            .trim()
            .parse()
            .map_err(|_| format!("line {}: bad value {:?} for {key}", i + 1, value.trim()))?;
        vals[slot] = Some(v);
    }
    let mut got = [0.0; 6];
    for (slot, v) in vals.iter().enumerate() {
        got[slot] = v.ok_or_else(|| format!("missing key {:?}", KEYS[slot]))?;
    }
    let dim = |x: f64, name: &str| {
        if x >= 1.0 && x.fract() == 0.0 && x <= u32::MAX as f64 {
            Ok(x as usize)
        } else {
            Err(format!("{name} must be a positive integer, got {x}"))
        }
    };
    let (w, h) = (dim(got[4], "width")?, dim(got[5], "height")?);
    CameraIntrinsics::new(got[0], got[1], got[2], got[3], w, h).map_err(|e| e.to_string())
}

pub fn read_camera_cfg(path: &Path) -> Result<CameraIntrinsics, DataError> {
    let bytes = read_file(path)?;
    let text = String::from_utf8(bytes)
        .map_err(|_| DataError::Camera { path: path.to_path_buf(), msg: "not UTF-8 text".into() })?;
    parse_camera_cfg(&text).map_err(|msg| DataError::Camera { path: path.to_path_buf(), msg })
}

struct Row {
    frame_id: String,
    image: PathBuf,
    roll: f64,
    pitch: f64,
    height: Option<f64>,
    mask: Option<PathBuf>,
}

fn parse_rows(path: &Path, bytes: &[u8]) -> Result<Vec<Row>, DataError> {
    let row_err = |row: usize, msg: String| DataError::FrameRow { path: path.to_path_buf(), row, msg };
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).flexible(true).trim(csv::Trim::All).from_reader(bytes);
    let header = rdr.headers().map_err(|e| row_err(1, e.to_string()))?.clone();
    if header.len() < 4 || header.iter().zip(HEADER).any(|(a, b)| a != b) {
        return Err(row_err(1, format!("header must be `{}`", HEADER.join(","))));
    }
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        // Line numbers count the header as row 1.
        let row = i + 2;
        let rec = rec.map_err(|e| row_err(row, e.to_string()))?;
        let field = |j: usize| rec.get(j).unwrap_or("");
        let frame_id = field(0).to_string();
        if frame_id.is_empty() {
            return Err(row_err(row, "empty frame_id".into()));
        }
        if field(1).is_empty() {
            return Err(row_err(row, "empty image_path".into()));
        }
        let num = |j: usize| -> Result<f64, DataError> {
            field(j)
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| row_err(row, format!("bad {} {:?}", HEADER[j], field(j))))
        };
        let (roll, pitch) = (num(2)?, num(3)?);
        Attitude::new(roll, pitch).map_err(|e| row_err(row, e.to_string()))?;
        let height = match field(4) {
            "" => None,
            _ => {
                let h = num(4)?;
                if h <= 0.0 {
                    return Err(row_err(row, format!("height_m must be positive, got {h}")));
                }
                Some(h)
            }
        };
        let mask = Some(field(5)).filter(|s| !s.is_empty()).map(PathBuf::from);
        rows.push(Row { frame_id, image: PathBuf::from(field(1)), roll, pitch, height, mask });
    }
    rows.sort_by(|a, b| a.frame_id.cmp(&b.frame_id));
    if let Some(w) = rows.windows(2).find(|w| w[0].frame_id == w[1].frame_id) {
        return Err(DataError::FrameRow {
            path: path.to_path_buf(),
            row: 0,
            msg: format!("duplicate frame_id {:?}", w[0].frame_id),
        });
    }
    Ok(rows)
}

fn load_frame(dir: &Path, k: &CameraIntrinsics, row: Row) -> Result<Frame, DataError> {
    let existing = |rel: &Path| {
        let p = dir.join(rel);
        if p.is_file() {
            Ok(p)
        } else {
            Err(DataError::MissingFile { frame_id: row.frame_id.clone(), path: p })
        }
    };
    let image = read_ppm(&existing(&row.image)?)?;
    if (image.width(), image.height()) != (k.width, k.height) {
        return Err(DataError::Dimensions {
            frame_id: row.frame_id,
            what: "image",
            got_w: image.width(),
            got_h: image.height(),
            want_w: k.width,
            want_h: k.height,
        });
    }
    let gt_mask = match &row.mask {
        Some(rel) => {
            let m = read_mask(&existing(rel)?)?;
            if (m.width(), m.height()) != (image.width(), image.height()) {
                return Err(DataError::Dimensions {
                    frame_id: row.frame_id,
                    what: "mask",
                    got_w: m.width(),
                    got_h: m.height(),
                    want_w: image.width(),
                    want_h: image.height(),
                });
            }
            Some(m)
        }
        None => None,
    };
    let attitude = Attitude::new(row.roll, row.pitch).expect("validated while parsing");
    Ok(Frame { frame_id: row.frame_id, image, attitude, camera_height: row.height, gt_mask })
}

/// Loads `camera.cfg`, `frames.csv` and every referenced image and mask.
pub fn load_dataset(dir: &Path) -> Result<Dataset, DataError> {
    let intrinsics = read_camera_cfg(&dir.join(CAMERA_FILE))?;
    let csv_path = dir.join(FRAMES_FILE);
    let rows = parse_rows(&csv_path, &read_file(&csv_path)?)?;
    let frames = rows
        .into_par_iter()
        .map(|row| load_frame(dir, &intrinsics, row))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Dataset { intrinsics, frames })
}

/// Writes `frames` under `dir` as `images/<id>.ppm` and `masks/<id>.pgm`,
/// plus `camera.cfg` and `frames.csv`. Output bytes depend only on the inputs.
pub fn write_dataset(dir: &Path, k: &CameraIntrinsics, frames: &[Frame]) -> Result<(), DataError> {
    let mkdir = |p: PathBuf| std::fs::create_dir_all(&p).map_err(|source| DataError::Io { path: p, source });
    mkdir(dir.join("images"))?;
    if frames.iter().any(|f| f.gt_mask.is_some()) {
        mkdir(dir.join("masks"))?;
    }
    write_atomic(&dir.join(CAMERA_FILE), format_camera_cfg(k).as_bytes())?;

    let mut sorted: Vec<&Frame> = frames.iter().collect();
    sorted.sort_by(|a, b| a.frame_id.cmp(&b.frame_id));
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| DataError::FrameRow { path: dir.join(FRAMES_FILE), row: 0, msg: e.to_string() };
    w.write_record(HEADER).map_err(csv_err)?;
    for f in &sorted {
        let image_rel = format!("images/{}.ppm", f.frame_id);
        write_ppm(&dir.join(&image_rel), &f.image)?;
        let mask_rel = match &f.gt_mask {
            Some(m) => {
                let rel = format!("masks/{}.pgm", f.frame_id);
                write_mask(&dir.join(&rel), m)?;
                rel
            }
            None => String::new(),
        };
        let height = f.camera_height.map(|h| h.to_string()).unwrap_or_default();
        w.write_record([
            f.frame_id.as_str(),
            &image_rel,
            &f.attitude.roll().to_string(),
            &f.attitude.pitch().to_string(),
            &height,
            &mask_rel,
        ])
        .map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| csv_err(e.into_error().into()))?;
    write_atomic(&dir.join(FRAMES_FILE), &bytes)
}
