//! Obstacle detection from a single camera by learning where the horizon is.
//!
//! Each training pixel is labeled by which side of the IMU-projected horizon
//! it falls on. A random forest learns to predict that label from local color
//! and texture. Floor pixels are confidently "below" and sky is confidently
//! "above". Obstacles straddle the horizon, so the forest is unsure about their
//! appearance. Thresholding its per-pixel entropy yields an obstacle map, and
//! the flat-ground assumption turns obstacle rows into distances.
//!
//! Modules, in pipeline order:
//!
//! - [`geometry`]: horizon field, pixel labels, ground distances
//! - [`features`]: 13-channel HSV / LBP / Laws feature images
//! - [`forest`]: random forest with Gini splits and entropy outputs
//! - [`pipeline`]: self-labeling, training, uncertainty and obstacle maps
//! - [`evaluation`]: below-horizon ROC, accuracy, per-class entropy
//! - [`synthgen`]: synthetic scenes with exact ground truth
//! - [`datasetio`]: dataset directories, PNM rasters, model files
//! - [`cli`]: the `hobs` command-line tool

pub mod cli;
pub mod datasetio;
pub mod evaluation;
pub mod features;
pub mod forest;
pub mod geometry;
pub mod pipeline;
pub mod raster;
pub mod synthgen;

pub use datasetio::Frame;
pub use forest::RandomForestModel;
pub use geometry::{Attitude, CameraIntrinsics};
