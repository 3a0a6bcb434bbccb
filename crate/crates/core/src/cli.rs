//! The `hobs` command-line tool.
//!
//! Exit codes: 0 success, 1 usage error, 2 data or format error.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use crate::datasetio::{
    load_dataset, load_model, read_camera_cfg, read_ppm, save_model, write_atomic, write_pbm, write_pgm, DataError,
};
use crate::evaluation::{
    classification_accuracy, operating_point, roc_below_horizon, EvalError, RocInput,
};
use crate::features::{extract_features, CHANNEL_NAMES};
use crate::forest::ForestParams;
use crate::geometry::{column_distances, horizon_field, Attitude, ColumnDistance, GeometryError};
use crate::pipeline::{
    obstacle_map, probability_map_from_features, spatial_filter, split_dataset, threshold_map, train_on_frames,
    uncertainty_map, PipelineConfig, PipelineError,
};
use crate::synthgen::{default_intrinsics, generate_dataset, SceneSpec, SynthError, Variation};

/// Seed used when `--seed` is not given.
pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Parser)]
#[command(name = "hobs", version, about = "Obstacle detection from horizon self-supervision")]
pub struct Cli {
    /// Seed for every random choice: synthesis, sampling, forest and split.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Render a synthetic dataset.
    Synth(SynthArgs),
    /// Train a model on a dataset's training split.
    Train(TrainArgs),
    /// Classification, uncertainty and obstacle maps for one image.
    Predict(PredictArgs),
    /// Below-horizon ROC on a dataset's test split.
    Evaluate(EvaluateArgs),
    /// Per-column obstacle distances for one image.
    Distances(DistancesArgs),
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 60)]
    pub frames: usize,
    /// Standard deviation (radians) of noise added to the recorded attitude.
    #[arg(long)]
    pub jitter: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SplitArgs {
    /// Fraction of frames used for training; the rest form the test split.
    #[arg(long, default_value_t = 0.9)]
    pub train_fraction: f64,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long, default_value_t = 20)]
    pub trees: usize,
    #[arg(long, default_value_t = 10)]
    pub min_leaf: usize,
    #[arg(long, default_value_t = 4)]
    pub features_per_split: usize,
    #[arg(long, default_value_t = 1000)]
    pub samples_per_frame: usize,
    #[command(flatten)]
    pub split: SplitArgs,
    /// Percentile of training entropies used as the obstacle threshold.
    #[arg(long, default_value_t = 25.0)]
    pub percentile: f64,
}

#[derive(Debug, Args)]
pub struct AttitudeArgs {
    /// Roll in radians.
    #[arg(long, allow_negative_numbers = true)]
    pub roll: f64,
    /// Pitch in radians, positive tilts the camera up.
    #[arg(long, allow_negative_numbers = true)]
    pub pitch: f64,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub image: PathBuf,
    #[command(flatten)]
    pub attitude: AttitudeArgs,
    /// Writes PFX.class.pbm, PFX.uncert.pgm and PFX.obst.pbm.
    #[arg(long)]
    pub out_prefix: PathBuf,
    /// Entropy threshold; defaults to the model's calibrated value.
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Camera file; when given, the number of obstacle pixels below the
    /// horizon is reported as well.
    #[arg(long)]
    pub camera: Option<PathBuf>,
    /// Also write one normalized graymap per feature channel into this directory.
    #[arg(long)]
    pub dump_features: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub roc: PathBuf,
    #[command(flatten)]
    pub split: SplitArgs,
    /// Also report the false and true positive rates at this entropy threshold.
    #[arg(long)]
    pub op_threshold: Option<f64>,
}

#[derive(Debug, Args)]
pub struct DistancesArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub image: PathBuf,
    #[command(flatten)]
    pub attitude: AttitudeArgs,
    /// Camera height above the ground, meters.
    #[arg(long)]
    pub height: f64,
    /// Camera file (`camera.cfg` format) with the image's intrinsics.
    #[arg(long)]
    pub camera: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Synth(#[from] SynthError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("{0}")]
    Other(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            _ => 2,
        }
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn attitude(a: &AttitudeArgs) -> Result<Attitude, CliError> {
    Attitude::new(a.roll, a.pitch).map_err(|e| usage(e.to_string()))
}

fn pipeline_config(seed: u64, args: &TrainArgs) -> Result<PipelineConfig, CliError> {
    let cfg = PipelineConfig {
        forest: ForestParams {
            n_trees: args.trees,
            min_samples_leaf: args.min_leaf,
            features_per_split: args.features_per_split,
            seed,
        },
        samples_per_frame: args.samples_per_frame,
        train_fraction: args.split.train_fraction,
        threshold_percentile: args.percentile,
        split_seed: seed,
        horizon_band: 0.0,
    };
    cfg.validate().map_err(|e| usage(e.to_string()))?;
    Ok(cfg)
}

fn check_fraction(f: f64) -> Result<(), CliError> {
    if f > 0.0 && f < 1.0 {
        Ok(())
    } else {
        Err(usage(format!("--train-fraction must be in (0, 1), got {f}")))
    }
}

fn check_threshold(flag: &str, t: f64) -> Result<(), CliError> {
    if (0.0..=1.0).contains(&t) {
        Ok(())
    } else {
        Err(usage(format!("{flag} must be in [0, 1], got {t}")))
    }
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn synth(seed: u64, args: &SynthArgs, out: &mut dyn Write) -> Result<(), CliError> {
    if args.frames < 2 {
        return Err(usage(format!("--frames must be at least 2, got {}", args.frames)));
    }
    if let Some(j) = args.jitter {
        if !(j.is_finite() && j >= 0.0) {
            return Err(usage(format!("--jitter must be non-negative, got {j}")));
        }
    }
    let base = SceneSpec { attitude_jitter: args.jitter, ..SceneSpec::default() };
    let k = default_intrinsics();
    generate_dataset(&args.out, args.frames, &base, &Variation::default(), seed, &k)?;
    writeln!(out, "frames={}", args.frames).ok();
    writeln!(out, "out={}", args.out.display()).ok();
    Ok(())
}

fn train(seed: u64, args: &TrainArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let cfg = pipeline_config(seed, args)?;
    let ds = load_dataset(&args.data)?;
    let (train, test) = split_dataset(&ds.frames, cfg.train_fraction, cfg.split_seed)?;
    let model = train_on_frames(&train, &ds.intrinsics, &cfg)?;
    save_model(&model, &args.model)?;
    let accuracy = classification_accuracy(&model, &test, &ds.intrinsics)?;
    writeln!(out, "train_frames={}", train.len()).ok();
    writeln!(out, "test_frames={}", test.len()).ok();
    writeln!(out, "accuracy={accuracy}").ok();
    writeln!(out, "threshold={}", model.entropy_threshold()).ok();
    Ok(())
}

fn predict(args: &PredictArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let att = attitude(&args.attitude)?;
    if let Some(t) = args.threshold {
        check_threshold("--threshold", t)?;
    }
    let model = load_model(&args.model)?;
    let image = read_ppm(&args.image)?;
    let features = extract_features(&image).map_err(PipelineError::from)?;
    let probs = probability_map_from_features(&model, &features);
    let unc = probs.uncertainty();
    let threshold = args.threshold.unwrap_or(model.entropy_threshold());
    let obst = spatial_filter(&threshold_map(&unc, threshold)?);

    write_pbm(&with_suffix(&args.out_prefix, ".class.pbm"), &probs.classification_bitmap())?;
    write_pgm(&with_suffix(&args.out_prefix, ".uncert.pgm"), &unc.to_gray())?;
    write_pbm(&with_suffix(&args.out_prefix, ".obst.pbm"), &obst.to_bitmap())?;
    if let Some(dir) = &args.dump_features {
        std::fs::create_dir_all(dir).map_err(|source| DataError::Io { path: dir.clone(), source })?;
        for (name, img) in CHANNEL_NAMES.iter().zip(features.channel_images()) {
            write_pgm(&dir.join(format!("{name}.pgm")), &img)?;
        }
    }
    writeln!(out, "threshold={threshold}").ok();
    writeln!(out, "obstacle_pixels={}", obst.count()).ok();
    if let Some(cam) = &args.camera {
        let k = read_camera_cfg(cam)?;
        if (k.width, k.height) != (image.width(), image.height()) {
            return Err(CliError::Other(format!(
                "image is {}x{} but the camera is {}x{}",
                image.width(),
                image.height(),
                k.width,
                k.height
            )));
        }
        let field = horizon_field(&k, &att);
        let below = (0..obst.values().len())
            .filter(|&i| obst.values()[i] && field.label_at(i) == crate::geometry::Label::Below)
            .count();
        writeln!(out, "obstacle_pixels_below_horizon={below}").ok();
    }
    Ok(())
}

fn evaluate(seed: u64, args: &EvaluateArgs, out: &mut dyn Write) -> Result<(), CliError> {
    check_fraction(args.split.train_fraction)?;
    if let Some(t) = args.op_threshold {
        check_threshold("--op-threshold", t)?;
    }
    let model = load_model(&args.model)?;
    let ds = load_dataset(&args.data)?;
    let (_, test) = split_dataset(&ds.frames, args.split.train_fraction, seed)?;
    if let Some(f) = test.iter().find(|f| f.gt_mask.is_none()) {
        return Err(CliError::Other(format!(
            "frame {} has no ground-truth mask; evaluation needs masks for every test frame",
            f.frame_id
        )));
    }
    let maps = test
        .iter()
        .map(|f| Ok((uncertainty_map(&model, &f.image)?, horizon_field(&ds.intrinsics, &f.attitude))))
        .collect::<Result<Vec<_>, PipelineError>>()?;
    let inputs: Vec<RocInput> = maps
        .iter()
        .zip(&test)
        .map(|((u, field), f)| RocInput { uncertainty: u, mask: f.gt_mask.as_ref().expect("checked"), field })
        .collect();
    let curve = roc_below_horizon(&inputs)?;
    write_atomic(&args.roc, curve.to_csv().as_bytes())?;
    writeln!(out, "test_frames={}", test.len()).ok();
    writeln!(out, "auc={}", curve.auc()).ok();
    if let Some(t) = args.op_threshold {
        let (fpr, tpr) = operating_point(&curve, t);
        writeln!(out, "op_threshold={t}").ok();
        writeln!(out, "fpr={fpr}").ok();
        writeln!(out, "tpr={tpr}").ok();
    }
    Ok(())
}

/// `column,distance_m` rows, `inf` for free columns.
pub fn distances_csv(cols: &[ColumnDistance]) -> String {
    let mut s = String::from("column,distance_m\n");
    for (u, d) in cols.iter().enumerate() {
        match d {
            ColumnDistance::Free => s.push_str(&format!("{u},inf\n")),
            ColumnDistance::Obstacle(m) => s.push_str(&format!("{u},{m}\n")),
        }
    }
    s
}

fn distances(args: &DistancesArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let att = attitude(&args.attitude)?;
    if !(args.height.is_finite() && args.height > 0.0) {
        return Err(usage(format!("--height must be positive, got {}", args.height)));
    }
    let k = read_camera_cfg(&args.camera)?;
    let model = load_model(&args.model)?;
    let image = read_ppm(&args.image)?;
    if (k.width, k.height) != (image.width(), image.height()) {
        return Err(CliError::Other(format!(
            "image is {}x{} but the camera is {}x{}",
            image.width(),
            image.height(),
            k.width,
            k.height
        )));
    }
    let obst = obstacle_map(&model, &uncertainty_map(&model, &image)?)?;
    let cols = column_distances(&obst, &horizon_field(&k, &att), args.height)?;
    write_atomic(&args.out, distances_csv(&cols).as_bytes())?;
    let blocked = cols.iter().filter(|c| matches!(c, ColumnDistance::Obstacle(_))).count();
    writeln!(out, "blocked_columns={blocked}").ok();
    Ok(())
}

/// Executes a parsed command, writing key=value results to `out`.
pub fn execute(cli: &Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match &cli.command {
        Command::Synth(a) => synth(cli.seed, a, out),
        Command::Train(a) => train(cli.seed, a, out),
        Command::Predict(a) => predict(a, out),
        Command::Evaluate(a) => evaluate(cli.seed, a, out),
        Command::Distances(a) => distances(a, out),
    }
}

/// Parses `args` (including the program name) and runs; returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            if code == 0 {
                write!(out, "{text}").ok();
            } else {
                write!(err, "{text}").ok();
            }
            return code;
        }
    };
    match execute(&cli, out) {
        Ok(()) => 0,
        Err(e) => {
            writeln!(err, "error: {e}").ok();
            e.exit_code()
        }
    }
}

pub fn main() -> i32 {
    run(std::env::args_os(), &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}
