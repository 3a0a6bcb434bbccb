//! Build ROC curves from scores: a small hand-checked case, then the
//! below-horizon curve of a model on synthetic test frames.
//!
//! Run with `cargo run --release --example roc_evaluation [roc.csv]`.

use hobs::evaluation::{auc_oracle, operating_point, roc_below_horizon, roc_from_scores, RocInput};
use hobs::geometry::horizon_field;
use hobs::pipeline::{split_dataset, train_on_frames, uncertainty_map, PipelineConfig};
use hobs::synthgen::{default_intrinsics, generate_frames, SceneSpec, Variation};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::env::args().nth(1).map(Into::into).unwrap_or_else(|| std::env::temp_dir().join("hobs_roc.csv"));

    let curve = roc_from_scores(&[0.9, 0.7, 0.4], &[0.8, 0.4, 0.1, 0.05])?;
    println!("toy curve: auc={} (pairwise {})", curve.auc(), auc_oracle(&[0.9, 0.7, 0.4], &[0.8, 0.4, 0.1, 0.05])?);
    for p in curve.points() {
        println!("  threshold {:>5} fpr {:.2} tpr {:.2}", p.threshold, p.fpr, p.tpr);
    }

    let k = default_intrinsics();
    let frames = generate_frames(30, &SceneSpec::default(), &Variation::default(), 4, &k)?;
    let cfg = PipelineConfig::default();
    let (train, test) = split_dataset(&frames, cfg.train_fraction, cfg.split_seed)?;
    let model = train_on_frames(&train, &k, &cfg)?;
    let maps = test
        .iter()
        .map(|f| Ok((uncertainty_map(&model, &f.image)?, horizon_field(&k, &f.attitude))))
        .collect::<Result<Vec<_>, hobs::pipeline::PipelineError>>()?;
    let inputs: Vec<RocInput> = maps
        .iter()
        .zip(&test)
        .map(|((u, field), f)| RocInput { uncertainty: u, mask: f.gt_mask.as_ref().expect("synthetic"), field })
        .collect();
    let roc = roc_below_horizon(&inputs)?;
    let (fpr, tpr) = operating_point(&roc, 0.64);
    println!("synthetic test split: auc={:.4}, at entropy 0.64 fpr={fpr:.3} tpr={tpr:.3}", roc.auc());
    std::fs::write(&out, roc.to_csv())?;
    println!("{} curve points written to {}", roc.points().len(), out.display());
    Ok(())
}
