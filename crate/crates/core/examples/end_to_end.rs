//! Synthesize a dataset, train on its training split and report test-split
//! metrics: below-horizon ROC AUC, above/below accuracy and per-class entropy.
//!
//! Run with `cargo run --release --example end_to_end [frames] [seed]`.

use hobs::evaluation::{classification_accuracy, entropy_by_class, roc_below_horizon, RocInput};
use hobs::geometry::horizon_field;
use hobs::pipeline::{split_dataset, train_on_frames, uncertainty_map, PipelineConfig};
use hobs::synthgen::{default_intrinsics, generate_frames, SceneSpec, Variation};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(60);
    let seed: u64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(7);

    let k = default_intrinsics();
    let t0 = std::time::Instant::now();
    let frames = generate_frames(n, &SceneSpec::default(), &Variation::default(), seed, &k)?;
    println!("rendered {n} frames in {:.2?}", t0.elapsed());

    let cfg = PipelineConfig::default();
    let (train, test) = split_dataset(&frames, cfg.train_fraction, cfg.split_seed)?;
    let t0 = std::time::Instant::now();
    let model = train_on_frames(&train, &k, &cfg)?;
    println!("trained on {} frames in {:.2?}", train.len(), t0.elapsed());
    println!("entropy_threshold={}", model.entropy_threshold());

    let maps = test
        .iter()
        .map(|f| Ok((uncertainty_map(&model, &f.image)?, horizon_field(&k, &f.attitude))))
        .collect::<Result<Vec<_>, hobs::pipeline::PipelineError>>()?;
    let inputs: Vec<RocInput> = maps
        .iter()
        .zip(&test)
        .map(|((u, field), f)| RocInput { uncertainty: u, mask: f.gt_mask.as_ref().unwrap(), field })
        .collect();
    let roc = roc_below_horizon(&inputs)?;
    println!("auc={:.4}", roc.auc());
    println!("accuracy={:.4}", classification_accuracy(&model, &test, &k)?);
    let pairs: Vec<_> = maps.iter().zip(&test).map(|((u, _), f)| (u, f.gt_mask.as_ref().unwrap())).collect();
    let by_class = entropy_by_class(&pairs)?;
    println!(
        "mean_entropy obstacle={:.4} floor={:.4} ({} / {} pixels)",
        by_class.obstacle_mean, by_class.floor_mean, by_class.obstacle_pixels, by_class.floor_pixels
    );
    Ok(())
}
