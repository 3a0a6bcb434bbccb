//! Train on synthetic frames, then produce the classification, uncertainty
//! and filtered obstacle maps for a new scene.
//!
//! Run with `cargo run --release --example obstacle_maps [out_dir]`.

use hobs::datasetio::{write_pbm, write_pgm, write_ppm};
use hobs::pipeline::{probability_map, spatial_filter, threshold_map, train_pipeline, PipelineConfig};
use hobs::synthgen::{default_intrinsics, generate_frames, render_scene, Obstacle, SceneSpec, Variation, PALETTE};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::args().nth(1).map(Into::into).unwrap_or_else(|| std::env::temp_dir().join("hobs_maps"));
    std::fs::create_dir_all(&dir)?;

    let k = default_intrinsics();
    let frames = generate_frames(30, &SceneSpec::default(), &Variation::default(), 11, &k)?;
    let model = train_pipeline(&frames, &k, &PipelineConfig::default())?;
    println!("calibrated entropy threshold: {}", model.entropy_threshold());

    let scene = SceneSpec {
        obstacles: vec![
            Obstacle { x: -0.8, z: 4.0, width: 0.7, height: 1.8, color: PALETTE[1], texture: 0.05 },
            Obstacle { x: 1.2, z: 7.0, width: 0.9, height: 2.2, color: PALETTE[4], texture: 0.05 },
        ],
        seed: 77,
        ..SceneSpec::default()
    };
    let rendered = render_scene(&scene, &k)?;
    write_ppm(&dir.join("scene.ppm"), &rendered.image)?;

    let probs = probability_map(&model, &rendered.image)?;
    let unc = probs.uncertainty();
    let raw = threshold_map(&unc, model.entropy_threshold())?;
    let filtered = spatial_filter(&raw);
    println!("obstacle pixels: {} before filtering, {} after", raw.count(), filtered.count());

    write_pbm(&dir.join("scene.class.pbm"), &probs.classification_bitmap())?;
    write_pgm(&dir.join("scene.uncert.pgm"), &unc.to_gray())?;
    write_pbm(&dir.join("scene.obst.pbm"), &filtered.to_bitmap())?;
    println!("maps written to {}", dir.display());
    Ok(())
}
