//! Place one obstacle a known distance ahead, detect it with a trained model
//! and recover per-column distances from the flat-ground assumption.
//!
//! Run with `cargo run --release --example column_distances [distance_m]`.

use hobs::geometry::{column_distances, horizon_field, ColumnDistance};
use hobs::pipeline::{obstacle_map, train_pipeline, uncertainty_map, PipelineConfig};
use hobs::synthgen::{default_intrinsics, generate_frames, render_scene, Obstacle, SceneSpec, Variation, PALETTE};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let distance: f64 = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(3.0);
    let k = default_intrinsics();
    let frames = generate_frames(60, &SceneSpec::default(), &Variation::default(), 7, &k)?;
    // denser sampling than the default keeps stray floor detections rare
    let cfg = PipelineConfig { samples_per_frame: 4000, ..PipelineConfig::default() };
    let model = train_pipeline(&frames, &k, &cfg)?;

    let scene = SceneSpec {
        obstacles: vec![Obstacle { x: 0.0, z: distance, width: 1.0, height: 2.0, color: PALETTE[0], texture: 0.05 }],
        seed: 99,
        ..SceneSpec::default()
    };
    let frame = render_scene(&scene, &k)?.into_frame("probe");
    let unc = uncertainty_map(&model, &frame.image)?;
    let obstacles = obstacle_map(&model, &unc)?;
    let field = horizon_field(&k, &frame.attitude);
    let cols = column_distances(&obstacles, &field, scene.camera_height)?;

    println!("{} obstacle pixels after filtering", obstacles.count());
    for (u, d) in cols.iter().enumerate().step_by(8) {
        match d {
            ColumnDistance::Free => println!("column {u:3}: free"),
            ColumnDistance::Obstacle(m) => println!("column {u:3}: {m:.3} m"),
        }
    }
    Ok(())
}
