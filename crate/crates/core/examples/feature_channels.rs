//! Render a scene, compute the 13 per-pixel feature channels and write each
//! one as a normalized graymap.
//!
//! Run with `cargo run --release --example feature_channels [out_dir]`.

use hobs::datasetio::{write_pgm, write_ppm};
use hobs::features::{extract_features, CHANNEL_NAMES, N_FEATURES};
use hobs::synthgen::{default_intrinsics, render_scene, Obstacle, SceneSpec, PALETTE};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::args().nth(1).map(Into::into).unwrap_or_else(|| std::env::temp_dir().join("hobs_features"));
    std::fs::create_dir_all(&dir)?;

    let scene = SceneSpec {
        obstacles: vec![
            Obstacle { x: -1.0, z: 5.0, width: 0.8, height: 2.0, color: PALETTE[0], texture: 0.05 },
            Obstacle { x: 1.5, z: 8.0, width: 1.0, height: 1.6, color: PALETTE[3], texture: 0.05 },
        ],
        seed: 3,
        ..SceneSpec::default()
    };
    let image = render_scene(&scene, &default_intrinsics())?.image;
    write_ppm(&dir.join("scene.ppm"), &image)?;

    let t0 = std::time::Instant::now();
    let features = extract_features(&image)?;
    println!("extracted {N_FEATURES} channels for {}x{} pixels in {:.2?}", image.width(), image.height(), t0.elapsed());

    let center = features.get(image.width() / 2, image.height() - 20);
    for (name, (value, img)) in CHANNEL_NAMES.iter().zip(center.iter().zip(features.channel_images())) {
        write_pgm(&dir.join(format!("{name}.pgm")), &img)?;
        println!("  {name:>6}: {value:+.4} at a floor pixel");
    }
    println!("graymaps written to {}", dir.display());
    Ok(())
}
