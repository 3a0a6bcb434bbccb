//! Project the horizon for a given roll and pitch, print where it crosses a
//! few columns, and write the above/below label map as a bitmap.
//!
//! Run with `cargo run --example horizon_labels [roll_rad] [pitch_rad] [out.pbm]`.

use hobs::datasetio::write_pbm;
use hobs::geometry::{ground_distance, horizon_field, Attitude, Label};
use hobs::raster::BitImage;
use hobs::synthgen::default_intrinsics;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let roll: f64 = args.first().map(|s| s.parse()).transpose()?.unwrap_or(0.15);
    let pitch: f64 = args.get(1).map(|s| s.parse()).transpose()?.unwrap_or(-0.05);
    let out = args.get(2).map(Into::into).unwrap_or_else(|| std::env::temp_dir().join("horizon_labels.pbm"));

    let k = default_intrinsics();
    let field = horizon_field(&k, &Attitude::new(roll, pitch)?);
    println!("roll={roll} pitch={pitch} on a {}x{} camera", k.width, k.height);
    for u in [0.0, k.cx, (k.width - 1) as f64] {
        match field.horizon_row(u) {
            Some(v) => println!("  column {u:5.1}: horizon at row {v:.2}"),
            None => println!("  column {u:5.1}: horizon is vertical"),
        }
    }

    let labels = field.labels();
    let below = labels.iter().filter(|&&l| l == Label::Below).count();
    println!("{below} of {} pixels lie below the horizon", labels.len());

    // a camera 1 m above flat ground sees the bottom-center pixel this far away
    let e = field.elevation(k.width / 2, k.height - 1);
    if let Some(d) = ground_distance(e, 1.0)? {
        println!("bottom-center pixel: elevation {e:.4} rad, ground {d:.2} m away");
    }

    // set bits (black) mark the ground side
    let bits = BitImage::from_pixels(k.width, k.height, labels.iter().map(|&l| l == Label::Below).collect());
    write_pbm(&out, &bits)?;
    println!("label map written to {}", out.display());
    Ok(())
}
