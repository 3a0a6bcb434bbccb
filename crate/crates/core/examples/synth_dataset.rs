//! Write a synthetic dataset directory and load it back.
//!
//! Run with `cargo run --release --example synth_dataset [out_dir] [frames]`.

use hobs::datasetio::load_dataset;
use hobs::evaluation::MaskClass;
use hobs::synthgen::{default_intrinsics, generate_dataset, SceneSpec, Variation};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let dir = args.next().map(Into::into).unwrap_or_else(|| std::env::temp_dir().join("hobs_synth"));
    let n: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(10);

    let base = SceneSpec { attitude_jitter: Some(0.005), ..SceneSpec::default() };
    generate_dataset(&dir, n, &base, &Variation::default(), 7, &default_intrinsics())?;

    let ds = load_dataset(&dir)?;
    println!("{} frames of {}x{} in {}", ds.frames.len(), ds.intrinsics.width, ds.intrinsics.height, dir.display());
    for f in ds.frames.iter().take(5) {
        let mask = f.gt_mask.as_ref().expect("synthetic frames carry masks");
        println!(
            "  {}: roll {:+.4} pitch {:+.4}, {} obstacle / {} floor pixels",
            f.frame_id,
            f.attitude.roll(),
            f.attitude.pitch(),
            mask.count(MaskClass::Obstacle),
            mask.count(MaskClass::Floor)
        );
    }
    Ok(())
}
