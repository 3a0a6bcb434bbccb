//! Train the random forest on hand-made samples, query probabilities and
//! entropies, and round-trip the model through its text format.
//!
//! Run with `cargo run --release --example train_forest`.

use hobs::datasetio::{decode_model, encode_model};
use hobs::features::{FeatureVector, HUE, N_FEATURES, VALUE};
use hobs::forest::{train_forest, ForestParams, Sample};
use hobs::geometry::Label;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn pixel(hue: f64, value: f64) -> FeatureVector {
    let mut f = [0.0; N_FEATURES];
    f[HUE] = hue;
    f[VALUE] = value;
    f
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut samples = Vec::new();
    for _ in 0..400 {
        // blue sky above, green floor below, red obstacles on both sides
        samples.push(Sample { features: pixel(0.6 + 0.02 * rng.random::<f64>(), 0.9), label: Label::Above });
        samples.push(Sample { features: pixel(0.3 + 0.02 * rng.random::<f64>(), 0.5), label: Label::Below });
        let label = if rng.random_bool(0.5) { Label::Above } else { Label::Below };
        samples.push(Sample { features: pixel(0.02 * rng.random::<f64>(), 0.7), label });
    }

    // only hue and value carry signal, so a tree that never draws either stays a single leaf
    let model = train_forest(&samples, &ForestParams { seed: 1, ..ForestParams::default() })?;
    let nodes: usize = model.trees().iter().map(|t| t.nodes().len()).sum();
    println!("{} trees, {nodes} nodes in total", model.trees().len());
    for (name, x) in [("sky", pixel(0.61, 0.9)), ("floor", pixel(0.31, 0.5)), ("obstacle", pixel(0.01, 0.7))] {
        println!(
            "{name:>8}: p_below={:.3} entropy={:.3} label={:?}",
            model.predict_p_below(&x),
            model.predict_entropy(&x),
            model.predict_label(&x)
        );
    }

    let text = encode_model(&model);
    let back = decode_model(&text)?;
    assert_eq!(back, model);
    println!("model text is {} bytes and decodes to an identical forest", text.len());
    Ok(())
}
