//! Drives the `hobs` binary through every subcommand.

use std::path::Path;
use std::process::{Command, Output};

use hobs::datasetio::{read_pbm, read_pgm, write_ppm};
use hobs::synthgen::{default_intrinsics, render_scene, Obstacle, SceneSpec, PALETTE};

fn hobs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hobs")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn value(o: &Output, key: &str) -> String {
    stdout(o)
        .lines()
        .find_map(|l| l.strip_prefix(&format!("{key}=")).map(str::to_string))
        .unwrap_or_else(|| panic!("no {key} in {}", stdout(o)))
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn synth_train_predict_evaluate_distances() {
    let tmp = tempfile::tempdir().unwrap();
    let data = tmp.path().join("data");
    let model = tmp.path().join("model.txt");

    let o = hobs(&["synth", "--out", s(&data), "--frames", "8", "--seed", "7"]);
    assert!(o.status.success(), "{o:?}");
    assert!(data.join("camera.cfg").is_file());
    assert_eq!(std::fs::read_dir(data.join("images")).unwrap().count(), 8);

    let o = hobs(&["train", "--data", s(&data), "--model", s(&model), "--trees", "5", "--samples-per-frame", "400"]);
    assert!(o.status.success(), "{o:?}");
    let accuracy: f64 = value(&o, "accuracy").parse().unwrap();
    assert!((0.0..=1.0).contains(&accuracy));
    let threshold: f64 = value(&o, "threshold").parse().unwrap();
    assert!((0.0..=1.0).contains(&threshold));
    assert!(std::fs::read_to_string(&model).unwrap().starts_with("HOBS 1\n"));

    // predict on a fresh scene
    let k = default_intrinsics();
    let scene = SceneSpec {
        obstacles: vec![Obstacle { x: 0.0, z: 3.0, width: 1.0, height: 2.0, color: PALETTE[2], texture: 0.05 }],
        ..SceneSpec::default()
    };
    let image = tmp.path().join("scene.ppm");
    write_ppm(&image, &render_scene(&scene, &k).unwrap().image).unwrap();
    let pfx = tmp.path().join("out/scene");
    std::fs::create_dir_all(pfx.parent().unwrap()).unwrap();
    let feats = tmp.path().join("features");
    let o = hobs(&[
        "predict", "--model", s(&model), "--image", s(&image), "--roll", "0", "--pitch", "-0.0",
        "--out-prefix", s(&pfx), "--dump-features", s(&feats),
    ]);
    assert!(o.status.success(), "{o:?}");
    let class = read_pbm(&tmp.path().join("out/scene.class.pbm")).unwrap();
    let unc = read_pgm(&tmp.path().join("out/scene.uncert.pgm")).unwrap();
    let obst = read_pbm(&tmp.path().join("out/scene.obst.pbm")).unwrap();
    for (w, h) in [(class.width(), class.height()), (unc.width(), unc.height()), (obst.width(), obst.height())] {
        assert_eq!((w, h), (320, 240));
    }
    assert_eq!(std::fs::read_dir(&feats).unwrap().count(), 13);

    let o = hobs(&[
        "predict", "--model", s(&model), "--image", s(&image), "--roll", "0", "--pitch", "0",
        "--out-prefix", s(&pfx), "--threshold", "1.0",
    ]);
    assert!(o.status.success());
    let obst = read_pbm(&tmp.path().join("out/scene.obst.pbm")).unwrap();
    assert!(obst.pixels().iter().all(|&b| !b));

    let roc = tmp.path().join("roc.csv");
    let o = hobs(&["evaluate", "--model", s(&model), "--data", s(&data), "--roc", s(&roc), "--op-threshold", "0.64"]);
    assert!(o.status.success(), "{o:?}");
    let auc: f64 = value(&o, "auc").parse().unwrap();
    assert!((0.0..=1.0).contains(&auc));
    let fpr: f64 = value(&o, "fpr").parse().unwrap();
    let tpr: f64 = value(&o, "tpr").parse().unwrap();
    assert!((0.0..=1.0).contains(&fpr) && (0.0..=1.0).contains(&tpr));
    let text = std::fs::read_to_string(&roc).unwrap();
    let rows: Vec<(f64, f64)> = text
        .lines()
        .skip(1)
        .filter(|l| !l.starts_with('#'))
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[1].parse().unwrap(), f[2].parse().unwrap())
        })
        .collect();
    assert_eq!(rows.first(), Some(&(0.0, 0.0)));
    assert_eq!(rows.last(), Some(&(1.0, 1.0)));
    assert!(rows.windows(2).all(|w| w[0].0 <= w[1].0 && w[0].1 <= w[1].1));

    let cam = data.join("camera.cfg");
    let dist = tmp.path().join("dist.csv");
    let o = hobs(&[
        "distances", "--model", s(&model), "--image", s(&image), "--roll", "0", "--pitch", "0",
        "--height", "1", "--camera", s(&cam), "--out", s(&dist),
    ]);
    assert!(o.status.success(), "{o:?}");
    let text = std::fs::read_to_string(&dist).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("column,distance_m"));
    let body: Vec<&str> = lines.collect();
    assert_eq!(body.len(), 320);
    for (u, l) in body.iter().enumerate() {
        let (c, d) = l.split_once(',').unwrap();
        assert_eq!(c.parse::<usize>().unwrap(), u);
        assert!(d == "inf" || d.parse::<f64>().unwrap() > 0.0);
    }

    let o = hobs(&[
        "distances", "--model", s(&model), "--image", s(&image), "--roll", "0", "--pitch", "0",
        "--height", "0", "--camera", s(&cam), "--out", s(&dist),
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn synth_is_repeatable() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for d in [&a, &b] {
        assert!(hobs(&["synth", "--out", s(d), "--frames", "3", "--seed", "7", "--jitter", "0.01"]).status.success());
    }
    for rel in ["camera.cfg", "frames.csv", "images/frame_0001.ppm", "masks/frame_0002.pgm"] {
        assert_eq!(std::fs::read(a.join(rel)).unwrap(), std::fs::read(b.join(rel)).unwrap(), "{rel}");
    }
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("x");
    assert_eq!(hobs(&["synth", "--out", s(&out), "--frames", "1"]).status.code(), Some(1));
    assert_eq!(hobs(&["train", "--model", s(&out)]).status.code(), Some(1));
    assert_eq!(hobs(&["--help"]).status.code(), Some(0));

    let corrupt = tmp.path().join("model.txt");
    std::fs::write(&corrupt, "HOBS 1\nn_trees 2\n").unwrap();
    let image = tmp.path().join("i.ppm");
    write_ppm(&image, &hobs::raster::RgbImage::new(4, 4)).unwrap();
    let o = hobs(&[
        "predict", "--model", s(&corrupt), "--image", s(&image), "--roll", "0", "--pitch", "0",
        "--out-prefix", s(&out),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("model.txt"));
}

#[test]
fn evaluate_needs_masks() {
    let tmp = tempfile::tempdir().unwrap();
    let data = tmp.path().join("data");
    assert!(hobs(&["synth", "--out", s(&data), "--frames", "4"]).status.success());
    let model = tmp.path().join("m.txt");
    assert!(hobs(&["train", "--data", s(&data), "--model", s(&model), "--trees", "2", "--samples-per-frame", "200"])
        .status
        .success());
    let csv = std::fs::read_to_string(data.join("frames.csv")).unwrap();
    let stripped: String = csv
        .lines()
        .map(|l| if l.starts_with("frame_id") { l.to_string() } else { l.rsplit_once(',').unwrap().0.to_string() + "," })
        .collect::<Vec<_>>()
        .join("\n");
    std::fs::write(data.join("frames.csv"), stripped).unwrap();
    let o = hobs(&["evaluate", "--model", s(&model), "--data", s(&data), "--roc", s(&tmp.path().join("r.csv"))]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("mask"));
}
