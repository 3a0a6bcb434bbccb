//! Text serialization of trained forests.
//!
//! ```text
//! HOBS 1
//! n_trees 20
//! min_samples_leaf 10
//! features_per_split 4
//! seed 42
//! entropy_threshold 0.0123
//! tree <node count>
//! I <feature> <threshold>      internal node, preorder
//! L <count_above> <count_below>  leaf
//! ...
//! end
//! ```
//!
//! Reals are written in shortest round-trip form, so a saved model predicts
//! bit-identically after loading.

use std::fmt::Write as _;
use std::path::Path;

use thiserror::Error;

use super::{read_file, write_atomic, DataError};
use crate::forest::{ForestError, ForestParams, RandomForestModel, Tree, TreeNode};

pub const FORMAT_TAG: &str = "HOBS";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error, PartialEq)]
pub enum ModelFormatError {
    #[error("not a model file (expected tag {FORMAT_TAG})")]
    BadTag,
    #[error("unsupported model version {0} (this build reads version {FORMAT_VERSION})")]
    UnsupportedVersion(String),
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("file ends early: {0}")]
    Truncated(String),
    #[error(transparent)]
    Forest(#[from] ForestError),
}

pub fn encode_model(model: &RandomForestModel) -> String {
    let p = model.params();
    let mut out = String::new();
    writeln!(out, "{FORMAT_TAG} {FORMAT_VERSION}").unwrap();
    writeln!(out, "n_trees {}", p.n_trees).unwrap();
    writeln!(out, "min_samples_leaf {}", p.min_samples_leaf).unwrap();
    writeln!(out, "features_per_split {}", p.features_per_split).unwrap();
    writeln!(out, "seed {}", p.seed).unwrap();
    writeln!(out, "entropy_threshold {}", model.entropy_threshold()).unwrap();
    for tree in model.trees() {
        writeln!(out, "tree {}", tree.nodes().len()).unwrap();
        for node in tree.nodes() {
            match node {
                TreeNode::Internal { feature, threshold, .. } => {
                    writeln!(out, "I {feature} {threshold}").unwrap()
                }
                TreeNode::Leaf { count_above, count_below } => {
                    writeln!(out, "L {count_above} {count_below}").unwrap()
                }
            }
        }
    }
    out.push_str("end\n");
    out
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    fn next(&mut self, expecting: &str) -> Result<(usize, Vec<&'a str>), ModelFormatError> {
        match self.inner.next() {
            Some((i, line)) => {
                self.last = i + 1;
                Ok((i + 1, line.split_whitespace().collect()))
            }
            None => Err(ModelFormatError::Truncated(format!("expected {expecting}"))),
        }
    }

    fn keyed<T: std::str::FromStr>(&mut self, key: &str) -> Result<T, ModelFormatError> {
        let (line, parts) = self.next(key)?;
        match parts.as_slice() {
            [k, v] if *k == key => v.parse().map_err(|_| ModelFormatError::Malformed {
                line,
                msg: format!("bad value {v:?} for {key}"),
            }),
            _ => Err(ModelFormatError::Malformed { line, msg: format!("expected `{key} <value>`") }),
        }
    }
}

fn parse<T: std::str::FromStr>(s: &str, line: usize, what: &str) -> Result<T, ModelFormatError> {
    s.parse().map_err(|_| ModelFormatError::Malformed { line, msg: format!("bad {what} {s:?}") })
}

pub fn decode_model(text: &str) -> Result<RandomForestModel, ModelFormatError> {
    let mut lines = Lines { inner: text.lines().enumerate(), last: 0 };
    let (_, header) = lines.next("header").map_err(|_| ModelFormatError::BadTag)?;
    match header.as_slice() {
        [tag, version] if *tag == FORMAT_TAG => {
            if version.parse::<u32>().ok() != Some(FORMAT_VERSION) {
                return Err(ModelFormatError::UnsupportedVersion(version.to_string()));
            }
        }
        [tag, ..] if *tag == FORMAT_TAG => {
            return Err(ModelFormatError::UnsupportedVersion(String::new()));
        }
        _ => return Err(ModelFormatError::BadTag),
    }

    let params = ForestParams {
        n_trees: lines.keyed("n_trees")?,
        min_samples_leaf: lines.keyed("min_samples_leaf")?,
        features_per_split: lines.keyed("features_per_split")?,
        seed: lines.keyed("seed")?,
    };
    params.validate()?;
    let threshold: f64 = lines.keyed("entropy_threshold")?;

    let mut trees = Vec::with_capacity(params.n_trees);
    for t in 0..params.n_trees {
        let count: usize = lines.keyed("tree")?;
        if count == 0 {
            return Err(ModelFormatError::Malformed { line: lines.last, msg: format!("tree {t} is empty") });
        }
        let mut nodes = Vec::with_capacity(count);
        let mut pending_right: Vec<usize> = Vec::new();
        for i in 0..count {
            let (line, parts) = lines.next(&format!("node {i} of tree {t}"))?;
            let node = match parts.as_slice() {
                ["I", f, thr] => TreeNode::Internal {
                    feature: parse(f, line, "feature index")?,
                    threshold: parse(thr, line, "threshold")?,
                    left: i + 1,
                    right: usize::MAX,
                },
                ["L", a, b] => TreeNode::Leaf {
                    count_above: parse(a, line, "count")?,
                    count_below: parse(b, line, "count")?,
                },
                _ => {
                    return Err(ModelFormatError::Malformed {
                        line,
                        msg: "expected `I <feature> <threshold>` or `L <above> <below>`".into(),
                    })
                }
            };
            let is_internal = matches!(node, TreeNode::Internal { .. });
            nodes.push(node);
            if is_internal {
                pending_right.push(i);
            } else {
                // the next node is the right child of the innermost open internal node
                if let Some(parent) = pending_right.pop() {
                    if let TreeNode::Internal { right, .. } = &mut nodes[parent] {
                        *right = i + 1;
                    }
                }
            }
        }
        if !pending_right.is_empty() {
            return Err(ModelFormatError::Malformed {
                line: lines.last,
                msg: format!("tree {t} ends with unfinished internal nodes"),
            });
        }
        trees.push(Tree::from_nodes(nodes)?);
    }
    let (line, end) = lines.next("end marker")?;
    if end.as_slice() != ["end"] {
        return Err(ModelFormatError::Malformed { line, msg: "expected `end`".into() });
    }
    Ok(RandomForestModel::new(params, trees, threshold)?)
}

/// Writes the model atomically.
pub fn save_model(model: &RandomForestModel, path: &Path) -> Result<(), DataError> {
    write_atomic(path, encode_model(model).as_bytes())
}

pub fn load_model(path: &Path) -> Result<RandomForestModel, DataError> {
    let bytes = read_file(path)?;
    let text = String::from_utf8(bytes).map_err(|_| DataError::Model {
        path: path.to_path_buf(),
        source: ModelFormatError::BadTag,
    })?;
    decode_model(&text).map_err(|source| DataError::Model { path: path.to_path_buf(), source })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::N_FEATURES;
    use crate::forest::{train_forest, Sample};
    use crate::geometry::Label;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn model() -> RandomForestModel {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let data: Vec<Sample> = (0..600)
            .map(|_| {
                let mut features = [0.0; N_FEATURES];
                features.iter_mut().for_each(|f| *f = rng.random::<f64>() / 3.0);
                let label = if features[2] + features[7] + 0.1 * rng.random::<f64>() > 0.35 {
                    Label::Below
                } else {
                    Label::Above
                };
                Sample { features, label }
            })
            .collect();
        let params = ForestParams { n_trees: 6, min_samples_leaf: 3, seed: 77, ..Default::default() };
        let mut m = train_forest(&data, &params).unwrap();
        m.set_entropy_threshold(1.0 / 3.0).unwrap();
        m
    }

    #[test]
    fn round_trip_predicts_identically() {
        let m = model();
        let text = encode_model(&m);
        let back = decode_model(&text).unwrap();
        assert_eq!(back, m);
        assert_eq!(encode_model(&back), text);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..1000 {
            let mut x = [0.0; N_FEATURES];
            x.iter_mut().for_each(|f| *f = rng.random::<f64>() / 3.0);
            assert_eq!(m.predict_p_below(&x).to_bits(), back.predict_p_below(&x).to_bits());
        }
    }

    #[test]
    fn truncation_is_detected_everywhere() {
        let text = encode_model(&model());
        let lines: Vec<&str> = text.lines().collect();
        for cut in 0..lines.len() {
            let partial = lines[..cut].join("\n");
            assert!(decode_model(&partial).is_err(), "accepted {cut} of {} lines", lines.len());
        }
    }

    #[test]
    fn version_and_tag_errors() {
        let text = encode_model(&model());
        let v2 = text.replacen("HOBS 1", "HOBS 2", 1);
        assert_eq!(decode_model(&v2), Err(ModelFormatError::UnsupportedVersion("2".into())));
        assert_eq!(decode_model("P6\n1 1\n"), Err(ModelFormatError::BadTag));
        assert_eq!(decode_model(""), Err(ModelFormatError::BadTag));
    }

    #[test]
    fn malformed_records() {
        let text = encode_model(&model());
        let bad = text.replacen("\nL ", "\nX ", 1);
        assert!(matches!(decode_model(&bad), Err(ModelFormatError::Malformed { .. })));
        let bad = text.replacen("n_trees 6", "n_trees six", 1);
        assert!(matches!(decode_model(&bad), Err(ModelFormatError::Malformed { line: 2, .. })));
        let bad = text.replacen("entropy_threshold", "entropy_threshold 2 #", 1);
        assert!(decode_model(&bad).is_err());
    }
}
