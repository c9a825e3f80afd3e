use std::path::Path;

use serde::{Deserialize, Serialize};

use super::network::{input_dim, Dense, GuidanceModel, ModelMeta, FEATURE_LAYOUT_VERSION};
use crate::error::{Error, Result};
use crate::fsutil::write_atomic;
use crate::tableau::PhaseMode;

pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format_version: u32,
    n: usize,
    phase_mode: PhaseMode,
    feature_layout_version: u32,
    input_dim: usize,
    layer_dims: Vec<usize>,
    activations: Vec<String>,
    /// Per layer, `outputs` rows of `inputs` weights.
    weights: Vec<Vec<Vec<f64>>>,
    biases: Vec<Vec<f64>>,
    moveset_fingerprint: String,
    #[serde(default)]
    train_config_echo: Option<serde_json::Value>,
}

fn activations(layers: usize) -> Vec<String> {
    (0..layers).map(|k| if k + 1 == layers { "exp" } else { "sigmoid" }.to_string()).collect()
}

pub fn model_to_json(model: &GuidanceModel) -> Result<String> {
    let file = ModelFile {
        format_version: MODEL_FORMAT_VERSION,
        n: model.meta.n,
        phase_mode: model.meta.phase_mode,
        feature_layout_version: model.meta.feature_layout_version,
        input_dim: model.input_dim(),
        layer_dims: model.layer_dims(),
        activations: activations(model.layers.len()),
        weights: model.layers.iter().map(|l| l.weights.chunks(l.inputs).map(<[f64]>::to_vec).collect()).collect(),
        biases: model.layers.iter().map(|l| l.biases.clone()).collect(),
        moveset_fingerprint: model.meta.moveset_fingerprint.clone(),
        train_config_echo: model.train_config_echo.clone(),
    };
    let mut s = serde_json::to_string_pretty(&file)?;
    s.push('\n');
    Ok(s)
}

pub fn model_from_json(text: &str) -> Result<GuidanceModel> {
    let bad = |m: String| Err(Error::ModelFormat(m));
    let file: ModelFile =
        serde_json::from_str(text).map_err(|e| Error::ModelFormat(format!("corrupt model file: {e}")))?;
    if file.format_version != MODEL_FORMAT_VERSION {
        return bad(format!("unsupported format version {}", file.format_version));
    }
    if file.feature_layout_version != FEATURE_LAYOUT_VERSION {
        return bad(format!("unsupported feature layout {}", file.feature_layout_version));
    }
    let expected_dim = input_dim(file.n, file.phase_mode);
    if file.input_dim != expected_dim {
        return bad(format!(
            "input_dim {} does not match n={} {} (expected {expected_dim})",
            file.input_dim, file.n, file.phase_mode
        ));
    }
    let layers_n = file.layer_dims.len();
    if layers_n == 0 || file.weights.len() != layers_n || file.biases.len() != layers_n {
        return bad("layer count mismatch".into());
    }
    if file.activations != activations(layers_n) {
        return bad(format!("unsupported activations {:?}", file.activations));
    }
    if file.layer_dims.last() != Some(&1) {
        return bad("final layer must have one output".into());
    }
    let mut inputs = file.input_dim;
    let mut layers = Vec::with_capacity(layers_n);
    for (k, (&outputs, (w, b))) in file.layer_dims.iter().zip(file.weights.iter().zip(&file.biases)).enumerate() {
        if w.len() != outputs || b.len() != outputs || w.iter().any(|row| row.len() != inputs) {
            return bad(format!("layer {k} shape does not chain from {inputs} to {outputs}"));
        }
        let weights: Vec<f64> = w.concat();
        if weights.iter().chain(b).any(|v| !v.is_finite()) {
            return bad(format!("layer {k} has non-finite parameters"));
        }
        layers.push(Dense { inputs, outputs, weights, biases: b.clone() });
        inputs = outputs;
    }
    Ok(GuidanceModel {
        meta: ModelMeta {
            n: file.n,
            phase_mode: file.phase_mode,
            feature_layout_version: file.feature_layout_version,
            moveset_fingerprint: file.moveset_fingerprint,
        },
        layers,
        train_config_echo: file.train_config_echo,
    })
}

/// Writes the model as JSON; the file appears complete or not at all.
pub fn save_model(model: &GuidanceModel, path: &Path) -> Result<()> {
    write_atomic(path, model_to_json(model)?.as_bytes())
}

pub fn load_model(path: &Path) -> Result<GuidanceModel> {
    model_from_json(&std::fs::read_to_string(path)?)
}

/// Loads a model and checks it was trained for `n` qubits.
pub fn load_model_for(path: &Path, n: usize) -> Result<GuidanceModel> {
    let model = load_model(path)?;
    if model.meta.n != n {
        return Err(Error::ModelFormat(format!("{} holds a model for n={}, not n={n}", path.display(), model.meta.n)));
    }
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::guidance::network::DEFAULT_LAYER_DIMS;
    use crate::rng;

    fn model() -> GuidanceModel {
        let meta = ModelMeta {
            n: 2,
            phase_mode: PhaseMode::WithPhases,
            feature_layout_version: 1,
            moveset_fingerprint: "abc".into(),
        };
        GuidanceModel::new(meta, &DEFAULT_LAYER_DIMS, &mut rng::stream(4, &[])).unwrap()
    }

    #[test]
    fn json_round_trip_is_exact() {
        let m = model();
        let back = model_from_json(&model_to_json(&m).unwrap()).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn rejects_tampered_files() {
        let text = model_to_json(&model()).unwrap();
        assert!(model_from_json(&text[..text.len() / 2]).is_err());
        assert!(model_from_json(&text.replace("\"input_dim\": 20", "\"input_dim\": 36")).is_err());
        assert!(model_from_json(&text.replace("\"format_version\": 1", "\"format_version\": 9")).is_err());
        assert!(model_from_json(&text.replace("\"exp\"", "\"relu\"")).is_err());
    }
}
