use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tableau::{PhaseMode, Tableau};

pub const FEATURE_LAYOUT_VERSION: u32 = 1;
pub const DEFAULT_LAYER_DIMS: [usize; 4] = [32, 16, 4, 1];

/// Pre-activations of the exponential head are clamped to this value.
pub const EXP_CLAMP: f64 = 30.0;

/// What a model was trained on; a model only accepts matching tableaus.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelMeta {
    pub n: usize,
    /// With phases, each row of the tableau contributes its phase bit.
    pub phase_mode: PhaseMode,
    pub feature_layout_version: u32,
    pub moveset_fingerprint: String,
}

impl ModelMeta {
    pub fn input_dim(&self) -> usize {
        input_dim(self.n, self.phase_mode)
    }
}

pub fn input_dim(n: usize, mode: PhaseMode) -> usize {
    2 * n * (2 * n + usize::from(mode.has_phases()))
}

/// Row-major flattening of the tableau as 0.0/1.0: each row's 2n matrix
/// entries followed by its phase bit when the model uses phases.
pub fn featurize(t: &Tableau, meta: &ModelMeta) -> Result<Vec<f64>> {
    let mut out = vec![0.0; meta.input_dim()];
    featurize_into(t, meta, &mut out)?;
    Ok(out)
}

pub(crate) fn featurize_into(t: &Tableau, meta: &ModelMeta, out: &mut [f64]) -> Result<()> {
    if t.n() != meta.n {
        return Err(Error::DimensionMismatch { expected: meta.n, actual: t.n() });
    }
    let with_phases = meta.phase_mode.has_phases();
    let phases = match (with_phases, t.phases()) {
        (true, None) => {
            return Err(Error::PhaseModeMismatch("model expects phase bits".into()));
        }
        (_, p) => p.unwrap_or(0),
    };
    let w = 2 * meta.n;
    let stride = w + usize::from(with_phases);
    debug_assert_eq!(out.len(), w * stride);
    for (r, &row) in t.rows().iter().enumerate() {
        let dst = &mut out[r * stride..(r + 1) * stride];
        for (c, v) in dst[..w].iter_mut().enumerate() {
            *v = ((row >> c) & 1) as f64;
        }
        if with_phases {
            dst[w] = ((phases >> r) & 1) as f64;
        }
    }
    Ok(())
}

/// Fully connected layer, weights stored `outputs × inputs` row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Dense {
    pub inputs: usize,
    pub outputs: usize,
    pub weights: Vec<f64>,
    pub biases: Vec<f64>,
}

impl Dense {
    pub fn zeros(inputs: usize, outputs: usize) -> Self {
        Dense { inputs, outputs, weights: vec![0.0; inputs * outputs], biases: vec![0.0; outputs] }
    }

    /// Glorot-uniform weights, zero biases.
    pub fn glorot<R: Rng + ?Sized>(inputs: usize, outputs: usize, rng: &mut R) -> Self {
        let limit = (6.0 / (inputs + outputs) as f64).sqrt();
        let weights = (0..inputs * outputs).map(|_| rng.gen_range(-limit..=limit)).collect();
        Dense { inputs, outputs, weights, biases: vec![0.0; outputs] }
    }

    pub fn num_params(&self) -> usize {
        self.weights.len() + self.biases.len()
    }

    fn forward(&self, input: &[f64], batch: usize, out: &mut Vec<f64>) {
        out.clear();
        out.resize(batch * self.outputs, 0.0);
        for b in 0..batch {
            let x = &input[b * self.inputs..(b + 1) * self.inputs];
            let y = &mut out[b * self.outputs..(b + 1) * self.outputs];
            for (o, yo) in y.iter_mut().enumerate() {
                let w = &self.weights[o * self.inputs..(o + 1) * self.inputs];
                *yo = self.biases[o] + w.iter().zip(x).map(|(a, b)| a * b).sum::<f64>();
            }
        }
    }
}

#[inline]
fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

/// The learned guidance function: sigmoid hidden layers and an exponential
/// output unit, so every output is strictly positive.
#[derive(Clone, Debug, PartialEq)]
pub struct GuidanceModel {
    pub meta: ModelMeta,
    pub layers: Vec<Dense>,
    pub train_config_echo: Option<serde_json::Value>,
}

/// Activations kept for backpropagation over one batch.
pub(crate) struct ForwardCache {
    batch: usize,
    /// `activations[0]` is the input; `activations[k]` the output of layer k-1.
    activations: Vec<Vec<f64>>,
    /// Which outputs hit the exp clamp.
    clamped: Vec<bool>,
}

impl ForwardCache {
    pub(crate) fn outputs(&self) -> &[f64] {
        self.activations.last().expect("at least one layer")
    }

    pub(crate) fn clamp_count(&self) -> usize {
        self.clamped.iter().filter(|&&c| c).count()
    }
}

impl GuidanceModel {
    pub fn new<R: Rng + ?Sized>(meta: ModelMeta, layer_dims: &[usize], rng: &mut R) -> Result<Self> {
        Self::check_dims(layer_dims)?;
        let mut inputs = meta.input_dim();
        let mut layers = Vec::with_capacity(layer_dims.len());
        for &outputs in layer_dims {
            layers.push(Dense::glorot(inputs, outputs, rng));
            inputs = outputs;
        }
        Ok(GuidanceModel { meta, layers, train_config_echo: None })
    }

    /// All weights and biases zero; the output is exp(0) = 1 everywhere.
    pub fn zeros(meta: ModelMeta, layer_dims: &[usize]) -> Result<Self> {
        Self::check_dims(layer_dims)?;
        let mut inputs = meta.input_dim();
        let mut layers = Vec::with_capacity(layer_dims.len());
        for &outputs in layer_dims {
            layers.push(Dense::zeros(inputs, outputs));
            inputs = outputs;
        }
        Ok(GuidanceModel { meta, layers, train_config_echo: None })
    }

    fn check_dims(layer_dims: &[usize]) -> Result<()> {
        if layer_dims.is_empty() || layer_dims.last() != Some(&1) || layer_dims.contains(&0) {
            return Err(Error::InvalidConfig(format!("layer dims must be positive and end in 1, got {layer_dims:?}")));
        }
        Ok(())
    }

    pub fn input_dim(&self) -> usize {
        self.meta.input_dim()
    }

    pub fn layer_dims(&self) -> Vec<usize> {
        self.layers.iter().map(|l| l.outputs).collect()
    }

    pub fn num_params(&self) -> usize {
        self.layers.iter().map(Dense::num_params).sum()
    }

    /// Parameters in a fixed order: per layer, weights then biases.
    pub fn params(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.num_params());
        for l in &self.layers {
            out.extend_from_slice(&l.weights);
            out.extend_from_slice(&l.biases);
        }
        out
    }

    pub fn set_params(&mut self, params: &[f64]) -> Result<()> {
        if params.len() != self.num_params() {
            return Err(Error::LengthMismatch(format!(
                "expected {} parameters, got {}",
                self.num_params(),
                params.len()
            )));
        }
        let mut off = 0;
        for l in &mut self.layers {
            let w = l.weights.len();
            l.weights.copy_from_slice(&params[off..off + w]);
            off += w;
            let b = l.biases.len();
            l.biases.copy_from_slice(&params[off..off + b]);
            off += b;
        }
        Ok(())
    }

    pub fn is_finite(&self) -> bool {
        self.layers.iter().all(|l| l.weights.iter().chain(&l.biases).all(|v| v.is_finite()))
    }

    pub(crate) fn forward_cached(&self, input: Vec<f64>, batch: usize) -> Result<ForwardCache> {
        if input.len() != batch * self.input_dim() {
            return Err(Error::LengthMismatch(format!(
                "feature length {} does not match input dim {}",
                input.len() / batch.max(1),
                self.input_dim()
            )));
        }
        let last = self.layers.len() - 1;
        let mut activations = Vec::with_capacity(self.layers.len() + 1);
        activations.push(input);
        let mut clamped = Vec::new();
        for (k, layer) in self.layers.iter().enumerate() {
            let mut z = Vec::new();
            layer.forward(&activations[k], batch, &mut z);
            if k == last {
                clamped = z.iter().map(|&v| v > EXP_CLAMP).collect();
                for v in &mut z {
                    *v = v.min(EXP_CLAMP).exp();
                }
                if let Some(bad) = z.iter().find(|v| !v.is_finite()) {
                    return Err(Error::NonFinite(format!("model output {bad}")));
                }
            } else {
                for v in &mut z {
                    *v = sigmoid(*v);
                }
            }
            activations.push(z);
        }
        Ok(ForwardCache { batch, activations, clamped })
    }

    /// Gradient of a scalar loss w.r.t. the parameters (in [`Self::params`]
    /// order), given the loss gradient w.r.t. each output.
    pub(crate) fn backward(&self, cache: &ForwardCache, dloss_dout: &[f64]) -> Vec<f64> {
        let batch = cache.batch;
        let last = self.layers.len() - 1;
        let mut grads: Vec<(Vec<f64>, Vec<f64>)> =
            self.layers.iter().map(|l| (vec![0.0; l.weights.len()], vec![0.0; l.biases.len()])).collect();

        // Gradient w.r.t. the pre-activation of the current layer.
        let out = cache.outputs();
        let mut delta: Vec<f64> =
            (0..batch).map(|b| if cache.clamped[b] { 0.0 } else { dloss_dout[b] * out[b] }).collect();

        for k in (0..=last).rev() {
            let layer = &self.layers[k];
            let input = &cache.activations[k];
            let (gw, gb) = &mut grads[k];
            for b in 0..batch {
                let x = &input[b * layer.inputs..(b + 1) * layer.inputs];
                let d = &delta[b * layer.outputs..(b + 1) * layer.outputs];
                for (o, &dv) in d.iter().enumerate() {
                    if dv == 0.0 {
                        continue;
                    }
                    gb[o] += dv;
                    let row = &mut gw[o * layer.inputs..(o + 1) * layer.inputs];
                    for (g, &xi) in row.iter_mut().zip(x) {
                        *g += dv * xi;
                    }
                }
            }
            if k == 0 {
                break;
            }
            // Back through the sigmoid feeding this layer.
            let mut prev = vec![0.0; batch * layer.inputs];
            for b in 0..batch {
                let d = &delta[b * layer.outputs..(b + 1) * layer.outputs];
                let p = &mut prev[b * layer.inputs..(b + 1) * layer.inputs];
                for (o, &dv) in d.iter().enumerate() {
                    let w = &layer.weights[o * layer.inputs..(o + 1) * layer.inputs];
                    for (pi, &wi) in p.iter_mut().zip(w) {
                        *pi += dv * wi;
                    }
                }
                let a = &input[b * layer.inputs..(b + 1) * layer.inputs];
                for (pi, &ai) in p.iter_mut().zip(a) {
                    *pi *= ai * (1.0 - ai);
                }
            }
            delta = prev;
        }

        let mut flat = Vec::with_capacity(self.num_params());
        for (gw, gb) in grads {
            flat.extend(gw);
            flat.extend(gb);
        }
        flat
    }

    pub fn forward(&self, features: &[f64]) -> Result<f64> {
        if features.len() != self.input_dim() {
            return Err(Error::LengthMismatch(format!(
                "feature length {} does not match input dim {}",
                features.len(),
                self.input_dim()
            )));
        }
        Ok(self.forward_cached(features.to_vec(), 1)?.outputs()[0])
    }

    /// Evaluates the model on a batch of flattened feature rows.
    pub fn forward_batch(&self, features: Vec<f64>, batch: usize) -> Result<Vec<f64>> {
        if batch == 0 {
            return Ok(Vec::new());
        }
        Ok(self.forward_cached(features, batch)?.activations.pop().unwrap_or_default())
    }

    /// g(T) for each tableau.
    pub fn evaluate(&self, tableaus: &[Tableau]) -> Result<Vec<f64>> {
        let d = self.input_dim();
        let mut features = vec![0.0; d * tableaus.len()];
        for (t, chunk) in tableaus.iter().zip(features.chunks_mut(d)) {
            featurize_into(t, &self.meta, chunk)?;
        }
        self.forward_batch(features, tableaus.len())
    }
}
