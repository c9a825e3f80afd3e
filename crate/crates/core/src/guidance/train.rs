use std::io::Write;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::network::{
    featurize_into, ForwardCache, GuidanceModel, ModelMeta, DEFAULT_LAYER_DIMS, FEATURE_LAYOUT_VERSION,
};
use super::pearson::{pearson, pearson_grad_y};
use crate::error::{Error, Result};
use crate::moveset::MoveSet;
use crate::rng::{self, domain};
use crate::walker::{sample_batch, WalkConfig, WalkSample};

/// Samples per parallel work unit. Fixed so that gradient sums are reduced
/// in the same order regardless of thread count.
const CHUNK: usize = 256;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub batch_size: usize,
    pub num_batches: usize,
    pub learning_rate: f64,
    pub adam_beta1: f64,
    pub adam_beta2: f64,
    pub adam_epsilon: f64,
    pub walk: WalkConfig,
    /// Seeds the weight initialization; walks draw from `walk.seed`.
    pub seed: u64,
    #[serde(default)]
    pub checkpoint_interval: Option<usize>,
    pub layer_dims: Vec<usize>,
}

impl TrainConfig {
    pub fn new(walk: WalkConfig) -> Self {
        let seed = walk.seed;
        TrainConfig {
            batch_size: 2000,
            num_batches: 1000,
            learning_rate: 1e-3,
            adam_beta1: 0.9,
            adam_beta2: 0.999,
            adam_epsilon: 1e-8,
            walk,
            seed,
            checkpoint_interval: None,
            layer_dims: DEFAULT_LAYER_DIMS.to_vec(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.batch_size < 2 {
            return bad(format!("batch size must be at least 2, got {}", self.batch_size));
        }
        if self.num_batches == 0 {
            return bad("number of batches must be positive".into());
        }
        if !(self.learning_rate > 0.0 && self.adam_epsilon > 0.0) {
            return bad("learning rate and epsilon must be positive".into());
        }
        for b in [self.adam_beta1, self.adam_beta2] {
            if !(0.0..1.0).contains(&b) {
                return bad(format!("adam beta {b} outside [0, 1)"));
            }
        }
        if self.checkpoint_interval == Some(0) {
            return bad("checkpoint interval must be positive".into());
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrainReport {
    /// Loss after each optimizer step's forward pass, one per batch.
    pub losses: Vec<f64>,
    pub final_loss: f64,
    #[serde(skip)]
    pub wall_time: Duration,
    pub config: TrainConfig,
    /// Outputs that hit the exp clamp, summed over training.
    pub clamp_events: usize,
}

pub fn features(model: &GuidanceModel, samples: &[WalkSample]) -> Result<Vec<f64>> {
    let d = model.input_dim();
    let mut out = vec![0.0; d * samples.len()];
    for (s, chunk) in samples.iter().zip(out.chunks_mut(d)) {
        featurize_into(&s.tableau, &model.meta, chunk)?;
    }
    Ok(out)
}

fn forward_chunks(model: &GuidanceModel, samples: &[WalkSample]) -> Result<Vec<ForwardCache>> {
    samples.par_chunks(CHUNK).map(|chunk| model.forward_cached(features(model, chunk)?, chunk.len())).collect()
}

fn correlation_error(e: Error) -> Error {
    match e {
        Error::ZeroVariance("x") => Error::ZeroVariance("walk upper bounds"),
        Error::ZeroVariance("y") => Error::ZeroVariance("guidance outputs"),
        other => other,
    }
}

/// Negative Pearson correlation between the walk upper bounds and the model
/// outputs on a batch.
pub fn loss(model: &GuidanceModel, batch: &[WalkSample]) -> Result<f64> {
    let caches = forward_chunks(model, batch)?;
    let outputs: Vec<f64> = caches.iter().flat_map(|c| c.outputs().iter().copied()).collect();
    let targets: Vec<f64> = batch.iter().map(|s| s.ub_distance).collect();
    Ok(-pearson(&targets, &outputs).map_err(correlation_error)?)
}

/// The batch loss and its exact gradient in [`GuidanceModel::params`] order.
pub fn loss_and_grad(model: &GuidanceModel, batch: &[WalkSample]) -> Result<(f64, Vec<f64>)> {
    Ok(loss_grad_clamps(model, batch)?.0)
}

fn loss_grad_clamps(model: &GuidanceModel, batch: &[WalkSample]) -> Result<((f64, Vec<f64>), usize)> {
    let caches = forward_chunks(model, batch)?;
    let clamps = caches.iter().map(ForwardCache::clamp_count).sum();
    let outputs: Vec<f64> = caches.iter().flat_map(|c| c.outputs().iter().copied()).collect();
    let targets: Vec<f64> = batch.iter().map(|s| s.ub_distance).collect();
    let (r, dr) = pearson_grad_y(&targets, &outputs).map_err(correlation_error)?;
    let dloss: Vec<f64> = dr.iter().map(|g| -g).collect();
    let partials: Vec<Vec<f64>> =
        caches.par_iter().zip(dloss.par_chunks(CHUNK)).map(|(c, d)| model.backward(c, d)).collect();
    let mut grad = vec![0.0; model.num_params()];
    for p in partials {
        for (g, v) in grad.iter_mut().zip(p) {
            *g += v;
        }
    }
    Ok(((-r, grad), clamps))
}

struct Adam {
    m: Vec<f64>,
    v: Vec<f64>,
    t: i32,
    lr: f64,
    beta1: f64,
    beta2: f64,
    eps: f64,
}

impl Adam {
    fn new(len: usize, cfg: &TrainConfig) -> Self {
        Adam {
            m: vec![0.0; len],
            v: vec![0.0; len],
            t: 0,
            lr: cfg.learning_rate,
            beta1: cfg.adam_beta1,
            beta2: cfg.adam_beta2,
            eps: cfg.adam_epsilon,
        }
    }

    fn step(&mut self, params: &mut [f64], grad: &[f64]) {
        self.t += 1;
        let c1 = 1.0 - self.beta1.powi(self.t);
        let c2 = 1.0 - self.beta2.powi(self.t);
        for i in 0..params.len() {
            self.m[i] = self.beta1 * self.m[i] + (1.0 - self.beta1) * grad[i];
            self.v[i] = self.beta2 * self.v[i] + (1.0 - self.beta2) * grad[i] * grad[i];
            let m_hat = self.m[i] / c1;
            let v_hat = self.v[i] / c2;
            params[i] -= self.lr * m_hat / (v_hat.sqrt() + self.eps);
        }
    }
}

/// Where training batches come from.
pub enum BatchSource<'a> {
    /// A fresh walker batch per step.
    Fresh,
    /// Consecutive windows over a stored dataset, wrapping around.
    Dataset(&'a [WalkSample]),
}

fn dataset_batch(data: &[WalkSample], step: usize, size: usize) -> Result<Vec<WalkSample>> {
    let len = data.len();
    for shift in 0..len {
        let start = (step * size + shift) % len;
        let batch: Vec<WalkSample> = (0..size).map(|j| data[(start + j) % len].clone()).collect();
        if batch.iter().any(|s| s.ub_distance != batch[0].ub_distance) {
            return Ok(batch);
        }
    }
    Err(Error::ZeroVariance("dataset upper bounds"))
}

pub fn train(cfg: &TrainConfig, ms: &MoveSet) -> Result<(GuidanceModel, TrainReport)> {
    train_with(cfg, ms, BatchSource::Fresh, |_, _| Ok(()))
}

/// Trains a model; `checkpoint(step, model)` runs every
/// `checkpoint_interval` steps and after the last step.
pub fn train_with<F>(
    cfg: &TrainConfig,
    ms: &MoveSet,
    source: BatchSource<'_>,
    mut checkpoint: F,
) -> Result<(GuidanceModel, TrainReport)>
where
    F: FnMut(usize, &GuidanceModel) -> Result<()>,
{
    cfg.validate()?;
    if cfg.walk.n != ms.n() {
        return Err(Error::DimensionMismatch { expected: cfg.walk.n, actual: ms.n() });
    }
    if let BatchSource::Dataset(data) = &source {
        if data.len() < 2 {
            return Err(Error::InvalidConfig("dataset needs at least 2 samples".into()));
        }
        if let Some(s) = data.iter().find(|s| s.tableau.n() != cfg.walk.n) {
            return Err(Error::DimensionMismatch { expected: cfg.walk.n, actual: s.tableau.n() });
        }
    }
    let start = Instant::now();
    let meta = ModelMeta {
        n: cfg.walk.n,
        phase_mode: cfg.walk.phase_mode,
        feature_layout_version: FEATURE_LAYOUT_VERSION,
        moveset_fingerprint: ms.fingerprint(),
    };
    let mut init_rng = rng::stream(cfg.seed, &[domain::MODEL_INIT]);
    let mut model = GuidanceModel::new(meta, &cfg.layer_dims, &mut init_rng)?;
    model.train_config_echo = Some(serde_json::to_value(cfg)?);

    let mut params = model.params();
    let mut adam = Adam::new(params.len(), cfg);
    let mut losses = Vec::with_capacity(cfg.num_batches);
    let mut clamp_events = 0;

    for step in 0..cfg.num_batches {
        let batch = match &source {
            BatchSource::Fresh => sample_batch(&cfg.walk, ms, cfg.batch_size, step as u64)?,
            BatchSource::Dataset(data) => dataset_batch(data, step, cfg.batch_size)?,
        };
        let ((loss, grad), clamps) = loss_grad_clamps(&model, &batch)?;
        if clamps > 0 {
            log::debug!("step {step}: {clamps} outputs hit the exp clamp");
            clamp_events += clamps;
        }
        if !loss.is_finite() || grad.iter().any(|g| !g.is_finite()) {
            return Err(Error::NonFinite(format!(
                "step {step}: loss {loss}, gradient norm {}",
                grad.iter().map(|g| g * g).sum::<f64>().sqrt()
            )));
        }
        losses.push(loss);
        adam.step(&mut params, &grad);
        model.set_params(&params)?;
        if !model.is_finite() {
            return Err(Error::NonFinite(format!("step {step}: parameters after update")));
        }
        let done = step + 1;
        if cfg.checkpoint_interval.is_some_and(|k| done % k == 0) || done == cfg.num_batches {
            checkpoint(done, &model)?;
        }
        if done % 50 == 0 {
            log::info!("step {done}/{}: loss {loss:.4}", cfg.num_batches);
        }
    }

    let final_loss = *losses.last().expect("at least one batch");
    let report = TrainReport { losses, final_loss, wall_time: start.elapsed(), config: cfg.clone(), clamp_events };
    Ok((model, report))
}

/// `step,loss` rows, steps counted from 1.
pub fn write_loss_csv<W: Write>(mut w: W, losses: &[f64]) -> Result<()> {
    writeln!(w, "step,loss")?;
    for (i, l) in losses.iter().enumerate() {
        writeln!(w, "{},{}", i + 1, l)?;
    }
    Ok(())
}
