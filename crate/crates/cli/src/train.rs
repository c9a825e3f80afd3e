use std::io::BufReader;
use std::path::PathBuf;

use anyhow::{Context, Result};
use cliffsynth::guidance::{model_to_json, train_with, write_loss_csv, BatchSource, TrainConfig};
use cliffsynth::walker::{read_dataset, Scaling, WalkConfig};
use cliffsynth::PhaseMode;
use serde::{Deserialize, Serialize};

use crate::common::{build_moveset, usage, Ctx};
use crate::config::{is_false, resolve, ConfigFile, Resolvable};

/// Train a guidance model.
#[derive(clap::Args, Serialize)]
pub struct Args {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    scaling: Option<Scaling>,
    #[arg(long)]
    phase_mode: Option<PhaseMode>,
    #[arg(long)]
    weights: Option<String>,
    #[arg(long)]
    moveset: Option<PathBuf>,
    /// Walks per batch.
    #[arg(long)]
    batch_size: Option<usize>,
    /// Number of batches, one optimizer step each.
    #[arg(long)]
    batches: Option<usize>,
    #[arg(long)]
    learning_rate: Option<f64>,
    /// Save the model every this many steps.
    #[arg(long)]
    checkpoint_interval: Option<usize>,
    /// Train on a stored dataset instead of fresh walks.
    #[arg(long)]
    dataset: Option<PathBuf>,
    #[arg(long)]
    lmax: Option<usize>,
    /// Use the full-size training budget.
    #[arg(long)]
    #[serde(skip_serializing_if = "is_false")]
    paper_scale: bool,
    /// Model file name; defaults to model_n<N>.json.
    #[arg(long)]
    output: Option<String>,
}

#[derive(Serialize, Deserialize)]
pub struct Options {
    pub n: usize,
    pub scaling: Scaling,
    pub phase_mode: PhaseMode,
    pub weights: String,
    pub moveset: Option<PathBuf>,
    pub batch_size: usize,
    pub batches: usize,
    pub learning_rate: f64,
    pub checkpoint_interval: Option<usize>,
    pub dataset: Option<PathBuf>,
    pub lmax: Option<usize>,
    pub paper_scale: bool,
    pub output: Option<String>,
}

impl Resolvable for Options {
    const SECTION: &'static str = "train";

    fn defaults(paper_scale: bool) -> Self {
        Options {
            n: 3,
            scaling: Scaling::LogLinear,
            phase_mode: PhaseMode::WithPhases,
            weights: "cnot_count".into(),
            moveset: None,
            batch_size: if paper_scale { 2000 } else { 500 },
            batches: 1000,
            learning_rate: 1e-3,
            checkpoint_interval: None,
            dataset: None,
            lmax: None,
            paper_scale,
            output: None,
        }
    }
}

pub fn run(ctx: &Ctx, file: &ConfigFile, args: &Args) -> Result<()> {
    let opts: Options = resolve(file, args)?;
    let ms = build_moveset(opts.n, &opts.weights, opts.moveset.as_deref())?;
    let mut walk = WalkConfig::new(opts.n, opts.scaling, ctx.seed, opts.phase_mode);
    walk.lmax_override = opts.lmax;
    if walk.lmax() == 0 {
        return Err(usage(format!("maximum walk length is 0 for n={}; pass --lmax", opts.n)));
    }
    let mut cfg = TrainConfig::new(walk);
    cfg.batch_size = opts.batch_size;
    cfg.num_batches = opts.batches;
    cfg.learning_rate = opts.learning_rate;
    cfg.checkpoint_interval = opts.checkpoint_interval;
    cfg.validate()?;
    ctx.echo("train", &opts)?;

    let data = match &opts.dataset {
        None => None,
        Some(path) => {
            let f = std::fs::File::open(path).with_context(|| format!("opening dataset {}", path.display()))?;
            let (header, samples) =
                read_dataset(BufReader::new(f)).with_context(|| format!("reading dataset {}", path.display()))?;
            if header.n != opts.n || header.phase_mode != opts.phase_mode {
                return Err(usage(format!(
                    "dataset holds n={} {} walks, expected n={} {}",
                    header.n, header.phase_mode, opts.n, opts.phase_mode
                )));
            }
            Some(samples)
        }
    };
    let source = match &data {
        None => BatchSource::Fresh,
        Some(samples) => BatchSource::Dataset(samples),
    };

    let model_name = opts.output.clone().unwrap_or_else(|| format!("model_n{}.json", opts.n));
    let (model, report) = train_with(&cfg, &ms, source, |step, model| {
        if step < cfg.num_batches {
            log::info!("checkpoint at step {step}");
        }
        ctx.write(&model_name, model_to_json(model)?.as_bytes())
            .map_err(|e| cliffsynth::Error::Io(std::io::Error::other(format!("{e:#}"))))?;
        Ok(())
    })?;
    let model_path = ctx.write(&model_name, model_to_json(&model)?.as_bytes())?;
    let mut csv = Vec::new();
    write_loss_csv(&mut csv, &report.losses)?;
    let loss_path = ctx.write(&format!("loss_n{}.csv", opts.n), &csv)?;
    println!(
        "trained n={} model: first loss {:.4}, final loss {:.4} ({} batches of {}) in {:.1?}",
        opts.n,
        report.losses[0],
        report.final_loss,
        report.losses.len(),
        cfg.batch_size,
        report.wall_time
    );
    println!("wrote {} and {}", model_path.display(), loss_path.display());
    Ok(())
}
