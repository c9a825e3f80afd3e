use std::path::PathBuf;

use anyhow::Result;
use cliffsynth::rng::{self, domain};
use cliffsynth::walker::{sample_walk, write_dataset, DatasetHeader, Scaling, WalkConfig};
use cliffsynth::PhaseMode;
use serde::{Deserialize, Serialize};

use crate::common::{build_moveset, usage, Ctx};
use crate::config::{is_false, resolve, ConfigFile, Resolvable};

/// Sample random-walk training data.
#[derive(clap::Args, Serialize)]
pub struct Args {
    /// Number of qubits.
    #[arg(long)]
    n: Option<usize>,
    /// Walk-length scaling: linear or loglinear.
    #[arg(long)]
    scaling: Option<Scaling>,
    /// Number of walks.
    #[arg(long)]
    count: Option<usize>,
    /// with_phases or phaseless.
    #[arg(long)]
    phase_mode: Option<PhaseMode>,
    /// Weight scheme: unit or cnot_count.
    #[arg(long)]
    weights: Option<String>,
    /// Move-set JSON file (overrides --weights).
    #[arg(long)]
    moveset: Option<PathBuf>,
    /// Override the maximum walk length.
    #[arg(long)]
    lmax: Option<usize>,
    /// Never follow a move with its inverse.
    #[arg(long)]
    #[serde(skip_serializing_if = "is_false")]
    prune_inverse: bool,
    /// Output file name inside the output directory.
    #[arg(long)]
    output: Option<String>,
}

#[derive(Serialize, Deserialize)]
pub struct Options {
    pub n: usize,
    pub scaling: Scaling,
    pub count: usize,
    pub phase_mode: PhaseMode,
    pub weights: String,
    pub moveset: Option<PathBuf>,
    pub lmax: Option<usize>,
    pub prune_inverse: bool,
    pub output: Option<String>,
}

impl Resolvable for Options {
    const SECTION: &'static str = "gen_data";

    fn defaults(_paper_scale: bool) -> Self {
        Options {
            n: 3,
            scaling: Scaling::LogLinear,
            count: 1000,
            phase_mode: PhaseMode::WithPhases,
            weights: "cnot_count".into(),
            moveset: None,
            lmax: None,
            prune_inverse: false,
            output: None,
        }
    }
}

pub fn run(ctx: &Ctx, file: &ConfigFile, args: &Args) -> Result<()> {
    let opts: Options = resolve(file, args)?;
    if opts.count == 0 {
        return Err(usage("--count must be positive"));
    }
    let ms = build_moveset(opts.n, &opts.weights, opts.moveset.as_deref())?;
    let mut cfg = WalkConfig::new(opts.n, opts.scaling, ctx.seed, opts.phase_mode);
    cfg.lmax_override = opts.lmax;
    cfg.prune_inverse = opts.prune_inverse;
    if cfg.lmax() == 0 {
        return Err(usage(format!("maximum walk length is 0 for n={}; pass --lmax", opts.n)));
    }
    ctx.echo("gen-data", &opts)?;

    let samples = (0..opts.count as u64)
        .map(|i| sample_walk(&cfg, &ms, &mut rng::stream(ctx.seed, &[domain::DATASET, i])))
        .collect::<cliffsynth::Result<Vec<_>>>()?;
    let header = DatasetHeader::new(&cfg, &ms, samples.len());
    let mut buf = Vec::new();
    write_dataset(&mut buf, &header, &samples)?;
    let name = opts.output.clone().unwrap_or_else(|| format!("walks_n{}.txt", opts.n));
    let path = ctx.write(&name, &buf)?;
    println!(
        "wrote {} walks (n={}, {}, L_max={}) to {}",
        samples.len(),
        opts.n,
        opts.phase_mode,
        header.lmax,
        path.display()
    );
    Ok(())
}
