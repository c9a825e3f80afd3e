use std::path::PathBuf;

use anyhow::{Context, Result};
use cliffsynth::guidance::load_model;
use cliffsynth::oracle::{build_distance_table, OracleOptions};
use cliffsynth::rng::{self, domain};
use cliffsynth::search::{beam_synthesize, greedy_synthesize, GuidanceSource};
use cliffsynth::walker::{sample_walk, walk_of_length, Scaling, WalkConfig};
use cliffsynth::{PhaseMode, Tableau};
use serde::{Deserialize, Serialize};

use crate::common::{build_moveset, usage, Ctx};
use crate::config::{is_false, resolve, ConfigFile, Resolvable};
use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Greedy,
    Beam,
}

/// Synthesize one tableau.
#[derive(clap::Args, Serialize)]
pub struct Args {
    /// Trained model file.
    #[arg(long, conflicts_with = "exact")]
    model: Option<PathBuf>,
    /// Guide the search with exact distances (n <= 2, or n = 3 phaseless).
    #[arg(long)]
    #[serde(skip_serializing_if = "is_false")]
    exact: bool,
    /// Allow the large n=3 phaseless distance table.
    #[arg(long)]
    #[serde(skip_serializing_if = "is_false")]
    allow_large: bool,
    /// Qubit count when no model is given.
    #[arg(long)]
    n: Option<usize>,
    /// Tableau file to synthesize.
    #[arg(long, conflicts_with = "random_walk")]
    tableau: Option<PathBuf>,
    /// Synthesize the endpoint of a random walk of this length.
    #[arg(long)]
    random_walk: Option<usize>,
    #[arg(long)]
    scaling: Option<Scaling>,
    #[arg(long)]
    phase_mode: Option<PhaseMode>,
    #[arg(long, value_enum)]
    algorithm: Option<Algorithm>,
    #[arg(long)]
    beam_width: Option<usize>,
    #[arg(long)]
    max_steps: Option<usize>,
    /// Weight scheme; unit with --exact, cnot_count otherwise.
    #[arg(long)]
    weights: Option<String>,
    #[arg(long)]
    moveset: Option<PathBuf>,
    /// Base name of the decomposition files.
    #[arg(long)]
    output: Option<String>,
}

#[derive(Serialize, Deserialize)]
pub struct Options {
    pub model: Option<PathBuf>,
    pub exact: bool,
    pub allow_large: bool,
    pub n: Option<usize>,
    pub tableau: Option<PathBuf>,
    pub random_walk: Option<usize>,
    pub scaling: Scaling,
    pub phase_mode: Option<PhaseMode>,
    pub algorithm: Algorithm,
    pub beam_width: usize,
    pub max_steps: usize,
    pub weights: Option<String>,
    pub moveset: Option<PathBuf>,
    pub output: String,
}

impl Resolvable for Options {
    const SECTION: &'static str = "synth";

    fn defaults(_paper_scale: bool) -> Self {
        Options {
            model: None,
            exact: false,
            allow_large: false,
            n: None,
            tableau: None,
            random_walk: None,
            scaling: Scaling::LogLinear,
            phase_mode: None,
            algorithm: Algorithm::Beam,
            beam_width: 3,
            max_steps: 1000,
            weights: None,
            moveset: None,
            output: "decomposition".into(),
        }
    }
}

#[derive(Serialize)]
struct Record<'a> {
    input: String,
    algorithm: Algorithm,
    #[serde(flatten)]
    result: &'a cliffsynth::search::DecompositionRecord,
}

pub fn run(ctx: &Ctx, file: &ConfigFile, args: &Args) -> Result<()> {
    let opts: Options = resolve(file, args)?;
    if opts.model.is_none() && !opts.exact {
        return Err(usage("give a --model file or --exact"));
    }
    let model = match &opts.model {
        Some(p) => Some(load_model(p).with_context(|| format!("loading model {}", p.display()))?),
        None => None,
    };
    let input = match &opts.tableau {
        Some(p) => {
            let text = std::fs::read_to_string(p).with_context(|| format!("reading tableau {}", p.display()))?;
            Some(Tableau::from_text(&text).with_context(|| format!("parsing tableau {}", p.display()))?)
        }
        None => None,
    };
    let n = match (&model, &input, opts.n) {
        (Some(m), _, _) => m.meta.n,
        (None, Some(t), _) => t.n(),
        (None, None, Some(n)) => n,
        (None, None, None) => return Err(usage("--n is required with --exact and no --tableau")),
    };
    if let Some(t) = &input {
        if t.n() != n {
            return Err(usage(format!("tableau has n={}, model has n={n}", t.n())));
        }
    }
    let mode = input
        .as_ref()
        .map(Tableau::phase_mode)
        .or(opts.phase_mode)
        .or(model.as_ref().map(|m| m.meta.phase_mode))
        .unwrap_or(PhaseMode::WithPhases);
    let weights = opts.weights.clone().unwrap_or_else(|| if opts.exact { "unit" } else { "cnot_count" }.into());
    let ms = build_moveset(n, &weights, opts.moveset.as_deref())?;
    if let Some(m) = &model {
        if m.meta.moveset_fingerprint != ms.fingerprint() {
            log::warn!("model was trained with a different move set");
        }
    }
    ctx.echo("synth", &opts)?;

    let x = match input {
        Some(t) => t,
        None => {
            let cfg = WalkConfig::new(n, opts.scaling, ctx.seed, mode);
            let mut r = rng::stream(ctx.seed, &[domain::SEARCH, 0]);
            match opts.random_walk {
                Some(len) => walk_of_length(&cfg, &ms, len, &mut r)?.tableau,
                None => sample_walk(&cfg, &ms, &mut r)?.tableau,
            }
        }
    };

    let table;
    let guidance = match &model {
        Some(m) => GuidanceSource::Learned(m),
        None => {
            let opts = OracleOptions { allow_large: opts.allow_large, ..Default::default() };
            table = build_distance_table(&ms, mode, opts)?;
            GuidanceSource::Exact(&table)
        }
    };
    let mut r = rng::stream(ctx.seed, &[domain::SEARCH, 1]);
    let result = match opts.algorithm {
        Algorithm::Greedy => greedy_synthesize(&x, &ms, &guidance, opts.max_steps, &mut r)?,
        Algorithm::Beam => beam_synthesize(&x, &ms, &guidance, opts.beam_width, opts.max_steps, &mut r)?,
    };

    let record = result.to_record();
    ctx.write(&format!("{}.txt", opts.output), result.to_text().as_bytes())?;
    let mut json =
        serde_json::to_string_pretty(&Record { input: x.to_text(), algorithm: opts.algorithm, result: &record })?;
    json.push('\n');
    ctx.write(&format!("{}.json", opts.output), json.as_bytes())?;
    ctx.write("input_tableau.txt", x.to_text().as_bytes())?;

    print!("{}", result.to_text());
    println!("# wall_time={:.3?} nodes_expanded={}", result.wall_time, result.nodes_expanded);
    if !result.success {
        let why = result.failure.map_or("unknown", |f| f.name());
        return Err(CliError::SearchFailed(format!("search failed ({why}) after {} steps", result.steps_taken)).into());
    }
    Ok(())
}
