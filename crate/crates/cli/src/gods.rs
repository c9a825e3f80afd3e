use std::path::PathBuf;

use anyhow::Result;
use cliffsynth::oracle::{build_distance_table, gods_number, OracleOptions};
use cliffsynth::{clifford_group_size, PhaseMode};
use serde::{Deserialize, Serialize};

use crate::common::{build_moveset, usage, Ctx};
use crate::config::{is_false, resolve, ConfigFile, Resolvable};

/// Exhaustive distances and the largest distance to the identity.
#[derive(clap::Args, Serialize)]
pub struct Args {
    #[arg(long)]
    n: Option<usize>,
    /// with_phases, phaseless or both.
    #[arg(long)]
    phase_mode: Option<String>,
    #[arg(long)]
    weights: Option<String>,
    #[arg(long)]
    moveset: Option<PathBuf>,
    /// Allow the large n=3 phaseless table.
    #[arg(long)]
    #[serde(skip_serializing_if = "is_false")]
    allow_large: bool,
    /// Also write the binary distance table.
    #[arg(long)]
    #[serde(skip_serializing_if = "is_false")]
    save_table: bool,
}

#[derive(Serialize, Deserialize)]
pub struct Options {
    pub n: usize,
    pub phase_mode: String,
    pub weights: String,
    pub moveset: Option<PathBuf>,
    pub allow_large: bool,
    pub save_table: bool,
}

impl Resolvable for Options {
    const SECTION: &'static str = "gods_number";

    fn defaults(_paper_scale: bool) -> Self {
        Options {
            n: 2,
            phase_mode: "both".into(),
            weights: "unit".into(),
            moveset: None,
            allow_large: false,
            save_table: false,
        }
    }
}

#[derive(Serialize)]
struct ModeSummary {
    phase_mode: PhaseMode,
    node_count: usize,
    group_size: String,
    gods_number: f64,
}

#[derive(Serialize)]
struct Summary {
    n: usize,
    weights: String,
    moveset: String,
    results: Vec<ModeSummary>,
}

pub fn run(ctx: &Ctx, file: &ConfigFile, args: &Args) -> Result<()> {
    let opts: Options = resolve(file, args)?;
    let modes = match opts.phase_mode.as_str() {
        "both" => vec![PhaseMode::WithPhases, PhaseMode::Phaseless],
        other => vec![other.parse::<PhaseMode>().map_err(|e| usage(e.to_string()))?],
    };
    let ms = build_moveset(opts.n, &opts.weights, opts.moveset.as_deref())?;
    for &mode in &modes {
        cliffsynth::oracle::check_capacity(opts.n, mode, opts.allow_large)?;
    }
    ctx.echo("gods-number", &opts)?;

    let mut results = Vec::new();
    for mode in modes {
        let table =
            build_distance_table(&ms, mode, OracleOptions { allow_large: opts.allow_large, ..Default::default() })?;
        let god = gods_number(&table)?;
        let mut csv = Vec::new();
        table.write_histogram_csv(&mut csv)?;
        ctx.write(&format!("gods_n{}_{}.csv", opts.n, mode), &csv)?;
        if opts.save_table {
            let path = ctx.path(&format!("table_n{}_{}.dist", opts.n, mode));
            std::fs::create_dir_all(&ctx.out_dir)?;
            table.save(&path)?;
        }
        println!("n={} {mode}: nodes={} gods_number={god}", opts.n, table.node_count());
        print!("{}", String::from_utf8_lossy(&csv));
        results.push(ModeSummary {
            phase_mode: mode,
            node_count: table.node_count(),
            group_size: clifford_group_size(opts.n, mode.has_phases()).to_string(),
            gods_number: god,
        });
    }
    let summary = Summary { n: opts.n, weights: ms.scheme().name().into(), moveset: ms.fingerprint(), results };
    let mut json = serde_json::to_string_pretty(&summary)?;
    json.push('\n');
    ctx.write(&format!("gods_n{}.json", opts.n), json.as_bytes())?;
    Ok(())
}
