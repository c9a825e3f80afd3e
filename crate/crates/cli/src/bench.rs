use std::path::PathBuf;

use anyhow::{Context, Result};
use cliffsynth::baseline::{write_comparison_csv, write_curves_csv, BenchmarkReport};
use cliffsynth::guidance::load_model_for;
use cliffsynth::oracle::{build_distance_table, check_capacity, OracleOptions};
use cliffsynth::rng::{self, domain};
use cliffsynth::search::{parse_decomposition, GuidanceSource};
use cliffsynth::walker::{sample_walk, Scaling, WalkConfig};
use cliffsynth::{benchmark_compare, Gate, Method, MethodKind, PhaseMode, Tableau};
use serde::{Deserialize, Serialize};

use crate::common::{build_moveset, check_n, usage, Ctx};
use crate::config::{is_false, resolve, ConfigFile, Resolvable};

/// Compare synthesis methods against the baseline on random instances.
#[derive(clap::Args, Serialize)]
pub struct Args {
    /// Qubit counts, comma separated.
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    n: Option<Vec<usize>>,
    /// Directory holding model_n<N>.json files; defaults to the output directory.
    #[arg(long)]
    model_dir: Option<PathBuf>,
    #[arg(long)]
    instances: Option<usize>,
    #[arg(long)]
    max_steps: Option<usize>,
    #[arg(long)]
    beam_width: Option<usize>,
    /// Methods besides the baseline: greedy, beam, exact, external.
    /// `exact` runs the beam on exact distances where a table fits.
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    methods: Option<Vec<String>>,
    #[arg(long)]
    scaling: Option<Scaling>,
    #[arg(long)]
    phase_mode: Option<PhaseMode>,
    #[arg(long)]
    weights: Option<String>,
    #[arg(long)]
    moveset: Option<PathBuf>,
    /// Directory of external decompositions, laid out as n<N>/<index>.txt.
    #[arg(long)]
    external_dir: Option<PathBuf>,
    /// Allow the large n=3 phaseless table for the exact method.
    #[arg(long)]
    #[serde(skip_serializing_if = "is_false")]
    allow_large: bool,
    /// Use the full-size instance count and step limit.
    #[arg(long)]
    #[serde(skip_serializing_if = "is_false")]
    paper_scale: bool,
}

#[derive(Serialize, Deserialize)]
pub struct Options {
    pub n: Vec<usize>,
    pub model_dir: Option<PathBuf>,
    pub instances: usize,
    pub max_steps: usize,
    pub beam_width: usize,
    pub methods: Vec<String>,
    pub scaling: Scaling,
    pub phase_mode: PhaseMode,
    pub weights: String,
    pub moveset: Option<PathBuf>,
    pub external_dir: Option<PathBuf>,
    pub allow_large: bool,
    pub paper_scale: bool,
}

impl Resolvable for Options {
    const SECTION: &'static str = "bench";

    fn defaults(paper_scale: bool) -> Self {
        Options {
            n: vec![3],
            model_dir: None,
            instances: if paper_scale { 20_000 } else { 200 },
            max_steps: if paper_scale { 1000 } else { 200 },
            beam_width: 3,
            methods: vec!["greedy".into(), "beam".into(), "exact".into()],
            scaling: Scaling::LogLinear,
            phase_mode: PhaseMode::WithPhases,
            weights: "cnot_count".into(),
            moveset: None,
            external_dir: None,
            allow_large: false,
            paper_scale,
        }
    }
}

const KNOWN_METHODS: [&str; 4] = ["greedy", "beam", "exact", "external"];

fn load_external(dir: &std::path::Path, n: usize, count: usize) -> Result<Vec<Option<Vec<Gate>>>> {
    let sub = dir.join(format!("n{n}"));
    (0..count)
        .map(|i| {
            let path = sub.join(format!("{i}.txt"));
            if !path.exists() {
                return Ok(None);
            }
            let text = std::fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
            Ok(Some(parse_decomposition(&text).with_context(|| format!("parsing {}", path.display()))?))
        })
        .collect()
}

fn run_one(ctx: &Ctx, opts: &Options, n: usize) -> Result<BenchmarkReport> {
    let ms = build_moveset(n, &opts.weights, opts.moveset.as_deref())?;
    let wants = |m: &str| opts.methods.iter().any(|x| x == m);

    let model = if wants("greedy") || wants("beam") {
        let dir = opts.model_dir.clone().unwrap_or_else(|| ctx.out_dir.clone());
        let path = dir.join(format!("model_n{n}.json"));
        if !path.exists() {
            return Err(usage(format!(
                "no model for n={n}: {} not found (run `cliffsynth train --n {n}` first)",
                path.display()
            )));
        }
        let m = load_model_for(&path, n).with_context(|| format!("loading {}", path.display()))?;
        if m.meta.phase_mode.has_phases() && !opts.phase_mode.has_phases() {
            return Err(usage(format!("{} needs phases but --phase-mode is phaseless", path.display())));
        }
        if m.meta.moveset_fingerprint != ms.fingerprint() {
            log::warn!("{} was trained with a different move set", path.display());
        }
        Some(m)
    } else {
        None
    };

    let table = if wants("exact") {
        match check_capacity(n, opts.phase_mode, opts.allow_large) {
            Ok(()) => Some(build_distance_table(
                &ms,
                opts.phase_mode,
                OracleOptions { allow_large: opts.allow_large, ..Default::default() },
            )?),
            Err(e) => {
                log::warn!("skipping exact method for n={n}: {e}");
                None
            }
        }
    } else {
        None
    };

    let external = match (&opts.external_dir, wants("external")) {
        (Some(dir), true) => Some(load_external(dir, n, opts.instances)?),
        (None, true) => return Err(usage("the external method needs --external-dir")),
        _ => None,
    };

    let cfg = WalkConfig::new(n, opts.scaling, ctx.seed, opts.phase_mode);
    let instances: Vec<Tableau> = (0..opts.instances)
        .map(|i| {
            let mut r = rng::stream(ctx.seed, &[domain::BENCH_INSTANCES, n as u64, i as u64]);
            sample_walk(&cfg, &ms, &mut r).map(|w| w.tableau)
        })
        .collect::<cliffsynth::Result<_>>()?;
    let listing: String = instances.iter().map(Tableau::to_text).collect();
    ctx.write(&format!("instances_n{n}.txt"), listing.as_bytes())?;

    let learned = model.as_ref().map(GuidanceSource::Learned);
    let exact = table.as_ref().map(GuidanceSource::Exact);
    let mut methods = Vec::new();
    for name in &opts.methods {
        match name.as_str() {
            "greedy" => methods.push(Method::new(
                "greedy",
                MethodKind::Greedy { guidance: learned.as_ref().expect("model loaded"), max_steps: opts.max_steps },
            )),
            "beam" => methods.push(Method::new(
                format!("beam-w{}", opts.beam_width),
                MethodKind::Beam {
                    guidance: learned.as_ref().expect("model loaded"),
                    width: opts.beam_width,
                    max_steps: opts.max_steps,
                },
            )),
            "exact" => {
                if let Some(g) = &exact {
                    methods.push(Method::new(
                        format!("exact-w{}", opts.beam_width),
                        MethodKind::Beam { guidance: g, width: opts.beam_width, max_steps: opts.max_steps },
                    ));
                }
            }
            "external" => methods.push(Method::new("external", MethodKind::External(external.as_deref().unwrap()))),
            _ => unreachable!("methods are validated"),
        }
    }
    benchmark_compare(&instances, &ms, &methods, ctx.seed).map_err(Into::into)
}

pub fn run(ctx: &Ctx, file: &ConfigFile, args: &Args) -> Result<()> {
    let opts: Options = resolve(file, args)?;
    if opts.n.is_empty() {
        return Err(usage("--n needs at least one qubit count"));
    }
    for &n in &opts.n {
        check_n(n)?;
    }
    if opts.instances == 0 {
        return Err(usage("--instances must be positive"));
    }
    if let Some(bad) = opts.methods.iter().find(|m| !KNOWN_METHODS.contains(&m.as_str())) {
        return Err(usage(format!("unknown method '{bad}'; expected one of {}", KNOWN_METHODS.join(", "))));
    }
    ctx.echo("bench", &opts)?;

    let mut reports = Vec::new();
    for &n in &opts.n {
        let report = run_one(ctx, &opts, n)?;
        for row in &report.rows {
            let show = |v: Option<f64>| v.map_or_else(|| "N/A".to_string(), |x| format!("{x:.2}"));
            println!(
                "n={} {:<10} solved {:>6.2}%  <baseline {:>6}%  <=baseline {:>6}%  mean reduction {:>6}%",
                row.n,
                row.method,
                row.success_pct,
                show(row.lt_baseline_pct),
                show(row.le_baseline_pct),
                show(row.mean_reduction_pct)
            );
        }
        reports.push(report);
    }

    let rows: Vec<_> = reports.iter().flat_map(|r| r.rows.iter().cloned()).collect();
    let curves: Vec<_> = reports.iter().flat_map(|r| r.curves.iter().cloned()).collect();
    let mut csv = Vec::new();
    write_comparison_csv(&mut csv, &rows)?;
    ctx.write("comparison.csv", &csv)?;
    let mut json = serde_json::to_string_pretty(&reports)?;
    json.push('\n');
    ctx.write("comparison.json", json.as_bytes())?;
    let mut csv = Vec::new();
    write_curves_csv(&mut csv, &curves)?;
    ctx.write("curves.csv", &csv)?;
    Ok(())
}
