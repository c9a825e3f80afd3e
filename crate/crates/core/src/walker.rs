//! Random walks on the Cayley graph.
//!
//! A walk of length `L ~ U{1..L_max}` applies `L` moves drawn uniformly from
//! the move set to the identity. The summed move weights bound the true
//! distance of the endpoint from above, which is the training target.
//! Endpoints are not uniform over the group.

use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::moveset::MoveSet;
use crate::rng::{self, domain};
use crate::tableau::{PhaseMode, Tableau};

/// Batches whose upper bounds are all equal are redrawn at most this often.
const MAX_RESAMPLES: u64 = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scaling {
    Linear,
    LogLinear,
}

impl Scaling {
    /// `round(10 n)` or `round(10 n log2 n)`, halves rounded up.
    pub fn max_length(self, n: usize) -> usize {
        let n_f = n as f64;
        let raw = match self {
            Scaling::Linear => 10.0 * n_f,
            Scaling::LogLinear => 10.0 * n_f * n_f.log2(),
        };
        (raw + 0.5).floor() as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Scaling::Linear => "linear",
            Scaling::LogLinear => "loglinear",
        }
    }
}

impl fmt::Display for Scaling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scaling {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "linear" => Ok(Scaling::Linear),
            "loglinear" => Ok(Scaling::LogLinear),
            other => Err(Error::InvalidConfig(format!("unknown scaling '{other}'"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WalkConfig {
    pub n: usize,
    pub scaling: Scaling,
    #[serde(default)]
    pub lmax_override: Option<usize>,
    pub seed: u64,
    pub phase_mode: PhaseMode,
    /// Never follow a move with its own inverse. Off by default.
    #[serde(default)]
    pub prune_inverse: bool,
}

impl WalkConfig {
    pub fn new(n: usize, scaling: Scaling, seed: u64, phase_mode: PhaseMode) -> Self {
        WalkConfig { n, scaling, lmax_override: None, seed, phase_mode, prune_inverse: false }
    }

    pub fn lmax(&self) -> usize {
        self.lmax_override.unwrap_or_else(|| self.scaling.max_length(self.n))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WalkSample {
    pub tableau: Tableau,
    /// Summed weight of the walk, an upper bound on the distance to identity.
    pub ub_distance: f64,
    pub walk_length: usize,
    /// Move-set indices of the walk, in order.
    pub gates: Vec<usize>,
}

impl WalkSample {
    /// Replays the recorded walk from the identity.
    pub fn replay(&self, ms: &MoveSet) -> Result<Tableau> {
        let mut t = Tableau::identity(ms.n(), self.tableau.phase_mode())?;
        for &i in &self.gates {
            let m = ms.moves().get(i).ok_or_else(|| Error::InvalidConfig(format!("move index {i} out of range")))?;
            t.apply_gate_mut(&m.gate)?;
        }
        Ok(t)
    }
}

fn check(cfg: &WalkConfig, ms: &MoveSet) -> Result<usize> {
    if cfg.n != ms.n() {
        return Err(Error::DimensionMismatch { expected: cfg.n, actual: ms.n() });
    }
    if ms.is_empty() {
        return Err(Error::InvalidMoveSet("empty move set".into()));
    }
    let lmax = cfg.lmax();
    if lmax < 1 {
        return Err(Error::InvalidConfig(format!("L_max must be at least 1, got {lmax}")));
    }
    Ok(lmax)
}

/// Draws one walk: length uniform in `1..=L_max`, moves uniform over `ms`.
pub fn sample_walk<R: Rng + ?Sized>(cfg: &WalkConfig, ms: &MoveSet, rng: &mut R) -> Result<WalkSample> {
    let lmax = check(cfg, ms)?;
    let length = rng.gen_range(1..=lmax);
    walk_of_length(cfg, ms, length, rng)
}

/// A walk of fixed length with uniformly drawn moves.
pub fn walk_of_length<R: Rng + ?Sized>(
    cfg: &WalkConfig,
    ms: &MoveSet,
    length: usize,
    rng: &mut R,
) -> Result<WalkSample> {
    check(cfg, ms)?;
    let mut tableau = Tableau::identity(cfg.n, cfg.phase_mode)?;
    let mut gates: Vec<usize> = Vec::with_capacity(length);
    let mut ub = 0.0;
    let moves = ms.moves();
    for _ in 0..length {
        let mut idx = rng.gen_range(0..moves.len());
        if cfg.prune_inverse && moves.len() > 1 {
            if let Some(&prev) = gates.last() {
                let undo = moves[prev].gate.inverse();
                while moves[idx].gate == undo {
                    idx = rng.gen_range(0..moves.len());
                }
            }
        }
        tableau.apply_unchecked(&moves[idx].gate);
        ub += moves[idx].weight;
        gates.push(idx);
    }
    Ok(WalkSample { tableau, ub_distance: ub, walk_length: length, gates })
}

/// `batch_size` independent walks for batch number `batch_index`.
///
/// Sample `i` of attempt `a` draws from the stream
/// `(cfg.seed, [WALK_BATCH, batch_index, a, i])`, so serial and parallel
/// generation agree. A batch with zero variance in the upper bounds is
/// redrawn with the next attempt number.
pub fn sample_batch(cfg: &WalkConfig, ms: &MoveSet, batch_size: usize, batch_index: u64) -> Result<Vec<WalkSample>> {
    if batch_size < 2 {
        return Err(Error::InvalidConfig(format!("batch size must be at least 2, got {batch_size}")));
    }
    check(cfg, ms)?;
    for attempt in 0..MAX_RESAMPLES {
        let batch = (0..batch_size as u64)
            .into_par_iter()
            .map(|i| {
                let mut r = rng::stream(cfg.seed, &[domain::WALK_BATCH, batch_index, attempt, i]);
                sample_walk(cfg, ms, &mut r)
            })
            .collect::<Result<Vec<_>>>()?;
        let first = batch[0].ub_distance;
        if batch.iter().any(|s| s.ub_distance != first) {
            return Ok(batch);
        }
        log::debug!("batch {batch_index}: zero upper-bound variance, resampling");
    }
    Err(Error::ZeroVariance("walk upper bounds (all move weights equal zero?)"))
}

/// Header of a walk dataset file.
#[derive(Clone, Debug, PartialEq)]
pub struct DatasetHeader {
    pub n: usize,
    pub phase_mode: PhaseMode,
    pub scaling: Scaling,
    pub lmax: usize,
    pub seed: u64,
    pub count: usize,
    pub moveset: String,
}

impl DatasetHeader {
    pub fn new(cfg: &WalkConfig, ms: &MoveSet, count: usize) -> Self {
        DatasetHeader {
            n: cfg.n,
            phase_mode: cfg.phase_mode,
            scaling: cfg.scaling,
            lmax: cfg.lmax(),
            seed: cfg.seed,
            count,
            moveset: ms.fingerprint(),
        }
    }
}

/// Writes a dataset: one header line, then per sample the tableau text block,
/// a `ub=<decimal>` line and a `gates=<indices>` line.
pub fn write_dataset<W: Write>(mut w: W, header: &DatasetHeader, samples: &[WalkSample]) -> Result<()> {
    writeln!(
        w,
        "walks n={} phase_mode={} scaling={} lmax={} seed={} count={} moveset={}",
        header.n, header.phase_mode, header.scaling, header.lmax, header.seed, header.count, header.moveset
    )?;
    for s in samples {
        w.write_all(s.tableau.to_text().as_bytes())?;
        writeln!(w, "ub={}", s.ub_distance)?;
        let gates: Vec<String> = s.gates.iter().map(|g| g.to_string()).collect();
        writeln!(w, "gates={}", gates.join(" "))?;
    }
    Ok(())
}

pub fn read_dataset<R: BufRead>(r: R) -> Result<(DatasetHeader, Vec<WalkSample>)> {
    let text: Vec<String> = r.lines().collect::<std::io::Result<_>>()?;
    let mut lines = text.iter().map(String::as_str).peekable();
    let perr = |line: usize, message: String| Error::Parse { line, message };

    let first = lines.next().ok_or_else(|| perr(1, "empty dataset".into()))?;
    let mut fields = first.split_whitespace();
    if fields.next() != Some("walks") {
        return Err(perr(1, "missing 'walks' header".into()));
    }
    let mut get = std::collections::BTreeMap::new();
    for f in fields {
        let (k, v) = f.split_once('=').ok_or_else(|| perr(1, format!("bad field '{f}'")))?;
        get.insert(k, v);
    }
    let field = |k: &str| get.get(k).copied().ok_or_else(|| perr(1, format!("missing '{k}'")));
    let num =
        |k: &str| -> Result<u64> { field(k)?.parse::<u64>().map_err(|_| perr(1, format!("bad number for '{k}'"))) };
    let header = DatasetHeader {
        n: num("n")? as usize,
        phase_mode: field("phase_mode")?.parse()?,
        scaling: field("scaling")?.parse()?,
        lmax: num("lmax")? as usize,
        seed: num("seed")?,
        count: num("count")? as usize,
        moveset: field("moveset")?.to_string(),
    };

    let mut samples = Vec::with_capacity(header.count);
    let mut line_no = 2;
    let block = 1 + 2 * header.n + usize::from(header.phase_mode.has_phases());
    while lines.peek().is_some() {
        let tableau = Tableau::parse_lines(&mut lines, line_no)?;
        if tableau.n() != header.n || tableau.phase_mode() != header.phase_mode {
            return Err(perr(line_no, "record does not match header".into()));
        }
        line_no += block;
        let ub_line = lines.next().ok_or_else(|| perr(line_no, "missing ub line".into()))?;
        let ub_distance = ub_line
            .strip_prefix("ub=")
            .and_then(|v| v.parse::<f64>().ok())
            .ok_or_else(|| perr(line_no, format!("bad ub line '{ub_line}'")))?;
        line_no += 1;
        let g_line = lines.next().ok_or_else(|| perr(line_no, "missing gates line".into()))?;
        let gates = g_line
            .strip_prefix("gates=")
            .ok_or_else(|| perr(line_no, format!("bad gates line '{g_line}'")))?
            .split_whitespace()
            .map(|g| g.parse::<usize>().map_err(|_| perr(line_no, format!("bad gate index '{g}'"))))
            .collect::<Result<Vec<_>>>()?;
        line_no += 1;
        samples.push(WalkSample { tableau, ub_distance, walk_length: gates.len(), gates });
    }
    if samples.len() != header.count {
        return Err(perr(line_no, format!("header promises {} records, found {}", header.count, samples.len())));
    }
    Ok((header, samples))
}
