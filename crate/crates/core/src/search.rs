//! Guidance-driven synthesis by greedy descent and beam search.
//!
//! Both searches start from `y = x⁻¹` and apply moves on the right until `y`
//! is the identity. The applied moves `G1 … Gk` then satisfy
//! `x = G1 ⋯ Gk`, so replaying them from the identity rebuilds `x`.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt::Write as _;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::guidance::GuidanceModel;
use crate::moveset::{Move, MoveSet};
use crate::oracle::DistanceTable;
use crate::tableau::{Gate, GateKind, Tableau};

pub const DEFAULT_VISITED_CAP: usize = 10_000_000;

type CustomFn<'a> = Box<dyn Fn(&Tableau) -> f64 + Send + Sync + 'a>;

/// Scores a tableau; smaller means closer to the identity.
pub enum GuidanceSource<'a> {
    Learned(&'a GuidanceModel),
    /// Exact remaining cost from a distance table.
    Exact(&'a DistanceTable),
    Custom(CustomFn<'a>),
}

impl<'a> GuidanceSource<'a> {
    pub fn custom(f: impl Fn(&Tableau) -> f64 + Send + Sync + 'a) -> Self {
        GuidanceSource::Custom(Box::new(f))
    }

    /// Number of tableau bits that differ from the identity.
    pub fn hamming() -> Self {
        GuidanceSource::custom(|t: &Tableau| {
            let diag: u32 = t.rows().iter().enumerate().map(|(r, &row)| (row ^ (1u64 << r)).count_ones()).sum();
            (diag + t.phases().unwrap_or(0).count_ones()) as f64
        })
    }

    pub fn evaluate(&self, tableaus: &[Tableau]) -> Result<Vec<f64>> {
        match self {
            GuidanceSource::Learned(m) => m.evaluate(tableaus),
            GuidanceSource::Exact(table) => tableaus
                .iter()
                .map(|t| {
                    // Cost to reach the identity from `t` is the cost to build `t⁻¹`.
                    table.distance(&t.inverse()?)
                })
                .collect(),
            GuidanceSource::Custom(f) => Ok(tableaus.iter().map(f).collect()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureReason {
    StepLimit,
    BeamExhausted,
    VisitedCap,
}

impl FailureReason {
    pub fn name(self) -> &'static str {
        match self {
            FailureReason::StepLimit => "step_limit",
            FailureReason::BeamExhausted => "beam_exhausted",
            FailureReason::VisitedCap => "visited_cap",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SynthesisResult {
    pub success: bool,
    /// The decomposition on success; for a failed greedy run, the moves made.
    pub gates: Vec<Move>,
    pub weighted_cost: f64,
    pub cnot_count: usize,
    /// Moves made (greedy) or generations run (beam).
    pub steps_taken: usize,
    pub nodes_expanded: usize,
    pub wall_time: Duration,
    pub failure: Option<FailureReason>,
}

impl SynthesisResult {
    fn finish(gates: Vec<Move>, steps: usize, expanded: usize, start: Instant, failure: Option<FailureReason>) -> Self {
        let weighted_cost = gates.iter().map(|m| m.weight).sum();
        let cnot_count = gates.iter().filter(|m| m.kind() == GateKind::Cnot).count();
        SynthesisResult {
            success: failure.is_none(),
            gates,
            weighted_cost,
            cnot_count,
            steps_taken: steps,
            nodes_expanded: expanded,
            wall_time: start.elapsed(),
            failure,
        }
    }

    pub fn to_record(&self) -> DecompositionRecord {
        DecompositionRecord {
            success: self.success,
            gates: self.gates.iter().map(|m| m.gate.to_string()).collect(),
            weighted_cost: self.weighted_cost,
            cnot_count: self.cnot_count,
            steps_taken: self.steps_taken,
            nodes_expanded: self.nodes_expanded,
            failure: self.failure,
        }
    }

    /// One gate per line followed by a `# cost=… cnots=… steps=…` line.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for m in &self.gates {
            let _ = writeln!(s, "{}", m.gate);
        }
        let _ = writeln!(s, "# cost={} cnots={} steps={}", self.weighted_cost, self.cnot_count, self.steps_taken);
        if let Some(f) = self.failure {
            let _ = writeln!(s, "# failed={}", f.name());
        }
        s
    }
}

/// JSON form of a result; excludes timing so repeated runs compare equal.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecompositionRecord {
    pub success: bool,
    pub gates: Vec<String>,
    pub weighted_cost: f64,
    pub cnot_count: usize,
    pub steps_taken: usize,
    pub nodes_expanded: usize,
    pub failure: Option<FailureReason>,
}

/// Reads gates from the text format, skipping blank and `#` lines.
pub fn parse_decomposition(text: &str) -> Result<Vec<Gate>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
        .map(|(i, l)| l.trim().parse::<Gate>().map_err(|e| Error::Parse { line: i + 1, message: e.to_string() }))
        .collect()
}

/// Whether the gates, applied in order from the identity, produce `x`.
pub fn verify_decomposition(x: &Tableau, gates: &[Move]) -> bool {
    let mut t = match Tableau::identity(x.n(), x.phase_mode()) {
        Ok(t) => t,
        Err(_) => return false,
    };
    for m in gates {
        if t.apply_gate_mut(&m.gate).is_err() {
            return false;
        }
    }
    t == *x
}

fn start_node(x: &Tableau, ms: &MoveSet) -> Result<Tableau> {
    if x.n() != ms.n() {
        return Err(Error::DimensionMismatch { expected: ms.n(), actual: x.n() });
    }
    if !x.is_symplectic() {
        return Err(Error::NotSymplectic);
    }
    x.inverse()
}

fn check_scores(scores: &[f64]) -> Result<()> {
    match scores.iter().find(|v| v.is_nan()) {
        Some(_) => Err(Error::Guidance("guidance returned NaN".into())),
        None => Ok(()),
    }
}

/// Greedy descent: at each step take the neighbor with the smallest
/// guidance value, breaking exact ties uniformly at random.
pub fn greedy_synthesize<R: Rng + ?Sized>(
    x: &Tableau,
    ms: &MoveSet,
    g: &GuidanceSource<'_>,
    max_steps: usize,
    rng: &mut R,
) -> Result<SynthesisResult> {
    let start = Instant::now();
    let mut y = start_node(x, ms)?;
    let mut gates = Vec::new();
    let mut expanded = 0;
    while !y.is_identity() {
        if gates.len() >= max_steps {
            return Ok(SynthesisResult::finish(gates, max_steps, expanded, start, Some(FailureReason::StepLimit)));
        }
        let neighbors = ms.neighbor_tableaus(&y);
        let scores = g.evaluate(&neighbors)?;
        check_scores(&scores)?;
        expanded += 1;
        let best = scores.iter().copied().fold(f64::INFINITY, f64::min);
        let ties: Vec<usize> = (0..scores.len()).filter(|&i| scores[i] == best).collect();
        let pick = if ties.len() == 1 { ties[0] } else { ties[rng.gen_range(0..ties.len())] };
        gates.push(ms.moves()[pick]);
        y = neighbors.into_iter().nth(pick).expect("index in range");
    }
    let steps = gates.len();
    Ok(SynthesisResult::finish(gates, steps, expanded, start, None))
}

pub fn beam_synthesize<R: Rng + ?Sized>(
    x: &Tableau,
    ms: &MoveSet,
    g: &GuidanceSource<'_>,
    width: usize,
    max_steps: usize,
    rng: &mut R,
) -> Result<SynthesisResult> {
    beam_synthesize_capped(x, ms, g, width, max_steps, DEFAULT_VISITED_CAP, rng)
}

/// Beam search keeping the `width` best unvisited neighbors of the current
/// beam each generation. `usize::MAX` keeps every node, giving breadth-first
/// search. Fails once more than `visited_cap` tableaus have been seen.
pub fn beam_synthesize_capped<R: Rng + ?Sized>(
    x: &Tableau,
    ms: &MoveSet,
    g: &GuidanceSource<'_>,
    width: usize,
    max_steps: usize,
    visited_cap: usize,
    rng: &mut R,
) -> Result<SynthesisResult> {
    if width == 0 {
        return Err(Error::InvalidConfig("beam width must be at least 1".into()));
    }
    let start = Instant::now();
    let y = start_node(x, ms)?;
    if y.is_identity() {
        return Ok(SynthesisResult::finish(Vec::new(), 0, 0, start, None));
    }

    // Predecessor links: (parent arena index, move index); the root has none.
    let mut arena: Vec<Option<(usize, usize)>> = vec![None];
    let path = |arena: &[Option<(usize, usize)>], mut node: usize, last: usize| {
        let mut moves = vec![ms.moves()[last]];
        while let Some((parent, mv)) = arena[node] {
            moves.push(ms.moves()[mv]);
            node = parent;
        }
        moves.reverse();
        moves
    };

    let mut visited = HashSet::from([y.clone()]);
    let mut beam = vec![(y, 0usize)];
    let mut expanded = 0;
    let mut generation = 0;
    while !beam.is_empty() {
        if generation >= max_steps {
            return Ok(SynthesisResult::finish(
                Vec::new(),
                generation,
                expanded,
                start,
                Some(FailureReason::StepLimit),
            ));
        }
        generation += 1;
        let mut candidates = Vec::new();
        let mut links = Vec::new();
        for (node, id) in &beam {
            expanded += 1;
            for (mi, m) in ms.moves().iter().enumerate() {
                let mut next = node.clone();
                next.apply_unchecked(&m.gate);
                if next.is_identity() {
                    let gates = path(&arena, *id, mi);
                    return Ok(SynthesisResult::finish(gates, generation, expanded, start, None));
                }
                if !visited.contains(&next) {
                    if visited.len() >= visited_cap {
                        return Ok(SynthesisResult::finish(
                            Vec::new(),
                            generation,
                            expanded,
                            start,
                            Some(FailureReason::VisitedCap),
                        ));
                    }
                    visited.insert(next.clone());
                    candidates.push(next);
                    links.push((*id, mi));
                }
            }
        }
        let keep = if candidates.len() <= width {
            (0..candidates.len()).collect()
        } else {
            let scores = g.evaluate(&candidates)?;
            check_scores(&scores)?;
            top_ranked(&scores, width, rng)
        };
        let mut slots: Vec<Option<Tableau>> = candidates.into_iter().map(Some).collect();
        beam = keep
            .into_iter()
            .map(|i| {
                arena.push(Some(links[i]));
                (slots[i].take().expect("kept once"), arena.len() - 1)
            })
            .collect();
    }
    Ok(SynthesisResult::finish(Vec::new(), generation, expanded, start, Some(FailureReason::BeamExhausted)))
}

/// Indices of the `w` smallest scores. Among equal scores straddling the
/// cutoff the kept ones are chosen uniformly at random.
fn top_ranked<R: Rng + ?Sized>(scores: &[f64], w: usize, rng: &mut R) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].partial_cmp(&scores[b]).unwrap_or(Ordering::Equal).then(a.cmp(&b)));
    let cutoff = scores[order[w - 1]];
    let below = order.iter().take_while(|&&i| scores[i] < cutoff).count();
    let mut tied: Vec<usize> = order[below..].iter().copied().take_while(|&i| scores[i] == cutoff).collect();
    let mut kept = order[..below].to_vec();
    if tied.len() > w - below {
        let (chosen, _) = tied.partial_shuffle(rng, w - below);
        let mut chosen = chosen.to_vec();
        chosen.sort_unstable();
        kept.extend(chosen);
    } else {
        kept.append(&mut tied);
    }
    kept
}
