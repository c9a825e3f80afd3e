//! A deterministic canonical-form synthesizer and the benchmark harness that
//! compares search methods against it.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::moveset::{Move, MoveSet};
use crate::rng::{self, domain};
use crate::search::{beam_synthesize, greedy_synthesize, verify_decomposition, GuidanceSource};
use crate::tableau::{Gate, GateKind, Tableau};

pub const BASELINE_TAG: &str = "canonical-elimination";

#[derive(Clone, Debug, PartialEq)]
pub struct BaselineResult {
    pub gates: Vec<Move>,
    pub cnot_count: usize,
    pub weighted_cost: f64,
    pub method_tag: &'static str,
}

/// Synthesizes `x` by Gaussian elimination, priced with the move set's
/// weights. Fails if the elimination needs a gate the move set lacks.
pub fn baseline_synthesize(x: &Tableau, ms: &MoveSet) -> Result<BaselineResult> {
    if x.n() != ms.n() {
        return Err(Error::DimensionMismatch { expected: ms.n(), actual: x.n() });
    }
    let gates = ms.moves_for(&x.to_circuit()?)?;
    Ok(BaselineResult {
        cnot_count: gates.iter().filter(|m| m.kind() == GateKind::Cnot).count(),
        weighted_cost: gates.iter().map(|m| m.weight).sum(),
        gates,
        method_tag: BASELINE_TAG,
    })
}

/// Upper bound on the baseline's output length for `n` qubits.
pub fn baseline_length_bound(n: usize) -> usize {
    5 * n * (n.saturating_sub(1)) / 2 + 8 * n
}

pub enum MethodKind<'a> {
    Baseline,
    Greedy {
        guidance: &'a GuidanceSource<'a>,
        max_steps: usize,
    },
    Beam {
        guidance: &'a GuidanceSource<'a>,
        width: usize,
        max_steps: usize,
    },
    /// Decompositions produced elsewhere, one per instance; `None` marks a
    /// failure.
    External(&'a [Option<Vec<Gate>>]),
}

pub struct Method<'a> {
    pub label: String,
    pub kind: MethodKind<'a>,
}

impl<'a> Method<'a> {
    pub fn new(label: impl Into<String>, kind: MethodKind<'a>) -> Self {
        Method { label: label.into(), kind }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Outcome {
    pub success: bool,
    pub cost: f64,
    pub cnot_count: usize,
}

const FAILED: Outcome = Outcome { success: false, cost: 0.0, cnot_count: 0 };

/// One row of the comparison table. Percentages are `None` (N/A) when no
/// instance meets the conditioning requirement.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub n: usize,
    pub method: String,
    pub instances: usize,
    pub success_pct: f64,
    pub lt_baseline_pct: Option<f64>,
    pub le_baseline_pct: Option<f64>,
    pub mean_reduction_pct: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CurvePoint {
    pub n: usize,
    pub method: String,
    pub cost: f64,
    pub fraction_solved: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchmarkReport {
    pub n: usize,
    pub rows: Vec<ComparisonRow>,
    pub curves: Vec<CurvePoint>,
    /// `outcomes[m][i]`: method `m` on instance `i`; method 0 is the baseline.
    #[serde(skip)]
    pub outcomes: Vec<Vec<Outcome>>,
    #[serde(skip)]
    pub labels: Vec<String>,
}

fn run_method(
    method: &Method<'_>,
    x: &Tableau,
    index: usize,
    method_index: usize,
    ms: &MoveSet,
    seed: u64,
) -> Result<Outcome> {
    let mut r = rng::stream(seed, &[domain::BENCH_METHODS, index as u64, method_index as u64]);
    let from_search = |res: crate::search::SynthesisResult| {
        if !res.success {
            return Ok(FAILED);
        }
        if !verify_decomposition(x, &res.gates) {
            return Err(Error::Guidance(format!("method '{}' returned an invalid decomposition", method.label)));
        }
        Ok(Outcome { success: true, cost: res.weighted_cost, cnot_count: res.cnot_count })
    };
    match &method.kind {
        MethodKind::Baseline => {
            let b = baseline_synthesize(x, ms)?;
            Ok(Outcome { success: true, cost: b.weighted_cost, cnot_count: b.cnot_count })
        }
        MethodKind::Greedy { guidance, max_steps } => {
            from_search(greedy_synthesize(x, ms, guidance, *max_steps, &mut r)?)
        }
        MethodKind::Beam { guidance, width, max_steps } => {
            from_search(beam_synthesize(x, ms, guidance, *width, *max_steps, &mut r)?)
        }
        MethodKind::External(all) => match all.get(index).and_then(Option::as_ref) {
            None => Ok(FAILED),
            Some(gates) => {
                let moves = ms.moves_for(gates)?;
                if !verify_decomposition(x, &moves) {
                    log::warn!("external decomposition {index} does not reproduce its instance");
                    return Ok(FAILED);
                }
                Ok(Outcome {
                    success: true,
                    cost: moves.iter().map(|m| m.weight).sum(),
                    cnot_count: moves.iter().filter(|m| m.kind() == GateKind::Cnot).count(),
                })
            }
        },
    }
}

fn pct(num: usize, den: usize) -> f64 {
    100.0 * num as f64 / den as f64
}

/// Runs the baseline and every method on every instance and tabulates
/// success rates and costs relative to the baseline.
pub fn benchmark_compare(
    instances: &[Tableau],
    ms: &MoveSet,
    methods: &[Method<'_>],
    seed: u64,
) -> Result<BenchmarkReport> {
    if instances.is_empty() {
        return Err(Error::Empty("benchmark instances"));
    }
    let n = ms.n();
    let baseline = Method::new("baseline", MethodKind::Baseline);
    let all: Vec<&Method<'_>> = std::iter::once(&baseline).chain(methods).collect();

    let per_instance: Vec<Vec<Outcome>> = instances
        .par_iter()
        .enumerate()
        .map(|(i, x)| all.iter().enumerate().map(|(j, m)| run_method(m, x, i, j, ms, seed)).collect())
        .collect::<Result<_>>()?;
    let outcomes: Vec<Vec<Outcome>> = (0..all.len()).map(|j| per_instance.iter().map(|row| row[j]).collect()).collect();

    let base = &outcomes[0];
    let total = instances.len();
    let mut rows = Vec::new();
    let mut curves = Vec::new();
    for (j, m) in all.iter().enumerate() {
        let res = &outcomes[j];
        let solved: Vec<usize> = (0..total).filter(|&i| res[i].success).collect();
        let (mut lt, mut le, mut reductions) = (0, 0, Vec::new());
        for &i in &solved {
            let (lm, lb) = (res[i].cost, base[i].cost);
            if lm < lb {
                lt += 1;
                reductions.push((lb - lm) / lb);
            }
            if lm <= lb {
                le += 1;
            }
        }
        let compare = j > 0 && !solved.is_empty();
        rows.push(ComparisonRow {
            n,
            method: m.label.clone(),
            instances: total,
            success_pct: pct(solved.len(), total),
            lt_baseline_pct: compare.then(|| pct(lt, solved.len())),
            le_baseline_pct: compare.then(|| pct(le, solved.len())),
            mean_reduction_pct: (j > 0 && !reductions.is_empty())
                .then(|| 100.0 * reductions.iter().sum::<f64>() / reductions.len() as f64),
        });

        let mut costs: Vec<f64> = solved.iter().map(|&i| res[i].cost).collect();
        costs.sort_by(f64::total_cmp);
        let mut k = 0;
        while k < costs.len() {
            let c = costs[k];
            while k < costs.len() && costs[k] == c {
                k += 1;
            }
            curves.push(CurvePoint { n, method: m.label.clone(), cost: c, fraction_solved: k as f64 / total as f64 });
        }
    }
    Ok(BenchmarkReport { n, rows, curves, outcomes, labels: all.iter().map(|m| m.label.clone()).collect() })
}

fn cell(v: Option<f64>) -> String {
    v.map_or_else(|| "N/A".to_string(), |x| format!("{x:.2}"))
}

pub const COMPARISON_HEADER: &str = "n,method,instances,success_pct,lt_baseline_pct,le_baseline_pct,mean_reduction_pct";

pub fn write_comparison_csv<W: Write>(mut w: W, rows: &[ComparisonRow]) -> Result<()> {
    writeln!(w, "{COMPARISON_HEADER}")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{:.2},{},{},{}",
            r.n,
            r.method,
            r.instances,
            r.success_pct,
            cell(r.lt_baseline_pct),
            cell(r.le_baseline_pct),
            cell(r.mean_reduction_pct)
        )?;
    }
    Ok(())
}

pub fn write_curves_csv<W: Write>(mut w: W, points: &[CurvePoint]) -> Result<()> {
    writeln!(w, "n,method,cost,fraction_solved")?;
    for p in points {
        writeln!(w, "{},{},{},{}", p.n, p.method, p.cost, p.fraction_solved)?;
    }
    Ok(())
}
