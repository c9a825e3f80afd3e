//! Generator sets (Cayley-graph edge alphabets) for a device.
//!
//! A [`MoveSet`] fixes the qubit count, the connectivity graph and the cost of
//! every generator. Move order is deterministic: single-qubit moves by qubit
//! then kind (X, Y, Z, H, S, S†), then CNOTs by `(control, target)`, then
//! SWAPs by sorted pair.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::tableau::{Gate, GateKind, PhaseMode, Tableau};

/// A generator together with its edge weight.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Move {
    pub gate: Gate,
    pub weight: f64,
}

impl Move {
    pub fn kind(&self) -> GateKind {
        self.gate.kind()
    }

    pub fn generator(&self, n: usize, mode: PhaseMode) -> Result<Tableau> {
        Tableau::from_gate(n, &self.gate, mode)
    }
}

/// Undirected qubit connectivity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Topology {
    n: usize,
    edges: BTreeSet<(usize, usize)>,
}

impl Topology {
    pub fn all_to_all(n: usize) -> Self {
        let edges = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
        Topology { n, edges }
    }

    pub fn line(n: usize) -> Self {
        Topology { n, edges: (1..n).map(|b| (b - 1, b)).collect() }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut set = BTreeSet::new();
        for &(a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::InvalidMoveSet(format!("edge ({a},{b}) references a qubit outside 0..{n}")));
            }
            if a == b {
                return Err(Error::InvalidMoveSet(format!("self-loop edge ({a},{a})")));
            }
            set.insert((a.min(b), a.max(b)));
        }
        Ok(Topology { n, edges: set })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn contains(&self, a: usize, b: usize) -> bool {
        self.edges.contains(&(a.min(b), a.max(b)))
    }
}

/// How measured fidelities turn into weights.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FidelityRule {
    /// A weight-w gate is as lossy as w copies of the reference gate:
    /// `f_ref^w = f`, so `w = ln f / ln f_ref`.
    #[default]
    Prose,
    /// The literal relation `f^w = f_ref`, so `w = ln f_ref / ln f`.
    Displayed,
}

/// Per-gate fidelities. Single-qubit entries hold one value per qubit;
/// missing single-qubit kinds count as perfect (fidelity 1).
#[derive(Clone, Debug, PartialEq)]
pub struct Fidelities {
    pub single: BTreeMap<GateKind, Vec<f64>>,
    pub cnot: BTreeMap<(usize, usize), f64>,
    /// Missing SWAP pairs fall back to the three-CNOT product.
    pub swap: BTreeMap<(usize, usize), f64>,
    pub reference: Gate,
    pub rule: FidelityRule,
}

#[derive(Clone, Debug, PartialEq)]
pub enum WeightScheme {
    Unit,
    /// Single-qubit gates 0, CNOT 1, SWAP 3: weighted length equals CNOT count.
    CnotCount,
    FidelityDerived(Fidelities),
}

impl WeightScheme {
    pub fn name(&self) -> &'static str {
        match self {
            WeightScheme::Unit => "unit",
            WeightScheme::CnotCount => "cnot_count",
            WeightScheme::FidelityDerived(_) => "fidelity",
        }
    }
}

/// Weight of a gate with fidelity `f_gate` relative to a reference gate with
/// fidelity `f_ref`: the number of reference-gate copies with the same
/// overall fidelity, `ln f_gate / ln f_ref`.
pub fn weight_from_fidelity(f_gate: f64, f_ref: f64) -> Result<f64> {
    check_fidelity(f_gate)?;
    if !(f_ref > 0.0 && f_ref < 1.0) {
        return Err(Error::InvalidFidelity(format!("reference fidelity must lie in (0,1), got {f_ref}")));
    }
    Ok(f_gate.ln() / f_ref.ln())
}

/// The literal `f_gate^w = f_ref` reading: `w = ln f_ref / ln f_gate`.
pub fn weight_from_fidelity_displayed(f_gate: f64, f_ref: f64) -> Result<f64> {
    check_fidelity(f_gate)?;
    if !(f_ref > 0.0 && f_ref < 1.0) {
        return Err(Error::InvalidFidelity(format!("reference fidelity must lie in (0,1), got {f_ref}")));
    }
    if f_gate == 1.0 {
        return Err(Error::InvalidFidelity("a perfect gate has no finite weight under the displayed rule".into()));
    }
    Ok(f_ref.ln() / f_gate.ln())
}

fn check_fidelity(f: f64) -> Result<()> {
    if !(f > 0.0 && f <= 1.0) {
        return Err(Error::InvalidFidelity(format!("fidelity must lie in (0,1], got {f}")));
    }
    Ok(())
}

#[derive(Clone, Debug)]
pub struct MoveSet {
    n: usize,
    moves: Vec<Move>,
    topology: Topology,
    scheme: WeightScheme,
    index: BTreeMap<Gate, usize>,
}

impl MoveSet {
    /// Builds the full generator set: every single-qubit kind on every qubit,
    /// both CNOT directions and one SWAP per topology edge.
    pub fn build(n: usize, topology: &Topology, scheme: WeightScheme) -> Result<Self> {
        if n == 0 || n > crate::tableau::MAX_QUBITS {
            return Err(Error::InvalidQubitCount { n, max: crate::tableau::MAX_QUBITS });
        }
        if topology.n() != n {
            return Err(Error::DimensionMismatch { expected: n, actual: topology.n() });
        }
        if n >= 2 && topology.is_empty() {
            return Err(Error::InvalidMoveSet("empty topology for n >= 2".into()));
        }

        let mut gates = Vec::new();
        for q in 0..n {
            for kind in GateKind::SINGLE_QUBIT {
                gates.push(Gate::new(kind, &[q])?);
            }
        }
        let mut cnots: Vec<(usize, usize)> = topology.edges().flat_map(|(a, b)| [(a, b), (b, a)]).collect();
        cnots.sort_unstable();
        gates.extend(cnots.into_iter().map(|(c, t)| Gate::cnot(c, t)));
        gates.extend(topology.edges().map(|(a, b)| Gate::swap(a, b)));

        let weights = match &scheme {
            WeightScheme::Unit => vec![1.0; gates.len()],
            WeightScheme::CnotCount => gates
                .iter()
                .map(|g| match g.kind() {
                    GateKind::Cnot => 1.0,
                    GateKind::Swap => 3.0,
                    _ => 0.0,
                })
                .collect(),
            WeightScheme::FidelityDerived(f) => fidelity_weights(n, &gates, f)?,
        };

        let moves: Vec<Move> = gates.into_iter().zip(weights).map(|(gate, weight)| Move { gate, weight }).collect();
        if let Some(m) = moves.iter().find(|m| !(m.weight >= 0.0 && m.weight.is_finite())) {
            return Err(Error::InvalidMoveSet(format!("gate {} has invalid weight {}", m.gate, m.weight)));
        }
        Ok(Self::from_moves(n, moves, topology.clone(), scheme))
    }

    pub fn all_to_all(n: usize, scheme: WeightScheme) -> Result<Self> {
        Self::build(n, &Topology::all_to_all(n), scheme)
    }

    fn from_moves(n: usize, moves: Vec<Move>, topology: Topology, scheme: WeightScheme) -> Self {
        let index = moves.iter().enumerate().map(|(i, m)| (m.gate, i)).collect();
        MoveSet { n, moves, topology, scheme, index }
    }

    /// Drops X/Y/Z moves, which are self-loops on phaseless tableaus.
    pub fn without_paulis(&self) -> MoveSet {
        let moves = self.moves.iter().filter(|m| !m.kind().is_pauli()).copied().collect();
        Self::from_moves(self.n, moves, self.topology.clone(), self.scheme.clone())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn moves(&self) -> &[Move] {
        &self.moves
    }

    pub fn len(&self) -> usize {
        self.moves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moves.is_empty()
    }

    pub fn topology(&self) -> &Topology {
        &self.topology
    }

    pub fn scheme(&self) -> &WeightScheme {
        &self.scheme
    }

    pub fn index_of(&self, gate: &Gate) -> Option<usize> {
        self.index.get(gate).copied()
    }

    pub fn weight_of(&self, gate: &Gate) -> Option<f64> {
        self.index_of(gate).map(|i| self.moves[i].weight)
    }

    /// Looks up every gate, failing on gates outside the set.
    pub fn moves_for(&self, gates: &[Gate]) -> Result<Vec<Move>> {
        gates
            .iter()
            .map(|g| self.index_of(g).map(|i| self.moves[i]).ok_or_else(|| Error::GateNotInMoveSet(g.to_string())))
            .collect()
    }

    pub fn is_unit_weighted(&self) -> bool {
        self.moves.iter().all(|m| m.weight == 1.0)
    }

    /// Every move applied to `t`, in move order.
    pub fn neighbors(&self, t: &Tableau) -> Result<Vec<(&Move, Tableau)>> {
        if t.n() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, actual: t.n() });
        }
        Ok(self
            .moves
            .iter()
            .map(|m| {
                let mut next = t.clone();
                next.apply_unchecked(&m.gate);
                (m, next)
            })
            .collect())
    }

    /// Neighbor tableaus only, in move order.
    pub(crate) fn neighbor_tableaus(&self, t: &Tableau) -> Vec<Tableau> {
        self.moves
            .iter()
            .map(|m| {
                let mut next = t.clone();
                next.apply_unchecked(&m.gate);
                next
            })
            .collect()
    }

    /// Stable identifier of gates and weights, used to bind models and
    /// distance tables to the move set they were built with.
    pub fn fingerprint(&self) -> String {
        let mut canon = format!("n={};", self.n);
        for m in &self.moves {
            let _ = write!(canon, "{}:{:016x};", m.gate, m.weight.to_bits());
        }
        let digest = Sha256::digest(canon.as_bytes());
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }
}

fn fidelity_weights(n: usize, gates: &[Gate], fid: &Fidelities) -> Result<Vec<f64>> {
    for (kind, values) in &fid.single {
        if kind.arity() != 1 {
            return Err(Error::InvalidFidelity(format!("{} is not a single-qubit gate", kind.name())));
        }
        if values.len() != n {
            return Err(Error::InvalidFidelity(format!(
                "{} fidelity list has {} entries, expected {n}",
                kind.name(),
                values.len()
            )));
        }
    }
    let fidelity_of = |g: &Gate| -> Result<f64> {
        let q = g.qubits();
        let f = match g.kind() {
            GateKind::Cnot => *fid
                .cnot
                .get(&(q[0], q[1]))
                .ok_or_else(|| Error::InvalidFidelity(format!("no fidelity given for {g}")))?,
            GateKind::Swap => match fid.swap.get(&(q[0], q[1])) {
                Some(&f) => f,
                None => {
                    let fwd = fid.cnot.get(&(q[0], q[1]));
                    let rev = fid.cnot.get(&(q[1], q[0]));
                    match (fwd, rev) {
                        (Some(a), Some(b)) => a * b * a,
                        _ => return Err(Error::InvalidFidelity(format!("no fidelity given for {g} or its CNOTs"))),
                    }
                }
            },
            kind => fid.single.get(&kind).map_or(1.0, |v| v[q[0]]),
        };
        check_fidelity(f)?;
        Ok(f)
    };
    fid.reference.validate(n)?;
    let f_ref = fidelity_of(&fid.reference)?;
    gates
        .iter()
        .map(|g| {
            let f = fidelity_of(g)?;
            match fid.rule {
                FidelityRule::Prose => weight_from_fidelity(f, f_ref),
                FidelityRule::Displayed => weight_from_fidelity_displayed(f, f_ref),
            }
        })
        .collect()
}

/// JSON move-set description:
/// `{"n": 3, "edges": [[0,1],[1,2]], "weights": {"scheme": "fidelity", ...},
///   "prune_trivial_moves": false}`. Omitted edges mean all-to-all.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MoveSetConfig {
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edges: Option<Vec<[usize; 2]>>,
    #[serde(default)]
    pub weights: WeightsConfig,
    #[serde(default, rename = "prune_trivial_moves", alias = "prune-trivial-moves")]
    pub prune_trivial_moves: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightsConfig {
    pub scheme: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fidelities: Option<BTreeMap<String, serde_json::Value>>,
    #[serde(default)]
    pub fidelity_rule: FidelityRule,
}

impl Default for WeightsConfig {
    fn default() -> Self {
        WeightsConfig { scheme: "unit".into(), reference: None, fidelities: None, fidelity_rule: FidelityRule::Prose }
    }
}

impl MoveSetConfig {
    pub fn new(n: usize, scheme: &str) -> Self {
        MoveSetConfig {
            n,
            edges: None,
            weights: WeightsConfig { scheme: scheme.into(), ..WeightsConfig::default() },
            prune_trivial_moves: false,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn topology(&self) -> Result<Topology> {
        match &self.edges {
            None => Ok(Topology::all_to_all(self.n)),
            Some(edges) => {
                let pairs: Vec<(usize, usize)> = edges.iter().map(|e| (e[0], e[1])).collect();
                Topology::from_edges(self.n, &pairs)
            }
        }
    }

    pub fn scheme(&self) -> Result<WeightScheme> {
        let w = &self.weights;
        match w.scheme.to_ascii_lowercase().replace('-', "_").as_str() {
            "unit" => Ok(WeightScheme::Unit),
            "cnot_count" | "cnotcount" => Ok(WeightScheme::CnotCount),
            "fidelity" => Ok(WeightScheme::FidelityDerived(self.parse_fidelities()?)),
            other => Err(Error::InvalidConfig(format!("unknown weight scheme '{other}'"))),
        }
    }

    fn parse_fidelities(&self) -> Result<Fidelities> {
        let n = self.n;
        let w = &self.weights;
        let raw = w
            .fidelities
            .as_ref()
            .ok_or_else(|| Error::InvalidConfig("fidelity scheme needs a 'fidelities' map".into()))?;
        let bad = |msg: String| Error::InvalidConfig(msg);
        let mut fid = Fidelities {
            single: BTreeMap::new(),
            cnot: BTreeMap::new(),
            swap: BTreeMap::new(),
            reference: Gate::h(0),
            rule: w.fidelity_rule,
        };
        for (key, value) in raw {
            let kind: GateKind = key.parse()?;
            match kind {
                GateKind::Cnot | GateKind::Swap => {
                    let triples: Vec<(usize, usize, f64)> = serde_json::from_value(value.clone())
                        .map_err(|e| bad(format!("'{key}' must be a list of [a, b, f]: {e}")))?;
                    for (a, b, f) in triples {
                        if a >= n || b >= n || a == b {
                            return Err(bad(format!("'{key}' entry ({a},{b}) is not a valid pair")));
                        }
                        if kind == GateKind::Cnot {
                            fid.cnot.insert((a, b), f);
                        } else {
                            fid.swap.insert((a.min(b), a.max(b)), f);
                        }
                    }
                }
                _ => {
                    let values = match value {
                        serde_json::Value::Number(x) => {
                            let f = x.as_f64().ok_or_else(|| bad(format!("'{key}' is not a number")))?;
                            vec![f; n]
                        }
                        other => serde_json::from_value::<Vec<f64>>(other.clone())
                            .map_err(|e| bad(format!("'{key}' must be a number or list: {e}")))?,
                    };
                    fid.single.insert(kind, values);
                }
            }
        }
        if let Some(r) = &w.reference {
            fid.reference = if r.split_whitespace().count() == 1 {
                let kind: GateKind = r.parse()?;
                match kind {
                    GateKind::Cnot | GateKind::Swap => {
                        let (a, b) = *fid
                            .cnot
                            .keys()
                            .next()
                            .ok_or_else(|| bad("reference 'cnot' but no CNOT fidelities".into()))?;
                        Gate::new(kind, &[a, b])?
                    }
                    _ => Gate::new(kind, &[0])?,
                }
            } else {
                r.parse()?
            };
        }
        Ok(fid)
    }

    pub fn build(&self) -> Result<MoveSet> {
        let ms = MoveSet::build(self.n, &self.topology()?, self.scheme()?)?;
        Ok(if self.prune_trivial_moves { ms.without_paulis() } else { ms })
    }
}
