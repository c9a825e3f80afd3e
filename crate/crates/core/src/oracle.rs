//! Exact distances to the identity for small qubit counts.
//!
//! The table holds, for every group element `T`, the cheapest total move
//! weight of a gate sequence `G1 … Gk` with `T = G1 ⋯ Gk`, found by a
//! shortest-path search over the edges `T → T·G` starting at the identity.

use std::cmp::{Ordering, Reverse};
use std::collections::hash_map::Entry;
use std::collections::{BTreeMap, BinaryHeap, HashMap, HashSet, VecDeque};
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::fsutil::write_atomic;
use crate::moveset::MoveSet;
use crate::tableau::{clifford_group_size, PhaseMode, Tableau};

const MAGIC: &[u8; 8] = b"CLFDIST\0";
const VERSION: u32 = 1;
const FINGERPRINT_LEN: usize = 16;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ShortestPath {
    /// Breadth-first search for unit weights, Dijkstra otherwise.
    #[default]
    Auto,
    Bfs,
    Dijkstra,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct OracleOptions {
    /// Permit the 1,451,520-element phaseless n=3 table.
    pub allow_large: bool,
    pub algorithm: ShortestPath,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DistanceTable {
    n: usize,
    phase_mode: PhaseMode,
    fingerprint: String,
    distances: HashMap<u64, f32>,
}

/// Ensures the table for `(n, mode)` is within reach.
pub fn check_capacity(n: usize, mode: PhaseMode, allow_large: bool) -> Result<()> {
    match (n, mode) {
        (1 | 2, _) => Ok(()),
        (3, PhaseMode::Phaseless) if allow_large => Ok(()),
        (3, PhaseMode::Phaseless) => {
            Err(Error::Capacity("the n=3 phaseless table has 1,451,520 entries; enable the large-table option".into()))
        }
        (3, PhaseMode::WithPhases) => {
            Err(Error::Capacity("the n=3 table with phases has 92,897,280 entries and is not supported".into()))
        }
        _ => Err(Error::Capacity(format!("exact distances are limited to n <= 3, got n={n}"))),
    }
}

/// Shortest-path distances from the identity to every reachable tableau.
pub fn build_distance_table(ms: &MoveSet, mode: PhaseMode, opts: OracleOptions) -> Result<DistanceTable> {
    let n = ms.n();
    check_capacity(n, mode, opts.allow_large)?;
    if ms.moves().iter().any(|m| !(m.weight >= 0.0 && m.weight.is_finite())) {
        return Err(Error::InvalidMoveSet("shortest paths need finite non-negative weights".into()));
    }
    let bfs = match opts.algorithm {
        ShortestPath::Auto => ms.is_unit_weighted(),
        ShortestPath::Bfs => {
            if !ms.is_unit_weighted() {
                return Err(Error::InvalidConfig("breadth-first search needs unit weights".into()));
            }
            true
        }
        ShortestPath::Dijkstra => false,
    };
    let identity = Tableau::identity(n, mode)?;
    let start = identity.pack_key().expect("n <= 3 packs");
    let dist = if bfs { bfs_distances(ms, mode, start)? } else { dijkstra_distances(ms, mode, start)? };
    let distances = dist.into_iter().map(|(k, d)| (k, d as f32)).collect();
    Ok(DistanceTable { n, phase_mode: mode, fingerprint: ms.fingerprint(), distances })
}

fn expand(ms: &MoveSet, mode: PhaseMode, key: u64) -> Result<Tableau> {
    Tableau::from_key(ms.n(), mode, key)
}

fn bfs_distances(ms: &MoveSet, mode: PhaseMode, start: u64) -> Result<HashMap<u64, f64>> {
    let mut dist = HashMap::from([(start, 0.0)]);
    let mut queue = VecDeque::from([(start, 0.0)]);
    while let Some((key, d)) = queue.pop_front() {
        let t = expand(ms, mode, key)?;
        for m in ms.moves() {
            let mut next = t.clone();
            next.apply_unchecked(&m.gate);
            let k = next.pack_key().expect("n <= 3 packs");
            if let Entry::Vacant(e) = dist.entry(k) {
                e.insert(d + 1.0);
                queue.push_back((k, d + 1.0));
            }
        }
    }
    Ok(dist)
}

#[derive(PartialEq)]
struct Dist(f64);

impl Eq for Dist {}

impl PartialOrd for Dist {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dist {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// Dijkstra; nodes reached over zero-weight edges are settled in an inner
/// breadth-first pass at the current distance.
fn dijkstra_distances(ms: &MoveSet, mode: PhaseMode, start: u64) -> Result<HashMap<u64, f64>> {
    let mut dist: HashMap<u64, f64> = HashMap::from([(start, 0.0)]);
    let mut heap = BinaryHeap::from([Reverse((Dist(0.0), start))]);
    let mut settled = HashSet::new();
    let mut level = Vec::new();
    while let Some(Reverse((Dist(d), key))) = heap.pop() {
        if settled.contains(&key) || dist[&key] < d {
            continue;
        }
        level.clear();
        level.push(key);
        settled.insert(key);
        while let Some(key) = level.pop() {
            let t = expand(ms, mode, key)?;
            for m in ms.moves() {
                let mut next = t.clone();
                next.apply_unchecked(&m.gate);
                let k = next.pack_key().expect("n <= 3 packs");
                if settled.contains(&k) {
                    continue;
                }
                let nd = d + m.weight;
                let better = dist.get(&k).is_none_or(|&old| nd < old);
                if m.weight == 0.0 {
                    dist.insert(k, d);
                    settled.insert(k);
                    level.push(k);
                } else if better {
                    dist.insert(k, nd);
                    heap.push(Reverse((Dist(nd), k)));
                }
            }
        }
    }
    Ok(dist)
}

impl DistanceTable {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn phase_mode(&self) -> PhaseMode {
        self.phase_mode
    }

    pub fn fingerprint(&self) -> &str {
        &self.fingerprint
    }

    pub fn node_count(&self) -> usize {
        self.distances.len()
    }

    /// Whether every group element is present.
    pub fn is_complete(&self) -> bool {
        clifford_group_size(self.n, self.phase_mode.has_phases()) == self.distances.len().into()
    }

    fn key_of(&self, t: &Tableau) -> Result<u64> {
        if t.n() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, actual: t.n() });
        }
        let t = match (self.phase_mode, t.phase_mode()) {
            (PhaseMode::WithPhases, PhaseMode::Phaseless) => {
                return Err(Error::PhaseModeMismatch("table has phases, tableau does not".into()));
            }
            (PhaseMode::Phaseless, PhaseMode::WithPhases) => t.to_phaseless(),
            _ => t.clone(),
        };
        t.pack_key().ok_or(Error::UnknownTableau)
    }

    /// Exact distance from the identity, or `UnknownTableau`.
    pub fn distance(&self, t: &Tableau) -> Result<f64> {
        let key = self.key_of(t)?;
        self.distances.get(&key).map(|&d| d as f64).ok_or(Error::UnknownTableau)
    }

    /// Every entry as `(tableau, distance)`, sorted by packed key.
    pub fn entries(&self) -> Result<Vec<(Tableau, f64)>> {
        let mut keys: Vec<_> = self.distances.iter().collect();
        keys.sort_by_key(|(&k, _)| k);
        keys.into_iter().map(|(&k, &d)| Ok((Tableau::from_key(self.n, self.phase_mode, k)?, d as f64))).collect()
    }

    /// Node counts per distance, ascending.
    pub fn histogram(&self) -> Vec<(f64, usize)> {
        let mut counts: BTreeMap<u32, usize> = BTreeMap::new();
        for &d in self.distances.values() {
            // Non-negative f32 bit patterns sort like the values.
            *counts.entry(d.to_bits()).or_default() += 1;
        }
        counts.into_iter().map(|(b, c)| (f32::from_bits(b) as f64, c)).collect()
    }

    pub fn write_histogram_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "distance,count")?;
        for (d, c) in self.histogram() {
            writeln!(w, "{d},{c}")?;
        }
        Ok(())
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(MAGIC)?;
        w.write_all(&VERSION.to_le_bytes())?;
        w.write_all(&(self.n as u32).to_le_bytes())?;
        w.write_all(&[u8::from(self.phase_mode.has_phases())])?;
        let mut fp = [0u8; FINGERPRINT_LEN];
        let bytes = self.fingerprint.as_bytes();
        fp[..bytes.len().min(FINGERPRINT_LEN)].copy_from_slice(&bytes[..bytes.len().min(FINGERPRINT_LEN)]);
        w.write_all(&fp)?;
        w.write_all(&(self.distances.len() as u64).to_le_bytes())?;
        let mut entries: Vec<_> = self.distances.iter().collect();
        entries.sort_by_key(|(&k, _)| k);
        for (k, d) in entries {
            w.write_all(&k.to_le_bytes())?;
            w.write_all(&d.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_from<R: Read>(mut r: R) -> Result<Self> {
        let bad = |m: &str| Error::TableFormat(m.to_string());
        let mut buf = Vec::new();
        r.read_to_end(&mut buf)?;
        let header_len = 8 + 4 + 4 + 1 + FINGERPRINT_LEN + 8;
        if buf.len() < header_len || &buf[..8] != MAGIC {
            return Err(bad("not a distance table"));
        }
        let u32_at = |o: usize| u32::from_le_bytes(buf[o..o + 4].try_into().expect("4 bytes"));
        let u64_at = |o: usize| u64::from_le_bytes(buf[o..o + 8].try_into().expect("8 bytes"));
        if u32_at(8) != VERSION {
            return Err(bad("unsupported version"));
        }
        let n = u32_at(12) as usize;
        let phase_mode = match buf[16] {
            0 => PhaseMode::Phaseless,
            1 => PhaseMode::WithPhases,
            _ => return Err(bad("bad phase mode")),
        };
        check_capacity(n, phase_mode, true).map_err(|_| bad("unsupported qubit count"))?;
        let fp = &buf[17..17 + FINGERPRINT_LEN];
        let fingerprint = String::from_utf8(fp.iter().copied().take_while(|&b| b != 0).collect())
            .map_err(|_| bad("bad fingerprint"))?;
        let count = u64_at(17 + FINGERPRINT_LEN) as usize;
        let body = &buf[header_len..];
        if body.len() != count * 12 {
            return Err(bad("entry count does not match file length"));
        }
        let mut distances = HashMap::with_capacity(count);
        for e in body.chunks_exact(12) {
            let k = u64::from_le_bytes(e[..8].try_into().expect("8 bytes"));
            let d = f32::from_le_bytes(e[8..].try_into().expect("4 bytes"));
            if !(d >= 0.0 && d.is_finite()) || distances.insert(k, d).is_some() {
                return Err(bad("bad or duplicate entry"));
            }
        }
        Ok(DistanceTable { n, phase_mode, fingerprint, distances })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut buf = Vec::with_capacity(64 + 12 * self.distances.len());
        self.write_to(&mut buf)?;
        write_atomic(path, &buf)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::read_from(std::fs::File::open(path)?)
    }
}

/// Largest distance from the identity over a complete table.
pub fn gods_number(table: &DistanceTable) -> Result<f64> {
    if !table.is_complete() {
        return Err(Error::TableFormat(format!(
            "table has {} of {} elements",
            table.node_count(),
            clifford_group_size(table.n, table.phase_mode.has_phases())
        )));
    }
    Ok(table.distances.values().fold(0.0f32, |a, &b| a.max(b)) as f64)
}

pub fn exact_distance(t: &Tableau, table: &DistanceTable) -> Result<f64> {
    table.distance(t)
}
