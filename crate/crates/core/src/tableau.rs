//! Binary symplectic tableaus for n-qubit Clifford elements.
//!
//! A tableau stores the 2n×2n square part row by row, one `u64` per row.
//! Rows `0..n` are destabilizer generators (images of `X_i`), rows `n..2n`
//! are stabilizer generators (images of `Z_i`). Within a row, bit `q` is the
//! X component on qubit `q` and bit `n + q` the Z component, so column `c`
//! of the matrix is bit `c` of every row.
//!
//! Composition follows circuit order: `a.compose(&b)` is the tableau of
//! "circuit `a`, then circuit `b`", whose square part is the GF(2) product
//! `a.S · b.S`. Applying a gate is the same as composing with that gate's
//! tableau and is carried out as column updates.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{Error, Result};

/// Largest supported qubit count: a row (X and Z halves) must fit in a `u64`.
pub const MAX_QUBITS: usize = 32;

/// Largest qubit count for which [`Tableau::pack_key`] fits in a `u64`.
pub const MAX_PACKED_QUBITS: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseMode {
    WithPhases,
    Phaseless,
}

impl PhaseMode {
    pub fn has_phases(self) -> bool {
        matches!(self, PhaseMode::WithPhases)
    }

    pub fn name(self) -> &'static str {
        match self {
            PhaseMode::WithPhases => "with_phases",
            PhaseMode::Phaseless => "phaseless",
        }
    }
}

impl fmt::Display for PhaseMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PhaseMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "with_phases" | "phases" | "1" => Ok(PhaseMode::WithPhases),
            "phaseless" | "0" => Ok(PhaseMode::Phaseless),
            other => Err(Error::InvalidConfig(format!("unknown phase mode '{other}'"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GateKind {
    X,
    Y,
    Z,
    H,
    S,
    Sdg,
    Cnot,
    Swap,
}

impl GateKind {
    /// Single-qubit kinds in move-set order.
    pub const SINGLE_QUBIT: [GateKind; 6] =
        [GateKind::X, GateKind::Y, GateKind::Z, GateKind::H, GateKind::S, GateKind::Sdg];

    pub fn arity(self) -> usize {
        match self {
            GateKind::Cnot | GateKind::Swap => 2,
            _ => 1,
        }
    }

    pub fn is_pauli(self) -> bool {
        matches!(self, GateKind::X | GateKind::Y | GateKind::Z)
    }

    pub fn name(self) -> &'static str {
        match self {
            GateKind::X => "x",
            GateKind::Y => "y",
            GateKind::Z => "z",
            GateKind::H => "h",
            GateKind::S => "s",
            GateKind::Sdg => "sdg",
            GateKind::Cnot => "cnot",
            GateKind::Swap => "swap",
        }
    }
}

impl FromStr for GateKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "x" => GateKind::X,
            "y" => GateKind::Y,
            "z" => GateKind::Z,
            "h" => GateKind::H,
            "s" => GateKind::S,
            "sdg" | "sdag" | "s_dagger" => GateKind::Sdg,
            "cnot" | "cx" => GateKind::Cnot,
            "swap" => GateKind::Swap,
            other => return Err(Error::InvalidGate(format!("unknown gate kind '{other}'"))),
        })
    }
}

/// A Clifford generator acting on one or two qubits.
///
/// CNOT qubits are `(control, target)`. SWAP qubits are stored sorted.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Gate {
    kind: GateKind,
    qubits: [usize; 2],
}

impl Gate {
    pub fn new(kind: GateKind, qubits: &[usize]) -> Result<Self> {
        if qubits.len() != kind.arity() {
            return Err(Error::InvalidGate(format!(
                "{} takes {} qubit(s), got {}",
                kind.name(),
                kind.arity(),
                qubits.len()
            )));
        }
        match kind {
            GateKind::Cnot | GateKind::Swap => {
                if qubits[0] == qubits[1] {
                    return Err(Error::InvalidGate(format!("{} needs two distinct qubits", kind.name())));
                }
                if kind == GateKind::Swap {
                    Ok(Gate::swap(qubits[0], qubits[1]))
                } else {
                    Ok(Gate::cnot(qubits[0], qubits[1]))
                }
            }
            _ => Ok(Gate { kind, qubits: [qubits[0], 0] }),
        }
    }

    pub fn x(q: usize) -> Self {
        Gate { kind: GateKind::X, qubits: [q, 0] }
    }
    pub fn y(q: usize) -> Self {
        Gate { kind: GateKind::Y, qubits: [q, 0] }
    }
    pub fn z(q: usize) -> Self {
        Gate { kind: GateKind::Z, qubits: [q, 0] }
    }
    pub fn h(q: usize) -> Self {
        Gate { kind: GateKind::H, qubits: [q, 0] }
    }
    pub fn s(q: usize) -> Self {
        Gate { kind: GateKind::S, qubits: [q, 0] }
    }
    pub fn sdg(q: usize) -> Self {
        Gate { kind: GateKind::Sdg, qubits: [q, 0] }
    }
    pub fn cnot(control: usize, target: usize) -> Self {
        Gate { kind: GateKind::Cnot, qubits: [control, target] }
    }
    pub fn swap(a: usize, b: usize) -> Self {
        Gate { kind: GateKind::Swap, qubits: [a.min(b), a.max(b)] }
    }

    pub fn kind(&self) -> GateKind {
        self.kind
    }

    pub fn qubits(&self) -> &[usize] {
        &self.qubits[..self.kind.arity()]
    }

    pub fn inverse(&self) -> Gate {
        let kind = match self.kind {
            GateKind::S => GateKind::Sdg,
            GateKind::Sdg => GateKind::S,
            k => k,
        };
        Gate { kind, qubits: self.qubits }
    }

    /// Checks qubit indices against an `n`-qubit register.
    pub fn validate(&self, n: usize) -> Result<()> {
        for &q in self.qubits() {
            if q >= n {
                return Err(Error::QubitOutOfRange { index: q, n });
            }
        }
        if self.kind.arity() == 2 && self.qubits[0] == self.qubits[1] {
            return Err(Error::InvalidGate(format!("{self}: repeated qubit")));
        }
        Ok(())
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.kind.name())?;
        for q in self.qubits() {
            write!(f, " {q}")?;
        }
        Ok(())
    }
}

impl FromStr for Gate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut parts = s.split_whitespace();
        let kind: GateKind = parts.next().ok_or_else(|| Error::InvalidGate("empty gate".into()))?.parse()?;
        let qubits = parts
            .map(|p| p.parse::<usize>().map_err(|_| Error::InvalidGate(format!("bad qubit index '{p}'"))))
            .collect::<Result<Vec<_>>>()?;
        Gate::new(kind, &qubits)
    }
}

type Rows = SmallVec<[u64; 16]>;

/// A Clifford element as a binary symplectic matrix plus optional phase bits.
///
/// In [`PhaseMode::Phaseless`] the phase vector is absent, so equality and
/// hashing only see the square part.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Tableau {
    n: usize,
    rows: Rows,
    phases: Option<u64>,
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 || n > MAX_QUBITS {
        return Err(Error::InvalidQubitCount { n, max: MAX_QUBITS });
    }
    Ok(())
}

#[inline]
fn low_mask(bits: usize) -> u64 {
    if bits >= 64 {
        u64::MAX
    } else {
        (1u64 << bits) - 1
    }
}

/// Swaps the X and Z halves of a row, i.e. multiplies by Ω on the right.
#[inline]
fn swap_halves(row: u64, n: usize) -> u64 {
    ((row & low_mask(n)) << n) | (row >> n)
}

fn transpose(rows: &[u64]) -> Rows {
    let dim = rows.len();
    let mut out: Rows = SmallVec::from_elem(0, dim);
    for (r, &row) in rows.iter().enumerate() {
        let mut bits = row;
        while bits != 0 {
            let c = bits.trailing_zeros() as usize;
            out[c] |= 1 << r;
            bits &= bits - 1;
        }
    }
    out
}

fn matmul(a: &[u64], b: &[u64]) -> Rows {
    a.iter()
        .map(|&row| {
            let mut acc = 0u64;
            let mut bits = row;
            while bits != 0 {
                acc ^= b[bits.trailing_zeros() as usize];
                bits &= bits - 1;
            }
            acc
        })
        .collect()
}

impl Tableau {
    pub fn identity(n: usize, mode: PhaseMode) -> Result<Self> {
        check_n(n)?;
        Ok(Self::identity_unchecked(n, mode))
    }

    fn identity_unchecked(n: usize, mode: PhaseMode) -> Self {
        Tableau { n, rows: (0..2 * n).map(|i| 1u64 << i).collect(), phases: mode.has_phases().then_some(0) }
    }

    /// Builds a tableau from raw rows without checking the symplectic condition.
    pub fn from_rows(n: usize, rows: &[u64], phases: Option<u64>) -> Result<Self> {
        check_n(n)?;
        if rows.len() != 2 * n {
            return Err(Error::LengthMismatch(format!("expected {} rows, got {}", 2 * n, rows.len())));
        }
        let mask = low_mask(2 * n);
        if rows.iter().any(|&r| r & !mask != 0) || phases.is_some_and(|p| p & !mask != 0) {
            return Err(Error::LengthMismatch(format!("bits beyond column {}", 2 * n)));
        }
        Ok(Tableau { n, rows: rows.iter().copied().collect(), phases })
    }

    /// The tableau of a single gate.
    pub fn from_gate(n: usize, gate: &Gate, mode: PhaseMode) -> Result<Self> {
        Self::identity(n, mode)?.apply_gate(gate)
    }

    /// The tableau of a gate sequence applied in order.
    pub fn from_gates<'a>(n: usize, mode: PhaseMode, gates: impl IntoIterator<Item = &'a Gate>) -> Result<Self> {
        let mut t = Self::identity(n, mode)?;
        for g in gates {
            t.apply_gate_mut(g)?;
        }
        Ok(t)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn phase_mode(&self) -> PhaseMode {
        if self.phases.is_some() {
            PhaseMode::WithPhases
        } else {
            PhaseMode::Phaseless
        }
    }

    pub fn rows(&self) -> &[u64] {
        &self.rows
    }

    pub fn row(&self, r: usize) -> u64 {
        self.rows[r]
    }

    /// Phase bits, bit `r` belonging to row `r`.
    pub fn phases(&self) -> Option<u64> {
        self.phases
    }

    pub fn get(&self, row: usize, col: usize) -> bool {
        (self.rows[row] >> col) & 1 == 1
    }

    pub fn phase(&self, row: usize) -> Option<bool> {
        self.phases.map(|p| (p >> row) & 1 == 1)
    }

    pub fn to_phaseless(&self) -> Tableau {
        Tableau { n: self.n, rows: self.rows.clone(), phases: None }
    }

    /// Same square part with all phase bits cleared.
    pub fn with_zero_phases(&self) -> Tableau {
        Tableau { n: self.n, rows: self.rows.clone(), phases: Some(0) }
    }

    pub fn is_identity(&self) -> bool {
        self.phases.unwrap_or(0) == 0 && self.rows.iter().enumerate().all(|(i, &r)| r == 1 << i)
    }

    /// Whether `Sᵀ Ω S = Ω` over GF(2).
    pub fn is_symplectic(&self) -> bool {
        let n = self.n;
        let omega_s: Rows = (0..2 * n).map(|k| self.rows[(k + n) % (2 * n)]).collect();
        let product = matmul(&transpose(&self.rows), &omega_s);
        product.iter().enumerate().all(|(i, &r)| r == 1u64 << ((i + n) % (2 * n)))
    }

    fn check_compatible(&self, other: &Tableau) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { expected: self.n, actual: other.n });
        }
        if self.phase_mode() != other.phase_mode() {
            return Err(Error::PhaseModeMismatch(format!("{} vs {}", self.phase_mode(), other.phase_mode())));
        }
        Ok(())
    }

    /// The tableau of "`self`, then `other`".
    ///
    /// Phaseless composition is the GF(2) matrix product. With phases, `other`
    /// is decomposed into generators whose exact update rules are replayed
    /// onto `self`.
    pub fn compose(&self, other: &Tableau) -> Result<Tableau> {
        self.check_compatible(other)?;
        match self.phases {
            None => Ok(Tableau { n: self.n, rows: matmul(&self.rows, &other.rows), phases: None }),
            Some(_) => {
                let gates = other.to_circuit()?;
                let mut out = self.clone();
                for g in &gates {
                    out.apply_unchecked(g);
                }
                Ok(out)
            }
        }
    }

    /// Group inverse. The square part is `Ω Sᵀ Ω`; with phases, the phase bits
    /// are chosen so that composing with `self` gives the zero-phase identity.
    pub fn inverse(&self) -> Result<Tableau> {
        if !self.is_symplectic() {
            return Err(Error::NotSymplectic);
        }
        let n = self.n;
        let t = transpose(&self.rows);
        let inv_rows: Rows = (0..2 * n).map(|i| swap_halves(t[(i + n) % (2 * n)], n)).collect();
        let mut inv = Tableau { n, rows: inv_rows, phases: None };
        if self.phases.is_some() {
            inv.phases = Some(0);
            let residual = self.compose(&inv)?;
            let d = residual.phases.unwrap_or(0);
            // Row r of the identity flips under Pauli p iff (Ω p)_r = d_r.
            let p = swap_halves(d, n);
            for g in pauli_gates(p, n) {
                inv.apply_unchecked(&g);
            }
        }
        Ok(inv)
    }

    pub fn apply_gate(&self, gate: &Gate) -> Result<Tableau> {
        let mut out = self.clone();
        out.apply_gate_mut(gate)?;
        Ok(out)
    }

    pub fn apply_gate_mut(&mut self, gate: &Gate) -> Result<()> {
        gate.validate(self.n)?;
        self.apply_unchecked(gate);
        Ok(())
    }

    /// Column update rules; the caller guarantees the gate is valid for `n`.
    pub(crate) fn apply_unchecked(&mut self, gate: &Gate) {
        let n = self.n;
        let q = gate.qubits;
        let mut flips = 0u64;
        match gate.kind {
            GateKind::X | GateKind::Y | GateKind::Z => {
                if self.phases.is_none() {
                    return;
                }
                let (xa, za) = (q[0], n + q[0]);
                for (r, &row) in self.rows.iter().enumerate() {
                    let x = (row >> xa) & 1;
                    let z = (row >> za) & 1;
                    let f = match gate.kind {
                        GateKind::X => z,
                        GateKind::Z => x,
                        _ => x ^ z,
                    };
                    flips |= f << r;
                }
            }
            GateKind::H => {
                let (xa, za) = (q[0], n + q[0]);
                for (r, row) in self.rows.iter_mut().enumerate() {
                    let x = (*row >> xa) & 1;
                    let z = (*row >> za) & 1;
                    flips |= (x & z) << r;
                    if x != z {
                        *row ^= (1 << xa) | (1 << za);
                    }
                }
            }
            GateKind::S | GateKind::Sdg => {
                let (xa, za) = (q[0], n + q[0]);
                let dagger = gate.kind == GateKind::Sdg;
                for (r, row) in self.rows.iter_mut().enumerate() {
                    let x = (*row >> xa) & 1;
                    let z = (*row >> za) & 1;
                    let f = if dagger { x & (z ^ 1) } else { x & z };
                    flips |= f << r;
                    *row ^= x << za;
                }
            }
            GateKind::Cnot => {
                let (c, t) = (q[0], q[1]);
                let (xc, xt, zc, zt) = (c, t, n + c, n + t);
                for (r, row) in self.rows.iter_mut().enumerate() {
                    let bx_c = (*row >> xc) & 1;
                    let bx_t = (*row >> xt) & 1;
                    let bz_c = (*row >> zc) & 1;
                    let bz_t = (*row >> zt) & 1;
                    flips |= (bx_c & bz_t & (bx_t ^ bz_c ^ 1)) << r;
                    *row ^= (bx_c << xt) | (bz_t << zc);
                }
            }
            GateKind::Swap => {
                let (a, b) = (q[0], q[1]);
                for row in self.rows.iter_mut() {
                    for (ca, cb) in [(a, b), (n + a, n + b)] {
                        let diff = ((*row >> ca) ^ (*row >> cb)) & 1;
                        *row ^= (diff << ca) | (diff << cb);
                    }
                }
            }
        }
        if let Some(p) = self.phases.as_mut() {
            *p ^= flips;
        }
    }

    /// An exact generator decomposition: applying the returned gates in order
    /// to the identity reproduces `self`, phases included when present.
    ///
    /// The symplectic part comes from a column-elimination canonical form; a
    /// trailing layer of X/Z gates fixes the phase bits.
    pub fn to_circuit(&self) -> Result<Vec<Gate>> {
        if !self.is_symplectic() {
            return Err(Error::NotSymplectic);
        }
        let n = self.n;
        let mut work = self.to_phaseless();
        let mut reducing = Vec::new();
        let mut push = |work: &mut Tableau, g: Gate| {
            work.apply_unchecked(&g);
            reducing.push(g);
        };
        let x_bit = |row: u64, k: usize| (row >> k) & 1 == 1;
        let z_bit = |row: u64, k: usize| (row >> (n + k)) & 1 == 1;

        for i in 0..n {
            // Destabilizer row i -> X_i.
            for k in i..n {
                let row = work.rows[i];
                match (x_bit(row, k), z_bit(row, k)) {
                    (true, true) => push(&mut work, Gate::s(k)),
                    (false, true) => push(&mut work, Gate::h(k)),
                    _ => {}
                }
            }
            if !x_bit(work.rows[i], i) {
                let k = (i + 1..n)
                    .find(|&k| x_bit(work.rows[i], k))
                    .expect("symplectic destabilizer row is nonzero on remaining qubits");
                push(&mut work, Gate::swap(i, k));
            }
            for k in i + 1..n {
                if x_bit(work.rows[i], k) {
                    push(&mut work, Gate::cnot(i, k));
                }
            }
            // Stabilizer row n+i -> Z_i, keeping X_i fixed.
            if x_bit(work.rows[n + i], i) {
                push(&mut work, Gate::h(i));
                push(&mut work, Gate::s(i));
                push(&mut work, Gate::h(i));
            }
            for k in i + 1..n {
                let row = work.rows[n + i];
                match (x_bit(row, k), z_bit(row, k)) {
                    (true, false) => push(&mut work, Gate::h(k)),
                    (true, true) => {
                        push(&mut work, Gate::s(k));
                        push(&mut work, Gate::h(k));
                    }
                    _ => {}
                }
                if z_bit(work.rows[n + i], k) {
                    push(&mut work, Gate::cnot(k, i));
                }
            }
        }
        debug_assert!(work.is_identity());

        // self · G1 ⋯ Gk = I, so self = Gk⁻¹ ⋯ G1⁻¹.
        let mut gates: Vec<Gate> = reducing.iter().rev().map(Gate::inverse).collect();
        if let Some(target) = self.phases {
            let mut replay = Tableau::identity_unchecked(n, PhaseMode::WithPhases);
            for g in &gates {
                replay.apply_unchecked(g);
            }
            let d = target ^ replay.phases.unwrap_or(0);
            // Appending Pauli p flips row r iff ⟨row_r, p⟩ = 1; p = Sᵀ Ω d.
            let w = swap_halves(d, n);
            let mut p = 0u64;
            for (r, &row) in self.rows.iter().enumerate() {
                if (w >> r) & 1 == 1 {
                    p ^= row;
                }
            }
            gates.extend(pauli_gates(p, n));
        }
        Ok(gates)
    }

    /// Packs square part and phases into one integer key (n ≤ 3).
    pub fn pack_key(&self) -> Option<u64> {
        let n = self.n;
        if n > MAX_PACKED_QUBITS {
            return None;
        }
        let w = 2 * n;
        let mut key = 0u64;
        for (r, &row) in self.rows.iter().enumerate() {
            key |= row << (r * w);
        }
        if let Some(p) = self.phases {
            key |= p << (w * w);
        }
        Some(key)
    }

    pub fn from_key(n: usize, mode: PhaseMode, key: u64) -> Result<Tableau> {
        check_n(n)?;
        if n > MAX_PACKED_QUBITS {
            return Err(Error::Capacity(format!("packed keys support n ≤ {MAX_PACKED_QUBITS}")));
        }
        let w = 2 * n;
        let mask = low_mask(w);
        let rows: Rows = (0..w).map(|r| (key >> (r * w)) & mask).collect();
        let phases = mode.has_phases().then(|| (key >> (w * w)) & mask);
        Ok(Tableau { n, rows, phases })
    }

    /// Text form: `n=<n> phases=<0|1>`, 2n rows of 2n `0`/`1` characters, and
    /// a phase line when phases are present. Every line ends in `\n`.
    pub fn to_text(&self) -> String {
        let w = 2 * self.n;
        let mut out = String::with_capacity((w + 1) * (w + 2) + 16);
        out.push_str(&format!("n={} phases={}\n", self.n, u8::from(self.phases.is_some())));
        let bits = |v: u64, out: &mut String| {
            for c in 0..w {
                out.push(if (v >> c) & 1 == 1 { '1' } else { '0' });
            }
            out.push('\n');
        };
        for &row in &self.rows {
            bits(row, &mut out);
        }
        if let Some(p) = self.phases {
            bits(p, &mut out);
        }
        out
    }

    /// Parses [`Tableau::to_text`] output from the front of a line iterator,
    /// consuming exactly the lines of one tableau. `first_line` numbers errors.
    pub fn parse_lines<'a, I>(lines: &mut I, first_line: usize) -> Result<Tableau>
    where
        I: Iterator<Item = &'a str>,
    {
        let err = |line: usize, message: String| Error::Parse { line, message };
        let header = lines.next().ok_or_else(|| err(first_line, "missing tableau header".into()))?;
        let mut n = None;
        let mut has_phases = None;
        for field in header.split_whitespace() {
            match field.split_once('=') {
                Some(("n", v)) => n = v.parse::<usize>().ok(),
                Some(("phases", "0")) => has_phases = Some(false),
                Some(("phases", "1")) => has_phases = Some(true),
                _ => return Err(err(first_line, format!("unexpected header field '{field}'"))),
            }
        }
        let (n, has_phases) = match (n, has_phases) {
            (Some(n), Some(p)) => (n, p),
            _ => return Err(err(first_line, format!("malformed header '{header}'"))),
        };
        check_n(n)?;
        let w = 2 * n;
        let mut parse_bits = |idx: usize| -> Result<u64> {
            let line_no = first_line + 1 + idx;
            let line = lines.next().ok_or_else(|| err(line_no, "unexpected end of tableau".into()))?;
            if line.len() != w {
                return Err(err(line_no, format!("expected {w} characters, got {}", line.len())));
            }
            let mut v = 0u64;
            for (c, ch) in line.bytes().enumerate() {
                match ch {
                    b'0' => {}
                    b'1' => v |= 1 << c,
                    _ => return Err(err(line_no, format!("invalid character '{}'", ch as char))),
                }
            }
            Ok(v)
        };
        let rows = (0..w).map(&mut parse_bits).collect::<Result<Vec<u64>>>()?;
        let phases = if has_phases { Some(parse_bits(w)?) } else { None };
        Tableau::from_rows(n, &rows, phases)
    }

    pub fn from_text(text: &str) -> Result<Tableau> {
        let mut lines = text.lines();
        let t = Tableau::parse_lines(&mut lines, 1)?;
        if let Some(extra) = lines.find(|l| !l.trim().is_empty()) {
            return Err(Error::Parse { line: 0, message: format!("trailing content after tableau: '{extra}'") });
        }
        Ok(t)
    }
}

/// X and Z gates realizing the Pauli with bit vector `p` (X half, Z half).
fn pauli_gates(p: u64, n: usize) -> impl Iterator<Item = Gate> {
    (0..n).flat_map(move |q| {
        let x = (p >> q) & 1 == 1;
        let z = (p >> (n + q)) & 1 == 1;
        [x.then(|| Gate::x(q)), z.then(|| Gate::z(q))].into_iter().flatten()
    })
}

impl fmt::Debug for Tableau {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Tableau(\n{})", self.to_text())
    }
}

impl fmt::Display for Tableau {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl FromStr for Tableau {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Tableau::from_text(s)
    }
}

/// |Cl(n)| = 2^(n²+2n) ∏_{i=1..n} (4^i − 1), divided by 4^n without phases.
pub fn clifford_group_size(n: usize, with_phases: bool) -> BigUint {
    assert!(n >= 1, "clifford_group_size needs n >= 1");
    let mut size = BigUint::from(1u8) << (n * n + 2 * n);
    for i in 1..=n {
        size *= (BigUint::from(1u8) << (2 * i)) - 1u8;
    }
    if !with_phases {
        size >>= 2 * n;
    }
    size
}
