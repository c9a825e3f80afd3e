//! Clifford circuit synthesis guided by a learned distance heuristic.
//!
//! Tableaus, move sets and random walks live in [`tableau`], [`moveset`] and
//! [`walker`]. [`guidance`] trains the heuristic, [`search`] runs greedy and
//! beam synthesis with it, [`oracle`] computes exact distances for small
//! qubit counts and [`baseline`] provides a canonical-form synthesizer for
//! comparison.

pub mod baseline;
pub mod error;
pub mod fsutil;
pub mod guidance;
pub mod moveset;
pub mod oracle;
pub mod rng;
pub mod search;
pub mod tableau;
pub mod walker;

pub use baseline::{baseline_synthesize, benchmark_compare, BaselineResult, Method, MethodKind};
pub use error::{Error, Result};
pub use guidance::{GuidanceModel, TrainConfig, TrainReport};
pub use moveset::{Move, MoveSet, MoveSetConfig, Topology, WeightScheme};
pub use oracle::{DistanceTable, OracleOptions};
pub use search::{GuidanceSource, SynthesisResult};
pub use tableau::{clifford_group_size, Gate, GateKind, PhaseMode, Tableau, MAX_QUBITS};
pub use walker::{Scaling, WalkConfig, WalkSample};
