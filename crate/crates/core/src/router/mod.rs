//! Cycle-exact routing of a mapped DAG into a lattice-surgery instruction stream.

mod astar;
mod board;
mod check;
mod compile;
mod disjoint;
mod report;
mod stream;

use serde::{Deserialize, Serialize};

use crate::geom::Coord;
use crate::ir::{IrError, NodeId};
use crate::sched::SchedError;

pub use astar::find_path;
pub use board::{BoardState, SlotState};
pub use check::{validate_stream, StreamViolation};
pub use compile::{compile, edge_cells, Router};
pub use disjoint::{apply_disjoint_paths, DisjointSplit};
pub use report::{cost_report, package_as_extern, CostReport};
pub use stream::{parse_stream, write_stream, InstructionStream, StreamError, StreamHeader};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum RouterError {
    #[error("symbol {0} has no patch")]
    Unmapped(String),
    #[error("node {0} names extern type `{1}` that no slot can host")]
    FootprintUnsatisfiable(NodeId, String),
    #[error("no slot on the board hosts extern type `{0}`")]
    MissingSlot(String),
    #[error("routing stalled at cycle {cycle} with nodes {waiting:?} still waiting")]
    Stalled { cycle: u64, waiting: Vec<NodeId> },
    #[error("node {0} has no exposed boundary of the required type, even after rotation")]
    NoBoundary(NodeId),
    #[error("node {0} is a macro call; expand macros before routing")]
    MacroNotExpanded(NodeId),
    #[error("node {0} is an unsynthesized rotation")]
    Unsynthesized(NodeId),
    #[error("a circuit without IO cannot be packaged as an extern")]
    NoIo,
    #[error(transparent)]
    Ir(#[from] IrError),
    #[error(transparent)]
    Sched(#[from] SchedError),
}

/// How extern requests are matched to slots on the board.
#[derive(Clone, Copy, Debug, Default, Eq, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BindingPolicy {
    /// Replay the slot assignment found by the cycle estimator.
    #[default]
    Heuristic,
    /// Per-type queues over the slots bound to that type.
    Fifo,
    /// Per-type queues over every slot large enough for the request.
    Shared,
}

impl std::str::FromStr for BindingPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "heuristic" => Ok(BindingPolicy::Heuristic),
            "fifo" => Ok(BindingPolicy::Fifo),
            "shared" => Ok(BindingPolicy::Shared),
            _ => Err(format!(
                "unknown policy `{s}` (expected heuristic, fifo or shared)"
            )),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct RouterOptions {
    pub policy: BindingPolicy,
    pub disjoint: bool,
    pub convention: crate::device::BoundaryConvention,
}

#[derive(Clone, Copy, Debug, Eq, Hash, Ord, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InstructionKind {
    Prep,
    Measure,
    Merge,
    Split,
    Rotate,
    Pauli,
    /// Bell-pair pre-establishment on idle ancillae for a disjoint route.
    IdleLock,
    ExternInvoke,
    ExternReset,
}

/// One lattice-surgery operation. It occupies its patches over
/// `[cycle, cycle + duration)`.
#[derive(Clone, Debug, Eq, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Instruction {
    pub cycle: u64,
    #[serde(default)]
    pub duration: u64,
    pub kind: InstructionKind,
    pub patches: Vec<Coord>,
    pub node: NodeId,
}

impl Instruction {
    pub fn end(&self) -> u64 {
        self.cycle + self.duration
    }

    /// Whether the instruction counts toward its node's execution span.
    pub fn in_span(&self) -> bool {
        !matches!(
            self.kind,
            InstructionKind::IdleLock | InstructionKind::ExternReset
        )
    }
}

/// A path of route patches and the window it is held for.
#[derive(Clone, Debug, Eq, PartialEq)]
pub struct RoutePath {
    pub cells: Vec<Coord>,
    pub start: u64,
    pub duration: u64,
    pub style: PathStyle,
}

#[derive(Clone, Copy, Debug, Eq, PartialEq)]
pub enum PathStyle {
    Direct,
    Disjoint,
}

/// Interval during which a slot was bound to one extern instance.
#[derive(Clone, Debug, Eq, PartialEq, Serialize, Deserialize)]
pub struct SlotUse {
    pub slot: usize,
    pub template: String,
    pub instance: usize,
    pub start: u64,
    pub end: u64,
    pub area: u64,
}

#[derive(Clone, Copy, Debug, Default, Eq, PartialEq, Serialize, Deserialize)]
pub struct VolumeBreakdown {
    pub register: u64,
    pub routing: u64,
    #[serde(rename = "extern")]
    pub externs: u64,
}

impl VolumeBreakdown {
    pub fn total(&self) -> u64 {
        self.register + self.routing + self.externs
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CompilationResult {
    pub instructions: Vec<Instruction>,
    pub total_cycles: u64,
    pub spacetime_volume: u64,
    pub volume: VolumeBreakdown,
    pub width: u32,
    pub height: u32,
    /// Dependency edges the stream must respect, barriers included.
    pub edges: Vec<(NodeId, NodeId)>,
    pub node_count: usize,
    pub mapped_patches: usize,
    pub rotations_injected: usize,
    pub disjoint_segments: usize,
    pub slot_uses: Vec<SlotUse>,
    /// Input and output counts of the board's IO segment.
    pub io_signature: Option<(u32, u32)>,
}

impl CompilationResult {
    pub fn stream(&self) -> InstructionStream {
        InstructionStream {
            header: StreamHeader {
                format_version: crate::FORMAT_VERSION,
                width: self.width,
                height: self.height,
                total_cycles: self.total_cycles,
                node_count: self.node_count,
                edges: self.edges.clone(),
            },
            instructions: self.instructions.clone(),
        }
    }

    pub fn count(&self, kind: InstructionKind) -> usize {
        self.instructions.iter().filter(|i| i.kind == kind).count()
    }
}

#[cfg(test)]
mod tests;
