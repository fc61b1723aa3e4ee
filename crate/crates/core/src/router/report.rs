//! Cost reports and packaging compiled boards as externs.

use serde::{Deserialize, Serialize};

use super::{CompilationResult, RouterError, VolumeBreakdown};
use crate::ir::{ExternOpDecl, ExternTemplate};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostReport {
    pub format_version: u32,
    pub total_cycles: u64,
    pub spacetime_volume: u64,
    pub volume: VolumeBreakdown,
    pub instruction_count: usize,
    pub width: u32,
    pub height: u32,
    pub code_distance: u32,
    /// Board patches times d^2.
    pub physical_qubits: u64,
    /// Cycles times d.
    pub syndrome_rounds: u64,
    pub rotations_injected: usize,
    pub disjoint_segments: usize,
    pub extern_allocations: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

pub fn cost_report(result: &CompilationResult, code_distance: u32) -> CostReport {
    let d = code_distance as u64;
    let mut notes = Vec::new();
    if result.disjoint_segments > 0 {
        notes.push(format!(
            "{} route segments were pre-established as Bell pairs; decoder latency on them is not modelled",
            result.disjoint_segments
        ));
    }
    CostReport {
        format_version: crate::FORMAT_VERSION,
        total_cycles: result.total_cycles,
        spacetime_volume: result.spacetime_volume,
        volume: result.volume,
        instruction_count: result.instructions.len(),
        width: result.width,
        height: result.height,
        code_distance,
        physical_qubits: result.width as u64 * result.height as u64 * d * d,
        syndrome_rounds: result.total_cycles * d,
        rotations_injected: result.rotations_injected,
        disjoint_segments: result.disjoint_segments,
        extern_allocations: result.slot_uses.len(),
        notes,
    }
}

/// Expose a compiled board as an extern with a single `run` operation whose
/// IO signature is the board's IO segment.
pub fn package_as_extern(
    result: &CompilationResult,
    name: &str,
) -> Result<ExternTemplate, RouterError> {
    let (inputs, outputs) = result.io_signature.ok_or(RouterError::NoIo)?;
    let t = ExternTemplate::new(
        name,
        result.width,
        result.height,
        vec![ExternOpDecl {
            name: "run".into(),
            inputs,
            outputs,
            cycles: result.total_cycles,
        }],
    );
    t.check()?;
    Ok(t)
}
