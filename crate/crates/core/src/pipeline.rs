//! The full compilation pipeline: prepare, place, map, route.

use log::info;

use crate::device::DeviceSpec;
use crate::ir::{
    compute_slack, expand_macros, synthesize_rotations, CircuitDag, IrError, RzSynthesizer,
    StubSynthesizer, DEFAULT_RZ_EPSILON,
};
use crate::mapper::{map_qubits, MapError, QubitMap};
use crate::qcb::{
    initial_placement, optimize_placement, validate_qcb, PatchType, Qcb, QcbError, Violation,
};
use crate::router::{compile, CompilationResult, RouterError, RouterOptions};
use crate::sched::Estimator;

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error(transparent)]
    Ir(#[from] IrError),
    #[error(transparent)]
    Placement(#[from] QcbError),
    #[error("placed board fails validation: {0:?}")]
    InvalidBoard(Vec<Violation>),
    #[error(transparent)]
    Map(#[from] MapError),
    #[error(transparent)]
    Route(#[from] RouterError),
}

pub struct CompileOptions<'s> {
    pub router: RouterOptions,
    pub optimize: bool,
    pub epsilon: f64,
    pub synthesizer: &'s dyn RzSynthesizer,
}

impl Default for CompileOptions<'_> {
    fn default() -> Self {
        CompileOptions {
            router: RouterOptions::default(),
            optimize: true,
            epsilon: DEFAULT_RZ_EPSILON,
            synthesizer: &StubSynthesizer,
        }
    }
}

/// Everything the pipeline produced.
#[derive(Clone, Debug)]
pub struct Compiled {
    /// The routed DAG: macros expanded, rotations synthesized, slack computed.
    pub dag: CircuitDag,
    /// Board after placement, before mapping cleanup.
    pub placed: Qcb,
    /// Board the stream runs on.
    pub qcb: Qcb,
    pub map: QubitMap,
    pub result: CompilationResult,
}

/// Expand macros, synthesize rotations and compute slack.
pub fn prepare(
    dag: &CircuitDag,
    epsilon: f64,
    synth: &dyn RzSynthesizer,
) -> Result<CircuitDag, IrError> {
    let dag = expand_macros(dag, &[])?;
    let dag = synthesize_rotations(&dag, synth, epsilon)?;
    Ok(compute_slack(&dag))
}

/// Initial placement, optionally followed by estimator-guided optimization.
pub fn place(
    dag: &CircuitDag,
    width: u32,
    height: u32,
    optimize: bool,
) -> Result<Qcb, PipelineError> {
    let q = initial_placement(dag, width, height)?;
    let q = if optimize {
        optimize_placement(&q, dag, &mut Estimator::new())
    } else {
        let mut q = q;
        for c in q.coords().collect::<Vec<_>>() {
            if q.get(c) == PatchType::Unallocated {
                q.set(c, PatchType::LocalRoute);
            }
        }
        q
    };
    let violations = validate_qcb(&q, dag);
    if !violations.is_empty() {
        return Err(PipelineError::InvalidBoard(violations));
    }
    Ok(q)
}

pub fn compile_circuit(
    dag: &CircuitDag,
    device: &DeviceSpec,
    opts: &CompileOptions,
) -> Result<Compiled, PipelineError> {
    let mut dag = dag.clone();
    dag.costs = device.gate_costs.clone();
    let dag = prepare(&dag.rebuild(dag.ops())?, opts.epsilon, opts.synthesizer)?;
    info!(
        "prepared {} nodes over {} symbols",
        dag.len(),
        dag.symbols.len()
    );
    let placed = place(&dag, device.width, device.height, opts.optimize)?;
    info!("placed board:\n{}", placed.to_ascii());
    let mut router = opts.router.clone();
    router.convention = device.boundary_convention;
    let (qcb, map) = map_qubits(&placed, &dag, router.convention)?;
    let result = compile(&dag, &qcb, &map, &router)?;
    info!(
        "{} instructions, {} cycles, volume {}",
        result.instructions.len(),
        result.total_cycles,
        result.spacetime_volume
    );
    Ok(Compiled {
        dag,
        placed,
        qcb,
        map,
        result,
    })
}
