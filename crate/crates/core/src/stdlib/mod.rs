//! Benchmark circuit generators and a classical simulator for checking the
//! reversible arithmetic ones.

pub mod arith;
pub mod builder;
pub mod circuits;
pub mod factories;
pub mod primitives;
pub mod qram;
pub mod sim;

use serde::{Deserialize, Serialize};

use crate::device::DeviceSpec;
use crate::ir::{CircuitDocument, IrError};
use crate::pipeline::{CompileOptions, PipelineError};
use crate::router::RouterError;

pub use arith::{gen_adder, gen_divider, gen_multiplier, ArithStyle};
pub use builder::{to_dag, Builder, MacroBody, Reg};
pub use circuits::{
    gen_cnot_network, gen_mcx, gen_qft, gen_rz, gen_toffoli, gen_toffoli_network, QftMode,
};
pub use factories::{
    build_fast_ccz_chain, build_t_factory, fast_ccz_name, gen_ccz_factory, gen_fast_ccz_factory,
    gen_t_factory, t_factory_name, FactoryStyle,
};
pub use primitives::ToffoliStrategy;
pub use qram::{gen_qram_bb, gen_qram_fanout_swap};
pub use sim::{classical_simulate, inputs, BitVectorState, SimError};

#[derive(Debug, thiserror::Error)]
pub enum GenError {
    #[error("parameter out of range: {0}")]
    Range(String),
    #[error("missing template: {0}")]
    MissingTemplate(String),
    #[error(transparent)]
    Ir(#[from] IrError),
    #[error(transparent)]
    Pipeline(#[from] Box<PipelineError>),
}

impl From<PipelineError> for GenError {
    fn from(e: PipelineError) -> Self {
        GenError::Pipeline(Box::new(e))
    }
}

impl From<RouterError> for GenError {
    fn from(e: RouterError) -> Self {
        PipelineError::from(e).into()
    }
}

fn default_seed() -> u64 {
    1
}

fn default_epsilon() -> f64 {
    1e-3
}

/// A generator family with its parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum GeneratorSpec {
    CnotNetwork {
        qubits: u32,
        rounds: u32,
        #[serde(default = "default_seed")]
        seed: u64,
    },
    #[serde(rename = "t-factory-15-1")]
    TFactory15 {
        level: u32,
    },
    TFactorySlice {
        level: u32,
    },
    CczFactory,
    /// CCZ factory at `level` built on four slots of the level below; lower
    /// levels are compiled on the smallest boards that hold them.
    FastCcz {
        level: u32,
    },
    Toffoli {
        #[serde(default)]
        strategy: ToffoliStrategy,
    },
    ToffoliNetwork {
        registers: u32,
        gates: u32,
        #[serde(default)]
        strategy: ToffoliStrategy,
        #[serde(default = "default_seed")]
        seed: u64,
    },
    Mcx {
        controls: u32,
        #[serde(default)]
        strategy: ToffoliStrategy,
    },
    Qft {
        n: u32,
        #[serde(default)]
        extern_rotations: bool,
    },
    Rz {
        count: u32,
        #[serde(default)]
        theta: Option<f64>,
        #[serde(default = "default_epsilon")]
        epsilon: f64,
        #[serde(default = "default_seed")]
        seed: u64,
    },
    Adder {
        n: u32,
        #[serde(default)]
        strategy: ToffoliStrategy,
    },
    Multiplier {
        a: u32,
        b: u32,
        #[serde(default)]
        strategy: ToffoliStrategy,
    },
    Divider {
        a: u32,
        b: u32,
        #[serde(default)]
        strategy: ToffoliStrategy,
    },
    QramBb {
        addr: u32,
        word: u32,
        #[serde(default)]
        strategy: ToffoliStrategy,
    },
    QramFanoutSwap {
        addr: u32,
        word: u32,
        #[serde(default)]
        strategy: ToffoliStrategy,
    },
}

impl GeneratorSpec {
    /// Build the circuit document. Factories above level 1 need compiled
    /// lower levels; use [`GeneratorSpec::generate_on`] for those.
    pub fn generate(&self) -> Result<CircuitDocument, GenError> {
        use GeneratorSpec::*;
        match *self {
            CnotNetwork {
                qubits,
                rounds,
                seed,
            } => gen_cnot_network(qubits, rounds, seed),
            TFactory15 { level } => gen_t_factory(level, FactoryStyle::Parallel15, None),
            TFactorySlice { level } => gen_t_factory(level, FactoryStyle::Slice, None),
            CczFactory => gen_ccz_factory(None),
            FastCcz { level } => self.fast_ccz(level, &CompileOptions::default()),
            Toffoli { strategy } => gen_toffoli(strategy),
            ToffoliNetwork {
                registers,
                gates,
                strategy,
                seed,
            } => gen_toffoli_network(registers, gates, strategy, seed),
            Mcx { controls, strategy } => gen_mcx(controls, strategy),
            Qft {
                n,
                extern_rotations,
            } => gen_qft(
                n,
                if extern_rotations {
                    QftMode::Extern
                } else {
                    QftMode::Inline
                },
            ),
            Rz {
                count,
                theta,
                epsilon,
                seed,
            } => gen_rz(count, theta, epsilon, seed),
            Adder { n, strategy } => gen_adder(n, strategy),
            Multiplier { a, b, strategy } => gen_multiplier(a, b, ArithStyle::Macro, strategy),
            Divider { a, b, strategy } => gen_divider(a, b, ArithStyle::Macro, strategy),
            QramBb {
                addr,
                word,
                strategy,
            } => gen_qram_bb(addr, word, strategy),
            QramFanoutSwap {
                addr,
                word,
                strategy,
            } => gen_qram_fanout_swap(addr, word, strategy),
        }
    }

    /// Like [`GeneratorSpec::generate`], compiling the lower levels of
    /// recursive factories on `device` first.
    pub fn generate_on(
        &self,
        device: &DeviceSpec,
        opts: &CompileOptions,
    ) -> Result<CircuitDocument, GenError> {
        let (level, style) = match *self {
            GeneratorSpec::TFactory15 { level } => (level, FactoryStyle::Parallel15),
            GeneratorSpec::TFactorySlice { level } => (level, FactoryStyle::Slice),
            GeneratorSpec::FastCcz { level } => return self.fast_ccz(level, opts),
            _ => return self.generate(),
        };
        if level < 2 {
            return self.generate();
        }
        let inner = build_t_factory(level - 1, style, device, opts)?;
        gen_t_factory(level, style, Some(&inner))
    }

    fn fast_ccz(&self, level: u32, opts: &CompileOptions) -> Result<CircuitDocument, GenError> {
        match level {
            0 => Err(GenError::Range("fast CCZ level must be at least 1".into())),
            1 => gen_ccz_factory(None),
            _ => gen_fast_ccz_factory(level, &build_fast_ccz_chain(level - 1, opts)?),
        }
    }
}

#[cfg(test)]
mod tests;
