//! Classical simulation of X / CNOT / Toffoli circuits on bit vectors.

use std::collections::{BTreeMap, HashMap};

use crate::ir::{opcodes, CircuitDag, MacroDef, RegisterSymbol};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SimError {
    #[error("`{0}` is not a classical gate")]
    NonClassical(String),
    #[error("ancilla `{local}` of `{op}` is left at 1")]
    DirtyAncilla { op: String, local: String },
    #[error("`{0}` has the wrong number of operands")]
    Arity(String),
    #[error("macro `{0}` calls itself")]
    Recursive(String),
}

/// Bit assignment of every symbol plus the trace of applied gates.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BitVectorState {
    pub bits: BTreeMap<RegisterSymbol, bool>,
    pub trace: Vec<String>,
}

impl BitVectorState {
    pub fn get(&self, s: &RegisterSymbol) -> bool {
        self.bits.get(s).copied().unwrap_or(false)
    }

    /// Little-endian integer held by `name[0..size]`.
    pub fn value(&self, name: &str, size: u32) -> u64 {
        (0..size)
            .filter(|&i| self.get(&RegisterSymbol::new(name, i)))
            .fold(0, |acc, i| acc | 1 << i)
    }

    /// Write `value` little-endian into `name[0..size]`.
    pub fn set_value(&mut self, name: &str, size: u32, value: u64) {
        for i in 0..size {
            self.bits
                .insert(RegisterSymbol::new(name, i), value >> i & 1 == 1);
        }
    }

    fn flip(&mut self, s: &RegisterSymbol) {
        let b = self.bits.entry(s.clone()).or_insert(false);
        *b = !*b;
    }
}

/// Input assignment from `(register, size, value)` triples.
pub fn inputs(values: &[(&str, u32, u64)]) -> BTreeMap<RegisterSymbol, bool> {
    let mut s = BitVectorState::default();
    for &(name, size, v) in values {
        s.set_value(name, size, v);
    }
    s.bits
}

struct Sim<'a> {
    macros: &'a BTreeMap<String, MacroDef>,
    state: BitVectorState,
    fresh: usize,
    stack: Vec<String>,
}

impl Sim<'_> {
    fn apply(&mut self, op: &str, args: &[RegisterSymbol]) -> Result<(), SimError> {
        let arity = |n: usize| {
            if args.len() == n {
                Ok(())
            } else {
                Err(SimError::Arity(op.to_string()))
            }
        };
        match op {
            "Toffoli" | "CCX" => {
                arity(3)?;
                if self.state.get(&args[0]) && self.state.get(&args[1]) {
                    self.state.flip(&args[2]);
                }
            }
            _ if self.macros.contains_key(op) => return self.expand(op, args),
            _ => match opcodes::canonical(op) {
                "X" => {
                    arity(1)?;
                    self.state.flip(&args[0]);
                }
                "CNOT" => {
                    if args.len() < 2 {
                        return Err(SimError::Arity(op.to_string()));
                    }
                    if self.state.get(&args[0]) {
                        for t in &args[1..] {
                            self.state.flip(t);
                        }
                    }
                }
                "PrepZ" => {
                    arity(1)?;
                    self.state.bits.insert(args[0].clone(), false);
                }
                "MeasZ" => arity(1)?,
                _ => return Err(SimError::NonClassical(op.to_string())),
            },
        }
        self.state.trace.push(op.to_string());
        Ok(())
    }

    fn expand(&mut self, name: &str, args: &[RegisterSymbol]) -> Result<(), SimError> {
        let def = &self.macros[name];
        if def.formals.len() != args.len() {
            return Err(SimError::Arity(name.to_string()));
        }
        if self.stack.iter().any(|s| s == name) {
            return Err(SimError::Recursive(name.to_string()));
        }
        let mut bind: HashMap<&str, RegisterSymbol> = def
            .formals
            .iter()
            .map(String::as_str)
            .zip(args.iter().cloned())
            .collect();
        let mut locals = Vec::new();
        for l in &def.locals {
            let s = RegisterSymbol::new(format!("{name}.{l}#{}", self.fresh), 0);
            self.fresh += 1;
            locals.push((l.clone(), s.clone()));
            bind.insert(l.as_str(), s);
        }
        self.stack.push(name.to_string());
        for g in &def.body {
            let inner: Vec<RegisterSymbol> =
                g.args.iter().map(|a| bind[a.as_str()].clone()).collect();
            self.apply(&g.op, &inner)?;
        }
        self.stack.pop();
        for (l, s) in locals {
            if self.state.bits.remove(&s) == Some(true) {
                return Err(SimError::DirtyAncilla {
                    op: name.to_string(),
                    local: l,
                });
            }
        }
        Ok(())
    }
}

/// Run the circuit's gates on `inputs`; unlisted symbols start at 0. Macros
/// other than `Toffoli` are expanded, and their locals must end at 0.
pub fn classical_simulate(
    dag: &CircuitDag,
    inputs: &BTreeMap<RegisterSymbol, bool>,
) -> Result<BitVectorState, SimError> {
    let mut sim = Sim {
        macros: &dag.macros,
        state: BitVectorState {
            bits: inputs.clone(),
            trace: Vec::new(),
        },
        fresh: 0,
        stack: Vec::new(),
    };
    for op in dag.ops() {
        sim.apply(&op.opcode, &op.args)?;
    }
    Ok(sim.state)
}
