//! JSON circuit document.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{
    CircuitDag, ExternTemplate, IoDirection, IoSymbol, IrError, MacroDef, MacroGate, Op,
    RegisterSymbol,
};
use crate::device::GateCosts;

/// Largest number of register qubits a document may declare.
pub const MAX_QUBITS: u64 = 1 << 20;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegisterDoc {
    pub name: String,
    #[serde(default = "one")]
    pub size: u32,
}

fn one() -> u32 {
    1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum IoDoc {
    Symbol(String),
    Full {
        symbol: String,
        #[serde(default)]
        direction: IoDirection,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GateDoc {
    pub op: String,
    #[serde(default)]
    pub args: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub params: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub instance: Option<String>,
}

impl GateDoc {
    pub fn new(op: &str, args: &[&str]) -> Self {
        GateDoc {
            op: op.to_string(),
            args: args.iter().map(|s| s.to_string()).collect(),
            params: Vec::new(),
            instance: None,
        }
    }
}

/// Macro bodies mix gate invocations with `{"local": name}` declarations.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MacroItem {
    Local(LocalDecl),
    Gate(GateDoc),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LocalDecl {
    pub local: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MacroDoc {
    pub name: String,
    #[serde(default)]
    pub formals: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub locals: Vec<String>,
    #[serde(default)]
    pub body: Vec<MacroItem>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircuitDocument {
    #[serde(default = "crate::format_version")]
    pub format_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default)]
    pub registers: Vec<RegisterDoc>,
    #[serde(default)]
    pub io: Vec<IoDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub macros: Vec<MacroDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub externs: Vec<ExternTemplate>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub resources: BTreeMap<String, String>,
    /// Minimum number of slots to place for an extern type.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub slots: BTreeMap<String, u32>,
    #[serde(default)]
    pub gates: Vec<GateDoc>,
}

impl CircuitDocument {
    pub fn parse(source: &str) -> Result<Self, IrError> {
        serde_json::from_str(source).map_err(|e| IrError::Document(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("document serializes")
    }

    pub fn to_dag(&self, costs: &GateCosts) -> Result<CircuitDag, IrError> {
        let mut dag = CircuitDag::empty(costs.clone());
        let mut names = BTreeSet::new();
        for r in &self.registers {
            if r.name.is_empty() || r.name.contains(['[', ']', '.', ' ']) {
                return Err(IrError::InvalidParameter(format!(
                    "bad register name `{}`",
                    r.name
                )));
            }
            if !names.insert(r.name.as_str()) {
                return Err(IrError::DuplicateRegister(r.name.clone()));
            }
            if r.size == 0 {
                return Err(IrError::InvalidParameter(format!(
                    "register `{}` has size 0",
                    r.name
                )));
            }
            if dag.symbols.len() as u64 + r.size as u64 > MAX_QUBITS {
                return Err(IrError::InvalidParameter(format!(
                    "more than {MAX_QUBITS} qubits declared"
                )));
            }
            dag.symbols
                .extend((0..r.size).map(|i| RegisterSymbol::new(&r.name, i)));
        }
        let resolve = |text: &str| -> Result<RegisterSymbol, IrError> {
            let s: RegisterSymbol = text.parse()?;
            if !text.contains('[') {
                if let Some(r) = self.registers.iter().find(|r| r.name == s.name) {
                    if r.size != 1 {
                        return Err(IrError::UnknownSymbol(format!(
                            "{text} (register of size {} needs an index)",
                            r.size
                        )));
                    }
                }
            }
            Ok(s)
        };

        for io in &self.io {
            let (text, direction) = match io {
                IoDoc::Symbol(s) => (s.as_str(), IoDirection::Inout),
                IoDoc::Full { symbol, direction } => (symbol.as_str(), *direction),
            };
            let symbol = resolve(text)?;
            if !dag.symbols.contains(&symbol) {
                return Err(IrError::UnknownSymbol(text.to_string()));
            }
            if dag.is_io(&symbol) {
                return Err(IrError::InvalidParameter(format!(
                    "IO symbol `{text}` listed twice"
                )));
            }
            dag.io.push(IoSymbol { symbol, direction });
        }

        for t in &self.externs {
            t.check()?;
            if dag.externs.insert(t.name.clone(), t.clone()).is_some() {
                return Err(IrError::InvalidExtern {
                    name: t.name.clone(),
                    reason: "declared twice".into(),
                });
            }
        }
        dag.resources = self.resources.clone();
        for (name, &n) in &self.slots {
            if !dag.externs.contains_key(name) && ExternTemplate::builtin(name).is_none() {
                return Err(IrError::InvalidExtern {
                    name: name.clone(),
                    reason: "slot count for an undeclared extern".into(),
                });
            }
            if n == 0 {
                return Err(IrError::ZeroSlots(name.clone()));
            }
        }
        dag.min_slots = self.slots.clone();

        for m in &self.macros {
            let def = macro_def(m)?;
            if dag.macros.insert(def.name.clone(), def).is_some() {
                return Err(IrError::InvalidMacro {
                    name: m.name.clone(),
                    reason: "declared twice".into(),
                });
            }
        }
        for def in dag.macros.values() {
            for g in &def.body {
                if !dag.knows_opcode(&g.op) {
                    return Err(IrError::UnknownOpcode(g.op.clone()));
                }
            }
        }

        let ops = self
            .gates
            .iter()
            .map(|g| {
                Ok(Op {
                    opcode: g.op.clone(),
                    args: g
                        .args
                        .iter()
                        .map(|a| resolve(a))
                        .collect::<Result<_, _>>()?,
                    params: g.params.clone(),
                    instance: g.instance.clone(),
                })
            })
            .collect::<Result<Vec<_>, IrError>>()?;
        dag.rebuild(ops)
    }
}

fn macro_def(m: &MacroDoc) -> Result<MacroDef, IrError> {
    let fail = |reason: String| IrError::InvalidMacro {
        name: m.name.clone(),
        reason,
    };
    let mut locals = m.locals.clone();
    let mut body = Vec::new();
    for item in &m.body {
        match item {
            MacroItem::Local(d) => locals.push(d.local.clone()),
            MacroItem::Gate(g) => body.push(MacroGate {
                op: g.op.clone(),
                args: g.args.clone(),
                params: g.params.clone(),
                instance: g.instance.clone(),
            }),
        }
    }
    let mut seen = BTreeSet::new();
    for n in m.formals.iter().chain(&locals) {
        if !seen.insert(n.as_str()) {
            return Err(fail(format!("name `{n}` bound twice")));
        }
    }
    for g in &body {
        for a in &g.args {
            if !seen.contains(a.as_str()) {
                return Err(fail(format!("`{a}` is neither a formal nor a local")));
            }
        }
    }
    Ok(MacroDef {
        name: m.name.clone(),
        formals: m.formals.clone(),
        locals,
        body,
    })
}

/// Parse a circuit document with the default gate-cost table.
pub fn parse_circuit(source: &str) -> Result<CircuitDag, IrError> {
    parse_circuit_with(source, &GateCosts::default())
}

pub fn parse_circuit_with(source: &str, costs: &GateCosts) -> Result<CircuitDag, IrError> {
    CircuitDocument::parse(source)?.to_dag(costs)
}

pub(super) fn to_document(dag: &CircuitDag) -> CircuitDocument {
    let mut sizes: Vec<(String, u32)> = Vec::new();
    for s in &dag.symbols {
        match sizes.iter_mut().find(|(n, _)| *n == s.name) {
            Some((_, size)) => *size = (*size).max(s.index + 1),
            None => sizes.push((s.name.clone(), s.index + 1)),
        }
    }
    let builtin_used = |t: &ExternTemplate| ExternTemplate::builtin(&t.name).as_ref() == Some(t);
    CircuitDocument {
        format_version: crate::FORMAT_VERSION,
        name: None,
        registers: sizes
            .into_iter()
            .map(|(name, size)| RegisterDoc { name, size })
            .collect(),
        io: dag
            .io
            .iter()
            .map(|i| IoDoc::Full {
                symbol: i.symbol.to_string(),
                direction: i.direction,
            })
            .collect(),
        macros: dag
            .macros
            .values()
            .map(|m| MacroDoc {
                name: m.name.clone(),
                formals: m.formals.clone(),
                locals: m.locals.clone(),
                body: m
                    .body
                    .iter()
                    .map(|g| {
                        MacroItem::Gate(GateDoc {
                            op: g.op.clone(),
                            args: g.args.clone(),
                            params: g.params.clone(),
                            instance: g.instance.clone(),
                        })
                    })
                    .collect(),
            })
            .collect(),
        externs: dag
            .externs
            .values()
            .filter(|t| !builtin_used(t))
            .cloned()
            .collect(),
        resources: dag.resources.clone(),
        slots: dag.min_slots.clone(),
        gates: dag
            .ops()
            .into_iter()
            .map(|o| GateDoc {
                op: o.opcode,
                args: o.args.iter().map(|a| a.to_string()).collect(),
                params: o.params,
                instance: o.instance,
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SH: &str = r#"{
        "registers": [{"name": "q", "size": 4}],
        "macros": [{"name": "SH", "formals": ["x"], "body": [
            {"op": "H", "args": ["x"]}, {"op": "S", "args": ["x"]}]}],
        "gates": [{"op": "SH", "args": ["q[3]"]}]
    }"#;

    #[test]
    fn slot_minimums_are_checked() {
        let ok = r#"{"registers": [{"name": "q"}], "slots": {"T": 3}}"#;
        let dag = parse_circuit(ok).unwrap();
        assert_eq!(dag.min_slots.get("T"), Some(&3));
        assert_eq!(dag.to_document().slots, dag.min_slots);
        let undeclared = r#"{"registers": [{"name": "q"}], "slots": {"F": 1}}"#;
        assert!(matches!(
            parse_circuit(undeclared),
            Err(IrError::InvalidExtern { .. })
        ));
        let zero = r#"{"registers": [{"name": "q"}], "slots": {"T": 0}}"#;
        assert!(matches!(parse_circuit(zero), Err(IrError::ZeroSlots(_))));
    }

    #[test]
    fn oversized_registers_rejected() {
        let doc = r#"{"registers": [{"name": "a", "size": 4000000000}]}"#;
        assert!(matches!(
            parse_circuit(doc),
            Err(IrError::InvalidParameter(_))
        ));
    }

    #[test]
    fn empty_gate_list() {
        let dag =
            parse_circuit(r#"{"registers": [{"name": "q", "size": 2}], "gates": []}"#).unwrap();
        assert_eq!(dag.len(), 0);
        assert_eq!(dag.symbols.len(), 2);
    }

    #[test]
    fn serial_dependency() {
        let dag = parse_circuit(
            r#"{"registers": [{"name": "q", "size": 2}], "gates": [
                {"op": "H", "args": ["q[0]"]}, {"op": "CNOT", "args": ["q[0]", "q[1]"]}]}"#,
        )
        .unwrap();
        assert_eq!(dag.len(), 2);
        assert_eq!(dag.edges, vec![(0, 1)]);
    }

    #[test]
    fn disjoint_operands() {
        let dag = parse_circuit(
            r#"{"registers": [{"name": "q", "size": 4}], "gates": [
                {"op": "CNOT", "args": ["q[0]", "q[1]"]}, {"op": "CNOT", "args": ["q[2]", "q[3]"]}]}"#,
        )
        .unwrap();
        assert_eq!(dag.len(), 2);
        assert!(dag.edges.is_empty());
    }

    #[test]
    fn errors() {
        assert!(matches!(
            parse_circuit(r#"{"registers": [{"name": "q"}, {"name": "q"}]}"#),
            Err(IrError::DuplicateRegister(_))
        ));
        assert!(matches!(
            parse_circuit(
                r#"{"registers": [{"name": "q"}], "gates": [{"op": "Y", "args": ["q"]}]}"#
            ),
            Err(IrError::UnknownOpcode(_))
        ));
        assert!(matches!(
            parse_circuit(
                r#"{"registers": [{"name": "q"}], "gates": [{"op": "CNOT", "args": ["q"]}]}"#
            ),
            Err(IrError::ArityMismatch { .. })
        ));
        assert!(matches!(
            parse_circuit(r#"{"registers": [], "gatez": []}"#),
            Err(IrError::Document(_))
        ));
        assert!(matches!(
            parse_circuit(
                r#"{"registers": [{"name": "q", "size": 2}], "gates": [{"op": "H", "args": ["q"]}]}"#
            ),
            Err(IrError::UnknownSymbol(_))
        ));
    }

    #[test]
    fn macro_body_checked() {
        let bad = r#"{"registers": [{"name": "q"}], "macros": [{"name": "M", "formals": ["x"],
            "body": [{"op": "H", "args": ["y"]}]}]}"#;
        assert!(matches!(
            parse_circuit(bad),
            Err(IrError::InvalidMacro { .. })
        ));
        let local = r#"{"registers": [{"name": "q"}], "macros": [{"name": "M", "formals": ["x"],
            "body": [{"local": "a"}, {"op": "CNOT", "args": ["x", "a"]}]}],
            "gates": [{"op": "M", "args": ["q"]}]}"#;
        let dag = parse_circuit(local).unwrap();
        assert_eq!(dag.macros["M"].locals, vec!["a".to_string()]);
    }

    #[test]
    fn document_round_trip() {
        let dag = parse_circuit(SH).unwrap();
        let doc = dag.to_document();
        let again = CircuitDocument::parse(&doc.to_json()).unwrap();
        assert_eq!(doc, again);
        assert_eq!(again.to_dag(&GateCosts::default()).unwrap(), dag);
    }
}
