//! Circuit intermediate representation: symbolic registers, gate nodes and the
//! dependency DAG that every later stage consumes.

mod barriers;
mod build;
mod document;
mod macros;
pub mod opcodes;
mod slack;
mod synth;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::device::GateCosts;

pub use barriers::attach_extern_barriers;
pub use document::{
    parse_circuit, parse_circuit_with, CircuitDocument, GateDoc, IoDoc, LocalDecl, MacroDoc,
    MacroItem, RegisterDoc, MAX_QUBITS,
};
pub use macros::expand_macros;
pub use slack::{compute_slack, critical_path_length};
pub use synth::{
    synthesize_rotations, synthesize_rz, CommandSynthesizer, RzSynthesizer, StubSynthesizer,
    DEFAULT_RZ_EPSILON,
};

pub type NodeId = usize;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum IrError {
    #[error("circuit document is malformed: {0}")]
    Document(String),
    #[error("unknown opcode `{0}`")]
    UnknownOpcode(String),
    #[error("`{op}` expects {expected} operand(s), got {got}")]
    ArityMismatch {
        op: String,
        expected: String,
        got: usize,
    },
    #[error("register `{0}` declared twice")]
    DuplicateRegister(String),
    #[error("unknown register symbol `{0}`")]
    UnknownSymbol(String),
    #[error("operand `{0}` appears twice in one gate")]
    RepeatedOperand(String),
    #[error("macro `{0}` expands recursively")]
    RecursiveMacro(String),
    #[error("macro `{name}`: {reason}")]
    InvalidMacro { name: String, reason: String },
    #[error("extern `{name}`: {reason}")]
    InvalidExtern { name: String, reason: String },
    #[error("no slots configured for extern type `{0}`")]
    ZeroSlots(String),
    #[error("barriers for extern type `{0}` would create a dependency cycle")]
    BarrierCycle(String),
    #[error("synthesis provider failed: {0}")]
    Synthesis(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// One qubit of a named register.
#[derive(Clone, Debug, Eq, Hash, Ord, PartialEq, PartialOrd)]
pub struct RegisterSymbol {
    pub name: String,
    pub index: u32,
}

impl RegisterSymbol {
    pub fn new(name: impl Into<String>, index: u32) -> Self {
        RegisterSymbol {
            name: name.into(),
            index,
        }
    }
}

impl fmt::Display for RegisterSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}]", self.name, self.index)
    }
}

impl FromStr for RegisterSymbol {
    type Err = IrError;

    /// Accepts `name[index]` or a bare `name` (index 0).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let bad = || IrError::UnknownSymbol(s.to_string());
        if let Some(open) = s.find('[') {
            let close = s.strip_suffix(']').ok_or_else(bad)?;
            let name = &s[..open];
            let index = close[open + 1..].trim().parse().map_err(|_| bad())?;
            if name.is_empty() {
                return Err(bad());
            }
            Ok(RegisterSymbol::new(name, index))
        } else if s.is_empty() || s.contains(']') {
            Err(bad())
        } else {
            Ok(RegisterSymbol::new(s, 0))
        }
    }
}

impl Serialize for RegisterSymbol {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for RegisterSymbol {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Copy, Debug, Eq, Hash, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    X,
    Z,
    Either,
}

#[derive(Clone, Copy, Debug, Eq, Hash, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NodeKind {
    Native,
    RotationInjected,
    ExternOp,
    MacroCall,
}

/// How a node relates to the extern instance it depends on.
#[derive(Clone, Copy, Debug, Eq, Hash, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExternRole {
    /// Runs a factory operation with no operands, leaving states on the outputs.
    Produce,
    /// Consumes states left on the outputs by the preceding produce node.
    Consume,
    /// Moves operands into the extern, runs the operation and moves them back.
    Invoke,
}

#[derive(Clone, Debug, Eq, Hash, PartialEq, Serialize, Deserialize)]
pub struct ExternUse {
    pub template: String,
    pub op: String,
    pub instance: usize,
    pub role: ExternRole,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

#[derive(Clone, Debug, Eq, Hash, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExternOpDecl {
    pub name: String,
    #[serde(default)]
    pub inputs: u32,
    #[serde(default)]
    pub outputs: u32,
    pub cycles: u64,
}

impl ExternOpDecl {
    /// Bottom-edge positions the operation uses.
    pub fn io_positions(&self) -> u32 {
        self.inputs.max(self.outputs)
    }
}

/// Interface of a pre-compiled block: footprint, operations and IO signature.
#[derive(Clone, Debug, Eq, Hash, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExternTemplate {
    #[serde(default = "crate::format_version")]
    pub format_version: u32,
    pub name: String,
    pub width: u32,
    pub height: u32,
    pub ops: Vec<ExternOpDecl>,
    #[serde(default = "yes")]
    pub resettable: bool,
}

fn yes() -> bool {
    true
}

impl ExternTemplate {
    pub fn new(name: &str, width: u32, height: u32, ops: Vec<ExternOpDecl>) -> Self {
        ExternTemplate {
            format_version: crate::FORMAT_VERSION,
            name: name.to_string(),
            width,
            height,
            ops,
            resettable: true,
        }
    }

    /// Default |T> factory used when a circuit consumes T states without
    /// declaring its own template.
    pub fn builtin_t() -> Self {
        ExternTemplate::new(
            "T",
            5,
            3,
            vec![ExternOpDecl {
                name: "produce".into(),
                inputs: 0,
                outputs: 1,
                cycles: 11,
            }],
        )
    }

    /// Default |CCZ> factory.
    pub fn builtin_ccz() -> Self {
        ExternTemplate::new(
            "CCZ",
            6,
            4,
            vec![ExternOpDecl {
                name: "produce".into(),
                inputs: 0,
                outputs: 3,
                cycles: 15,
            }],
        )
    }

    pub fn builtin(name: &str) -> Option<Self> {
        match name {
            "T" => Some(Self::builtin_t()),
            "CCZ" => Some(Self::builtin_ccz()),
            _ => None,
        }
    }

    pub fn op(&self, name: &str) -> Option<&ExternOpDecl> {
        self.ops.iter().find(|o| o.name == name)
    }

    /// First operation taking no inputs, used to produce resource states.
    pub fn producer(&self) -> Option<&ExternOpDecl> {
        self.ops.iter().find(|o| o.inputs == 0 && o.outputs > 0)
    }

    pub fn check(&self) -> Result<(), IrError> {
        let fail = |reason: String| IrError::InvalidExtern {
            name: self.name.clone(),
            reason,
        };
        if self.name.is_empty() {
            return Err(fail("empty name".into()));
        }
        if self.width == 0 || self.height == 0 {
            return Err(fail("footprint must be at least 1x1".into()));
        }
        if self.ops.is_empty() {
            return Err(fail("declares no operations".into()));
        }
        for (i, op) in self.ops.iter().enumerate() {
            if op.io_positions() > self.width {
                return Err(fail(format!(
                    "operation `{}` needs {} IO positions on a width-{} edge",
                    op.name,
                    op.io_positions(),
                    self.width
                )));
            }
            if self.ops[..i].iter().any(|o| o.name == op.name) {
                return Err(fail(format!("operation `{}` declared twice", op.name)));
            }
        }
        Ok(())
    }

    pub fn parse(source: &str) -> Result<Self, IrError> {
        let t: ExternTemplate =
            serde_json::from_str(source).map_err(|e| IrError::Document(e.to_string()))?;
        t.check()?;
        Ok(t)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("template serializes")
    }
}

#[derive(Clone, Copy, Debug, Default, Eq, Hash, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IoDirection {
    Input,
    Output,
    #[default]
    Inout,
}

#[derive(Clone, Debug, Eq, PartialEq, Serialize, Deserialize)]
pub struct IoSymbol {
    pub symbol: RegisterSymbol,
    pub direction: IoDirection,
}

/// One gate invocation inside a macro body; arguments name formals or locals.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MacroGate {
    pub op: String,
    pub args: Vec<String>,
    pub params: Vec<f64>,
    pub instance: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MacroDef {
    pub name: String,
    pub formals: Vec<String>,
    pub locals: Vec<String>,
    pub body: Vec<MacroGate>,
}

impl MacroDef {
    pub fn new(name: &str, formals: &[&str], body: Vec<MacroGate>) -> Self {
        MacroDef {
            name: name.to_string(),
            formals: formals.iter().map(|s| s.to_string()).collect(),
            locals: Vec::new(),
            body,
        }
    }
}

/// A gate in program order, before dependencies are derived.
#[derive(Clone, Debug, PartialEq)]
pub struct Op {
    pub opcode: String,
    pub args: Vec<RegisterSymbol>,
    pub params: Vec<f64>,
    pub instance: Option<String>,
}

impl Op {
    pub fn new(opcode: &str, args: Vec<RegisterSymbol>) -> Self {
        Op {
            opcode: opcode.to_string(),
            args,
            params: Vec::new(),
            instance: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GateNode {
    pub kind: NodeKind,
    pub opcode: String,
    pub operands: Vec<RegisterSymbol>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub params: Vec<f64>,
    pub cycles: u64,
    pub boundaries: Vec<Boundary>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub extern_dep: Option<ExternUse>,
    pub slack: u64,
}

impl GateNode {
    pub fn locality(&self) -> Option<opcodes::Locality> {
        match self.kind {
            NodeKind::Native => opcodes::native(&self.opcode).map(|i| i.locality),
            NodeKind::RotationInjected => Some(opcodes::Locality::Rotation),
            _ => None,
        }
    }

    /// Whether the node needs a routing channel while it runs.
    pub fn is_non_local(&self) -> bool {
        use opcodes::Locality::*;
        match self.kind {
            NodeKind::ExternOp => !self.operands.is_empty(),
            NodeKind::MacroCall => false,
            _ => matches!(
                self.locality(),
                Some(NonLocal | Consume | AncillaUnary | Rotation)
            ),
        }
    }

    pub fn is_produce(&self) -> bool {
        matches!(&self.extern_dep, Some(u) if u.role == ExternRole::Produce)
    }
}

/// Nodes sharing one extern instance, in program order. The first node is the
/// allocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InstanceInfo {
    pub template: String,
    pub nodes: Vec<NodeId>,
}

impl InstanceInfo {
    pub fn alloc(&self) -> NodeId {
        self.nodes[0]
    }

    /// Nodes whose completion frees the instance for the next allocation.
    pub fn consumers(&self) -> &[NodeId] {
        if self.nodes.len() > 1 {
            &self.nodes[1..]
        } else {
            &self.nodes[..]
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CircuitDag {
    pub nodes: Vec<GateNode>,
    /// Data dependencies (producer, consumer), sorted.
    pub edges: Vec<(NodeId, NodeId)>,
    /// Extern-allocation barriers (consumer of an earlier allocation, later allocation).
    pub barriers: Vec<(NodeId, NodeId)>,
    pub io: Vec<IoSymbol>,
    /// Every declared symbol, including fresh macro locals.
    pub symbols: Vec<RegisterSymbol>,
    pub externs: BTreeMap<String, ExternTemplate>,
    pub macros: BTreeMap<String, MacroDef>,
    /// Resource kind (`T`, `CCZ`) to extern template name.
    pub resources: BTreeMap<String, String>,
    /// Slots placement must provide up front, by template name.
    pub min_slots: BTreeMap<String, u32>,
    pub costs: GateCosts,
    /// Slot counts the current barriers were computed for.
    pub barrier_slots: Option<BTreeMap<String, usize>>,
    pub(crate) fresh: usize,
}

impl CircuitDag {
    pub fn empty(costs: GateCosts) -> Self {
        CircuitDag {
            nodes: Vec::new(),
            edges: Vec::new(),
            barriers: Vec::new(),
            io: Vec::new(),
            symbols: Vec::new(),
            externs: BTreeMap::new(),
            macros: BTreeMap::new(),
            resources: BTreeMap::new(),
            min_slots: BTreeMap::new(),
            costs,
            barrier_slots: None,
            fresh: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn is_io(&self, s: &RegisterSymbol) -> bool {
        self.io.iter().any(|i| &i.symbol == s)
    }

    /// Declared symbols that need a register patch (IO symbols live on IO patches).
    pub fn data_symbols(&self) -> Vec<RegisterSymbol> {
        self.symbols
            .iter()
            .filter(|s| !self.is_io(s))
            .cloned()
            .collect()
    }

    /// Predecessor and successor lists; barriers included on request.
    pub fn adjacency(&self, with_barriers: bool) -> (Vec<Vec<NodeId>>, Vec<Vec<NodeId>>) {
        let n = self.nodes.len();
        let mut preds = vec![Vec::new(); n];
        let mut succs = vec![Vec::new(); n];
        let extra = if with_barriers {
            &self.barriers[..]
        } else {
            &[]
        };
        for &(a, b) in self.edges.iter().chain(extra) {
            preds[b].push(a);
            succs[a].push(b);
        }
        (preds, succs)
    }

    /// Topological order over edges and barriers, or `None` on a cycle.
    pub fn topo_order(&self) -> Option<Vec<NodeId>> {
        let (preds, succs) = self.adjacency(true);
        let mut indeg: Vec<usize> = preds.iter().map(Vec::len).collect();
        let mut ready: std::collections::BTreeSet<NodeId> =
            (0..self.nodes.len()).filter(|&i| indeg[i] == 0).collect();
        let mut order = Vec::with_capacity(self.nodes.len());
        while let Some(v) = ready.pop_first() {
            order.push(v);
            for &s in &succs[v] {
                indeg[s] -= 1;
                if indeg[s] == 0 {
                    ready.insert(s);
                }
            }
        }
        (order.len() == self.nodes.len()).then_some(order)
    }

    /// Extern instances keyed by instance id.
    pub fn instances(&self) -> BTreeMap<usize, InstanceInfo> {
        let mut out: BTreeMap<usize, InstanceInfo> = BTreeMap::new();
        for (i, node) in self.nodes.iter().enumerate() {
            if let Some(dep) = &node.extern_dep {
                out.entry(dep.instance)
                    .or_insert_with(|| InstanceInfo {
                        template: dep.template.clone(),
                        nodes: Vec::new(),
                    })
                    .nodes
                    .push(i);
            }
        }
        out
    }

    /// Templates actually used by nodes, sorted by name.
    pub fn used_templates(&self) -> Vec<&ExternTemplate> {
        let mut names: Vec<&str> = self
            .nodes
            .iter()
            .filter_map(|n| n.extern_dep.as_ref().map(|d| d.template.as_str()))
            .collect();
        names.sort_unstable();
        names.dedup();
        names.iter().filter_map(|n| self.externs.get(*n)).collect()
    }

    pub fn count_opcode(&self, opcode: &str) -> usize {
        self.nodes.iter().filter(|n| n.opcode == opcode).count()
    }

    /// Program order without the generated produce nodes; rebuilding from it
    /// reproduces the same DAG.
    pub fn ops(&self) -> Vec<Op> {
        self.nodes
            .iter()
            .filter(|n| !n.is_produce() && n.kind != NodeKind::RotationInjected)
            .map(|n| Op {
                opcode: n.opcode.clone(),
                args: n.operands.clone(),
                params: n.params.clone(),
                instance: n.extern_dep.as_ref().and_then(|d| d.label.clone()),
            })
            .collect()
    }

    pub fn to_document(&self) -> CircuitDocument {
        document::to_document(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symbol_parse_and_display() {
        let s: RegisterSymbol = "q[3]".parse().unwrap();
        assert_eq!(s, RegisterSymbol::new("q", 3));
        assert_eq!(s.to_string(), "q[3]");
        assert_eq!("anc".parse::<RegisterSymbol>().unwrap().index, 0);
        assert!("q[x]".parse::<RegisterSymbol>().is_err());
        assert!("[1]".parse::<RegisterSymbol>().is_err());
        assert!("".parse::<RegisterSymbol>().is_err());
    }

    #[test]
    fn extern_io_must_fit_edge() {
        let t = ExternTemplate::new(
            "A",
            2,
            2,
            vec![ExternOpDecl {
                name: "run".into(),
                inputs: 3,
                outputs: 1,
                cycles: 4,
            }],
        );
        assert!(matches!(t.check(), Err(IrError::InvalidExtern { .. })));
        assert!(ExternTemplate::builtin_t().check().is_ok());
        assert!(ExternTemplate::builtin_ccz().check().is_ok());
    }

    #[test]
    fn template_round_trip() {
        let t = ExternTemplate::builtin_ccz();
        assert_eq!(ExternTemplate::parse(&t.to_json()).unwrap(), t);
    }
}
