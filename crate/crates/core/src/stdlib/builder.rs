//! Small helper for emitting circuit documents.

use crate::device::GateCosts;
use crate::ir::{
    CircuitDag, CircuitDocument, ExternTemplate, GateDoc, IoDirection, IoDoc, IrError, LocalDecl,
    MacroDoc, MacroItem, RegisterDoc,
};

/// A declared register; `at(i)` names one of its qubits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reg {
    pub name: String,
    pub size: u32,
}

impl Reg {
    pub fn at(&self, i: u32) -> String {
        assert!(i < self.size, "{}[{i}] out of range", self.name);
        format!("{}[{i}]", self.name)
    }

    pub fn bits(&self) -> Vec<String> {
        (0..self.size).map(|i| self.at(i)).collect()
    }

    /// Qubits `start..end`.
    pub fn slice(&self, start: u32, end: u32) -> Vec<String> {
        (start..end).map(|i| self.at(i)).collect()
    }
}

#[derive(Clone, Debug, Default)]
pub struct Builder {
    doc: CircuitDocument,
}

impl Builder {
    pub fn new(name: &str) -> Self {
        Builder {
            doc: CircuitDocument {
                format_version: crate::FORMAT_VERSION,
                name: Some(name.to_string()),
                ..Default::default()
            },
        }
    }

    pub fn reg(&mut self, name: &str, size: u32) -> Reg {
        if size > 0 {
            self.doc.registers.push(RegisterDoc {
                name: name.to_string(),
                size,
            });
        }
        Reg {
            name: name.to_string(),
            size,
        }
    }

    pub fn io(&mut self, symbols: &[String], direction: IoDirection) {
        for s in symbols {
            self.doc.io.push(IoDoc::Full {
                symbol: s.clone(),
                direction,
            });
        }
    }

    pub fn gate<S: AsRef<str>>(&mut self, op: &str, args: &[S]) {
        self.doc.gates.push(GateDoc {
            op: op.to_string(),
            args: args.iter().map(|a| a.as_ref().to_string()).collect(),
            params: Vec::new(),
            instance: None,
        });
    }

    pub fn gate_with<S: AsRef<str>>(&mut self, op: &str, args: &[S], params: Vec<f64>) {
        self.gate(op, args);
        self.doc.gates.last_mut().expect("just pushed").params = params;
    }

    pub fn declare_extern(&mut self, t: ExternTemplate) {
        if !self.doc.externs.iter().any(|e| e.name == t.name) {
            self.doc.externs.push(t);
        }
    }

    pub fn resource(&mut self, kind: &str, template: &str) {
        self.doc
            .resources
            .insert(kind.to_string(), template.to_string());
    }

    /// Have placement provide `n` slots of `template` before optimizing.
    pub fn slots(&mut self, template: &str, n: u32) {
        self.doc.slots.insert(template.to_string(), n);
    }

    pub fn has_macro(&self, name: &str) -> bool {
        self.doc.macros.iter().any(|m| m.name == name)
    }

    pub fn define_macro(&mut self, m: MacroDoc) {
        if !self.has_macro(&m.name) {
            self.doc.macros.push(m);
        }
    }

    pub fn gate_count(&self) -> usize {
        self.doc.gates.len()
    }

    pub fn finish(self) -> CircuitDocument {
        self.doc
    }
}

/// Macro body under construction.
#[derive(Clone, Debug, Default)]
pub struct MacroBody {
    items: Vec<MacroItem>,
}

impl MacroBody {
    pub fn local(&mut self, name: &str) {
        self.items.push(MacroItem::Local(LocalDecl {
            local: name.to_string(),
        }));
    }

    pub fn gate<S: AsRef<str>>(&mut self, op: &str, args: &[S]) {
        let args: Vec<&str> = args.iter().map(|a| a.as_ref()).collect();
        self.items.push(MacroItem::Gate(GateDoc::new(op, &args)));
    }

    pub fn build(self, name: &str, formals: &[String]) -> MacroDoc {
        MacroDoc {
            name: name.to_string(),
            formals: formals.to_vec(),
            locals: Vec::new(),
            body: self.items,
        }
    }
}

/// Formal names `prefix0..prefix{n-1}`.
pub fn formals(prefix: &str, n: u32) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

pub fn to_dag(doc: &CircuitDocument) -> Result<CircuitDag, IrError> {
    doc.to_dag(&GateCosts::default())
}
