use std::collections::{BTreeMap, HashMap, HashSet};

use super::opcodes::{self, Locality};
use super::{
    Boundary, CircuitDag, ExternRole, ExternTemplate, ExternUse, GateNode, IrError, NodeKind, Op,
    RegisterSymbol,
};

enum Resolved<'a> {
    Macro(usize),
    Native(opcodes::OpcodeInfo),
    Extern(&'a ExternTemplate, &'a str),
}

impl CircuitDag {
    fn resolve<'a>(&'a self, opcode: &str) -> Result<Resolved<'a>, IrError> {
        if let Some(m) = self.macros.get(opcode) {
            return Ok(Resolved::Macro(m.formals.len()));
        }
        if let Some(info) = opcodes::native(opcodes::canonical(opcode)) {
            return Ok(Resolved::Native(info));
        }
        let (tmpl, op) = match opcode.split_once('.') {
            Some((t, o)) => (t, Some(o)),
            None => (opcode, None),
        };
        if let Some(t) = self.externs.get(tmpl) {
            let decl = match op {
                Some(o) => t.op(o),
                None => t.ops.first(),
            }
            .ok_or_else(|| IrError::UnknownOpcode(opcode.to_string()))?;
            return Ok(Resolved::Extern(t, &decl.name));
        }
        Err(IrError::UnknownOpcode(opcode.to_string()))
    }

    /// Whether an opcode names a native gate, a macro or an extern operation.
    pub fn knows_opcode(&self, opcode: &str) -> bool {
        self.resolve(opcode).is_ok()
    }

    /// Template serving a resource kind, inserting the builtin default on first use.
    fn resource_template(&mut self, kind: &str) -> Result<String, IrError> {
        let name = self
            .resources
            .get(kind)
            .cloned()
            .unwrap_or_else(|| kind.to_string());
        if !self.externs.contains_key(&name) {
            match ExternTemplate::builtin(&name) {
                Some(t) => {
                    self.externs.insert(name.clone(), t);
                }
                None => {
                    return Err(IrError::InvalidExtern {
                        name,
                        reason: format!("undeclared template for `{kind}` states"),
                    })
                }
            }
        }
        Ok(name)
    }

    /// Rebuild nodes, edges and slack from a program, keeping every
    /// declaration of `self`. Barriers are dropped.
    pub fn rebuild(&self, ops: Vec<Op>) -> Result<CircuitDag, IrError> {
        let mut dag = CircuitDag {
            nodes: Vec::with_capacity(ops.len()),
            edges: Vec::new(),
            barriers: Vec::new(),
            barrier_slots: None,
            ..self.clone()
        };
        let declared: HashSet<&RegisterSymbol> = self.symbols.iter().collect();
        let mut nodes = Vec::with_capacity(ops.len());
        let mut instances = 0usize;
        let mut labels: HashMap<String, usize> = HashMap::new();

        for op in ops {
            for (i, a) in op.args.iter().enumerate() {
                if !declared.contains(a) {
                    return Err(IrError::UnknownSymbol(a.to_string()));
                }
                if op.args[..i].contains(a) {
                    return Err(IrError::RepeatedOperand(a.to_string()));
                }
            }
            let arity_err = |expected: String| IrError::ArityMismatch {
                op: op.opcode.clone(),
                expected,
                got: op.args.len(),
            };
            let resolved = match dag.resolve(&op.opcode)? {
                Resolved::Macro(n) => Err(n),
                Resolved::Native(info) => Ok((None, Some(info))),
                Resolved::Extern(t, o) => Ok((Some((t.clone(), o.to_string())), None)),
            };
            match resolved {
                Err(formals) => {
                    if formals != op.args.len() {
                        return Err(arity_err(formals.to_string()));
                    }
                    nodes.push(GateNode {
                        kind: NodeKind::MacroCall,
                        opcode: op.opcode,
                        boundaries: vec![Boundary::Either; op.args.len()],
                        operands: op.args,
                        params: op.params,
                        cycles: 0,
                        extern_dep: None,
                        slack: 0,
                    });
                }
                Ok((None, Some(info))) => {
                    if !info.arity_ok(op.args.len()) {
                        return Err(arity_err(info.arity_text()));
                    }
                    if info.locality == Locality::Synthesized && op.params.is_empty() {
                        return Err(IrError::InvalidParameter(format!(
                            "`{}` needs an angle parameter",
                            op.opcode
                        )));
                    }
                    let mut extern_dep = None;
                    if let Some(kind) = info.resource {
                        let tmpl_name = dag.resource_template(kind)?;
                        let tmpl = &dag.externs[&tmpl_name];
                        let producer = tmpl.producer().ok_or_else(|| IrError::InvalidExtern {
                            name: tmpl_name.clone(),
                            reason: "no operation produces states".into(),
                        })?;
                        if (producer.outputs as usize) < op.args.len() {
                            return Err(IrError::InvalidExtern {
                                name: tmpl_name.clone(),
                                reason: format!(
                                    "`{}` needs {} outputs, template has {}",
                                    info.name,
                                    op.args.len(),
                                    producer.outputs
                                ),
                            });
                        }
                        let instance = instances;
                        instances += 1;
                        nodes.push(GateNode {
                            kind: NodeKind::ExternOp,
                            opcode: format!("{}.{}", tmpl_name, producer.name),
                            operands: Vec::new(),
                            params: Vec::new(),
                            cycles: producer.cycles,
                            boundaries: Vec::new(),
                            extern_dep: Some(ExternUse {
                                template: tmpl_name.clone(),
                                op: producer.name.clone(),
                                instance,
                                role: ExternRole::Produce,
                                label: None,
                            }),
                            slack: 0,
                        });
                        extern_dep = Some(ExternUse {
                            template: tmpl_name,
                            op: producer.name.clone(),
                            instance,
                            role: ExternRole::Consume,
                            label: None,
                        });
                    }
                    nodes.push(GateNode {
                        kind: NodeKind::Native,
                        opcode: info.name.to_string(),
                        boundaries: info.boundaries(op.args.len()),
                        cycles: dag.costs.cost(info.name),
                        operands: op.args,
                        params: op.params,
                        extern_dep,
                        slack: 0,
                    });
                }
                Ok((Some((tmpl, opname)), _)) => {
                    let decl = tmpl.op(&opname).expect("resolved op exists");
                    if op.args.len() != decl.inputs as usize {
                        return Err(arity_err(decl.inputs.to_string()));
                    }
                    let instance = match &op.instance {
                        Some(label) => *labels.entry(label.clone()).or_insert_with(|| {
                            instances += 1;
                            instances - 1
                        }),
                        None => {
                            instances += 1;
                            instances - 1
                        }
                    };
                    let transfer = if op.args.is_empty() {
                        0
                    } else {
                        2 * dag.costs.cost("Transfer")
                    };
                    nodes.push(GateNode {
                        kind: NodeKind::ExternOp,
                        opcode: format!("{}.{}", tmpl.name, opname),
                        boundaries: vec![Boundary::Either; op.args.len()],
                        operands: op.args,
                        params: op.params,
                        cycles: decl.cycles + transfer,
                        extern_dep: Some(ExternUse {
                            template: tmpl.name.clone(),
                            op: opname,
                            instance,
                            role: ExternRole::Invoke,
                            label: op.instance.clone(),
                        }),
                        slack: 0,
                    });
                }
                Ok((None, None)) => unreachable!(),
            }
        }

        let mut last: BTreeMap<&RegisterSymbol, usize> = BTreeMap::new();
        let mut last_inst: HashMap<usize, usize> = HashMap::new();
        let mut edges = Vec::new();
        for (i, n) in nodes.iter().enumerate() {
            for s in &n.operands {
                if let Some(p) = last.insert(s, i) {
                    edges.push((p, i));
                }
            }
            if let Some(dep) = &n.extern_dep {
                if let Some(p) = last_inst.insert(dep.instance, i) {
                    edges.push((p, i));
                }
            }
        }
        edges.sort_unstable();
        edges.dedup();
        dag.nodes = nodes;
        dag.edges = edges;
        super::slack::assign_slack(&mut dag);
        Ok(dag)
    }
}

#[cfg(test)]
mod tests {
    use super::super::*;
    use crate::device::GateCosts;

    fn dag_with(symbols: &[&str]) -> CircuitDag {
        let mut d = CircuitDag::empty(GateCosts::default());
        d.symbols = symbols.iter().map(|s| s.parse().unwrap()).collect();
        d
    }

    fn op(code: &str, args: &[&str]) -> Op {
        Op::new(code, args.iter().map(|s| s.parse().unwrap()).collect())
    }

    #[test]
    fn t_gate_gets_producer() {
        let d = dag_with(&["q"]).rebuild(vec![op("T", &["q"])]).unwrap();
        assert_eq!(d.nodes.len(), 2);
        assert!(d.nodes[0].is_produce());
        assert_eq!(d.edges, vec![(0, 1)]);
        assert!(d.externs.contains_key("T"));
        assert_eq!(d.ops(), vec![op("T", &["q"])]);
    }

    #[test]
    fn rejects_bad_operands() {
        let d = dag_with(&["a", "b"]);
        assert!(matches!(
            d.rebuild(vec![op("CNOT", &["a", "a"])]),
            Err(IrError::RepeatedOperand(_))
        ));
        assert!(matches!(
            d.rebuild(vec![op("H", &["c"])]),
            Err(IrError::UnknownSymbol(_))
        ));
        assert!(matches!(
            d.rebuild(vec![op("H", &["a", "b"])]),
            Err(IrError::ArityMismatch { .. })
        ));
        assert!(matches!(
            d.rebuild(vec![op("Foo", &["a"])]),
            Err(IrError::UnknownOpcode(_))
        ));
    }

    #[test]
    fn labelled_invocations_share_an_instance() {
        let mut d = dag_with(&["a", "b"]);
        let t = ExternTemplate::new(
            "acc",
            2,
            2,
            vec![ExternOpDecl {
                name: "add".into(),
                inputs: 1,
                outputs: 1,
                cycles: 5,
            }],
        );
        d.externs.insert("acc".into(), t);
        let mut o1 = op("acc.add", &["a"]);
        o1.instance = Some("x".into());
        let mut o2 = op("acc", &["b"]);
        o2.instance = Some("x".into());
        let d = d.rebuild(vec![o1, o2]).unwrap();
        assert_eq!(d.instances().len(), 1);
        assert_eq!(d.edges, vec![(0, 1)]);
        assert_eq!(d.nodes[0].cycles, 5 + 4);
    }
}
