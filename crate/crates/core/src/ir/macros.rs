use std::collections::{BTreeMap, HashMap};

use super::{CircuitDag, IrError, MacroDef, NodeKind, Op, RegisterSymbol};

/// Inline every macro call. Locals get fresh symbols per expansion. `defs`
/// override the DAG's own declarations of the same name.
pub fn expand_macros(dag: &CircuitDag, defs: &[MacroDef]) -> Result<CircuitDag, IrError> {
    if dag.nodes.iter().all(|n| n.kind != NodeKind::MacroCall) {
        return Ok(dag.clone());
    }
    let mut table: BTreeMap<String, MacroDef> = dag.macros.clone();
    for d in defs {
        table.insert(d.name.clone(), d.clone());
    }
    let mut out = dag.clone();
    out.macros = table.clone();
    let mut ops = Vec::new();
    let mut stack = Vec::new();
    for op in dag.ops() {
        expand_op(&table, op, &mut out, &mut ops, &mut stack)?;
    }
    out.rebuild(ops)
}

fn expand_op(
    table: &BTreeMap<String, MacroDef>,
    op: Op,
    dag: &mut CircuitDag,
    ops: &mut Vec<Op>,
    stack: &mut Vec<String>,
) -> Result<(), IrError> {
    let Some(def) = table.get(&op.opcode) else {
        ops.push(op);
        return Ok(());
    };
    if stack.contains(&def.name) {
        return Err(IrError::RecursiveMacro(def.name.clone()));
    }
    if def.formals.len() != op.args.len() {
        return Err(IrError::ArityMismatch {
            op: def.name.clone(),
            expected: def.formals.len().to_string(),
            got: op.args.len(),
        });
    }
    let mut bind: HashMap<&str, RegisterSymbol> = def
        .formals
        .iter()
        .map(String::as_str)
        .zip(op.args.iter().cloned())
        .collect();
    for local in &def.locals {
        let sym = RegisterSymbol::new(format!("{}.{}#{}", def.name, local, dag.fresh), 0);
        dag.fresh += 1;
        dag.symbols.push(sym.clone());
        bind.insert(local.as_str(), sym);
    }
    stack.push(def.name.clone());
    for g in &def.body {
        let inner = Op {
            opcode: g.op.clone(),
            args: g.args.iter().map(|a| bind[a.as_str()].clone()).collect(),
            params: g.params.clone(),
            instance: g.instance.clone(),
        };
        expand_op(table, inner, dag, ops, stack)?;
    }
    stack.pop();
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::super::{parse_circuit, MacroGate};
    use super::*;

    #[test]
    fn sh_macro_expands_in_order() {
        let dag = parse_circuit(
            r#"{"registers": [{"name": "q", "size": 4}],
                "macros": [{"name": "SH", "formals": ["x"], "body": [
                    {"op": "H", "args": ["x"]}, {"op": "S", "args": ["x"]}]}],
                "gates": [{"op": "SH", "args": ["q[3]"]}]}"#,
        )
        .unwrap();
        let out = expand_macros(&dag, &[]).unwrap();
        let codes: Vec<_> = out.nodes.iter().map(|n| n.opcode.as_str()).collect();
        assert_eq!(codes, ["H", "S"]);
        assert!(out
            .nodes
            .iter()
            .all(|n| n.operands == [RegisterSymbol::new("q", 3)]));
        assert_eq!(expand_macros(&out, &[]).unwrap(), out);
    }

    #[test]
    fn empty_body_adds_nothing() {
        let dag = parse_circuit(
            r#"{"registers": [{"name": "q"}], "macros": [{"name": "N", "formals": ["x"]}],
                "gates": [{"op": "N", "args": ["q"]}]}"#,
        )
        .unwrap();
        assert_eq!(expand_macros(&dag, &[]).unwrap().len(), 0);
    }

    #[test]
    fn locals_are_fresh_per_expansion() {
        let dag = parse_circuit(
            r#"{"registers": [{"name": "q", "size": 3}],
                "macros": [{"name": "Tof", "formals": ["a", "b", "c"], "body": [
                    {"local": "anc"},
                    {"op": "CNOT", "args": ["a", "anc"]},
                    {"op": "CNOT", "args": ["b", "anc"]},
                    {"op": "CNOT", "args": ["anc", "c"]},
                    {"op": "CNOT", "args": ["b", "anc"]},
                    {"op": "CNOT", "args": ["a", "anc"]}]}],
                "gates": [{"op": "Tof", "args": ["q[0]", "q[1]", "q[2]"]},
                          {"op": "Tof", "args": ["q[0]", "q[1]", "q[2]"]}]}"#,
        )
        .unwrap();
        let out = expand_macros(&dag, &[]).unwrap();
        assert_eq!(out.len(), 10);
        assert_eq!(out.symbols.len(), 5);
        let first: Vec<_> = out.nodes[..5].iter().flat_map(|n| &n.operands).collect();
        let second: Vec<_> = out.nodes[5..].iter().flat_map(|n| &n.operands).collect();
        let fresh = |v: &Vec<&RegisterSymbol>| {
            v.iter()
                .find(|s| s.name.starts_with("Tof."))
                .map(|s| (*s).clone())
                .unwrap()
        };
        assert_ne!(fresh(&first), fresh(&second));
    }

    #[test]
    fn recursion_detected() {
        let dag = parse_circuit(
            r#"{"registers": [{"name": "q"}],
                "macros": [{"name": "A", "formals": ["x"], "body": [{"op": "B", "args": ["x"]}]},
                           {"name": "B", "formals": ["x"], "body": [{"op": "A", "args": ["x"]}]}],
                "gates": [{"op": "A", "args": ["q"]}]}"#,
        )
        .unwrap();
        assert_eq!(
            expand_macros(&dag, &[]),
            Err(IrError::RecursiveMacro("A".into()))
        );
    }

    #[test]
    fn override_definitions() {
        let dag = parse_circuit(
            r#"{"registers": [{"name": "q"}],
                "macros": [{"name": "A", "formals": ["x"], "body": [{"op": "H", "args": ["x"]}]}],
                "gates": [{"op": "A", "args": ["q"]}]}"#,
        )
        .unwrap();
        let def = MacroDef::new(
            "A",
            &["x"],
            vec![MacroGate {
                op: "X".into(),
                args: vec!["x".into()],
                params: vec![],
                instance: None,
            }],
        );
        let out = expand_macros(&dag, &[def]).unwrap();
        assert_eq!(out.nodes[0].opcode, "X");
    }
}
