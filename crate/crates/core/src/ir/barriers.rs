use std::collections::BTreeMap;

use super::{CircuitDag, IrError};

/// Block the k-th allocation of each extern type on completion of every
/// consumer of allocation k - slots, so that a finite slot pool can never be
/// exhausted by allocations whose consumers are still waiting.
pub fn attach_extern_barriers(
    dag: &CircuitDag,
    slots: &BTreeMap<String, usize>,
) -> Result<CircuitDag, IrError> {
    let mut out = dag.clone();
    out.barriers.clear();
    let instances = dag.instances();
    let mut by_type: BTreeMap<&str, Vec<_>> = BTreeMap::new();
    for info in instances.values() {
        by_type
            .entry(info.template.as_str())
            .or_default()
            .push(info);
    }
    for (ty, mut list) in by_type {
        let s = slots.get(ty).copied().unwrap_or(0);
        if s == 0 {
            return Err(IrError::ZeroSlots(ty.to_string()));
        }
        list.sort_by_key(|i| i.alloc());
        for k in s..list.len() {
            let alloc = list[k].alloc();
            for &c in list[k - s].consumers() {
                out.barriers.push((c, alloc));
            }
        }
        if out.topo_order().is_none() {
            return Err(IrError::BarrierCycle(ty.to_string()));
        }
    }
    out.barriers.sort_unstable();
    out.barriers.dedup();
    out.barrier_slots = Some(slots.clone());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::super::parse_circuit;
    use super::*;

    fn toffoli_t_dag() -> CircuitDag {
        let gates = [
            ("H", vec!["c"]),
            ("CNOT", vec!["b", "c"]),
            ("Tdg", vec!["c"]),
            ("CNOT", vec!["a", "c"]),
            ("T", vec!["c"]),
            ("CNOT", vec!["b", "c"]),
            ("Tdg", vec!["c"]),
            ("CNOT", vec!["a", "c"]),
            ("T", vec!["b"]),
            ("T", vec!["c"]),
            ("H", vec!["c"]),
            ("CNOT", vec!["a", "b"]),
            ("T", vec!["a"]),
            ("Tdg", vec!["b"]),
            ("CNOT", vec!["a", "b"]),
        ];
        let body: Vec<String> = gates
            .iter()
            .map(|(op, args)| {
                let a: Vec<String> = args.iter().map(|x| format!("\"{x}\"")).collect();
                format!(r#"{{"op": "{op}", "args": [{}]}}"#, a.join(","))
            })
            .collect();
        parse_circuit(&format!(
            r#"{{"registers": [{{"name": "a"}}, {{"name": "b"}}, {{"name": "c"}}], "gates": [{}]}}"#,
            body.join(",")
        ))
        .unwrap()
    }

    fn slots(n: usize) -> BTreeMap<String, usize> {
        [("T".to_string(), n)].into()
    }

    #[test]
    fn demand_within_supply() {
        let dag = parse_circuit(
            r#"{"registers": [{"name": "q", "size": 2}], "gates": [
                {"op": "T", "args": ["q[0]"]}, {"op": "T", "args": ["q[1]"]}]}"#,
        )
        .unwrap();
        assert!(attach_extern_barriers(&dag, &slots(2))
            .unwrap()
            .barriers
            .is_empty());
    }

    #[test]
    fn toffoli_two_slots_five_barriers() {
        let dag = toffoli_t_dag();
        assert_eq!(dag.count_opcode("T") + dag.count_opcode("Tdg"), 7);
        let out = attach_extern_barriers(&dag, &slots(2)).unwrap();
        assert_eq!(out.barriers.len(), 5);
        assert!(out.topo_order().is_some());
        for &(c, a) in &out.barriers {
            assert!(out.nodes[a].is_produce());
            assert!(!out.nodes[c].is_produce());
        }
    }

    #[test]
    fn zero_slots_rejected() {
        assert_eq!(
            attach_extern_barriers(&toffoli_t_dag(), &BTreeMap::new()),
            Err(IrError::ZeroSlots("T".into()))
        );
    }
}
