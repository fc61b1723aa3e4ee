use proptest::prelude::*;

use surgec::device::DeviceSpec;
use surgec::ir::{critical_path_length, CircuitDocument, StubSynthesizer};
use surgec::pipeline::{compile_circuit, prepare, CompileOptions};
use surgec::router::{parse_stream, validate_stream, write_stream};
use surgec::sched::{estimate_cycles, HeuristicConfig};
use surgec::stdlib::*;

fn circuit(qubits: u32, gates: &[(u8, u32, u32)]) -> CircuitDocument {
    let mut b = Builder::new("prop");
    let q = b.reg("q", qubits);
    for &(kind, a, c) in gates {
        let (a, c) = (a % qubits, c % qubits);
        match kind % 7 {
            0 => b.gate("H", &[q.at(a)]),
            1 => b.gate("S", &[q.at(a)]),
            2 => b.gate("T", &[q.at(a)]),
            3 => b.gate("X", &[q.at(a)]),
            4 => b.gate("MeasZ", &[q.at(a)]),
            _ if a != c => b.gate(
                if kind % 2 == 0 { "CNOT" } else { "CZ" },
                &[q.at(a), q.at(c)],
            ),
            _ => b.gate("PrepZ", &[q.at(a)]),
        }
    }
    b.finish()
}

fn gates() -> impl Strategy<Value = Vec<(u8, u32, u32)>> {
    prop::collection::vec((any::<u8>(), 0u32..8, 0u32..8), 0..24)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn routed_streams_are_valid(qubits in 2u32..6, gs in gates(), side in 7u32..11, disjoint: bool) {
        let doc = circuit(qubits, &gs);
        let dag = to_dag(&doc).unwrap();
        let mut opts = CompileOptions::default();
        opts.router.disjoint = disjoint;
        let c = compile_circuit(&dag, &DeviceSpec::new(side, side), &opts).unwrap();
        let stream = c.result.stream();
        prop_assert!(validate_stream(&stream, &c.qcb).is_empty());
        prop_assert!(c.map.is_injective());
        prop_assert!(c.result.total_cycles >= critical_path_length(&c.dag));
        prop_assert_eq!(parse_stream(&write_stream(&stream)).unwrap(), stream);
        let again = compile_circuit(&dag, &DeviceSpec::new(side, side), &opts).unwrap();
        prop_assert_eq!(write_stream(&again.result.stream()), write_stream(&c.result.stream()));
    }

    #[test]
    fn estimate_bounded_by_critical_path(qubits in 2u32..6, gs in gates(), ch in 1usize..4, slots in 1usize..4) {
        let dag = prepare(&to_dag(&circuit(qubits, &gs)).unwrap(), 1e-3, &StubSynthesizer).unwrap();
        let cfg = HeuristicConfig::new(ch).with_slots("T", (5, 3), slots);
        let est = estimate_cycles(&dag, &cfg).unwrap().makespan;
        prop_assert!(est >= critical_path_length(&dag));
        let more = estimate_cycles(&dag, &HeuristicConfig::new(ch + 1).with_slots("T", (5, 3), slots + 1)).unwrap();
        prop_assert!(more.makespan <= est);
    }

    #[test]
    fn documents_round_trip(qubits in 2u32..6, gs in gates()) {
        let doc = circuit(qubits, &gs);
        prop_assert_eq!(CircuitDocument::parse(&doc.to_json()).unwrap(), doc.clone());
        let dag = to_dag(&doc).unwrap();
        prop_assert_eq!(to_dag(&dag.to_document()).unwrap(), dag);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn adder_adds(n in 1u32..7, x in any::<u64>(), y in any::<u64>()) {
        let (x, y) = (x % (1 << n), y % (1 << n));
        let d = to_dag(&gen_adder(n, ToffoliStrategy::TDag).unwrap()).unwrap();
        let s = classical_simulate(&d, &inputs(&[("a", n, x), ("b", n + 1, y)])).unwrap();
        prop_assert_eq!(s.value("b", n + 1), x + y);
        prop_assert_eq!(s.value("a", n), x);
        prop_assert_eq!(s.value("c", 1), 0);
    }

    #[test]
    fn multiplier_multiplies(a in 1u32..5, b in 1u32..5, x in any::<u64>(), y in any::<u64>()) {
        let (x, y) = (x % (1 << a), y % (1 << b));
        let d = to_dag(&gen_multiplier(a, b, ArithStyle::Macro, ToffoliStrategy::Ccz).unwrap()).unwrap();
        let s = classical_simulate(&d, &inputs(&[("x", a, x), ("y", b, y)])).unwrap();
        prop_assert_eq!(s.value("out", a + b + 1), x * y);
    }

    #[test]
    fn cnot_rounds_touch_every_qubit_once(half in 1u32..6, rounds in 1u32..6, seed: u64) {
        let n = 2 * half;
        let doc = gen_cnot_network(n, rounds, seed).unwrap();
        prop_assert_eq!(doc.gates.len() as u32, rounds * half);
        for round in doc.gates.chunks(half as usize) {
            let mut seen: Vec<&String> = round.iter().flat_map(|g| &g.args).collect();
            seen.sort();
            seen.dedup();
            prop_assert_eq!(seen.len() as u32, n);
        }
    }
}
