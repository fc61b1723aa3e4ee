use super::*;
use crate::ir::{expand_macros, CircuitDag, ExternRole, ExternTemplate};

fn dag(doc: CircuitDocument) -> CircuitDag {
    to_dag(&doc).unwrap()
}

fn flat(doc: CircuitDocument) -> CircuitDag {
    expand_macros(&dag(doc), &[]).unwrap()
}

fn consumed(d: &CircuitDag, template: &str) -> usize {
    d.nodes
        .iter()
        .filter(|n| {
            n.extern_dep
                .as_ref()
                .is_some_and(|e| e.role == ExternRole::Consume && e.template == template)
        })
        .count()
}

#[test]
fn cnot_network_counts_and_seed() {
    let d = dag(gen_cnot_network(2, 1, 7).unwrap());
    assert_eq!(d.count_opcode("CNOT"), 1);
    let d = dag(gen_cnot_network(8, 100, 3).unwrap());
    assert_eq!(d.count_opcode("CNOT"), 400);
    assert_eq!(crate::ir::critical_path_length(&d), 100 * 2);
    assert_eq!(
        gen_cnot_network(4, 2, 9).unwrap(),
        gen_cnot_network(4, 2, 9).unwrap()
    );
    assert_ne!(
        gen_cnot_network(8, 4, 1).unwrap(),
        gen_cnot_network(8, 4, 2).unwrap()
    );
    assert!(gen_cnot_network(3, 1, 0).is_err());
    assert!(gen_cnot_network(4, 0, 0).is_err());
}

#[test]
fn toffoli_strategies() {
    let t = flat(gen_toffoli(ToffoliStrategy::TDag).unwrap());
    assert_eq!(t.count_opcode("T") + t.count_opcode("Tdg"), 7);
    assert_eq!(consumed(&t, "T"), 7);
    let e = flat(gen_toffoli(ToffoliStrategy::Extern).unwrap());
    assert_eq!(e.len(), 1);
    assert_eq!(e.nodes[0].opcode, "toffoli.apply");
    let c = flat(gen_toffoli(ToffoliStrategy::Ccz).unwrap());
    assert_eq!(consumed(&c, "CCZ"), 1);
    assert_eq!(c.count_opcode("H"), 2);
}

#[test]
fn mcx_recursion_counts() {
    let count = |n| {
        let d = dag(gen_mcx(n, ToffoliStrategy::TDag).unwrap());
        (d.count_opcode("Toffoli"), d.count_opcode("CNOT"))
    };
    assert_eq!(count(1), (0, 1));
    assert_eq!(count(2), (1, 0));
    assert_eq!(count(3), (3, 0));
    assert_eq!(count(4), (5, 0));
    // T(n) = 2 T(a) + 2 T(b) + 1 with reduced groups of one costing nothing
    fn oracle(n: usize) -> usize {
        match n {
            1 => 0,
            2 => 1,
            _ => {
                let a = n.div_ceil(2);
                let t = |k: usize| if k == 1 { 0 } else { oracle(k) };
                2 * (t(a) + t(n - a)) + 1
            }
        }
    }
    for n in 2..=9 {
        assert_eq!(count(n as u32).0, oracle(n), "n = {n}");
    }
}

#[test]
fn mcx_is_correct_classically() {
    for n in 1..=6u32 {
        let doc = gen_mcx(n, ToffoliStrategy::TDag).unwrap();
        let d = dag(doc);
        for x in 0..1u64 << n {
            let s = classical_simulate(&d, &inputs(&[("c", n, x)])).unwrap();
            let all = x == (1 << n) - 1;
            assert_eq!(s.value("t", 1) == 1, all);
            assert_eq!(s.value("c", n), x);
            assert_eq!(s.value("anc", 16), 0);
        }
    }
}

#[test]
fn qft_structure() {
    let d = dag(gen_qft(1, QftMode::Inline).unwrap());
    assert_eq!(d.count_opcode("H"), 1);
    assert_eq!(d.len(), 1);
    let d = dag(gen_qft(3, QftMode::Inline).unwrap());
    assert_eq!(d.count_opcode("H"), 3);
    assert_eq!(d.count_opcode("Rz"), 9);
    assert_eq!(d.count_opcode("CNOT"), 6);
    let eps: f64 = d
        .nodes
        .iter()
        .filter(|n| n.opcode == "Rz")
        .map(|n| n.params[1])
        .sum();
    assert!(eps <= 1e-3 + 1e-15);
    let e = dag(gen_qft(2, QftMode::Extern).unwrap());
    assert_eq!(e.used_templates().len(), 1);
    assert_eq!(e.count_opcode("CRz.run"), 1);
}

#[test]
fn adder_exhaustive() {
    assert!(gen_adder(0, ToffoliStrategy::TDag).is_err());
    let one = dag(gen_adder(1, ToffoliStrategy::TDag).unwrap());
    let codes: Vec<_> = one.nodes.iter().map(|n| n.opcode.as_str()).collect();
    assert_eq!(codes, ["MAJ", "CNOT", "UMA"]);
    for n in 1..=4u32 {
        let d = dag(gen_adder(n, ToffoliStrategy::TDag).unwrap());
        for x in 0..1u64 << n {
            for y in 0..1u64 << n {
                let s = classical_simulate(&d, &inputs(&[("a", n, x), ("b", n + 1, y)])).unwrap();
                assert_eq!(s.value("b", n + 1), x + y);
                assert_eq!(s.value("a", n), x);
                assert_eq!(s.value("c", 1), 0);
            }
        }
    }
}

#[test]
fn adder_expands_to_classical_gates() {
    let d = flat(gen_adder(3, ToffoliStrategy::Extern).unwrap());
    assert!(d
        .nodes
        .iter()
        .all(|n| ["CNOT", "toffoli.apply"].contains(&n.opcode.as_str())));
}

#[test]
fn multiplier_exhaustive() {
    let one = dag(gen_multiplier(1, 1, ArithStyle::Macro, ToffoliStrategy::TDag).unwrap());
    assert_eq!(one.len(), 1);
    assert_eq!(one.nodes[0].opcode, "CCOPY1");
    let doc = gen_multiplier(3, 2, ArithStyle::Macro, ToffoliStrategy::TDag).unwrap();
    assert_eq!(
        doc.registers.iter().find(|r| r.name == "out").unwrap().size,
        6
    );
    for (a, b) in [(1, 1), (2, 3), (3, 3), (4, 2)] {
        let d = dag(gen_multiplier(a, b, ArithStyle::Macro, ToffoliStrategy::TDag).unwrap());
        for x in 0..1u64 << a {
            for y in 0..1u64 << b {
                let s = classical_simulate(&d, &inputs(&[("x", a, x), ("y", b, y)])).unwrap();
                assert_eq!(s.value("out", a + b + 1), x * y, "{x} * {y}");
                assert_eq!(s.value("t", a), 0);
                assert_eq!(s.value("c", 1), 0);
            }
        }
    }
}

#[test]
fn extern_style_declares_blocks() {
    let d = dag(gen_multiplier(2, 2, ArithStyle::Extern(vec![]), ToffoliStrategy::TDag).unwrap());
    assert_eq!(d.count_opcode("CCOPY2.run"), 2 + 1);
    assert_eq!(d.count_opcode("ADD2.run"), 1);
    assert!(classical_simulate(&d, &inputs(&[])).is_err());
}

/// Divisors whose quotient fits in `a - b + 1` bits.
fn representable(a: u32, b: u32, x: u64, y: u64) -> bool {
    x / y < 1 << (a - b + 1)
}

#[test]
fn divider_matches_integer_division() {
    let doc = gen_divider(4, 2, ArithStyle::Macro, ToffoliStrategy::TDag).unwrap();
    let size = |n: &str| doc.registers.iter().find(|r| r.name == n).unwrap().size;
    assert_eq!((size("q"), size("r")), (3, 5));
    let rounds = dag(gen_divider(1, 1, ArithStyle::Macro, ToffoliStrategy::TDag).unwrap());
    assert_eq!(rounds.count_opcode("ADD1"), 2);
    for (a, b) in [(1, 1), (3, 2), (4, 2), (4, 3)] {
        let d = dag(gen_divider(a, b, ArithStyle::Macro, ToffoliStrategy::TDag).unwrap());
        for x in 0..1u64 << a {
            for y in 1..1u64 << b {
                let s = classical_simulate(&d, &inputs(&[("r", a + 1, x), ("d", b, y)])).unwrap();
                assert_eq!(s.value("d", b), y);
                assert_eq!(s.value("t", b), 0);
                assert_eq!(s.value("c", 1), 0);
                if representable(a, b, x, y) {
                    assert_eq!(s.value("q", a - b + 1), x / y, "{x} / {y}");
                    assert_eq!(s.value("r", a + 1), x % y, "{x} % {y}");
                }
            }
        }
    }
}

#[test]
fn bucket_brigade_reads_addressed_word() {
    assert!(gen_qram_bb(1, 0, ToffoliStrategy::TDag).is_err());
    let one = dag(gen_qram_bb(1, 1, ToffoliStrategy::TDag).unwrap());
    assert_eq!(one.count_opcode("BB"), 1);
    for n in 1..=3u32 {
        let word = 2;
        let doc = gen_qram_bb(n, word, ToffoliStrategy::TDag).unwrap();
        assert_eq!(
            doc.registers
                .iter()
                .filter(|r| r.name.starts_with("mem"))
                .count(),
            1 << n
        );
        let d = dag(doc);
        for addr in 0..1u64 << n {
            let mut vals = vec![("addr", n, addr)];
            let names: Vec<String> = (0..1u32 << n).map(|m| format!("mem{m}")).collect();
            for (m, name) in names.iter().enumerate() {
                vals.push((name.as_str(), word, (m as u64 * 3 + 1) % 4));
            }
            let s = classical_simulate(&d, &inputs(&vals)).unwrap();
            assert_eq!(s.value("out", word), (addr * 3 + 1) % 4);
            for l in 0..=n {
                assert_eq!(s.value(&format!("node{l}"), 1 << l), 0);
            }
        }
    }
}

#[test]
fn cswap_is_three_toffolis() {
    let d = dag(gen_qram_bb(1, 1, ToffoliStrategy::TDag).unwrap());
    let m = &d.macros["CSWAP"];
    assert_eq!(m.body.len(), 3);
    assert!(m.body.iter().all(|g| g.op == "Toffoli"));
}

#[test]
fn fanout_swap_reads_and_restores() {
    assert!(gen_qram_fanout_swap(2, 0, ToffoliStrategy::TDag).is_err());
    for n in 1..=3u32 {
        let d = dag(gen_qram_fanout_swap(n, 1, ToffoliStrategy::TDag).unwrap());
        assert_eq!(d.count_opcode("BANKSWAP1"), 2 * ((1 << n) - 1));
        for addr in 0..1u64 << n {
            let names: Vec<String> = (0..1u32 << n).map(|m| format!("mem{m}")).collect();
            let mut vals = vec![("addr", n, addr)];
            for (m, name) in names.iter().enumerate() {
                vals.push((name.as_str(), 1, (m as u64 >> 1) & 1 ^ m as u64 & 1));
            }
            let s = classical_simulate(&d, &inputs(&vals)).unwrap();
            assert_eq!(s.value("out", 1), (addr >> 1) & 1 ^ addr & 1);
            for (m, name) in names.iter().enumerate() {
                assert_eq!(s.value(name, 1), (m as u64 >> 1) & 1 ^ m as u64 & 1);
            }
        }
    }
}

#[test]
fn factories_consume_expected_states() {
    let p = dag(gen_t_factory(1, FactoryStyle::Parallel15, None).unwrap());
    assert_eq!(consumed(&p, "T"), 15);
    assert_eq!(p.io.len(), 1);
    let s = dag(gen_t_factory(1, FactoryStyle::Slice, None).unwrap());
    assert_eq!(consumed(&s, "T"), 15);
    let z = dag(gen_t_factory(0, FactoryStyle::Parallel15, None).unwrap());
    assert_eq!(consumed(&z, "T"), 1);
    let c = dag(gen_ccz_factory(None).unwrap());
    assert_eq!(consumed(&c, "T"), 8);
    assert_eq!(c.io.len(), 3);
    assert!(matches!(
        gen_t_factory(2, FactoryStyle::Slice, None),
        Err(GenError::MissingTemplate(_))
    ));
}

#[test]
fn slice_rotations_are_sequential() {
    let d = compute(dag(gen_t_factory(1, FactoryStyle::Slice, None).unwrap()));
    let consumers: Vec<_> = d
        .nodes
        .iter()
        .enumerate()
        .filter(|(_, n)| n.opcode == "T")
        .map(|(i, _)| i)
        .collect();
    let (_, succ) = d.adjacency(false);
    let reach = |from: usize, to: usize| {
        let mut stack = vec![from];
        let mut seen = vec![false; d.len()];
        while let Some(v) = stack.pop() {
            if v == to {
                return true;
            }
            for &w in &succ[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        false
    };
    for w in consumers.windows(2) {
        assert!(reach(w[0], w[1]));
    }
}

#[test]
fn fast_ccz_reserves_four_inner_slots() {
    let inner = ExternTemplate::new(
        "CCZ1",
        5,
        5,
        vec![crate::ir::ExternOpDecl {
            name: "run".into(),
            inputs: 0,
            outputs: 3,
            cycles: 100,
        }],
    );
    let d = dag(gen_fast_ccz_factory(2, &inner).unwrap());
    assert_eq!(consumed(&d, "CCZ1"), 4);
    assert_eq!(d.min_slots.get("CCZ1"), Some(&4));
    assert_eq!(d.io.len(), 3);
    assert!(matches!(
        gen_fast_ccz_factory(2, &ExternTemplate::builtin_t()),
        Err(GenError::MissingTemplate(_))
    ));
    assert!(matches!(
        GeneratorSpec::FastCcz { level: 0 }.generate(),
        Err(GenError::Range(_))
    ));
}

fn compute(d: CircuitDag) -> CircuitDag {
    crate::ir::compute_slack(&d)
}

#[test]
fn simulator_rejects_quantum_gates() {
    let mut b = Builder::new("h");
    let q = b.reg("q", 1);
    b.gate("H", &q.bits());
    let d = dag(b.finish());
    assert_eq!(
        classical_simulate(&d, &inputs(&[])),
        Err(SimError::NonClassical("H".into()))
    );
    let empty = dag(Builder::new("e").finish());
    let given = inputs(&[("q", 2, 3)]);
    assert_eq!(classical_simulate(&empty, &given).unwrap().bits, given);
}

#[test]
fn simulator_flags_dirty_locals() {
    let doc = CircuitDocument::parse(
        r#"{"registers": [{"name": "q"}],
            "macros": [{"name": "Leak", "formals": ["x"], "body": [
                {"local": "anc"}, {"op": "CNOT", "args": ["x", "anc"]}]}],
            "gates": [{"op": "Leak", "args": ["q"]}]}"#,
    )
    .unwrap();
    let d = dag(doc);
    assert!(matches!(
        classical_simulate(&d, &inputs(&[("q", 1, 1)])),
        Err(SimError::DirtyAncilla { .. })
    ));
    assert!(classical_simulate(&d, &inputs(&[("q", 1, 0)])).is_ok());
}

#[test]
fn specs_round_trip_and_are_deterministic() {
    let specs = vec![
        GeneratorSpec::CnotNetwork {
            qubits: 4,
            rounds: 3,
            seed: 5,
        },
        GeneratorSpec::TFactory15 { level: 1 },
        GeneratorSpec::Toffoli {
            strategy: ToffoliStrategy::Ccz,
        },
        GeneratorSpec::Rz {
            count: 2,
            theta: None,
            epsilon: 1e-3,
            seed: 4,
        },
        GeneratorSpec::QramFanoutSwap {
            addr: 2,
            word: 1,
            strategy: ToffoliStrategy::TDag,
        },
    ];
    for s in specs {
        let json = serde_json::to_string(&s).unwrap();
        assert_eq!(serde_json::from_str::<GeneratorSpec>(&json).unwrap(), s);
        assert_eq!(s.generate().unwrap(), s.generate().unwrap());
    }
    let s: GeneratorSpec =
        serde_json::from_str(r#"{"family": "t-factory-15-1", "level": 1}"#).unwrap();
    assert_eq!(s, GeneratorSpec::TFactory15 { level: 1 });
}

#[test]
fn documents_reparse() {
    let doc = gen_divider(3, 2, ArithStyle::Macro, ToffoliStrategy::TDag).unwrap();
    assert_eq!(CircuitDocument::parse(&doc.to_json()).unwrap(), doc);
}
