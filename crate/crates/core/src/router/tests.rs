use super::*;
use crate::device::{BoundaryConvention, DeviceSpec, GateCosts};
use crate::ir::{parse_circuit, CircuitDag, Op, RegisterSymbol};
use crate::mapper::{tag_orientation, QubitMap};
use crate::pipeline::{compile_circuit, CompileOptions};
use crate::qcb::fixtures::board;
use crate::qcb::Qcb;

fn sym(i: u32) -> RegisterSymbol {
    RegisterSymbol::new("q", i)
}

fn dag(n: u32, ops: &[(&str, &[u32])]) -> CircuitDag {
    let mut d = CircuitDag::empty(GateCosts::default());
    d.symbols = (0..n).map(sym).collect();
    d.rebuild(
        ops.iter()
            .map(|(o, a)| Op::new(o, a.iter().map(|&i| sym(i)).collect()))
            .collect(),
    )
    .unwrap()
}

fn mapped(q: &Qcb, cells: &[(u32, u32)]) -> QubitMap {
    let mut m = QubitMap::default();
    for (i, &(r, c)) in cells.iter().enumerate() {
        m.insert(sym(i as u32), Coord::new(r, c));
    }
    tag_orientation(q, &m, BoundaryConvention::ZVertical)
}

fn run(q: &Qcb, cells: &[(u32, u32)], ops: &[(&str, &[u32])]) -> CompilationResult {
    let d = dag(cells.len() as u32, ops);
    let r = compile(&d, q, &mapped(q, cells), &RouterOptions::default()).unwrap();
    let v = validate_stream(&r.stream(), q);
    assert!(v.is_empty(), "{v:?}");
    r
}

#[test]
fn empty_dag() {
    let q = board(&["RR", "BB"]);
    let r = run(&q, &[], &[]);
    assert_eq!(r.total_cycles, 0);
    assert!(r.instructions.is_empty());
    assert_eq!(r.spacetime_volume, 0);
}

#[test]
fn single_cnot_costs_two() {
    let q = board(&["RBR", "BBB"]);
    let r = run(&q, &[(0, 0), (0, 2)], &[("CNOT", &[0, 1])]);
    assert_eq!(r.total_cycles, 2);
    assert_eq!(r.rotations_injected, 0);
    let merge = &r.instructions[0];
    assert_eq!(merge.kind, InstructionKind::Merge);
    // Two registers held for 2 cycles, plus the route patches of the merge.
    let route = (merge.patches.len() - 2) as u64;
    assert_eq!(r.spacetime_volume, 2 * 2 + route * 2);
}

#[test]
fn hidden_x_edge_injects_rotation() {
    let q = board(&["RR", "BB"]);
    let r = run(&q, &[(0, 0), (0, 1)], &[("CNOT", &[0, 1])]);
    assert_eq!(r.rotations_injected, 1);
    assert_eq!(r.total_cycles, 3 + 2);
    let rot: Vec<_> = r
        .instructions
        .iter()
        .filter(|i| i.kind == InstructionKind::Rotate)
        .collect();
    assert_eq!(rot.len(), 1);
    assert_eq!(rot[0].duration, 3);
    assert_eq!(rot[0].patches[0], Coord::new(0, 1));
    // Once rotated, the target keeps its X edge on the bus.
    let r2 = run(
        &q,
        &[(0, 0), (0, 1)],
        &[("CNOT", &[0, 1]), ("CNOT", &[0, 1])],
    );
    assert_eq!(r2.rotations_injected, 1);
}

#[test]
fn z_op_on_exposed_edge_needs_nothing() {
    let q = board(&["R", "B"]);
    let r = run(&q, &[(0, 0)], &[("S", &[0])]);
    assert_eq!(r.rotations_injected, 0);
    assert_eq!(r.total_cycles, 2);
}

#[test]
fn contention_delays_second_op() {
    let q = board(&["RBRRBR", "BBBBBB"]);
    let alone = run(&q, &[(0, 0), (0, 2), (0, 3), (0, 5)], &[("CNOT", &[0, 1])]);
    let both = run(
        &q,
        &[(0, 0), (0, 2), (0, 3), (0, 5)],
        &[("CNOT", &[0, 1]), ("CNOT", &[2, 3])],
    );
    assert_eq!(alone.total_cycles, 2);
    assert!(both.total_cycles >= alone.total_cycles);
}

#[test]
fn route_preferred_waits_instead_of_rotating() {
    // q1 sits in a bus corner: both edge types exposed.
    let q = board(&["RBR", "BBB"]);
    let m = mapped(&q, &[(0, 0), (0, 2)]);
    assert_eq!(m.orientation(&sym(1)), crate::mapper::Orientation::Route);
}

#[test]
fn t_gate_compiles_through_factory() {
    let d =
        parse_circuit(r#"{"registers":[{"name":"q"}],"gates":[{"op":"T","args":["q"]}]}"#).unwrap();
    let c = compile_circuit(&d, &DeviceSpec::new(8, 8), &CompileOptions::default()).unwrap();
    let r = &c.result;
    assert!(r.total_cycles >= 11 + 2);
    assert_eq!(r.count(InstructionKind::ExternInvoke), 1);
    assert_eq!(r.count(InstructionKind::ExternReset), 1);
    assert!(r.volume.externs > 0);
    assert!(validate_stream(&r.stream(), &c.qcb).is_empty());
}

#[test]
fn three_ts_one_slot_all_policies() {
    let d = parse_circuit(
        r#"{"registers":[{"name":"q","size":2}],"gates":[
            {"op":"T","args":["q[0]"]},{"op":"T","args":["q[1]"]},{"op":"T","args":["q[0]"]}]}"#,
    )
    .unwrap();
    let dev = DeviceSpec::new(6, 6);
    let mut streams = Vec::new();
    for policy in [
        BindingPolicy::Heuristic,
        BindingPolicy::Fifo,
        BindingPolicy::Shared,
    ] {
        let mut opts = CompileOptions::default();
        opts.router.policy = policy;
        opts.optimize = false;
        let c = compile_circuit(&d, &dev, &opts).unwrap();
        assert!(validate_stream(&c.result.stream(), &c.qcb).is_empty());
        assert_eq!(c.result.count(InstructionKind::ExternInvoke), 3);
        streams.push(write_stream(&c.result.stream()));
    }
    assert_eq!(streams[1], streams[2]);
}

#[test]
fn packaging_requires_io() {
    let q = board(&["RR", "BB"]);
    let r = run(&q, &[(0, 0)], &[("H", &[0])]);
    assert_eq!(package_as_extern(&r, "x"), Err(RouterError::NoIo));
}

#[test]
fn report_scales_by_distance() {
    let q = board(&["RBR", "BBB"]);
    let r = run(&q, &[(0, 0), (0, 2)], &[("CNOT", &[0, 1])]);
    let rep = cost_report(&r, 7);
    assert_eq!(rep.physical_qubits, 6 * 49);
    assert_eq!(rep.syndrome_rounds, 14);
    assert_eq!(rep.instruction_count, r.instructions.len());
}

#[test]
fn validator_catches_overlap_and_order() {
    let q = board(&["RBR", "BBB"]);
    let r = run(
        &q,
        &[(0, 0), (0, 2)],
        &[("CNOT", &[0, 1]), ("CNOT", &[0, 1])],
    );
    let mut s = r.stream();
    s.instructions[1].cycle = 0;
    let v = validate_stream(&s, &q);
    assert!(v
        .iter()
        .any(|x| matches!(x, StreamViolation::LockOverlap { .. })));
    assert!(v
        .iter()
        .any(|x| matches!(x, StreamViolation::DependencyViolation { .. })));
}

#[test]
fn validator_catches_off_route() {
    let q = board(&["RBRL", "BBBL"]);
    let r = run(&q, &[(0, 0), (0, 2)], &[("CNOT", &[0, 1])]);
    let mut s = r.stream();
    s.instructions[0].patches.push(Coord::new(1, 3));
    let v = validate_stream(&s, &q);
    assert!(v
        .iter()
        .any(|x| matches!(x, StreamViolation::OffRoute { .. })));
}

#[test]
fn disjoint_segments_cost_double_establishment() {
    // A long corridor: the second CNOT reuses an ancilla chain idle since cycle 0.
    let q = board(&["RRBBBBBRR", "LBBBBBBBL"]);
    let d2 = dag(2, &[("H", &[0]), ("H", &[0]), ("CNOT", &[0, 1])]);
    let opts = RouterOptions {
        disjoint: true,
        ..Default::default()
    };
    let r = compile(&d2, &q, &mapped(&q, &[(0, 1), (0, 7)]), &opts).unwrap();
    assert!(validate_stream(&r.stream(), &q).is_empty());
    let idle: Vec<_> = r
        .instructions
        .iter()
        .filter(|i| i.kind == InstructionKind::IdleLock)
        .collect();
    assert!(!idle.is_empty());
    for i in idle {
        assert_eq!(i.duration, 2 * GateCosts::default().cost("PrepX"));
        assert!(i.patches.len() >= 3);
    }
}
