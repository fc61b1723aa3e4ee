use std::path::Path;
use std::process::{Command, Output};

use surgec::device::DeviceSpec;
use surgec::pipeline::CompileOptions;
use surgec::router::{parse_stream, write_stream};
use surgec::stdlib::*;
use tempfile::TempDir;

fn surgec(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_surgec"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn setup(side: u32) -> TempDir {
    let dir = TempDir::new().unwrap();
    std::fs::write(
        dir.path().join("device.json"),
        DeviceSpec::new(side, side).to_json(),
    )
    .unwrap();
    dir
}

fn compile_adder(dir: &Path, n: u32) -> Output {
    let o = surgec(
        &[
            "gen",
            "adder",
            "-p",
            &format!("n={n}"),
            "--out",
            "adder.json",
        ],
        dir,
    );
    assert_eq!(code(&o), 0);
    surgec(
        &[
            "compile",
            "--circuit",
            "adder.json",
            "--device",
            "device.json",
            "--out",
            "out",
        ],
        dir,
    )
}

#[test]
fn compile_writes_artifacts_that_validate() {
    let dir = setup(12);
    let o = compile_adder(dir.path(), 4);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    for f in [
        "stream.jsonl",
        "report.json",
        "layout.json",
        "layout.txt",
        "layout.svg",
        "map.json",
    ] {
        assert!(dir.path().join("out").join(f).exists(), "{f}");
    }
    let v = surgec(
        &[
            "validate",
            "--stream",
            "out/stream.jsonl",
            "--layout",
            "out/layout.json",
        ],
        dir.path(),
    );
    assert_eq!(code(&v), 0);
    assert_eq!(String::from_utf8_lossy(&v.stdout).trim(), "[]");
}

#[test]
fn compile_is_byte_deterministic() {
    let dir = setup(12);
    let read = |d: &Path| std::fs::read(d.join("out/stream.jsonl")).unwrap();
    assert_eq!(code(&compile_adder(dir.path(), 3)), 0);
    let first = read(dir.path());
    assert_eq!(code(&compile_adder(dir.path(), 3)), 0);
    assert_eq!(read(dir.path()), first);
}

#[test]
fn io_circuits_are_packaged() {
    let dir = setup(12);
    let o = surgec(
        &["gen", "t-factory-15-1", "-p", "level=1", "--out", "t1.json"],
        dir.path(),
    );
    assert_eq!(code(&o), 0);
    let o = surgec(
        &[
            "compile",
            "--circuit",
            "t1.json",
            "--device",
            "device.json",
            "--name",
            "T1",
            "--out",
            "out",
        ],
        dir.path(),
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let t = surgec::ir::ExternTemplate::parse(
        &std::fs::read_to_string(dir.path().join("out/template.json")).unwrap(),
    )
    .unwrap();
    assert_eq!((t.name.as_str(), t.width, t.height), ("T1", 12, 12));
}

#[test]
fn oversized_adder_is_an_allocation_failure() {
    let dir = setup(10);
    let factory = build_t_factory(
        1,
        FactoryStyle::Parallel15,
        &DeviceSpec::new(8, 7),
        &CompileOptions::default(),
    )
    .unwrap();
    let mut doc = gen_adder(14, ToffoliStrategy::TDag).unwrap();
    doc.externs.push(factory.clone());
    doc.resources.insert("T".into(), factory.name.clone());
    std::fs::write(dir.path().join("adder.json"), doc.to_json()).unwrap();
    let o = surgec(
        &[
            "compile",
            "--circuit",
            "adder.json",
            "--device",
            "device.json",
        ],
        dir.path(),
    );
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("allocation failure"));
}

#[test]
fn malformed_inputs_are_parse_failures() {
    let dir = setup(8);
    std::fs::write(dir.path().join("bad.json"), "{\"registers\": [").unwrap();
    let o = surgec(
        &[
            "compile",
            "--circuit",
            "bad.json",
            "--device",
            "device.json",
        ],
        dir.path(),
    );
    assert_eq!(code(&o), 2);
    std::fs::write(
        dir.path().join("c.json"),
        gen_adder(1, ToffoliStrategy::TDag).unwrap().to_json(),
    )
    .unwrap();
    let o = surgec(
        &["compile", "--circuit", "c.json", "--device", "bad.json"],
        dir.path(),
    );
    assert_eq!(code(&o), 2);
    let o = surgec(
        &[
            "compile",
            "--circuit",
            "c.json",
            "--device",
            "device.json",
            "--policy",
            "lifo",
        ],
        dir.path(),
    );
    assert_eq!(code(&o), 2);
    let o = surgec(&["gen", "adder", "-p", "n=2", "--seed", "3"], dir.path());
    assert_eq!(code(&o), 2);
}

fn rewrite_stream(dir: &Path, edit: impl FnOnce(&mut surgec::router::InstructionStream)) {
    let p = dir.join("out/stream.jsonl");
    let mut s = parse_stream(&std::fs::read_to_string(&p).unwrap()).unwrap();
    edit(&mut s);
    std::fs::write(&p, write_stream(&s)).unwrap();
}

fn validate_output(dir: &Path) -> (i32, String) {
    let v = surgec(
        &[
            "validate",
            "--stream",
            "out/stream.jsonl",
            "--layout",
            "out/layout.json",
        ],
        dir,
    );
    (code(&v), String::from_utf8_lossy(&v.stdout).into_owned())
}

#[test]
fn validate_flags_overlapping_locks() {
    let dir = setup(12);
    assert_eq!(code(&compile_adder(dir.path(), 2)), 0);
    rewrite_stream(dir.path(), |s| {
        let i = s
            .instructions
            .iter()
            .find(|i| i.duration > 0)
            .unwrap()
            .clone();
        s.instructions.push(i);
    });
    let (c, out) = validate_output(dir.path());
    assert_eq!(c, 5);
    assert!(out.contains("lock-overlap"));
}

#[test]
fn validate_flags_reordered_dependencies() {
    let dir = setup(12);
    assert_eq!(code(&compile_adder(dir.path(), 2)), 0);
    rewrite_stream(dir.path(), |s| {
        let &(_, b) = s.header.edges.last().unwrap();
        let shift = s
            .instructions
            .iter()
            .filter(|i| i.node == b)
            .map(|i| i.cycle)
            .min()
            .unwrap();
        let end = s.header.total_cycles;
        for i in s.instructions.iter_mut().filter(|i| i.node == b) {
            i.cycle -= shift;
        }
        for i in s.instructions.iter_mut().filter(|i| i.node != b) {
            i.cycle += end;
        }
        s.header.total_cycles *= 2;
    });
    let (c, out) = validate_output(dir.path());
    assert_eq!(c, 5);
    assert!(out.contains("dependency-violation"));
}

#[test]
fn render_draws_one_frame_per_cycle() {
    let dir = setup(4);
    let mut b = Builder::new("one");
    let q = b.reg("q", 1);
    b.gate("PrepZ", &[q.at(0)]);
    b.gate("MeasZ", &[q.at(0)]);
    std::fs::write(dir.path().join("c.json"), b.finish().to_json()).unwrap();
    let o = surgec(
        &[
            "compile",
            "--circuit",
            "c.json",
            "--device",
            "device.json",
            "--out",
            "out",
        ],
        dir.path(),
    );
    assert_eq!(code(&o), 0);
    let total =
        parse_stream(&std::fs::read_to_string(dir.path().join("out/stream.jsonl")).unwrap())
            .unwrap()
            .header
            .total_cycles;
    let o = surgec(
        &[
            "render",
            "--layout",
            "out/layout.json",
            "--stream",
            "out/stream.jsonl",
            "--out",
            "r",
        ],
        dir.path(),
    );
    assert_eq!(code(&o), 0);
    let frames = std::fs::read_dir(dir.path().join("r/frames"))
        .unwrap()
        .count() as u64;
    assert_eq!(frames, total);
    let text = std::fs::read_to_string(dir.path().join("r/frames.txt")).unwrap();
    assert_eq!(text.matches("cycle ").count() as u64, total);
}

#[test]
fn render_empty_board_is_uniform() {
    let dir = setup(4);
    let layout = r#"{"width": 3, "height": 2, "grid": ["...", "..."]}"#;
    std::fs::write(dir.path().join("l.json"), layout).unwrap();
    let o = surgec(&["render", "--layout", "l.json", "--out", "r"], dir.path());
    assert_eq!(code(&o), 0);
    assert_eq!(
        std::fs::read_to_string(dir.path().join("r/layout.txt")).unwrap(),
        "...\n...\n"
    );
}

fn bench_csv(dir: &Path, args: &[&str]) -> Vec<Vec<String>> {
    let o = surgec(&[&["bench"], args, &["--out", "b"]].concat(), dir);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let mut r = csv::Reader::from_path(dir.join("b/bench.csv")).unwrap();
    assert_eq!(&r.headers().unwrap()[2], "cycles");
    r.records()
        .map(|r| r.unwrap().iter().map(str::to_string).collect())
        .collect()
}

#[test]
fn bench_cnot_sweep_over_heights() {
    let dir = setup(8);
    let rows = bench_csv(
        dir.path(),
        &[
            "cnot-network",
            "-p",
            "qubits=8",
            "-p",
            "rounds=20",
            "--seed",
            "1",
            "--widths",
            "8",
            "--heights",
            "4,8,16",
        ],
    );
    let cycles: Vec<u64> = rows.iter().map(|r| r[2].parse().unwrap()).collect();
    assert_eq!(cycles.len(), 3);
    assert!(cycles.windows(2).all(|w| w[1] <= w[0]), "{cycles:?}");
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("b/bench.json")).unwrap())
            .unwrap();
    assert_eq!(json["rows"].as_array().unwrap().len(), 3);
}

#[test]
fn bench_empty_sweep_is_empty_table() {
    let dir = setup(8);
    assert!(bench_csv(
        dir.path(),
        &["adder", "-p", "n=2", "--widths", "8", "--heights"]
    )
    .is_empty());
}

#[test]
fn bench_factory_reports_extern_counts_and_keeps_failed_rows() {
    let dir = setup(8);
    let rows = bench_csv(
        dir.path(),
        &[
            "t-factory-15-1",
            "-p",
            "level=1",
            "--widths",
            "3,12",
            "--heights",
            "12",
        ],
    );
    assert_eq!(rows.len(), 2);
    assert!(!rows[0][7].is_empty());
    assert_eq!(rows[1][5], "15");
}
