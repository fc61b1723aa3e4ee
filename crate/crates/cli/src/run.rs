//! compile, validate and render.

use std::fmt::Write;
use std::path::Path;

use log::info;
use surgec::device::DeviceSpec;
use surgec::ir::parse_circuit;
use surgec::pipeline::{compile_circuit, CompileOptions};
use surgec::qcb::{LayoutDoc, Qcb};
use surgec::render::{frames, to_svg};
use surgec::router::{
    cost_report, package_as_extern, parse_stream, validate_stream, write_stream, InstructionStream,
};

use crate::fail::{self, fail, pipeline_code, Code, Outcome, PARSE, VALIDATION};
use crate::RouteFlags;

pub fn options(flags: &RouteFlags) -> CompileOptions<'static> {
    let mut o = CompileOptions::default();
    o.router.policy = flags.policy;
    o.router.disjoint = flags.disjoint;
    o.optimize = !flags.no_optimize;
    o
}

fn json<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializes") + "\n"
}

fn violations_failure(count: usize) -> crate::fail::Failure {
    fail(VALIDATION, anyhow::anyhow!("{count} stream violations"))
}

pub fn compile(
    circuit: &Path,
    device: &Path,
    route: &RouteFlags,
    name: Option<&str>,
    out: &Path,
) -> Outcome {
    let device =
        DeviceSpec::parse(&fail::read(device)?).code(PARSE, format!("in {}", device.display()))?;
    let source = fail::read(circuit)?;
    let dag = parse_circuit(&source).code(PARSE, format!("in {}", circuit.display()))?;
    let compiled =
        compile_circuit(&dag, &device, &options(route)).map_err(|e| fail(pipeline_code(&e), e))?;
    let result = &compiled.result;
    let stream = result.stream();

    fail::write(&out.join("stream.jsonl"), write_stream(&stream))?;
    let report = cost_report(result, device.code_distance);
    fail::write(&out.join("report.json"), json(&report))?;
    fail::write(
        &out.join("layout.json"),
        LayoutDoc::from_qcb(&compiled.qcb).to_json() + "\n",
    )?;
    fail::write(&out.join("layout.txt"), compiled.qcb.to_ascii())?;
    fail::write(
        &out.join("layout.svg"),
        to_svg(&compiled.qcb, &Default::default()),
    )?;
    fail::write(&out.join("map.json"), compiled.map.to_json() + "\n")?;
    if result.io_signature.is_some() {
        let doc_name = surgec::ir::CircuitDocument::parse(&source)
            .ok()
            .and_then(|d| d.name);
        let name = name
            .map(str::to_string)
            .or(doc_name)
            .unwrap_or_else(|| "circuit".into());
        let template =
            package_as_extern(result, &name).map_err(|e| fail(crate::fail::ROUTING, e))?;
        fail::write(&out.join("template.json"), template.to_json() + "\n")?;
    }
    info!("artifacts written to {}", out.display());

    let violations = validate_stream(&stream, &compiled.qcb);
    if !violations.is_empty() {
        fail::write(&out.join("violations.json"), json(&violations))?;
        return Err(violations_failure(violations.len()));
    }
    println!(
        "{} cycles, volume {}, {} instructions on {}x{}",
        report.total_cycles,
        report.spacetime_volume,
        report.instruction_count,
        report.width,
        report.height
    );
    Ok(())
}

fn load_stream(path: &Path) -> Outcome<InstructionStream> {
    parse_stream(&fail::read(path)?).code(PARSE, format!("in {}", path.display()))
}

fn load_layout(path: &Path) -> Outcome<Qcb> {
    LayoutDoc::parse(&fail::read(path)?)
        .and_then(|l| l.to_qcb())
        .code(PARSE, format!("in {}", path.display()))
}

pub fn validate(stream: &Path, layout: &Path) -> Outcome {
    let violations = validate_stream(&load_stream(stream)?, &load_layout(layout)?);
    print!("{}", json(&violations));
    if violations.is_empty() {
        Ok(())
    } else {
        Err(violations_failure(violations.len()))
    }
}

pub fn render(layout: Option<&Path>, stream: Option<&Path>, out: &Path) -> Outcome {
    let stream = stream.map(load_stream).transpose()?;
    let q = match (layout, &stream) {
        (Some(p), _) => load_layout(p)?,
        (None, Some(s)) => Qcb::new(s.header.width, s.header.height),
        (None, None) => return Err(fail(PARSE, anyhow::anyhow!("nothing to render"))),
    };
    fail::write(&out.join("layout.txt"), q.to_ascii())?;
    fail::write(&out.join("layout.svg"), to_svg(&q, &Default::default()))?;
    let Some(s) = stream else {
        return Ok(());
    };
    if (s.header.width, s.header.height) != (q.width, q.height) {
        return Err(fail(
            PARSE,
            anyhow::anyhow!(
                "stream is for a {}x{} board but the layout is {}x{}",
                s.header.width,
                s.header.height,
                q.width,
                q.height
            ),
        ));
    }
    let fs = frames(&q, &s.instructions, s.header.total_cycles);
    let mut text = String::new();
    for f in &fs {
        let _ = writeln!(text, "cycle {}\n{}", f.cycle, f.to_ascii(&q));
        fail::write(
            &out.join(format!("frames/cycle_{:05}.svg", f.cycle)),
            to_svg(&q, &f.locked),
        )?;
    }
    fail::write(&out.join("frames.txt"), text)?;
    println!("{} frames", fs.len());
    Ok(())
}
