//! Generator sweeps over board sizes.

use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;
use surgec::device::DeviceSpec;
use surgec::pipeline::compile_circuit;
use surgec::router::cost_report;
use surgec::stdlib::{to_dag, GeneratorSpec};

use crate::fail::{self, Code, Outcome};
use crate::{GenFlags, RouteFlags};

/// One sweep point. Failed compilations keep their size and carry the error.
#[derive(Clone, Debug, Serialize)]
pub struct Row {
    pub width: u32,
    pub height: u32,
    pub cycles: Option<u64>,
    pub volume: Option<u64>,
    pub instructions: Option<usize>,
    pub extern_allocations: Option<usize>,
    pub physical_qubits: Option<u64>,
    pub error: Option<String>,
}

#[derive(Serialize)]
struct Table<'a> {
    format_version: u32,
    spec: &'a GeneratorSpec,
    rows: &'a [Row],
}

fn row(spec: &GeneratorSpec, device: &DeviceSpec, route: &RouteFlags) -> Row {
    let opts = crate::run::options(route);
    let outcome = spec
        .generate_on(device, &opts)
        .map_err(|e| e.to_string())
        .and_then(|doc| to_dag(&doc).map_err(|e| e.to_string()))
        .and_then(|dag| compile_circuit(&dag, device, &opts).map_err(|e| e.to_string()));
    let mut r = Row {
        width: device.width,
        height: device.height,
        cycles: None,
        volume: None,
        instructions: None,
        extern_allocations: None,
        physical_qubits: None,
        error: None,
    };
    match outcome {
        Ok(c) => {
            let rep = cost_report(&c.result, device.code_distance);
            r.cycles = Some(rep.total_cycles);
            r.volume = Some(rep.spacetime_volume);
            r.instructions = Some(rep.instruction_count);
            r.extern_allocations = Some(rep.extern_allocations);
            r.physical_qubits = Some(rep.physical_qubits);
        }
        Err(e) => r.error = Some(e),
    }
    r
}

pub fn bench(
    gen: &GenFlags,
    device: Option<&Path>,
    widths: &[u32],
    heights: &[u32],
    route: &RouteFlags,
    out: &Path,
) -> Outcome {
    let spec = crate::gen::spec(gen)?;
    let base = crate::gen::device(device)?.unwrap_or_else(|| DeviceSpec::new(2, 2));
    let points: Vec<DeviceSpec> = widths
        .iter()
        .flat_map(|&w| heights.iter().map(move |&h| (w, h)))
        .map(|(width, height)| DeviceSpec {
            width,
            height,
            ..base.clone()
        })
        .collect();
    let rows: Vec<Row> = points.par_iter().map(|d| row(&spec, d, route)).collect();

    let mut csv = csv::Writer::from_writer(Vec::new());
    if rows.is_empty() {
        csv.write_record([
            "width",
            "height",
            "cycles",
            "volume",
            "instructions",
            "extern_allocations",
            "physical_qubits",
            "error",
        ])
        .code(1, "csv")?;
    }
    for r in &rows {
        csv.serialize(r).code(1, "csv")?;
    }
    fail::write(&out.join("bench.csv"), csv.into_inner().code(1, "csv")?)?;
    let table = Table {
        format_version: surgec::FORMAT_VERSION,
        spec: &spec,
        rows: &rows,
    };
    fail::write(
        &out.join("bench.json"),
        serde_json::to_string_pretty(&table).expect("serializes") + "\n",
    )?;
    let failed = rows.iter().filter(|r| r.error.is_some()).count();
    println!("{} rows, {failed} failed", rows.len());
    Ok(())
}
