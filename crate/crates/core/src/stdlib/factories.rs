//! Magic-state distilleries: 15-to-1 T factories and the 8-T CCZ factory.

use serde::{Deserialize, Serialize};

use super::builder::{to_dag, Builder, Reg};
use super::GenError;
use crate::device::DeviceSpec;
use crate::ir::{CircuitDocument, ExternTemplate, IoDirection};
use crate::pipeline::{compile_circuit, CompileOptions};
use crate::router::package_as_extern;

#[derive(Clone, Copy, Debug, Default, Eq, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FactoryStyle {
    /// Encode, apply 15 transversal T gates at once, decode.
    #[default]
    Parallel15,
    /// Fifteen multi-qubit pi/8 rotations applied one after another.
    Slice,
}

impl std::str::FromStr for FactoryStyle {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "parallel-15" | "parallel" => Ok(FactoryStyle::Parallel15),
            "slice" => Ok(FactoryStyle::Slice),
            _ => Err(format!("unknown factory style `{s}`")),
        }
    }
}

/// Name under which a compiled level-`k` factory is packaged.
pub fn t_factory_name(level: u32) -> String {
    format!("T{level}")
}

/// Apply `T` (or `Tdg`) to the parity of `support`, accumulated on its last
/// qubit.
fn parity_rotation(b: &mut Builder, support: &[String], gate: &str) {
    let (target, rest) = support.split_last().expect("non-empty support");
    for s in rest {
        b.gate("CNOT", &[s.as_str(), target.as_str()]);
    }
    b.gate(gate, &[target.as_str()]);
    for s in rest.iter().rev() {
        b.gate("CNOT", &[s.as_str(), target.as_str()]);
    }
}

/// A level-`level` T factory whose bottom-edge output `out` carries the
/// distilled state. Level 0 passes one raw state straight through; level 1
/// consumes raw states; higher levels need `inner`, the packaged factory of
/// the level below.
pub fn gen_t_factory(
    level: u32,
    style: FactoryStyle,
    inner: Option<&ExternTemplate>,
) -> Result<CircuitDocument, GenError> {
    let mut b = Builder::new(&t_factory_name(level));
    let out = b.reg("out", 1);
    b.io(&out.bits(), IoDirection::Output);
    if level >= 2 {
        let t = inner
            .ok_or_else(|| GenError::MissingTemplate(format!("level-{} factory", level - 1)))?;
        if t.producer().is_none() {
            return Err(GenError::MissingTemplate(format!(
                "`{}` does not produce states",
                t.name
            )));
        }
        b.declare_extern(t.clone());
        b.resource("T", &t.name);
    }
    if level == 0 {
        b.gate("PrepX", &[out.at(0)]);
        b.gate("T", &[out.at(0)]);
        return Ok(b.finish());
    }
    match style {
        FactoryStyle::Parallel15 => parallel_15(&mut b, &out),
        FactoryStyle::Slice => slice_15(&mut b, &out),
    }
    Ok(b.finish())
}

fn parallel_15(b: &mut Builder, out: &Reg) {
    // q[v-1] is indexed by the non-zero vector v of F_2^4
    let q = b.reg("q", 15);
    let at = |v: u32| q.at(v - 1);
    b.gate("PrepX", &[out.at(0)]);
    for v in 1..16u32 {
        b.gate(
            if v.is_power_of_two() {
                "PrepX"
            } else {
                "PrepZ"
            },
            &[at(v)],
        );
    }
    let encode = |b: &mut Builder| {
        for g in [1u32, 2, 4, 8] {
            let mut args = vec![at(g)];
            args.extend((1..16u32).filter(|&v| v != g && v & g != 0).map(at));
            b.gate("CNOT", &args);
        }
        let mut args = vec![out.at(0)];
        args.extend((1..16u32).map(at));
        b.gate("CNOT", &args);
    };
    encode(b);
    for v in 1..16u32 {
        b.gate("T", &[at(v)]);
    }
    encode(b);
    for v in 1..16u32 {
        b.gate("MeasX", &[at(v)]);
    }
}

fn slice_15(b: &mut Builder, out: &Reg) {
    let q = b.reg("q", 4);
    b.gate("PrepX", &[out.at(0)]);
    for i in 0..4 {
        b.gate("PrepX", &[q.at(i)]);
    }
    for v in 1..16u32 {
        let mut support: Vec<String> = (0..4)
            .filter(|i| v >> i & 1 == 1)
            .map(|i| q.at(i))
            .collect();
        support.push(out.at(0));
        parity_rotation(b, &support, "T");
    }
    for i in 0..4 {
        b.gate("MeasX", &[q.at(i)]);
    }
}

/// CCZ factory: seven parity rotations build the CCZ phase on `out[0..3]`
/// and an eighth T gate feeds the check qubit.
pub fn gen_ccz_factory(t_source: Option<&ExternTemplate>) -> Result<CircuitDocument, GenError> {
    let mut b = Builder::new("CCZ1");
    let out = b.reg("out", 3);
    let chk = b.reg("chk", 1);
    b.io(&out.bits(), IoDirection::Output);
    if let Some(t) = t_source {
        b.declare_extern(t.clone());
        b.resource("T", &t.name);
    }
    for i in 0..3 {
        b.gate("PrepX", &[out.at(i)]);
    }
    b.gate("PrepX", &[chk.at(0)]);
    for v in 1..8u32 {
        let support: Vec<String> = (0..3)
            .filter(|i| v >> i & 1 == 1)
            .map(|i| out.at(i))
            .collect();
        let gate = if v.count_ones() == 2 { "Tdg" } else { "T" };
        parity_rotation(&mut b, &support, gate);
    }
    b.gate("T", &[chk.at(0)]);
    b.gate("MeasX", &[chk.at(0)]);
    Ok(b.finish())
}

/// Name under which a compiled fast CCZ factory is packaged.
pub fn fast_ccz_name(level: u32) -> String {
    format!("Fast{level}")
}

/// A CCZ factory built on four pre-allocated slots of `inner`, a packaged CCZ
/// factory one level down. One inner state lands on `out`; the other three
/// are compared against it through a transversal CNOT network and measured.
pub fn gen_fast_ccz_factory(
    level: u32,
    inner: &ExternTemplate,
) -> Result<CircuitDocument, GenError> {
    if inner.producer().is_none_or(|p| p.outputs < 3) {
        return Err(GenError::MissingTemplate(format!(
            "`{}` does not produce three-qubit states",
            inner.name
        )));
    }
    let mut b = Builder::new(&fast_ccz_name(level));
    let out = b.reg("out", 3);
    let chk = b.reg("chk", 9);
    b.io(&out.bits(), IoDirection::Output);
    b.declare_extern(inner.clone());
    b.resource("CCZ", &inner.name);
    b.slots(&inner.name, 4);
    for q in out.bits().iter().chain(&chk.bits()) {
        b.gate("PrepX", &[q]);
    }
    b.gate("CCZ", &out.bits());
    for k in 0..3 {
        b.gate(
            "CCZ",
            &[chk.at(3 * k), chk.at(3 * k + 1), chk.at(3 * k + 2)],
        );
    }
    for j in 0..3 {
        b.gate(
            "CNOT",
            &[out.at(j), chk.at(j), chk.at(3 + j), chk.at(6 + j)],
        );
    }
    for q in chk.bits() {
        b.gate("MeasX", &[q]);
    }
    Ok(b.finish())
}

/// Compile a CCZ factory on the smallest square board, from `from` up to
/// `from + 16` on a side, that holds it.
fn compile_smallest(
    doc: &CircuitDocument,
    from: u32,
    name: &str,
    opts: &CompileOptions,
) -> Result<ExternTemplate, GenError> {
    let dag = to_dag(doc)?;
    let mut last = None;
    for side in from..=from + 16 {
        match compile_circuit(&dag, &DeviceSpec::new(side, side), opts) {
            Ok(c) => return Ok(package_as_extern(&c.result, name)?),
            Err(e) => last = Some(e),
        }
    }
    Err(last.expect("at least one attempt").into())
}

/// Packaged CCZ factories up to `level`: the distillery at level 1, then fast
/// factories, each compiled on the smallest square board that holds it.
pub fn build_fast_ccz_chain(level: u32, opts: &CompileOptions) -> Result<ExternTemplate, GenError> {
    let mut t = compile_smallest(&gen_ccz_factory(None)?, 4, "CCZ1", opts)?;
    for k in 2..=level {
        let from = 2 * t.width.max(t.height);
        t = compile_smallest(&gen_fast_ccz_factory(k, &t)?, from, &fast_ccz_name(k), opts)?;
    }
    Ok(t)
}

/// Compile factories level by level on `device`, packaging each one as the
/// state source of the next, and return the packaged top level.
pub fn build_t_factory(
    level: u32,
    style: FactoryStyle,
    device: &DeviceSpec,
    opts: &CompileOptions,
) -> Result<ExternTemplate, GenError> {
    let mut inner: Option<ExternTemplate> = None;
    for k in 1..=level.max(1) {
        let doc = gen_t_factory(k, style, inner.as_ref())?;
        let dag = to_dag(&doc)?;
        let compiled = compile_circuit(&dag, device, opts)?;
        inner = Some(package_as_extern(&compiled.result, &t_factory_name(k))?);
    }
    Ok(inner.expect("at least one level"))
}
