//! Generator specs from the command line.

use std::path::Path;

use serde_json::{Map, Value};
use surgec::device::DeviceSpec;
use surgec::stdlib::{GenError, GeneratorSpec};

use crate::fail::{self, fail, gen_code, Code, Outcome, PARSE};
use crate::{GenFlags, RouteFlags};

/// Values that parse as JSON keep their type; anything else is a string.
pub fn spec(flags: &GenFlags) -> Outcome<GeneratorSpec> {
    let mut obj = Map::new();
    obj.insert("family".into(), Value::String(flags.family.clone()));
    for p in &flags.params {
        let (k, v) = p
            .split_once('=')
            .ok_or_else(|| fail(PARSE, anyhow::anyhow!("parameter `{p}` is not key=value")))?;
        let v = serde_json::from_str(v).unwrap_or_else(|_| Value::String(v.to_string()));
        obj.insert(k.trim().to_string(), v);
    }
    if let Some(seed) = flags.seed {
        obj.insert("seed".into(), seed.into());
    }
    serde_json::from_value(Value::Object(obj))
        .code(PARSE, format!("bad generator `{}`", flags.family))
}

pub fn device(path: Option<&Path>) -> Outcome<Option<DeviceSpec>> {
    path.map(|p| DeviceSpec::parse(&fail::read(p)?).code(PARSE, format!("in {}", p.display())))
        .transpose()
}

pub fn gen(
    flags: &GenFlags,
    device_path: Option<&Path>,
    route: &RouteFlags,
    out: Option<&Path>,
) -> Outcome {
    let spec = spec(flags)?;
    let device = device(device_path)?;
    let doc = match &device {
        Some(d) => spec.generate_on(d, &crate::run::options(route)),
        None => spec.generate(),
    }
    .map_err(|e| {
        let hint = matches!(e, GenError::MissingTemplate(_)) && device.is_none();
        let f = fail(gen_code(&e), e);
        if hint {
            fail(
                f.code,
                f.error.context("lower factory levels need --device"),
            )
        } else {
            f
        }
    })?;
    let json = doc.to_json() + "\n";
    match out {
        Some(p) => fail::write(p, json),
        None => {
            print!("{json}");
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flags(family: &str, params: &[&str], seed: Option<u64>) -> GenFlags {
        GenFlags {
            family: family.into(),
            params: params.iter().map(|s| s.to_string()).collect(),
            seed,
        }
    }

    #[test]
    fn params_keep_json_types() {
        let s = spec(&flags(
            "toffoli-network",
            &["registers=6", "gates=4", "strategy=ccz"],
            Some(9),
        ))
        .unwrap();
        assert_eq!(
            s,
            GeneratorSpec::ToffoliNetwork {
                registers: 6,
                gates: 4,
                strategy: surgec::stdlib::ToffoliStrategy::Ccz,
                seed: 9
            }
        );
    }

    #[test]
    fn rejects_malformed_params() {
        assert_eq!(spec(&flags("adder", &["n"], None)).unwrap_err().code, PARSE);
        assert_eq!(
            spec(&flags("adder", &["n=2", "m=1"], None))
                .unwrap_err()
                .code,
            PARSE
        );
        assert_eq!(spec(&flags("nope", &[], None)).unwrap_err().code, PARSE);
    }
}
