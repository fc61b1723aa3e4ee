//! Shared macros: Toffoli in three strategies, controlled swap, and the
//! ripple-carry building blocks.

use serde::{Deserialize, Serialize};

use super::builder::{formals, Builder, MacroBody};
use crate::ir::{ExternOpDecl, ExternTemplate};

#[derive(Clone, Copy, Debug, Default, Eq, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ToffoliStrategy {
    /// Seven T gates with Clifford corrections.
    #[default]
    TDag,
    /// One call to a precompiled Toffoli block.
    Extern,
    /// One CCZ state plus two Hadamards.
    Ccz,
}

impl std::str::FromStr for ToffoliStrategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "t-dag" => Ok(ToffoliStrategy::TDag),
            "extern" => Ok(ToffoliStrategy::Extern),
            "ccz" => Ok(ToffoliStrategy::Ccz),
            _ => Err(format!("unknown Toffoli strategy `{s}`")),
        }
    }
}

pub const TOFFOLI: &str = "Toffoli";
pub const CSWAP: &str = "CSWAP";

/// Footprint and latency of the precompiled Toffoli block.
pub fn toffoli_template() -> ExternTemplate {
    ExternTemplate::new(
        "toffoli",
        3,
        2,
        vec![ExternOpDecl {
            name: "apply".into(),
            inputs: 3,
            outputs: 3,
            cycles: 8,
        }],
    )
}

/// The Clifford+T network for a Toffoli with target `z`.
pub const T_DAG: [(&str, &[usize]); 15] = [
    ("H", &[2]),
    ("CNOT", &[1, 2]),
    ("Tdg", &[2]),
    ("CNOT", &[0, 2]),
    ("T", &[2]),
    ("CNOT", &[1, 2]),
    ("Tdg", &[2]),
    ("CNOT", &[0, 2]),
    ("T", &[1]),
    ("T", &[2]),
    ("H", &[2]),
    ("CNOT", &[0, 1]),
    ("T", &[0]),
    ("Tdg", &[1]),
    ("CNOT", &[0, 1]),
];

/// Define the `Toffoli(x, y, z)` macro, flipping `z` when `x` and `y` are set.
pub fn define_toffoli(b: &mut Builder, strategy: ToffoliStrategy) {
    if b.has_macro(TOFFOLI) {
        return;
    }
    let f = vec!["x".to_string(), "y".to_string(), "z".to_string()];
    let mut body = MacroBody::default();
    match strategy {
        ToffoliStrategy::TDag => {
            for (op, idx) in T_DAG {
                let args: Vec<&str> = idx.iter().map(|&i| f[i].as_str()).collect();
                body.gate(op, &args);
            }
        }
        ToffoliStrategy::Ccz => {
            body.gate("H", &["z"]);
            body.gate("CCZ", &["x", "y", "z"]);
            body.gate("H", &["z"]);
        }
        ToffoliStrategy::Extern => {
            let t = toffoli_template();
            body.gate(&t.name, &["x", "y", "z"]);
            b.declare_extern(t);
        }
    }
    b.define_macro(body.build(TOFFOLI, &f));
}

/// `CSWAP(c, x, y)` as three Toffolis.
pub fn define_cswap(b: &mut Builder, strategy: ToffoliStrategy) {
    define_toffoli(b, strategy);
    let mut body = MacroBody::default();
    body.gate(TOFFOLI, &["c", "x", "y"]);
    body.gate(TOFFOLI, &["c", "y", "x"]);
    body.gate(TOFFOLI, &["c", "x", "y"]);
    b.define_macro(body.build(CSWAP, &["c".into(), "x".into(), "y".into()]));
}

/// Majority and un-majority-and-add blocks of the ripple-carry adder.
pub fn define_maj_uma(b: &mut Builder, strategy: ToffoliStrategy) {
    define_toffoli(b, strategy);
    let f = vec!["x".to_string(), "y".to_string(), "z".to_string()];
    let mut maj = MacroBody::default();
    maj.gate("CNOT", &["z", "y"]);
    maj.gate("CNOT", &["z", "x"]);
    maj.gate(TOFFOLI, &["x", "y", "z"]);
    b.define_macro(maj.build("MAJ", &f));
    let mut uma = MacroBody::default();
    uma.gate(TOFFOLI, &["x", "y", "z"]);
    uma.gate("CNOT", &["z", "x"]);
    uma.gate("CNOT", &["x", "y"]);
    b.define_macro(uma.build("UMA", &f));
}

/// Gates of an `n`-bit ripple-carry addition of `a` into `b` (n + 1 qubits)
/// through the zero carry `c`.
pub fn adder_gates(a: &[String], bb: &[String], c: &str) -> Vec<(&'static str, Vec<String>)> {
    let n = a.len();
    assert_eq!(bb.len(), n + 1);
    let mut out = Vec::new();
    let carry = |i: usize| {
        if i == 0 {
            c.to_string()
        } else {
            a[i - 1].clone()
        }
    };
    for i in 0..n {
        out.push(("MAJ", vec![carry(i), bb[i].clone(), a[i].clone()]));
    }
    out.push(("CNOT", vec![a[n - 1].clone(), bb[n].clone()]));
    for i in (0..n).rev() {
        out.push(("UMA", vec![carry(i), bb[i].clone(), a[i].clone()]));
    }
    out
}

pub fn adder_name(n: u32) -> String {
    format!("ADD{n}")
}

pub fn ccopy_name(n: u32) -> String {
    format!("CCOPY{n}")
}

/// `ADD{n}(a0.., b0..bn, c)` macro.
pub fn define_adder(b: &mut Builder, n: u32, strategy: ToffoliStrategy) {
    define_maj_uma(b, strategy);
    let a = formals("a", n);
    let bb = formals("b", n + 1);
    let mut body = MacroBody::default();
    for (op, args) in adder_gates(&a, &bb, "c") {
        body.gate(op, &args);
    }
    let mut f = a;
    f.extend(bb);
    f.push("c".into());
    b.define_macro(body.build(&adder_name(n), &f));
}

/// `CCOPY{n}(ctl, x0.., t0..)`: XOR `x` into `t` when `ctl` is set.
pub fn define_ccopy(b: &mut Builder, n: u32, strategy: ToffoliStrategy) {
    define_toffoli(b, strategy);
    let x = formals("x", n);
    let t = formals("t", n);
    let mut body = MacroBody::default();
    for i in 0..n as usize {
        body.gate(TOFFOLI, &["ctl", x[i].as_str(), t[i].as_str()]);
    }
    let mut f = vec!["ctl".to_string()];
    f.extend(x);
    f.extend(t);
    b.define_macro(body.build(&ccopy_name(n), &f));
}

/// Synthetic block with `io` inout positions, used when no compiled template
/// is supplied.
pub fn block_template(name: &str, io: u32, cycles: u64) -> ExternTemplate {
    ExternTemplate::new(
        name,
        io,
        3,
        vec![ExternOpDecl {
            name: "run".into(),
            inputs: io,
            outputs: io,
            cycles,
        }],
    )
}
