//! Ripple-carry adder, shift-and-add multiplier and restoring divider.

use super::builder::Builder;
use super::primitives::{
    adder_gates, adder_name, block_template, ccopy_name, define_adder, define_ccopy,
    define_maj_uma, ToffoliStrategy,
};
use super::GenError;
use crate::ir::{CircuitDocument, ExternTemplate};

/// How composite steps of the multiplier and divider are emitted.
#[derive(Clone, Debug, Default)]
pub enum ArithStyle {
    /// Inline macros, expandable down to native gates.
    #[default]
    Macro,
    /// Opaque extern blocks. Supplied templates are matched by name
    /// (`ADD{n}`, `CCOPY{n}`); missing ones get a synthetic footprint.
    Extern(Vec<ExternTemplate>),
}

#[derive(Clone, Debug)]
struct Steps {
    style: ArithStyle,
    strategy: ToffoliStrategy,
}

impl Steps {
    fn add(&self, b: &mut Builder, n: u32) -> String {
        let name = adder_name(n);
        match &self.style {
            ArithStyle::Macro => define_adder(b, n, self.strategy),
            ArithStyle::Extern(given) => b.declare_extern(
                given
                    .iter()
                    .find(|t| t.name == name)
                    .cloned()
                    .unwrap_or_else(|| block_template(&name, 2 * n + 2, 20 * n as u64)),
            ),
        }
        name
    }

    fn ccopy(&self, b: &mut Builder, n: u32) -> String {
        let name = ccopy_name(n);
        match &self.style {
            ArithStyle::Macro => define_ccopy(b, n, self.strategy),
            ArithStyle::Extern(given) => b.declare_extern(
                given
                    .iter()
                    .find(|t| t.name == name)
                    .cloned()
                    .unwrap_or_else(|| block_template(&name, 2 * n + 1, 10)),
            ),
        }
        name
    }
}

fn concat(parts: &[&[String]]) -> Vec<String> {
    parts.iter().flat_map(|p| p.iter().cloned()).collect()
}

/// `n`-bit adder: `b[0..=n] += a[0..n]` using the zero ancilla `c`.
pub fn gen_adder(n: u32, strategy: ToffoliStrategy) -> Result<CircuitDocument, GenError> {
    if n == 0 {
        return Err(GenError::Range("adder needs n >= 1".into()));
    }
    let mut b = Builder::new(&format!("adder{n}"));
    let a = b.reg("a", n);
    let bb = b.reg("b", n + 1);
    let c = b.reg("c", 1);
    define_maj_uma(&mut b, strategy);
    for (op, args) in adder_gates(&a.bits(), &bb.bits(), &c.at(0)) {
        b.gate(op, &args);
    }
    Ok(b.finish())
}

/// `out[0..a+b+1] = x[0..a] * y[0..b]` by shift-and-add.
pub fn gen_multiplier(
    a_bits: u32,
    b_bits: u32,
    style: ArithStyle,
    strategy: ToffoliStrategy,
) -> Result<CircuitDocument, GenError> {
    if a_bits == 0 || b_bits == 0 {
        return Err(GenError::Range("multiplier operands need >= 1 bit".into()));
    }
    let steps = Steps { style, strategy };
    let mut b = Builder::new(&format!("mul{a_bits}x{b_bits}"));
    let x = b.reg("x", a_bits);
    let y = b.reg("y", b_bits);
    let out = b.reg("out", a_bits + b_bits + 1);
    let (t, c) = if b_bits > 1 {
        (b.reg("t", a_bits), b.reg("c", 1))
    } else {
        (b.reg("t", 0), b.reg("c", 0))
    };

    let ccopy = steps.ccopy(&mut b, a_bits);
    b.gate(
        &ccopy,
        &concat(&[&[y.at(0)], &x.bits(), &out.slice(0, a_bits)]),
    );
    for i in 1..b_bits {
        let fill = concat(&[&[y.at(i)], &x.bits(), &t.bits()]);
        b.gate(&ccopy, &fill);
        let add = steps.add(&mut b, a_bits);
        b.gate(
            &add,
            &concat(&[&t.bits(), &out.slice(i, i + a_bits + 1), &[c.at(0)]]),
        );
        b.gate(&ccopy, &fill);
    }
    Ok(b.finish())
}

/// Restoring division of `r[0..a]` by `d[0..b]`. The quotient lands in
/// `q[0..a-b+1]` and the remainder stays in `r[0..=a]`.
pub fn gen_divider(
    a_bits: u32,
    b_bits: u32,
    style: ArithStyle,
    strategy: ToffoliStrategy,
) -> Result<CircuitDocument, GenError> {
    if b_bits == 0 || a_bits < b_bits {
        return Err(GenError::Range("divider needs a >= b >= 1".into()));
    }
    let steps = Steps { style, strategy };
    let mut b = Builder::new(&format!("div{a_bits}by{b_bits}"));
    let r = b.reg("r", a_bits + 1);
    let q = b.reg("q", a_bits - b_bits + 1);
    let d = b.reg("d", b_bits);
    let pad = b.reg("pad", a_bits - b_bits);
    let t = b.reg("t", b_bits);
    let c = b.reg("c", 1);
    let ccopy = steps.ccopy(&mut b, b_bits);

    for i in (0..=a_bits - b_bits).rev() {
        let window = r.slice(i, a_bits + 1);
        let n = a_bits - i;
        let add = steps.add(&mut b, n);
        let extra = pad.slice(0, n - b_bits);
        // window -= d, as ~(~window + d)
        for w in &window {
            b.gate("X", &[w]);
        }
        b.gate(&add, &concat(&[&d.bits(), &extra, &window, &[c.at(0)]]));
        for w in &window {
            b.gate("X", &[w]);
        }
        // the top bit is the borrow
        b.gate("CNOT", &[r.at(a_bits), q.at(i)]);
        b.gate("X", &[q.at(i)]);
        // add d back when the subtraction went negative
        let fill = concat(&[&[q.at(i)], &d.bits(), &t.bits()]);
        b.gate("X", &[q.at(i)]);
        b.gate(&ccopy, &fill);
        b.gate("X", &[q.at(i)]);
        b.gate(&add, &concat(&[&t.bits(), &extra, &window, &[c.at(0)]]));
        b.gate("X", &[q.at(i)]);
        b.gate(&ccopy, &fill);
        b.gate("X", &[q.at(i)]);
    }
    Ok(b.finish())
}
