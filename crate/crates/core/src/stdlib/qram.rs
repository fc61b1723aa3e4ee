//! Bucket-brigade and fanout-swap QRAM queries.

use super::builder::{formals, Builder, MacroBody, Reg};
use super::primitives::{define_cswap, ToffoliStrategy, CSWAP, TOFFOLI};
use super::GenError;
use crate::ir::CircuitDocument;

pub const BB_GADGET: &str = "BB";
pub const BB_GADGET_DG: &str = "BBdg";

fn check(addr_bits: u32, word_bits: u32) -> Result<(), GenError> {
    if addr_bits == 0 || addr_bits > 10 {
        return Err(GenError::Range("QRAM address width must be 1..=10".into()));
    }
    if word_bits == 0 {
        return Err(GenError::Range("QRAM word width must be >= 1".into()));
    }
    Ok(())
}

fn memory(b: &mut Builder, addr_bits: u32, word_bits: u32) -> Vec<Reg> {
    (0..1u32 << addr_bits)
        .map(|m| b.reg(&format!("mem{m}"), word_bits))
        .collect()
}

/// Bucket-brigade query: a flag is routed down a binary tree, selects one
/// leaf, copies the word at that leaf into `out`, and the tree is uncomputed.
pub fn gen_qram_bb(
    addr_bits: u32,
    word_bits: u32,
    strategy: ToffoliStrategy,
) -> Result<CircuitDocument, GenError> {
    check(addr_bits, word_bits)?;
    let mut b = Builder::new(&format!("qram-bb{addr_bits}x{word_bits}"));
    let addr = b.reg("addr", addr_bits);
    let mem = memory(&mut b, addr_bits, word_bits);
    let out = b.reg("out", word_bits);
    let levels: Vec<Reg> = (0..=addr_bits)
        .map(|l| b.reg(&format!("node{l}"), 1 << l))
        .collect();

    define_cswap(&mut b, strategy);
    let f: Vec<String> = ["a", "p", "l", "r"].iter().map(|s| s.to_string()).collect();
    let mut fwd = MacroBody::default();
    fwd.gate("CNOT", &["p", "l"]);
    fwd.gate(CSWAP, &["a", "l", "r"]);
    b.define_macro(fwd.build(BB_GADGET, &f));
    let mut back = MacroBody::default();
    back.gate(CSWAP, &["a", "l", "r"]);
    back.gate("CNOT", &["p", "l"]);
    b.define_macro(back.build(BB_GADGET_DG, &f));

    let gadget = |l: u32, k: u32| {
        let half = 1u32 << l;
        vec![
            addr.at(l),
            levels[l as usize].at(k),
            levels[l as usize + 1].at(k),
            levels[l as usize + 1].at(k + half),
        ]
    };

    b.gate("X", &[levels[0].at(0)]);
    for l in 0..addr_bits {
        for k in 0..1u32 << l {
            b.gate(BB_GADGET, &gadget(l, k));
        }
    }
    let leaves = &levels[addr_bits as usize];
    for (m, word) in mem.iter().enumerate() {
        for j in 0..word_bits {
            b.gate(TOFFOLI, &[leaves.at(m as u32), word.at(j), out.at(j)]);
        }
    }
    for l in (0..addr_bits).rev() {
        for k in (0..1u32 << l).rev() {
            b.gate(BB_GADGET_DG, &gadget(l, k));
        }
    }
    b.gate("X", &[levels[0].at(0)]);
    Ok(b.finish())
}

pub fn bankswap_name(word_bits: u32) -> String {
    format!("BANKSWAP{word_bits}")
}

/// Fanout-and-swap query: address bits are fanned out, memory banks are
/// swapped in place until the addressed word sits in bank 0, the word is
/// copied out and every step is undone. Uses `2 * addr_bits` gadget layers.
pub fn gen_qram_fanout_swap(
    addr_bits: u32,
    word_bits: u32,
    strategy: ToffoliStrategy,
) -> Result<CircuitDocument, GenError> {
    check(addr_bits, word_bits)?;
    let mut b = Builder::new(&format!("qram-fs{addr_bits}x{word_bits}"));
    let addr = b.reg("addr", addr_bits);
    let mem = memory(&mut b, addr_bits, word_bits);
    let out = b.reg("out", word_bits);
    let copies: Vec<Reg> = (0..addr_bits)
        .map(|l| b.reg(&format!("fan{l}"), (1 << l) - 1))
        .collect();

    define_cswap(&mut b, strategy);
    let name = bankswap_name(word_bits);
    let x = formals("x", word_bits);
    let y = formals("y", word_bits);
    let mut body = MacroBody::default();
    for j in 0..word_bits as usize {
        body.gate(CSWAP, &["c", x[j].as_str(), y[j].as_str()]);
    }
    let mut f = vec!["c".to_string()];
    f.extend(x);
    f.extend(y);
    b.define_macro(body.build(&name, &f));

    let fanout = |b: &mut Builder| {
        for l in 0..addr_bits {
            if copies[l as usize].size > 0 {
                let mut args = vec![addr.at(l)];
                args.extend(copies[l as usize].bits());
                b.gate("CNOT", &args);
            }
        }
    };
    let control = |l: u32, m: u32| {
        if m == 0 {
            addr.at(l)
        } else {
            copies[l as usize].at(m - 1)
        }
    };
    let layer = |b: &mut Builder, l: u32| {
        for m in 0..1u32 << l {
            let mut args = vec![control(l, m)];
            args.extend(mem[m as usize].bits());
            args.extend(mem[(m + (1 << l)) as usize].bits());
            b.gate(&name, &args);
        }
    };

    fanout(&mut b);
    for l in (0..addr_bits).rev() {
        layer(&mut b, l);
    }
    for j in 0..word_bits {
        b.gate("CNOT", &[mem[0].at(j), out.at(j)]);
    }
    for l in 0..addr_bits {
        layer(&mut b, l);
    }
    fanout(&mut b);
    Ok(b.finish())
}
