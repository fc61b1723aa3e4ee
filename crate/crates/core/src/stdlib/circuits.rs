//! Small benchmark families: CNOT networks, Toffolis, MCX, QFT and Rz.

use std::f64::consts::PI;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::builder::Builder;
use super::primitives::{define_toffoli, ToffoliStrategy, TOFFOLI};
use super::GenError;
use crate::ir::{CircuitDocument, ExternOpDecl, ExternTemplate};

/// `rounds` layers of `n / 2` CNOTs, each layer pairing a fresh random
/// permutation of the `n` qubits.
pub fn gen_cnot_network(n: u32, rounds: u32, seed: u64) -> Result<CircuitDocument, GenError> {
    if n < 2 || n % 2 == 1 {
        return Err(GenError::Range("CNOT network needs an even n >= 2".into()));
    }
    if rounds == 0 {
        return Err(GenError::Range("CNOT network needs rounds >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = Builder::new(&format!("cnot{n}x{rounds}"));
    let q = b.reg("q", n);
    let mut order: Vec<u32> = (0..n).collect();
    for _ in 0..rounds {
        order.shuffle(&mut rng);
        for pair in order.chunks(2) {
            b.gate("CNOT", &[q.at(pair[0]), q.at(pair[1])]);
        }
    }
    Ok(b.finish())
}

/// One Toffoli on `q[0], q[1] -> q[2]`.
pub fn gen_toffoli(strategy: ToffoliStrategy) -> Result<CircuitDocument, GenError> {
    let mut b = Builder::new("toffoli");
    let q = b.reg("q", 3);
    define_toffoli(&mut b, strategy);
    b.gate(TOFFOLI, &q.bits());
    Ok(b.finish())
}

/// `gates` Toffolis on random distinct triples of `registers` qubits.
pub fn gen_toffoli_network(
    registers: u32,
    gates: u32,
    strategy: ToffoliStrategy,
    seed: u64,
) -> Result<CircuitDocument, GenError> {
    if registers < 3 {
        return Err(GenError::Range(
            "Toffoli network needs >= 3 registers".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = Builder::new(&format!("toffoli-net{registers}x{gates}"));
    let q = b.reg("q", registers);
    define_toffoli(&mut b, strategy);
    let all: Vec<u32> = (0..registers).collect();
    for _ in 0..gates {
        let pick: Vec<String> = all.choose_multiple(&mut rng, 3).map(|&i| q.at(i)).collect();
        b.gate(TOFFOLI, &pick);
    }
    Ok(b.finish())
}

struct Mcx {
    gates: Vec<Vec<String>>,
    ancillae: u32,
}

impl Mcx {
    fn fresh(&mut self) -> String {
        self.ancillae += 1;
        format!("anc[{}]", self.ancillae - 1)
    }

    /// Reduce a control group to one qubit: itself if alone, else a fresh
    /// ancilla holding the AND of the group.
    fn reduce(&mut self, group: &[String]) -> String {
        if group.len() == 1 {
            return group[0].clone();
        }
        let anc = self.fresh();
        self.emit(group, &anc);
        anc
    }

    fn emit(&mut self, controls: &[String], target: &str) {
        match controls.len() {
            1 => self
                .gates
                .push(vec![controls[0].clone(), target.to_string()]),
            2 => self.gates.push(vec![
                controls[0].clone(),
                controls[1].clone(),
                target.to_string(),
            ]),
            n => {
                let a = n.div_ceil(2);
                let start = self.gates.len();
                let x = self.reduce(&controls[..a]);
                let y = self.reduce(&controls[a..]);
                let compute: Vec<Vec<String>> = self.gates[start..].to_vec();
                self.gates.push(vec![x, y, target.to_string()]);
                self.gates.extend(compute.into_iter().rev());
            }
        }
    }
}

/// Multi-controlled X on `c[0..n] -> t` by balanced recursion with
/// uncomputed AND ancillae.
pub fn gen_mcx(n_controls: u32, strategy: ToffoliStrategy) -> Result<CircuitDocument, GenError> {
    if n_controls == 0 {
        return Err(GenError::Range("MCX needs >= 1 control".into()));
    }
    let mut b = Builder::new(&format!("mcx{n_controls}"));
    let c = b.reg("c", n_controls);
    let t = b.reg("t", 1);
    let mut m = Mcx {
        gates: Vec::new(),
        ancillae: 0,
    };
    m.emit(&c.bits(), &t.at(0));
    b.reg("anc", m.ancillae);
    if m.gates.iter().any(|g| g.len() == 3) {
        define_toffoli(&mut b, strategy);
    }
    for g in m.gates {
        b.gate(if g.len() == 2 { "CNOT" } else { TOFFOLI }, &g);
    }
    Ok(b.finish())
}

#[derive(Clone, Copy, Debug, Default, Eq, PartialEq)]
pub enum QftMode {
    /// Each controlled rotation spelled out as three Rz and two CNOTs.
    #[default]
    Inline,
    /// Every controlled rotation is a call to one shared `CRz` block.
    Extern,
}

/// Total synthesis precision budget of a QFT.
pub const QFT_EPSILON_BUDGET: f64 = 1e-3;

/// Uniform footprint used for all controlled rotations in extern mode.
pub fn crz_template(epsilon: f64) -> ExternTemplate {
    let per_rz = (3.0 * (1.0 / epsilon).log2()).ceil() as u64;
    ExternTemplate::new(
        "CRz",
        2,
        3,
        vec![ExternOpDecl {
            name: "run".into(),
            inputs: 2,
            outputs: 2,
            cycles: 3 * per_rz + 4,
        }],
    )
}

/// Quantum Fourier transform on `q[0..n]` without the final swaps.
pub fn gen_qft(n: u32, mode: QftMode) -> Result<CircuitDocument, GenError> {
    if n == 0 {
        return Err(GenError::Range("QFT needs n >= 1".into()));
    }
    let pairs = n * (n - 1) / 2;
    let eps = QFT_EPSILON_BUDGET / (3.0 * pairs.max(1) as f64);
    let mut b = Builder::new(&format!("qft{n}"));
    let q = b.reg("q", n);
    if mode == QftMode::Extern && pairs > 0 {
        b.declare_extern(crz_template(eps));
    }
    for j in 0..n {
        b.gate("H", &[q.at(j)]);
        for k in j + 1..n {
            let theta = PI / f64::from(1u32 << (k - j).min(30));
            let (c, t) = (q.at(k), q.at(j));
            match mode {
                QftMode::Extern => b.gate("CRz", &[&c, &t]),
                QftMode::Inline => {
                    b.gate_with("Rz", &[&t], vec![theta / 2.0, eps]);
                    b.gate("CNOT", &[&c, &t]);
                    b.gate_with("Rz", &[&t], vec![-theta / 2.0, eps]);
                    b.gate("CNOT", &[&c, &t]);
                    b.gate_with("Rz", &[&c], vec![theta / 2.0, eps]);
                }
            }
        }
    }
    Ok(b.finish())
}

/// `count` independent rotations by `theta` (random angles when `None`),
/// one per qubit.
pub fn gen_rz(
    count: u32,
    theta: Option<f64>,
    epsilon: f64,
    seed: u64,
) -> Result<CircuitDocument, GenError> {
    if count == 0 {
        return Err(GenError::Range("Rz needs count >= 1".into()));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(GenError::Range("Rz precision must lie in (0, 1)".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = Builder::new(&format!("rz{count}"));
    let q = b.reg("q", count);
    for i in 0..count {
        let angle = theta.unwrap_or_else(|| rng.gen_range(0.01..2.0 * PI - 0.01));
        b.gate_with("Rz", &[q.at(i)], vec![angle, epsilon]);
    }
    Ok(b.finish())
}
