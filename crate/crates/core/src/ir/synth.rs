//! Rz rotation synthesis into Clifford+T.

use std::f64::consts::PI;
use std::process::Command;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{CircuitDag, IrError, Op};

pub const DEFAULT_RZ_EPSILON: f64 = 1.0 / 1024.0;

/// Source of approximate Clifford+T sequences for arbitrary angles.
pub trait RzSynthesizer: Send + Sync {
    fn synthesize(&self, theta: f64, epsilon: f64) -> Result<Vec<String>, String>;
}

/// Deterministic stand-in with the gate-count profile of a number-theoretic
/// synthesizer: `ceil(3 log2(1/epsilon))` gates keyed by the angle and
/// precision. The sequence is not the rotation it replaces.
#[derive(Clone, Copy, Debug, Default)]
pub struct StubSynthesizer;

impl RzSynthesizer for StubSynthesizer {
    fn synthesize(&self, theta: f64, epsilon: f64) -> Result<Vec<String>, String> {
        let len = (3.0 * (1.0 / epsilon).log2()).ceil().max(1.0) as usize;
        let seed = theta.to_bits() ^ epsilon.to_bits().rotate_left(29);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Ok((0..len)
            .map(|i| {
                if i % 2 == 0 {
                    if rng.gen_bool(0.5) {
                        "T"
                    } else {
                        "Tdg"
                    }
                } else if rng.gen_bool(0.75) {
                    "H"
                } else {
                    "S"
                }
                .to_string()
            })
            .collect())
    }
}

/// Runs an external program (for example `gridsynth`) with the angle and
/// precision as arguments and reads a gate string such as `HTSHT` from stdout.
#[derive(Clone, Debug)]
pub struct CommandSynthesizer {
    pub program: String,
    pub args: Vec<String>,
}

impl RzSynthesizer for CommandSynthesizer {
    fn synthesize(&self, theta: f64, epsilon: f64) -> Result<Vec<String>, String> {
        let out = Command::new(&self.program)
            .args(&self.args)
            .arg(format!("{theta:.17}"))
            .arg("-e")
            .arg(format!("{epsilon:e}"))
            .output()
            .map_err(|e| format!("{}: {e}", self.program))?;
        if !out.status.success() {
            return Err(format!("{} exited with {}", self.program, out.status));
        }
        let text = String::from_utf8_lossy(&out.stdout);
        text.trim()
            .chars()
            .filter(|c| !c.is_whitespace())
            .filter_map(|c| match c {
                'H' => Some(Ok("H")),
                'S' => Some(Ok("S")),
                'T' => Some(Ok("T")),
                'X' => Some(Ok("X")),
                'Z' => Some(Ok("Z")),
                'W' | 'I' => None,
                other => Some(Err(format!("unexpected gate `{other}`"))),
            })
            .map(|r| r.map(str::to_string))
            .collect()
    }
}

/// Clifford+T sequence for `Rz(theta)`. Multiples of pi/4 are exact; angles
/// within `epsilon` of the identity give the empty sequence.
pub fn synthesize_rz(
    theta: f64,
    epsilon: f64,
    synth: &dyn RzSynthesizer,
) -> Result<Vec<String>, IrError> {
    if epsilon <= 0.0 || !epsilon.is_finite() || !theta.is_finite() {
        return Err(IrError::InvalidParameter(format!(
            "Rz({theta}) with epsilon {epsilon}"
        )));
    }
    let turn = theta.rem_euclid(2.0 * PI);
    let k = turn / (PI / 4.0);
    if (k - k.round()).abs() < 1e-9 {
        let seq: &[&str] = match (k.round() as i64).rem_euclid(8) {
            0 => &[],
            1 => &["T"],
            2 => &["S"],
            3 => &["S", "T"],
            4 => &["Z"],
            5 => &["Z", "T"],
            6 => &["Sdg"],
            _ => &["Tdg"],
        };
        return Ok(seq.iter().map(|s| s.to_string()).collect());
    }
    if turn.min(2.0 * PI - turn) <= epsilon {
        return Ok(Vec::new());
    }
    synth.synthesize(theta, epsilon).map_err(IrError::Synthesis)
}

/// Replace every `Rz` node by its synthesized sequence. The second parameter,
/// when present, is the node's precision; otherwise `default_epsilon`.
pub fn synthesize_rotations(
    dag: &CircuitDag,
    synth: &dyn RzSynthesizer,
    default_epsilon: f64,
) -> Result<CircuitDag, IrError> {
    if dag.nodes.iter().all(|n| n.opcode != "Rz") {
        return Ok(dag.clone());
    }
    let mut ops = Vec::new();
    for op in dag.ops() {
        if super::opcodes::canonical(&op.opcode) != "Rz" {
            ops.push(op);
            continue;
        }
        let theta = op.params[0];
        let eps = op.params.get(1).copied().unwrap_or(default_epsilon);
        for g in synthesize_rz(theta, eps, synth)? {
            ops.push(Op::new(&g, op.args.clone()));
        }
    }
    dag.rebuild(ops)
}
