//! ASCII and SVG pictures of boards and of per-cycle lock frames.

use std::collections::BTreeSet;
use std::fmt::Write;

use crate::geom::Coord;
use crate::qcb::{PatchType, Qcb};
use crate::router::Instruction;

const CELL: u32 = 24;
const LOCKED: char = '*';

fn fill(t: PatchType) -> &'static str {
    match t {
        PatchType::Register => "#4a7bd0",
        PatchType::Route => "#e8e8e8",
        PatchType::LocalRoute => "#f4f0dc",
        PatchType::Extern => "#d9824a",
        PatchType::Io => "#6bb36b",
        PatchType::Unallocated => "#ffffff",
    }
}

/// One cycle of a stream: the patches held by running instructions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Frame {
    pub cycle: u64,
    pub locked: BTreeSet<Coord>,
}

impl Frame {
    /// The board grid with locked patches drawn as `*`.
    pub fn to_ascii(&self, q: &Qcb) -> String {
        let mut s = String::new();
        for r in 0..q.height {
            for c in 0..q.width {
                let at = Coord::new(r, c);
                s.push(if self.locked.contains(&at) {
                    LOCKED
                } else {
                    q.get(at).glyph()
                });
            }
            s.push('\n');
        }
        s
    }
}

/// One frame per cycle in `0..total_cycles`. Zero-duration instructions show
/// in the frame of their cycle; patches off the board are ignored.
pub fn frames(q: &Qcb, instructions: &[Instruction], total_cycles: u64) -> Vec<Frame> {
    let mut out: Vec<Frame> = (0..total_cycles)
        .map(|cycle| Frame {
            cycle,
            locked: BTreeSet::new(),
        })
        .collect();
    for i in instructions {
        let end = i.end().max(i.cycle + 1).min(total_cycles);
        for t in i.cycle.min(total_cycles)..end {
            out[t as usize]
                .locked
                .extend(i.patches.iter().filter(|&&c| q.in_bounds(c)));
        }
    }
    out
}

/// SVG of the board, shading `locked` patches.
pub fn to_svg(q: &Qcb, locked: &BTreeSet<Coord>) -> String {
    let (w, h) = (q.width * CELL, q.height * CELL);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    );
    for c in q.coords() {
        let (x, y) = (c.col * CELL, c.row * CELL);
        let _ = writeln!(
            s,
            r##"<rect x="{x}" y="{y}" width="{CELL}" height="{CELL}" fill="{}" stroke="#888"/>"##,
            fill(q.get(c))
        );
        if locked.contains(&c) {
            let _ = writeln!(
                s,
                r##"<rect x="{}" y="{}" width="{}" height="{}" fill="#c03030" fill-opacity="0.6"/>"##,
                x + 3,
                y + 3,
                CELL - 6,
                CELL - 6
            );
        }
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcb::fixtures::board;
    use crate::router::InstructionKind;

    fn instr(cycle: u64, duration: u64, patches: &[(u32, u32)]) -> Instruction {
        Instruction {
            cycle,
            duration,
            kind: InstructionKind::Merge,
            patches: patches.iter().map(|&(r, c)| Coord::new(r, c)).collect(),
            node: 0,
        }
    }

    #[test]
    fn frame_per_cycle() {
        let q = board(&["RBR", "BBB"]);
        let f = frames(
            &q,
            &[instr(0, 2, &[(0, 0), (0, 1)]), instr(2, 0, &[(1, 1)])],
            3,
        );
        assert_eq!(f.len(), 3);
        assert_eq!(f[0].to_ascii(&q), "**R\nBBB\n");
        assert_eq!(f[1].locked.len(), 2);
        assert_eq!(f[2].to_ascii(&q), "RBR\nB*B\n");
    }

    #[test]
    fn empty_board_is_uniform() {
        let q = Qcb::new(3, 2);
        let f = frames(&q, &[], 1);
        assert_eq!(f[0].to_ascii(&q), "...\n...\n");
        let svg = to_svg(&q, &BTreeSet::new());
        assert_eq!(svg.matches("<rect").count(), 6);
    }

    #[test]
    fn off_board_patches_ignored() {
        let q = Qcb::new(1, 1);
        let f = frames(&q, &[instr(0, 5, &[(4, 4), (0, 0)])], 2);
        assert_eq!(f[1].locked.len(), 1);
        assert_eq!(to_svg(&q, &f[0].locked).matches("<rect").count(), 2);
    }
}
