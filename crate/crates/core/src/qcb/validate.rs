use std::fmt;

use serde::{Deserialize, Serialize};

use super::{PatchType, Qcb};
use crate::geom::Coord;
use crate::ir::CircuitDag;

#[derive(Clone, Debug, Eq, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Violation {
    Unallocated { at: Coord },
    BusDisconnected { components: usize },
    RegisterNotBusAdjacent { at: Coord },
    ExternBusGap { segment: usize, at: Coord },
    IoNotOnBottomRow { at: Coord },
    IoNotBusAdjacent { at: Coord },
    IoNotJoined { at: Coord },
    SegmentOutOfBounds { segment: usize },
    SegmentOverlap { first: usize, second: usize },
    SegmentTypeMismatch { at: Coord },
    InsufficientRegisters { have: usize, need: usize },
    IoCountMismatch { have: usize, need: usize },
    MissingExtern { name: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let text = serde_json::to_string(self).map_err(|_| fmt::Error)?;
        f.write_str(&text)
    }
}

/// Structural checks that need only the board.
pub fn validate_board(q: &Qcb) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut owner: Vec<Option<usize>> = vec![None; (q.width * q.height) as usize];
    for (i, seg) in q.segments.iter().enumerate() {
        if !seg.bounds.fits_in(q.width, q.height) {
            out.push(Violation::SegmentOutOfBounds { segment: i });
            continue;
        }
        for c in seg.bounds.cells() {
            let slot = &mut owner[(c.row * q.width + c.col) as usize];
            match *slot {
                Some(j) => out.push(Violation::SegmentOverlap {
                    first: j,
                    second: i,
                }),
                None => *slot = Some(i),
            }
            if q.get(c) != seg.kind {
                out.push(Violation::SegmentTypeMismatch { at: c });
            }
        }
    }
    for c in q.coords() {
        let t = q.get(c);
        let owned = owner[(c.row * q.width + c.col) as usize].is_some();
        match t {
            PatchType::Unallocated => out.push(Violation::Unallocated { at: c }),
            PatchType::Register | PatchType::Extern | PatchType::Io if !owned => {
                out.push(Violation::SegmentTypeMismatch { at: c })
            }
            PatchType::Route if q.is_pending(c) => out.push(Violation::IoNotJoined { at: c }),
            _ => {}
        }
        if t == PatchType::Register {
            let vertical = [
                c.row.checked_sub(1).map(|r| Coord::new(r, c.col)),
                Some(Coord::new(c.row + 1, c.col)),
            ];
            if !vertical.into_iter().flatten().any(|n| q.is_bus(n)) {
                out.push(Violation::RegisterNotBusAdjacent { at: c });
            }
        }
    }
    let comps = q.components(|c| q.is_bus(c)).len();
    if comps > 1 {
        out.push(Violation::BusDisconnected { components: comps });
    }
    for (i, seg) in q.extern_segments() {
        let below = seg.bounds.row + seg.bounds.height;
        for col in seg.bounds.col..seg.bounds.col + seg.bounds.width {
            let at = Coord::new(below, col);
            if !q.is_bus(at) {
                out.push(Violation::ExternBusGap { segment: i, at });
            }
        }
    }
    for seg in q.segments.iter().filter(|s| s.kind == PatchType::Io) {
        for c in seg.bounds.cells() {
            if c.row + 1 != q.height {
                out.push(Violation::IoNotOnBottomRow { at: c });
            } else if c.row == 0 || !q.is_bus(Coord::new(c.row - 1, c.col)) {
                out.push(Violation::IoNotBusAdjacent { at: c });
            }
        }
    }
    out
}

/// Full check of a board against a circuit: structure plus capacity, IO
/// arity and one slot per extern type.
pub fn validate_qcb(q: &Qcb, dag: &CircuitDag) -> Vec<Violation> {
    let mut out = validate_board(q);
    let need = dag.data_symbols().len();
    let have = q.register_capacity();
    if have < need {
        out.push(Violation::InsufficientRegisters { have, need });
    }
    let io = q.io_cells().len();
    if io != dag.io.len() || q.io_count as usize != dag.io.len() {
        out.push(Violation::IoCountMismatch {
            have: io,
            need: dag.io.len(),
        });
    }
    let slots = q.extern_slots();
    for t in dag.used_templates() {
        if !slots.contains_key(&t.name) {
            out.push(Violation::MissingExtern {
                name: t.name.clone(),
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::board;
    use super::*;
    use crate::ir::parse_circuit;

    #[test]
    fn clean_board() {
        let q = board(&["RRRL", "BBBB", "BBBR", "IIBL"]);
        assert_eq!(validate_board(&q), vec![]);
    }

    #[test]
    fn orphan_register() {
        let q = board(&["RRRL", "BBBB", "LLLL", "RLLL"]);
        assert!(
            validate_board(&q).contains(&Violation::RegisterNotBusAdjacent {
                at: Coord::new(3, 0)
            })
        );
    }

    #[test]
    fn half_covered_extern() {
        let q = board(&["EEEE", "EEEE", "BBLL", "RRLL"]);
        let v = validate_board(&q);
        assert!(v
            .iter()
            .any(|x| matches!(x, Violation::ExternBusGap { .. })));
        assert_eq!(
            v.iter()
                .filter(|x| matches!(x, Violation::ExternBusGap { .. }))
                .count(),
            2
        );
    }

    #[test]
    fn capacity_and_io() {
        let dag = parse_circuit(
            r#"{"registers": [{"name": "q", "size": 5}], "io": ["q[0]"], "gates": []}"#,
        )
        .unwrap();
        let q = board(&["RRRL", "BBBB"]);
        let v = validate_qcb(&q, &dag);
        assert!(v.contains(&Violation::InsufficientRegisters { have: 3, need: 4 }));
        assert!(v.contains(&Violation::IoCountMismatch { have: 0, need: 1 }));
    }

    #[test]
    fn disconnected_bus_and_unallocated() {
        let q = board(&["RR.R", "BBLB"]);
        let v = validate_board(&q);
        assert!(v.contains(&Violation::BusDisconnected { components: 2 }));
        assert!(v.contains(&Violation::Unallocated {
            at: Coord::new(0, 2)
        }));
    }
}
