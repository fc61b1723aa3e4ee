//! Stream validation against the board it was compiled for.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::{InstructionKind, InstructionStream};
use crate::geom::Coord;
use crate::ir::NodeId;
use crate::qcb::{PatchType, Qcb};

#[derive(Clone, Debug, Eq, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum StreamViolation {
    DimensionMismatch {
        width: u32,
        height: u32,
    },
    OutOfBounds {
        instruction: usize,
        patch: Coord,
    },
    UnknownNode {
        instruction: usize,
        node: NodeId,
    },
    BadArity {
        instruction: usize,
    },
    RepeatedPatch {
        instruction: usize,
        patch: Coord,
    },
    OffRoute {
        instruction: usize,
        patch: Coord,
    },
    Disconnected {
        instruction: usize,
    },
    LockOverlap {
        patch: Coord,
        first: usize,
        second: usize,
    },
    DependencyViolation {
        from: NodeId,
        to: NodeId,
    },
}

fn connected(cells: &BTreeSet<Coord>) -> bool {
    let Some(&start) = cells.iter().next() else {
        return true;
    };
    let mut seen = BTreeSet::from([start]);
    let mut stack = vec![start];
    while let Some(c) = stack.pop() {
        for n in cells.iter().filter(|n| n.is_adjacent(c)) {
            if seen.insert(*n) {
                stack.push(*n);
            }
        }
    }
    seen.len() == cells.len()
}

fn extern_io_row(q: &Qcb, c: Coord) -> bool {
    q.extern_segments()
        .any(|(_, s)| s.bounds.contains(c) && c.row == s.bounds.bottom_row())
}

/// Lock disjointness, dependency order and route legality.
pub fn validate_stream(stream: &InstructionStream, q: &Qcb) -> Vec<StreamViolation> {
    use InstructionKind::*;
    let h = &stream.header;
    if h.width != q.width || h.height != q.height {
        return vec![StreamViolation::DimensionMismatch {
            width: h.width,
            height: h.height,
        }];
    }
    let mut out = Vec::new();
    let ins = &stream.instructions;
    let mut sound = vec![true; ins.len()];
    for (k, i) in ins.iter().enumerate() {
        if i.node >= h.node_count {
            out.push(StreamViolation::UnknownNode {
                instruction: k,
                node: i.node,
            });
        }
        let mut seen = BTreeSet::new();
        for &p in &i.patches {
            if !q.in_bounds(p) {
                out.push(StreamViolation::OutOfBounds {
                    instruction: k,
                    patch: p,
                });
                sound[k] = false;
            } else if !seen.insert(p) {
                out.push(StreamViolation::RepeatedPatch {
                    instruction: k,
                    patch: p,
                });
            }
        }
        let n = i.patches.len();
        let arity_ok = match i.kind {
            Prep | Measure | Pauli => n == 1,
            Rotate => n == 2,
            Merge | Split => n >= 2,
            IdleLock | ExternInvoke | ExternReset => n >= 1,
        };
        if !arity_ok {
            out.push(StreamViolation::BadArity { instruction: k });
            sound[k] = false;
        }
    }

    // Bell-pair segments established for a merge count as part of its route.
    let mut bell: BTreeMap<(NodeId, u64), Vec<Coord>> = BTreeMap::new();
    for (k, i) in ins.iter().enumerate() {
        if i.kind == IdleLock && sound[k] {
            bell.entry((i.node, i.end()))
                .or_default()
                .extend(&i.patches);
        }
    }
    for (k, i) in ins.iter().enumerate() {
        if !sound[k] {
            continue;
        }
        let off = |p: Coord| StreamViolation::OffRoute {
            instruction: k,
            patch: p,
        };
        let terminal = |p: Coord| matches!(q.get(p), PatchType::Register | PatchType::Io);
        match i.kind {
            Prep | Measure | Pauli => {
                out.extend(i.patches.iter().copied().filter(|&p| !terminal(p)).map(off));
            }
            Rotate => {
                let (a, b) = (i.patches[0], i.patches[1]);
                if !terminal(a) {
                    out.push(off(a));
                }
                if q.get(b) != PatchType::Route {
                    out.push(off(b));
                }
                if !a.is_adjacent(b) {
                    out.push(StreamViolation::Disconnected { instruction: k });
                }
            }
            ExternInvoke | ExternReset => {
                out.extend(
                    i.patches
                        .iter()
                        .copied()
                        .filter(|&p| q.get(p) != PatchType::Extern)
                        .map(off),
                );
            }
            IdleLock => {
                out.extend(
                    i.patches
                        .iter()
                        .copied()
                        .filter(|&p| q.get(p) != PatchType::Route)
                        .map(off),
                );
                if !connected(&i.patches.iter().copied().collect()) {
                    out.push(StreamViolation::Disconnected { instruction: k });
                }
            }
            Merge | Split => {
                let mut route: BTreeSet<Coord> = BTreeSet::new();
                let mut terminals = Vec::new();
                for &p in &i.patches {
                    match q.get(p) {
                        PatchType::Route => {
                            route.insert(p);
                        }
                        PatchType::Register | PatchType::Io => terminals.push(p),
                        PatchType::Extern if extern_io_row(q, p) => terminals.push(p),
                        _ => out.push(off(p)),
                    }
                }
                if let Some(extra) = bell.get(&(i.node, i.cycle)) {
                    route.extend(extra);
                }
                let linked = if route.is_empty() {
                    terminals.len() == 2 && terminals[0].is_adjacent(terminals[1])
                } else {
                    connected(&route)
                        && terminals
                            .iter()
                            .all(|t| route.iter().any(|r| r.is_adjacent(*t)))
                };
                if !linked {
                    out.push(StreamViolation::Disconnected { instruction: k });
                }
            }
        }
    }

    let mut per_patch: BTreeMap<Coord, Vec<(u64, u64, usize)>> = BTreeMap::new();
    for (k, i) in ins.iter().enumerate() {
        if i.duration == 0 {
            continue;
        }
        for &p in i.patches.iter().collect::<BTreeSet<_>>() {
            per_patch.entry(p).or_default().push((i.cycle, i.end(), k));
        }
    }
    for (p, mut list) in per_patch {
        list.sort_unstable();
        let mut reach: Option<(u64, usize)> = None;
        for (s, e, k) in list {
            if let Some((re, rk)) = reach {
                if s < re {
                    out.push(StreamViolation::LockOverlap {
                        patch: p,
                        first: rk.min(k),
                        second: rk.max(k),
                    });
                }
                if e > re {
                    reach = Some((e, k));
                }
            } else {
                reach = Some((e, k));
            }
        }
    }

    let mut span: BTreeMap<NodeId, (u64, u64)> = BTreeMap::new();
    for i in ins.iter().filter(|i| i.in_span()) {
        let e = span.entry(i.node).or_insert((i.cycle, i.end()));
        e.0 = e.0.min(i.cycle);
        e.1 = e.1.max(i.end());
    }
    for &(a, b) in &h.edges {
        if let (Some(&(_, ea)), Some(&(sb, _))) = (span.get(&a), span.get(&b)) {
            if ea > sb {
                out.push(StreamViolation::DependencyViolation { from: a, to: b });
            }
        }
    }
    out
}
