//! Post-allocation board cleanup and orientation tagging.

use super::{sides_of, Orientation, QubitMap};
use crate::device::BoundaryConvention;
use crate::ir::Boundary;
use crate::qcb::{PatchType, Qcb};

/// Unmapped registers become routes, leftover space becomes local routes, and
/// local-route islands touching the bus are absorbed into it.
pub fn cleanup_qcb(qcb: &Qcb, map: &QubitMap) -> Qcb {
    let mut q = qcb.clone();
    let mapped: std::collections::BTreeSet<_> = map.entries.values().map(|m| m.patch).collect();
    for c in q.coords().collect::<Vec<_>>() {
        match q.get(c) {
            PatchType::Register if !mapped.contains(&c) => q.set(c, PatchType::Route),
            PatchType::Unallocated => q.set(c, PatchType::LocalRoute),
            _ => {}
        }
    }
    loop {
        let grow: Vec<_> = q
            .coords()
            .filter(|&c| q.get(c) == PatchType::LocalRoute && q.touches_bus(c))
            .collect();
        if grow.is_empty() {
            break;
        }
        for c in grow {
            q.set(c, PatchType::Route);
        }
    }
    q.resegment_registers();
    q
}

/// Route-preferred when both an X and a Z side of the patch face the bus.
pub fn tag_orientation(qcb: &Qcb, map: &QubitMap, convention: BoundaryConvention) -> QubitMap {
    let mut out = map.clone();
    for m in out.entries.values_mut() {
        let exposed = |b: Boundary| {
            sides_of(b, convention, false).iter().any(|&s| {
                m.patch
                    .side_neighbour(s, qcb.width, qcb.height)
                    .is_some_and(|n| qcb.is_bus(n))
            })
        };
        m.orientation = if exposed(Boundary::X) && exposed(Boundary::Z) {
            Orientation::Route
        } else {
            Orientation::Rotate
        };
    }
    out
}
