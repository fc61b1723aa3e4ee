//! Initial and optimizing placement of registers, externs and IO.

use log::debug;

use super::{PatchType, Qcb, QcbError, Segment};
use crate::geom::{Coord, Rect};
use crate::ir::{CircuitDag, ExternTemplate};
use crate::sched::{Estimator, HeuristicConfig};

/// Outcome of a committed placement.
#[derive(Clone, Copy, Debug, Eq, PartialEq)]
pub struct Placement {
    pub segment: usize,
    pub rule: u8,
}

/// Place a register run of at most `length` patches using the first legal rule.
pub fn place_register(qcb: &mut Qcb, length: u32) -> Result<Placement, QcbError> {
    let a = qcb
        .find_register(length)
        .ok_or_else(|| QcbError::NoLegalPlacement(format!("register of length {length}")))?;
    let segment = qcb.commit(&a, PatchType::Register, None);
    Ok(Placement {
        segment,
        rule: a.rule,
    })
}

pub fn place_extern(qcb: &mut Qcb, template: &ExternTemplate) -> Result<Placement, QcbError> {
    let a = qcb
        .find_extern(template.width, template.height)
        .ok_or_else(|| {
            QcbError::NoLegalPlacement(format!(
                "extern `{}` ({}x{})",
                template.name, template.width, template.height
            ))
        })?;
    let segment = qcb.commit(&a, PatchType::Extern, Some(template.name.clone()));
    Ok(Placement {
        segment,
        rule: a.rule,
    })
}

/// Place `count` IO patches from the bottom-left corner with pending routes
/// above them and, when room allows, to their right.
pub fn place_io(qcb: &mut Qcb, count: u32) -> Result<Option<usize>, QcbError> {
    if count == 0 {
        return Ok(None);
    }
    if count > qcb.width {
        return Err(QcbError::IoTooWide {
            count,
            width: qcb.width,
        });
    }
    let bottom = qcb.height - 1;
    let body = Rect::new(bottom, 0, count, 1);
    if !body.cells().all(|c| qcb.is_free(c)) {
        return Err(QcbError::BottomRowOccupied);
    }
    let above: Vec<Coord> = (0..count).map(|c| Coord::new(bottom - 1, c)).collect();
    if !above
        .iter()
        .all(|&c| matches!(qcb.get(c), PatchType::Unallocated | PatchType::Route))
    {
        return Err(QcbError::NoLegalPlacement("IO route row".into()));
    }
    let seg = qcb.add_segment(Segment {
        bounds: body,
        kind: PatchType::Io,
        extern_binding: None,
    });
    qcb.io_count = count;
    let mut pending = above;
    if count < qcb.width {
        let side = Coord::new(bottom, count);
        let corner = Coord::new(bottom - 1, count);
        if qcb.is_free(side) && matches!(qcb.get(corner), PatchType::Unallocated | PatchType::Route)
        {
            pending.push(side);
            pending.push(corner);
        }
    }
    for c in pending {
        if qcb.is_free(c) {
            qcb.set(c, PatchType::Route);
            qcb.set_pending(c, true);
        }
    }
    qcb.absorb_pending();
    Ok(Some(seg))
}

/// Connect pending IO routes to the bus, climbing the left edge if needed.
/// Returns the number of route patches added.
pub fn join_io(qcb: &mut Qcb) -> Result<usize, QcbError> {
    if qcb.pending_cells().is_empty() {
        return Ok(0);
    }
    qcb.absorb_pending();
    if qcb.pending_cells().is_empty() {
        return Ok(0);
    }
    if !qcb.has_bus() {
        for c in qcb.pending_cells() {
            qcb.set_pending(c, false);
        }
        return Ok(0);
    }
    let mut climb = Vec::new();
    let mut joined = false;
    let mut row = qcb.height as i64 - 3;
    while row >= 0 {
        let at = Coord::new(row as u32, 0);
        if qcb.is_bus(at) {
            joined = true;
            break;
        }
        if !qcb.is_free(at) {
            break;
        }
        climb.push(at);
        if qcb.touches_bus(at) {
            joined = true;
            break;
        }
        row -= 1;
    }
    if !joined {
        return Err(QcbError::JoinImpossible);
    }
    for &c in &climb {
        qcb.set(c, PatchType::Route);
        qcb.set_pending(c, true);
    }
    qcb.absorb_pending();
    if !qcb.pending_cells().is_empty() {
        return Err(QcbError::JoinImpossible);
    }
    Ok(climb.len())
}

fn sorted_templates(dag: &CircuitDag) -> Vec<ExternTemplate> {
    let mut ext: Vec<ExternTemplate> = dag.used_templates().into_iter().cloned().collect();
    ext.sort_by(|a, b| {
        b.width
            .cmp(&a.width)
            .then(b.height.cmp(&a.height))
            .then(a.name.cmp(&b.name))
    });
    ext
}

fn alloc_err(e: QcbError, what: &str) -> QcbError {
    match e {
        QcbError::AllocationFailure(_) => e,
        other => QcbError::AllocationFailure(format!("{what}: {other}")),
    }
}

/// One extern per type, the IO segment and enough registers for every data
/// symbol, or the first element that could not be placed.
pub fn initial_placement(dag: &CircuitDag, width: u32, height: u32) -> Result<Qcb, QcbError> {
    if width < 2 || height < 2 {
        return Err(QcbError::BoardTooSmall { width, height });
    }
    let mut q = Qcb::new(width, height);
    let ext = sorted_templates(dag);
    let required = dag.data_symbols().len();
    let io = dag.io.len() as u32;
    if io > width {
        return Err(QcbError::AllocationFailure(format!(
            "IO segment: {}",
            QcbError::IoTooWide { count: io, width }
        )));
    }
    let place_ext = |q: &mut Qcb, t: &ExternTemplate| {
        place_extern(q, t).map_err(|e| alloc_err(e, &format!("extern `{}`", t.name)))
    };
    if let Some(first) = ext.first() {
        place_ext(&mut q, first)?;
    } else if required > 0 {
        place_register(&mut q, required as u32).map_err(|e| alloc_err(e, "register 1"))?;
    }
    place_io(&mut q, io).map_err(|e| alloc_err(e, "IO segment"))?;
    for t in ext.iter().skip(1) {
        place_ext(&mut q, t)?;
    }
    for t in &ext {
        for _ in 1..dag.min_slots.get(&t.name).copied().unwrap_or(1) {
            place_ext(&mut q, t)?;
        }
    }
    while q.register_capacity() < required {
        let have = q.register_capacity();
        place_register(&mut q, (required - have) as u32)
            .map_err(|e| alloc_err(e, &format!("register {} of {}", have + 1, required)))?;
    }
    join_io(&mut q).map_err(|e| alloc_err(e, "IO join"))?;
    debug!(
        "initial placement {}x{}: {} registers, {} externs",
        width,
        height,
        q.register_capacity(),
        q.extern_segments().count()
    );
    Ok(q)
}

/// Turn the middle patch of the largest register run into a bus lane that
/// extends vertically through free space, then re-place registers until the
/// board again holds `required` of them.
pub fn split_bus_lane(qcb: &mut Qcb, required: usize) -> Result<(), QcbError> {
    let Some((idx, seg)) = qcb
        .register_segments()
        .filter(|(_, s)| s.bounds.width >= 3)
        .max_by(|a, b| a.1.bounds.width.cmp(&b.1.bounds.width).then(b.0.cmp(&a.0)))
        .map(|(i, s)| (i, s.clone()))
    else {
        return Err(QcbError::NoLegalPlacement("bus lane".into()));
    };
    let b = seg.bounds;
    let mid = b.col + b.width / 2;
    let lane = Coord::new(b.row, mid);
    qcb.segments.remove(idx);
    qcb.set(lane, PatchType::Route);
    for part in [
        Rect::new(b.row, b.col, mid - b.col, 1),
        Rect::new(b.row, mid + 1, b.col + b.width - mid - 1, 1),
    ] {
        if part.width > 0 {
            qcb.segments.push(Segment {
                bounds: part,
                kind: PatchType::Register,
                extern_binding: None,
            });
        }
    }
    for step in [-1i64, 1] {
        let mut r = b.row as i64 + step;
        while r >= 0 && r < qcb.height as i64 && qcb.is_free(Coord::new(r as u32, mid)) {
            qcb.set(Coord::new(r as u32, mid), PatchType::Route);
            r += step;
        }
    }
    while qcb.register_capacity() < required {
        let need = required - qcb.register_capacity();
        place_register(qcb, need as u32)?;
    }
    Ok(())
}

/// Patches that are free or hold a register; strictly decreases with every
/// committed optimization step.
pub(crate) fn open_space(q: &Qcb) -> usize {
    q.count(PatchType::Unallocated) + q.count(PatchType::Register)
}

/// Greedily add externs or bus lanes while the estimator reports an
/// improvement, then fill leftover space with registers and mark the rest as
/// local routing.
pub fn optimize_placement(qcb: &Qcb, dag: &CircuitDag, estimator: &mut Estimator) -> Qcb {
    let mut q = qcb.clone();
    let required = dag.data_symbols().len();
    let mut types = sorted_templates(dag);
    types.sort_by(|a, b| {
        (b.width * b.height)
            .cmp(&(a.width * a.height))
            .then(a.name.cmp(&b.name))
    });
    let mut cost = |q: &Qcb| -> u64 {
        estimator
            .makespan(dag, &HeuristicConfig::from_qcb(q))
            .unwrap_or(u64::MAX)
    };
    loop {
        let base = cost(&q);
        let mut best: Option<(i128, usize, Qcb)> = None;
        let mut consider = |score: i128, priority: usize, cand: Qcb| {
            let better = match &best {
                None => true,
                Some((s, p, _)) => score > *s || (score == *s && priority < *p),
            };
            if better {
                best = Some((score, priority, cand));
            }
        };
        for (i, t) in types.iter().enumerate() {
            let mut cand = q.clone();
            if place_extern(&mut cand, t).is_ok() {
                let score = base as i128 - cost(&cand) as i128;
                consider(score, i, cand);
            }
        }
        let mut cand = q.clone();
        if split_bus_lane(&mut cand, required).is_ok() && cand.bus_is_connected() {
            let score = base as i128 - cost(&cand) as i128;
            consider(score, types.len(), cand);
        }
        match best {
            Some((score, _, cand)) if score > 0 => {
                debug!("optimization step improves estimate by {score}");
                debug_assert!(open_space(&cand) < open_space(&q));
                q = cand;
            }
            _ => break,
        }
    }
    let width = q.width;
    while place_register(&mut q, width).is_ok() {}
    for c in q.coords().collect::<Vec<_>>() {
        if q.get(c) == PatchType::Unallocated {
            q.set(c, PatchType::LocalRoute);
        }
    }
    q
}
