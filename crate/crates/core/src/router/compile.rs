//! The event-driven routing loop.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap, VecDeque};

use super::disjoint::apply_disjoint_paths;
use super::{
    find_path, BindingPolicy, BoardState, CompilationResult, Instruction, InstructionKind,
    PathStyle, RoutePath, RouterError, RouterOptions, SlotUse, VolumeBreakdown,
};
use crate::device::BoundaryConvention;
use crate::geom::Coord;
use crate::ir::opcodes::Locality;
use crate::ir::{
    attach_extern_barriers, Boundary, CircuitDag, ExternRole, IoDirection, IrError, NodeId,
    NodeKind,
};
use crate::mapper::{sides_of, QubitMap};
use crate::qcb::{PatchType, Qcb};
use crate::sched::{estimate_cycles, HeuristicConfig};

/// Bus patches touching the sides of `patch` that carry `boundary`.
pub fn edge_cells(
    q: &Qcb,
    patch: Coord,
    boundary: Boundary,
    convention: BoundaryConvention,
    rotated: bool,
) -> Vec<Coord> {
    let sides: Vec<_> = match boundary {
        Boundary::Either => crate::geom::Side::ALL.to_vec(),
        b => sides_of(b, convention, rotated).to_vec(),
    };
    sides
        .into_iter()
        .filter_map(|s| patch.side_neighbour(s, q.width, q.height))
        .filter(|&c| q.is_bus(c))
        .collect()
}

/// Tentative work for one node, committed only if every piece fits.
/// Bus cells per operand, and the cycle the operation may start.
type Tracked = (Vec<Vec<Coord>>, u64);

#[derive(Clone, Default)]
struct Plan {
    locks: Vec<(Coord, u64, u64)>,
    instrs: Vec<Instruction>,
    toggles: Vec<Coord>,
    bind: Option<usize>,
    rotations: usize,
    segments: usize,
}

impl Plan {
    fn emit(
        &mut self,
        kind: InstructionKind,
        cycle: u64,
        duration: u64,
        patches: Vec<Coord>,
        node: NodeId,
    ) {
        for &c in &patches {
            if duration > 0 {
                self.locks.push((c, cycle, cycle + duration));
            }
        }
        self.instrs.push(Instruction {
            cycle,
            duration,
            kind,
            patches,
            node,
        });
    }

    fn end(&self) -> u64 {
        self.instrs
            .iter()
            .filter(|i| i.in_span())
            .map(Instruction::end)
            .max()
            .unwrap_or(0)
    }
}

/// One operand moved between a slot's IO position `k` and its patch.
struct Transfer {
    k: u32,
    patch: Coord,
    targets: Vec<Coord>,
}

pub struct Router<'a> {
    dag: CircuitDag,
    q: &'a Qcb,
    map: &'a QubitMap,
    opts: RouterOptions,
    pub state: BoardState,
    instrs: Vec<Instruction>,
    ends: Vec<Option<u64>>,
    instance_slot: BTreeMap<usize, usize>,
    remaining: BTreeMap<usize, usize>,
    queues: BTreeMap<String, VecDeque<usize>>,
    queued: BTreeSet<usize>,
    assigned: BTreeMap<usize, usize>,
    slot_uses: Vec<SlotUse>,
    rotations: usize,
    segments: usize,
}

impl<'a> Router<'a> {
    pub fn new(
        dag: &CircuitDag,
        q: &'a Qcb,
        map: &'a QubitMap,
        opts: &RouterOptions,
    ) -> Result<Self, RouterError> {
        for (i, n) in dag.nodes.iter().enumerate() {
            match n.kind {
                NodeKind::MacroCall => return Err(RouterError::MacroNotExpanded(i)),
                NodeKind::Native if n.opcode == "Rz" => return Err(RouterError::Unsynthesized(i)),
                _ => {}
            }
            for s in &n.operands {
                if map.get(s).is_none() {
                    return Err(RouterError::Unmapped(s.to_string()));
                }
            }
        }
        let state = BoardState::new(q);
        let mut counts: BTreeMap<String, usize> = BTreeMap::new();
        for t in dag.used_templates() {
            let n = state
                .slots
                .iter()
                .filter(|s| match opts.policy {
                    BindingPolicy::Shared => s.fits(t),
                    _ => s.binding == t.name,
                })
                .count();
            if n == 0 {
                let first = dag
                    .nodes
                    .iter()
                    .position(|n| n.extern_dep.as_ref().is_some_and(|u| u.template == t.name))
                    .unwrap_or(0);
                return Err(match opts.policy {
                    BindingPolicy::Shared => {
                        RouterError::FootprintUnsatisfiable(first, t.name.clone())
                    }
                    _ => RouterError::MissingSlot(t.name.clone()),
                });
            }
            counts.insert(t.name.clone(), n);
        }
        let dag = attach_extern_barriers(dag, &counts).map_err(|e| match e {
            IrError::ZeroSlots(t) => RouterError::MissingSlot(t),
            e => RouterError::Ir(e),
        })?;
        let mut assigned = BTreeMap::new();
        if opts.policy == BindingPolicy::Heuristic && !counts.is_empty() {
            if let Ok(trace) = estimate_cycles(&dag, &HeuristicConfig::from_qcb(q)) {
                for (inst, (ty, k)) in trace.slot_of_instance() {
                    if let Some(g) = state
                        .slots
                        .iter()
                        .enumerate()
                        .filter(|(_, s)| s.binding == ty)
                        .nth(k)
                        .map(|(g, _)| g)
                    {
                        assigned.insert(inst, g);
                    }
                }
            }
        }
        let remaining = dag
            .instances()
            .into_iter()
            .map(|(i, info)| (i, info.nodes.len()))
            .collect();
        Ok(Router {
            ends: vec![None; dag.len()],
            dag,
            q,
            map,
            opts: opts.clone(),
            state,
            instrs: Vec::new(),
            instance_slot: BTreeMap::new(),
            remaining,
            queues: BTreeMap::new(),
            queued: BTreeSet::new(),
            assigned,
            slot_uses: Vec::new(),
            rotations: 0,
            segments: 0,
        })
    }

    fn free(&self, plan: &Plan, c: Coord, s: u64, e: u64) -> bool {
        s >= e
            || (self.state.is_free(c, s, e)
                && plan
                    .locks
                    .iter()
                    .all(|&(pc, ps, pe)| pc != c || pe <= s || ps >= e))
    }

    fn patch(&self, id: NodeId, k: usize) -> Coord {
        self.map
            .get(&self.dag.nodes[id].operands[k])
            .expect("operands checked at construction")
    }

    fn cost(&self, op: &str) -> u64 {
        self.dag.costs.cost(op)
    }

    /// A free bus neighbour of `p` over the window.
    fn free_ancilla(&self, plan: &Plan, p: Coord, s: u64, e: u64) -> Option<Coord> {
        self.q
            .neighbours(p)
            .find(|&n| self.q.is_bus(n) && self.free(plan, n, s, e))
    }

    /// Resolve each operand's required boundary to bus cells, injecting
    /// rotations at `t` where the boundary faces no bus. Returns the cells per
    /// operand and the cycle at which the operation itself may start.
    fn track_edges(
        &self,
        plan: &mut Plan,
        id: NodeId,
        t: u64,
    ) -> Result<Option<Tracked>, RouterError> {
        let node = &self.dag.nodes[id];
        let r = self.cost("Rotate");
        let mut cells = Vec::new();
        let mut rotate = Vec::new();
        for k in 0..node.operands.len() {
            let p = self.patch(id, k);
            let b = node.boundaries.get(k).copied().unwrap_or(Boundary::Either);
            let rot = self.state.is_rotated(p);
            let here = edge_cells(self.q, p, b, self.opts.convention, rot);
            if !here.is_empty() {
                cells.push(here);
                continue;
            }
            let flipped = edge_cells(self.q, p, b, self.opts.convention, !rot);
            if flipped.is_empty() {
                return Err(RouterError::NoBoundary(id));
            }
            rotate.push(p);
            cells.push(flipped);
        }
        if rotate.is_empty() {
            return Ok(Some((cells, t)));
        }
        // Patches sharing their only free ancilla rotate one after another.
        let mut start = t + r;
        for &p in &rotate {
            let slot = (t..=t + r * rotate.len() as u64).find_map(|s| {
                if !self.free(plan, p, s, s + r) {
                    return None;
                }
                self.free_ancilla(plan, p, s, s + r).map(|anc| (s, anc))
            });
            let Some((s, anc)) = slot else {
                return Ok(None);
            };
            plan.emit(InstructionKind::Rotate, s, r, vec![p, anc], id);
            plan.toggles.push(p);
            plan.rotations += 1;
            start = start.max(s + r);
        }
        Ok(Some((cells, start)))
    }

    fn slot_for(&self, id: NodeId, t: u64) -> Result<Option<usize>, RouterError> {
        let dep = self.dag.nodes[id].extern_dep.as_ref().expect("extern node");
        if let Some(&s) = self.instance_slot.get(&dep.instance) {
            return Ok(Some(s));
        }
        if self.opts.policy == BindingPolicy::Heuristic {
            if let Some(&s) = self.assigned.get(&dep.instance) {
                return Ok(self.state.slots[s].is_free(t).then_some(s));
            }
        }
        let front = self
            .queues
            .get(&dep.template)
            .and_then(|q| q.front())
            .copied();
        if front != Some(dep.instance) {
            return Ok(None);
        }
        let tmpl = &self.dag.externs[&dep.template];
        let usable = |s: &super::SlotState| match self.opts.policy {
            BindingPolicy::Shared => s.fits(tmpl),
            _ => s.binding == tmpl.name,
        };
        if !self.state.slots.iter().any(usable) {
            return Err(RouterError::FootprintUnsatisfiable(id, tmpl.name.clone()));
        }
        Ok(self
            .state
            .slots
            .iter()
            .position(|s| usable(s) && s.is_free(t)))
    }

    fn try_node(&self, id: NodeId, t: u64) -> Result<Option<Plan>, RouterError> {
        let node = &self.dag.nodes[id];
        let mut plan = Plan::default();
        let c = node.cycles;
        if let Some(dep) = &node.extern_dep {
            let Some(slot) = self.slot_for(id, t)? else {
                return Ok(None);
            };
            if !self.instance_slot.contains_key(&dep.instance) {
                plan.bind = Some(slot);
            }
            let ok = match dep.role {
                ExternRole::Produce => self.plan_body(&mut plan, id, slot, t, c),
                ExternRole::Consume => self.plan_consume(&mut plan, id, slot, t)?,
                ExternRole::Invoke => self.plan_invoke(&mut plan, id, slot, t),
            };
            return Ok(ok.then_some(plan));
        }
        let Some(loc) = node.locality() else {
            return Ok(None);
        };
        let p = node.operands.first().map(|_| self.patch(id, 0));
        let ok = match loc {
            Locality::Pauli => {
                let p = p.expect("unary");
                if self.free(&plan, p, t, t + c) {
                    plan.emit(InstructionKind::Pauli, t, c, vec![p], id);
                    true
                } else {
                    false
                }
            }
            Locality::Local => {
                let p = p.expect("unary");
                if !self.free(&plan, p, t, t + c) {
                    false
                } else if node.opcode == "H" {
                    match self.free_ancilla(&plan, p, t, t + c) {
                        Some(a) => {
                            plan.emit(InstructionKind::Rotate, t, c, vec![p, a], id);
                            true
                        }
                        None => false,
                    }
                } else {
                    let kind = if node.opcode.starts_with("Prep") {
                        InstructionKind::Prep
                    } else {
                        InstructionKind::Measure
                    };
                    plan.emit(kind, t, c, vec![p], id);
                    true
                }
            }
            Locality::Rotation => {
                let p = p.expect("unary");
                match (
                    self.free(&plan, p, t, t + c),
                    self.free_ancilla(&plan, p, t, t + c),
                ) {
                    (true, Some(a)) => {
                        plan.emit(InstructionKind::Rotate, t, c, vec![p, a], id);
                        plan.toggles.push(p);
                        true
                    }
                    _ => false,
                }
            }
            Locality::AncillaUnary => {
                let p = p.expect("unary");
                match self.track_edges(&mut plan, id, t)? {
                    None => false,
                    Some((cells, ts)) => {
                        let anc = cells[0]
                            .iter()
                            .copied()
                            .find(|&a| self.free(&plan, a, ts, ts + c));
                        match anc {
                            Some(a) if self.free(&plan, p, ts, ts + c) => {
                                plan.emit(InstructionKind::Merge, ts, c, vec![p, a], id);
                                true
                            }
                            _ => false,
                        }
                    }
                }
            }
            Locality::NonLocal => self.plan_nonlocal(&mut plan, id, t)?,
            Locality::Consume | Locality::Synthesized => false,
        };
        Ok(ok.then_some(plan))
    }

    fn plan_nonlocal(&self, plan: &mut Plan, id: NodeId, t: u64) -> Result<bool, RouterError> {
        let node = &self.dag.nodes[id];
        let c = node.cycles;
        let Some((cells, ts)) = self.track_edges(plan, id, t)? else {
            return Ok(false);
        };
        let patches: Vec<Coord> = (0..node.operands.len())
            .map(|k| self.patch(id, k))
            .collect();
        if !patches.iter().all(|&p| self.free(plan, p, ts, ts + c)) {
            return Ok(false);
        }
        let usable = |x: Coord| self.q.is_bus(x) && self.free(plan, x, ts, ts + c);
        let sources: Vec<Coord> = cells[0].iter().copied().filter(|&x| usable(x)).collect();
        let Some(first) = find_path(self.q, usable, &sources, &cells[1]) else {
            return Ok(false);
        };
        let mut tree = first.clone();
        for target in &cells[2..] {
            let inside: BTreeSet<Coord> = tree.iter().copied().collect();
            if target.iter().any(|x| inside.contains(x)) {
                continue;
            }
            let Some(branch) =
                find_path(self.q, |x| !inside.contains(&x) && usable(x), &tree, target)
            else {
                return Ok(false);
            };
            tree.extend(branch.into_iter().filter(|x| !inside.contains(x)));
        }
        if self.opts.disjoint && node.operands.len() == 2 {
            let split = apply_disjoint_paths(
                &RoutePath {
                    cells: first,
                    start: ts,
                    duration: c,
                    style: PathStyle::Direct,
                },
                self.cost("PrepX"),
                |x, a, b| self.free(plan, x, a, b),
            );
            for seg in &split.segments {
                plan.emit(
                    InstructionKind::IdleLock,
                    seg.start,
                    seg.duration,
                    seg.cells.clone(),
                    id,
                );
                plan.segments += 1;
            }
            tree = split.direct.cells;
        }
        let mut all = patches;
        all.extend(tree);
        plan.emit(InstructionKind::Merge, ts, c, all, id);
        Ok(true)
    }

    /// The extern's own operation over the slot footprint.
    fn plan_body(&self, plan: &mut Plan, id: NodeId, slot: usize, t: u64, d: u64) -> bool {
        let cells: Vec<Coord> = self.state.slots[slot].bounds.cells().collect();
        if !cells.iter().all(|&x| self.free(plan, x, t, t + d)) {
            return false;
        }
        plan.emit(InstructionKind::ExternInvoke, t, d, cells, id);
        true
    }

    /// Route between the slot's IO position `k` and a set of target cells
    /// next to `patch`, holding everything over `[s, s + d)` and keeping off
    /// `avoid`.
    #[allow(clippy::too_many_arguments)]
    fn plan_transfer(
        &self,
        plan: &mut Plan,
        id: NodeId,
        slot: usize,
        job: &Transfer,
        inbound: bool,
        avoid: &BTreeSet<Coord>,
        (s, d): (u64, u64),
    ) -> bool {
        let io = self.state.slots[slot].io_cell(job.k);
        if !self.free(plan, io, s, s + d) || !self.free(plan, job.patch, s, s + d) {
            return false;
        }
        let usable =
            |x: Coord| self.q.is_bus(x) && !avoid.contains(&x) && self.free(plan, x, s, s + d);
        let sources: Vec<Coord> = self.q.neighbours(io).filter(|&x| usable(x)).collect();
        let Some(path) = find_path(self.q, usable, &sources, &job.targets) else {
            return false;
        };
        let mut patches = vec![io];
        patches.extend(path);
        patches.push(job.patch);
        if inbound {
            patches.reverse();
        }
        plan.emit(InstructionKind::Merge, s, d, patches, id);
        true
    }

    /// Run every transfer over `[s, s + d)`, or failing that one after
    /// another. Returns the cycle the last transfer ends.
    fn plan_transfers(
        &self,
        plan: &mut Plan,
        id: NodeId,
        slot: usize,
        jobs: &[Transfer],
        inbound: bool,
        (s, d): (u64, u64),
    ) -> Option<u64> {
        let exits = |k: u32| {
            let io = self.state.slots[slot].io_cell(k);
            self.q
                .neighbours(io)
                .filter(|&x| self.q.is_bus(x))
                .collect::<Vec<_>>()
        };
        let mut together = plan.clone();
        let ok = jobs.iter().enumerate().all(|(i, job)| {
            let avoid: BTreeSet<Coord> = jobs[i + 1..].iter().flat_map(|j| exits(j.k)).collect();
            self.plan_transfer(&mut together, id, slot, job, inbound, &avoid, (s, d))
        });
        if ok {
            *plan = together;
            return Some(s + d);
        }
        if jobs.len() < 2 {
            return None;
        }
        let none = BTreeSet::new();
        let mut at = s;
        for job in jobs {
            if !self.plan_transfer(plan, id, slot, job, inbound, &none, (at, d)) {
                return None;
            }
            at += d;
        }
        Some(at)
    }

    fn plan_consume(
        &self,
        plan: &mut Plan,
        id: NodeId,
        slot: usize,
        t: u64,
    ) -> Result<bool, RouterError> {
        let node = &self.dag.nodes[id];
        let Some((cells, ts)) = self.track_edges(plan, id, t)? else {
            return Ok(false);
        };
        let jobs: Vec<Transfer> = cells
            .into_iter()
            .enumerate()
            .map(|(k, targets)| Transfer {
                k: k as u32,
                patch: self.patch(id, k),
                targets,
            })
            .collect();
        Ok(self
            .plan_transfers(plan, id, slot, &jobs, false, (ts, node.cycles))
            .is_some())
    }

    fn plan_invoke(&self, plan: &mut Plan, id: NodeId, slot: usize, t: u64) -> bool {
        let node = &self.dag.nodes[id];
        let c = node.cycles;
        if node.operands.is_empty() {
            return self.plan_body(plan, id, slot, t, c);
        }
        let dep = node.extern_dep.as_ref().expect("extern node");
        let decl = self.dag.externs[&dep.template]
            .op(&dep.op)
            .expect("declared op")
            .clone();
        let x = self.cost("Transfer").min(c / 2);
        let n = node.operands.len() as u32;
        let jobs = |count: u32| -> Vec<Transfer> {
            (0..count.min(n))
                .map(|k| {
                    let p = self.patch(id, k as usize);
                    Transfer {
                        k,
                        patch: p,
                        targets: edge_cells(
                            self.q,
                            p,
                            Boundary::Either,
                            self.opts.convention,
                            false,
                        ),
                    }
                })
                .collect()
        };
        let Some(mut at) = self.plan_transfers(plan, id, slot, &jobs(decl.inputs), true, (t, x))
        else {
            return false;
        };
        if decl.inputs == 0 {
            at = t + x;
        }
        let body = c - 2 * x;
        if body > 0 && !self.plan_body(plan, id, slot, at, body) {
            return false;
        }
        self.plan_transfers(plan, id, slot, &jobs(decl.outputs), false, (at + body, x))
            .is_some()
    }

    fn commit(&mut self, id: NodeId, t: u64, plan: Plan) -> u64 {
        let end = plan.end().max(t);
        for &(c, s, e) in &plan.locks {
            self.state.lock(c, s, e);
        }
        for &c in &plan.toggles {
            self.state.toggle(c);
        }
        self.rotations += plan.rotations;
        self.segments += plan.segments;
        self.instrs.extend(plan.instrs);
        self.ends[id] = Some(end);
        let Some(dep) = self.dag.nodes[id].extern_dep.clone() else {
            return end;
        };
        if let Some(slot) = plan.bind {
            self.state.slots[slot].bound = Some((dep.instance, t));
            self.instance_slot.insert(dep.instance, slot);
            if let Some(q) = self.queues.get_mut(&dep.template) {
                q.retain(|&i| i != dep.instance);
            }
        }
        let left = self
            .remaining
            .get_mut(&dep.instance)
            .expect("known instance");
        *left -= 1;
        if *left == 0 {
            let slot = self.instance_slot[&dep.instance];
            let resettable = self.dag.externs[&dep.template].resettable;
            let s = &mut self.state.slots[slot];
            let (_, since) = s.bound.take().expect("bound slot");
            if resettable {
                s.free_from = end;
                let cells = s.bounds.cells().collect();
                self.instrs.push(Instruction {
                    cycle: end,
                    duration: 0,
                    kind: InstructionKind::ExternReset,
                    patches: cells,
                    node: id,
                });
            } else {
                s.spent = true;
            }
            self.slot_uses.push(SlotUse {
                slot,
                template: dep.template.clone(),
                instance: dep.instance,
                start: since,
                end: if resettable { end } else { u64::MAX },
                area: s.area(),
            });
        }
        end
    }

    /// Attempt every ready node at `t`. Returns whether any was scheduled.
    fn attempt(
        &mut self,
        ready: &mut BTreeSet<(u64, NodeId)>,
        finishing: &mut BinaryHeap<Reverse<(u64, NodeId)>>,
        started: &mut usize,
        t: u64,
    ) -> Result<bool, RouterError> {
        for &(_, i) in ready.iter() {
            if let Some(dep) = &self.dag.nodes[i].extern_dep {
                if !self.instance_slot.contains_key(&dep.instance)
                    && self.queued.insert(dep.instance)
                {
                    self.queues
                        .entry(dep.template.clone())
                        .or_default()
                        .push_back(dep.instance);
                }
            }
        }
        let mut progressed = false;
        for (slack, i) in ready.clone() {
            if let Some(plan) = self.try_node(i, t)? {
                let end = self.commit(i, t, plan);
                ready.remove(&(slack, i));
                finishing.push(Reverse((end, i)));
                *started += 1;
                progressed = true;
            }
        }
        Ok(progressed)
    }

    /// Run the event loop: at each cycle, attempt every ready node in
    /// ascending slack order; blocked nodes retry on the next cycle.
    pub fn run(mut self) -> Result<CompilationResult, RouterError> {
        let n = self.dag.len();
        let (preds, succs) = self.dag.adjacency(true);
        let mut waiting: Vec<usize> = preds.iter().map(Vec::len).collect();
        let mut ready: BTreeSet<(u64, NodeId)> = BTreeSet::new();
        for (i, &w) in waiting.iter().enumerate() {
            if w == 0 {
                ready.insert((self.dag.nodes[i].slack, i));
            }
        }
        let mut finishing: BinaryHeap<Reverse<(u64, NodeId)>> = BinaryHeap::new();
        let mut started = 0usize;
        let mut t = 0u64;
        while started < n {
            let mut progressed = false;
            // Zero-duration nodes finish within the cycle; their successors
            // get a chance at the same cycle.
            loop {
                while let Some(&Reverse((e, i))) = finishing.peek() {
                    if e > t {
                        break;
                    }
                    finishing.pop();
                    for &s in &succs[i] {
                        waiting[s] -= 1;
                        if waiting[s] == 0 {
                            ready.insert((self.dag.nodes[s].slack, s));
                        }
                    }
                }
                progressed |= self.attempt(&mut ready, &mut finishing, &mut started, t)?;
                if !finishing.peek().is_some_and(|&Reverse((e, _))| e <= t) {
                    break;
                }
            }
            if started == n {
                break;
            }
            if !progressed && finishing.is_empty() && self.instrs.iter().all(|x| x.end() <= t) {
                return Err(RouterError::Stalled {
                    cycle: t,
                    waiting: ready.iter().map(|&(_, i)| i).collect(),
                });
            }
            t += 1;
        }
        Ok(self.finish())
    }

    fn finish(mut self) -> CompilationResult {
        let total = self
            .instrs
            .iter()
            .map(Instruction::end)
            .chain(self.ends.iter().flatten().copied())
            .max()
            .unwrap_or(0);
        for u in &mut self.slot_uses {
            u.end = u.end.min(total);
        }
        for (slot, s) in self.state.slots.iter().enumerate() {
            if let Some((instance, since)) = s.bound {
                self.slot_uses.push(SlotUse {
                    slot,
                    template: s.binding.clone(),
                    instance,
                    start: since,
                    end: total,
                    area: s.area(),
                });
            }
        }
        let mut order: Vec<usize> = (0..self.instrs.len()).collect();
        order.sort_by_key(|&i| (self.instrs[i].cycle, self.instrs[i].node, i));
        let instructions: Vec<Instruction> =
            order.into_iter().map(|i| self.instrs[i].clone()).collect();
        let mapped = self.map.len();
        let routing: u64 = instructions
            .iter()
            .map(|i| {
                i.patches
                    .iter()
                    .filter(|&&c| self.q.get(c) == PatchType::Route)
                    .count() as u64
                    * i.duration
            })
            .sum();
        let volume = VolumeBreakdown {
            register: mapped as u64 * total,
            routing,
            externs: self
                .slot_uses
                .iter()
                .map(|u| u.area * (u.end - u.start))
                .sum(),
        };
        let (ins, outs) = self
            .dag
            .io
            .iter()
            .fold((0, 0), |(i, o), s| match s.direction {
                IoDirection::Input => (i + 1, o),
                IoDirection::Output => (i, o + 1),
                IoDirection::Inout => (i + 1, o + 1),
            });
        let mut edges = self.dag.edges.clone();
        edges.extend(self.dag.barriers.iter().copied());
        edges.sort_unstable();
        edges.dedup();
        CompilationResult {
            instructions,
            total_cycles: total,
            spacetime_volume: volume.total(),
            volume,
            width: self.q.width,
            height: self.q.height,
            edges,
            node_count: self.dag.len(),
            mapped_patches: mapped,
            rotations_injected: self.rotations,
            disjoint_segments: self.segments,
            slot_uses: self.slot_uses,
            io_signature: (!self.dag.io.is_empty()).then_some((ins, outs)),
        }
    }
}

/// Route a mapped DAG on a cleaned-up board.
pub fn compile(
    dag: &CircuitDag,
    qcb: &Qcb,
    map: &QubitMap,
    options: &RouterOptions,
) -> Result<CompilationResult, RouterError> {
    Router::new(dag, qcb, map, options)?.run()
}
