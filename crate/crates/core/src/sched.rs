//! Cycle estimation for a DAG under a routing-channel semaphore and a finite
//! pool of extern slots, scheduling ready nodes by ascending slack.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap, HashMap};

use serde::{Deserialize, Serialize};

use crate::ir::{attach_extern_barriers, CircuitDag, IrError, NodeKind};
use crate::qcb::Qcb;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum SchedError {
    #[error("extern `{0}` fits no configured slot")]
    Unschedulable(String),
    #[error("node {0} is an unexpanded macro call")]
    MacroNotExpanded(usize),
    #[error("node {0} is an unsynthesized rotation")]
    Unsynthesized(usize),
    #[error("routing channel count must be positive")]
    ZeroChannels,
    #[error("schedule stalled with {0} nodes unscheduled")]
    Stalled(usize),
    #[error(transparent)]
    Ir(#[from] IrError),
}

#[derive(Clone, Debug, Eq, Hash, PartialEq, Serialize, Deserialize)]
pub struct HeuristicConfig {
    pub routing_channels: usize,
    /// Slot footprints (width, height) per extern type.
    pub extern_slots: BTreeMap<String, Vec<(u32, u32)>>,
}

impl HeuristicConfig {
    pub fn new(routing_channels: usize) -> Self {
        HeuristicConfig {
            routing_channels,
            extern_slots: BTreeMap::new(),
        }
    }

    pub fn with_slots(mut self, template: &str, footprint: (u32, u32), count: usize) -> Self {
        self.extern_slots
            .entry(template.to_string())
            .or_default()
            .extend(std::iter::repeat_n(footprint, count));
        self
    }

    pub fn from_qcb(q: &Qcb) -> Self {
        HeuristicConfig {
            routing_channels: q.routing_channels(),
            extern_slots: q.extern_slots(),
        }
    }

    fn apply(&self, delta: &Delta) -> Self {
        let mut out = self.clone();
        match delta {
            Delta::Channel => out.routing_channels += 1,
            Delta::Slot {
                template,
                footprint,
            } => out
                .extern_slots
                .entry(template.clone())
                .or_default()
                .push(*footprint),
        }
        out
    }
}

/// A candidate resource addition scored during placement optimization.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Delta {
    Channel,
    Slot {
        template: String,
        footprint: (u32, u32),
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlotOccupancy {
    pub template: String,
    pub slot: usize,
    pub instance: usize,
    pub start: u64,
    pub end: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduleTrace {
    pub starts: Vec<u64>,
    pub ends: Vec<u64>,
    pub occupancy: Vec<SlotOccupancy>,
    pub makespan: u64,
    /// Resources the trace actually uses; dominated by the requested config.
    pub config: HeuristicConfig,
}

impl ScheduleTrace {
    /// Largest number of non-local nodes running at any cycle.
    pub fn peak_channels(&self, dag: &CircuitDag) -> usize {
        let mut events: Vec<(u64, i32)> = Vec::new();
        for (i, n) in dag.nodes.iter().enumerate() {
            if n.is_non_local() && self.ends[i] > self.starts[i] {
                events.push((self.starts[i], 1));
                events.push((self.ends[i], -1));
            }
        }
        events.sort_unstable();
        let (mut cur, mut peak) = (0i32, 0i32);
        for (_, d) in events {
            cur += d;
            peak = peak.max(cur);
        }
        peak as usize
    }

    /// Instance id to (slot type, slot index).
    pub fn slot_of_instance(&self) -> BTreeMap<usize, (String, usize)> {
        self.occupancy
            .iter()
            .map(|o| (o.instance, (o.template.clone(), o.slot)))
            .collect()
    }
}

fn check_dag(dag: &CircuitDag) -> Result<(), SchedError> {
    for (i, n) in dag.nodes.iter().enumerate() {
        if n.kind == NodeKind::MacroCall {
            return Err(SchedError::MacroNotExpanded(i));
        }
        if n.opcode == "Rz" {
            return Err(SchedError::Unsynthesized(i));
        }
    }
    Ok(())
}

/// Slots of each type whose footprint covers the template.
fn fitting_counts(
    dag: &CircuitDag,
    cfg: &HeuristicConfig,
) -> Result<BTreeMap<String, usize>, SchedError> {
    let mut out = BTreeMap::new();
    for t in dag.used_templates() {
        let n = cfg
            .extern_slots
            .get(&t.name)
            .map(|v| {
                v.iter()
                    .filter(|&&(w, h)| w >= t.width && h >= t.height)
                    .count()
            })
            .unwrap_or(0);
        if n == 0 {
            return Err(SchedError::Unschedulable(t.name.clone()));
        }
        let instances = dag
            .instances()
            .values()
            .filter(|i| i.template == t.name)
            .count();
        if !t.resettable && instances > n {
            return Err(SchedError::Unschedulable(t.name.clone()));
        }
        out.insert(t.name.clone(), n);
    }
    Ok(out)
}

/// One list-scheduling pass with exactly the given resources.
fn list_schedule(dag: &CircuitDag, cfg: &HeuristicConfig) -> Result<ScheduleTrace, SchedError> {
    if cfg.routing_channels == 0 {
        return Err(SchedError::ZeroChannels);
    }
    check_dag(dag)?;
    let counts = fitting_counts(dag, cfg)?;
    let dag = attach_extern_barriers(dag, &counts)?;
    let n = dag.nodes.len();
    let (preds, succs) = dag.adjacency(true);
    let mut remaining: Vec<usize> = preds.iter().map(Vec::len).collect();
    let instances = dag.instances();
    let mut inst_of = vec![None; n];
    let mut inst_left: HashMap<usize, usize> = HashMap::new();
    for (&id, info) in &instances {
        for &v in &info.nodes {
            inst_of[v] = Some(id);
        }
        inst_left.insert(id, info.nodes.len());
    }
    let is_alloc = |v: usize| inst_of[v].is_some_and(|id| instances[&id].alloc() == v);
    let mut slots: BTreeMap<&str, Vec<Option<usize>>> = cfg
        .extern_slots
        .iter()
        .map(|(k, v)| (k.as_str(), vec![None; v.len()]))
        .collect();
    let mut bound: HashMap<usize, (String, usize, u64)> = HashMap::new();
    let mut occupancy = Vec::new();

    let mut starts = vec![0u64; n];
    let mut ends = vec![0u64; n];
    let mut ready: BTreeSet<(u64, usize)> = (0..n)
        .filter(|&v| remaining[v] == 0)
        .map(|v| (dag.nodes[v].slack, v))
        .collect();
    let mut running: BinaryHeap<Reverse<(u64, usize)>> = BinaryHeap::new();
    let mut channels = 0usize;
    let mut done = 0usize;
    let mut t = 0u64;

    macro_rules! complete {
        ($v:expr) => {{
            let v = $v;
            ends[v] = t;
            done += 1;
            if dag.nodes[v].is_non_local() {
                channels -= 1;
            }
            for &s in &succs[v] {
                remaining[s] -= 1;
                if remaining[s] == 0 {
                    ready.insert((dag.nodes[s].slack, s));
                }
            }
            if let Some(id) = inst_of[v] {
                let left = inst_left.get_mut(&id).expect("instance tracked");
                *left -= 1;
                if *left == 0 {
                    let tmpl = &dag.externs[&instances[&id].template];
                    let (ty, slot, since) = bound.remove(&id).expect("instance bound");
                    if tmpl.resettable {
                        slots.get_mut(ty.as_str()).expect("slot type")[slot] = None;
                    }
                    occupancy.push(SlotOccupancy {
                        template: ty,
                        slot,
                        instance: id,
                        start: since,
                        end: t,
                    });
                }
            }
        }};
    }

    loop {
        'scan: loop {
            let candidates: Vec<(u64, usize)> = ready.iter().copied().collect();
            for (slack, v) in candidates {
                let node = &dag.nodes[v];
                let nonlocal = node.is_non_local();
                if nonlocal && channels >= cfg.routing_channels {
                    continue;
                }
                if is_alloc(v) {
                    let id = inst_of[v].expect("alloc has instance");
                    let ty = instances[&id].template.as_str();
                    let tmpl = &dag.externs[ty];
                    let foot = &cfg.extern_slots[ty];
                    let pool = slots.get_mut(ty).expect("slot type");
                    let free = (0..pool.len()).find(|&s| {
                        pool[s].is_none() && foot[s].0 >= tmpl.width && foot[s].1 >= tmpl.height
                    });
                    let Some(s) = free else { continue };
                    pool[s] = Some(id);
                    bound.insert(id, (ty.to_string(), s, t));
                }
                ready.remove(&(slack, v));
                starts[v] = t;
                if nonlocal {
                    channels += 1;
                }
                if node.cycles == 0 {
                    complete!(v);
                    continue 'scan;
                }
                running.push(Reverse((t + node.cycles, v)));
            }
            break;
        }
        if done == n {
            break;
        }
        let Some(&Reverse((next, _))) = running.peek() else {
            return Err(SchedError::Stalled(n - done));
        };
        t = next;
        while let Some(&Reverse((end, v))) = running.peek() {
            if end != t {
                break;
            }
            running.pop();
            complete!(v);
        }
    }
    for (id, (ty, slot, since)) in bound {
        occupancy.push(SlotOccupancy {
            template: ty,
            slot,
            instance: id,
            start: since,
            end: t,
        });
    }
    occupancy.sort_by_key(|o| (o.start, o.instance));
    Ok(ScheduleTrace {
        makespan: ends.iter().copied().max().unwrap_or(0),
        starts,
        ends,
        occupancy,
        config: cfg.clone(),
    })
}

/// Memoized estimator. List scheduling is not monotone in its resources, so
/// the estimate for a configuration is the best schedule over every
/// configuration it dominates; adding a channel or a slot can then never
/// lengthen the estimate. One estimator serves one DAG.
#[derive(Default)]
pub struct Estimator {
    raw: HashMap<HeuristicConfig, Option<u64>>,
    envelope: HashMap<HeuristicConfig, Option<(u64, HeuristicConfig)>>,
}

impl Estimator {
    pub fn new() -> Self {
        Self::default()
    }

    fn raw(&mut self, dag: &CircuitDag, cfg: &HeuristicConfig) -> Result<Option<u64>, SchedError> {
        if let Some(&v) = self.raw.get(cfg) {
            return Ok(v);
        }
        let v = match list_schedule(dag, cfg) {
            Ok(tr) => Some(tr.makespan),
            Err(SchedError::Unschedulable(_)) => None,
            Err(e) => return Err(e),
        };
        self.raw.insert(cfg.clone(), v);
        Ok(v)
    }

    /// Canonical form: drop unused types and clamp channels to the number of
    /// non-local nodes, beyond which extra channels cannot matter.
    fn normalize(dag: &CircuitDag, cfg: &HeuristicConfig) -> HeuristicConfig {
        let used: BTreeSet<String> = dag
            .used_templates()
            .iter()
            .map(|t| t.name.clone())
            .collect();
        let nonlocal = dag.nodes.iter().filter(|n| n.is_non_local()).count().max(1);
        HeuristicConfig {
            routing_channels: cfg.routing_channels.min(nonlocal),
            extern_slots: cfg
                .extern_slots
                .iter()
                .filter(|(k, _)| used.contains(*k))
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
        }
    }

    fn best(
        &mut self,
        dag: &CircuitDag,
        cfg: &HeuristicConfig,
    ) -> Result<Option<(u64, HeuristicConfig)>, SchedError> {
        if let Some(v) = self.envelope.get(cfg) {
            return Ok(v.clone());
        }
        let mut best = self.raw(dag, cfg)?.map(|m| (m, cfg.clone()));
        let mut lower = Vec::new();
        if cfg.routing_channels > 1 {
            let mut c = cfg.clone();
            c.routing_channels -= 1;
            lower.push(c);
        }
        for (k, v) in &cfg.extern_slots {
            if v.len() > 1 {
                let mut c = cfg.clone();
                c.extern_slots.get_mut(k).expect("key present").pop();
                lower.push(c);
            }
        }
        for c in lower {
            if let Some((m, used)) = self.best(dag, &c)? {
                if best.as_ref().is_none_or(|(b, _)| m < *b) {
                    best = Some((m, used));
                }
            }
        }
        self.envelope.insert(cfg.clone(), best.clone());
        Ok(best)
    }

    pub fn makespan(&mut self, dag: &CircuitDag, cfg: &HeuristicConfig) -> Result<u64, SchedError> {
        if cfg.routing_channels == 0 {
            return Err(SchedError::ZeroChannels);
        }
        let norm = Self::normalize(dag, cfg);
        match self.best(dag, &norm)? {
            Some((m, _)) => Ok(m),
            None => Err(unschedulable(dag, &norm)),
        }
    }

    pub fn trace(
        &mut self,
        dag: &CircuitDag,
        cfg: &HeuristicConfig,
    ) -> Result<ScheduleTrace, SchedError> {
        if cfg.routing_channels == 0 {
            return Err(SchedError::ZeroChannels);
        }
        let norm = Self::normalize(dag, cfg);
        match self.best(dag, &norm)? {
            Some((_, used)) => list_schedule(dag, &used),
            None => Err(unschedulable(dag, &norm)),
        }
    }
}

fn unschedulable(dag: &CircuitDag, cfg: &HeuristicConfig) -> SchedError {
    match fitting_counts(dag, cfg) {
        Err(e) => e,
        Ok(_) => SchedError::Stalled(dag.len()),
    }
}

/// Schedule `dag` under `config`; the trace's makespan is the estimate.
pub fn estimate_cycles(
    dag: &CircuitDag,
    config: &HeuristicConfig,
) -> Result<ScheduleTrace, SchedError> {
    Estimator::new().trace(dag, config)
}

/// `estimate(base) - estimate(base + delta)`; never positive for a harmful addition.
pub fn score_candidate(
    dag: &CircuitDag,
    base: &HeuristicConfig,
    delta: &Delta,
) -> Result<i64, SchedError> {
    let mut est = Estimator::new();
    let a = est.makespan(dag, base)?;
    let b = est.makespan(dag, &base.apply(delta))?;
    Ok(a as i64 - b as i64)
}
