//! Quantum circuit board: a typed grid of surface-code patches.

mod layout;
mod placement;
mod rules;
mod validate;

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::geom::{Coord, Rect};

pub use layout::{LayoutDoc, LayoutError};
pub use placement::{
    initial_placement, join_io, optimize_placement, place_extern, place_io, place_register,
    split_bus_lane, Placement,
};
pub use validate::{validate_board, validate_qcb, Violation};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum QcbError {
    #[error("board must be at least 2x2, got {width}x{height}")]
    BoardTooSmall { width: u32, height: u32 },
    #[error("no legal placement for {0}")]
    NoLegalPlacement(String),
    #[error("bottom row is occupied where the IO segment must go")]
    BottomRowOccupied,
    #[error("{count} IO patches do not fit a board of width {width}")]
    IoTooWide { count: u32, width: u32 },
    #[error("pending IO routes cannot be joined to the bus")]
    JoinImpossible,
    #[error("allocation failure: {0}")]
    AllocationFailure(String),
}

#[derive(Clone, Copy, Debug, Eq, Hash, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PatchType {
    Register,
    Route,
    LocalRoute,
    Extern,
    Io,
    Unallocated,
}

impl PatchType {
    pub fn glyph(self) -> char {
        match self {
            PatchType::Register => 'R',
            PatchType::Route => 'B',
            PatchType::LocalRoute => 'L',
            PatchType::Extern => 'E',
            PatchType::Io => 'I',
            PatchType::Unallocated => '.',
        }
    }

    pub fn from_glyph(c: char) -> Option<Self> {
        Some(match c {
            'R' => PatchType::Register,
            'B' | 'P' => PatchType::Route,
            'L' => PatchType::LocalRoute,
            'E' => PatchType::Extern,
            'I' => PatchType::Io,
            '.' => PatchType::Unallocated,
            _ => return None,
        })
    }
}

#[derive(Clone, Debug, Eq, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub bounds: Rect,
    pub kind: PatchType,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub extern_binding: Option<String>,
}

/// A board. Register, extern and IO regions are tracked as segments; route
/// patches are tracked per cell, with IO routes flagged pending until they
/// join the bus.
#[derive(Clone, Debug, Eq, PartialEq)]
pub struct Qcb {
    pub width: u32,
    pub height: u32,
    cells: Vec<PatchType>,
    pending: Vec<bool>,
    pub segments: Vec<Segment>,
    pub io_count: u32,
}

impl Qcb {
    pub fn new(width: u32, height: u32) -> Self {
        let n = (width * height) as usize;
        Qcb {
            width,
            height,
            cells: vec![PatchType::Unallocated; n],
            pending: vec![false; n],
            segments: Vec::new(),
            io_count: 0,
        }
    }

    fn idx(&self, c: Coord) -> usize {
        (c.row * self.width + c.col) as usize
    }

    pub fn in_bounds(&self, c: Coord) -> bool {
        c.row < self.height && c.col < self.width
    }

    pub fn get(&self, c: Coord) -> PatchType {
        self.cells[self.idx(c)]
    }

    pub(crate) fn set(&mut self, c: Coord, t: PatchType) {
        let i = self.idx(c);
        self.cells[i] = t;
        if t != PatchType::Route {
            self.pending[i] = false;
        }
    }

    pub fn is_pending(&self, c: Coord) -> bool {
        self.pending[self.idx(c)]
    }

    pub(crate) fn set_pending(&mut self, c: Coord, p: bool) {
        let i = self.idx(c);
        self.pending[i] = p;
    }

    pub fn is_free(&self, c: Coord) -> bool {
        self.in_bounds(c) && self.get(c) == PatchType::Unallocated
    }

    /// Route patch that is part of the connected bus.
    pub fn is_bus(&self, c: Coord) -> bool {
        self.in_bounds(c) && self.get(c) == PatchType::Route && !self.is_pending(c)
    }

    pub fn coords(&self) -> impl Iterator<Item = Coord> + '_ {
        (0..self.height).flat_map(move |r| (0..self.width).map(move |c| Coord::new(r, c)))
    }

    pub fn neighbours(&self, c: Coord) -> impl Iterator<Item = Coord> {
        c.neighbours(self.width, self.height)
    }

    pub fn touches_bus(&self, c: Coord) -> bool {
        self.neighbours(c).any(|n| self.is_bus(n))
    }

    pub fn count(&self, t: PatchType) -> usize {
        self.cells.iter().filter(|&&x| x == t).count()
    }

    pub fn bus_cells(&self) -> Vec<Coord> {
        self.coords().filter(|&c| self.is_bus(c)).collect()
    }

    pub fn has_bus(&self) -> bool {
        self.coords().any(|c| self.is_bus(c))
    }

    pub fn pending_cells(&self) -> Vec<Coord> {
        self.coords()
            .filter(|&c| self.get(c) == PatchType::Route && self.is_pending(c))
            .collect()
    }

    /// Connected components of the cells accepted by `keep`.
    pub fn components(&self, keep: impl Fn(Coord) -> bool) -> Vec<Vec<Coord>> {
        let mut seen = vec![false; self.cells.len()];
        let mut out = Vec::new();
        for start in self.coords() {
            if seen[self.idx(start)] || !keep(start) {
                continue;
            }
            let mut comp = Vec::new();
            let mut queue = VecDeque::from([start]);
            seen[self.idx(start)] = true;
            while let Some(c) = queue.pop_front() {
                comp.push(c);
                for n in self.neighbours(c) {
                    let i = self.idx(n);
                    if !seen[i] && keep(n) {
                        seen[i] = true;
                        queue.push_back(n);
                    }
                }
            }
            out.push(comp);
        }
        out
    }

    pub fn bus_is_connected(&self) -> bool {
        self.components(|c| self.is_bus(c)).len() <= 1
    }

    /// Merge pending route components that touch the bus into it. Returns
    /// whether anything changed.
    pub(crate) fn absorb_pending(&mut self) -> bool {
        let mut changed = false;
        loop {
            let comps = self.components(|c| self.get(c) == PatchType::Route && self.is_pending(c));
            let Some(comp) = comps
                .into_iter()
                .find(|comp| comp.iter().any(|&c| self.touches_bus(c)))
            else {
                return changed;
            };
            for c in comp {
                self.set_pending(c, false);
            }
            changed = true;
        }
    }

    pub fn register_segments(&self) -> impl Iterator<Item = (usize, &Segment)> {
        self.segments
            .iter()
            .enumerate()
            .filter(|(_, s)| s.kind == PatchType::Register)
    }

    pub fn extern_segments(&self) -> impl Iterator<Item = (usize, &Segment)> {
        self.segments
            .iter()
            .enumerate()
            .filter(|(_, s)| s.kind == PatchType::Extern)
    }

    pub fn io_segment(&self) -> Option<&Segment> {
        self.segments.iter().find(|s| s.kind == PatchType::Io)
    }

    /// IO patches left to right.
    pub fn io_cells(&self) -> Vec<Coord> {
        self.io_segment()
            .map(|s| s.bounds.cells().collect())
            .unwrap_or_default()
    }

    pub fn segment_at(&self, c: Coord) -> Option<usize> {
        self.segments.iter().position(|s| s.bounds.contains(c))
    }

    pub fn register_capacity(&self) -> usize {
        self.count(PatchType::Register)
    }

    /// Proxy for the number of concurrent non-local operations the bus supports.
    pub fn routing_channels(&self) -> usize {
        let bus = self.coords().filter(|&c| self.is_bus(c)).count();
        (bus / self.width.max(self.height) as usize).max(1)
    }

    /// Extern slots grouped by bound template name, in segment order, with footprints.
    pub fn extern_slots(&self) -> std::collections::BTreeMap<String, Vec<(u32, u32)>> {
        let mut out: std::collections::BTreeMap<String, Vec<(u32, u32)>> = Default::default();
        for (_, s) in self.extern_segments() {
            let name = s.extern_binding.clone().unwrap_or_default();
            out.entry(name)
                .or_default()
                .push((s.bounds.width, s.bounds.height));
        }
        out
    }

    pub(crate) fn add_segment(&mut self, seg: Segment) -> usize {
        for c in seg.bounds.cells() {
            self.set(c, seg.kind);
        }
        self.segments.push(seg);
        self.segments.len() - 1
    }

    /// Rebuild register segments as maximal horizontal runs of register cells.
    pub(crate) fn resegment_registers(&mut self) {
        self.segments.retain(|s| s.kind != PatchType::Register);
        for r in 0..self.height {
            let mut c = 0;
            while c < self.width {
                if self.get(Coord::new(r, c)) != PatchType::Register {
                    c += 1;
                    continue;
                }
                let start = c;
                while c < self.width && self.get(Coord::new(r, c)) == PatchType::Register {
                    c += 1;
                }
                self.segments.push(Segment {
                    bounds: Rect::new(r, start, c - start, 1),
                    kind: PatchType::Register,
                    extern_binding: None,
                });
            }
        }
    }

    /// One glyph per patch, rows separated by newlines. Pending IO routes print as `P`.
    pub fn to_ascii(&self) -> String {
        let mut s = String::with_capacity(((self.width + 1) * self.height) as usize);
        for r in 0..self.height {
            for c in 0..self.width {
                let at = Coord::new(r, c);
                s.push(if self.get(at) == PatchType::Route && self.is_pending(at) {
                    'P'
                } else {
                    self.get(at).glyph()
                });
            }
            s.push('\n');
        }
        s
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::Qcb;

    pub fn board(rows: &[&str]) -> Qcb {
        Qcb::from_rows(rows, Some("ext")).expect("well-formed fixture")
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::board;

    #[test]
    fn ascii_round_trip_through_fixture() {
        let rows = ["RRR.", "BBBB", "IP.."];
        let q = board(&rows);
        assert_eq!(q.to_ascii(), "RRR.\nBBBB\nIP..\n");
        assert_eq!(q.register_capacity(), 3);
        assert!(q.bus_is_connected());
    }

    #[test]
    fn pending_absorbed_when_touching() {
        let mut q = board(&["BBP", "..P"]);
        assert_eq!(q.pending_cells().len(), 2);
        assert!(q.absorb_pending());
        assert!(q.pending_cells().is_empty());
    }
}
