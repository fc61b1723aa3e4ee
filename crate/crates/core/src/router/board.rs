//! Per-patch lock timelines, orientations and extern slot bindings.

use crate::geom::{Coord, Rect};
use crate::ir::ExternTemplate;
use crate::qcb::Qcb;

/// One extern segment of the board.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SlotState {
    pub bounds: Rect,
    /// Template the segment was placed for.
    pub binding: String,
    /// Instance currently bound, and the cycle it was bound at.
    pub bound: Option<(usize, u64)>,
    /// First cycle at which the slot may be bound again.
    pub free_from: u64,
    /// Set once a non-resettable instance has finished here.
    pub spent: bool,
}

impl SlotState {
    pub fn is_free(&self, t: u64) -> bool {
        self.bound.is_none() && !self.spent && self.free_from <= t
    }

    pub fn fits(&self, t: &ExternTemplate) -> bool {
        self.bounds.width >= t.width && self.bounds.height >= t.height
    }

    /// Bottom-edge patch at IO position `k`, counted from the left.
    pub fn io_cell(&self, k: u32) -> Coord {
        Coord::new(self.bounds.bottom_row(), self.bounds.col + k)
    }

    pub fn area(&self) -> u64 {
        self.bounds.area() as u64
    }
}

#[derive(Clone, Debug)]
pub struct BoardState {
    width: u32,
    height: u32,
    /// Disjoint `[start, end)` intervals per patch, sorted by start.
    locks: Vec<Vec<(u64, u64)>>,
    rotated: Vec<bool>,
    pub slots: Vec<SlotState>,
}

impl BoardState {
    pub fn new(q: &Qcb) -> Self {
        let n = (q.width * q.height) as usize;
        BoardState {
            width: q.width,
            height: q.height,
            locks: vec![Vec::new(); n],
            rotated: vec![false; n],
            slots: q
                .extern_segments()
                .map(|(_, s)| SlotState {
                    bounds: s.bounds,
                    binding: s.extern_binding.clone().unwrap_or_default(),
                    bound: None,
                    free_from: 0,
                    spent: false,
                })
                .collect(),
        }
    }

    fn idx(&self, c: Coord) -> usize {
        (c.row * self.width + c.col) as usize
    }

    pub fn in_bounds(&self, c: Coord) -> bool {
        c.row < self.height && c.col < self.width
    }

    /// Whether `c` is unlocked over `[start, end)`.
    pub fn is_free(&self, c: Coord, start: u64, end: u64) -> bool {
        if start >= end {
            return true;
        }
        let list = &self.locks[self.idx(c)];
        let k = list.partition_point(|&(_, e)| e <= start);
        list.get(k).is_none_or(|&(s, _)| s >= end)
    }

    pub fn lock(&mut self, c: Coord, start: u64, end: u64) {
        if start >= end {
            return;
        }
        debug_assert!(self.is_free(c, start, end), "double lock at {c}");
        let i = self.idx(c);
        let list = &mut self.locks[i];
        let k = list.partition_point(|&(s, _)| s < start);
        list.insert(k, (start, end));
    }

    pub fn locks(&self, c: Coord) -> &[(u64, u64)] {
        &self.locks[self.idx(c)]
    }

    pub fn is_rotated(&self, c: Coord) -> bool {
        self.rotated[self.idx(c)]
    }

    pub fn toggle(&mut self, c: Coord) {
        let i = self.idx(c);
        self.rotated[i] = !self.rotated[i];
    }
}
