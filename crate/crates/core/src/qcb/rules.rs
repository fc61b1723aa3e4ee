//! Placement rule tables for registers and externs.

use std::collections::HashSet;

use super::{PatchType, Qcb, Segment};
use crate::geom::{Coord, Rect};

/// A candidate placement: body rectangle plus the route patches it mandates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Attempt {
    pub body: Rect,
    pub routes: Vec<Coord>,
    pub rule: u8,
}

pub(crate) const REGISTER_RULES: u8 = 6;
pub(crate) const EXTERN_RULES: u8 = 8;

impl Qcb {
    fn route_set_touches_bus(&self, routes: &[Coord]) -> bool {
        routes
            .iter()
            .any(|&c| self.is_bus(c) || self.touches_bus(c))
    }

    /// Extend a route column from `start` in direction `step` until the route
    /// set reaches the bus.
    fn extend_column(&self, routes: &mut Vec<Coord>, col: u32, start: i64, step: i64) -> bool {
        let mut row = start;
        loop {
            if self.route_set_touches_bus(routes) {
                return true;
            }
            if row < 0 || row >= self.height as i64 || col >= self.width {
                return false;
            }
            let at = Coord::new(row as u32, col);
            match self.get(at) {
                PatchType::Unallocated => routes.push(at),
                PatchType::Route if self.is_pending(at) => routes.push(at),
                PatchType::Route => return true,
                _ => return false,
            }
            row += step;
        }
    }

    fn row_cells(&self, row: u32, from: u32, to_exclusive: u32) -> Option<Vec<Coord>> {
        (row < self.height && to_exclusive <= self.width)
            .then(|| (from..to_exclusive).map(|c| Coord::new(row, c)).collect())
    }

    fn body_free(&self, body: &Rect) -> bool {
        body.fits_in(self.width, self.height) && body.cells().all(|c| self.is_free(c))
    }

    /// Route cells may reuse existing routes; connectivity with the bus is
    /// required once a bus exists.
    fn routes_ok(&self, body: &Rect, routes: &[Coord]) -> bool {
        let ok_cells = routes.iter().all(|&c| {
            self.in_bounds(c)
                && !body.contains(c)
                && matches!(self.get(c), PatchType::Unallocated | PatchType::Route)
        });
        if !ok_cells {
            return false;
        }
        let set: HashSet<Coord> = routes.iter().copied().collect();
        if !self.has_bus() {
            return !routes.is_empty() && connected(&set);
        }
        // Every component of the new routes must touch the existing bus.
        let mut seen = HashSet::new();
        for &start in routes {
            if seen.contains(&start) {
                continue;
            }
            let mut stack = vec![start];
            seen.insert(start);
            let mut touches = false;
            while let Some(c) = stack.pop() {
                touches |= self.is_bus(c) || self.touches_bus(c);
                for n in self.neighbours(c) {
                    if set.contains(&n) && seen.insert(n) {
                        stack.push(n);
                    }
                }
            }
            if !touches {
                return false;
            }
        }
        true
    }

    fn served(&self, c: Coord, routes: &[Coord]) -> bool {
        self.is_bus(c) || routes.contains(&c)
    }

    pub(crate) fn register_legal(&self, a: &Attempt) -> bool {
        if !self.body_free(&a.body) || !self.routes_ok(&a.body, &a.routes) {
            return false;
        }
        if a.routes.is_empty() && !self.has_bus() {
            return false;
        }
        a.body.cells().all(|c| {
            let above = (c.row > 0).then(|| Coord::new(c.row - 1, c.col));
            let below = (c.row + 1 < self.height).then(|| Coord::new(c.row + 1, c.col));
            [above, below]
                .into_iter()
                .flatten()
                .any(|n| self.served(n, &a.routes))
        })
    }

    pub(crate) fn extern_legal(&self, a: &Attempt) -> bool {
        if !self.body_free(&a.body) || !self.routes_ok(&a.body, &a.routes) {
            return false;
        }
        let below = a.body.row + a.body.height;
        if below >= self.height {
            return false;
        }
        (a.body.col..a.body.col + a.body.width)
            .all(|c| self.served(Coord::new(below, c), &a.routes))
    }

    pub(crate) fn register_attempt(&self, rule: u8, r: u32, c: u32, len: u32) -> Option<Attempt> {
        let h = self.height;
        let (body, mut routes) = match rule {
            1 => {
                if self.has_bus() || r != 0 || c != 0 || h < 2 {
                    return None;
                }
                (Rect::new(0, 0, len, 1), self.row_cells(1, 0, len)?)
            }
            2 => {
                if r != 0 || c == 0 || h < 2 {
                    return None;
                }
                let mut routes = vec![Coord::new(0, c - 1)];
                routes.extend(self.row_cells(1, c - 1, c + len)?);
                if !self.extend_column(&mut routes, c - 1, 2, 1) {
                    return None;
                }
                (Rect::new(0, c, len, 1), routes)
            }
            3 => {
                if r == 0 {
                    return None;
                }
                let above = self.row_cells(r - 1, c, c + len + 1)?;
                if !above.iter().all(|&x| self.is_bus(x)) {
                    return None;
                }
                (Rect::new(r, c + 1, len, 1), vec![Coord::new(r, c)])
            }
            4 => {
                let left_bus = c > 0 && self.is_bus(Coord::new(r, c - 1));
                let up_bus = r > 0 && self.is_bus(Coord::new(r - 1, c));
                if !(left_bus || up_bus) {
                    return None;
                }
                let mut routes = vec![Coord::new(r, c)];
                routes.extend(self.row_cells(r + 1, c, c + len + 1)?);
                (Rect::new(r, c + 1, len, 1), routes)
            }
            5 | 6 => {
                let mut routes = vec![Coord::new(r, c)];
                routes.extend(self.row_cells(r + 1, c, c + len + 1)?);
                let ok = if rule == 5 {
                    self.extend_column(&mut routes, c, r as i64 - 1, -1)
                } else {
                    self.extend_column(&mut routes, c, r as i64 + 2, 1)
                };
                if !ok {
                    return None;
                }
                (Rect::new(r, c + 1, len, 1), routes)
            }
            _ => return None,
        };
        routes.sort_unstable();
        routes.dedup();
        Some(Attempt { body, routes, rule })
    }

    pub(crate) fn extern_attempt(
        &self,
        rule: u8,
        r: u32,
        c: u32,
        w: u32,
        th: u32,
    ) -> Option<Attempt> {
        let y = r + th;
        if y >= self.height {
            return None;
        }
        let body = Rect::new(r, c, w, th);
        let mut routes = match rule {
            1 => {
                if self.has_bus() || r != 0 || c != 0 {
                    return None;
                }
                self.row_cells(y, 0, w)?
            }
            2 => {
                let row = self.row_cells(y, c, c + w)?;
                if !row.iter().all(|&x| self.is_bus(x)) {
                    return None;
                }
                Vec::new()
            }
            3 => self.row_cells(y, c, c + w)?,
            4 | 5 => {
                if r != 0 || c == 0 {
                    return None;
                }
                let mut routes = self.row_cells(y, c - 1, c + w)?;
                let ok = if rule == 4 {
                    self.extend_column(&mut routes, c - 1, y as i64 + 1, 1)
                } else {
                    self.extend_column(&mut routes, c - 1, y as i64 - 1, -1)
                };
                if !ok {
                    return None;
                }
                routes
            }
            6 => {
                let mut routes = self.row_cells(y, c, c + w + 1)?;
                if !self.extend_column(&mut routes, c + w, y as i64 - 1, -1) {
                    return None;
                }
                routes
            }
            7 | 8 => {
                if c == 0 {
                    return None;
                }
                let mut routes = self.row_cells(y, c - 1, c + w)?;
                let ok = if rule == 7 {
                    self.extend_column(&mut routes, c - 1, y as i64 - 1, -1)
                } else {
                    self.extend_column(&mut routes, c - 1, y as i64 + 1, 1)
                };
                if !ok {
                    return None;
                }
                routes
            }
            _ => return None,
        };
        routes.retain(|&x| !self.is_bus(x));
        routes.sort_unstable();
        routes.dedup();
        Some(Attempt { body, routes, rule })
    }

    /// First legal register placement in rule order, scanning positions row-major.
    pub(crate) fn find_register(&self, request: u32) -> Option<Attempt> {
        if request == 0 {
            return None;
        }
        for rule in 1..=REGISTER_RULES {
            for r in 0..self.height {
                for c in 0..self.width {
                    let body_col = if rule <= 2 { c } else { c + 1 };
                    let mut run = 0;
                    while body_col + run < self.width
                        && run < request
                        && self.is_free(Coord::new(r, body_col + run))
                    {
                        run += 1;
                    }
                    for len in (1..=run).rev() {
                        if let Some(a) = self.register_attempt(rule, r, c, len) {
                            if self.register_legal(&a) {
                                return Some(a);
                            }
                        }
                    }
                }
            }
        }
        None
    }

    pub(crate) fn find_extern(&self, width: u32, height: u32) -> Option<Attempt> {
        if width > self.width || height >= self.height {
            return None;
        }
        for rule in 1..=EXTERN_RULES {
            for r in 0..self.height {
                for c in 0..self.width {
                    if let Some(a) = self.extern_attempt(rule, r, c, width, height) {
                        if self.extern_legal(&a) {
                            return Some(a);
                        }
                    }
                }
            }
        }
        None
    }

    /// Commit an attempt: routes join the bus, pending IO routes touching it merge.
    pub(crate) fn commit(
        &mut self,
        a: &Attempt,
        kind: PatchType,
        binding: Option<String>,
    ) -> usize {
        for &c in &a.routes {
            self.set(c, PatchType::Route);
            self.set_pending(c, false);
        }
        let idx = self.add_segment(Segment {
            bounds: a.body,
            kind,
            extern_binding: binding,
        });
        self.absorb_pending();
        idx
    }
}

fn connected(set: &HashSet<Coord>) -> bool {
    let Some(&start) = set.iter().next() else {
        return true;
    };
    let mut seen = HashSet::from([start]);
    let mut stack = vec![start];
    while let Some(c) = stack.pop() {
        for n in [
            c.row.checked_sub(1).map(|r| Coord::new(r, c.col)),
            Some(Coord::new(c.row + 1, c.col)),
            c.col.checked_sub(1).map(|x| Coord::new(c.row, x)),
            Some(Coord::new(c.row, c.col + 1)),
        ]
        .into_iter()
        .flatten()
        {
            if set.contains(&n) && seen.insert(n) {
                stack.push(n);
            }
        }
    }
    seen.len() == set.len()
}
