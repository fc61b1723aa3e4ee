//! Disjoint-path routing: interior route segments that have been idle long
//! enough are pre-established as Bell-pair chains before the operation starts,
//! so they are released for other operations while it runs.

use super::{PathStyle, RoutePath};
use crate::geom::Coord;

/// Minimum run of adjacent idle ancillae worth converting.
pub const MIN_SEGMENT: usize = 3;
/// Ancillae must have been unused for this many cycles to be candidates.
pub const IDLE_CYCLES: u64 = 2;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DisjointSplit {
    /// Cells still held for the whole operation.
    pub direct: RoutePath,
    /// Pre-established segments, each held over `[start - 2e, start)`.
    pub segments: Vec<RoutePath>,
}

/// Convert every run of at least three adjacent interior candidates on
/// `path`. `establish` is the direct establishment cost of a route segment;
/// a converted segment costs twice that. `free(c, a, b)` reports whether a
/// patch is unlocked over `[a, b)`.
pub fn apply_disjoint_paths(
    path: &RoutePath,
    establish: u64,
    free: impl Fn(Coord, u64, u64) -> bool,
) -> DisjointSplit {
    let t = path.start;
    let window = 2 * establish;
    let unchanged = DisjointSplit {
        direct: path.clone(),
        segments: Vec::new(),
    };
    if path.cells.len() < MIN_SEGMENT + 2 || t < window.max(IDLE_CYCLES) {
        return unchanged;
    }
    let candidate = |c: Coord| free(c, t - IDLE_CYCLES, t) && free(c, t - window, t);
    let last = path.cells.len() - 1;
    let mut runs: Vec<(usize, usize)> = Vec::new();
    let mut i = 1;
    while i < last {
        if !candidate(path.cells[i]) {
            i += 1;
            continue;
        }
        let s = i;
        while i < last && candidate(path.cells[i]) {
            i += 1;
        }
        if i - s >= MIN_SEGMENT {
            runs.push((s, i));
        }
    }
    if runs.is_empty() {
        return unchanged;
    }
    let mut direct = Vec::new();
    let mut segments = Vec::new();
    let mut at = 0;
    for (s, e) in runs {
        direct.extend_from_slice(&path.cells[at..s]);
        segments.push(RoutePath {
            cells: path.cells[s..e].to_vec(),
            start: t - window,
            duration: window,
            style: PathStyle::Disjoint,
        });
        at = e;
    }
    direct.extend_from_slice(&path.cells[at..]);
    DisjointSplit {
        direct: RoutePath {
            cells: direct,
            style: PathStyle::Disjoint,
            ..path.clone()
        },
        segments,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: u32, start: u64) -> RoutePath {
        RoutePath {
            cells: (0..n).map(|c| Coord::new(0, c)).collect(),
            start,
            duration: 2,
            style: PathStyle::Direct,
        }
    }

    #[test]
    fn fresh_ancillae_unchanged() {
        let p = path(5, 10);
        let out = apply_disjoint_paths(&p, 1, |_, _, _| false);
        assert_eq!(out.direct, p);
        assert!(out.segments.is_empty());
    }

    #[test]
    fn idle_interior_converted_at_double_cost() {
        let p = path(5, 10);
        let out = apply_disjoint_paths(&p, 1, |_, _, _| true);
        assert_eq!(out.segments.len(), 1);
        let seg = &out.segments[0];
        assert_eq!(seg.cells.len(), 3);
        assert_eq!(seg.duration, 2);
        assert_eq!(seg.start + seg.duration, 10);
        assert_eq!(out.direct.cells, vec![Coord::new(0, 0), Coord::new(0, 4)]);
    }

    #[test]
    fn two_candidates_are_not_enough() {
        let p = path(5, 10);
        let busy = Coord::new(0, 2);
        let out = apply_disjoint_paths(&p, 1, |c, _, _| c != busy);
        assert!(out.segments.is_empty());
    }

    #[test]
    fn too_early_to_back_propagate() {
        let out = apply_disjoint_paths(&path(6, 1), 1, |_, _, _| true);
        assert!(out.segments.is_empty());
    }
}
