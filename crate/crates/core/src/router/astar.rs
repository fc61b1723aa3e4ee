//! Multi-source, multi-target A* over free route patches.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap, HashSet};

use crate::geom::Coord;
use crate::qcb::Qcb;

/// Shortest path from any source to any target, both inclusive, stepping
/// only on patches accepted by `passable`. Sources are trusted as given.
/// Cost is the number of patches; the heuristic is the Manhattan distance to
/// the nearest target; ties prefer the lower row, then the lower column.
pub fn find_path(
    q: &Qcb,
    passable: impl Fn(Coord) -> bool,
    sources: &[Coord],
    targets: &[Coord],
) -> Option<Vec<Coord>> {
    let goal: HashSet<Coord> = targets.iter().copied().filter(|&c| passable(c)).collect();
    if goal.is_empty() || sources.is_empty() {
        return None;
    }
    let h = |c: Coord| goal.iter().map(|&g| c.manhattan(g)).min().unwrap_or(0) as u64;
    let mut g: HashMap<Coord, u64> = HashMap::new();
    let mut prev: HashMap<Coord, Coord> = HashMap::new();
    let mut open = BinaryHeap::new();
    for &s in sources {
        if g.insert(s, 1).is_none() {
            open.push(Reverse((1 + h(s), s.row, s.col)));
        }
    }
    let mut closed: HashSet<Coord> = HashSet::new();
    while let Some(Reverse((_, row, col))) = open.pop() {
        let c = Coord::new(row, col);
        if !closed.insert(c) {
            continue;
        }
        if goal.contains(&c) {
            let mut path = vec![c];
            let mut at = c;
            while let Some(&p) = prev.get(&at) {
                path.push(p);
                at = p;
            }
            path.reverse();
            return Some(path);
        }
        let gc = g[&c];
        for n in q.neighbours(c) {
            if closed.contains(&n) || !passable(n) {
                continue;
            }
            let gn = gc + 1;
            if g.get(&n).is_none_or(|&old| gn < old) {
                g.insert(n, gn);
                prev.insert(n, c);
                open.push(Reverse((gn + h(n), n.row, n.col)));
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcb::fixtures::board;

    #[test]
    fn shared_cell_is_length_one() {
        let q = board(&["RR", "BB"]);
        let p = find_path(
            &q,
            |c| q.is_bus(c),
            &[Coord::new(1, 0)],
            &[Coord::new(1, 0)],
        )
        .unwrap();
        assert_eq!(p, vec![Coord::new(1, 0)]);
    }

    #[test]
    fn corridor_length_matches_manhattan() {
        let q = board(&["RRRRR", "BBBBB"]);
        let p = find_path(
            &q,
            |c| q.is_bus(c),
            &[Coord::new(1, 0)],
            &[Coord::new(1, 4)],
        )
        .unwrap();
        assert_eq!(p.len(), 5);
        assert!(p.windows(2).all(|w| w[0].is_adjacent(w[1])));
    }

    #[test]
    fn blocked_corridor() {
        let q = board(&["RRRRR", "BBBBB"]);
        let p = find_path(
            &q,
            |c| q.is_bus(c) && c != Coord::new(1, 2),
            &[Coord::new(1, 0)],
            &[Coord::new(1, 4)],
        );
        assert!(p.is_none());
    }

    #[test]
    fn tie_break_prefers_upper_row() {
        let q = board(&["BBB", "BRB", "BBB"]);
        let p = find_path(
            &q,
            |c| q.is_bus(c),
            &[Coord::new(1, 0)],
            &[Coord::new(1, 2)],
        )
        .unwrap();
        assert_eq!(p.len(), 5);
        assert_eq!(p[1], Coord::new(0, 0));
    }
}
