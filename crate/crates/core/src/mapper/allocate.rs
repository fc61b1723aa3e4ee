//! Contention-ordered, round-robin assignment of symbols to register segments.

use std::collections::{BTreeMap, BTreeSet};

use super::{MapError, QubitMap, RouteTree};
use crate::geom::Coord;
use crate::ir::{CircuitDag, RegisterSymbol};
use crate::qcb::{PatchType, Qcb, Segment};

/// Number of DAG nodes in which each unordered symbol pair co-occurs.
pub fn contention(dag: &CircuitDag) -> BTreeMap<(RegisterSymbol, RegisterSymbol), usize> {
    let mut out = BTreeMap::new();
    for node in &dag.nodes {
        let ops: BTreeSet<&RegisterSymbol> = node.operands.iter().collect();
        let ops: Vec<_> = ops.into_iter().collect();
        for i in 0..ops.len() {
            for j in i + 1..ops.len() {
                *out.entry((ops[i].clone(), ops[j].clone())).or_insert(0) += 1;
            }
        }
    }
    out
}

/// Most contended symbol first, followed by its contenders by pair count;
/// repeated until every data symbol is ordered.
fn allocation_order(dag: &CircuitDag) -> Vec<RegisterSymbol> {
    let pairs = contention(dag);
    let mut total: BTreeMap<&RegisterSymbol, usize> = BTreeMap::new();
    let mut with: BTreeMap<&RegisterSymbol, Vec<(&RegisterSymbol, usize)>> = BTreeMap::new();
    for ((a, b), &n) in &pairs {
        *total.entry(a).or_default() += n;
        *total.entry(b).or_default() += n;
        with.entry(a).or_default().push((b, n));
        with.entry(b).or_default().push((a, n));
    }
    let data = dag.data_symbols();
    let mut remaining: BTreeSet<&RegisterSymbol> = data.iter().collect();
    let mut order = Vec::with_capacity(data.len());
    while !remaining.is_empty() {
        let head = *remaining
            .iter()
            .max_by(|a, b| {
                let (ta, tb) = (
                    total.get(*a).copied().unwrap_or(0),
                    total.get(*b).copied().unwrap_or(0),
                );
                ta.cmp(&tb).then_with(|| b.cmp(a))
            })
            .expect("non-empty");
        remaining.remove(head);
        order.push(head.clone());
        let mut peers = with.get(head).cloned().unwrap_or_default();
        peers.sort_by(|x, y| y.1.cmp(&x.1).then_with(|| x.0.cmp(y.0)));
        for (p, _) in peers {
            if remaining.remove(p) {
                order.push(p.clone());
            }
        }
    }
    order
}

/// Walk from the root to a leaf, at each vertex taking the open child with
/// the fewest allocations, then the highest routing score, then the lowest
/// anchor. Allocation counts are bumped along the path.
fn descend(tree: &mut RouteTree) -> Option<usize> {
    let mut v = tree.root?;
    loop {
        if tree.nodes[v].allocated >= tree.nodes[v].allocatable {
            return None;
        }
        tree.nodes[v].allocated += 1;
        if tree.nodes[v].is_leaf() {
            return Some(v);
        }
        let next = tree.nodes[v]
            .children
            .iter()
            .copied()
            .filter(|&c| tree.nodes[c].allocated < tree.nodes[c].allocatable)
            .min_by(|&a, &b| {
                let (na, nb) = (&tree.nodes[a], &tree.nodes[b]);
                na.allocated
                    .cmp(&nb.allocated)
                    .then_with(|| nb.value.cmp(&na.value))
                    .then_with(|| na.anchor.cmp(&nb.anchor))
            })?;
        v = next;
    }
}

/// Assign every circuit symbol a patch. IO symbols go to IO patches left to
/// right; data symbols descend the tree in contention order and are then
/// spread within their register run.
pub fn allocate_symbols(
    tree: &mut RouteTree,
    qcb: &Qcb,
    dag: &CircuitDag,
) -> Result<QubitMap, MapError> {
    let mut map = QubitMap::default();
    let io_cells = qcb.io_cells();
    if io_cells.len() != dag.io.len() {
        return Err(MapError::IoMismatch {
            circuit: dag.io.len(),
            board: io_cells.len(),
        });
    }
    for (io, &c) in dag.io.iter().zip(&io_cells) {
        map.insert(io.symbol.clone(), c);
    }
    let order = allocation_order(dag);
    let capacity = tree.root.map(|r| tree.nodes[r].allocatable).unwrap_or(0);
    if order.len() > capacity {
        return Err(MapError::InsufficientRegisters {
            symbols: order.len(),
            capacity,
        });
    }
    let mut per_segment: BTreeMap<usize, Vec<RegisterSymbol>> = BTreeMap::new();
    for s in order {
        let leaf = descend(tree).ok_or(MapError::InsufficientRegisters {
            symbols: dag.data_symbols().len(),
            capacity,
        })?;
        let seg = tree.nodes[leaf].segment.expect("leaves carry segments");
        per_segment.entry(seg).or_default().push(s);
    }
    for (seg, syms) in per_segment {
        for (s, c) in place_within_register(qcb, &qcb.segments[seg], &syms)? {
            map.insert(s, c);
        }
    }
    Ok(map)
}

/// Repeatedly split the largest free run of the register at its midpoint.
pub fn place_within_register(
    qcb: &Qcb,
    segment: &Segment,
    symbols: &[RegisterSymbol],
) -> Result<Vec<(RegisterSymbol, Coord)>, MapError> {
    let cells: Vec<Coord> = segment
        .bounds
        .cells()
        .filter(|&c| qcb.get(c) == PatchType::Register)
        .collect();
    if symbols.len() > cells.len() {
        return Err(MapError::Overflow {
            symbols: symbols.len(),
            length: cells.len(),
        });
    }
    Ok(bisect(cells.len(), symbols.len())
        .into_iter()
        .zip(symbols)
        .map(|(i, s)| (s.clone(), cells[i]))
        .collect())
}

/// Indices chosen by greedy bisection of a run of `len` slots.
fn bisect(len: usize, count: usize) -> Vec<usize> {
    let mut runs = vec![(0usize, len)];
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let (k, &(start, n)) = runs
            .iter()
            .enumerate()
            .max_by(|a, b| a.1 .1.cmp(&b.1 .1).then_with(|| b.1 .0.cmp(&a.1 .0)))
            .expect("free run remains");
        let pos = start + (n - 1) / 2;
        out.push(pos);
        runs.remove(k);
        if pos > start {
            runs.push((start, pos - start));
        }
        if start + n > pos + 1 {
            runs.push((pos + 1, start + n - pos - 1));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::device::GateCosts;
    use crate::ir::Op;
    use crate::mapper::build_tree;
    use crate::qcb::fixtures::board;

    fn sym(i: u32) -> RegisterSymbol {
        RegisterSymbol::new("q", i)
    }

    fn dag(n: u32, ops: &[(&str, &[u32])]) -> CircuitDag {
        let mut d = CircuitDag::empty(GateCosts::default());
        d.symbols = (0..n).map(sym).collect();
        d.rebuild(
            ops.iter()
                .map(|(o, a)| Op::new(o, a.iter().map(|&i| sym(i)).collect()))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn bisection() {
        assert_eq!(bisect(5, 1), vec![2]);
        assert_eq!(bisect(4, 2), vec![1, 2]);
        let mut all = bisect(6, 6);
        all.sort();
        assert_eq!(all, (0..6).collect::<Vec<_>>());
    }

    #[test]
    fn two_symbols_equal_leaves_are_split() {
        let q = board(&["RLR", "BBB"]);
        let mut t = build_tree(&q).unwrap();
        let d = dag(2, &[("CNOT", &[0, 1])]);
        let m = allocate_symbols(&mut t, &q, &d).unwrap();
        assert_ne!(m.get(&sym(0)).unwrap().col, m.get(&sym(1)).unwrap().col);
        assert!(m.is_injective());
    }

    #[test]
    fn round_robin_balance() {
        let q = board(&["RRRLRRR", "BBBBBBB"]);
        let mut t = build_tree(&q).unwrap();
        let d = dag(4, &[]);
        let m = allocate_symbols(&mut t, &q, &d).unwrap();
        let left = m.entries.values().filter(|p| p.patch.col < 3).count();
        assert_eq!(left, 2);
    }

    #[test]
    fn contention_order_puts_hot_symbol_first() {
        let d = dag(
            3,
            &[("CNOT", &[1, 2]), ("CNOT", &[1, 0]), ("CNOT", &[2, 1])],
        );
        let order = allocation_order(&d);
        assert_eq!(order, vec![sym(1), sym(2), sym(0)]);
    }

    #[test]
    fn overflow_detected() {
        let q = board(&["R", "B"]);
        let mut t = build_tree(&q).unwrap();
        assert!(matches!(
            allocate_symbols(&mut t, &q, &dag(2, &[])),
            Err(MapError::InsufficientRegisters { .. })
        ));
    }
}
