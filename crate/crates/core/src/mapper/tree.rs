//! Reduction of the bus to an approximate Steiner tree over the board's
//! segments, with routing-space weights on every branch.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num::{BigRational, One, Zero};

use super::MapError;
use crate::geom::Coord;
use crate::qcb::{PatchType, Qcb};

#[derive(Clone, Debug, PartialEq)]
pub struct TreeNode {
    pub children: Vec<usize>,
    /// Segment index for leaves.
    pub segment: Option<usize>,
    /// Accumulated routing-space weight (leaves only).
    pub weight: BigRational,
    /// Leaf weight, or the maximum of the children's values.
    pub value: BigRational,
    pub allocatable: usize,
    pub allocated: usize,
    /// Smallest patch coordinate below this node, for tie-breaks.
    pub anchor: Coord,
}

impl TreeNode {
    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct RouteTree {
    pub nodes: Vec<TreeNode>,
    pub root: Option<usize>,
}

impl RouteTree {
    pub fn leaves(&self) -> impl Iterator<Item = (usize, &TreeNode)> {
        self.nodes.iter().enumerate().filter(|(_, n)| n.is_leaf())
    }

    fn propagate(&mut self, v: usize, k: BigRational) {
        if self.nodes[v].is_leaf() {
            self.nodes[v].weight += k;
            return;
        }
        let n = BigRational::from_integer(self.nodes[v].children.len().into());
        let share = k / n;
        for c in self.nodes[v].children.clone() {
            self.propagate(c, share.clone());
        }
    }

    fn refresh(&mut self, v: usize) {
        if self.nodes[v].is_leaf() {
            self.nodes[v].value = self.nodes[v].weight.clone();
            return;
        }
        for c in self.nodes[v].children.clone() {
            self.refresh(c);
        }
        let value = self.nodes[v]
            .children
            .iter()
            .map(|&c| self.nodes[c].value.clone())
            .max()
            .unwrap_or_else(BigRational::zero);
        self.nodes[v].value = value;
    }
}

/// Route cells left after repeatedly removing dead-end spurs that serve no segment.
fn pruned_routes(q: &Qcb) -> BTreeSet<Coord> {
    let serves = |c: Coord| {
        q.neighbours(c).any(|n| {
            matches!(
                q.get(n),
                PatchType::Register | PatchType::Extern | PatchType::Io
            )
        })
    };
    let mut live: BTreeSet<Coord> = q.coords().filter(|&c| q.is_bus(c)).collect();
    loop {
        let dead: Vec<Coord> = live
            .iter()
            .copied()
            .filter(|&c| !serves(c) && q.neighbours(c).filter(|n| live.contains(n)).count() <= 1)
            .collect();
        if dead.is_empty() || dead.len() == live.len() {
            return live;
        }
        for c in dead {
            live.remove(&c);
        }
    }
}

/// Build the tree: every segment starts as its own subtree; subtrees grow
/// one layer of route nodes per round, merge where they meet, and every
/// newly consumed route node adds weight 1 below the subtree root, split
/// evenly among children at each internal vertex.
pub fn build_tree(q: &Qcb) -> Result<RouteTree, MapError> {
    let mut tree = RouteTree::default();
    let mut cell_leaf: HashMap<Coord, usize> = HashMap::new();
    for (si, seg) in q.segments.iter().enumerate() {
        if !matches!(
            seg.kind,
            PatchType::Register | PatchType::Extern | PatchType::Io
        ) {
            continue;
        }
        let id = tree.nodes.len();
        let cells: Vec<Coord> = seg.bounds.cells().collect();
        let allocatable = if seg.kind == PatchType::Register {
            cells
                .iter()
                .filter(|&&c| q.get(c) == PatchType::Register)
                .count()
        } else {
            0
        };
        for &c in &cells {
            cell_leaf.insert(c, id);
        }
        tree.nodes.push(TreeNode {
            children: Vec::new(),
            segment: Some(si),
            weight: BigRational::zero(),
            value: BigRational::zero(),
            allocatable,
            allocated: 0,
            anchor: cells.iter().copied().min().unwrap_or_default(),
        });
    }
    let leaves = tree.nodes.len();
    if leaves == 0 {
        return Ok(tree);
    }
    if leaves == 1 {
        tree.root = Some(0);
        return Ok(tree);
    }

    // Route nodes: chains of non-branching cells collapse into one node.
    let live = pruned_routes(q);
    let serves = |c: Coord| q.neighbours(c).any(|n| cell_leaf.contains_key(&n));
    let degree = |c: Coord| q.neighbours(c).filter(|n| live.contains(n)).count();
    let plain = |c: Coord| !serves(c) && degree(c) == 2;
    let mut node_of: HashMap<Coord, usize> = HashMap::new();
    let mut route_nodes: Vec<Vec<Coord>> = Vec::new();
    for &c in &live {
        if node_of.contains_key(&c) {
            continue;
        }
        let id = route_nodes.len();
        let mut members = vec![c];
        node_of.insert(c, id);
        if plain(c) {
            let mut stack = vec![c];
            while let Some(x) = stack.pop() {
                for n in q.neighbours(x) {
                    if live.contains(&n) && plain(n) && !node_of.contains_key(&n) {
                        node_of.insert(n, id);
                        members.push(n);
                        stack.push(n);
                    }
                }
            }
        }
        route_nodes.push(members);
    }
    let mut route_adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); route_nodes.len()];
    for (id, members) in route_nodes.iter().enumerate() {
        for &c in members {
            for n in q.neighbours(c) {
                if let Some(&m) = node_of.get(&n) {
                    if m != id {
                        route_adj[id].insert(m);
                    }
                }
            }
        }
    }
    let mut leaf_adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); leaves];
    for (&c, &leaf) in &cell_leaf {
        for n in q.neighbours(c) {
            if let Some(&m) = node_of.get(&n) {
                leaf_adj[leaf].insert(m);
            }
        }
    }

    let mut parent: Vec<usize> = (0..leaves).collect();
    fn find(parent: &mut [usize], mut v: usize) -> usize {
        while parent[v] != v {
            parent[v] = parent[parent[v]];
            v = parent[v];
        }
        v
    }
    let mut owner: Vec<Option<usize>> = vec![None; route_nodes.len()];
    // Frontier per subtree root: route nodes whose neighbours are explored next.
    let mut frontier: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    let mut first_round = true;
    loop {
        let tops: BTreeSet<usize> = (0..leaves).map(|l| find(&mut parent, l)).collect();
        if tops.len() == 1 {
            break;
        }
        let mut claims: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        let mut flags: Vec<(usize, usize)> = Vec::new();
        let mut flagged: BTreeSet<usize> = BTreeSet::new();
        for &s in &tops {
            let candidates: BTreeSet<usize> = if first_round {
                (0..leaves)
                    .filter(|&l| find(&mut parent, l) == s)
                    .flat_map(|l| leaf_adj[l].iter().copied())
                    .collect()
            } else {
                frontier
                    .get(&s)
                    .map(|f| {
                        f.iter()
                            .flat_map(|&r| route_adj[r].iter().copied())
                            .collect()
                    })
                    .unwrap_or_default()
            };
            for r in candidates {
                match owner[r] {
                    None => {
                        owner[r] = Some(s);
                        claims.entry(s).or_default().push(r);
                    }
                    Some(o) => {
                        let other = find(&mut parent, o);
                        if other != s {
                            flags.push((s, other));
                            flagged.insert(r);
                        }
                    }
                }
            }
        }
        first_round = false;
        if claims.is_empty() && flags.is_empty() {
            return Err(MapError::DisconnectedBus(tops.len()));
        }

        // Merge flagged subtrees into fresh roots.
        let mut groups: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
        {
            let mut uf: HashMap<usize, usize> = tops.iter().map(|&t| (t, t)).collect();
            fn root(uf: &mut HashMap<usize, usize>, mut v: usize) -> usize {
                while uf[&v] != v {
                    v = uf[&v];
                }
                v
            }
            for &(a, b) in &flags {
                let (ra, rb) = (root(&mut uf, a), root(&mut uf, b));
                if ra != rb {
                    uf.insert(ra.max(rb), ra.min(rb));
                }
            }
            for &t in &tops {
                let r = root(&mut uf, t);
                groups.entry(r).or_default().insert(t);
            }
        }
        let mut remap: HashMap<usize, usize> = HashMap::new();
        for members in groups.values().filter(|m| m.len() > 1) {
            let mut children: Vec<usize> = members.iter().copied().collect();
            children.sort_by_key(|&c| tree.nodes[c].anchor);
            let id = tree.nodes.len();
            tree.nodes.push(TreeNode {
                anchor: children
                    .iter()
                    .map(|&c| tree.nodes[c].anchor)
                    .min()
                    .unwrap_or_default(),
                allocatable: children.iter().map(|&c| tree.nodes[c].allocatable).sum(),
                children: children.clone(),
                segment: None,
                weight: BigRational::zero(),
                value: BigRational::zero(),
                allocated: 0,
            });
            parent.push(id);
            for &c in &children {
                parent[c] = id;
                remap.insert(c, id);
            }
            tree.propagate(id, BigRational::one());
        }
        let mut next: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (s, rs) in claims {
            let top = find(&mut parent, s);
            for r in rs {
                if !flagged.contains(&r) {
                    tree.propagate(top, BigRational::one());
                }
                next.entry(top).or_default().push(r);
            }
        }
        frontier = next;
    }
    let root = find(&mut parent, 0);
    tree.refresh(root);
    tree.root = Some(root);
    Ok(tree)
}
