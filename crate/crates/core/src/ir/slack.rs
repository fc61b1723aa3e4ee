use super::CircuitDag;

/// Earliest and latest start of every node under the resource-unlimited
/// longest-path schedule over data edges. Edges always point forward in
/// node order, so a single pass each way suffices.
fn windows(dag: &CircuitDag) -> (Vec<u64>, Vec<u64>, u64) {
    let n = dag.nodes.len();
    let (preds, succs) = dag.adjacency(false);
    let cyc: Vec<u64> = dag.nodes.iter().map(|x| x.cycles).collect();
    let mut es = vec![0u64; n];
    for v in 0..n {
        es[v] = preds[v].iter().map(|&p| es[p] + cyc[p]).max().unwrap_or(0);
    }
    let makespan = (0..n).map(|v| es[v] + cyc[v]).max().unwrap_or(0);
    let mut ls = vec![0u64; n];
    for v in (0..n).rev() {
        let finish = succs[v].iter().map(|&s| ls[s]).min().unwrap_or(makespan);
        ls[v] = finish - cyc[v];
    }
    (es, ls, makespan)
}

pub(crate) fn assign_slack(dag: &mut CircuitDag) {
    debug_assert!(dag.edges.iter().all(|&(a, b)| a < b));
    let (es, ls, _) = windows(dag);
    for (i, node) in dag.nodes.iter_mut().enumerate() {
        node.slack = ls[i] - es[i];
    }
}

/// Set `slack` on every node: latest start minus earliest start.
pub fn compute_slack(dag: &CircuitDag) -> CircuitDag {
    let mut out = dag.clone();
    assign_slack(&mut out);
    out
}

/// Makespan with unlimited resources.
pub fn critical_path_length(dag: &CircuitDag) -> u64 {
    windows(dag).2
}
