use alloc::vec;

use super::{GraphError, Topology};
use crate::netmodel::{Network, SwitchId};

/// Minimum spanning tree by Prim's algorithm, grown from the slack bus.
///
/// `weights[i]` is the weight of switch `S(i+1)`. Among equal-weight
/// frontier edges the lowest switch id wins, so the result is deterministic.
pub fn prim_mst(net: &Network, weights: &[f64]) -> Result<Topology, GraphError> {
    let m = net.n_branches();
    if weights.len() != m {
        return Err(GraphError::WeightCount {
            expected: m,
            got: weights.len(),
        });
    }
    let n = net.n_buses();
    let mut in_tree = vec![false; n];
    in_tree[net.slack()] = true;
    let mut closed = vec![false; m];

    for _ in 1..n {
        let mut pick: Option<usize> = None;
        for (i, &w) in weights.iter().enumerate() {
            let (f, t) = net.ends(SwitchId::from_index(i));
            if in_tree[f] == in_tree[t] {
                continue;
            }
            // strict comparison keeps the lowest index on ties
            if pick.is_none_or(|p| w.total_cmp(&weights[p]).is_lt()) {
                pick = Some(i);
            }
        }
        let i = pick.ok_or(GraphError::Disconnected)?;
        let (f, t) = net.ends(SwitchId::from_index(i));
        in_tree[f] = true;
        in_tree[t] = true;
        closed[i] = true;
    }
    Ok(Topology::from_mask(closed))
}
