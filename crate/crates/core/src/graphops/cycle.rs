use alloc::vec;
use alloc::vec::Vec;

use super::{GraphError, SectorLoop, Topology};
use crate::netmodel::{Network, SwitchId};

/// The sector loop created by closing `trigger` on the radial `tree`.
pub fn fundamental_cycle(
    net: &Network,
    tree: &Topology,
    trigger: SwitchId,
) -> Result<SectorLoop, GraphError> {
    if !tree.is_radial(net) {
        return Err(GraphError::NotRadial);
    }
    if tree.is_closed(trigger) {
        return Err(GraphError::TriggerClosed(trigger));
    }
    let n = net.n_buses();
    let mut adj: Vec<Vec<(usize, SwitchId)>> = vec![Vec::new(); n];
    for s in tree.closed() {
        let (f, t) = net.ends(s);
        adj[f].push((t, s));
        adj[t].push((f, s));
    }

    let (start, goal) = net.ends(trigger);
    // parent edge on the search tree rooted at `start`
    let mut via: Vec<Option<(usize, SwitchId)>> = vec![None; n];
    let mut seen = vec![false; n];
    seen[start] = true;
    let mut stack = vec![start];
    while let Some(u) = stack.pop() {
        if u == goal {
            break;
        }
        for &(v, s) in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                via[v] = Some((u, s));
                stack.push(v);
            }
        }
    }

    let mut path = Vec::new();
    let mut at = goal;
    while at != start {
        let (prev, s) = via[at].ok_or(GraphError::NotRadial)?;
        path.push(s);
        at = prev;
    }
    path.reverse();

    let mut loop_edges = Vec::with_capacity(path.len() + 1);
    loop_edges.push(trigger);
    loop_edges.extend(path);
    Ok(SectorLoop { trigger, loop_edges })
}
