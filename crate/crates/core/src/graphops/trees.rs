use alloc::vec;
use alloc::vec::Vec;

use super::{Dsu, GraphError, Topology};
use crate::netmodel::{Network, SwitchId};

/// Number of spanning trees (matrix-tree theorem).
///
/// Computes the determinant of the Laplacian with the slack row and column
/// removed, using fraction-free Bareiss elimination on exact integers.
/// Parallel branches count as distinct edges.
pub fn count_spanning_trees(net: &Network) -> Result<u128, GraphError> {
    let n = net.n_buses();
    if n == 1 {
        return Ok(1);
    }
    let mut lap = vec![vec![0i128; n]; n];
    for s in net.switch_ids() {
        let (f, t) = net.ends(s);
        lap[f][f] += 1;
        lap[t][t] += 1;
        lap[f][t] -= 1;
        lap[t][f] -= 1;
    }
    let drop = net.slack();
    let mut a: Vec<Vec<i128>> = lap
        .into_iter()
        .enumerate()
        .filter(|&(i, _)| i != drop)
        .map(|(_, row)| {
            row.into_iter()
                .enumerate()
                .filter(|&(j, _)| j != drop)
                .map(|(_, v)| v)
                .collect()
        })
        .collect();

    let k = n - 1;
    let mut sign = 1i128;
    let mut prev = 1i128;
    for p in 0..k {
        if a[p][p] == 0 {
            match (p + 1..k).find(|&r| a[r][p] != 0) {
                Some(r) => {
                    a.swap(p, r);
                    sign = -sign;
                }
                None => return Ok(0),
            }
        }
        for i in p + 1..k {
            for j in p + 1..k {
                let lhs = a[i][j].checked_mul(a[p][p]).ok_or(GraphError::CountOverflow)?;
                let rhs = a[i][p].checked_mul(a[p][j]).ok_or(GraphError::CountOverflow)?;
                let num = lhs.checked_sub(rhs).ok_or(GraphError::CountOverflow)?;
                // Bareiss guarantees exact division
                a[i][j] = num / prev;
            }
            a[i][p] = 0;
        }
        prev = a[p][p];
    }
    let det = sign * a[k - 1][k - 1];
    u128::try_from(det).map_err(|_| GraphError::CountOverflow)
}

/// Lazily yields every spanning tree of the network exactly once.
pub fn enumerate_spanning_trees(net: &Network) -> SpanningTrees<'_> {
    SpanningTrees::new(net)
}

/// Include/exclude recursion over branches in switch order, run with an
/// explicit stack. A branch may be included only if it closes no cycle and
/// excluded only if the chosen plus undecided branches still connect every
/// bus, so every leaf is a spanning tree.
#[derive(Debug, Clone)]
pub struct SpanningTrees<'a> {
    net: &'a Network,
    stack: Vec<Frame>,
}

#[derive(Debug, Clone)]
struct Frame {
    next: usize,
    chosen: Vec<bool>,
    n_chosen: usize,
}

impl<'a> SpanningTrees<'a> {
    fn new(net: &'a Network) -> Self {
        SpanningTrees {
            net,
            stack: vec![Frame {
                next: 0,
                chosen: vec![false; net.n_branches()],
                n_chosen: 0,
            }],
        }
    }

    fn acyclic_with(&self, chosen: &[bool], extra: usize) -> bool {
        let mut dsu = Dsu::new(self.net.n_buses());
        for (i, _) in chosen.iter().enumerate().filter(|(_, &c)| c) {
            let (f, t) = self.net.ends(SwitchId::from_index(i));
            dsu.union(f, t);
        }
        let (f, t) = self.net.ends(SwitchId::from_index(extra));
        dsu.find(f) != dsu.find(t)
    }

    fn connected_without(&self, chosen: &[bool], skip: usize) -> bool {
        self.net
            .is_connected_with(|i| chosen[i] || i > skip)
    }
}

impl Iterator for SpanningTrees<'_> {
    type Item = Topology;

    fn next(&mut self) -> Option<Topology> {
        let target = self.net.n_buses() - 1;
        while let Some(frame) = self.stack.pop() {
            if frame.n_chosen == target {
                return Some(Topology::from_mask(frame.chosen));
            }
            let i = frame.next;
            if i == frame.chosen.len() {
                continue;
            }
            if self.connected_without(&frame.chosen, i) {
                self.stack.push(Frame {
                    next: i + 1,
                    chosen: frame.chosen.clone(),
                    n_chosen: frame.n_chosen,
                });
            }
            if self.acyclic_with(&frame.chosen, i) {
                let mut chosen = frame.chosen;
                chosen[i] = true;
                self.stack.push(Frame {
                    next: i + 1,
                    chosen,
                    n_chosen: frame.n_chosen + 1,
                });
            }
        }
        None
    }
}
