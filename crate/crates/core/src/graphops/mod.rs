//! Graph algorithms over the switch graph: Prim trees, fundamental cycles,
//! spanning-tree counting and enumeration.

mod cycle;
mod prim;
mod trees;

pub use cycle::fundamental_cycle;
pub use prim::prim_mst;
pub use trees::{count_spanning_trees, enumerate_spanning_trees, SpanningTrees};

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::netmodel::{Network, SwitchId};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GraphError {
    Disconnected,
    NotRadial,
    TriggerClosed(SwitchId),
    WeightCount { expected: usize, got: usize },
    CountOverflow,
}

impl fmt::Display for GraphError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphError::Disconnected => f.write_str("network graph is disconnected"),
            GraphError::NotRadial => f.write_str("topology is not radial"),
            GraphError::TriggerClosed(s) => write!(f, "trigger switch {s} is already closed"),
            GraphError::WeightCount { expected, got } => {
                write!(f, "expected {expected} branch weights, got {got}")
            }
            GraphError::CountOverflow => f.write_str("spanning-tree count overflows i128"),
        }
    }
}

impl core::error::Error for GraphError {}

/// Switch configuration: which branches are closed. Everything else is open.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Topology {
    closed: Vec<bool>,
}

impl Topology {
    pub fn all_closed(n_switches: usize) -> Self {
        Topology {
            closed: vec![true; n_switches],
        }
    }

    pub fn from_closed(n_switches: usize, closed: impl IntoIterator<Item = SwitchId>) -> Self {
        let mut mask = vec![false; n_switches];
        for s in closed {
            mask[s.index()] = true;
        }
        Topology { closed: mask }
    }

    pub fn from_open(n_switches: usize, open: impl IntoIterator<Item = SwitchId>) -> Self {
        let mut t = Topology::all_closed(n_switches);
        for s in open {
            t.closed[s.index()] = false;
        }
        t
    }

    pub fn from_mask(closed: Vec<bool>) -> Self {
        Topology { closed }
    }

    pub fn mask(&self) -> &[bool] {
        &self.closed
    }

    pub fn n_switches(&self) -> usize {
        self.closed.len()
    }

    pub fn n_closed(&self) -> usize {
        self.closed.iter().filter(|&&c| c).count()
    }

    pub fn is_closed(&self, s: SwitchId) -> bool {
        self.closed[s.index()]
    }

    pub fn closed(&self) -> impl Iterator<Item = SwitchId> + '_ {
        self.ids(true)
    }

    pub fn open(&self) -> impl Iterator<Item = SwitchId> + '_ {
        self.ids(false)
    }

    fn ids(&self, state: bool) -> impl Iterator<Item = SwitchId> + '_ {
        self.closed
            .iter()
            .enumerate()
            .filter(move |(_, &c)| c == state)
            .map(|(i, _)| SwitchId::from_index(i))
    }

    /// Canonical key: ascending open switch ids.
    pub fn open_set(&self) -> OpenSet {
        OpenSet(self.open().collect())
    }

    /// Copy with `close` closed and `open` opened.
    pub fn swapped(&self, close: SwitchId, open: SwitchId) -> Topology {
        let mut t = self.clone();
        t.closed[close.index()] = true;
        t.closed[open.index()] = false;
        t
    }

    /// `n_bus - 1` closed branches that connect every bus.
    pub fn is_radial(&self, net: &Network) -> bool {
        self.closed.len() == net.n_branches()
            && self.n_closed() + 1 == net.n_buses()
            && net.is_connected_with(|i| self.closed[i])
    }

    /// Every bus reachable from the slack through closed branches.
    pub fn is_connected(&self, net: &Network) -> bool {
        self.closed.len() == net.n_branches() && net.is_connected_with(|i| self.closed[i])
    }
}

/// Sorted list of open switches; the identity of a radial topology.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OpenSet(pub Vec<SwitchId>);

impl fmt::Display for OpenSet {
    /// Dash-separated switch numbers, e.g. `1-4-5-8`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("-")?;
            }
            write!(f, "{}", s.0)?;
        }
        Ok(())
    }
}

/// The cycle formed by closing one open switch on a radial tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SectorLoop {
    pub trigger: SwitchId,
    /// Trigger first, then the tree path from the trigger's from-bus to its
    /// to-bus.
    pub loop_edges: Vec<SwitchId>,
}

/// Union-find over bus positions.
#[derive(Debug, Clone)]
pub(crate) struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    pub(crate) fn new(n: usize) -> Self {
        Dsu {
            parent: (0..n).collect(),
        }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false if `a` and `b` were already joined.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra] = rb;
        true
    }
}


#[cfg(test)]
mod tests {
    use super::*;
    use alloc::format;

    #[test]
    fn topology_sets_partition_switches() {
        let t = Topology::from_open(5, [SwitchId(2), SwitchId(5)]);
        let closed: Vec<_> = t.closed().collect();
        let open: Vec<_> = t.open().collect();
        assert_eq!(closed, [SwitchId(1), SwitchId(3), SwitchId(4)]);
        assert_eq!(open, [SwitchId(2), SwitchId(5)]);
        assert_eq!(format!("{}", t.open_set()), "2-5");
    }

    #[test]
    fn radial_check() {
        let net = test_nets::triangle();
        assert!(Topology::from_open(3, [SwitchId(3)]).is_radial(&net));
        assert!(!Topology::all_closed(3).is_radial(&net));
        assert!(!Topology::from_open(3, [SwitchId(1), SwitchId(2)]).is_radial(&net));
    }
}
