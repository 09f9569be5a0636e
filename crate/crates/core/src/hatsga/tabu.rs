use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::graphops::{GraphError, OpenSet, Topology};
use crate::netmodel::Network;

#[derive(Debug, Clone, PartialEq)]
pub struct TabuEntry {
    pub open: OpenSet,
    pub topology: Topology,
    /// Infinite when the power flow did not converge.
    pub loss_mw: f64,
}

/// Every radial topology evaluated during one search, keyed by its open
/// switch set, in evaluation order. Entries are never removed.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TabuList {
    entries: Vec<TabuEntry>,
    index: BTreeMap<OpenSet, usize>,
    best: Option<usize>,
}

impl TabuList {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn contains(&self, open: &OpenSet) -> bool {
        self.index.contains_key(open)
    }

    pub fn loss_of(&self, open: &OpenSet) -> Option<f64> {
        self.index.get(open).map(|&i| self.entries[i].loss_mw)
    }

    /// Records an evaluated topology. Returns `Ok(false)` without touching
    /// the list when its open set is already present.
    pub fn insert(
        &mut self,
        net: &Network,
        topology: Topology,
        loss_mw: f64,
    ) -> Result<bool, GraphError> {
        if !topology.is_radial(net) {
            return Err(GraphError::NotRadial);
        }
        let open = topology.open_set();
        if self.index.contains_key(&open) {
            return Ok(false);
        }
        let pos = self.entries.len();
        self.index.insert(open.clone(), pos);
        self.entries.push(TabuEntry {
            open,
            topology,
            loss_mw,
        });
        // first strictly better entry wins
        if self.best.is_none_or(|b| loss_mw < self.entries[b].loss_mw) {
            self.best = Some(pos);
        }
        Ok(true)
    }

    pub fn entries(&self) -> &[TabuEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn best(&self) -> Option<&TabuEntry> {
        self.best.map(|i| &self.entries[i])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphops::test_nets::triangle;
    use crate::netmodel::SwitchId;

    #[test]
    fn dedup_and_best() {
        let net = triangle();
        let mut tabu = TabuList::new();
        let t3 = Topology::from_open(3, [SwitchId(3)]);
        let t1 = Topology::from_open(3, [SwitchId(1)]);
        assert_eq!(tabu.insert(&net, t3.clone(), 5.0), Ok(true));
        assert_eq!(tabu.insert(&net, t3.clone(), 1.0), Ok(false));
        assert_eq!(tabu.loss_of(&t3.open_set()), Some(5.0));
        assert_eq!(tabu.insert(&net, t1.clone(), 2.0), Ok(true));
        assert_eq!(tabu.len(), 2);
        assert_eq!(tabu.best().unwrap().topology, t1);
        for e in tabu.entries() {
            assert!(tabu.best().unwrap().loss_mw <= e.loss_mw);
        }
    }

    #[test]
    fn rejects_meshed() {
        let net = triangle();
        let mut tabu = TabuList::new();
        assert_eq!(
            tabu.insert(&net, Topology::all_closed(3), 1.0),
            Err(GraphError::NotRadial)
        );
        assert!(tabu.is_empty());
    }

    #[test]
    fn infinite_losses_never_displace_best() {
        let net = triangle();
        let mut tabu = TabuList::new();
        tabu.insert(&net, Topology::from_open(3, [SwitchId(3)]), f64::INFINITY).unwrap();
        tabu.insert(&net, Topology::from_open(3, [SwitchId(2)]), 4.0).unwrap();
        tabu.insert(&net, Topology::from_open(3, [SwitchId(1)]), f64::INFINITY).unwrap();
        assert_eq!(tabu.best().unwrap().loss_mw, 4.0);
    }
}
