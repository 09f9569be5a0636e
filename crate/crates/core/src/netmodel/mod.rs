//! Bus/branch network model.
//!
//! Buses carry the vertex parameters (kind, voltage setpoint, load,
//! generation, reactive limits, shunt) and branches carry the edge
//! parameters (impedance, charging, tap, rating, priority, switch state).
//! Loads and generation are kept in physical units (MW / MVAr); impedances
//! are per-unit on [`Network::base_mva`].

mod admittance;

pub use admittance::{branch_stamp, build_admittance, AdmittanceMatrix};

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;

/// 1-based switch label. Switch `S1` sits on the first branch of the network.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SwitchId(pub usize);

impl SwitchId {
    /// Builds the label for a 0-based branch index.
    pub fn from_index(index: usize) -> Self {
        SwitchId(index + 1)
    }

    /// 0-based branch index.
    pub fn index(self) -> usize {
        self.0 - 1
    }
}

impl fmt::Display for SwitchId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "S{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BusKind {
    /// Reference bus; fixed magnitude and angle.
    Slack,
    /// PV bus.
    Generator,
    /// PQ bus.
    Load,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BusRecord {
    /// 1-based bus number as written in the network file.
    pub id: usize,
    pub kind: BusKind,
    /// Voltage magnitude setpoint (pu).
    pub v_mag: f64,
    /// Voltage angle (radians).
    pub v_ang: f64,
    pub p_load: f64,
    pub q_load: f64,
    pub p_gen: f64,
    pub q_gen: f64,
    pub q_min: f64,
    pub q_max: f64,
    /// Shunt susceptance (pu).
    pub shunt_b: f64,
}

impl BusRecord {
    /// A load bus at 1.0 pu with the given demand and nothing else.
    pub fn load(id: usize, p_load: f64, q_load: f64) -> Self {
        BusRecord {
            id,
            kind: BusKind::Load,
            v_mag: 1.0,
            v_ang: 0.0,
            p_load,
            q_load,
            p_gen: 0.0,
            q_gen: 0.0,
            q_min: f64::NEG_INFINITY,
            q_max: f64::INFINITY,
            shunt_b: 0.0,
        }
    }

    pub fn slack(id: usize, v_mag: f64) -> Self {
        BusRecord {
            kind: BusKind::Slack,
            v_mag,
            ..BusRecord::load(id, 0.0, 0.0)
        }
    }

    pub fn generator(id: usize, v_mag: f64, p_gen: f64) -> Self {
        BusRecord {
            kind: BusKind::Generator,
            v_mag,
            p_gen,
            ..BusRecord::load(id, 0.0, 0.0)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SwitchState {
    Open,
    Closed,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BranchRecord {
    pub switch_id: SwitchId,
    /// Bus numbers (the `id` field of [`BusRecord`]), not positions.
    pub from_bus: usize,
    pub to_bus: usize,
    pub r: f64,
    pub x: f64,
    /// Half the total line charging susceptance (pu).
    pub b_half: f64,
    /// Off-nominal tap ratio on the from side; 1.0 for a plain line.
    pub tap: f64,
    /// Thermal rating (MVA); 0 means unrated.
    pub limit: f64,
    pub priority: u32,
    pub default_state: SwitchState,
}

impl BranchRecord {
    /// A closed plain line with unit priority. The switch id is assigned by
    /// [`Network::new`].
    pub fn line(from_bus: usize, to_bus: usize, r: f64, x: f64) -> Self {
        BranchRecord {
            switch_id: SwitchId(0),
            from_bus,
            to_bus,
            r,
            x,
            b_half: 0.0,
            tap: 1.0,
            limit: 0.0,
            priority: 1,
            default_state: SwitchState::Closed,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum NetworkError {
    Empty,
    DuplicateBus(usize),
    NoSlack,
    MultipleSlack,
    InvalidBus { bus: usize, reason: &'static str },
    UnknownBus { branch: SwitchId, bus: usize },
    InvalidBranch { branch: SwitchId, reason: &'static str },
    Disconnected,
}

impl fmt::Display for NetworkError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NetworkError::Empty => f.write_str("network has no buses"),
            NetworkError::DuplicateBus(id) => write!(f, "duplicate bus id {id}"),
            NetworkError::NoSlack => f.write_str("no slack bus"),
            NetworkError::MultipleSlack => f.write_str("multiple slack buses"),
            NetworkError::InvalidBus { bus, reason } => write!(f, "bus {bus}: {reason}"),
            NetworkError::UnknownBus { branch, bus } => {
                write!(f, "branch {branch} references unknown bus {bus}")
            }
            NetworkError::InvalidBranch { branch, reason } => write!(f, "branch {branch}: {reason}"),
            NetworkError::Disconnected => f.write_str("network graph is disconnected"),
        }
    }
}

impl core::error::Error for NetworkError {}

/// A validated network. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    buses: Vec<BusRecord>,
    branches: Vec<BranchRecord>,
    base_mva: f64,
    /// bus id -> position in `buses`
    bus_pos: BTreeMap<usize, usize>,
    /// (from, to) bus positions per branch
    ends: Vec<(usize, usize)>,
    slack: usize,
}

impl Network {
    /// Validates and builds a network. Switch ids are reassigned from branch
    /// order: the first branch becomes `S1`.
    pub fn new(
        buses: Vec<BusRecord>,
        mut branches: Vec<BranchRecord>,
        base_mva: f64,
    ) -> Result<Self, NetworkError> {
        if buses.is_empty() {
            return Err(NetworkError::Empty);
        }
        let mut bus_pos = BTreeMap::new();
        let mut slack = None;
        for (pos, bus) in buses.iter().enumerate() {
            if bus_pos.insert(bus.id, pos).is_some() {
                return Err(NetworkError::DuplicateBus(bus.id));
            }
            if bus.kind == BusKind::Slack {
                if slack.is_some() {
                    return Err(NetworkError::MultipleSlack);
                }
                slack = Some(pos);
            }
            if bus.kind != BusKind::Load && !(bus.v_mag > 0.0) {
                return Err(NetworkError::InvalidBus {
                    bus: bus.id,
                    reason: "voltage setpoint must be positive",
                });
            }
            if bus.q_min > bus.q_max {
                return Err(NetworkError::InvalidBus {
                    bus: bus.id,
                    reason: "q_min exceeds q_max",
                });
            }
        }
        let slack = slack.ok_or(NetworkError::NoSlack)?;

        let mut ends = Vec::with_capacity(branches.len());
        for (i, br) in branches.iter_mut().enumerate() {
            br.switch_id = SwitchId::from_index(i);
            let branch = br.switch_id;
            let lookup = |bus: usize| {
                bus_pos
                    .get(&bus)
                    .copied()
                    .ok_or(NetworkError::UnknownBus { branch, bus })
            };
            let (f, t) = (lookup(br.from_bus)?, lookup(br.to_bus)?);
            if f == t {
                return Err(NetworkError::InvalidBranch { branch, reason: "self loop" });
            }
            if !(br.r >= 0.0) {
                return Err(NetworkError::InvalidBranch {
                    branch,
                    reason: "negative resistance",
                });
            }
            if br.x == 0.0 && br.r == 0.0 {
                return Err(NetworkError::InvalidBranch {
                    branch,
                    reason: "zero impedance",
                });
            }
            if !(br.tap > 0.0) {
                return Err(NetworkError::InvalidBranch {
                    branch,
                    reason: "tap ratio must be positive",
                });
            }
            if br.priority < 1 {
                return Err(NetworkError::InvalidBranch {
                    branch,
                    reason: "priority must be at least 1",
                });
            }
            ends.push((f, t));
        }

        let net = Network {
            buses,
            branches,
            base_mva,
            bus_pos,
            ends,
            slack,
        };
        if !net.is_connected_with(|_| true) {
            return Err(NetworkError::Disconnected);
        }
        Ok(net)
    }

    pub fn buses(&self) -> &[BusRecord] {
        &self.buses
    }

    pub fn branches(&self) -> &[BranchRecord] {
        &self.branches
    }

    pub fn base_mva(&self) -> f64 {
        self.base_mva
    }

    pub fn n_buses(&self) -> usize {
        self.buses.len()
    }

    pub fn n_branches(&self) -> usize {
        self.branches.len()
    }

    /// Position of the slack bus in [`Network::buses`].
    pub fn slack(&self) -> usize {
        self.slack
    }

    /// Position of a bus id in [`Network::buses`].
    pub fn bus_position(&self, id: usize) -> Option<usize> {
        self.bus_pos.get(&id).copied()
    }

    /// Endpoint bus positions of a branch.
    pub fn ends(&self, s: SwitchId) -> (usize, usize) {
        self.ends[s.index()]
    }

    pub fn branch(&self, s: SwitchId) -> &BranchRecord {
        &self.branches[s.index()]
    }

    pub fn switch_ids(&self) -> impl Iterator<Item = SwitchId> + '_ {
        (0..self.branches.len()).map(SwitchId::from_index)
    }

    /// Returns a copy with every bus load and generation scaled by `factor`.
    pub fn with_scaled_injections(&self, factor: f64) -> Network {
        let mut net = self.clone();
        for bus in &mut net.buses {
            bus.p_load *= factor;
            bus.q_load *= factor;
            bus.p_gen *= factor;
            bus.q_gen *= factor;
        }
        net
    }

    /// Whether the branches accepted by `closed` connect every bus.
    pub fn is_connected_with(&self, closed: impl Fn(usize) -> bool) -> bool {
        let n = self.buses.len();
        let mut adj: Vec<Vec<usize>> = alloc::vec![Vec::new(); n];
        for (i, &(f, t)) in self.ends.iter().enumerate() {
            if closed(i) {
                adj[f].push(t);
                adj[t].push(f);
            }
        }
        let mut seen = alloc::vec![false; n];
        let mut stack = alloc::vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for &v in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    count += 1;
                    stack.push(v);
                }
            }
        }
        count == n
    }
}
