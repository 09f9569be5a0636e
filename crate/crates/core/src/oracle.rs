//! Exhaustive ground truth over every spanning tree.

use alloc::vec::Vec;
use core::fmt;

use crate::graphops::{count_spanning_trees, enumerate_spanning_trees, GraphError, OpenSet, Topology};
use crate::hatsga::Objective;
use crate::netmodel::Network;
use crate::powerflow::{solve, PowerFlowError, SolverConfig};

/// Largest tree count the oracle will attempt.
pub const MAX_TREES: u128 = 100_000;

/// Losses closer than this are treated as equal when ranking (MW).
pub const RANK_TOLERANCE_MW: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub enum OracleError {
    TooManyTrees(u128),
    Graph(GraphError),
    PowerFlow(PowerFlowError),
}

impl fmt::Display for OracleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OracleError::TooManyTrees(n) => {
                write!(f, "network has {n} spanning trees, more than the {MAX_TREES} limit")
            }
            OracleError::Graph(e) => e.fmt(f),
            OracleError::PowerFlow(e) => e.fmt(f),
        }
    }
}

impl core::error::Error for OracleError {}

#[derive(Debug, Clone, PartialEq)]
pub struct RankedTopology {
    pub open: OpenSet,
    pub topology: Topology,
    pub loss_mw: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub tree_count: u128,
    /// `None` when no tree converged.
    pub global_best: Option<RankedTopology>,
    pub converged_count: usize,
    /// Converged trees sorted by loss, then by open set.
    pub loss_histogram: Vec<RankedTopology>,
    /// Open sets of the trees whose power flow did not converge, ascending.
    pub non_converged: Vec<OpenSet>,
}

/// Solves the power flow on every spanning tree and ranks them by loss.
pub fn exhaustive_min_loss(net: &Network, cfg: &SolverConfig) -> Result<OracleReport, OracleError> {
    exhaustive_min_loss_by(net, cfg, Objective::PowerFlowLoss)
}

pub fn exhaustive_min_loss_by(
    net: &Network,
    cfg: &SolverConfig,
    objective: Objective,
) -> Result<OracleReport, OracleError> {
    let tree_count = count_spanning_trees(net).map_err(OracleError::Graph)?;
    if tree_count > MAX_TREES {
        return Err(OracleError::TooManyTrees(tree_count));
    }
    let mut ranked = Vec::new();
    let mut non_converged = Vec::new();
    for topology in enumerate_spanning_trees(net) {
        let sol = solve(net, &topology, cfg).map_err(OracleError::PowerFlow)?;
        let open = topology.open_set();
        if sol.converged {
            let loss_mw = objective.evaluate(net, &topology, &sol);
            ranked.push(RankedTopology { open, topology, loss_mw });
        } else {
            non_converged.push(open);
        }
    }
    ranked.sort_by(|a, b| a.loss_mw.total_cmp(&b.loss_mw).then_with(|| a.open.cmp(&b.open)));
    non_converged.sort();
    Ok(OracleReport {
        tree_count,
        global_best: ranked.first().cloned(),
        converged_count: ranked.len(),
        loss_histogram: ranked,
        non_converged,
    })
}

/// 1-based rank of `loss` among converged losses: one plus the number of
/// losses smaller by more than [`RANK_TOLERANCE_MW`].
pub fn rank_of(report: &OracleReport, loss: f64) -> usize {
    1 + report
        .loss_histogram
        .partition_point(|e| e.loss_mw < loss - RANK_TOLERANCE_MW)
}
