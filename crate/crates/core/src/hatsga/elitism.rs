use alloc::vec::Vec;
use libm::ceil;

use crate::graphops::SectorLoop;
use crate::netmodel::{Network, SwitchId};
use crate::powerflow::PowerFlowSolution;

/// How loop edges are scored before the elitist cut.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RankKey {
    /// Estimated series-loss contribution `r (P^2 + Q^2) / V^2` from the
    /// flows of the tree the loop was formed on. The trigger carries no
    /// tree flow and is scored with its resistance times the mean
    /// `(P^2 + Q^2) / V^2` of the other loop edges.
    #[default]
    EstimatedLoss,
    /// Branch resistance alone.
    Resistance,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElitismConfig {
    /// Fraction of loop edges kept, in `(0, 1]`.
    pub keep_ratio: f64,
    pub rank_key: RankKey,
}

impl Default for ElitismConfig {
    fn default() -> Self {
        ElitismConfig {
            keep_ratio: 0.6,
            rank_key: RankKey::EstimatedLoss,
        }
    }
}

impl ElitismConfig {
    /// Number of loop edges retained for a loop of `len` edges.
    pub fn keep_count(&self, len: usize) -> usize {
        // guard against 0.6 * 5 landing a hair above 3
        let k = ceil(self.keep_ratio * len as f64 - 1e-9) as usize;
        k.clamp(1, len.max(1))
    }
}

/// Scores every loop edge; higher means more loss expected to be removed by
/// opening it.
pub fn loop_scores(
    net: &Network,
    lp: &SectorLoop,
    sol: &PowerFlowSolution,
    key: RankKey,
) -> Vec<(SwitchId, f64)> {
    if key == RankKey::Resistance || !sol.converged {
        return lp.loop_edges.iter().map(|&s| (s, net.branch(s).r)).collect();
    }
    let base = net.base_mva();
    let flow_term = |s: SwitchId| {
        let k = s.index();
        let (f, _) = net.ends(s);
        let p = sol.p_branch[k] / base;
        let q = sol.q_branch[k] / base;
        let v = sol.v_mag[f];
        (p * p + q * q) / (v * v)
    };
    let others: Vec<f64> = lp
        .loop_edges
        .iter()
        .filter(|&&s| s != lp.trigger)
        .map(|&s| flow_term(s))
        .collect();
    let trigger_term = if others.is_empty() {
        0.0
    } else {
        others.iter().sum::<f64>() / others.len() as f64
    };
    lp.loop_edges
        .iter()
        .map(|&s| {
            let term = if s == lp.trigger { trigger_term } else { flow_term(s) };
            (s, net.branch(s).r * term)
        })
        .collect()
}

/// Keeps the best-ranked loop edges as candidates to open.
///
/// Edges are ordered by descending score, ties broken by ascending switch
/// id, and the first `keep_count(|loop|)` are returned. `sol` is the power
/// flow of the radial tree the loop was formed on.
pub fn elitism_filter(
    net: &Network,
    lp: &SectorLoop,
    sol: &PowerFlowSolution,
    cfg: &ElitismConfig,
) -> Vec<SwitchId> {
    let mut scored = loop_scores(net, lp, sol, cfg.rank_key);
    scored.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    scored.truncate(cfg.keep_count(lp.loop_edges.len()));
    scored.into_iter().map(|(s, _)| s).collect()
}
