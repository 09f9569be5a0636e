//! Prim-seeded Tabu search with elitist loop filtering.
//!
//! A run proceeds as follows:
//!
//! 1. Grow the initial trigger tree with Prim's algorithm over the branch
//!    priorities, solve it and seed the tabu list with it.
//! 2. Sweep the open switches of the current base tree in ascending id
//!    order. Each one is closed to form a sector loop; the elite loop edges
//!    are kept and the radial topology obtained by opening each kept edge
//!    (other than the trigger) is evaluated unless its open set is already
//!    in the tabu list. When a loop yields a tree better than the base, that
//!    tree becomes the base and the sweep continues over its untried open
//!    switches.
//! 3. Repeat sweeps until one brings no improvement or the evaluation
//!    budget is spent.
//! 4. Report the lowest-loss topology seen, including the initial tree.
//!
//! [`BaseTree::Fixed`] instead forms every loop on the initial tree in a
//! single pass.

mod elitism;
mod tabu;

pub use elitism::{elitism_filter, loop_scores, ElitismConfig, RankKey};
pub use tabu::{TabuEntry, TabuList};

use alloc::collections::BTreeSet;
use alloc::vec::Vec;
use core::fmt;

use crate::graphops::{fundamental_cycle, prim_mst, GraphError, Topology};
use crate::netmodel::{Network, SwitchId};
use crate::powerflow::{self, series_loss, PowerFlowError, PowerFlowSolution, SolverConfig};

/// Quantity minimized by the search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Objective {
    /// Real power lost in the branches, from the solved flows.
    #[default]
    PowerFlowLoss,
    /// Head-end series-loss formula, see [`series_loss`].
    SeriesLoss,
}

impl Objective {
    /// MW, or infinity for a non-converged solution.
    pub fn evaluate(self, net: &Network, topo: &Topology, sol: &PowerFlowSolution) -> f64 {
        if !sol.converged {
            return f64::INFINITY;
        }
        match self {
            Objective::PowerFlowLoss => sol.loss_total,
            Objective::SeriesLoss => series_loss(net, topo, sol),
        }
    }
}

/// Which tree the sector loops are formed on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BaseTree {
    /// Every loop is formed on the initial Prim tree, one pass over its
    /// open switches.
    Fixed,
    /// Loops are formed on the best tree found so far, sweeping repeatedly
    /// until a sweep brings no improvement.
    #[default]
    BestSoFar,
}

/// Default cap on power-flow evaluations per search.
pub const DEFAULT_EVALUATION_BUDGET: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchConfig {
    pub solver: SolverConfig,
    pub elitism: ElitismConfig,
    pub objective: Objective,
    pub base_tree: BaseTree,
    /// Stop after this many evaluations, the initial tree included.
    /// `None` runs until the sweeps stop improving.
    pub max_evaluations: Option<usize>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            solver: SolverConfig::default(),
            elitism: ElitismConfig::default(),
            objective: Objective::default(),
            base_tree: BaseTree::default(),
            max_evaluations: Some(DEFAULT_EVALUATION_BUDGET),
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<(), SearchError> {
        let r = self.elitism.keep_ratio;
        if !(r > 0.0 && r <= 1.0) {
            return Err(SearchError::InvalidConfig("keep_ratio must lie in (0, 1]"));
        }
        if self.max_evaluations == Some(0) {
            return Err(SearchError::InvalidConfig("max_evaluations must be at least 1"));
        }
        if !(self.solver.tolerance > 0.0) {
            return Err(SearchError::InvalidConfig("tolerance must be positive"));
        }
        if self.solver.max_iterations < 1 {
            return Err(SearchError::InvalidConfig("max_iterations must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SearchError {
    Graph(GraphError),
    PowerFlow(PowerFlowError),
    InvalidConfig(&'static str),
}

impl fmt::Display for SearchError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SearchError::Graph(e) => e.fmt(f),
            SearchError::PowerFlow(e) => e.fmt(f),
            SearchError::InvalidConfig(why) => write!(f, "invalid search config: {why}"),
        }
    }
}

impl core::error::Error for SearchError {}

impl From<GraphError> for SearchError {
    fn from(e: GraphError) -> Self {
        SearchError::Graph(e)
    }
}

impl From<PowerFlowError> for SearchError {
    fn from(e: PowerFlowError) -> Self {
        SearchError::PowerFlow(e)
    }
}

/// Runs the power flow for one candidate topology.
pub trait Evaluator {
    fn evaluate(
        &mut self,
        net: &Network,
        topo: &Topology,
    ) -> Result<PowerFlowSolution, PowerFlowError>;
}

/// Plain Newton-Raphson evaluation.
#[derive(Debug, Clone, Copy, Default)]
pub struct NewtonEvaluator {
    pub config: SolverConfig,
}

impl Evaluator for NewtonEvaluator {
    fn evaluate(
        &mut self,
        net: &Network,
        topo: &Topology,
    ) -> Result<PowerFlowSolution, PowerFlowError> {
        powerflow::solve(net, topo, &self.config)
    }
}

/// Monotonic time source in seconds.
pub trait Clock {
    fn now(&self) -> f64;
}

impl<F: Fn() -> f64> Clock for F {
    fn now(&self) -> f64 {
        self()
    }
}

/// A clock that never advances, for `no_std` callers.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoClock;

impl Clock for NoClock {
    fn now(&self) -> f64 {
        0.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult {
    pub best_topology: Topology,
    pub best_loss: f64,
    pub tabu: TabuList,
    /// Power-flow evaluations performed; equals `tabu.len()`.
    pub evaluations: usize,
    pub elapsed_seconds: f64,
    /// Open switches of the initial Prim tree.
    pub initial_open: Vec<SwitchId>,
    pub initial_loss: f64,
}

/// Closes `trigger` on `base`, filters the loop by elitism and evaluates
/// every new candidate topology. Returns the lowest-loss candidate evaluated
/// here, with its solution.
#[allow(clippy::too_many_arguments)]
fn explore_loop<E: Evaluator>(
    net: &Network,
    cfg: &SearchConfig,
    evaluator: &mut E,
    tabu: &mut TabuList,
    evaluations: &mut usize,
    base: &Topology,
    base_sol: &PowerFlowSolution,
    trigger: SwitchId,
) -> Result<Option<(Topology, PowerFlowSolution, f64)>, SearchError> {
    let lp = fundamental_cycle(net, base, trigger)?;
    let mut best: Option<(Topology, PowerFlowSolution, f64)> = None;
    for cand in elitism_filter(net, &lp, base_sol, &cfg.elitism) {
        if cfg.max_evaluations.is_some_and(|m| *evaluations >= m) {
            break;
        }
        if cand == trigger {
            continue;
        }
        let topo = base.swapped(trigger, cand);
        if tabu.contains(&topo.open_set()) {
            continue;
        }
        let sol = evaluator.evaluate(net, &topo)?;
        *evaluations += 1;
        let loss = cfg.objective.evaluate(net, &topo, &sol);
        tabu.insert(net, topo.clone(), loss)?;
        if best.as_ref().is_none_or(|b| loss < b.2) {
            best = Some((topo, sol, loss));
        }
    }
    Ok(best)
}

/// Runs the search with Newton-Raphson evaluation and no timing.
pub fn search(
    net: &Network,
    priorities: &[f64],
    cfg: &SearchConfig,
) -> Result<SearchResult, SearchError> {
    search_with(net, priorities, cfg, &mut NewtonEvaluator { config: cfg.solver }, &NoClock)
}

/// Runs the search with a caller-supplied evaluator and clock.
/// `priorities[i]` is the Prim weight of switch `S(i+1)`.
pub fn search_with<E: Evaluator, C: Clock>(
    net: &Network,
    priorities: &[f64],
    cfg: &SearchConfig,
    evaluator: &mut E,
    clock: &C,
) -> Result<SearchResult, SearchError> {
    cfg.validate()?;
    let started = clock.now();

    let tree0 = prim_mst(net, priorities)?;
    let sol0 = evaluator.evaluate(net, &tree0)?;
    let loss0 = cfg.objective.evaluate(net, &tree0, &sol0);
    let mut tabu = TabuList::new();
    let mut evaluations = 1;
    tabu.insert(net, tree0.clone(), loss0)?;

    let initial_open: Vec<SwitchId> = tree0.open().collect();
    match cfg.base_tree {
        BaseTree::Fixed => {
            for &trigger in &initial_open {
                explore_loop(net, cfg, evaluator, &mut tabu, &mut evaluations, &tree0, &sol0, trigger)?;
            }
        }
        BaseTree::BestSoFar => {
            let (mut base, mut base_sol, mut base_loss) = (tree0.clone(), sol0, loss0);
            loop {
                let mut improved = false;
                let mut tried = BTreeSet::new();
                loop {
                    let next = base.open().find(|s| !tried.contains(s));
                    let Some(trigger) = next else { break };
                    tried.insert(trigger);
                    let found = explore_loop(
                        net, cfg, evaluator, &mut tabu, &mut evaluations, &base, &base_sol, trigger,
                    )?;
                    if let Some((topo, sol, loss)) = found {
                        if loss < base_loss {
                            (base, base_sol, base_loss) = (topo, sol, loss);
                            improved = true;
                        }
                    }
                }
                if !improved || cfg.max_evaluations.is_some_and(|m| evaluations >= m) {
                    break;
                }
            }
        }
    }

    let best = tabu.best().expect("tabu list holds the initial tree");
    let (best_topology, best_loss) = (best.topology.clone(), best.loss_mw);
    Ok(SearchResult {
        best_topology,
        best_loss,
        evaluations,
        elapsed_seconds: clock.now() - started,
        initial_open,
        initial_loss: loss0,
        tabu,
    })
}
