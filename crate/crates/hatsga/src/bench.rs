//! Repeated searches from distinct random initial trees.

use std::collections::BTreeSet;
use std::time::Instant;

use hatsga_core::graphops::{prim_mst, GraphError, OpenSet};
use hatsga_core::hatsga::{search_with, NewtonEvaluator, SearchConfig, SearchError, SearchResult};
use hatsga_core::Network;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Name of the generator behind every seeded run.
pub const RNG_NAME: &str = "ChaCha8 (rand_chacha 0.9, seed_from_u64)";

/// Random priorities are drawn uniformly from `1..=PRIORITY_MAX`.
pub const PRIORITY_MAX: u32 = 1000;

#[derive(Debug, Error, PartialEq)]
pub enum BenchError {
    #[error("runs must be ≥ 2 (got {0})")]
    TooFewRuns(usize),
    #[error("found only {found} distinct initial topologies after {rejected} rejections")]
    NotEnoughDistinct { found: usize, rejected: usize },
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchConfig {
    pub runs: usize,
    pub seed: u64,
    pub search: SearchConfig,
    /// Record wall-clock time per run; zero otherwise.
    pub timing: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRun {
    /// 1-based.
    pub index: usize,
    pub priorities: Vec<f64>,
    pub initial_open: OpenSet,
    pub best_open: OpenSet,
    pub loss_mw: f64,
    pub evaluations: usize,
    pub seconds: f64,
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// One priority per branch, uniform integers in `1..=1000`.
pub fn random_priorities(rng: &mut impl Rng, n_branches: usize) -> Vec<f64> {
    (0..n_branches)
        .map(|_| f64::from(rng.random_range(1..=PRIORITY_MAX)))
        .collect()
}

/// Branch priorities as written in the network file.
pub fn file_priorities(net: &Network) -> Vec<f64> {
    net.branches().iter().map(|b| f64::from(b.priority)).collect()
}

/// Runs the search, timing only the search call.
pub fn timed_search(
    net: &Network,
    priorities: &[f64],
    cfg: &SearchConfig,
) -> Result<SearchResult, SearchError> {
    let origin = Instant::now();
    let clock = || origin.elapsed().as_secs_f64();
    search_with(net, priorities, cfg, &mut NewtonEvaluator { config: cfg.solver }, &clock)
}

/// Runs `cfg.runs` searches whose initial Prim trees are pairwise distinct.
/// Priority vectors that reproduce an already used initial tree are
/// redrawn, up to `100 * runs` times in total.
pub fn run_bench(net: &Network, cfg: &BenchConfig) -> Result<Vec<BenchRun>, BenchError> {
    if cfg.runs < 2 {
        return Err(BenchError::TooFewRuns(cfg.runs));
    }
    cfg.search.validate()?;
    let mut rng = rng(cfg.seed);
    let mut used: BTreeSet<OpenSet> = BTreeSet::new();
    let mut rejected = 0;
    let mut runs = Vec::with_capacity(cfg.runs);

    while runs.len() < cfg.runs {
        let priorities = random_priorities(&mut rng, net.n_branches());
        let initial = prim_mst(net, &priorities)?.open_set();
        if !used.insert(initial.clone()) {
            rejected += 1;
            if rejected > 100 * cfg.runs {
                return Err(BenchError::NotEnoughDistinct {
                    found: runs.len(),
                    rejected,
                });
            }
            continue;
        }
        let res = timed_search(net, &priorities, &cfg.search)?;
        debug_assert_eq!(OpenSet(res.initial_open.clone()), initial);
        runs.push(BenchRun {
            index: runs.len() + 1,
            initial_open: initial,
            best_open: res.best_topology.open_set(),
            loss_mw: res.best_loss,
            evaluations: res.evaluations,
            seconds: if cfg.timing { res.elapsed_seconds } else { 0.0 },
            priorities,
        });
    }
    Ok(runs)
}
