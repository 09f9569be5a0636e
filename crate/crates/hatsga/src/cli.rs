//! `hatsga` command line: `run`, `bench`, `oracle`, `compare`.

use std::ffi::OsString;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use hatsga_core::graphops::Topology;
use hatsga_core::hatsga::{BaseTree, ElitismConfig, Objective, SearchConfig, DEFAULT_EVALUATION_BUDGET};
use hatsga_core::oracle::{exhaustive_min_loss_by, rank_of};
use hatsga_core::powerflow::{solve, SolverConfig};
use hatsga_core::Network;

use crate::bench::{self, BenchConfig};
use crate::format::parse_network;
use crate::report;
use crate::stats::median;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NO_CONVERGENCE: i32 = 2;

/// Published spanning-tree count of the IEEE 14-bus graph.
pub const LITERATURE_TREE_COUNT: u128 = 3909;

/// Published IEEE 14-bus losses (MW): the meshed base case and six
/// reconfiguration algorithms.
pub const LITERATURE_LOSSES: [(&str, f64); 7] = [
    ("Original Network (IEEE-14)", 13.436),
    ("PSO", 9.9159),
    ("MPSO", 8.5053),
    ("ABC", 6.4611),
    ("FSS", 7.8457),
    ("HATSGA (published)", 4.2796),
    ("GSA", 3.2764),
];

#[derive(Debug, Parser)]
#[command(name = "hatsga", version, about = "Minimum-loss radial reconfiguration of power networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one search and print the best radial topology.
    Run(Common),
    /// Run repeated searches from distinct random initial trees.
    Bench(Common),
    /// Solve every spanning tree and rank them by loss.
    Oracle(Common),
    /// Bench plus oracle, printed next to published results.
    Compare(Common),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ObjectiveArg {
    /// Real branch loss from the solved power flow.
    PowerFlow,
    /// Head-end series-loss formula.
    Series,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BaseTreeArg {
    /// Form loops on the best tree found so far, sweeping until no gain.
    BestSoFar,
    /// Form every loop on the initial tree, one pass.
    Fixed,
}

#[derive(Debug, Args)]
struct Common {
    /// Network file.
    network: PathBuf,
    /// Seed for random branch priorities. `run` uses the file priorities
    /// when omitted.
    #[arg(long)]
    seed: Option<u64>,
    /// Number of bench runs.
    #[arg(long, default_value_t = 50)]
    runs: usize,
    /// Fraction of each sector loop kept by elitism.
    #[arg(long, default_value_t = 0.6)]
    keep_ratio: f64,
    /// Power-flow mismatch tolerance (pu).
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    /// Newton-Raphson iteration limit.
    #[arg(long, default_value_t = 50)]
    max_iter: usize,
    /// Demote PV buses that exceed their reactive limits.
    #[arg(long)]
    q_limits: bool,
    #[arg(long, value_enum, default_value_t = ObjectiveArg::PowerFlow)]
    objective: ObjectiveArg,
    #[arg(long, value_enum, default_value_t = BaseTreeArg::BestSoFar)]
    base_tree: BaseTreeArg,
    /// Power-flow evaluations allowed per search; 0 removes the cap.
    #[arg(long, default_value_t = DEFAULT_EVALUATION_BUDGET)]
    max_evals: usize,
    /// Write the CSV report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Report zero seconds for every bench run, making the CSV reproducible
    /// byte for byte.
    #[arg(long)]
    no_timing: bool,
}

impl Common {
    fn search_config(&self) -> SearchConfig {
        SearchConfig {
            solver: SolverConfig {
                tolerance: self.tol,
                max_iterations: self.max_iter,
                flat_start: true,
                enforce_q_limits: self.q_limits,
            },
            elitism: ElitismConfig {
                keep_ratio: self.keep_ratio,
                ..Default::default()
            },
            objective: match self.objective {
                ObjectiveArg::PowerFlow => Objective::PowerFlowLoss,
                ObjectiveArg::Series => Objective::SeriesLoss,
            },
            base_tree: match self.base_tree {
                BaseTreeArg::BestSoFar => BaseTree::BestSoFar,
                BaseTreeArg::Fixed => BaseTree::Fixed,
            },
            max_evaluations: (self.max_evals > 0).then_some(self.max_evals),
        }
    }

    fn bench_config(&self) -> BenchConfig {
        BenchConfig {
            runs: self.runs,
            seed: self.seed.unwrap_or(1),
            search: self.search_config(),
            timing: !self.no_timing,
        }
    }
}

/// Failure carrying the process exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

fn usage(message: impl ToString) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.to_string(),
    }
}

fn io_err(e: io::Error) -> Failure {
    usage(e)
}

fn load(path: &Path) -> Result<Network, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| match e.kind() {
        io::ErrorKind::NotFound => usage(format!("file not found: {}", path.display())),
        _ => usage(format!("{}: {e}", path.display())),
    })?;
    parse_network(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn emit(csv: &str, out_path: Option<&Path>, out: &mut dyn Write) -> Result<(), Failure> {
    match out_path {
        Some(p) => std::fs::write(p, csv).map_err(|e| usage(format!("{}: {e}", p.display()))),
        None => out.write_all(csv.as_bytes()).map_err(io_err),
    }
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
                return EXIT_USAGE;
            }
            let _ = write!(out, "{}", e.render());
            return EXIT_OK;
        }
    };
    let result = match &cli.command {
        Command::Run(c) => cmd_run(c, out),
        Command::Bench(c) => cmd_bench(c, out),
        Command::Oracle(c) => cmd_oracle(c, out),
        Command::Compare(c) => cmd_compare(c, out),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn cmd_run(c: &Common, out: &mut dyn Write) -> Result<(), Failure> {
    let net = load(&c.network)?;
    let priorities = match c.seed {
        Some(seed) => bench::random_priorities(&mut bench::rng(seed), net.n_branches()),
        None => bench::file_priorities(&net),
    };
    let res = bench::timed_search(&net, &priorities, &c.search_config()).map_err(usage)?;
    let initial = hatsga_core::graphops::OpenSet(res.initial_open.clone());
    let best = res.best_topology.open_set();
    match c.format.unwrap_or(Format::Text) {
        Format::Text => writeln!(
            out,
            "initial_open={initial} initial_loss_mw={:.3} best_open={best} best_loss_mw={:.3} evaluations={} elapsed_s={:.6}",
            res.initial_loss, res.best_loss, res.evaluations, res.elapsed_seconds
        )
        .map_err(io_err),
        Format::Csv => {
            let csv = format!(
                "initial_open,initial_loss_mw,best_open,best_loss_mw,evaluations,seconds\n{initial},{},{best},{},{},{}\n",
                res.initial_loss, res.best_loss, res.evaluations, res.elapsed_seconds
            );
            emit(&csv, c.out.as_deref(), out)
        }
    }
}

fn cmd_bench(c: &Common, out: &mut dyn Write) -> Result<(), Failure> {
    let net = load(&c.network)?;
    let cfg = c.bench_config();
    let runs = bench::run_bench(&net, &cfg).map_err(usage)?;
    emit(&report::bench_csv(&runs, &cfg), c.out.as_deref(), out)
}

fn cmd_oracle(c: &Common, out: &mut dyn Write) -> Result<(), Failure> {
    let net = load(&c.network)?;
    let cfg = c.search_config();
    let rep = exhaustive_min_loss_by(&net, &cfg.solver, cfg.objective).map_err(usage)?;
    let agreement = if rep.tree_count == LITERATURE_TREE_COUNT { "agrees" } else { "differs" };
    writeln!(
        out,
        "# tree_count={} (published IEEE 14-bus figure {LITERATURE_TREE_COUNT}: {agreement})",
        rep.tree_count
    )
    .map_err(io_err)?;
    writeln!(
        out,
        "# converged={} non_converged={}",
        rep.converged_count,
        rep.non_converged.len()
    )
    .map_err(io_err)?;
    match &rep.global_best {
        Some(b) => writeln!(out, "# global_best open={} loss_mw={}", b.open, b.loss_mw),
        None => writeln!(out, "# global_best none (no tree converged)"),
    }
    .map_err(io_err)?;
    emit(&report::oracle_csv(&rep), c.out.as_deref(), out)
}

fn cmd_compare(c: &Common, out: &mut dyn Write) -> Result<(), Failure> {
    let net = load(&c.network)?;
    let cfg = c.search_config();
    let meshed = solve(&net, &Topology::all_closed(net.n_branches()), &cfg.solver).map_err(usage)?;
    if !meshed.converged {
        return Err(Failure {
            code: EXIT_NO_CONVERGENCE,
            message: format!(
                "power flow on the meshed base case did not converge (mismatch {:e} after {} iterations)",
                meshed.max_mismatch, meshed.iterations
            ),
        });
    }
    let bench_cfg = c.bench_config();
    let runs = bench::run_bench(&net, &bench_cfg).map_err(usage)?;
    let rep = exhaustive_min_loss_by(&net, &cfg.solver, cfg.objective).map_err(usage)?;
    if let Some(p) = &c.out {
        emit(&report::bench_csv(&runs, &bench_cfg), Some(p), out)?;
    }

    let losses: Vec<f64> = runs.iter().map(|r| r.loss_mw).collect();
    let best = losses.iter().copied().fold(f64::INFINITY, f64::min);
    let (finite, _) = report::finite_runs(runs.iter().map(|r| (r.loss_mw, r.seconds)));
    let mean = finite.iter().sum::<f64>() / finite.len() as f64;
    let secs = runs.iter().map(|r| r.seconds).sum::<f64>() / runs.len() as f64;
    let mut text = String::new();
    use std::fmt::Write as _;
    let w = &mut text;
    writeln!(w, "Published IEEE 14-bus results (literature constants, MW)").unwrap();
    for (name, loss) in LITERATURE_LOSSES {
        writeln!(w, "  {name:<28} {loss:>9.4}").unwrap();
    }
    writeln!(w, "Computed by this implementation (MW)").unwrap();
    let base_dev = (meshed.loss_total - LITERATURE_LOSSES[0].1) / LITERATURE_LOSSES[0].1 * 100.0;
    writeln!(
        w,
        "  {:<28} {:>9.4}  ({base_dev:+.2}% vs published)",
        "Meshed base case", meshed.loss_total
    )
    .unwrap();
    writeln!(w, "  {:<28} {best:>9.4}  (rank {} of {})", "HATSGA best of runs", rank_of(&rep, best), rep.converged_count).unwrap();
    writeln!(
        w,
        "  {:<28} {mean:>9.4}  ({} of {} runs converged)",
        "HATSGA mean of runs",
        finite.len(),
        runs.len()
    )
    .unwrap();
    writeln!(w, "  {:<28} {:>9.4}", "HATSGA median of runs", median(&losses)).unwrap();
    match &rep.global_best {
        Some(g) => writeln!(w, "  {:<28} {:>9.4}  (open {})", "Exhaustive optimum", g.loss_mw, g.open).unwrap(),
        None => writeln!(w, "  {:<28} {:>9}", "Exhaustive optimum", "none").unwrap(),
    }
    let agreement = if rep.tree_count == LITERATURE_TREE_COUNT { "agrees" } else { "differs" };
    writeln!(
        w,
        "Spanning trees: {} (published {LITERATURE_TREE_COUNT}: {agreement})",
        rep.tree_count
    )
    .unwrap();
    writeln!(
        w,
        "Runs: {} distinct initial trees, seed {}, mean search time {secs:.6} s",
        runs.len(),
        bench_cfg.seed
    )
    .unwrap();
    out.write_all(text.as_bytes()).map_err(io_err)
}
