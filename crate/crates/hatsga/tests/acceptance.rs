//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails.

use std::cell::Cell;
use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::Command;
use std::time::Instant;

use hatsga::bench::{rng, run_bench, BenchConfig, BenchRun};
use hatsga::parse_network;
use hatsga::report::{bench_csv, finite_runs, parse_bench_csv};
use hatsga::stats::{median, RunStatistics};
use hatsga_core::graphops::{count_spanning_trees, enumerate_spanning_trees, OpenSet, Topology};
use hatsga_core::hatsga::{
    search, search_with, BaseTree, Evaluator, NewtonEvaluator, NoClock, SearchConfig,
};
use hatsga_core::oracle::{exhaustive_min_loss, rank_of};
use hatsga_core::powerflow::newton::NewtonSystem;
use hatsga_core::powerflow::{series_loss, solve, PowerFlowError, PowerFlowSolution, SolverConfig};
use hatsga_core::{BranchRecord, BusKind, BusRecord, Network};
use rand::Rng;

const MESHED_LOSS_MW: f64 = 13.436;
const MESHED_LOSS_REL_TOL: f64 = 0.02;
const MESHED_MAX_SECONDS: f64 = 1.0;
const LITERATURE_TREES: u128 = 3909;
const BENCH_RUNS: usize = 50;
const BENCH_SEED: u64 = 1;
const OPTIMUM_TOL_MW: f64 = 1e-9;
const MEDIAN_REL_TOL: f64 = 0.10;
const ORACLE_MAX_SECONDS: f64 = 600.0;
const MAX_EVALUATIONS: usize = 60;
const MEAN_SEARCH_MAX_SECONDS: f64 = 1.99;
const STATS_TOL: f64 = 1e-9;
const JACOBIAN_REL_TOL: f64 = 1e-6;
const FD_STEP: f64 = 1e-6;
const BALANCE_TOL_FACTOR: f64 = 10.0;
const SERIES_REL_TOL: f64 = 1e-6;
const RANDOM_SYSTEMS: usize = 40;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn load(name: &str) -> Network {
    parse_network(&std::fs::read_to_string(fixture(name)).unwrap()).unwrap()
}

struct Suite {
    failed: Vec<usize>,
}

impl Suite {
    fn record(&mut self, n: usize, pass: bool, what: &str, detail: String) {
        println!("criterion {n} {}: {what}: {detail}", if pass { "PASS" } else { "FAIL" });
        if !pass {
            self.failed.push(n);
        }
    }
}

fn bench_config() -> BenchConfig {
    BenchConfig {
        runs: BENCH_RUNS,
        seed: BENCH_SEED,
        search: SearchConfig::default(),
        timing: true,
    }
}

fn meshed_loss(s: &mut Suite) {
    let net = load("ieee14.net");
    let t = Instant::now();
    let sol = solve(&net, &Topology::all_closed(net.n_branches()), &SolverConfig::default()).unwrap();
    let secs = t.elapsed().as_secs_f64();
    let dev = (sol.loss_total - MESHED_LOSS_MW) / MESHED_LOSS_MW;
    s.record(
        1,
        sol.converged && dev.abs() <= MESHED_LOSS_REL_TOL && secs < MESHED_MAX_SECONDS,
        "meshed IEEE 14-bus loss",
        format!(
            "{:.4} MW vs {MESHED_LOSS_MW} ({:+.2}%, limit ±{}%), {} iterations, {secs:.4} s",
            sol.loss_total,
            dev * 100.0,
            MESHED_LOSS_REL_TOL * 100.0,
            sol.iterations
        ),
    );
}

fn census(s: &mut Suite) {
    let net = load("ieee14.net");
    let det = count_spanning_trees(&net).unwrap();
    let enumerated = enumerate_spanning_trees(&net).count() as u128;
    let agreement = if det == LITERATURE_TREES { "agrees" } else { "differs" };
    s.record(
        2,
        det == enumerated,
        "spanning-tree census",
        format!("enumerated {enumerated}, matrix-tree {det}; published {LITERATURE_TREES}: {agreement}"),
    );
}

fn quality(s: &mut Suite, runs: &[BenchRun]) {
    let net = load("ieee14.net");
    let t = Instant::now();
    let rep = exhaustive_min_loss(&net, &SolverConfig::default()).unwrap();
    let oracle_secs = t.elapsed().as_secs_f64();
    let best = rep.global_best.as_ref().unwrap();
    let losses: Vec<f64> = runs.iter().map(|r| r.loss_mw).collect();
    let below = losses.iter().filter(|&&l| l < best.loss_mw - OPTIMUM_TOL_MW).count();
    let hits = losses.iter().filter(|&&l| (l - best.loss_mw).abs() <= OPTIMUM_TOL_MW).count();
    let med = median(&losses);
    let med_ratio = med / best.loss_mw;
    let run_best = losses.iter().copied().fold(f64::INFINITY, f64::min);
    println!(
        "  oracle: {} trees, {} converged, optimum {} MW open {}, {oracle_secs:.2} s",
        rep.tree_count, rep.converged_count, best.loss_mw, best.open
    );
    println!(
        "  bench: best {run_best} MW (rank {} of {}), median {med} MW, {} runs without a converging topology",
        rank_of(&rep, run_best),
        rep.converged_count,
        losses.iter().filter(|l| !l.is_finite()).count()
    );
    s.record(
        3,
        below == 0,
        "(a) every run >= oracle optimum",
        format!("{below} of {} runs below {}", runs.len(), best.loss_mw),
    );
    s.record(
        3,
        hits >= 1,
        "(b) some run reaches the optimum",
        format!("{hits} of {} runs within {OPTIMUM_TOL_MW} MW", runs.len()),
    );
    s.record(
        3,
        med_ratio <= 1.0 + MEDIAN_REL_TOL,
        "(c) median within 10% of optimum",
        format!("median/optimum = {med_ratio:.4}"),
    );
    s.record(
        3,
        oracle_secs < ORACLE_MAX_SECONDS,
        "(d) oracle runtime",
        format!("{oracle_secs:.2} s (limit {ORACLE_MAX_SECONDS} s)"),
    );

    // Reference only: the single pass over the initial tree.
    let fixed = BenchConfig {
        timing: false,
        search: SearchConfig {
            base_tree: BaseTree::Fixed,
            ..Default::default()
        },
        ..bench_config()
    };
    let fl: Vec<f64> = run_bench(&net, &fixed).unwrap().iter().map(|r| r.loss_mw).collect();
    println!(
        "  info: fixed base tree, same seed: {} hits, median/optimum = {:.4}",
        fl.iter().filter(|&&l| (l - best.loss_mw).abs() <= OPTIMUM_TOL_MW).count(),
        median(&fl) / best.loss_mw
    );
}

struct Counting<'a> {
    seen: BTreeSet<OpenSet>,
    duplicates: &'a Cell<usize>,
    calls: &'a Cell<usize>,
}

impl Evaluator for Counting<'_> {
    fn evaluate(&mut self, net: &Network, topo: &Topology) -> Result<PowerFlowSolution, PowerFlowError> {
        if !self.seen.insert(topo.open_set()) {
            self.duplicates.set(self.duplicates.get() + 1);
        }
        self.calls.set(self.calls.get() + 1);
        NewtonEvaluator::default().evaluate(net, topo)
    }
}

fn frugality(s: &mut Suite, runs: &[BenchRun]) {
    let net = load("ieee14.net");
    let cfg = SearchConfig::default();
    let (mut worst, mut dups, mut mismatched) = (0, 0, 0);
    let mut total = 0;
    for r in runs {
        let (d, c) = (Cell::new(0), Cell::new(0));
        let mut ev = Counting { seen: BTreeSet::new(), duplicates: &d, calls: &c };
        let res = search_with(&net, &r.priorities, &cfg, &mut ev, &NoClock).unwrap();
        worst = worst.max(c.get());
        total += c.get();
        dups += d.get();
        if c.get() != res.evaluations || res.best_loss != r.loss_mw {
            mismatched += 1;
        }
    }
    s.record(
        4,
        worst <= MAX_EVALUATIONS && dups == 0 && mismatched == 0,
        "search frugality",
        format!(
            "max {worst} evaluations per run (limit {MAX_EVALUATIONS}), mean {:.1}, {dups} duplicate evaluations",
            total as f64 / runs.len() as f64
        ),
    );
}

fn timing(s: &mut Suite, runs: &[BenchRun]) {
    let csv = bench_csv(runs, &bench_config());
    let parsed = parse_bench_csv(&csv).unwrap();
    let (losses, secs) = finite_runs(parsed.rows.iter().copied());
    let recomputed = RunStatistics::of(&losses, &secs).unwrap();
    let st = parsed.stats;
    let close = |a: f64, b: f64| (a - b).abs() <= STATS_TOL;
    let stats_ok = [
        (st.loss_mw.mean, recomputed.loss_mw.mean),
        (st.loss_mw.stddev, recomputed.loss_mw.stddev),
        (st.loss_mw.ci95_low, recomputed.loss_mw.ci95_low),
        (st.loss_mw.ci95_high, recomputed.loss_mw.ci95_high),
        (st.seconds.mean, recomputed.seconds.mean),
        (st.seconds.stddev, recomputed.seconds.stddev),
        (st.seconds.ci95_low, recomputed.seconds.ci95_low),
        (st.seconds.ci95_high, recomputed.seconds.ci95_high),
    ]
    .iter()
    .all(|&(a, b)| close(a, b));
    let stat_rows = csv
        .lines()
        .filter(|l| l.starts_with("mean,") || l.starts_with("stddev,") || l.starts_with("ci95,"))
        .count();
    let all_secs: Vec<f64> = runs.iter().map(|r| r.seconds).collect();
    let mean_secs = all_secs.iter().sum::<f64>() / all_secs.len() as f64;
    println!(
        "  loss MW: mean {:.4}, stddev {:.4}, ci95 [{:.4} - {:.4}]",
        st.loss_mw.mean, st.loss_mw.stddev, st.loss_mw.ci95_low, st.loss_mw.ci95_high
    );
    println!(
        "  seconds: mean {:.6}, stddev {:.6}, ci95 [{:.6} - {:.6}]",
        st.seconds.mean, st.seconds.stddev, st.seconds.ci95_low, st.seconds.ci95_high
    );
    s.record(
        5,
        mean_secs < MEAN_SEARCH_MAX_SECONDS && parsed.rows.len() == BENCH_RUNS && stat_rows == 3 && stats_ok,
        "timing and statistics rows",
        format!(
            "mean search {mean_secs:.6} s (limit {MEAN_SEARCH_MAX_SECONDS} s), {} data rows, {stat_rows} statistics rows, recomputed within {STATS_TOL}: {stats_ok}",
            parsed.rows.len()
        ),
    );
}

/// Random 5-bus meshed system: slack, one PV bus, three PQ buses, one
/// off-nominal tap, line charging.
fn random_system(r: &mut impl Rng, charging: bool) -> Network {
    let mut buses = vec![
        BusRecord::slack(1, 1.04),
        BusRecord::generator(2, r.random_range(0.98..1.06), 30.0),
    ];
    for k in 3..=5 {
        buses.push(BusRecord::load(k, r.random_range(0.0..40.0), r.random_range(-5.0..15.0)));
    }
    let ends = [(1, 2), (2, 3), (3, 4), (4, 5), (1, 5), (2, 4), (1, 3)];
    let branches = ends
        .iter()
        .enumerate()
        .map(|(i, &(f, t))| {
            let line = BranchRecord::line(f, t, r.random_range(0.005..0.08), r.random_range(0.05..0.3));
            if charging {
                BranchRecord {
                    b_half: r.random_range(0.0..0.03),
                    tap: if i == 5 { r.random_range(0.9..1.1) } else { 1.0 },
                    ..line
                }
            } else {
                line
            }
        })
        .collect();
    Network::new(buses, branches, 100.0).unwrap()
}

fn jacobian_error(r: &mut impl Rng, net: &Network) -> f64 {
    let topo = Topology::all_closed(net.n_branches());
    let kinds: Vec<BusKind> = net.buses().iter().map(|b| b.kind).collect();
    let vm = net.buses().iter().map(|b| b.v_mag).collect();
    let mut sys = NewtonSystem::new(net, &topo, &kinds, vm, vec![0.0; net.n_buses()]);
    let x0: Vec<f64> = sys.state().iter().map(|x| x + r.random_range(-0.1..0.1)).collect();
    sys.set_state(&x0);
    let jac = sys.jacobian();
    let dim = sys.dim();
    let mut worst: f64 = 0.0;
    for c in 0..dim {
        let (mut xp, mut xm) = (x0.clone(), x0.clone());
        xp[c] += FD_STEP;
        xm[c] -= FD_STEP;
        sys.set_state(&xp);
        let fp = sys.mismatch();
        sys.set_state(&xm);
        let fm = sys.mismatch();
        for row in 0..dim {
            let fd = (fp[row] - fm[row]) / (2.0 * FD_STEP);
            let an = jac[row * dim + c];
            worst = worst.max((fd - an).abs() / an.abs().max(1.0));
        }
    }
    worst
}

fn invariants(s: &mut Suite) {
    let mut r = rng(2024);
    let cfg = SolverConfig::default();
    let (mut jac_worst, mut balance_worst, mut series_worst): (f64, f64, f64) = (0.0, 0.0, 0.0);
    let mut solved = 0;
    for _ in 0..RANDOM_SYSTEMS {
        let net = random_system(&mut r, true);
        jac_worst = jac_worst.max(jacobian_error(&mut r, &net));

        let sol = solve(&net, &Topology::all_closed(7), &cfg).unwrap();
        if sol.converged {
            solved += 1;
            let load: f64 = net.buses().iter().map(|b| b.p_load).sum();
            let gen: f64 = net
                .buses()
                .iter()
                .enumerate()
                .map(|(i, b)| if b.kind == BusKind::Slack { sol.p_injection[i] + b.p_load } else { b.p_gen })
                .sum();
            balance_worst = balance_worst.max((gen - load - sol.loss_total).abs());
        }

        let plain = random_system(&mut r, false);
        for topo in enumerate_spanning_trees(&plain).step_by(5) {
            let sol = solve(&plain, &topo, &cfg).unwrap();
            if sol.converged && sol.loss_total > 0.0 {
                let series = series_loss(&plain, &topo, &sol);
                series_worst = series_worst.max((series - sol.loss_total).abs() / sol.loss_total);
            }
        }
    }
    let balance_limit = BALANCE_TOL_FACTOR * cfg.tolerance * 100.0;

    let zero = load("zero_load.net");
    let meshed = solve(&zero, &Topology::all_closed(zero.n_branches()), &cfg).unwrap();
    let searched = search(&zero, &vec![1.0; zero.n_branches()], &SearchConfig::default()).unwrap();
    let zero_ok = meshed.converged && meshed.loss_total == 0.0 && searched.best_loss == 0.0;

    let pass = jac_worst <= JACOBIAN_REL_TOL
        && balance_worst <= balance_limit
        && series_worst <= SERIES_REL_TOL
        && solved > 0
        && zero_ok;
    s.record(
        6,
        pass,
        "numerical invariants",
        format!(
            "jacobian fd {jac_worst:.2e} (limit {JACOBIAN_REL_TOL:e}); balance {balance_worst:.2e} MW over {solved} systems (limit {balance_limit:.0e}); series loss {series_worst:.2e} (limit {SERIES_REL_TOL:e}); zero load exact: {zero_ok}"
        ),
    );
}

fn cli_output(args: &[&str]) -> Vec<u8> {
    let out = Command::new(env!("CARGO_BIN_EXE_hatsga")).args(args).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    out.stdout
}

fn determinism(s: &mut Suite) {
    let dir = tempfile::tempdir().unwrap();
    let net = fixture("ieee14.net");
    let net = net.to_str().unwrap();
    let mut same = Vec::new();
    for kind in ["bench", "oracle"] {
        let files: Vec<Vec<u8>> = (0..2)
            .map(|i| {
                let path = dir.path().join(format!("{kind}{i}.csv"));
                let p = path.to_str().unwrap();
                let mut args = vec![kind, net, "--out", p];
                if kind == "bench" {
                    args.extend(["--seed", "1", "--runs", "50", "--no-timing"]);
                }
                cli_output(&args);
                std::fs::read(&path).unwrap()
            })
            .collect();
        same.push((kind, files[0] == files[1] && !files[0].is_empty(), files[0].len()));
    }
    s.record(
        7,
        same.iter().all(|x| x.1),
        "byte-identical reruns",
        same.iter()
            .map(|(k, ok, n)| format!("{k} csv {n} bytes identical: {ok}"))
            .collect::<Vec<_>>()
            .join("; "),
    );
}

fn main() {
    // `cargo test` passes harness flags; a name filter that matches nothing
    // here skips the suite.
    let args: Vec<String> = std::env::args().skip(1).collect();
    if args.iter().any(|a| a == "--list") {
        println!("acceptance: test");
        return;
    }
    if let Some(filter) = args.iter().find(|a| !a.starts_with('-')) {
        if !"acceptance".contains(filter.as_str()) {
            return;
        }
    }

    let mut s = Suite { failed: Vec::new() };
    meshed_loss(&mut s);
    census(&mut s);
    let runs = run_bench(&load("ieee14.net"), &bench_config()).unwrap();
    quality(&mut s, &runs);
    frugality(&mut s, &runs);
    timing(&mut s, &runs);
    invariants(&mut s);
    determinism(&mut s);

    if s.failed.is_empty() {
        println!("acceptance: all criteria pass");
    } else {
        s.failed.dedup();
        println!("acceptance: failing criteria {:?}", s.failed);
        std::process::exit(1);
    }
}
