//! CSV reports.
//!
//! Numbers are written with Rust's shortest round-trip formatting, so a
//! reader recovers exactly the values the statistics were computed from.

use std::fmt::Write as _;

use hatsga_core::oracle::{rank_of, OracleReport};

use crate::bench::{BenchConfig, BenchRun, PRIORITY_MAX, RNG_NAME};
use crate::stats::{RunStatistics, Summary};

pub const BENCH_HEADER: &str = "run_index,initial_open,best_open,loss_mw,seconds";
pub const ORACLE_HEADER: &str = "rank,loss_mw,open_switches";

fn interval(s: &Summary) -> String {
    format!("[{} - {}]", s.ci95_low, s.ci95_high)
}

/// Runs whose best topology converged, as `(losses, seconds)`.
pub fn finite_runs(rows: impl IntoIterator<Item = (f64, f64)>) -> (Vec<f64>, Vec<f64>) {
    rows.into_iter().filter(|r| r.0.is_finite()).unzip()
}

/// Per-run rows followed by `mean`, `stddev` and `ci95` rows. Runs that
/// never found a converging topology report `inf` and are left out of the
/// statistics.
pub fn bench_csv(runs: &[BenchRun], cfg: &BenchConfig) -> String {
    let mut out = String::new();
    writeln!(
        out,
        "# runs={} seed={} rng={RNG_NAME} priorities=uniform 1..={PRIORITY_MAX} keep_ratio={} base_tree={:?} max_evals={} tol={} max_iter={} timing={}",
        cfg.runs,
        cfg.seed,
        cfg.search.elitism.keep_ratio,
        cfg.search.base_tree,
        cfg.search.max_evaluations.map_or("none".to_string(), |m| m.to_string()),
        cfg.search.solver.tolerance,
        cfg.search.solver.max_iterations,
        if cfg.timing { "wall-clock search seconds" } else { "off" },
    )
    .unwrap();
    writeln!(
        out,
        "# ci95 = mean +/- 1.96 * stddev / sqrt(N) (normal approximation); stddev uses N - 1"
    )
    .unwrap();
    let (losses, secs) = finite_runs(runs.iter().map(|r| (r.loss_mw, r.seconds)));
    writeln!(
        out,
        "# statistics over {} of {} runs; {} never reached a converging topology",
        losses.len(),
        runs.len(),
        runs.len() - losses.len()
    )
    .unwrap();
    writeln!(out, "{BENCH_HEADER}").unwrap();
    for r in runs {
        writeln!(
            out,
            "{},{},{},{},{}",
            r.index, r.initial_open, r.best_open, r.loss_mw, r.seconds
        )
        .unwrap();
    }
    if let Some(st) = RunStatistics::of(&losses, &secs) {
        writeln!(out, "mean,,,{},{}", st.loss_mw.mean, st.seconds.mean).unwrap();
        writeln!(out, "stddev,,,{},{}", st.loss_mw.stddev, st.seconds.stddev).unwrap();
        writeln!(out, "ci95,,,{},{}", interval(&st.loss_mw), interval(&st.seconds)).unwrap();
    }
    out
}

/// A bench CSV read back: `(loss, seconds)` per run and the statistics rows.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedBench {
    pub rows: Vec<(f64, f64)>,
    pub stats: RunStatistics,
}

fn parse_interval(s: &str) -> Option<(f64, f64)> {
    let inner = s.strip_prefix('[')?.strip_suffix(']')?;
    let (lo, hi) = inner.split_once(" - ")?;
    Some((lo.parse().ok()?, hi.parse().ok()?))
}

pub fn parse_bench_csv(text: &str) -> Option<ParsedBench> {
    let mut rows = Vec::new();
    let (mut mean, mut sd, mut ci) = (None, None, None);
    for line in text.lines().filter(|l| !l.starts_with('#') && *l != BENCH_HEADER) {
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 5 {
            return None;
        }
        match f[0] {
            "mean" => mean = Some((f[3].parse::<f64>().ok()?, f[4].parse::<f64>().ok()?)),
            "stddev" => sd = Some((f[3].parse::<f64>().ok()?, f[4].parse::<f64>().ok()?)),
            "ci95" => ci = Some((parse_interval(f[3])?, parse_interval(f[4])?)),
            _ => rows.push((f[3].parse().ok()?, f[4].parse().ok()?)),
        }
    }
    let (mean, sd, ci) = (mean?, sd?, ci?);
    let summary = |m: f64, s: f64, c: (f64, f64)| Summary {
        mean: m,
        stddev: s,
        ci95_low: c.0,
        ci95_high: c.1,
    };
    Some(ParsedBench {
        rows,
        stats: RunStatistics {
            loss_mw: summary(mean.0, sd.0, ci.0),
            seconds: summary(mean.1, sd.1, ci.1),
        },
    })
}

/// Converged trees in ascending loss order: `rank,loss_mw,open_switches`.
/// Trees within 1e-9 MW of each other share a rank.
pub fn oracle_csv(report: &OracleReport) -> String {
    let mut out = String::new();
    writeln!(out, "{ORACLE_HEADER}").unwrap();
    for e in &report.loss_histogram {
        writeln!(out, "{},{},{}", rank_of(report, e.loss_mw), e.loss_mw, e.open).unwrap();
    }
    out
}
