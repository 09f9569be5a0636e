//! AC power flow by Newton-Raphson and the series-loss objective.

mod lu;
pub mod newton;

pub use lu::solve_in_place;

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use num_complex::Complex64;

use crate::graphops::Topology;
use crate::netmodel::{BusKind, Network};
use newton::NewtonSystem;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Largest accepted power mismatch (pu).
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Start PQ buses at 1.0 pu and all angles at 0. Otherwise start from
    /// the magnitudes and angles stored on the buses.
    pub flat_start: bool,
    /// Demote PV buses to PQ when their reactive output leaves
    /// `[q_min, q_max]`.
    pub enforce_q_limits: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            tolerance: 1e-8,
            max_iterations: 50,
            flat_start: true,
            enforce_q_limits: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PowerFlowError {
    /// Some bus has no closed path to the slack.
    Islanded,
    InvalidConfig(&'static str),
    TopologySize { expected: usize, got: usize },
}

impl fmt::Display for PowerFlowError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PowerFlowError::Islanded => f.write_str("topology leaves a bus without supply"),
            PowerFlowError::InvalidConfig(why) => write!(f, "invalid solver config: {why}"),
            PowerFlowError::TopologySize { expected, got } => {
                write!(f, "topology has {got} switches, network has {expected}")
            }
        }
    }
}

impl core::error::Error for PowerFlowError {}

/// Result of one power-flow run. Branch vectors are indexed by branch
/// position; open branches carry zero flow.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerFlowSolution {
    pub v_mag: Vec<f64>,
    pub v_ang: Vec<f64>,
    /// Flow leaving the from bus (MW / MVAr).
    pub p_branch: Vec<f64>,
    pub q_branch: Vec<f64>,
    /// Flow leaving the to bus (MW / MVAr).
    pub p_branch_to: Vec<f64>,
    pub q_branch_to: Vec<f64>,
    /// Net computed injection per bus (MW / MVAr).
    pub p_injection: Vec<f64>,
    pub q_injection: Vec<f64>,
    /// Real power lost in closed branches (MW).
    pub loss_total: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Largest mismatch at the final state (pu).
    pub max_mismatch: f64,
}

impl PowerFlowSolution {
    /// Loss used to rank topologies: the real loss when converged, infinity
    /// otherwise.
    pub fn ranking_loss(&self) -> f64 {
        if self.converged {
            self.loss_total
        } else {
            f64::INFINITY
        }
    }
}

/// Solves AC power flow on the closed branches of `topo`.
///
/// Non-convergence is not an error: the returned solution has
/// `converged == false` and carries the last iterate.
pub fn solve(
    net: &Network,
    topo: &Topology,
    cfg: &SolverConfig,
) -> Result<PowerFlowSolution, PowerFlowError> {
    if !(cfg.tolerance > 0.0) {
        return Err(PowerFlowError::InvalidConfig("tolerance must be positive"));
    }
    if cfg.max_iterations < 1 {
        return Err(PowerFlowError::InvalidConfig("max_iterations must be at least 1"));
    }
    if topo.n_switches() != net.n_branches() {
        return Err(PowerFlowError::TopologySize {
            expected: net.n_branches(),
            got: topo.n_switches(),
        });
    }
    if !topo.is_connected(net) {
        return Err(PowerFlowError::Islanded);
    }

    let base = net.base_mva();
    let mut kinds: Vec<BusKind> = net.buses().iter().map(|b| b.kind).collect();
    let (mut v_mag, mut v_ang): (Vec<f64>, Vec<f64>) = net
        .buses()
        .iter()
        .map(|b| match (cfg.flat_start, b.kind) {
            (true, BusKind::Load) => (1.0, 0.0),
            (true, BusKind::Generator) => (b.v_mag, 0.0),
            (true, BusKind::Slack) => (b.v_mag, b.v_ang),
            (false, _) => (b.v_mag, b.v_ang),
        })
        .unzip();
    let mut pinned_q: Vec<(usize, f64)> = Vec::new();
    let mut iterations = 0;

    let (converged, max_mismatch) = loop {
        let mut sys = NewtonSystem::new(net, topo, &kinds, v_mag, v_ang);
        for &(bus, q) in &pinned_q {
            sys.fix_reactive(bus, q);
        }
        let (ok, steps, mis) =
            newton::iterate(&mut sys, cfg.tolerance, cfg.max_iterations.saturating_sub(iterations).max(1));
        iterations += steps;
        let (m, a) = sys.voltages();
        v_mag = m.to_vec();
        v_ang = a.to_vec();
        if !ok || !cfg.enforce_q_limits {
            break (ok, mis);
        }
        let (_, q) = sys.injections();
        let violated: Vec<(usize, f64)> = net
            .buses()
            .iter()
            .enumerate()
            .filter(|&(i, _)| kinds[i] == BusKind::Generator)
            .filter_map(|(i, b)| {
                let q_gen = q[i] * base + b.q_load;
                if q_gen > b.q_max {
                    Some((i, (b.q_max - b.q_load) / base))
                } else if q_gen < b.q_min {
                    Some((i, (b.q_min - b.q_load) / base))
                } else {
                    None
                }
            })
            .collect();
        if violated.is_empty() {
            break (ok, mis);
        }
        for (i, q_fixed) in violated {
            kinds[i] = BusKind::Load;
            pinned_q.push((i, q_fixed));
        }
    };

    Ok(finish(net, topo, v_mag, v_ang, iterations, converged, max_mismatch))
}

fn finish(
    net: &Network,
    topo: &Topology,
    v_mag: Vec<f64>,
    v_ang: Vec<f64>,
    iterations: usize,
    converged: bool,
    max_mismatch: f64,
) -> PowerFlowSolution {
    let base = net.base_mva();
    let m = net.n_branches();
    let v: Vec<Complex64> = v_mag
        .iter()
        .zip(&v_ang)
        .map(|(&r, &th)| Complex64::from_polar(r, th))
        .collect();

    let mut p_branch = vec![0.0; m];
    let mut q_branch = vec![0.0; m];
    let mut p_branch_to = vec![0.0; m];
    let mut q_branch_to = vec![0.0; m];
    let mut p_injection = vec![0.0; net.n_buses()];
    let mut q_injection = vec![0.0; net.n_buses()];
    let mut loss = 0.0;

    for s in topo.closed() {
        let br = net.branch(s);
        let (f, t) = net.ends(s);
        let ys = Complex64::new(br.r, br.x).inv();
        let charging = Complex64::new(0.0, br.b_half);
        let i_from = (ys + charging) / (br.tap * br.tap) * v[f] - ys / br.tap * v[t];
        let i_to = -ys / br.tap * v[f] + (ys + charging) * v[t];
        let s_from = v[f] * i_from.conj() * base;
        let s_to = v[t] * i_to.conj() * base;
        let k = s.index();
        p_branch[k] = s_from.re;
        q_branch[k] = s_from.im;
        p_branch_to[k] = s_to.re;
        q_branch_to[k] = s_to.im;
        p_injection[f] += s_from.re;
        q_injection[f] += s_from.im;
        p_injection[t] += s_to.re;
        q_injection[t] += s_to.im;
        loss += s_from.re + s_to.re;
    }
    for (i, bus) in net.buses().iter().enumerate() {
        // shunt susceptance draws -b |V|^2 reactive power
        q_injection[i] -= bus.shunt_b * v_mag[i] * v_mag[i] * base;
    }

    PowerFlowSolution {
        v_mag,
        v_ang,
        p_branch,
        q_branch,
        p_branch_to,
        q_branch_to,
        p_injection,
        q_injection,
        loss_total: loss,
        iterations,
        converged,
        max_mismatch,
    }
}

/// Series loss `sum k_i r_i (P_i^2 + Q_i^2) / V_i^2` over closed branches,
/// using head-end (from-bus) flows and voltage. Returned in MW.
///
/// On a branch with unit tap and no charging this equals the exact I²R loss.
pub fn series_loss(net: &Network, topo: &Topology, sol: &PowerFlowSolution) -> f64 {
    let base = net.base_mva();
    topo.closed()
        .map(|s| {
            let k = s.index();
            let (f, _) = net.ends(s);
            let p = sol.p_branch[k] / base;
            let q = sol.q_branch[k] / base;
            let v = sol.v_mag[f];
            net.branch(s).r * (p * p + q * q) / (v * v)
        })
        .sum::<f64>()
        * base
}
