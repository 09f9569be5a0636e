//! Polar Newton-Raphson power-balance system.
//!
//! Unknowns are ordered `[angle of every PV and PQ bus, magnitude of every
//! PQ bus]`, both in bus-position order. Mismatches follow the same layout:
//! `[P for PV and PQ buses, Q for PQ buses]`, computed minus specified.

use alloc::vec;
use alloc::vec::Vec;
use libm::{cos, sin};

use crate::graphops::Topology;
use crate::netmodel::{build_admittance, AdmittanceMatrix, BusKind, Network};

#[derive(Debug, Clone)]
pub struct NewtonSystem {
    y: AdmittanceMatrix,
    pvpq: Vec<usize>,
    pq: Vec<usize>,
    /// Specified net injection per bus (pu).
    p_spec: Vec<f64>,
    q_spec: Vec<f64>,
    v_mag: Vec<f64>,
    v_ang: Vec<f64>,
}

impl NewtonSystem {
    /// Builds the system for `topo` with the given per-bus kinds and
    /// starting voltages. `q_spec` for PQ buses is taken from the network
    /// unless overridden later with [`NewtonSystem::fix_reactive`].
    pub fn new(
        net: &Network,
        topo: &Topology,
        kinds: &[BusKind],
        v_mag: Vec<f64>,
        v_ang: Vec<f64>,
    ) -> Self {
        let base = net.base_mva();
        let y = build_admittance(net, topo.closed());
        let pvpq = (0..kinds.len()).filter(|&i| kinds[i] != BusKind::Slack).collect();
        let pq = (0..kinds.len()).filter(|&i| kinds[i] == BusKind::Load).collect();
        let p_spec = net.buses().iter().map(|b| (b.p_gen - b.p_load) / base).collect();
        let q_spec = net.buses().iter().map(|b| (b.q_gen - b.q_load) / base).collect();
        NewtonSystem {
            y,
            pvpq,
            pq,
            p_spec,
            q_spec,
            v_mag,
            v_ang,
        }
    }

    /// Pins the specified reactive injection of a bus (pu).
    pub fn fix_reactive(&mut self, bus: usize, q: f64) {
        self.q_spec[bus] = q;
    }

    pub fn dim(&self) -> usize {
        self.pvpq.len() + self.pq.len()
    }

    pub fn voltages(&self) -> (&[f64], &[f64]) {
        (&self.v_mag, &self.v_ang)
    }

    pub fn state(&self) -> Vec<f64> {
        let mut x: Vec<f64> = self.pvpq.iter().map(|&i| self.v_ang[i]).collect();
        x.extend(self.pq.iter().map(|&i| self.v_mag[i]));
        x
    }

    pub fn set_state(&mut self, x: &[f64]) {
        let na = self.pvpq.len();
        for (k, &i) in self.pvpq.iter().enumerate() {
            self.v_ang[i] = x[k];
        }
        for (k, &i) in self.pq.iter().enumerate() {
            self.v_mag[i] = x[na + k];
        }
    }

    /// Computed injections `P_i + jQ_i = V_i * conj(sum_j Y_ij V_j)` (pu).
    pub fn injections(&self) -> (Vec<f64>, Vec<f64>) {
        let n = self.v_mag.len();
        let mut p = vec![0.0; n];
        let mut q = vec![0.0; n];
        for i in 0..n {
            for (j, yij) in self.y.row(i).iter().enumerate() {
                if yij.re == 0.0 && yij.im == 0.0 {
                    continue;
                }
                let d = self.v_ang[i] - self.v_ang[j];
                let (s, c) = (sin(d), cos(d));
                let vv = self.v_mag[i] * self.v_mag[j];
                p[i] += vv * (yij.re * c + yij.im * s);
                q[i] += vv * (yij.re * s - yij.im * c);
            }
        }
        (p, q)
    }

    pub fn mismatch(&self) -> Vec<f64> {
        let (p, q) = self.injections();
        let mut f: Vec<f64> = self.pvpq.iter().map(|&i| p[i] - self.p_spec[i]).collect();
        f.extend(self.pq.iter().map(|&i| q[i] - self.q_spec[i]));
        f
    }

    /// Analytic Jacobian of [`NewtonSystem::mismatch`], row-major.
    pub fn jacobian(&self) -> Vec<f64> {
        let (p, q) = self.injections();
        let na = self.pvpq.len();
        let dim = self.dim();
        let mut jac = vec![0.0; dim * dim];

        // column index of each bus's angle / magnitude unknown
        let n = self.v_mag.len();
        let mut ang_col = vec![usize::MAX; n];
        let mut mag_col = vec![usize::MAX; n];
        for (k, &i) in self.pvpq.iter().enumerate() {
            ang_col[i] = k;
        }
        for (k, &i) in self.pq.iter().enumerate() {
            mag_col[i] = na + k;
        }

        let p_rows = self.pvpq.iter().map(|&i| (i, true));
        let q_rows = self.pq.iter().map(|&i| (i, false));
        for (row, (i, is_p)) in p_rows.chain(q_rows).enumerate() {
            let vi = self.v_mag[i];
            for (j, yij) in self.y.row(i).iter().enumerate() {
                let (g, b) = (yij.re, yij.im);
                if g == 0.0 && b == 0.0 && i != j {
                    continue;
                }
                let (d_ang, d_mag) = if i == j {
                    if is_p {
                        (-q[i] - b * vi * vi, p[i] / vi + g * vi)
                    } else {
                        (p[i] - g * vi * vi, q[i] / vi - b * vi)
                    }
                } else {
                    let d = self.v_ang[i] - self.v_ang[j];
                    let (s, c) = (sin(d), cos(d));
                    let vj = self.v_mag[j];
                    if is_p {
                        (vi * vj * (g * s - b * c), vi * (g * c + b * s))
                    } else {
                        (-vi * vj * (g * c + b * s), vi * (g * s - b * c))
                    }
                };
                if ang_col[j] != usize::MAX {
                    jac[row * dim + ang_col[j]] = d_ang;
                }
                if mag_col[j] != usize::MAX {
                    jac[row * dim + mag_col[j]] = d_mag;
                }
            }
        }
        jac
    }
}

pub(crate) fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

/// Runs Newton iterations until the largest mismatch is at most `tol` or
/// `max_iter` steps have been taken. Returns `(converged, steps, max
/// mismatch)`.
pub fn iterate(sys: &mut NewtonSystem, tol: f64, max_iter: usize) -> (bool, usize, f64) {
    let mut steps = 0;
    loop {
        let mut f = sys.mismatch();
        let norm = max_abs(&f);
        if !norm.is_finite() {
            return (false, steps, norm);
        }
        if norm <= tol {
            return (true, steps, norm);
        }
        if steps == max_iter {
            return (false, steps, norm);
        }
        let mut jac = sys.jacobian();
        if super::lu::solve_in_place(&mut jac, &mut f).is_none() {
            return (false, steps, norm);
        }
        let mut x = sys.state();
        for (xi, dx) in x.iter_mut().zip(&f) {
            *xi -= dx;
        }
        sys.set_state(&x);
        steps += 1;
    }
}
