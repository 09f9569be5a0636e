use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

use super::{Network, SwitchId};

/// Dense bus admittance matrix, row-major, indexed by bus position.
#[derive(Debug, Clone, PartialEq)]
pub struct AdmittanceMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl AdmittanceMatrix {
    pub fn zeros(n: usize) -> Self {
        AdmittanceMatrix {
            n,
            data: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    #[inline]
    fn add(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.n + j] += v;
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    /// Largest `|Y[i][j] - Y[j][i]|`.
    pub fn max_asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                worst = worst.max((self.get(i, j) - self.get(j, i)).norm());
            }
        }
        worst
    }
}

/// The four entries a single branch adds to the admittance matrix, as
/// `(row, col, value)`: from-from, from-to, to-from, to-to.
pub fn branch_stamp(net: &Network, s: SwitchId) -> [(usize, usize, Complex64); 4] {
    let br = net.branch(s);
    let (f, t) = net.ends(s);
    let ys = Complex64::new(br.r, br.x).inv();
    let charging = Complex64::new(0.0, br.b_half);
    let tap = br.tap;
    [
        (f, f, (ys + charging) / (tap * tap)),
        (f, t, -ys / tap),
        (t, f, -ys / tap),
        (t, t, ys + charging),
    ]
}

/// Assembles Y-bus from the closed branches plus every bus shunt. Open
/// branches contribute nothing.
pub fn build_admittance(
    net: &Network,
    closed: impl IntoIterator<Item = SwitchId>,
) -> AdmittanceMatrix {
    let mut y = AdmittanceMatrix::zeros(net.n_buses());
    for (i, bus) in net.buses().iter().enumerate() {
        y.add(i, i, Complex64::new(0.0, bus.shunt_b));
    }
    for s in closed {
        for (r, c, v) in branch_stamp(net, s) {
            y.add(r, c, v);
        }
    }
    y
}
