//! Mass-shell node sets: tensor Gauss–Hermite rules and discrete mode sets.
//!
//! A node set is a list of slots `(p, w)`: a signed on-shell momentum and the
//! positive weight of `d³k / 2ε` at that node. Every node appears with both
//! signs, so the set is symmetric under `p ↦ -p`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kinematics::energy;
use crate::oracle::ModeSet;
use crate::FourVec;

/// Gauss–Hermite nodes and weights for `∫ e^{-x²} g(x) dx`, ascending.
///
/// Golub–Welsch eigenvalues polished by Newton steps on the orthonormal
/// Hermite recurrence; weights from `2 / h_n'(x)²`.
pub fn gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "at least one node");
    let jac = DMatrix::<f64>::from_fn(n, n, |i, j| if i.abs_diff(j) == 1 { (i.max(j) as f64 / 2.0).sqrt() } else { 0.0 });
    let mut x: Vec<f64> = jac.symmetric_eigen().eigenvalues.iter().copied().collect();
    x.sort_by(f64::total_cmp);
    let pi4 = std::f64::consts::PI.powf(-0.25);
    // orthonormal h_n(x) and h_{n-1}(x)
    let eval = |z: f64| {
        let (mut p0, mut p1) = (0.0, pi4);
        for j in 1..=n {
            let jf = j as f64;
            let p2 = z * (2.0 / jf).sqrt() * p1 - ((jf - 1.0) / jf).sqrt() * p0;
            p0 = p1;
            p1 = p2;
        }
        (p1, p0)
    };
    let mut w = vec![0.0; n];
    for (xi, wi) in x.iter_mut().zip(w.iter_mut()) {
        for _ in 0..3 {
            let (pn, pm) = eval(*xi);
            let d = (2.0 * n as f64).sqrt() * pm;
            *xi -= pn / d;
        }
        let (_, pm) = eval(*xi);
        let d = (2.0 * n as f64).sqrt() * pm;
        *wi = 2.0 / (d * d);
    }
    for i in 0..n / 2 {
        let j = n - 1 - i;
        let a = 0.5 * (x[j] - x[i]);
        x[i] = -a;
        x[j] = a;
        let b = 0.5 * (w[i] + w[j]);
        w[i] = b;
        w[j] = b;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

/// One signed integration point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Slot {
    pub p: FourVec,
    pub weight: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NodeSet {
    pub mass: f64,
    pub slots: Vec<Slot>,
}

impl NodeSet {
    /// Tensor Gauss–Hermite rule in `k = center + scale·u`, `order` points per axis.
    pub fn gauss_hermite(order: usize, scale: f64, center: [f64; 3], mass: f64) -> Result<Self> {
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(Error::InvalidModes(format!("quadrature scale must be positive, got {scale}")));
        }
        energy([0.0; 3], mass)?;
        let (u, w) = gauss_hermite(order);
        let mut slots = Vec::with_capacity(2 * order * order * order);
        for a in 0..order {
            for b in 0..order {
                for c in 0..order {
                    let uu = [u[a], u[b], u[c]];
                    let k = [center[0] + scale * uu[0], center[1] + scale * uu[1], center[2] + scale * uu[2]];
                    let e = energy(k, mass)?;
                    let r2 = uu[0] * uu[0] + uu[1] * uu[1] + uu[2] * uu[2];
                    let weight = w[a] * w[b] * w[c] * r2.exp() * scale.powi(3) / (2.0 * e);
                    let p = FourVec::new(e, k);
                    slots.push(Slot { p, weight });
                    slots.push(Slot { p: -p, weight });
                }
            }
        }
        Ok(Self { mass, slots })
    }

    /// Slots `±p_i` with weights `Δ³k / 2ε_i`.
    pub fn from_modes(ms: &ModeSet) -> Self {
        let mut slots = Vec::with_capacity(2 * ms.len());
        for i in 0..ms.len() {
            let p = ms.momentum(i);
            let weight = ms.weight(i);
            slots.push(Slot { p, weight });
            slots.push(Slot { p: -p, weight });
        }
        Self { mass: ms.mass(), slots }
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }
}
