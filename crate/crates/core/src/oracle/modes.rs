//! Finite momentum modes with an occupation cutoff.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kinematics::energy;
use crate::FourVec;

/// Default bound on the truncated Hilbert space dimension.
pub const DEFAULT_MAX_DIM: usize = 4096;
/// Target for the neglected Boltzmann tail `e^{-(N+1)βε_min}`.
pub const TAIL_TARGET: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModeSet {
    modes: Vec<[f64; 3]>,
    mass: f64,
    cutoff: usize,
    cell_volume: f64,
}

impl ModeSet {
    pub fn new(modes: Vec<[f64; 3]>, mass: f64, cutoff: usize, cell_volume: f64, max_dim: usize) -> Result<Self> {
        energy([0.0; 3], mass)?;
        if modes.is_empty() {
            return Err(Error::InvalidModes("empty mode list".into()));
        }
        if cutoff == 0 {
            return Err(Error::InvalidModes("occupation cutoff must be at least 1".into()));
        }
        if !(cell_volume > 0.0) || !cell_volume.is_finite() {
            return Err(Error::InvalidModes(format!("cell volume must be positive, got {cell_volume}")));
        }
        for (i, a) in modes.iter().enumerate() {
            if !a.iter().all(|c| c.is_finite()) {
                return Err(Error::NonFinite("mode momentum"));
            }
            if modes[..i].iter().any(|b| b == a) {
                return Err(Error::InvalidModes(format!("duplicate mode {a:?}")));
            }
        }
        let ms = Self { modes, mass, cutoff, cell_volume };
        let dim = ms.checked_dim().unwrap_or(usize::MAX);
        if dim > max_dim {
            return Err(Error::DimensionTooLarge { dim, bound: max_dim });
        }
        Ok(ms)
    }

    /// Mode set whose cutoff is the smallest `N` with `e^{-(N+1)βε_min} < 10⁻¹⁰`.
    pub fn with_auto_cutoff(modes: Vec<[f64; 3]>, mass: f64, beta: f64, cell_volume: f64, max_dim: usize) -> Result<Self> {
        if !(beta > 0.0) {
            return Err(Error::NonPositiveBeta(beta));
        }
        let e_min = modes.iter().map(|k| energy(*k, mass)).collect::<Result<Vec<_>>>()?.into_iter().fold(f64::INFINITY, f64::min);
        Self::new(modes, mass, auto_cutoff(beta, e_min), cell_volume, max_dim)
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn cell_volume(&self) -> f64 {
        self.cell_volume
    }

    pub fn modes(&self) -> &[[f64; 3]] {
        &self.modes
    }

    fn checked_dim(&self) -> Option<usize> {
        (self.cutoff + 1).checked_pow(self.modes.len() as u32)
    }

    /// `(N+1)^{#modes}`.
    pub fn dim(&self) -> usize {
        self.checked_dim().expect("dimension validated at construction")
    }

    pub fn energy(&self, i: usize) -> f64 {
        energy(self.modes[i], self.mass).expect("validated mass")
    }

    /// Positive-shell momentum `(ε(k_i), k_i)`.
    pub fn momentum(&self, i: usize) -> FourVec {
        FourVec::new(self.energy(i), self.modes[i])
    }

    /// Measure weight `Δ³k / 2ε(k_i)`.
    pub fn weight(&self, i: usize) -> f64 {
        self.cell_volume / (2.0 * self.energy(i))
    }

    pub fn min_energy(&self) -> f64 {
        (0..self.len()).map(|i| self.energy(i)).fold(f64::INFINITY, f64::min)
    }

    /// Boltzmann tail `e^{-(N+1)βε_min}` neglected by the truncation.
    pub fn truncation_bound(&self, beta: f64) -> f64 {
        (-((self.cutoff + 1) as f64) * beta * self.min_energy()).exp()
    }

    /// Mode index and sign of a sharp momentum `±p_i`.
    pub fn find(&self, p: &FourVec) -> Option<(usize, i8)> {
        let tol = 1e-12 * p.max_abs().max(1.0);
        (0..self.len()).find_map(|i| {
            let q = self.momentum(i);
            if (*p - q).max_abs() <= tol {
                Some((i, 1))
            } else if (*p + q).max_abs() <= tol {
                Some((i, -1))
            } else {
                None
            }
        })
    }

    /// Same modes and cutoff at a different dimension bound check.
    pub fn with_cutoff(&self, cutoff: usize, max_dim: usize) -> Result<Self> {
        Self::new(self.modes.clone(), self.mass, cutoff, self.cell_volume, max_dim)
    }
}

/// Smallest `N` with `e^{-(N+1)βε_min} <` [`TAIL_TARGET`].
pub fn auto_cutoff(beta: f64, e_min: f64) -> usize {
    let n = (-TAIL_TARGET.ln() / (beta * e_min)).floor() as usize;
    let mut n = n.saturating_sub(1).max(1);
    while (-((n + 1) as f64) * beta * e_min).exp() >= TAIL_TARGET {
        n += 1;
    }
    n
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cutoff_choice() {
        assert_eq!(auto_cutoff(1.0, 1.0), 23);
        for (b, e) in [(1.0, 1.0), (0.5, 1.3), (3.0, 2.0), (50.0, 1.0)] {
            let n = auto_cutoff(b, e);
            assert!((-((n + 1) as f64) * b * e).exp() < TAIL_TARGET);
            assert!(n == 1 || (-(n as f64) * b * e).exp() >= TAIL_TARGET);
        }
    }

    #[test]
    fn validation() {
        assert!(ModeSet::new(vec![[0.0; 3], [0.0; 3]], 1.0, 2, 1.0, 4096).is_err());
        assert!(ModeSet::new(vec![[0.0; 3]], 0.0, 2, 1.0, 4096).is_err());
        assert!(matches!(
            ModeSet::new(vec![[0.0; 3], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]], 1.0, 23, 1.0, 4096),
            Err(Error::DimensionTooLarge { dim: 13824, .. })
        ));
        let ms = ModeSet::with_auto_cutoff(vec![[0.0; 3], [0.5, 0.0, 0.0]], 1.0, 1.0, 0.1, 4096).unwrap();
        assert_eq!(ms.cutoff(), 23);
        assert_eq!(ms.dim(), 576);
        assert_eq!(ms.find(&-ms.momentum(1)), Some((1, -1)));
        assert_eq!(ms.find(&FourVec::new(2.0, [0.0; 3])), None);
    }
}
