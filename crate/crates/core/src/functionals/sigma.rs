//! Spectral measures on the energy-momentum spectrum and their Fourier data.

use nalgebra::Matrix4;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kinematics::dot;
use crate::FourVec;

/// Below this sup-norm a translation argument counts as the origin.
pub const ORIGIN_TOL: f64 = 1e-12;

/// Positive measure of mass at most one on the closed forward cone.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum SigmaMeasure {
    Zero,
    Dirac {
        q: FourVec,
    },
    /// Gaussian density `mass · N(mean, covariance)` in the four components.
    GaussianDensity {
        mean: FourVec,
        covariance: [[f64; 4]; 4],
        mass: f64,
    },
}

fn in_forward_cone(q: &FourVec) -> bool {
    let k = (q.k[0] * q.k[0] + q.k[1] * q.k[1] + q.k[2] * q.k[2]).sqrt();
    q.p0 >= k - 1e-12 * (1.0 + k)
}

impl SigmaMeasure {
    pub fn validate(&self) -> Result<()> {
        match self {
            SigmaMeasure::Zero => Ok(()),
            SigmaMeasure::Dirac { q } => {
                if in_forward_cone(q) {
                    Ok(())
                } else {
                    Err(Error::InvalidSigma(format!("Dirac point {:?} outside the forward cone", q.to_array())))
                }
            }
            SigmaMeasure::GaussianDensity { mean, covariance, mass } => {
                if !(0.0..=1.0).contains(mass) {
                    return Err(Error::InvalidSigma(format!("mass {mass} outside [0, 1]")));
                }
                if !in_forward_cone(mean) {
                    return Err(Error::InvalidSigma("Gaussian mean outside the forward cone".into()));
                }
                let c = Matrix4::from_fn(|i, j| covariance[i][j]);
                if (c - c.transpose()).abs().max() > 1e-12 * (1.0 + c.abs().max()) || c.cholesky().is_none() {
                    return Err(Error::InvalidSigma("covariance must be symmetric positive definite".into()));
                }
                Ok(())
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, SigmaMeasure::Zero)
    }
}

/// `σ̂(x)`: the Fourier transform `∫ e^{iq·x} dσ(q)` away from the origin and
/// exactly 1 at the origin.
pub fn sigma_hat_eval(sigma: &SigmaMeasure, x: &FourVec) -> Complex64 {
    if x.max_abs() <= ORIGIN_TOL {
        return Complex64::new(1.0, 0.0);
    }
    match sigma {
        SigmaMeasure::Zero => Complex64::new(0.0, 0.0),
        SigmaMeasure::Dirac { q } => Complex64::from_polar(1.0, dot(q, x)),
        SigmaMeasure::GaussianDensity { mean, covariance, mass } => {
            let v = x.to_array();
            // characteristic function in the variables (q⁰, q) paired with (-x⁰, x)
            let w = [-v[0], v[1], v[2], v[3]];
            let mut quad = 0.0;
            for i in 0..4 {
                for j in 0..4 {
                    quad += w[i] * covariance[i][j] * w[j];
                }
            }
            mass * Complex64::from_polar((-0.5 * quad).exp(), dot(mean, x))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gauss() -> SigmaMeasure {
        let mut cov = [[0.0; 4]; 4];
        for (i, row) in cov.iter_mut().enumerate() {
            row[i] = 0.1 * (i + 1) as f64;
        }
        SigmaMeasure::GaussianDensity { mean: FourVec::new(2.0, [0.5, 0.0, 0.0]), covariance: cov, mass: 0.7 }
    }

    #[test]
    fn origin_is_one() {
        for s in [SigmaMeasure::Zero, SigmaMeasure::Dirac { q: FourVec::new(1.0, [0.2, 0.0, 0.0]) }, gauss()] {
            assert_eq!(sigma_hat_eval(&s, &FourVec::zero()), Complex64::new(1.0, 0.0));
        }
    }

    #[test]
    fn zero_and_dirac() {
        let x = FourVec::new(0.3, [1.0, -2.0, 0.0]);
        assert_eq!(sigma_hat_eval(&SigmaMeasure::Zero, &x), Complex64::new(0.0, 0.0));
        assert_eq!(sigma_hat_eval(&SigmaMeasure::Dirac { q: FourVec::zero() }, &x), Complex64::new(1.0, 0.0));
        let q = FourVec::new(1.5, [0.3, 0.4, 0.0]);
        let v = sigma_hat_eval(&SigmaMeasure::Dirac { q }, &x);
        assert!((v - Complex64::from_polar(1.0, dot(&q, &x))).norm() < 1e-15);
    }

    #[test]
    fn bounded_by_one() {
        let g = gauss();
        for i in 0..50 {
            let x = FourVec::new(0.1 * i as f64, [0.05 * i as f64, -0.2, 0.3]);
            assert!(sigma_hat_eval(&g, &x).norm() <= 1.0);
        }
    }

    #[test]
    fn validation() {
        assert!(SigmaMeasure::Dirac { q: FourVec::new(0.5, [1.0, 0.0, 0.0]) }.validate().is_err());
        assert!(gauss().validate().is_ok());
        let SigmaMeasure::GaussianDensity { mean, covariance, .. } = gauss() else { unreachable!() };
        assert!(SigmaMeasure::GaussianDensity { mean, covariance, mass: 1.5 }.validate().is_err());
        assert!(SigmaMeasure::GaussianDensity { mean, covariance: [[0.0; 4]; 4], mass: 0.5 }.validate().is_err());
    }
}
