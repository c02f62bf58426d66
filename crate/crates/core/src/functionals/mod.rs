//! Candidate KMS functionals: the undeformed state, single fibers, and the
//! σ-parametrised family on the covariant algebra.

pub mod kernel;
pub mod quadrature;
pub mod sigma;
pub mod smeared;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::{FourVec, Skew};

pub use kernel::{
    bose, enumerate_contractions, omega0_kernel, omega_sigma_kernel, omega_sigma_kernel_translated, omega_theta_kernel, Contraction,
};
pub use quadrature::{gauss_hermite, NodeSet};
pub use sigma::{sigma_hat_eval, SigmaMeasure};
pub use smeared::{omega_smeared, Integrator, MonomialReport, QuadratureSpec, SmearedReport, TermReport};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum FunctionalKind {
    ZeroFiber,
    Fiber { theta: Skew },
    Covariant { sigma: SigmaMeasure },
}

/// Inverse temperature, particle mass and functional kind.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThermalFunctional {
    pub beta: f64,
    pub mass: f64,
    pub kind: FunctionalKind,
}

impl ThermalFunctional {
    pub fn new(beta: f64, mass: f64, kind: FunctionalKind) -> Result<Self> {
        if !(beta > 0.0) || !beta.is_finite() {
            return Err(Error::NonPositiveBeta(beta));
        }
        if !(mass > 0.0) || !mass.is_finite() {
            return Err(Error::NonPositiveMass(mass));
        }
        if let FunctionalKind::Covariant { sigma } = &kind {
            sigma.validate()?;
        }
        Ok(Self { beta, mass, kind })
    }

    pub fn zero_fiber(beta: f64, mass: f64) -> Result<Self> {
        Self::new(beta, mass, FunctionalKind::ZeroFiber)
    }

    pub fn fiber(beta: f64, mass: f64, theta: Skew) -> Result<Self> {
        Self::new(beta, mass, FunctionalKind::Fiber { theta })
    }

    pub fn covariant(beta: f64, mass: f64, sigma: SigmaMeasure) -> Result<Self> {
        Self::new(beta, mass, FunctionalKind::Covariant { sigma })
    }

    /// Fiber on which a single-fiber functional lives.
    pub fn fiber_theta(&self) -> Option<Skew> {
        match &self.kind {
            FunctionalKind::ZeroFiber => Some(Skew::zero()),
            FunctionalKind::Fiber { theta } => Some(*theta),
            FunctionalKind::Covariant { .. } => None,
        }
    }

    /// Stripped kernel of `φ̃_{θ₁}(p₁)…φ̃_{θₙ}(pₙ)`.
    pub fn kernel(&self, fibers: &[Skew], momenta: &[FourVec]) -> Result<num_complex::Complex64> {
        match &self.kind {
            FunctionalKind::Covariant { sigma } => omega_sigma_kernel(self.beta, self.mass, fibers, momenta, sigma),
            _ => {
                let theta = self.fiber_theta().expect("single fiber");
                if fibers.len() != momenta.len() {
                    return Err(Error::LengthMismatch(format!("{} fibers for {} momenta", fibers.len(), momenta.len())));
                }
                if fibers.iter().any(|t| !t.approx_eq(&theta, 1e-12)) {
                    return Err(Error::Inadmissible("leg outside the functional's fiber".into()));
                }
                omega_theta_kernel(self.beta, self.mass, &theta, momenta)
            }
        }
    }
}
