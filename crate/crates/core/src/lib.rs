//! Thermal (KMS) n-point functions of deformed free scalar fields on Moyal
//! Minkowski space.
//!
//! The kinematic layer is generic over [`Real`]; everything downstream of it
//! works in `f64` through the aliases below.

pub mod algebra;
pub mod conventions;
pub mod error;
pub mod functionals;
pub mod kinematics;
pub mod oracle;
pub mod scalar;
pub mod sum;
pub mod twist;
pub mod verify;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use scalar::Real;

pub type FourVec = kinematics::FourVector<f64>;
pub type Skew = kinematics::SkewMatrix<f64>;
pub type Lorentz = kinematics::LorentzTransform<f64>;
pub type OnShell = kinematics::OnShellMomentum<f64>;
pub type Orbit = kinematics::ThetaOrbit<f64>;

pub type FourVec32 = kinematics::FourVector<f32>;
pub type Skew32 = kinematics::SkewMatrix<f32>;
pub type Lorentz32 = kinematics::LorentzTransform<f32>;
