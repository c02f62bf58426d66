use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("mass must be positive, got {0}")]
    NonPositiveMass(f64),
    #[error("inverse temperature must be positive, got {0}")]
    NonPositiveBeta(f64),
    #[error("non-finite component in {0}")]
    NonFinite(&'static str),
    #[error("matrix is not Lorentz-skew: defect {defect:e}")]
    NotLorentzSkew { defect: f64 },
    #[error("matrix is not a proper orthochronous Lorentz transform: {0}")]
    NotLorentz(String),
    #[error("contraction enumeration needs an even number of indices, got {0}")]
    OddContraction(usize),
    #[error("singular Bose factor: |1 - exp(beta z)| = {0:e}")]
    SingularBose(f64),
    #[error("momentum {0} is off the mass shell")]
    OffShell(usize),
    #[error("momenta admit no pairing p_r = -p_l")]
    NotPaired,
    #[error("length mismatch: {0}")]
    LengthMismatch(String),
    #[error("sharp-momentum generator not admissible in smeared evaluation")]
    SharpInSmeared,
    #[error("generator not admissible here: {0}")]
    Inadmissible(String),
    #[error("invalid sigma measure: {0}")]
    InvalidSigma(String),
    #[error("integration did not converge: estimated error {achieved:e} > target {target:e}")]
    NonConvergence { achieved: f64, target: f64 },
    #[error("Hilbert space dimension {dim} exceeds bound {bound}")]
    DimensionTooLarge { dim: usize, bound: usize },
    #[error("sharp momentum does not match any mode")]
    NotAMode,
    #[error("invalid mode set: {0}")]
    InvalidModes(String),
    #[error("invalid packet: {0}")]
    InvalidPacket(String),
}

pub type Result<T> = std::result::Result<T, Error>;
