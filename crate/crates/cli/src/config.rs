//! Run configuration: parsed from TOML, validated before any computation and
//! embedded verbatim (after CLI overrides) in every report.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use moyal_kms::functionals::{FunctionalKind, Integrator, QuadratureSpec, SigmaMeasure, ThermalFunctional};
use moyal_kms::kinematics::{orbit_samples, ThetaOrbit};
use moyal_kms::oracle::{ModeSet, DEFAULT_MAX_DIM};
use moyal_kms::twist::GaussianPacket;
use moyal_kms::{FourVec, Skew};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub beta: f64,
    pub mass: f64,
    #[serde(default)]
    pub seed: u64,
    pub theta: ThetaSpec,
    #[serde(default)]
    pub orbit: OrbitSpec,
    pub functional: FunctionalSpec,
    #[serde(default)]
    pub packets: BTreeMap<String, PacketSpec>,
    #[serde(default)]
    pub integrator: IntegratorKind,
    #[serde(default)]
    pub quadrature: QuadratureSpec,
    #[serde(default)]
    pub modes: Option<ModesSpec>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub npoint: Option<NpointSpec>,
    #[serde(default)]
    pub kms: KmsSpec,
    #[serde(default)]
    pub gram: Option<GramSpec>,
    #[serde(default)]
    pub scan: ScanSpec,
    #[serde(default)]
    pub hermiticity: Option<NpointSpec>,
    #[serde(default)]
    pub covariance: CovarianceSpec,
    #[serde(default)]
    pub exchange: ExchangeSpec,
    #[serde(default)]
    pub oracle: OracleSpec,
}

/// Reference deformation: either covariant components or the `(0,1)` block.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "snake_case")]
pub enum ThetaSpec {
    /// `θ_{μν}`, antisymmetric.
    Lower([[f64; 4]; 4]),
    /// `θ_{01} = -θ_{10} = κ`.
    Kappa(f64),
}

/// Orbit grid: the reference, then rotation ∘ boost for every (rapidity, angle).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OrbitSpec {
    #[serde(default)]
    pub rapidities: Vec<f64>,
    #[serde(default)]
    pub angles: Vec<f64>,
}

impl Default for OrbitSpec {
    fn default() -> Self {
        Self { rapidities: vec![0.0, 0.6], angles: vec![0.9] }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "snake_case", tag = "kind")]
pub enum FunctionalSpec {
    ZeroFiber,
    Fiber { fiber: String },
    Covariant { sigma: SigmaMeasure },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PacketSpec {
    pub center: [f64; 4],
    pub momentum: [f64; 4],
    pub width: f64,
    /// `[re, im]`.
    pub amplitude: [f64; 2],
}

impl PacketSpec {
    pub fn build(&self) -> Result<GaussianPacket> {
        let a = Complex64::new(self.amplitude[0], self.amplitude[1]);
        Ok(GaussianPacket::new(FourVec::from_array(self.center), FourVec::from_array(self.momentum), self.width, a)?)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IntegratorKind {
    #[default]
    GaussHermite,
    Modes,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModesSpec {
    pub momenta: Vec<[f64; 3]>,
    pub cell_volume: f64,
    /// Occupation cutoff; chosen from the Boltzmann tail bound when absent.
    #[serde(default)]
    pub cutoff: Option<usize>,
    #[serde(default = "default_max_dim")]
    pub max_dim: usize,
}

fn default_max_dim() -> usize {
    DEFAULT_MAX_DIM
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub kms: f64,
    pub gram: f64,
    pub hermiticity: f64,
    pub covariance: f64,
    pub exchange: f64,
    pub twisted_ccr: f64,
    pub warp: f64,
    pub rieffel_trace: f64,
    pub gibbs: f64,
    pub araki_woods: f64,
    pub vacuum: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            kms: 1e-8,
            gram: 1e-8,
            hermiticity: 1e-10,
            covariance: 1e-12,
            exchange: 1e-12,
            twisted_ccr: 1e-12,
            warp: 1e-12,
            rieffel_trace: 1e-10,
            gibbs: 1e-8,
            araki_woods: 1e-8,
            vacuum: 1e-10,
        }
    }
}

/// A polynomial document, by path relative to the config file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NpointSpec {
    pub polynomial: PathBuf,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KmsSpec {
    /// Polynomial documents; the unit when absent.
    #[serde(default)]
    pub f: Option<PathBuf>,
    #[serde(default)]
    pub g: Option<PathBuf>,
    pub t_min: f64,
    pub t_max: f64,
    pub points: usize,
}

impl Default for KmsSpec {
    fn default() -> Self {
        Self { f: None, g: None, t_min: -2.0, t_max: 2.0, points: 21 }
    }
}

/// Standard Gram family `{1, φ_θ(f₁), φ_θ(f₂), φ_θ'(f₁), φ_θ(f₁)φ_θ(f₂), φ_θ(f₁)φ_θ'(f₂), U(x₁), φ_θ(f₁)U(x₁)}`, `θ' = -θ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GramSpec {
    pub f1: String,
    pub f2: String,
    pub x1: [f64; 4],
    #[serde(default = "default_fiber")]
    pub fiber: String,
}

fn default_fiber() -> String {
    "theta".into()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScanSpec {
    pub draws: usize,
    /// Gauss–Hermite nodes of each energy-cutoff approximant.
    pub cutoff_nodes: usize,
    #[serde(default = "default_fiber")]
    pub fiber: String,
}

impl Default for ScanSpec {
    fn default() -> Self {
        Self { draws: 50, cutoff_nodes: 6, fiber: default_fiber() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CovarianceSpec {
    /// Boost along y, then rotation about z.
    pub rapidity: f64,
    pub angle: f64,
    pub configurations: usize,
    /// Field count per configuration (even).
    pub points: usize,
}

impl Default for CovarianceSpec {
    fn default() -> Self {
        Self { rapidity: 0.0, angle: 0.8, configurations: 100, points: 4 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExchangeSpec {
    pub fiber2: String,
    pub configurations: usize,
}

impl Default for ExchangeSpec {
    fn default() -> Self {
        Self { fiber2: "orbit:1".into(), configurations: 100 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OracleSpec {
    /// Occupation cutoff for the matrix identities.
    pub identity_cutoff: usize,
    /// Inverse temperature of the vacuum-limit comparison.
    pub vacuum_beta: f64,
    /// Translation used by the warp equivariance check.
    #[serde(default = "default_x")]
    pub x: [f64; 4],
    /// Zero-fiber polynomials for the warp and Rieffel checks; built from the
    /// first two packets when absent.
    #[serde(default)]
    pub f0: Option<PathBuf>,
    #[serde(default)]
    pub g0: Option<PathBuf>,
    /// Polynomials compared with Gibbs traces; 2- and 4-point words of the
    /// first two packets in the functional's fiber when empty.
    #[serde(default)]
    pub polynomials: Vec<PathBuf>,
}

impl Default for OracleSpec {
    fn default() -> Self {
        Self { identity_cutoff: 4, vacuum_beta: 50.0, x: default_x(), f0: None, g0: None, polynomials: Vec::new() }
    }
}

fn default_x() -> [f64; 4] {
    [0.2, 0.5, -0.1, 0.3]
}

/// Configuration together with the directory its relative paths refer to.
#[derive(Clone, Debug)]
pub struct Loaded {
    pub config: RunConfig,
    pub base: PathBuf,
}

pub fn load(path: &Path) -> Result<Loaded> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    let config: RunConfig = toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))?;
    config.validate()?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    Ok(Loaded { config, base })
}

impl RunConfig {
    /// Every consistency check that does not need a polynomial document.
    pub fn validate(&self) -> Result<()> {
        self.functional()?;
        self.theta0()?;
        for (name, p) in &self.packets {
            p.build().with_context(|| format!("packet {name}"))?;
        }
        if let Some(m) = &self.modes {
            self.mode_set_with(m)?;
        }
        if self.integrator == IntegratorKind::Modes && self.modes.is_none() {
            bail!("integrator = \"modes\" needs a [modes] table");
        }
        let q = &self.quadrature;
        if q.order < 3 || q.max_order < q.order || q.mc_batches < 2 || !(q.target > 0.0) || !(q.mc_target > 0.0) {
            bail!("invalid [quadrature] settings");
        }
        if self.kms.points == 0 || !(self.kms.t_max >= self.kms.t_min) {
            bail!("invalid [kms] grid");
        }
        if self.covariance.points % 2 != 0 || self.covariance.points == 0 {
            bail!("[covariance] points must be even and positive");
        }
        if let Some(g) = &self.gram {
            self.packet(&g.f1)?;
            self.packet(&g.f2)?;
            self.fiber(&g.fiber)?;
        }
        self.fiber(&self.scan.fiber)?;
        self.fiber(&self.exchange.fiber2)?;
        if !(self.oracle.vacuum_beta > 0.0) || self.oracle.identity_cutoff == 0 {
            bail!("invalid [oracle] settings");
        }
        Ok(())
    }

    pub fn theta0(&self) -> Result<Skew> {
        Ok(match &self.theta {
            ThetaSpec::Lower(l) => Skew::from_lower(*l)?,
            ThetaSpec::Kappa(k) => Skew::reference(*k),
        })
    }

    pub fn orbit(&self) -> Result<ThetaOrbit<f64>> {
        Ok(orbit_samples(&self.theta0()?, &self.orbit.rapidities, &self.orbit.angles))
    }

    /// Fiber labels: `zero`, `theta`, `-theta`, `orbit:N`, `-orbit:N`.
    pub fn fiber(&self, label: &str) -> Result<Skew> {
        let (sign, rest) = match label.strip_prefix('-') {
            Some(r) => (-1.0, r),
            None => (1.0, label),
        };
        let t = if rest == "zero" {
            Skew::zero()
        } else if rest == "theta" {
            self.theta0()?
        } else if let Some(i) = rest.strip_prefix("orbit:") {
            let i: usize = i.parse().with_context(|| format!("fiber label {label}"))?;
            let orbit = self.orbit()?;
            let n = orbit.samples.len();
            let t = orbit.thetas().nth(i).copied();
            t.ok_or_else(|| anyhow!("fiber {label}: orbit has {n} samples"))?
        } else {
            bail!("unknown fiber label {label:?}");
        };
        Ok(t.scaled(sign))
    }

    pub fn packet(&self, name: &str) -> Result<GaussianPacket> {
        self.packets.get(name).ok_or_else(|| anyhow!("unknown packet {name:?}"))?.build()
    }

    /// Packets in name order.
    pub fn packet_list(&self) -> Result<Vec<GaussianPacket>> {
        self.packets.values().map(PacketSpec::build).collect()
    }

    pub fn functional(&self) -> Result<ThermalFunctional> {
        let kind = match &self.functional {
            FunctionalSpec::ZeroFiber => FunctionalKind::ZeroFiber,
            FunctionalSpec::Fiber { fiber } => FunctionalKind::Fiber { theta: self.fiber(fiber)? },
            FunctionalSpec::Covariant { sigma } => FunctionalKind::Covariant { sigma: sigma.clone() },
        };
        Ok(ThermalFunctional::new(self.beta, self.mass, kind)?)
    }

    fn mode_set_with(&self, m: &ModesSpec) -> Result<ModeSet> {
        Ok(match m.cutoff {
            Some(n) => ModeSet::new(m.momenta.clone(), self.mass, n, m.cell_volume, m.max_dim)?,
            None => ModeSet::with_auto_cutoff(m.momenta.clone(), self.mass, self.beta, m.cell_volume, m.max_dim)?,
        })
    }

    pub fn mode_set(&self) -> Result<ModeSet> {
        let m = self.modes.as_ref().ok_or_else(|| anyhow!("this command needs a [modes] table"))?;
        self.mode_set_with(m)
    }

    pub fn integrator(&self) -> Result<Integrator> {
        Ok(match self.integrator {
            IntegratorKind::GaussHermite => Integrator::GaussHermite(QuadratureSpec { seed: self.seed, ..self.quadrature.clone() }),
            IntegratorKind::Modes => Integrator::Modes(self.mode_set()?),
        })
    }

    pub fn resolve(&self, base: &Path, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            base.join(p)
        }
    }
}
