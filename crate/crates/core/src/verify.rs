//! Property checks: KMS boundary condition, Gram positivity, hermiticity,
//! Lorentz covariance of the fiber kernels and the exchange relation.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{heisenberg, star, FieldPolynomial, Generator, SpectralFn};
use crate::error::Result;
use crate::functionals::kernel::{omega_sigma_kernel, omega_theta_kernel, ordered_phase};
use crate::functionals::smeared::default_scale;
use crate::functionals::{omega_smeared, Integrator, SigmaMeasure, ThermalFunctional};
use crate::kinematics::conjugate_theta;
use crate::twist::GaussianPacket;
use crate::{FourVec, Lorentz, Skew};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KmsReport {
    pub t_grid: Vec<f64>,
    /// `ω(F τ_t(G))`.
    pub values: Vec<Complex64>,
    /// `ω(F τ_{t+iβ}(G))`.
    pub continued: Vec<Complex64>,
    /// `ω(τ_t(G) F)`.
    pub comparison: Vec<Complex64>,
    pub max_deviation: f64,
    pub max_error_estimate: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Fix one quadrature rule for every evaluation of a check.
fn freeze(integrator: &Integrator, polys: &[&FieldPolynomial]) -> Integrator {
    match integrator {
        Integrator::GaussHermite(spec) => {
            let mut s = spec.clone();
            if s.scale.is_none() {
                let scale = polys.iter().map(|p| default_scale(p, spec)).fold(0.0, f64::max);
                s.scale = Some(if scale > 0.0 { scale } else { 1.0 });
            }
            s.adaptive = false;
            Integrator::GaussHermite(s)
        }
        other => other.clone(),
    }
}

/// Compare `ω(F τ_{t+iβ}(G))` with `ω(τ_t(G) F)` on `t_grid`.
pub fn kms_check(
    f: &FieldPolynomial,
    g: &FieldPolynomial,
    phi: &ThermalFunctional,
    t_grid: &[f64],
    integrator: &Integrator,
    tol: f64,
) -> Result<KmsReport> {
    let integ = freeze(integrator, &[f, g]);
    let mut values = Vec::with_capacity(t_grid.len());
    let mut continued = Vec::with_capacity(t_grid.len());
    let mut comparison = Vec::with_capacity(t_grid.len());
    let mut max_deviation: f64 = 0.0;
    let mut max_err: f64 = 0.0;
    for &t in t_grid {
        let gt = heisenberg(g, Complex64::new(t, 0.0));
        let gc = heisenberg(g, Complex64::new(t, phi.beta));
        let a = omega_smeared(&f.mul(&gt), phi, &integ)?;
        let b = omega_smeared(&f.mul(&gc), phi, &integ)?;
        let c = omega_smeared(&gt.mul(f), phi, &integ)?;
        max_deviation = max_deviation.max((b.value - c.value).norm());
        max_err = max_err.max(a.error_estimate).max(b.error_estimate).max(c.error_estimate);
        values.push(a.value);
        continued.push(b.value);
        comparison.push(c.value);
    }
    Ok(KmsReport {
        t_grid: t_grid.to_vec(),
        values,
        continued,
        comparison,
        max_deviation,
        max_error_estimate: max_err,
        tolerance: tol,
        pass: max_deviation <= tol,
    })
}

/// Uniform grid of `n` points on `[a, b]`.
pub fn uniform_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n <= 1 {
        return vec![a];
    }
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GramReport {
    pub labels: Vec<String>,
    /// Row-major `ω(F_i* F_j)`.
    pub matrix: Vec<Vec<Complex64>>,
    /// Eigenvalues of the Hermitian part, ascending.
    pub eigenvalues: Vec<f64>,
    pub lambda_min: f64,
    /// Frobenius norm of the matrix.
    pub norm: f64,
    /// Largest entry of `|G - G*|`.
    pub hermiticity_defect: f64,
    pub max_error_estimate: f64,
    pub tolerance: f64,
    /// "psd", "not psd: …", or for exploratory use the scan verdicts.
    pub verdict: String,
    pub pass: bool,
}

/// Gram matrix `ω(F_i* F_j)` and its spectrum; PSD iff `λ_min ≥ -tol·‖G‖`.
pub fn gram_scan(elements: &[(String, FieldPolynomial)], phi: &ThermalFunctional, integrator: &Integrator, tol: f64) -> Result<GramReport> {
    let polys: Vec<&FieldPolynomial> = elements.iter().map(|e| &e.1).collect();
    let integ = freeze(integrator, &polys);
    let n = elements.len();
    let stars: Vec<FieldPolynomial> = elements.iter().map(|e| star(&e.1)).collect();
    let mut g = DMatrix::<Complex64>::zeros(n, n);
    let mut max_err: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let r = omega_smeared(&stars[i].mul(&elements[j].1), phi, &integ)?;
            max_err = max_err.max(r.error_estimate);
            g[(i, j)] = r.value;
        }
    }
    let adj = g.adjoint();
    let hermiticity_defect = (&g - &adj).camax();
    let h = (&g + &adj) * Complex64::new(0.5, 0.0);
    let mut eigenvalues: Vec<f64> = h.symmetric_eigen().eigenvalues.iter().copied().collect();
    eigenvalues.sort_by(f64::total_cmp);
    let lambda_min = eigenvalues.first().copied().unwrap_or(0.0);
    let norm = g.norm();
    let pass = lambda_min >= -tol * norm;
    let verdict = if pass { "psd".to_string() } else { format!("not psd: lambda_min={lambda_min:e}") };
    Ok(GramReport {
        labels: elements.iter().map(|e| e.0.clone()).collect(),
        matrix: (0..n).map(|i| (0..n).map(|j| g[(i, j)]).collect()).collect(),
        eigenvalues,
        lambda_min,
        norm,
        hermiticity_defect,
        max_error_estimate: max_err,
        tolerance: tol,
        verdict,
        pass,
    })
}

/// `{1, φ_θ(f₁), φ_θ(f₂), φ_θ'(f₁), φ_θ(f₁)φ_θ(f₂), φ_θ(f₁)φ_θ'(f₂), U(x₁), φ_θ(f₁)U(x₁)}`
/// with `θ' = -θ`.
pub fn standard_family(theta: &Skew, f1: &GaussianPacket, f2: &GaussianPacket, x1: &FourVec) -> Vec<(String, FieldPolynomial)> {
    let tp = theta.scaled(-1.0);
    let a1 = FieldPolynomial::field(*theta, *f1);
    let a2 = FieldPolynomial::field(*theta, *f2);
    let b1 = FieldPolynomial::field(tp, *f1);
    let b2 = FieldPolynomial::field(tp, *f2);
    let u = FieldPolynomial::translation(*x1);
    vec![
        ("1".into(), FieldPolynomial::one()),
        ("phi_t(f1)".into(), a1.clone()),
        ("phi_t(f2)".into(), a2.clone()),
        ("phi_t'(f1)".into(), b1),
        ("phi_t(f1) phi_t(f2)".into(), a1.mul(&a2)),
        ("phi_t(f1) phi_t'(f2)".into(), a1.mul(&b2)),
        ("U(x1)".into(), u.clone()),
        ("phi_t(f1) U(x1)".into(), a1.mul(&u)),
    ]
}

/// One draw of the exploratory positivity scan.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanDraw {
    pub f1: GaussianPacket,
    pub f2: GaussianPacket,
    pub cutoff_width: f64,
    pub lambda_min: f64,
    pub norm: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub draws: Vec<ScanDraw>,
    /// Smallest `λ_min / ‖G‖` over all draws.
    pub most_negative_relative: f64,
    pub most_negative: f64,
    pub tolerance: f64,
    /// `"violation: lambda_min=…"` or `"inconclusive"`; never a pass.
    pub verdict: String,
}

/// Family mixing fibers with energy-cutoff approximants `E ≈ E_Ω`.
pub fn cutoff_family(theta: &Skew, f1: &GaussianPacket, f2: &GaussianPacket, width: f64, nodes: usize) -> Vec<(String, FieldPolynomial)> {
    let tp = theta.scaled(-1.0);
    let e = FieldPolynomial::generator(Generator::Spectral(SpectralFn::EnergyCutoff { width, nodes }));
    let a1 = FieldPolynomial::field(*theta, *f1);
    let b2 = FieldPolynomial::field(tp, *f2);
    vec![
        ("1".into(), FieldPolynomial::one()),
        ("E".into(), e.clone()),
        ("phi_t(f1)".into(), a1.clone()),
        ("phi_t'(f2)".into(), b2.clone()),
        ("E phi_t(f1)".into(), e.mul(&a1)),
        ("phi_t(f1) phi_t'(f2)".into(), a1.mul(&b2)),
        ("E phi_t(f1) phi_t'(f2)".into(), e.mul(&a1).mul(&b2)),
    ]
}

/// Randomised Gram scan for a covariant functional, reporting the most
/// negative eigenvalue found. Absence of a violation is inconclusive.
#[allow(clippy::too_many_arguments)]
pub fn positivity_scan(
    phi: &ThermalFunctional,
    theta: &Skew,
    draws: usize,
    cutoff_nodes: usize,
    seed: u64,
    integrator: &Integrator,
    tol: f64,
) -> Result<ScanReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(draws);
    let mut rel = f64::INFINITY;
    let mut most_negative = f64::INFINITY;
    for _ in 0..draws {
        let packet = |rng: &mut ChaCha8Rng| -> Result<GaussianPacket> {
            let c = FourVec::new(rng.random_range(-1.0..1.0), [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)]);
            let q = FourVec::new(rng.random_range(-1.5..1.5), [rng.random_range(-0.5..0.5), rng.random_range(-0.5..0.5), rng.random_range(-0.5..0.5)]);
            let w = rng.random_range(0.6..2.0);
            let a = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            GaussianPacket::new(c, q, w, a)
        };
        let f1 = packet(&mut rng)?;
        let f2 = packet(&mut rng)?;
        let width = rng.random_range(1.0..6.0);
        let fam = cutoff_family(theta, &f1, &f2, width, cutoff_nodes);
        let r = gram_scan(&fam, phi, integrator, tol)?;
        let ratio = if r.norm > 0.0 { r.lambda_min / r.norm } else { 0.0 };
        rel = rel.min(ratio);
        most_negative = most_negative.min(r.lambda_min);
        out.push(ScanDraw { f1, f2, cutoff_width: width, lambda_min: r.lambda_min, norm: r.norm });
    }
    let verdict = if rel < -tol { format!("violation: lambda_min={most_negative:e}") } else { "inconclusive".to_string() };
    Ok(ScanReport { draws: out, most_negative_relative: rel, most_negative, tolerance: tol, verdict })
}

/// `|ω(F*) - conj ω(F)|`.
pub fn hermiticity_check(f: &FieldPolynomial, phi: &ThermalFunctional, integrator: &Integrator) -> Result<f64> {
    let fs = star(f);
    let integ = freeze(integrator, &[f, &fs]);
    let a = omega_smeared(&fs, phi, &integ)?;
    let b = omega_smeared(f, phi, &integ)?;
    Ok((a.value - b.value.conj()).norm())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CovarianceReport {
    /// Largest change of the twist phase `∏ e^{i p_l·θ p_r}`; zero up to rounding.
    pub phase_deviation: f64,
    /// Largest change of the full fiber kernel.
    pub kernel_deviation: f64,
    pub configurations: usize,
}

/// Compare fiber kernels at `(θ, pᵢ)` and `(ΛθΛ⁻¹, Λpᵢ)`.
pub fn covariance_check(beta: f64, mass: f64, theta: &Skew, lambda: &Lorentz, configs: &[Vec<FourVec>]) -> Result<CovarianceReport> {
    let t2 = conjugate_theta(lambda, theta);
    let mut phase_deviation: f64 = 0.0;
    let mut kernel_deviation: f64 = 0.0;
    for moms in configs {
        let lm: Vec<FourVec> = moms.iter().map(|p| lambda.apply(p)).collect();
        let a = ordered_phase(&vec![*theta; moms.len()], moms);
        let b = ordered_phase(&vec![t2; lm.len()], &lm);
        phase_deviation = phase_deviation.max((a - b).norm());
        let k1 = omega_theta_kernel(beta, mass, theta, moms)?;
        let k2 = omega_theta_kernel(beta, mass, &t2, &lm)?;
        kernel_deviation = kernel_deviation.max((k1 - k2).norm());
    }
    Ok(CovarianceReport { phase_deviation, kernel_deviation, configurations: configs.len() })
}

/// For each `(p, p')` compare
/// `ω(φ̃_θ(-p) φ̃_θ(p) φ̃_θ'(p') φ̃_θ'(-p'))` with
/// `e^{ip·(θ+θ')p'} ω(φ̃_θ(-p) φ̃_θ'(p') φ̃_θ(p) φ̃_θ'(-p'))` under `σ = 0`.
pub fn exchange_phase_check(beta: f64, mass: f64, theta: &Skew, theta2: &Skew, configs: &[(FourVec, FourVec)]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    let zero = SigmaMeasure::Zero;
    for (p, q) in configs {
        let lhs = omega_sigma_kernel(beta, mass, &[*theta, *theta, *theta2, *theta2], &[-*p, *p, *q, -*q], &zero)?;
        let rhs = omega_sigma_kernel(beta, mass, &[*theta, *theta2, *theta, *theta2], &[-*p, *q, *p, -*q], &zero)?;
        let phase = Complex64::from_polar(1.0, crate::kinematics::theta_contract(p, &theta.add(theta2), q));
        worst = worst.max((lhs - phase * rhs).norm());
    }
    Ok(worst)
}

fn random_on_shell(rng: &mut ChaCha8Rng, mass: f64) -> Result<FourVec> {
    let sign = if rng.random_bool(0.5) { 1 } else { -1 };
    let k = [rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)];
    Ok(crate::OnShell::new(sign, k, mass)?.four_vector())
}

/// Paired on-shell configurations `(p₁ … p_n, -p_n … -p₁)` of `points` momenta.
pub fn random_paired_configurations(seed: u64, count: usize, points: usize, mass: f64) -> Result<Vec<Vec<FourVec>>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let half = (0..points / 2).map(|_| random_on_shell(&mut rng, mass)).collect::<Result<Vec<_>>>()?;
            Ok(half.iter().copied().chain(half.iter().rev().map(|p| -*p)).collect())
        })
        .collect()
}

/// Independent on-shell pairs `(p, p')` for [`exchange_phase_check`].
pub fn random_exchange_pairs(seed: u64, count: usize, mass: f64) -> Result<Vec<(FourVec, FourVec)>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| Ok((random_on_shell(&mut rng, mass)?, random_on_shell(&mut rng, mass)?))).collect()
}
