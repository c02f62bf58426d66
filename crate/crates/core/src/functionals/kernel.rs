//! Contraction combinatorics, Bose factors and the delta-stripped kernels.
//!
//! Kernel mode enforces `p_r = -p_l` and the mass shell as input constraints;
//! a contraction contributes only where its pairs match.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::sigma::{sigma_hat_eval, SigmaMeasure};
use crate::error::{Error, Result};
use crate::kinematics::{dot, shell_defect, theta_contract};
use crate::{FourVec, Skew};

/// Relative mass-shell tolerance for kernel inputs.
pub const SHELL_TOL: f64 = 1e-10;
/// Relative tolerance for the pairing constraint `p_r = -p_l`.
pub const PAIR_TOL: f64 = 1e-12;

/// Pairing of `{0, …, 2n-1}` into `(left[k], right[k])` with
/// `left` increasing and `left[k] < right[k]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Contraction {
    pub left: Vec<usize>,
    pub right: Vec<usize>,
}

impl Contraction {
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.left.iter().copied().zip(self.right.iter().copied())
    }

    pub fn len(&self) -> usize {
        self.left.len()
    }

    pub fn is_empty(&self) -> bool {
        self.left.is_empty()
    }
}

/// All `(2n-1)!!` contractions of `count = 2n` indices.
pub fn enumerate_contractions(count: usize) -> Result<Vec<Contraction>> {
    if count % 2 == 1 {
        return Err(Error::OddContraction(count));
    }
    fn rec(rest: &[usize], acc: &mut Vec<(usize, usize)>, out: &mut Vec<Contraction>) {
        if rest.is_empty() {
            out.push(Contraction { left: acc.iter().map(|p| p.0).collect(), right: acc.iter().map(|p| p.1).collect() });
            return;
        }
        let l = rest[0];
        for j in 1..rest.len() {
            let mut next: Vec<usize> = rest[1..].to_vec();
            let r = next.remove(j - 1);
            acc.push((l, r));
            rec(&next, acc, out);
            acc.pop();
        }
    }
    let idx: Vec<usize> = (0..count).collect();
    let mut out = Vec::new();
    rec(&idx, &mut Vec::new(), &mut out);
    Ok(out)
}

/// `1 / (1 - e^a)`, evaluated without overflow for large `Re a`.
pub fn bose_exp(a: Complex64) -> Result<Complex64> {
    let one = Complex64::new(1.0, 0.0);
    if a.re > 0.0 {
        let e = (-a).exp();
        let den = one - e;
        if den.norm() < 1e-12 * e.norm().max(1.0) {
            return Err(Error::SingularBose(den.norm()));
        }
        Ok(-e / den)
    } else {
        let den = one - a.exp();
        if den.norm() < 1e-12 {
            return Err(Error::SingularBose(den.norm()));
        }
        Ok(one / den)
    }
}

/// `b(β, z) = 1 / (1 - e^{βz})`.
pub fn bose(beta: f64, z: Complex64) -> Result<Complex64> {
    if !(beta > 0.0) {
        return Err(Error::NonPositiveBeta(beta));
    }
    bose_exp(beta * z)
}

/// Commutator coefficient `c(p) = -sgn(p⁰)` of `[φ̃(p), φ̃(-p)]`.
pub fn commutator_sign(p: &FourVec) -> f64 {
    if p.p0 > 0.0 {
        -1.0
    } else {
        1.0
    }
}

/// Stripped two-point kernel `ω(φ̃(q)φ̃(-q)) = c(q) / (1 - e^{βq⁰})`.
pub fn two_point_kernel(beta: f64, q: &FourVec) -> Result<Complex64> {
    Ok(commutator_sign(q) * bose(beta, Complex64::new(q.p0, 0.0))?)
}

fn validate_shell(momenta: &[FourVec], mass: f64) -> Result<()> {
    if !(mass > 0.0) {
        return Err(Error::NonPositiveMass(mass));
    }
    for (i, p) in momenta.iter().enumerate() {
        if shell_defect(p, mass) > SHELL_TOL {
            return Err(Error::OffShell(i));
        }
    }
    Ok(())
}

fn paired(p: &FourVec, q: &FourVec) -> bool {
    (*p + *q).max_abs() <= PAIR_TOL * p.max_abs().max(q.max_abs()).max(1.0)
}

/// Sum over compatible contractions of `∏_k c(p_l) b(βp_l⁰ - i p_l·y)`.
fn contraction_sum(beta: f64, momenta: &[FourVec], y: &FourVec) -> Result<Complex64> {
    let mut total = Complex64::new(0.0, 0.0);
    let mut any = false;
    for c in enumerate_contractions(momenta.len())? {
        if !c.pairs().all(|(l, r)| paired(&momenta[l], &momenta[r])) {
            continue;
        }
        any = true;
        let mut term = Complex64::new(1.0, 0.0);
        for (l, _) in c.pairs() {
            let p = &momenta[l];
            term *= commutator_sign(p) * bose_exp(Complex64::new(beta * p.p0, -dot(p, y)))?;
        }
        total += term;
    }
    if !any {
        return Err(Error::NotPaired);
    }
    Ok(total)
}

/// Stripped n-point kernel of the undeformed thermal state.
pub fn omega0_kernel(beta: f64, mass: f64, momenta: &[FourVec]) -> Result<Complex64> {
    if !(beta > 0.0) {
        return Err(Error::NonPositiveBeta(beta));
    }
    validate_shell(momenta, mass)?;
    if momenta.len() % 2 == 1 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    contraction_sum(beta, momenta, &FourVec::zero())
}

/// `∏_{l<r} e^{i p_l·θ_l p_r}` for per-leg deformation matrices.
pub fn ordered_phase(fibers: &[Skew], momenta: &[FourVec]) -> Complex64 {
    let mut s = 0.0;
    for l in 0..momenta.len() {
        for r in l + 1..momenta.len() {
            s += theta_contract(&momenta[l], &fibers[l], &momenta[r]);
        }
    }
    Complex64::from_polar(1.0, s)
}

/// Fiber kernel: `∏_{l<r} e^{i p_l·θ p_r}` times [`omega0_kernel`].
pub fn omega_theta_kernel(beta: f64, mass: f64, theta: &Skew, momenta: &[FourVec]) -> Result<Complex64> {
    let w0 = omega0_kernel(beta, mass, momenta)?;
    Ok(ordered_phase(&vec![*theta; momenta.len()], momenta) * w0)
}

/// Covariant kernel with legs in arbitrary fibers:
/// `σ̂(y) ∏_{l<r} e^{i p_l·θ_l p_r} Σ ∏_k c(p_l) b(βp_l⁰ - i p_l·y)`, `y = -Σ_j θ_j p_j`.
pub fn omega_sigma_kernel(beta: f64, mass: f64, fibers: &[Skew], momenta: &[FourVec], sigma: &SigmaMeasure) -> Result<Complex64> {
    omega_sigma_kernel_translated(beta, mass, fibers, momenta, &FourVec::zero(), sigma)
}

/// [`omega_sigma_kernel`] for the word `φ̃_{θ₁}(p₁)…φ̃_{θₙ}(pₙ) U(x)`.
pub fn omega_sigma_kernel_translated(
    beta: f64,
    mass: f64,
    fibers: &[Skew],
    momenta: &[FourVec],
    x: &FourVec,
    sigma: &SigmaMeasure,
) -> Result<Complex64> {
    if fibers.len() != momenta.len() {
        return Err(Error::LengthMismatch(format!("{} fibers for {} momenta", fibers.len(), momenta.len())));
    }
    if !(beta > 0.0) {
        return Err(Error::NonPositiveBeta(beta));
    }
    sigma.validate()?;
    validate_shell(momenta, mass)?;
    if momenta.len() % 2 == 1 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let mut y = *x;
    for (t, p) in fibers.iter().zip(momenta) {
        y = y - t.apply(p);
    }
    let s = sigma_hat_eval(sigma, &y);
    let sum = contraction_sum(beta, momenta, &y)?;
    Ok(s * ordered_phase(fibers, momenta) * sum)
}
