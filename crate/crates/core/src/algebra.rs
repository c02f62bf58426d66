//! Symbolic ∗-algebra of words in deformed fields, translations and spectral
//! functions, with the warped-convolution map and the Rieffel product.
//!
//! Words are never reduced: no commutation relations are applied. Functionals
//! and the Fock oracle decide operator identities.

use std::cmp::Ordering;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functionals::quadrature::gauss_hermite;
use crate::kinematics::dot;
use crate::twist::{twisted_tensor, GaussianPacket, TwistedProductFunction};
use crate::{FourVec, OnShell, Skew};

/// Function of the energy-momentum operators.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectralFn {
    /// `Σ c_k U(x_k)`.
    Fourier { terms: Vec<(Complex64, FourVec)> },
    /// `exp(-s² H² / 2)` expanded on `nodes` Gauss–Hermite points in time.
    /// Approximates the vacuum projection for `s·m ≫ 1`.
    EnergyCutoff { width: f64, nodes: usize },
}

impl SpectralFn {
    /// Finite translation expansion `Σ c_k U(x_k)`.
    pub fn expand(&self) -> Vec<(Complex64, FourVec)> {
        match self {
            SpectralFn::Fourier { terms } => terms.clone(),
            SpectralFn::EnergyCutoff { width, nodes } => {
                let (u, w) = gauss_hermite(*nodes);
                let norm = std::f64::consts::PI.sqrt();
                u.iter()
                    .zip(&w)
                    .map(|(u, w)| (Complex64::new(w / norm, 0.0), FourVec::new(std::f64::consts::SQRT_2 * width * u, [0.0; 3])))
                    .collect()
            }
        }
    }

    /// Value of the function at a spectral point `P`, using `U(x) = e^{ix·P}`.
    pub fn eval_at(&self, p: &FourVec) -> Complex64 {
        self.expand().iter().map(|(c, x)| c * Complex64::from_polar(1.0, dot(x, p))).sum()
    }

    fn star(&self) -> Self {
        match self {
            SpectralFn::Fourier { terms } => SpectralFn::Fourier { terms: terms.iter().map(|(c, x)| (c.conj(), -*x)).collect() },
            SpectralFn::EnergyCutoff { .. } => self.clone(),
        }
    }
}

/// Algebra generator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Generator {
    /// `φ_θ(f)`.
    Field { theta: Skew, f: GaussianPacket },
    /// `φ_θ(hₙ)` for an n-variable test function: `∫ h̃(-q) φ̃(q₁)…φ̃(qₙ) U(-θΣq)`.
    Block { theta: Skew, h: TwistedProductFunction },
    /// Sharp-momentum kernel `φ̃_θ(p)`; kernel mode and oracle only.
    SharpField { theta: Skew, p: OnShell },
    /// `U(x)`.
    Translation { x: FourVec },
    Spectral(SpectralFn),
}

impl Generator {
    pub fn field(theta: Skew, f: GaussianPacket) -> Self {
        Generator::Field { theta, f }
    }

    fn star(&self) -> Self {
        match self {
            Generator::Field { theta, f } => Generator::Field { theta: *theta, f: f.conj() },
            Generator::Block { theta, h } => Generator::Block { theta: *theta, h: h.star() },
            Generator::SharpField { theta, p } => Generator::SharpField { theta: *theta, p: p.reflected() },
            Generator::Translation { x } => Generator::Translation { x: -*x },
            Generator::Spectral(s) => Generator::Spectral(s.star()),
        }
    }

    /// Number of field legs carried by the generator.
    pub fn legs(&self) -> usize {
        match self {
            Generator::Field { .. } | Generator::SharpField { .. } => 1,
            Generator::Block { h, .. } => h.arity(),
            _ => 0,
        }
    }

    pub fn theta(&self) -> Option<&Skew> {
        match self {
            Generator::Field { theta, .. } | Generator::Block { theta, .. } | Generator::SharpField { theta, .. } => Some(theta),
            _ => None,
        }
    }

    fn key(&self, out: &mut Vec<f64>) {
        fn pk(f: &GaussianPacket, out: &mut Vec<f64>) {
            out.extend(f.center.to_array());
            out.push(f.imag_time);
            out.extend(f.momentum.to_array());
            out.extend([f.width, f.amplitude.re, f.amplitude.im]);
        }
        fn th(t: &Skew, out: &mut Vec<f64>) {
            out.extend(t.entries().iter().flatten());
        }
        match self {
            Generator::Field { theta, f } => {
                out.push(0.0);
                th(theta, out);
                pk(f, out);
            }
            Generator::Block { theta, h } => {
                out.extend([1.0, h.arity() as f64, h.twists.len() as f64]);
                th(theta, out);
                h.packets.iter().for_each(|f| pk(f, out));
                for t in &h.twists {
                    out.extend([t.left.0 as f64, t.left.1 as f64, t.right.0 as f64, t.right.1 as f64]);
                    th(&t.theta, out);
                }
            }
            Generator::SharpField { theta, p } => {
                out.extend([2.0, p.sign as f64, p.m]);
                out.extend(p.k);
                th(theta, out);
            }
            Generator::Translation { x } => {
                out.push(3.0);
                out.extend(x.to_array());
            }
            Generator::Spectral(SpectralFn::Fourier { terms }) => {
                out.extend([4.0, terms.len() as f64]);
                for (c, x) in terms {
                    out.extend([c.re, c.im]);
                    out.extend(x.to_array());
                }
            }
            Generator::Spectral(SpectralFn::EnergyCutoff { width, nodes }) => {
                out.extend([5.0, *width, *nodes as f64]);
            }
        }
    }
}

/// `coefficient · g₁ g₂ … gₙ`; the empty word is the unit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Monomial {
    pub coefficient: Complex64,
    pub word: Vec<Generator>,
}

impl Monomial {
    pub fn new(coefficient: Complex64, word: Vec<Generator>) -> Self {
        Self { coefficient, word }
    }

    pub fn leg_count(&self) -> usize {
        self.word.iter().map(Generator::legs).sum()
    }

    fn key(&self) -> Vec<f64> {
        let mut k = vec![self.word.len() as f64];
        self.word.iter().for_each(|g| g.key(&mut k));
        k
    }
}

fn cmp_keys(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    a.len().cmp(&b.len())
}

/// Finite sum of monomials in canonical order, without zero terms.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldPolynomial {
    terms: Vec<Monomial>,
}

impl FieldPolynomial {
    pub fn from_terms(terms: Vec<Monomial>) -> Self {
        let mut p = Self { terms };
        p.normalize();
        p
    }

    pub fn zero() -> Self {
        Self { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Self::scalar(Complex64::new(1.0, 0.0))
    }

    pub fn scalar(c: Complex64) -> Self {
        Self::from_terms(vec![Monomial::new(c, Vec::new())])
    }

    pub fn generator(g: Generator) -> Self {
        Self::from_terms(vec![Monomial::new(Complex64::new(1.0, 0.0), vec![g])])
    }

    pub fn field(theta: Skew, f: GaussianPacket) -> Self {
        Self::generator(Generator::Field { theta, f })
    }

    pub fn translation(x: FourVec) -> Self {
        Self::generator(Generator::Translation { x })
    }

    pub fn terms(&self) -> &[Monomial] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn normalize(&mut self) {
        let mut keyed: Vec<(Vec<f64>, Monomial)> = self.terms.drain(..).map(|m| (m.key(), m)).collect();
        keyed.sort_by(|a, b| cmp_keys(&a.0, &b.0));
        let mut out: Vec<(Vec<f64>, Monomial)> = Vec::with_capacity(keyed.len());
        for (k, m) in keyed {
            match out.last_mut() {
                Some((lk, lm)) if cmp_keys(lk, &k) == Ordering::Equal => lm.coefficient += m.coefficient,
                _ => out.push((k, m)),
            }
        }
        self.terms = out.into_iter().map(|(_, m)| m).filter(|m| m.coefficient != Complex64::new(0.0, 0.0)).collect();
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut t = self.terms.clone();
        t.extend(o.terms.iter().cloned());
        Self::from_terms(t)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self::from_terms(self.terms.iter().map(|m| Monomial::new(m.coefficient * c, m.word.clone())).collect())
    }

    /// Operator product (word concatenation).
    pub fn mul(&self, o: &Self) -> Self {
        let mut t = Vec::with_capacity(self.terms.len() * o.terms.len());
        for a in &self.terms {
            for b in &o.terms {
                let mut w = a.word.clone();
                w.extend(b.word.iter().cloned());
                t.push(Monomial::new(a.coefficient * b.coefficient, w));
            }
        }
        Self::from_terms(t)
    }

    /// Every generator is a field (or block) over the zero fiber.
    pub fn is_zero_fiber(&self) -> bool {
        self.terms.iter().all(|m| {
            m.word.iter().all(|g| matches!(g, Generator::Field { theta, .. } | Generator::Block { theta, .. } if theta.is_zero()))
        })
    }

    pub fn max_legs(&self) -> usize {
        self.terms.iter().map(Monomial::leg_count).max().unwrap_or(0)
    }
}

/// Involution: reverses words and conjugates coefficients and generators.
pub fn star(f: &FieldPolynomial) -> FieldPolynomial {
    FieldPolynomial::from_terms(
        f.terms
            .iter()
            .map(|m| Monomial::new(m.coefficient.conj(), m.word.iter().rev().map(Generator::star).collect()))
            .collect(),
    )
}

fn check_zero_fiber(f: &FieldPolynomial) -> Result<()> {
    for m in &f.terms {
        for g in &m.word {
            match g {
                Generator::Field { theta, .. } | Generator::Block { theta, .. } if theta.is_zero() => {}
                Generator::Field { .. } | Generator::Block { .. } => {
                    return Err(Error::Inadmissible("deformed field in a zero-fiber polynomial".into()))
                }
                Generator::SharpField { .. } => return Err(Error::Inadmissible("sharp field in warped convolution".into())),
                Generator::Translation { .. } | Generator::Spectral(_) => {
                    return Err(Error::Inadmissible("warped convolution is defined on field polynomials only".into()))
                }
            }
        }
    }
    Ok(())
}

/// Test function of a zero-fiber word: `φ(f₁)…φ(fₙ) = φ(f₁ ⊗ … ⊗ fₙ)`.
fn word_function(word: &[Generator]) -> TwistedProductFunction {
    let zero = Skew::zero();
    word.iter().fold(TwistedProductFunction::product(Vec::new()), |acc, g| match g {
        Generator::Field { f, .. } => twisted_tensor(&acc, &TwistedProductFunction::single(*f), &zero),
        Generator::Block { h, .. } => twisted_tensor(&acc, h, &zero),
        _ => unreachable!("checked zero-fiber word"),
    })
}

fn deformed_word(theta: &Skew, h: TwistedProductFunction) -> Vec<Generator> {
    if h.arity() == 1 && h.twists.is_empty() {
        vec![Generator::Field { theta: *theta, f: h.packets[0] }]
    } else {
        vec![Generator::Block { theta: *theta, h }]
    }
}

/// Warped convolution `D_θ` on zero-fiber polynomials.
///
/// `D_θ` is linear but not multiplicative for the operator product, so a word
/// of several fields becomes a single block `φ_θ(f₁ ⊗ … ⊗ fₙ)`.
pub fn warp(theta: &Skew, f0: &FieldPolynomial) -> Result<FieldPolynomial> {
    check_zero_fiber(f0)?;
    if theta.is_zero() {
        return Ok(f0.clone());
    }
    Ok(FieldPolynomial::from_terms(
        f0.terms
            .iter()
            .map(|m| {
                if m.word.is_empty() {
                    m.clone()
                } else {
                    Monomial::new(m.coefficient, deformed_word(theta, word_function(&m.word)))
                }
            })
            .collect(),
    ))
}

/// Rieffel product `F₀ ×_θ G₀` on the zero fiber.
pub fn rieffel_product(f0: &FieldPolynomial, g0: &FieldPolynomial, theta: &Skew) -> Result<FieldPolynomial> {
    check_zero_fiber(f0)?;
    check_zero_fiber(g0)?;
    if theta.is_zero() {
        return Ok(f0.mul(g0));
    }
    let zero = Skew::zero();
    let mut terms = Vec::new();
    for a in &f0.terms {
        for b in &g0.terms {
            let c = a.coefficient * b.coefficient;
            if a.word.is_empty() || b.word.is_empty() {
                let mut w = a.word.clone();
                w.extend(b.word.iter().cloned());
                terms.push(Monomial::new(c, w));
            } else {
                let h = twisted_tensor(&word_function(&a.word), &word_function(&b.word), theta);
                terms.push(Monomial::new(c, deformed_word(&zero, h)));
            }
        }
    }
    Ok(FieldPolynomial::from_terms(terms))
}

/// Adjoint action of `U(x)`.
pub fn translate(f: &FieldPolynomial, x: &FourVec) -> FieldPolynomial {
    FieldPolynomial::from_terms(
        f.terms
            .iter()
            .map(|m| {
                let mut c = m.coefficient;
                let word = m
                    .word
                    .iter()
                    .map(|g| match g {
                        Generator::Field { theta, f } => Generator::Field { theta: *theta, f: f.translated(x) },
                        Generator::Block { theta, h } => Generator::Block { theta: *theta, h: h.map_packets(|f| f.translated(x)) },
                        Generator::SharpField { p, .. } => {
                            c *= Complex64::from_polar(1.0, dot(&p.four_vector(), x));
                            g.clone()
                        }
                        other => other.clone(),
                    })
                    .collect();
                Monomial::new(c, word)
            })
            .collect(),
    )
}

/// Heisenberg evolution `τ_t(F) = e^{itH} F e^{-itH}` for real or complex `t`.
///
/// With `U(x) = e^{ix·P}` in signature (-,+,+,+) this is the adjoint action of
/// `U(-t e₀)`: packets move their time center by `-t`, and a sharp field
/// `φ̃_θ(p)` picks up `e^{itp⁰}`.
pub fn heisenberg(f: &FieldPolynomial, t: Complex64) -> FieldPolynomial {
    FieldPolynomial::from_terms(
        f.terms
            .iter()
            .map(|m| {
                let mut c = m.coefficient;
                let word = m
                    .word
                    .iter()
                    .map(|g| match g {
                        Generator::Field { theta, f } => Generator::Field { theta: *theta, f: f.time_shifted(-t) },
                        Generator::Block { theta, h } => Generator::Block { theta: *theta, h: h.map_packets(|f| f.time_shifted(-t)) },
                        Generator::SharpField { p, .. } => {
                            c *= (Complex64::i() * t * p.four_vector().p0).exp();
                            g.clone()
                        }
                        other => other.clone(),
                    })
                    .collect();
                Monomial::new(c, word)
            })
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn pk(i: u32) -> GaussianPacket {
        let s = i as f64;
        GaussianPacket::new(
            FourVec::new(0.1 * s, [0.2, -0.1 * s, 0.3]),
            FourVec::new(0.5 + 0.1 * s, [0.1 * s, 0.2, -0.3]),
            1.0 + 0.1 * s,
            c(1.0, 0.2 * s),
        )
        .unwrap()
    }

    fn th() -> Skew {
        Skew::reference(0.4)
    }

    fn sample_poly() -> FieldPolynomial {
        let a = FieldPolynomial::field(th(), pk(1)).mul(&FieldPolynomial::field(th().scaled(-1.0), pk(2)));
        let b = FieldPolynomial::translation(FourVec::new(0.3, [1.0, 0.0, 0.0])).scale(c(0.0, 2.0));
        let s = FieldPolynomial::generator(Generator::Spectral(SpectralFn::Fourier {
            terms: vec![(c(1.0, 1.0), FourVec::new(0.1, [0.0, 0.2, 0.0]))],
        }));
        a.add(&b).add(&s.mul(&FieldPolynomial::field(th(), pk(3)))).add(&FieldPolynomial::scalar(c(0.5, -0.5)))
    }

    #[test]
    fn canonical_form() {
        let f = FieldPolynomial::field(th(), pk(1));
        let g = FieldPolynomial::field(th(), pk(2));
        assert_eq!(f.add(&g), g.add(&f));
        assert!(f.add(&f.scale(c(-1.0, 0.0))).is_zero());
        assert_eq!(f.add(&f), f.scale(c(2.0, 0.0)));
    }

    #[test]
    fn star_examples() {
        assert_eq!(star(&FieldPolynomial::one()), FieldPolynomial::one());
        let p = sample_poly();
        assert_eq!(star(&star(&p)), p);
        let f = FieldPolynomial::field(th(), pk(1));
        let g = FieldPolynomial::field(th(), pk(2));
        let expect = FieldPolynomial::field(th(), pk(2).conj()).mul(&FieldPolynomial::field(th(), pk(1).conj()));
        assert_eq!(star(&f.mul(&g)), expect);
        // antilinear
        assert_eq!(star(&f.scale(c(0.0, 3.0))), star(&f).scale(c(0.0, -3.0)));
    }

    #[test]
    fn warp_examples() {
        let z = Skew::zero();
        let f0 = FieldPolynomial::field(z, pk(1)).mul(&FieldPolynomial::field(z, pk(2))).add(&FieldPolynomial::field(z, pk(3)));
        assert_eq!(warp(&z, &f0).unwrap(), f0);
        assert_eq!(warp(&th(), &FieldPolynomial::one()).unwrap(), FieldPolynomial::one());
        let w = warp(&th(), &FieldPolynomial::field(z, pk(1))).unwrap();
        assert_eq!(w, FieldPolynomial::field(th(), pk(1)));
        let bad = FieldPolynomial::translation(FourVec::zero());
        assert!(warp(&th(), &bad).is_err());
        assert!(warp(&th(), &FieldPolynomial::field(th(), pk(1))).is_err());
        // star-preserving and linear
        assert_eq!(warp(&th(), &star(&f0)).unwrap(), star(&warp(&th(), &f0).unwrap()));
        let g0 = FieldPolynomial::field(z, pk(4)).scale(c(0.3, 0.1));
        assert_eq!(warp(&th(), &f0.add(&g0)).unwrap(), warp(&th(), &f0).unwrap().add(&warp(&th(), &g0).unwrap()));
    }

    #[test]
    fn rieffel_examples() {
        let z = Skew::zero();
        let f = FieldPolynomial::field(z, pk(1)).mul(&FieldPolynomial::field(z, pk(2)));
        let g = FieldPolynomial::field(z, pk(3)).add(&FieldPolynomial::scalar(c(0.0, 1.0)));
        assert_eq!(rieffel_product(&f, &g, &z).unwrap(), f.mul(&g));
        assert_eq!(rieffel_product(&FieldPolynomial::one(), &g, &th()).unwrap(), g);
        assert_eq!(rieffel_product(&f, &FieldPolynomial::one(), &th()).unwrap(), f);
        let lhs = star(&rieffel_product(&f, &g, &th()).unwrap());
        let rhs = rieffel_product(&star(&g), &star(&f), &th()).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn translate_and_heisenberg() {
        let p = sample_poly();
        assert_eq!(translate(&p, &FourVec::zero()), p);
        let x = FourVec::new(0.4, [0.1, -0.2, 0.3]);
        let z = Skew::zero();
        let f0 = FieldPolynomial::field(z, pk(1)).mul(&FieldPolynomial::field(z, pk(2)));
        assert_eq!(translate(&warp(&th(), &f0).unwrap(), &x), warp(&th(), &translate(&f0, &x)).unwrap());
        assert_eq!(heisenberg(&p, c(0.0, 0.0)), p);
        let u = FieldPolynomial::translation(x);
        assert_eq!(heisenberg(&u, c(1.3, 0.4)), u);
        let sharp = FieldPolynomial::generator(Generator::SharpField { theta: th(), p: OnShell::new(1, [0.3, 0.0, 0.1], 1.0).unwrap() });
        let a = heisenberg(&heisenberg(&sharp, c(0.7, 0.2)), c(-0.2, 0.5));
        let b = heisenberg(&sharp, c(0.5, 0.7));
        assert!((a.terms()[0].coefficient - b.terms()[0].coefficient).norm() < 1e-12);
        // sharp translation phase
        let t = translate(&sharp, &x);
        let e = Complex64::from_polar(1.0, dot(&OnShell::new(1, [0.3, 0.0, 0.1], 1.0).unwrap().four_vector(), &x));
        assert!((t.terms()[0].coefficient - e).norm() < 1e-15);
    }

    #[test]
    fn energy_cutoff_expansion() {
        let s = SpectralFn::EnergyCutoff { width: 0.8, nodes: 24 };
        let at = |h: f64| s.eval_at(&FourVec::new(h, [0.0; 3]));
        assert!((at(0.0) - c(1.0, 0.0)).norm() < 1e-12);
        assert!((at(1.2) - c((-0.5f64 * 0.64 * 1.44).exp(), 0.0)).norm() < 1e-10);
    }
}
