//! Truncated Fock-space oracle: explicit matrices on finitely many modes.
//!
//! Everything here is built from ladder matrices and diagonal unitaries, with
//! no use of the closed-form kernels, so it serves as the reference for the
//! conventions in [`crate::conventions`].

mod fock;
pub mod modes;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::{rieffel_product, star, warp, FieldPolynomial, Generator};
use crate::error::{Error, Result};
use crate::kinematics::{dot, theta_contract};
use crate::twist::GaussianPacket;
use crate::{FourVec, OnShell, Skew};

pub use fock::{FockBasis, Ladder, Vector};
pub use modes::{auto_cutoff, ModeSet, DEFAULT_MAX_DIM, TAIL_TARGET};

pub type OperatorMatrix = DMatrix<Complex64>;

/// Field leg for [`build_field`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldLeg {
    Sharp(OnShell),
    Packet(GaussianPacket),
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn from_columns(basis: &FockBasis, col: impl Fn(&Vector) -> Result<Vector>) -> Result<OperatorMatrix> {
    let d = basis.dim();
    let mut m = OperatorMatrix::zeros(d, d);
    for n in 0..d {
        let v = col(&basis.basis_vector(n))?;
        m.set_column(n, &v);
    }
    Ok(m)
}

/// Truncated `(a_i, a_i†)`.
pub fn build_ladder(ms: &ModeSet, i: usize) -> Result<(OperatorMatrix, OperatorMatrix)> {
    if i >= ms.len() {
        return Err(Error::InvalidModes(format!("mode index {i} out of range")));
    }
    let b = FockBasis::new(ms);
    let a = from_columns(&b, |v| Ok(b.apply_ladder(Ladder { mode: i, sign: -1 }, v)))?;
    let ad = from_columns(&b, |v| Ok(b.apply_ladder(Ladder { mode: i, sign: 1 }, v)))?;
    Ok((a, ad))
}

/// Diagonal `(P⁰, P¹, P², P³)`.
pub fn build_momentum(ms: &ModeSet) -> [OperatorMatrix; 4] {
    let b = FockBasis::new(ms);
    let d = b.dim();
    std::array::from_fn(|mu| OperatorMatrix::from_diagonal(&Vector::from_iterator(d, (0..d).map(|n| c(b.momentum(n).component(mu))))))
}

/// Diagonal `U(x) = e^{ix·P}`.
pub fn build_translation(ms: &ModeSet, x: &FourVec) -> OperatorMatrix {
    let b = FockBasis::new(ms);
    let d = b.dim();
    OperatorMatrix::from_diagonal(&Vector::from_iterator(d, (0..d).map(|n| Complex64::from_polar(1.0, dot(x, &b.momentum(n))))))
}

/// Deformed field `φ̃_θ(p) = φ̃(p) U(-θp)` or its packet smearing `φ_θ(f)`.
pub fn build_field(ms: &ModeSet, theta: &Skew, leg: &FieldLeg) -> Result<OperatorMatrix> {
    let g = match leg {
        FieldLeg::Sharp(p) => Generator::SharpField { theta: *theta, p: *p },
        FieldLeg::Packet(f) => Generator::Field { theta: *theta, f: *f },
    };
    let b = FockBasis::new(ms);
    from_columns(&b, |v| b.apply_generator(&g, v))
}

/// Matrix of a polynomial on the truncated space.
pub fn polynomial_matrix(ms: &ModeSet, f: &FieldPolynomial) -> Result<OperatorMatrix> {
    let b = FockBasis::new(ms);
    polynomial_matrix_in(&b, f)
}

fn polynomial_matrix_in(b: &FockBasis, f: &FieldPolynomial) -> Result<OperatorMatrix> {
    from_columns(b, |v| apply_polynomial(b, f, v))
}

/// `F v` for a polynomial `F`.
pub fn apply_polynomial(b: &FockBasis, f: &FieldPolynomial, v: &Vector) -> Result<Vector> {
    let mut out = Vector::zeros(v.len());
    for m in f.terms() {
        out += b.apply_word(&m.word, v)? * m.coefficient;
    }
    Ok(out)
}

/// Gibbs expectation with the neglected Boltzmann tail.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GibbsValue {
    pub value: Complex64,
    pub truncation_bound: f64,
}

fn gibbs_weights(b: &FockBasis, beta: f64) -> Vec<f64> {
    let e: Vec<f64> = (0..b.dim()).map(|n| b.momentum(n).p0).collect();
    let w: Vec<f64> = e.iter().map(|e| (-beta * e).exp()).collect();
    let z: f64 = w.iter().sum();
    w.into_iter().map(|w| w / z).collect()
}

/// `Tr(F e^{-βH}) / Tr(e^{-βH})` on the truncated space.
pub fn gibbs_expect(ms: &ModeSet, beta: f64, f: &OperatorMatrix) -> Result<GibbsValue> {
    if !(beta > 0.0) {
        return Err(Error::NonPositiveBeta(beta));
    }
    let b = FockBasis::new(ms);
    if f.nrows() != b.dim() || f.ncols() != b.dim() {
        return Err(Error::LengthMismatch(format!("matrix {}x{} on dimension {}", f.nrows(), f.ncols(), b.dim())));
    }
    let w = gibbs_weights(&b, beta);
    let value = w.iter().enumerate().map(|(n, w)| f[(n, n)] * *w).sum();
    Ok(GibbsValue { value, truncation_bound: ms.truncation_bound(beta) })
}

/// Gibbs expectation of a polynomial, applying words column by column.
pub fn gibbs_expect_polynomial(ms: &ModeSet, beta: f64, f: &FieldPolynomial) -> Result<GibbsValue> {
    if !(beta > 0.0) {
        return Err(Error::NonPositiveBeta(beta));
    }
    let b = FockBasis::new(ms);
    let w = gibbs_weights(&b, beta);
    let mut value = c(0.0);
    for (n, wn) in w.iter().enumerate() {
        if *wn < 1e-300 {
            continue;
        }
        value += apply_polynomial(&b, f, &b.basis_vector(n))?[n] * *wn;
    }
    Ok(GibbsValue { value, truncation_bound: ms.truncation_bound(beta) })
}

/// `⟨Ω, F Ω⟩`: the zero-temperature expectation.
pub fn vacuum_expect(ms: &ModeSet, f: &FieldPolynomial) -> Result<Complex64> {
    let b = FockBasis::new(ms);
    Ok(apply_polynomial(&b, f, &b.basis_vector(0))?[0])
}

/// Occupation `ρ = 1 / (e^{βε} - 1)`.
pub fn rho_multiplier(beta: f64, eps: f64) -> f64 {
    1.0 / (beta * eps).exp_m1()
}

/// `⟨Ω₀, π₀(F₀) Ω₀⟩` with
/// `π₀(φ(f)) = φ((1+ρ)^{1/2} f) ⊗ 1 + 1 ⊗ conj(φ(ρ^{1/2} f̄))`.
pub fn araki_woods_expect(ms: &ModeSet, beta: f64, f0: &FieldPolynomial) -> Result<Complex64> {
    if !(beta > 0.0) {
        return Err(Error::NonPositiveBeta(beta));
    }
    let m = ms.len();
    let mut doubled = ms.modes().to_vec();
    // the second copy only needs distinct labels; momenta are never read from it
    doubled.extend(ms.modes().iter().map(|k| [k[0] + 1e3, k[1], k[2]]));
    // A word of n fields acting on the doubled vacuum never exceeds occupation n,
    // so this cutoff is exact; the thermal occupations live in ρ instead.
    let cutoff = f0.max_legs().max(1);
    let bound = DEFAULT_MAX_DIM.max(ms.dim());
    let dim = (cutoff + 1).checked_pow(2 * m as u32).unwrap_or(usize::MAX);
    if dim > bound {
        return Err(Error::DimensionTooLarge { dim, bound });
    }
    let dms = ModeSet::new(doubled, ms.mass(), cutoff, ms.cell_volume(), bound)?;
    let b = FockBasis::new(&dms);
    let pi0 = |f: &GaussianPacket, v: &Vector| -> Vector {
        let mut out = Vector::zeros(v.len());
        let fb = f.conj();
        for i in 0..m {
            let p = ms.momentum(i);
            let w = ms.weight(i).sqrt();
            let rho = rho_multiplier(beta, ms.energy(i));
            let s1 = (1.0 + rho).sqrt();
            let s2 = rho.sqrt();
            // first copy: φ((1+ρ)^{1/2} f)
            out += b.apply_ladder(Ladder { mode: i, sign: 1 }, v) * (w * s1 * f.fourier(&-p));
            out += b.apply_ladder(Ladder { mode: i, sign: -1 }, v) * (w * s1 * f.fourier(&p));
            // second copy: entrywise conjugate of φ(ρ^{1/2} f̄); ladder matrices are real
            out += b.apply_ladder(Ladder { mode: m + i, sign: 1 }, v) * (w * s2 * fb.fourier(&-p)).conj();
            out += b.apply_ladder(Ladder { mode: m + i, sign: -1 }, v) * (w * s2 * fb.fourier(&p)).conj();
        }
        out
    };
    let mut total = c(0.0);
    for term in f0.terms() {
        let mut v = b.basis_vector(0);
        for g in term.word.iter().rev() {
            match g {
                Generator::Field { theta, f } if theta.is_zero() => v = pi0(f, &v),
                _ => return Err(Error::Inadmissible("Araki–Woods map takes zero-fiber packet fields".into())),
            }
        }
        total += term.coefficient * v[0];
    }
    Ok(total)
}

/// Warped convolution on matrices: `D_θ(A)_{mn} = e^{i P_m·θ P_n} A_{mn}`.
pub fn warp_matrix(ms: &ModeSet, theta: &Skew, a: &OperatorMatrix) -> OperatorMatrix {
    let b = FockBasis::new(ms);
    OperatorMatrix::from_fn(a.nrows(), a.ncols(), |m, n| {
        a[(m, n)] * Complex64::from_polar(1.0, theta_contract(&b.momentum(m), theta, &b.momentum(n)))
    })
}

/// Rieffel product on matrices:
/// `(A ×_θ B)_{mn} = Σ_k A_{mk} B_{kn} e^{i(P_m θ P_k + P_k θ P_n - P_m θ P_n)}`.
pub fn rieffel_matrix(ms: &ModeSet, theta: &Skew, a: &OperatorMatrix, bm: &OperatorMatrix) -> OperatorMatrix {
    let b = FockBasis::new(ms);
    let d = a.nrows();
    let ph = |m: usize, n: usize| theta_contract(&b.momentum(m), theta, &b.momentum(n));
    OperatorMatrix::from_fn(d, d, |m, n| {
        let mut s = c(0.0);
        for k in 0..d {
            let x = a[(m, k)] * bm[(k, n)];
            if x != c(0.0) {
                s += x * Complex64::from_polar(1.0, ph(m, k) + ph(k, n) - ph(m, n));
            }
        }
        s
    })
}

fn max_defect(b: &FockBasis, a: &OperatorMatrix, e: &OperatorMatrix, sub_cutoff: bool) -> f64 {
    let mut d: f64 = 0.0;
    for n in 0..a.ncols() {
        if sub_cutoff && !b.sub_cutoff(n) {
            continue;
        }
        for m in 0..a.nrows() {
            d = d.max((a[(m, n)] - e[(m, n)]).norm());
        }
    }
    d
}

/// Defects of the warped-convolution and Rieffel identities.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WarpReport {
    /// `‖D_θ(F ×_θ G) - D_θ(F) D_θ(G)‖` with the matrix Rieffel product.
    pub homomorphism: f64,
    /// Same identity through the symbolic `rieffel_product` and `warp`.
    pub symbolic_homomorphism: f64,
    /// Matrix of `warp(θ, F)` against `D_θ` of the matrix of `F`.
    pub symbolic_warp: f64,
    /// Matrix of `rieffel_product` against the matrix Rieffel product.
    pub symbolic_rieffel: f64,
    /// `D_θ(F*) = D_θ(F)*`.
    pub star: f64,
    /// `D_θ(1) = 1` and `F ×_θ 1 = F`.
    pub unit: f64,
    /// `D_θ(F) Ω = F Ω`.
    pub vacuum: f64,
    /// `D_θ(U(x) F U(-x)) = U(x) D_θ(F) U(-x)`.
    pub translation: f64,
    /// `|Tr ρ(F ×_θ G) - Tr ρ FG|` for the Gibbs state at the given `β`.
    pub rieffel_trace: f64,
}

impl WarpReport {
    pub fn max_matrix_defect(&self) -> f64 {
        [self.homomorphism, self.symbolic_homomorphism, self.symbolic_warp, self.symbolic_rieffel, self.star, self.unit, self.vacuum, self.translation]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

/// Warped-convolution homomorphism, star, unit, vacuum and translation laws,
/// and the Rieffel trace identity, for zero-fiber polynomials.
pub fn check_warp_and_rieffel(ms: &ModeSet, theta: &Skew, beta: f64, x: &FourVec, f0: &FieldPolynomial, g0: &FieldPolynomial) -> Result<WarpReport> {
    let b = FockBasis::new(ms);
    let a = polynomial_matrix_in(&b, f0)?;
    let g = polynomial_matrix_in(&b, g0)?;
    let d = |m: &OperatorMatrix| warp_matrix(ms, theta, m);
    let axb = rieffel_matrix(ms, theta, &a, &g);
    let homomorphism = max_defect(&b, &d(&axb), &(d(&a) * d(&g)), false);

    let prod = rieffel_product(f0, g0, theta)?;
    let wf = polynomial_matrix_in(&b, &warp(theta, f0)?)?;
    let wg = polynomial_matrix_in(&b, &warp(theta, g0)?)?;
    let wprod = polynomial_matrix_in(&b, &warp(theta, &prod)?)?;
    let symbolic_homomorphism = max_defect(&b, &wprod, &(&wf * &wg), false);
    let symbolic_warp = max_defect(&b, &wf, &d(&a), false).max(max_defect(&b, &wg, &d(&g), false));
    let symbolic_rieffel = max_defect(&b, &polynomial_matrix_in(&b, &prod)?, &axb, false);

    let wstar = polynomial_matrix_in(&b, &warp(theta, &star(f0))?)?;
    let star_defect = max_defect(&b, &wstar, &wf.adjoint(), false).max(max_defect(&b, &d(&a.adjoint()), &d(&a).adjoint(), false));

    let id = OperatorMatrix::identity(b.dim(), b.dim());
    let unit = max_defect(&b, &polynomial_matrix_in(&b, &warp(theta, &FieldPolynomial::one())?)?, &id, false)
        .max(max_defect(&b, &polynomial_matrix_in(&b, &rieffel_product(f0, &FieldPolynomial::one(), theta)?)?, &a, false))
        .max(max_defect(&b, &rieffel_matrix(ms, theta, &a, &id), &a, false));

    let e0 = b.basis_vector(0);
    let vacuum = (&wf * &e0 - &a * &e0).camax().max((d(&a) * &e0 - &a * &e0).camax());

    let u = build_translation(ms, x);
    let um = build_translation(ms, &-*x);
    let translated = crate::algebra::translate(f0, x);
    let lhs = polynomial_matrix_in(&b, &warp(theta, &translated)?)?;
    let rhs = &u * &wf * &um;
    let translation = max_defect(&b, &lhs, &rhs, false).max(max_defect(&b, &d(&(&u * &a * &um)), &(&u * d(&a) * &um), false));

    let t1 = gibbs_expect(ms, beta, &axb)?.value;
    let t2 = gibbs_expect(ms, beta, &(&a * &g))?.value;
    Ok(WarpReport {
        homomorphism,
        symbolic_homomorphism,
        symbolic_warp,
        symbolic_rieffel,
        star: star_defect,
        unit,
        vacuum,
        translation,
        rieffel_trace: (t1 - t2).norm(),
    })
}

/// Defect of the twisted commutation relation
/// `φ̃_θ(p)φ̃_θ'(p') - e^{ip·(θ+θ')p'} φ̃_θ'(p')φ̃_θ(p) = c(p) δ_{p',-p} U(-(θ-θ')p)`
/// over all signed mode pairs, on columns below the occupation cutoff.
pub fn twisted_ccr_defect(ms: &ModeSet, theta: &Skew, theta2: &Skew) -> Result<f64> {
    let b = FockBasis::new(ms);
    let mut worst: f64 = 0.0;
    let slots: Vec<OnShell> = (0..ms.len())
        .flat_map(|i| {
            let k = ms.modes()[i];
            [OnShell::new(1, k, ms.mass()), OnShell::new(-1, k, ms.mass())]
        })
        .collect::<Result<Vec<_>>>()?;
    let mats: Vec<(OperatorMatrix, OperatorMatrix)> = slots
        .iter()
        .map(|p| Ok((build_field(ms, theta, &FieldLeg::Sharp(*p))?, build_field(ms, theta2, &FieldLeg::Sharp(*p))?)))
        .collect::<Result<Vec<_>>>()?;
    for (i, p) in slots.iter().enumerate() {
        for (j, q) in slots.iter().enumerate() {
            let pv = p.four_vector();
            let qv = q.four_vector();
            let phase = Complex64::from_polar(1.0, theta_contract(&pv, &theta.add(theta2), &qv));
            let lhs = &mats[i].0 * &mats[j].1 - (&mats[j].1 * &mats[i].0) * phase;
            let rhs = if (pv + qv).max_abs() <= 1e-12 * pv.max_abs() {
                let cp = if pv.p0 > 0.0 { -1.0 } else { 1.0 };
                build_translation(ms, &-theta.add(&theta2.scaled(-1.0)).apply(&pv)) * c(cp)
            } else {
                OperatorMatrix::zeros(b.dim(), b.dim())
            };
            worst = worst.max(max_defect(&b, &lhs, &rhs, true));
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ms2(n: usize) -> ModeSet {
        ModeSet::new(vec![[0.0, 0.0, 0.0], [0.6, -0.3, 0.2]], 1.0, n, 0.2, 4096).unwrap()
    }

    #[test]
    fn ladder_examples() {
        let ms = ModeSet::new(vec![[0.0; 3]], 1.0, 1, 1.0, 4096).unwrap();
        let (a, ad) = build_ladder(&ms, 0).unwrap();
        assert_eq!(a[(0, 1)], c(1.0));
        assert_eq!(a.iter().filter(|z| **z != c(0.0)).count(), 1);
        assert_eq!(ad, a.adjoint());
        let ms = ms2(4);
        let (a, ad) = build_ladder(&ms, 1).unwrap();
        let num = &ad * &a;
        let b = FockBasis::new(&ms);
        for n in 0..b.dim() {
            assert!((num[(n, n)] - c(b.occupations(n)[1] as f64)).norm() < 1e-14);
            if b.sub_cutoff(n) {
                let comm = &a * &ad - &ad * &a;
                assert!((comm[(n, n)] - c(1.0)).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn momentum_and_translation() {
        let ms = ms2(3);
        let p = build_momentum(&ms);
        let b = FockBasis::new(&ms);
        for mu in 0..4 {
            assert_eq!(p[mu][(0, 0)], c(0.0));
            let one = b.basis_vector(0).len();
            assert!(one > 0);
            let n1 = 1; // one quantum in mode 0
            assert!((p[mu][(n1, n1)].re - ms.momentum(0).component(mu)).abs() < 1e-15);
            for nu in 0..4 {
                assert_eq!(&p[mu] * &p[nu], &p[nu] * &p[mu]);
            }
        }
        let x = FourVec::new(0.3, [1.0, -0.4, 0.2]);
        let y = FourVec::new(-0.7, [0.1, 0.5, 0.0]);
        let id = OperatorMatrix::identity(b.dim(), b.dim());
        assert!((build_translation(&ms, &x) * build_translation(&ms, &-x) - &id).camax() < 1e-15);
        assert!((build_translation(&ms, &x) * build_translation(&ms, &y) - build_translation(&ms, &(x + y))).camax() < 1e-13);
        let (_, ad) = build_ladder(&ms, 1).unwrap();
        let conj = build_translation(&ms, &x) * &ad * build_translation(&ms, &-x);
        let expect = &ad * Complex64::from_polar(1.0, dot(&ms.momentum(1), &x));
        assert!((conj - expect).camax() < 1e-13);
    }

    #[test]
    fn gibbs_number_operator() {
        let ms = ModeSet::new(vec![[0.0; 3]], 1.0, 40, 1.0, 4096).unwrap();
        let (a, ad) = build_ladder(&ms, 0).unwrap();
        let v = gibbs_expect(&ms, 1.0, &(&ad * &a)).unwrap();
        assert!((v.value.re - 1.0 / (1f64.exp() - 1.0)).abs() < 1e-15);
        let id = OperatorMatrix::identity(41, 41);
        assert!((gibbs_expect(&ms, 1.0, &id).unwrap().value - c(1.0)).norm() < 1e-15);
        assert!((rho_multiplier(1.0, 1.0) - 0.581_976_706_869_326_4).abs() < 1e-15);
    }

    #[test]
    fn sharp_field_without_deformation() {
        let ms = ms2(3);
        let p = OnShell::new(1, [0.6, -0.3, 0.2], 1.0).unwrap();
        let m = build_field(&ms, &Skew::zero(), &FieldLeg::Sharp(p)).unwrap();
        let (_, ad) = build_ladder(&ms, 1).unwrap();
        assert_eq!(m, ad);
        let bad = OnShell::new(1, [0.1, 0.0, 0.0], 1.0).unwrap();
        assert!(matches!(build_field(&ms, &Skew::zero(), &FieldLeg::Sharp(bad)), Err(Error::NotAMode)));
    }

    #[test]
    fn real_packet_field_is_self_adjoint() {
        let ms = ms2(3);
        let f = GaussianPacket::new(FourVec::new(0.2, [0.1, 0.0, -0.3]), FourVec::zero(), 1.2, c(0.8)).unwrap();
        let m = build_field(&ms, &Skew::zero(), &FieldLeg::Packet(f)).unwrap();
        assert!((&m - m.adjoint()).camax() < 1e-13);
    }
}
