//! Invariants as property tests.

use moyal_kms::algebra::{heisenberg, star, translate, warp, FieldPolynomial, Monomial};
use moyal_kms::functionals::{
    bose, enumerate_contractions, omega0_kernel, omega_smeared, omega_theta_kernel, sigma_hat_eval, Integrator, SigmaMeasure,
    ThermalFunctional,
};
use moyal_kms::kinematics::OnShellMomentum;
use moyal_kms::oracle::ModeSet;
use moyal_kms::twist::{twisted_tensor, GaussianPacket, TwistedProductFunction};
use moyal_kms::verify::{gram_scan, kms_check};
use moyal_kms::{FourVec, Skew};
use num_complex::Complex64;
use proptest::prelude::*;

fn four() -> impl Strategy<Value = FourVec> {
    prop::array::uniform4(-1.5f64..1.5).prop_map(FourVec::from_array)
}

fn skew() -> impl Strategy<Value = Skew> {
    prop::array::uniform6(-1.0f64..1.0).prop_map(|e| {
        let mut l = [[0.0; 4]; 4];
        let idx = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
        for ((i, j), v) in idx.into_iter().zip(e) {
            l[i][j] = v;
            l[j][i] = -v;
        }
        Skew::from_lower(l).unwrap()
    })
}

fn packet() -> impl Strategy<Value = GaussianPacket> {
    (four(), four(), 0.7f64..1.8, -1.0f64..1.0, -1.0f64..1.0)
        .prop_map(|(c, q, w, a, b)| GaussianPacket::new(c, q * 0.4, w, Complex64::new(a, b)).unwrap())
}

fn on_shell() -> impl Strategy<Value = FourVec> {
    (prop::bool::ANY, prop::array::uniform3(-2.0f64..2.0))
        .prop_map(|(s, k)| OnShellMomentum::new(if s { 1 } else { -1 }, k, 1.0).unwrap().four_vector())
}

fn modes() -> ModeSet {
    ModeSet::new(vec![[0.3, 0.0, 0.0], [-0.2, 0.4, 0.1], [0.0, -0.5, 0.5]], 1.0, 1, 0.8, 4096).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn bose_reflection(re in -20.0f64..20.0, im in -3.0f64..3.0) {
        let z = Complex64::new(re, im);
        prop_assume!((Complex64::new(1.0, 0.0) - z.exp()).norm() > 1e-6);
        let s = bose(1.0, z).unwrap() + bose(1.0, -z).unwrap();
        prop_assert!((s - Complex64::new(1.0, 0.0)).norm() <= 1e-12);
    }

    #[test]
    fn sigma_hat_bounded(x in four(), q in prop::array::uniform3(-1.0f64..1.0), extra in 0.0f64..1.0) {
        let q0 = (q[0] * q[0] + q[1] * q[1] + q[2] * q[2]).sqrt() + extra;
        let s = SigmaMeasure::Dirac { q: FourVec::new(q0, q) };
        prop_assert!(sigma_hat_eval(&s, &x).norm() <= 1.0 + 1e-15);
        prop_assert_eq!(sigma_hat_eval(&s, &FourVec::zero()), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn twist_phases_are_unimodular_and_associative(f in packet(), g in packet(), h in packet(), t in skew(), p in four(), q in four(), r in four()) {
        let (f, g, h) = (TwistedProductFunction::single(f), TwistedProductFunction::single(g), TwistedProductFunction::single(h));
        let fg = twisted_tensor(&f, &g, &t);
        let plain = f.eval(&[p]) * g.eval(&[q]);
        let twisted = fg.eval(&[p, q]);
        prop_assert!((twisted.norm() - plain.norm()).abs() <= 1e-14 * (1.0 + plain.norm()));
        let left = twisted_tensor(&fg, &h, &t).eval(&[p, q, r]);
        let right = twisted_tensor(&f, &twisted_tensor(&g, &h, &t), &t).eval(&[p, q, r]);
        prop_assert!((left - right).norm() <= 1e-12 * (1.0 + left.norm()));
    }

    #[test]
    fn star_is_an_involutive_antihomomorphism(f in packet(), g in packet(), t in skew(), c in -2.0f64..2.0) {
        let a = FieldPolynomial::field(t, f).scale(Complex64::new(c, 0.5));
        let b = FieldPolynomial::field(t, g).add(&FieldPolynomial::translation(FourVec::new(0.1, [c, 0.0, 0.0])));
        prop_assert_eq!(star(&star(&a.mul(&b))), a.mul(&b));
        prop_assert_eq!(star(&a.mul(&b)), star(&b).mul(&star(&a)));
    }

    #[test]
    fn kernel_factorization_is_a_phase(t in skew(), p in on_shell(), q in on_shell(), r in on_shell(), n in 1usize..4) {
        let base = [p, q, r];
        let mut moms = vec![];
        for v in &base[..n] {
            moms.push(*v);
        }
        for v in base[..n].iter().rev() {
            moms.push(-*v);
        }
        let k0 = omega0_kernel(1.0, 1.0, &moms).unwrap();
        let kt = omega_theta_kernel(1.0, 1.0, &t, &moms).unwrap();
        prop_assume!(k0.norm() > 1e-12);
        prop_assert!(((kt / k0).norm() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn heisenberg_group_law(f in packet(), t in skew(), s1 in -2.0f64..2.0, s2 in -2.0f64..2.0, i1 in -0.5f64..0.5) {
        let a = FieldPolynomial::field(t, f);
        let z1 = Complex64::new(s1, i1);
        let z2 = Complex64::new(s2, 0.0);
        let lhs = heisenberg(&heisenberg(&a, z1), z2);
        let rhs = heisenberg(&a, z1 + z2);
        let p = FourVec::new(0.7, [0.1, -0.3, 0.2]);
        let val = |x: &FieldPolynomial| match &x.terms()[0].word[0] {
            moyal_kms::algebra::Generator::Field { f, .. } => f.fourier(&p) * x.terms()[0].coefficient,
            _ => unreachable!(),
        };
        prop_assert!((val(&lhs) - val(&rhs)).norm() <= 1e-12 * (1.0 + val(&rhs).norm()));
    }

    #[test]
    fn warp_commutes_with_translation(f in packet(), g in packet(), t in skew(), x in four()) {
        let f0 = FieldPolynomial::field(Skew::zero(), f).mul(&FieldPolynomial::field(Skew::zero(), g));
        prop_assert_eq!(translate(&warp(&t, &f0).unwrap(), &x), warp(&t, &translate(&f0, &x)).unwrap());
    }

    #[test]
    fn translation_invariance_of_fiber_states(f in packet(), g in packet(), t in skew(), x in four()) {
        let phi = ThermalFunctional::fiber(1.0, 1.0, t).unwrap();
        let a = FieldPolynomial::field(t, f).mul(&FieldPolynomial::field(t, g));
        let integ = Integrator::Modes(modes());
        let v = omega_smeared(&a, &phi, &integ).unwrap().value;
        let w = omega_smeared(&translate(&a, &x), &phi, &integ).unwrap().value;
        prop_assert!((v - w).norm() <= 1e-10 * (1.0 + v.norm()));
    }

    #[test]
    fn kms_holds_on_every_mode_set(f in packet(), g in packet(), t in skew()) {
        let phi = ThermalFunctional::fiber(0.8, 1.0, t).unwrap();
        let a = FieldPolynomial::field(t, f);
        let b = FieldPolynomial::field(t, g);
        let r = kms_check(&a, &b, &phi, &[-1.0, 0.0, 1.5], &Integrator::Modes(modes()), 1e-8).unwrap();
        let scale = r.comparison.iter().map(|v| v.norm()).fold(1.0, f64::max);
        prop_assert!(r.max_deviation <= 1e-10 * scale);
    }

    #[test]
    fn gram_is_permutation_invariant(f in packet(), g in packet(), t in skew()) {
        let phi = ThermalFunctional::fiber(1.0, 1.0, t).unwrap();
        let a = FieldPolynomial::field(t, f);
        let b = FieldPolynomial::field(t, g);
        let fam = vec![("1".to_string(), FieldPolynomial::one()), ("a".into(), a.clone()), ("b".into(), b.clone()), ("ab".into(), a.mul(&b))];
        let mut rev = fam.clone();
        rev.reverse();
        let integ = Integrator::Modes(modes());
        let r1 = gram_scan(&fam, &phi, &integ, 1e-8).unwrap();
        let r2 = gram_scan(&rev, &phi, &integ, 1e-8).unwrap();
        for (x, y) in r1.eigenvalues.iter().zip(&r2.eigenvalues) {
            prop_assert!((x - y).abs() <= 1e-10 * (1.0 + r1.norm));
        }
        prop_assert!(r1.lambda_min >= -1e-10 * r1.norm);
    }
}

#[test]
fn contraction_counts() {
    let mut df = 1usize;
    for n in 1..=5usize {
        df *= 2 * n - 1;
        let cs = enumerate_contractions(2 * n).unwrap();
        assert_eq!(cs.len(), df);
        let mut keys: Vec<_> = cs.iter().map(|c| (c.left.clone(), c.right.clone())).collect();
        keys.sort();
        keys.dedup();
        assert_eq!(keys.len(), df);
    }
    assert!(enumerate_contractions(3).is_err());
}

#[test]
fn unit_monomial_normalisation() {
    let one = FieldPolynomial::from_terms(vec![Monomial::new(Complex64::new(1.0, 0.0), vec![])]);
    assert_eq!(one, FieldPolynomial::one());
    for phi in [
        ThermalFunctional::zero_fiber(2.0, 1.0).unwrap(),
        ThermalFunctional::covariant(2.0, 1.0, SigmaMeasure::Zero).unwrap(),
    ] {
        assert_eq!(omega_smeared(&one, &phi, &Integrator::Modes(modes())).unwrap().value, Complex64::new(1.0, 0.0));
    }
}
