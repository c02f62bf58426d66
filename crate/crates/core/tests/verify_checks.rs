//! KMS, positivity, hermiticity, covariance and exchange checks.

use moyal_kms::algebra::{FieldPolynomial, Generator, SpectralFn};
use moyal_kms::functionals::{omega_smeared, Integrator, QuadratureSpec, SigmaMeasure, ThermalFunctional};
use moyal_kms::kinematics::OnShellMomentum;
use moyal_kms::oracle::ModeSet;
use moyal_kms::twist::GaussianPacket;
use moyal_kms::verify::{
    covariance_check, exchange_phase_check, gram_scan, hermiticity_check, kms_check, positivity_scan, standard_family, uniform_grid,
};
use moyal_kms::{FourVec, Lorentz, Skew};
use num_complex::Complex64;

fn theta() -> Skew {
    Skew::from_lower([[0.0, 0.7, 0.3, 0.0], [-0.7, 0.0, 0.0, 0.0], [-0.3, 0.0, 0.0, 0.4], [0.0, 0.0, -0.4, 0.0]]).unwrap()
}

fn packet(c: [f64; 4], q: [f64; 4], w: f64, a: (f64, f64)) -> GaussianPacket {
    GaussianPacket::new(FourVec::from_array(c), FourVec::from_array(q), w, Complex64::new(a.0, a.1)).unwrap()
}

fn f() -> GaussianPacket {
    packet([0.1, 0.2, -0.1, 0.0], [0.3, 0.1, 0.0, 0.0], 1.0, (1.0, 0.2))
}

fn g() -> GaussianPacket {
    packet([-0.2, 0.0, 0.3, 0.1], [-0.2, 0.0, 0.2, 0.0], 1.2, (0.5, -0.4))
}

fn gh(order: usize) -> Integrator {
    Integrator::GaussHermite(QuadratureSpec { order, ..Default::default() })
}

#[test]
fn kms_unit_is_constant() {
    let phi = ThermalFunctional::fiber(1.0, 1.0, theta()).unwrap();
    let one = FieldPolynomial::one();
    let r = kms_check(&one, &one, &phi, &uniform_grid(-1.0, 1.0, 5), &gh(8), 1e-12).unwrap();
    assert!(r.pass && r.max_deviation == 0.0);
    assert!(r.values.iter().all(|v| *v == Complex64::new(1.0, 0.0)));
}

#[test]
fn kms_same_fiber() {
    let th = theta();
    let phi = ThermalFunctional::fiber(1.0, 1.0, th).unwrap();
    let a = FieldPolynomial::field(th, f());
    let b = FieldPolynomial::field(th, g());
    let r = kms_check(&a, &b, &phi, &uniform_grid(-2.0, 2.0, 21), &gh(12), 1e-8).unwrap();
    assert!(r.pass, "deviation {}", r.max_deviation);
    assert_eq!(r.t_grid.len(), 21);
}

#[test]
fn kms_mixed_fibers_under_zero_sigma() {
    let th = theta();
    let tp = th.scaled(-1.0);
    let phi = ThermalFunctional::covariant(1.0, 1.0, SigmaMeasure::Zero).unwrap();
    let a = FieldPolynomial::field(th, f()).mul(&FieldPolynomial::field(tp, g()));
    let b = FieldPolynomial::field(th, g().conj()).mul(&FieldPolynomial::field(tp, f().conj()));
    let r = kms_check(&a, &b, &phi, &uniform_grid(-2.0, 2.0, 5), &gh(8), 1e-8).unwrap();
    assert!(r.pass, "deviation {}", r.max_deviation);
    assert!(r.values.iter().any(|v| v.norm() > 1e-3));
}

#[test]
fn kms_translations_are_constant() {
    let phi = ThermalFunctional::covariant(1.0, 1.0, SigmaMeasure::Dirac { q: FourVec::new(0.5, [0.1, 0.0, 0.2]) }).unwrap();
    let u = FieldPolynomial::translation(FourVec::new(0.3, [0.1, 0.2, 0.0]));
    let v = FieldPolynomial::translation(FourVec::new(-0.1, [0.4, 0.0, 0.5]));
    let r = kms_check(&u, &v, &phi, &uniform_grid(-3.0, 3.0, 7), &gh(8), 1e-12).unwrap();
    assert!(r.pass);
    assert!(r.values.iter().all(|x| (x - r.values[0]).norm() < 1e-15));
}

#[test]
fn gram_trivial_families() {
    let phi = ThermalFunctional::covariant(1.0, 1.0, SigmaMeasure::Zero).unwrap();
    let r = gram_scan(&[("1".into(), FieldPolynomial::one())], &phi, &gh(8), 1e-8).unwrap();
    assert!(r.pass && r.matrix == vec![vec![Complex64::new(1.0, 0.0)]]);
    let xs = [FourVec::new(0.0, [1.0, 0.0, 0.0]), FourVec::new(0.5, [0.0, 0.0, 0.0]), FourVec::new(0.0, [0.0, -2.0, 1.0])];
    let fam: Vec<(String, FieldPolynomial)> = xs.iter().enumerate().map(|(i, x)| (format!("U{i}"), FieldPolynomial::translation(*x))).collect();
    let r = gram_scan(&fam, &phi, &gh(8), 1e-8).unwrap();
    for (i, row) in r.matrix.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            assert_eq!(*v, Complex64::new(if i == j { 1.0 } else { 0.0 }, 0.0));
        }
    }
}

#[test]
fn gram_standard_family_zero_sigma_is_psd() {
    let th = theta();
    let phi = ThermalFunctional::covariant(1.0, 1.0, SigmaMeasure::Zero).unwrap();
    let fam = standard_family(&th, &f(), &g(), &FourVec::new(0.5, [0.3, 0.0, 0.0]));
    assert_eq!(fam.len(), 8);
    let r = gram_scan(&fam, &phi, &gh(8), 1e-8).unwrap();
    assert!(r.pass, "lambda_min {} norm {}", r.lambda_min, r.norm);
    assert!(r.hermiticity_defect < 1e-12);
    // relabelling is a permutation similarity
    let mut perm = fam.clone();
    perm.reverse();
    let rp = gram_scan(&perm, &phi, &gh(8), 1e-8).unwrap();
    assert!((rp.lambda_min - r.lambda_min).abs() < 1e-12);
}

#[test]
fn hermiticity_of_fiber_functional() {
    let th = theta();
    let phi = ThermalFunctional::fiber(1.0, 1.0, th).unwrap();
    let real = packet([0.0, 0.1, 0.0, -0.2], [0.0; 4], 1.1, (0.8, 0.0));
    let a = FieldPolynomial::field(th, real);
    assert!(hermiticity_check(&FieldPolynomial::one(), &phi, &gh(8)).unwrap() == 0.0);
    assert!(hermiticity_check(&a.mul(&a), &phi, &gh(10)).unwrap() <= 1e-10);
    let b = FieldPolynomial::field(th, f()).mul(&FieldPolynomial::field(th, g()));
    assert!(hermiticity_check(&b, &phi, &gh(10)).unwrap() <= 1e-10);
}

#[test]
fn hermiticity_under_dirac_sigma_is_reported() {
    let th = theta();
    let phi = ThermalFunctional::covariant(1.0, 1.0, SigmaMeasure::Dirac { q: FourVec::new(0.4, [0.0, 0.1, 0.0]) }).unwrap();
    let b = FieldPolynomial::field(th, f()).mul(&FieldPolynomial::field(th.scaled(-1.0), g()));
    let d = hermiticity_check(&b, &phi, &gh(8)).unwrap();
    assert!(d.is_finite());
}

fn configs() -> Vec<(FourVec, FourVec)> {
    (0..12)
        .map(|i| {
            let x = i as f64 * 0.17;
            let p = OnShellMomentum::new(1, [0.3 + x, -0.2, 0.1 * x], 1.0).unwrap().four_vector();
            let q = OnShellMomentum::new(if i % 2 == 0 { 1 } else { -1 }, [-0.4, 0.5 * x, 0.3], 1.0).unwrap().four_vector();
            (p, q)
        })
        .collect()
}

#[test]
fn covariance_rotation_and_boost() {
    let cfg: Vec<Vec<FourVec>> = configs().iter().map(|(p, q)| vec![*p, -*p, *q, -*q]).collect();
    let id = covariance_check(1.0, 1.0, &theta(), &Lorentz::identity(), &cfg).unwrap();
    assert_eq!((id.phase_deviation, id.kernel_deviation), (0.0, 0.0));
    let rot = covariance_check(1.0, 1.0, &theta(), &Lorentz::rotation(3, 0.8), &cfg).unwrap();
    assert!(rot.phase_deviation <= 1e-12 && rot.kernel_deviation <= 1e-12);
    let boost = covariance_check(1.0, 1.0, &Skew::zero(), &Lorentz::boost(1, 0.5), &cfg).unwrap();
    assert!(boost.phase_deviation <= 1e-12);
    assert!(boost.kernel_deviation > 1e-3, "thermal kernels single out a rest frame");
}

#[test]
fn exchange_relation_phases() {
    let th = theta();
    let other = Skew::reference(0.3).add(&th.scaled(0.5));
    for t2 in [th, other, th.scaled(-1.0)] {
        assert!(exchange_phase_check(1.0, 1.0, &th, &t2, &configs()).unwrap() <= 1e-12);
    }
}

#[test]
fn zero_sigma_decouples_fibers() {
    let th = theta();
    let tp = th.scaled(-1.0);
    let ms = ModeSet::new(vec![[0.3, 0.0, 0.0], [-0.2, 0.4, 0.1], [0.0, -0.5, 0.5]], 1.0, 1, 0.8, 4096).unwrap();
    let integ = Integrator::Modes(ms);
    let zero = ThermalFunctional::covariant(1.0, 1.0, SigmaMeasure::Zero).unwrap();
    let a = FieldPolynomial::field(th, f()).mul(&FieldPolynomial::field(th, g()));
    let b = FieldPolynomial::field(tp, g()).mul(&FieldPolynomial::field(tp, f().conj()));
    let r = omega_smeared(&a.mul(&b), &zero, &integ).unwrap();
    let terms = &r.monomials[0].terms;
    assert_eq!(terms.len(), 3);
    for t in terms {
        if !t.surviving {
            assert_eq!(t.value, Complex64::new(0.0, 0.0));
        }
    }
    assert_eq!(terms.iter().filter(|t| t.surviving).count(), 1);
    let va = omega_smeared(&a, &ThermalFunctional::fiber(1.0, 1.0, th).unwrap(), &integ).unwrap().value;
    let vb = omega_smeared(&b, &ThermalFunctional::fiber(1.0, 1.0, tp).unwrap(), &integ).unwrap().value;
    assert!((r.value - va * vb).norm() <= 1e-10);
    assert!((omega_smeared(&a, &zero, &integ).unwrap().value - va).norm() <= 1e-10);
}

#[test]
fn positivity_scan_reports_a_verdict() {
    let th = theta();
    let mut modes = vec![];
    for a in [-0.6, 0.0, 0.6] {
        for b in [-0.6, 0.6] {
            modes.push([a, b, 0.2 * a]);
        }
    }
    let integ = Integrator::Modes(ModeSet::new(modes, 1.0, 1, 0.5, 4096).unwrap());
    let dirac = ThermalFunctional::covariant(1.0, 1.0, SigmaMeasure::Dirac { q: FourVec::zero() }).unwrap();
    let r = positivity_scan(&dirac, &th, 10, 6, 7, &integ, 1e-8).unwrap();
    assert_eq!(r.draws.len(), 10);
    assert!(r.verdict == "inconclusive" || r.verdict.starts_with("violation: lambda_min="));
    let zero = ThermalFunctional::covariant(1.0, 1.0, SigmaMeasure::Zero).unwrap();
    let rz = positivity_scan(&zero, &th, 5, 6, 7, &integ, 1e-8).unwrap();
    assert_eq!(rz.verdict, "inconclusive");
}

#[test]
fn energy_cutoff_expectations() {
    // E ≈ e^{-s²H²/2}: its expectation is σ̂ averaged over the time nodes
    let e = FieldPolynomial::generator(Generator::Spectral(SpectralFn::EnergyCutoff { width: 4.0, nodes: 8 }));
    let dirac = ThermalFunctional::covariant(1.0, 1.0, SigmaMeasure::Dirac { q: FourVec::zero() }).unwrap();
    let v = omega_smeared(&e, &dirac, &gh(8)).unwrap().value;
    assert!((v - Complex64::new(1.0, 0.0)).norm() < 1e-12, "{v}");
    // σ = 0 has no atom at the origin and no node sits there
    let zero = ThermalFunctional::covariant(1.0, 1.0, SigmaMeasure::Zero).unwrap();
    assert_eq!(omega_smeared(&e, &zero, &gh(8)).unwrap().value, Complex64::new(0.0, 0.0));
}
