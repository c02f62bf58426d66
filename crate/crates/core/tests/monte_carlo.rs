//! Monte Carlo fallback above two contracted pairs.

use moyal_kms::algebra::FieldPolynomial;
use moyal_kms::functionals::{enumerate_contractions, omega_smeared, Integrator, QuadratureSpec, ThermalFunctional};
use moyal_kms::twist::GaussianPacket;
use moyal_kms::{FourVec, Skew};
use num_complex::Complex64;

fn packets() -> Vec<GaussianPacket> {
    (0..6)
        .map(|i| {
            let x = i as f64;
            GaussianPacket::new(
                FourVec::new(0.1 * x, [0.2 - 0.1 * x, 0.05 * x, 0.0]),
                FourVec::new(0.2 - 0.1 * x, [0.1, -0.05 * x, 0.1]),
                1.0 + 0.05 * x,
                Complex64::new(1.0, 0.1 * x),
            )
            .unwrap()
        })
        .collect()
}

#[test]
fn six_point_matches_wick_factorisation_at_zero_theta() {
    let phi = ThermalFunctional::zero_fiber(1.0, 1.0).unwrap();
    let fs: Vec<FieldPolynomial> = packets().into_iter().map(|f| FieldPolynomial::field(Skew::zero(), f)).collect();
    let word = fs.iter().skip(1).fold(fs[0].clone(), |acc, f| acc.mul(f));
    let spec = QuadratureSpec { order: 12, adaptive: false, scale: Some(0.5), mc_samples: 100_000, ..Default::default() };
    let integ = Integrator::GaussHermite(spec.clone());
    let six = omega_smeared(&word, &phi, &integ).unwrap();
    assert!(six.method.contains("monte carlo"));
    // at θ = 0 each contraction is a product of two-point values
    let two = |a: usize, b: usize| omega_smeared(&fs[a].mul(&fs[b]), &phi, &integ).unwrap().value;
    let wick: Complex64 = enumerate_contractions(6).unwrap().iter().map(|c| c.pairs().map(|(l, r)| two(l, r)).product::<Complex64>()).sum();
    let dev = (six.value - wick).norm();
    assert!(dev <= 5.0 * six.error_estimate.max(1e-3 * wick.norm()), "mc {} wick {wick} err {}", six.value, six.error_estimate);
    assert!(six.error_estimate <= 1e-2 * wick.norm());
    // same seed, same bits
    let again = omega_smeared(&word, &phi, &integ).unwrap();
    assert_eq!(again.value, six.value);
}
