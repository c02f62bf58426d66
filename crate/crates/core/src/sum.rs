//! Order-fixed reductions.

use num_complex::Complex64;
use rayon::prelude::*;

/// Pairwise (tree) summation. The bracketing depends only on the length of
/// the input, so results are reproducible bit for bit.
pub fn pairwise_sum(xs: &[Complex64]) -> Complex64 {
    match xs.len() {
        0 => Complex64::new(0.0, 0.0),
        1 => xs[0],
        n if n <= 8 => xs.iter().fold(Complex64::new(0.0, 0.0), |a, b| a + b),
        n => {
            let (a, b) = xs.split_at(n / 2);
            pairwise_sum(a) + pairwise_sum(b)
        }
    }
}

/// Evaluate `f` on `0..n` in parallel and reduce pairwise in index order.
pub fn par_pairwise<F>(n: usize, f: F) -> Complex64
where
    F: Fn(usize) -> Complex64 + Sync + Send,
{
    let vals: Vec<Complex64> = (0..n).into_par_iter().map(f).collect();
    pairwise_sum(&vals)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairwise_matches_naive_and_is_deterministic() {
        let xs: Vec<Complex64> = (0..1000).map(|i| Complex64::new((i as f64).sin(), 1.0 / (1.0 + i as f64))).collect();
        let naive: Complex64 = xs.iter().sum();
        assert!((pairwise_sum(&xs) - naive).norm() < 1e-12);
        let a = par_pairwise(xs.len(), |i| xs[i]);
        let b = par_pairwise(xs.len(), |i| xs[i]);
        assert_eq!(a.re.to_bits(), b.re.to_bits());
        assert_eq!(a, pairwise_sum(&xs));
    }
}
