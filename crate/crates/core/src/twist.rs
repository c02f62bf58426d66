//! Gaussian test functions and the Weyl–Moyal twisted tensor product.
//!
//! Fourier convention: `f̃(p) = (2π)⁻² ∫ d⁴x f(x) e^{-ip·x}` with the Minkowski
//! product. A packet is
//!
//! ```text
//! f(x)  = A exp(-|x - x₀|²_E / 2w²) e^{i q₀·x}
//! f̃(p) = A w⁴ exp(-w² |p - q₀|²_E / 2) e^{-i(p - q₀)·x₀}
//! ```
//!
//! where `|·|_E` is the Euclidean norm of the components. The time component of
//! `x₀` may carry an imaginary part (`imag_time`), which is how complex-time
//! Heisenberg evolution enters; `f̃` stays entire in `p₀`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kinematics::theta_contract;
use crate::{FourVec, Skew};

/// Gaussian packet with closed-form Fourier transform.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussianPacket {
    pub center: FourVec,
    #[serde(default)]
    pub imag_time: f64,
    pub momentum: FourVec,
    pub width: f64,
    pub amplitude: Complex64,
}

impl GaussianPacket {
    pub fn new(center: FourVec, momentum: FourVec, width: f64, amplitude: Complex64) -> Result<Self> {
        if !(width > 0.0) || !width.is_finite() {
            return Err(Error::InvalidPacket(format!("width must be positive, got {width}")));
        }
        if !amplitude.re.is_finite() || !amplitude.im.is_finite() {
            return Err(Error::InvalidPacket("non-finite amplitude".into()));
        }
        Ok(Self { center, imag_time: 0.0, momentum, width, amplitude })
    }

    /// Fourier value at a real momentum.
    pub fn fourier(&self, p: &FourVec) -> Complex64 {
        self.fourier_complex(Complex64::new(p.p0, 0.0), p.k)
    }

    /// Fourier value with complex energy argument.
    pub fn fourier_complex(&self, p0: Complex64, k: [f64; 3]) -> Complex64 {
        let w2 = self.width * self.width;
        let d0 = p0 - self.momentum.p0;
        let mut quad = d0 * d0;
        for i in 0..3 {
            let d = k[i] - self.momentum.k[i];
            quad += d * d;
        }
        // (p - q₀)·x₀ with complex time component of x₀
        let t = Complex64::new(self.center.p0, self.imag_time);
        let mut px = -(p0 - self.momentum.p0) * t;
        for i in 0..3 {
            px += (k[i] - self.momentum.k[i]) * self.center.k[i];
        }
        self.amplitude * w2 * w2 * (-0.5 * w2 * quad - Complex64::i() * px).exp()
    }

    /// Packet of the complex-conjugate function `f̄`.
    pub fn conj(&self) -> Self {
        Self {
            center: self.center,
            imag_time: -self.imag_time,
            momentum: -self.momentum,
            width: self.width,
            amplitude: self.amplitude.conj(),
        }
    }

    /// Position-space shift `f(x) ↦ f(x - a)`. The carrier contributes `e^{-iq₀·a}`.
    pub fn translated(&self, a: &FourVec) -> Self {
        let mut out = *self;
        out.center = self.center + *a;
        out.amplitude *= Complex64::from_polar(1.0, -crate::kinematics::dot(&self.momentum, a));
        out
    }

    /// `f(x) ↦ f(x - dt·e₀)` continued to complex `dt`.
    pub fn time_shifted(&self, dt: Complex64) -> Self {
        let mut out = *self;
        out.center.p0 += dt.re;
        out.imag_time += dt.im;
        // -i q₀·(dt e₀) = i q₀⁰ dt
        out.amplitude *= (Complex64::i() * self.momentum.p0 * dt).exp();
        out
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        let mut out = *self;
        out.amplitude *= c;
        out
    }

    /// Position-space value; used by tests as an independent oracle.
    pub fn position_value(&self, x: &FourVec) -> Complex64 {
        assert!(self.imag_time == 0.0, "position values need a real center");
        let d = *x - self.center;
        let e2: f64 = d.to_array().iter().map(|c| c * c).sum();
        let phase = crate::kinematics::dot(&self.momentum, x);
        self.amplitude * (-e2 / (2.0 * self.width * self.width)).exp() * Complex64::from_polar(1.0, phase)
    }
}

/// Free function form of [`GaussianPacket::fourier_complex`].
pub fn fourier_eval(f: &GaussianPacket, p0: Complex64, k: [f64; 3]) -> Complex64 {
    f.fourier_complex(p0, k)
}

/// Cross phase `∏_{l∈left} ∏_{r∈right} e^{i p_l·θ p_r}` on argument index ranges.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Twist {
    pub left: (usize, usize),
    pub right: (usize, usize),
    pub theta: Skew,
}

/// Multi-variable test function: product of packets times twist phases.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwistedProductFunction {
    pub packets: Vec<GaussianPacket>,
    #[serde(default)]
    pub twists: Vec<Twist>,
}

impl TwistedProductFunction {
    pub fn single(f: GaussianPacket) -> Self {
        Self { packets: vec![f], twists: Vec::new() }
    }

    /// Untwisted product `f₁ ⊗ … ⊗ fₙ`.
    pub fn product(fs: Vec<GaussianPacket>) -> Self {
        Self { packets: fs, twists: Vec::new() }
    }

    pub fn arity(&self) -> usize {
        self.packets.len()
    }

    /// Total twist exponent `Σ p_l·θ p_r` (real).
    pub fn twist_exponent(&self, args: &[FourVec]) -> f64 {
        let mut s = 0.0;
        for tw in &self.twists {
            for l in tw.left.0..tw.left.1 {
                for r in tw.right.0..tw.right.1 {
                    s += theta_contract(&args[l], &tw.theta, &args[r]);
                }
            }
        }
        s
    }

    pub fn eval(&self, args: &[FourVec]) -> Complex64 {
        assert_eq!(args.len(), self.arity(), "argument count");
        let base: Complex64 = self.packets.iter().zip(args).map(|(f, p)| f.fourier(p)).product();
        base * Complex64::from_polar(1.0, self.twist_exponent(args))
    }

    /// Function of the conjugated operator kernel: `h*(p₁..pₙ) = conj h(-pₙ..-p₁)`.
    pub fn star(&self) -> Self {
        let n = self.arity();
        let packets = self.packets.iter().rev().map(|f| f.conj()).collect();
        let rev = |(a, b): (usize, usize)| (n - b, n - a);
        let twists = self
            .twists
            .iter()
            .map(|t| Twist { left: rev(t.right), right: rev(t.left), theta: t.theta })
            .collect();
        Self { packets, twists }
    }

    pub fn map_packets(&self, f: impl Fn(&GaussianPacket) -> GaussianPacket) -> Self {
        Self { packets: self.packets.iter().map(f).collect(), twists: self.twists.clone() }
    }
}

/// `f ⊗_θ g`: concatenation carrying `e^{i p_l·θ q_r}` for every left/right pair.
pub fn twisted_tensor(f: &TwistedProductFunction, g: &TwistedProductFunction, theta: &Skew) -> TwistedProductFunction {
    let n = f.arity();
    let m = g.arity();
    let mut packets = f.packets.clone();
    packets.extend(g.packets.iter().copied());
    let mut twists = f.twists.clone();
    twists.extend(g.twists.iter().map(|t| Twist {
        left: (t.left.0 + n, t.left.1 + n),
        right: (t.right.0 + n, t.right.1 + n),
        theta: t.theta,
    }));
    if !theta.is_zero() && n > 0 && m > 0 {
        twists.push(Twist { left: (0, n), right: (n, n + m), theta: *theta });
    }
    TwistedProductFunction { packets, twists }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn packet(seed: u64) -> GaussianPacket {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let mut v = || r.random_range(-0.6..0.6);
        GaussianPacket::new(
            FourVec::new(v(), [v(), v(), v()]),
            FourVec::new(v(), [v(), v(), v()]),
            1.0 + v().abs(),
            Complex64::new(1.0 + v(), v()),
        )
        .unwrap()
    }

    fn rand_vec(r: &mut ChaCha8Rng) -> FourVec {
        FourVec::new(r.random_range(-2.0..2.0), [r.random_range(-2.0..2.0), r.random_range(-2.0..2.0), r.random_range(-2.0..2.0)])
    }

    fn theta() -> Skew {
        Skew::from_lower([
            [0.0, 0.4, 0.1, -0.3],
            [-0.4, 0.0, 0.6, 0.2],
            [-0.1, -0.6, 0.0, 0.5],
            [0.3, -0.2, -0.5, 0.0],
        ])
        .unwrap()
    }

    #[test]
    fn peak_is_real_positive() {
        let q0 = FourVec::new(1.2, [0.3, 0.0, -0.1]);
        let f = GaussianPacket::new(FourVec::zero(), q0, 1.5, Complex64::new(1.0, 0.0)).unwrap();
        let v = f.fourier(&q0);
        assert!(v.im == 0.0 && v.re > 0.0);
        assert!((v.re - 1.5f64.powi(4)).abs() < 1e-14);
    }

    #[test]
    fn translation_is_position_shift() {
        let f = packet(5);
        let a = FourVec::new(0.4, [-0.3, 0.8, 0.1]);
        let g = f.translated(&a);
        for x in [FourVec::new(0.1, [0.2, -0.3, 0.5]), FourVec::new(-1.0, [0.7, 0.0, 0.4])] {
            assert!((g.position_value(&x) - f.position_value(&(x - a))).norm() < 1e-14);
        }
        let p = FourVec::new(0.9, [-0.4, 0.6, 0.0]);
        let expect = f.fourier(&p) * Complex64::from_polar(1.0, -crate::kinematics::dot(&p, &a));
        assert!((g.fourier(&p) - expect).norm() < 1e-14);
        // complex time shift continues the real one
        let dt = Complex64::new(0.3, 0.0);
        assert!((f.time_shifted(dt).fourier(&p) - f.translated(&FourVec::new(0.3, [0.0; 3])).fourier(&p)).norm() < 1e-14);
        let dt = Complex64::new(0.3, 0.8);
        let expect = f.fourier(&p) * (Complex64::i() * p.p0 * dt).exp();
        assert!((f.time_shifted(dt).fourier(&p) - expect).norm() < 1e-13);
    }

    #[test]
    fn conjugation_law() {
        let f = packet(3).time_shifted(Complex64::new(0.2, -0.7));
        for s in 0..20u64 {
            let mut r = ChaCha8Rng::seed_from_u64(s);
            let p0 = Complex64::new(r.random_range(-2.0..2.0), r.random_range(-1.0..1.0));
            let k = [r.random_range(-2.0..2.0), r.random_range(-2.0..2.0), r.random_range(-2.0..2.0)];
            let lhs = f.conj().fourier_complex(p0, k);
            let rhs = f.fourier_complex(-p0.conj(), [-k[0], -k[1], -k[2]]).conj();
            assert!((lhs - rhs).norm() <= 1e-13 * (1.0 + lhs.norm()));
        }
    }

    #[test]
    fn matches_numerical_fourier_integral() {
        // Direct 4D trapezoidal quadrature of (2π)⁻² ∫ f(x) e^{-ip·x} d⁴x.
        let f = GaussianPacket::new(
            FourVec::new(0.3, [-0.2, 0.1, 0.4]),
            FourVec::new(0.5, [0.2, -0.3, 0.1]),
            1.0,
            Complex64::new(0.8, 0.3),
        )
        .unwrap();
        let p = FourVec::new(0.9, [-0.4, 0.6, 0.0]);
        let n = 36usize;
        let h = 0.45;
        let grid: Vec<f64> = (0..n).map(|i| (i as f64 - (n as f64 - 1.0) / 2.0) * h).collect();
        let mut acc = Complex64::new(0.0, 0.0);
        for &a in &grid {
            for &b in &grid {
                for &c in &grid {
                    for &d in &grid {
                        let x = FourVec::new(a + f.center.p0, [b + f.center.k[0], c + f.center.k[1], d + f.center.k[2]]);
                        let px = crate::kinematics::dot(&p, &x);
                        acc += f.position_value(&x) * Complex64::from_polar(1.0, -px);
                    }
                }
            }
        }
        let numeric = acc * h.powi(4) / (2.0 * std::f64::consts::PI).powi(2);
        let closed = f.fourier(&p);
        assert!((numeric - closed).norm() <= 1e-8, "numeric {numeric} closed {closed}");
    }

    #[test]
    fn cauchy_riemann_in_energy() {
        let f = packet(11);
        let g = packet(12);
        let tp = twisted_tensor(&TwistedProductFunction::single(f), &TwistedProductFunction::single(g), &theta());
        let k = [0.3, -0.2, 0.5];
        let q = FourVec::new(0.4, [0.1, 0.7, -0.2]);
        let h = 1e-5;
        for (x, y) in [(0.3, 0.1), (-0.8, -0.4), (1.1, 0.6)] {
            // Only the first packet's energy is continued; the twist phase is
            // linear in p₀ and entire, so Cauchy–Riemann is checked on the packet.
            let fz = |re: f64, im: f64| f.fourier_complex(Complex64::new(re, im), k);
            let dfdx = (fz(x + h, y) - fz(x - h, y)) / (2.0 * h);
            let dfdy = (fz(x, y + h) - fz(x, y - h)) / (2.0 * h);
            assert!((dfdy - Complex64::i() * dfdx).norm() <= 1e-6);
        }
        let _ = tp.eval(&[FourVec::new(0.1, k), q]);
    }

    #[test]
    fn twisted_tensor_examples() {
        let f = TwistedProductFunction::single(packet(1));
        let g = TwistedProductFunction::single(packet(2));
        let mut r = ChaCha8Rng::seed_from_u64(9);
        let (p, q) = (rand_vec(&mut r), rand_vec(&mut r));
        let plain = twisted_tensor(&f, &g, &Skew::zero());
        assert!(plain.twists.is_empty());
        assert_eq!(plain.eval(&[p, q]), f.eval(&[p]) * g.eval(&[q]));
        let tw = twisted_tensor(&f, &g, &theta());
        let expect = f.eval(&[p]) * g.eval(&[q]) * Complex64::from_polar(1.0, theta_contract(&p, &theta(), &q));
        assert!((tw.eval(&[p, q]) - expect).norm() <= 1e-14 * expect.norm().max(1.0));
    }

    #[test]
    fn twisted_tensor_associative() {
        let f = TwistedProductFunction::single(packet(4));
        let g = twisted_tensor(&TwistedProductFunction::single(packet(5)), &TwistedProductFunction::single(packet(6)), &theta());
        let h = TwistedProductFunction::single(packet(7));
        let t = theta().scaled(0.7);
        let left = twisted_tensor(&twisted_tensor(&f, &g, &t), &h, &t);
        let right = twisted_tensor(&f, &twisted_tensor(&g, &h, &t), &t);
        let mut r = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..100 {
            let args: Vec<FourVec> = (0..4).map(|_| rand_vec(&mut r)).collect();
            let (a, b) = (left.eval(&args), right.eval(&args));
            assert!((a - b).norm() <= 1e-12 * a.norm().max(1e-300).max(1.0));
            let ph = Complex64::from_polar(1.0, left.twist_exponent(&args));
            assert!((ph.norm() - 1.0).abs() <= 1e-14);
        }
    }

    #[test]
    fn star_is_involutive_and_matches_definition() {
        let f = twisted_tensor(
            &twisted_tensor(&TwistedProductFunction::single(packet(1)), &TwistedProductFunction::single(packet(2)), &theta()),
            &TwistedProductFunction::single(packet(3)),
            &theta().scaled(-0.5),
        );
        assert_eq!(f.star().star(), f);
        let mut r = ChaCha8Rng::seed_from_u64(5);
        let args: Vec<FourVec> = (0..3).map(|_| rand_vec(&mut r)).collect();
        let rev: Vec<FourVec> = args.iter().rev().map(|p| -*p).collect();
        let lhs = f.star().eval(&args);
        let rhs = f.eval(&rev).conj();
        assert!((lhs - rhs).norm() <= 1e-13 * (1.0 + lhs.norm()));
    }

    #[test]
    fn rejects_bad_width() {
        assert!(GaussianPacket::new(FourVec::zero(), FourVec::zero(), 0.0, Complex64::new(1.0, 0.0)).is_err());
    }
}
