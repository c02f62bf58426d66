//! Occupation-number basis and sparse action of field words on vectors.

use nalgebra::DVector;
use num_complex::Complex64;

use super::modes::ModeSet;
use crate::algebra::Generator;
use crate::error::{Error, Result};
use crate::kinematics::dot;
use crate::twist::GaussianPacket;
use crate::{FourVec, Skew};

pub type Vector = DVector<Complex64>;

/// Truncated Fock basis `|n₁ … n_M⟩`, mode 0 least significant.
#[derive(Clone, Debug)]
pub struct FockBasis {
    pub modes: ModeSet,
    occ: Vec<Vec<usize>>,
    stride: Vec<usize>,
    momenta: Vec<FourVec>,
}

/// Ladder operator on one mode: `+1` creation, `-1` annihilation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Ladder {
    pub mode: usize,
    pub sign: i8,
}

impl FockBasis {
    pub fn new(modes: &ModeSet) -> Self {
        let m = modes.len();
        let base = modes.cutoff() + 1;
        let dim = modes.dim();
        let stride: Vec<usize> = (0..m).map(|i| base.pow(i as u32)).collect();
        let occ: Vec<Vec<usize>> = (0..dim).map(|n| (0..m).map(|i| (n / stride[i]) % base).collect()).collect();
        let p: Vec<FourVec> = (0..m).map(|i| modes.momentum(i)).collect();
        let momenta = occ
            .iter()
            .map(|o| o.iter().zip(&p).fold(FourVec::zero(), |acc, (&k, q)| acc + *q * k as f64))
            .collect();
        Self { modes: modes.clone(), occ, stride, momenta }
    }

    pub fn dim(&self) -> usize {
        self.occ.len()
    }

    pub fn occupations(&self, n: usize) -> &[usize] {
        &self.occ[n]
    }

    /// Eigenvalue `P_n` of the energy-momentum operators.
    pub fn momentum(&self, n: usize) -> FourVec {
        self.momenta[n]
    }

    /// All occupations at most `N - 1`.
    pub fn sub_cutoff(&self, n: usize) -> bool {
        self.occ[n].iter().all(|&k| k < self.modes.cutoff())
    }

    pub fn apply_ladder(&self, l: Ladder, v: &Vector) -> Vector {
        let mut out = Vector::zeros(v.len());
        let cut = self.modes.cutoff();
        for n in 0..v.len() {
            let x = v[n];
            if x == Complex64::new(0.0, 0.0) {
                continue;
            }
            let k = self.occ[n][l.mode];
            if l.sign > 0 {
                if k < cut {
                    out[n + self.stride[l.mode]] += x * ((k + 1) as f64).sqrt();
                }
            } else if k > 0 {
                out[n - self.stride[l.mode]] += x * (k as f64).sqrt();
            }
        }
        out
    }

    /// `U(x) v` with `U(x) = e^{ix·P}`.
    pub fn apply_translation(&self, x: &FourVec, v: &Vector) -> Vector {
        Vector::from_iterator(v.len(), v.iter().zip(&self.momenta).map(|(c, p)| c * Complex64::from_polar(1.0, dot(x, p))))
    }

    /// Signed slots `±p_i` with their ladder operator and weight.
    pub fn slots(&self) -> Vec<(FourVec, Ladder, f64)> {
        let mut out = Vec::with_capacity(2 * self.modes.len());
        for i in 0..self.modes.len() {
            let p = self.modes.momentum(i);
            let w = self.modes.weight(i);
            out.push((p, Ladder { mode: i, sign: 1 }, w));
            out.push((-p, Ladder { mode: i, sign: -1 }, w));
        }
        out
    }

    /// `φ̃(p) U(-θp) v` for a slot momentum `p`.
    fn apply_sharp(&self, theta: &Skew, p: &FourVec, l: Ladder, v: &Vector) -> Vector {
        let u = self.apply_translation(&-theta.apply(p), v);
        self.apply_ladder(l, &u)
    }

    /// `φ_θ(f) v = Σ_s √w f̃(-p_s) φ̃(p_s) U(-θp_s) v`.
    pub fn apply_packet(&self, theta: &Skew, f: &GaussianPacket, v: &Vector) -> Vector {
        let mut out = Vector::zeros(v.len());
        for (p, l, w) in self.slots() {
            let c = w.sqrt() * f.fourier(&-p);
            out += self.apply_sharp(theta, &p, l, v) * c;
        }
        out
    }

    /// `φ_θ(h) v = Σ_{s₁…sₙ} ∏√w h̃(-q) φ̃(q₁)…φ̃(qₙ) U(-θΣq) v`.
    pub fn apply_block(&self, theta: &Skew, h: &crate::twist::TwistedProductFunction, v: &Vector) -> Vector {
        let slots = self.slots();
        let n = h.arity();
        let mut out = Vector::zeros(v.len());
        let total = slots.len().pow(n as u32);
        let mut idx = vec![0usize; n];
        for t in 0..total {
            let mut r = t;
            for d in (0..n).rev() {
                idx[d] = r % slots.len();
                r /= slots.len();
            }
            let args: Vec<FourVec> = idx.iter().map(|&s| -slots[s].0).collect();
            let w: f64 = idx.iter().map(|&s| slots[s].2.sqrt()).product();
            let c = w * h.eval(&args);
            if c == Complex64::new(0.0, 0.0) {
                continue;
            }
            let q: FourVec = idx.iter().fold(FourVec::zero(), |acc, &s| acc + slots[s].0);
            let mut u = self.apply_translation(&-theta.apply(&q), v);
            for &s in idx.iter().rev() {
                u = self.apply_ladder(slots[s].1, &u);
            }
            out += u * c;
        }
        out
    }

    pub fn apply_generator(&self, g: &Generator, v: &Vector) -> Result<Vector> {
        Ok(match g {
            Generator::Field { theta, f } => self.apply_packet(theta, f, v),
            Generator::Block { theta, h } => self.apply_block(theta, h, v),
            Generator::SharpField { theta, p } => {
                let q = p.four_vector();
                if (p.m - self.modes.mass()).abs() > 1e-12 * p.m {
                    return Err(Error::NotAMode);
                }
                let (mode, sign) = self.modes.find(&q).ok_or(Error::NotAMode)?;
                self.apply_sharp(theta, &q, Ladder { mode, sign }, v)
            }
            Generator::Translation { x } => self.apply_translation(x, v),
            Generator::Spectral(s) => {
                let mut out = Vector::zeros(v.len());
                for (c, x) in s.expand() {
                    out += self.apply_translation(&x, v) * c;
                }
                out
            }
        })
    }

    /// `g₁ … g_m v`.
    pub fn apply_word(&self, word: &[Generator], v: &Vector) -> Result<Vector> {
        let mut u = v.clone();
        for g in word.iter().rev() {
            u = self.apply_generator(g, &u)?;
        }
        Ok(u)
    }

    pub fn basis_vector(&self, n: usize) -> Vector {
        let mut v = Vector::zeros(self.dim());
        v[n] = Complex64::new(1.0, 0.0);
        v
    }
}
