//! Minkowski kinematics in signature (-,+,+,+).
//!
//! Deformation matrices are stored as mixed tensors `θ^μ_ν` that are
//! Lorentz-skew: `η θ` is antisymmetric. With that placement
//! `theta_contract(p, θ, p) = p·(θp)` vanishes identically.

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Diagonal of the Minkowski metric.
pub const METRIC: [f64; 4] = [-1.0, 1.0, 1.0, 1.0];

fn eta<T: Real>(mu: usize) -> T {
    if mu == 0 {
        -T::one()
    } else {
        T::one()
    }
}

/// A Minkowski four-vector `(p0, k)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FourVector<T> {
    pub p0: T,
    pub k: [T; 3],
}

impl<T: Real> FourVector<T> {
    /// Panics on non-finite input; use [`FourVector::try_new`] for a checked variant.
    pub fn new(p0: T, k: [T; 3]) -> Self {
        Self::try_new(p0, k).expect("finite four-vector components")
    }

    pub fn try_new(p0: T, k: [T; 3]) -> Result<Self> {
        if p0.is_finite() && k.iter().all(|c| c.is_finite()) {
            Ok(Self { p0, k })
        } else {
            Err(Error::NonFinite("four-vector"))
        }
    }

    pub fn zero() -> Self {
        Self { p0: T::zero(), k: [T::zero(); 3] }
    }

    pub fn from_array(c: [T; 4]) -> Self {
        Self::new(c[0], [c[1], c[2], c[3]])
    }

    pub fn to_array(self) -> [T; 4] {
        [self.p0, self.k[0], self.k[1], self.k[2]]
    }

    pub fn component(&self, mu: usize) -> T {
        if mu == 0 {
            self.p0
        } else {
            self.k[mu - 1]
        }
    }

    /// Largest absolute component.
    pub fn max_abs(&self) -> T {
        self.to_array().iter().fold(T::zero(), |m, c| m.max(c.abs()))
    }

    pub fn is_zero(&self) -> bool {
        self.to_array().iter().all(|c| c.is_zero())
    }
}

impl<T: Real> Add for FourVector<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self { p0: self.p0 + o.p0, k: [self.k[0] + o.k[0], self.k[1] + o.k[1], self.k[2] + o.k[2]] }
    }
}

impl<T: Real> Sub for FourVector<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}

impl<T: Real> Neg for FourVector<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self { p0: -self.p0, k: [-self.k[0], -self.k[1], -self.k[2]] }
    }
}

impl<T: Real> Mul<T> for FourVector<T> {
    type Output = Self;
    fn mul(self, s: T) -> Self {
        Self { p0: self.p0 * s, k: [self.k[0] * s, self.k[1] * s, self.k[2] * s] }
    }
}

/// Single-particle energy `sqrt(m² + |k|²)`.
pub fn energy<T: Real>(k: [T; 3], m: T) -> Result<T> {
    if !(m > T::zero()) {
        return Err(Error::NonPositiveMass(m.to_f64().unwrap_or(f64::NAN)));
    }
    Ok((m * m + k[0] * k[0] + k[1] * k[1] + k[2] * k[2]).sqrt())
}

/// Minkowski product `-p0 q0 + k·k'`.
pub fn dot<T: Real>(p: &FourVector<T>, q: &FourVector<T>) -> T {
    -p.p0 * q.p0 + p.k[0] * q.k[0] + p.k[1] * q.k[1] + p.k[2] * q.k[2]
}

/// A point on the upper (`sign = +1`) or lower (`sign = -1`) mass shell.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OnShellMomentum<T> {
    pub sign: i8,
    pub k: [T; 3],
    pub m: T,
}

impl<T: Real> OnShellMomentum<T> {
    pub fn new(sign: i8, k: [T; 3], m: T) -> Result<Self> {
        energy(k, m)?;
        if !k.iter().all(|c| c.is_finite()) {
            return Err(Error::NonFinite("on-shell momentum"));
        }
        let sign = if sign >= 0 { 1 } else { -1 };
        Ok(Self { sign, k, m })
    }

    pub fn four_vector(&self) -> FourVector<T> {
        let e = energy(self.k, self.m).expect("validated mass");
        let s = if self.sign > 0 { T::one() } else { -T::one() };
        FourVector::new(s * e, [s * self.k[0], s * self.k[1], s * self.k[2]])
    }

    /// The reflected momentum `-p`, which lies on the opposite shell.
    pub fn reflected(&self) -> Self {
        Self { sign: -self.sign, k: self.k, m: self.m }
    }
}

/// Relative mass-shell defect `|p·p + m²| / m²`.
pub fn shell_defect<T: Real>(p: &FourVector<T>, m: T) -> T {
    (dot(p, p) + m * m).abs() / (m * m)
}

/// Lorentz-skew deformation matrix, stored as the mixed tensor `θ^μ_ν`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SkewMatrix<T> {
    entries: [[T; 4]; 4],
}

impl<T: Real> SkewMatrix<T> {
    pub fn new(entries: [[T; 4]; 4]) -> Result<Self> {
        if !entries.iter().flatten().all(|c| c.is_finite()) {
            return Err(Error::NonFinite("skew matrix"));
        }
        let m = Self { entries };
        let scale = T::one() + m.max_abs();
        let defect = m.skew_defect();
        if defect > T::invariant_tol() * scale {
            return Err(Error::NotLorentzSkew { defect: defect.to_f64().unwrap_or(f64::NAN) });
        }
        Ok(m)
    }

    /// From the antisymmetric covariant components `θ_{μν}`.
    pub fn from_lower(lower: [[T; 4]; 4]) -> Result<Self> {
        let mut e = [[T::zero(); 4]; 4];
        for mu in 0..4 {
            for nu in 0..4 {
                e[mu][nu] = eta::<T>(mu) * lower[mu][nu];
            }
        }
        Self::new(e)
    }

    pub fn zero() -> Self {
        Self { entries: [[T::zero(); 4]; 4] }
    }

    /// Reference matrix with only the `(0,1)` block populated: `θ_{01} = -θ_{10} = κ`.
    pub fn reference(kappa: T) -> Self {
        let mut lower = [[T::zero(); 4]; 4];
        lower[0][1] = kappa;
        lower[1][0] = -kappa;
        Self::from_lower(lower).expect("reference matrix is Lorentz-skew")
    }

    pub fn entries(&self) -> &[[T; 4]; 4] {
        &self.entries
    }

    pub fn get(&self, mu: usize, nu: usize) -> T {
        self.entries[mu][nu]
    }

    /// Covariant components `θ_{μν} = η_{μκ} θ^κ_ν`.
    pub fn lower(&self) -> [[T; 4]; 4] {
        let mut l = [[T::zero(); 4]; 4];
        for mu in 0..4 {
            for nu in 0..4 {
                l[mu][nu] = eta::<T>(mu) * self.entries[mu][nu];
            }
        }
        l
    }

    /// `max |(ηθ) + (ηθ)ᵀ|`.
    pub fn skew_defect(&self) -> T {
        let l = self.lower();
        let mut d = T::zero();
        for mu in 0..4 {
            for nu in 0..4 {
                d = d.max((l[mu][nu] + l[nu][mu]).abs());
            }
        }
        d
    }

    pub fn max_abs(&self) -> T {
        self.entries.iter().flatten().fold(T::zero(), |m, c| m.max(c.abs()))
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().flatten().all(|c| c.is_zero())
    }

    /// `θq` as a contravariant vector.
    pub fn apply(&self, q: &FourVector<T>) -> FourVector<T> {
        let qa = q.to_array();
        let mut out = [T::zero(); 4];
        for (mu, row) in self.entries.iter().enumerate() {
            out[mu] = row.iter().zip(qa.iter()).fold(T::zero(), |s, (a, b)| s + *a * *b);
        }
        FourVector::from_array(out)
    }

    pub fn scaled(&self, s: T) -> Self {
        let mut e = self.entries;
        e.iter_mut().flatten().for_each(|c| *c = *c * s);
        Self { entries: e }
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut e = self.entries;
        for mu in 0..4 {
            for nu in 0..4 {
                e[mu][nu] = e[mu][nu] + o.entries[mu][nu];
            }
        }
        Self { entries: e }
    }

    /// Componentwise closeness.
    pub fn approx_eq(&self, o: &Self, tol: T) -> bool {
        self.entries
            .iter()
            .flatten()
            .zip(o.entries.iter().flatten())
            .all(|(a, b)| (*a - *b).abs() <= tol)
    }
}

/// `p·(θq)`.
pub fn theta_contract<T: Real>(p: &FourVector<T>, theta: &SkewMatrix<T>, q: &FourVector<T>) -> T {
    dot(p, &theta.apply(q))
}

type Mat4<T> = [[T; 4]; 4];

fn matmul<T: Real>(a: &Mat4<T>, b: &Mat4<T>) -> Mat4<T> {
    let mut c = [[T::zero(); 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            c[i][j] = (0..4).fold(T::zero(), |s, k| s + a[i][k] * b[k][j]);
        }
    }
    c
}

fn det4<T: Real>(m: &Mat4<T>) -> T {
    // Gaussian elimination with partial pivoting.
    let mut a = *m;
    let mut det = T::one();
    for col in 0..4 {
        let piv = (col..4)
            .max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())
            .unwrap();
        if a[piv][col].is_zero() {
            return T::zero();
        }
        if piv != col {
            a.swap(piv, col);
            det = -det;
        }
        det = det * a[col][col];
        for row in col + 1..4 {
            let f = a[row][col] / a[col][col];
            for k in col..4 {
                a[row][k] = a[row][k] - f * a[col][k];
            }
        }
    }
    det
}

/// Proper orthochronous Lorentz transformation `Λ^μ_ν`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LorentzTransform<T> {
    m: Mat4<T>,
}

impl<T: Real> LorentzTransform<T> {
    pub fn new(m: Mat4<T>) -> Result<Self> {
        if !m.iter().flatten().all(|c| c.is_finite()) {
            return Err(Error::NonFinite("Lorentz transform"));
        }
        let l = Self { m };
        let scale = T::one() + l.m.iter().flatten().fold(T::zero(), |s, c| s.max(c.abs()));
        let tol = T::invariant_tol() * scale * scale;
        let d = l.metric_defect();
        if d > tol {
            return Err(Error::NotLorentz(format!("metric defect {:e}", d.to_f64().unwrap_or(f64::NAN))));
        }
        if (l.det() - T::one()).abs() > tol {
            return Err(Error::NotLorentz("determinant is not +1".into()));
        }
        if m[0][0] < T::one() - tol {
            return Err(Error::NotLorentz("not orthochronous".into()));
        }
        Ok(l)
    }

    pub fn identity() -> Self {
        let mut m = [[T::zero(); 4]; 4];
        (0..4).for_each(|i| m[i][i] = T::one());
        Self { m }
    }

    /// Boost with the given rapidity along spatial axis `axis ∈ {1,2,3}`.
    pub fn boost(axis: usize, rapidity: T) -> Self {
        assert!((1..=3).contains(&axis), "spatial axis index in 1..=3");
        let mut l = Self::identity();
        let (c, s) = (rapidity.cosh(), rapidity.sinh());
        l.m[0][0] = c;
        l.m[axis][axis] = c;
        l.m[0][axis] = s;
        l.m[axis][0] = s;
        l
    }

    /// Rotation by `angle` about spatial axis `axis ∈ {1,2,3}`.
    pub fn rotation(axis: usize, angle: T) -> Self {
        assert!((1..=3).contains(&axis), "spatial axis index in 1..=3");
        let (i, j) = match axis {
            1 => (2, 3),
            2 => (3, 1),
            _ => (1, 2),
        };
        let mut l = Self::identity();
        let (c, s) = (angle.cos(), angle.sin());
        l.m[i][i] = c;
        l.m[j][j] = c;
        l.m[i][j] = -s;
        l.m[j][i] = s;
        l
    }

    pub fn matrix(&self) -> &Mat4<T> {
        &self.m
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Self {
        Self { m: matmul(&self.m, &other.m) }
    }

    /// `Λ⁻¹ = η Λᵀ η`.
    pub fn inverse(&self) -> Self {
        let mut inv = [[T::zero(); 4]; 4];
        for mu in 0..4 {
            for nu in 0..4 {
                inv[mu][nu] = eta::<T>(mu) * self.m[nu][mu] * eta::<T>(nu);
            }
        }
        Self { m: inv }
    }

    pub fn apply(&self, p: &FourVector<T>) -> FourVector<T> {
        let pa = p.to_array();
        let mut out = [T::zero(); 4];
        for (mu, row) in self.m.iter().enumerate() {
            out[mu] = row.iter().zip(pa.iter()).fold(T::zero(), |s, (a, b)| s + *a * *b);
        }
        FourVector::from_array(out)
    }

    /// `max |Λᵀ η Λ − η|`.
    pub fn metric_defect(&self) -> T {
        let mut d = T::zero();
        for mu in 0..4 {
            for nu in 0..4 {
                let g = (0..4).fold(T::zero(), |s, k| s + self.m[k][mu] * eta::<T>(k) * self.m[k][nu]);
                let target = if mu == nu { eta::<T>(mu) } else { T::zero() };
                d = d.max((g - target).abs());
            }
        }
        d
    }

    pub fn det(&self) -> T {
        det4(&self.m)
    }
}

/// `Λ θ Λ⁻¹`.
pub fn conjugate_theta<T: Real>(lambda: &LorentzTransform<T>, theta: &SkewMatrix<T>) -> SkewMatrix<T> {
    let m = matmul(&matmul(lambda.matrix(), theta.entries()), lambda.inverse().matrix());
    SkewMatrix { entries: m }
}

/// Finite sample of the Lorentz orbit of a reference deformation matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThetaOrbit<T> {
    pub reference: SkewMatrix<T>,
    pub samples: Vec<(LorentzTransform<T>, SkewMatrix<T>)>,
}

impl<T: Real> ThetaOrbit<T> {
    pub fn thetas(&self) -> impl Iterator<Item = &SkewMatrix<T>> {
        self.samples.iter().map(|(_, t)| t)
    }

    /// Number of pairwise distinct sample matrices (componentwise within `tol`).
    pub fn distinct_count(&self, tol: T) -> usize {
        let mut seen: Vec<&SkewMatrix<T>> = Vec::new();
        for t in self.thetas() {
            if !seen.iter().any(|s| s.approx_eq(t, tol)) {
                seen.push(t);
            }
        }
        seen.len()
    }
}

/// Orbit samples `R(φ)·B(r)` for a boost along `boost_axis` and rotation about `rotation_axis`.
///
/// The first sample is always the identity. An empty parameter list is treated as `[0]`
/// unless both are empty, in which case only the reference is returned.
pub fn orbit_samples_with_axes<T: Real>(
    theta0: &SkewMatrix<T>,
    rapidities: &[T],
    angles: &[T],
    boost_axis: usize,
    rotation_axis: usize,
) -> ThetaOrbit<T> {
    let mut samples = vec![(LorentzTransform::identity(), *theta0)];
    if !(rapidities.is_empty() && angles.is_empty()) {
        let zero = [T::zero()];
        let rs = if rapidities.is_empty() { &zero[..] } else { rapidities };
        let angs = if angles.is_empty() { &zero[..] } else { angles };
        for &r in rs {
            for &a in angs {
                let l = LorentzTransform::rotation(rotation_axis, a).compose(&LorentzTransform::boost(boost_axis, r));
                samples.push((l, conjugate_theta(&l, theta0)));
            }
        }
    }
    ThetaOrbit { reference: *theta0, samples }
}

/// Orbit samples with boosts along y and rotations about z.
pub fn orbit_samples<T: Real>(theta0: &SkewMatrix<T>, rapidities: &[T], angles: &[T]) -> ThetaOrbit<T> {
    orbit_samples_with_axes(theta0, rapidities, angles, 2, 3)
}
