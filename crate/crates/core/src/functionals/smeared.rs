//! Smeared-mode evaluation of polynomials in Gaussian-packet fields.
//!
//! A word `g₁…g_m` is brought to the form `∫ K(q) φ̃(q₁)…φ̃(q_{2n}) U(y)` by
//! moving every unitary to the right. `U(x)` placed before a leg `b` gives
//! `e^{i q_b·x}`; the `U(-θΣq)` closing a field or block gives
//! `e^{i q_a·θ q_b}` for each of its legs `a` and every later leg `b`. Then
//!
//! ```text
//! ω(φ̃(q₁)…φ̃(q_{2n}) U(y)) = σ̂(y) Σ_contractions ∏_k c(q_l) / (1 - e^{βq_l⁰ - i q_l·y})
//! y = Σ x - Σ_j θ_j q_j
//! ```
//!
//! and each contracted pair `q_l = p, q_r = -p` is integrated over the node
//! set. When every pair sits in one fiber, `y` is constant and the integrand
//! factorises into per-pair amplitudes and bilinear cross-pair phases.

use num_complex::Complex64;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::kernel::{bose_exp, commutator_sign, enumerate_contractions, Contraction};
use super::quadrature::NodeSet;
use super::sigma::{sigma_hat_eval, SigmaMeasure};
use super::{FunctionalKind, ThermalFunctional};
use crate::algebra::{FieldPolynomial, Generator};
use crate::error::{Error, Result};
use crate::kinematics::dot;
use crate::oracle::ModeSet;
use crate::sum::{pairwise_sum, par_pairwise};
use crate::twist::GaussianPacket;
use crate::{FourVec, Skew};

/// Tensor Gauss–Hermite parameters with Monte Carlo fallback.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadratureSpec {
    /// Points per momentum axis.
    pub order: usize,
    pub max_order: usize,
    /// Relative error target of the deterministic rule.
    pub target: f64,
    /// Raise the order until the target is met. A fixed rule compares `order`
    /// with `order - 2` once and reports the difference without failing.
    pub adaptive: bool,
    /// Momentum scale of the rule; defaults to `1 / (2 w_min)` over the packet widths.
    #[serde(default)]
    pub scale: Option<f64>,
    #[serde(default)]
    pub center: [f64; 3],
    /// Samples per Monte Carlo term (more than two contracted pairs).
    pub mc_samples: usize,
    pub mc_batches: usize,
    pub mc_target: f64,
    pub seed: u64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            order: 10,
            max_order: 20,
            target: 1e-8,
            adaptive: true,
            scale: None,
            center: [0.0; 3],
            mc_samples: 200_000,
            mc_batches: 32,
            mc_target: 1e-3,
            seed: 0x5eed,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Integrator {
    GaussHermite(QuadratureSpec),
    /// Discrete measure `Σ_i Δ³k / 2ε_i` on a mode set; exact enumeration.
    Modes(ModeSet),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermReport {
    pub left: Vec<usize>,
    pub right: Vec<usize>,
    /// False when `σ = 0` removes the term (some pair joins two fibers).
    pub surviving: bool,
    pub monte_carlo: bool,
    pub value: Complex64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonomialReport {
    pub coefficient: Complex64,
    pub legs: usize,
    pub odd: bool,
    /// Coefficient times the word value.
    pub value: Complex64,
    pub terms: Vec<TermReport>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmearedReport {
    pub value: Complex64,
    pub error_estimate: f64,
    pub method: String,
    pub monomials: Vec<MonomialReport>,
}

struct Leg {
    theta: Skew,
    packet: GaussianPacket,
    x_before: FourVec,
}

type M4 = [[f64; 4]; 4];

struct PreparedWord {
    coefficient: Complex64,
    legs: Vec<Leg>,
    total_x: FourVec,
    /// `m[a][b]` for `a < b`: lowered matrix with `q_aᵀ m q_b` the exponent.
    m: Vec<Vec<M4>>,
}

fn add_to(m: &mut M4, t: &M4, transpose: bool, sign: f64) {
    for i in 0..4 {
        for j in 0..4 {
            m[i][j] += sign * if transpose { t[j][i] } else { t[i][j] };
        }
    }
}

/// Replace spectral generators by their translation expansions.
fn expand_spectral(coefficient: Complex64, word: &[Generator]) -> Vec<(Complex64, Vec<Generator>)> {
    let mut out = vec![(coefficient, Vec::with_capacity(word.len()))];
    for g in word {
        if let Generator::Spectral(s) = g {
            let exp = s.expand();
            let mut next = Vec::with_capacity(out.len() * exp.len());
            for (c, w) in &out {
                for (ck, xk) in &exp {
                    let mut w2 = w.clone();
                    w2.push(Generator::Translation { x: *xk });
                    next.push((c * ck, w2));
                }
            }
            out = next;
        } else {
            out.iter_mut().for_each(|(_, w)| w.push(g.clone()));
        }
    }
    out
}

fn prepare(coefficient: Complex64, word: &[Generator]) -> Result<PreparedWord> {
    let mut legs = Vec::new();
    let mut gen_of = Vec::new();
    let mut twists = Vec::new();
    let mut x = FourVec::zero();
    for (gi, g) in word.iter().enumerate() {
        match g {
            Generator::Field { theta, f } => {
                legs.push(Leg { theta: *theta, packet: *f, x_before: x });
                gen_of.push(gi);
            }
            Generator::Block { theta, h } => {
                let base = legs.len();
                for f in &h.packets {
                    legs.push(Leg { theta: *theta, packet: *f, x_before: x });
                    gen_of.push(gi);
                }
                for tw in &h.twists {
                    for l in tw.left.0..tw.left.1 {
                        for r in tw.right.0..tw.right.1 {
                            twists.push((base + l, base + r, tw.theta));
                        }
                    }
                }
            }
            Generator::SharpField { .. } => return Err(Error::SharpInSmeared),
            Generator::Translation { x: t } => x = x + *t,
            Generator::Spectral(_) => unreachable!("spectral generators are expanded first"),
        }
    }
    let n = legs.len();
    let mut m = vec![vec![[[0.0; 4]; 4]; n]; n];
    for a in 0..n {
        let low = legs[a].theta.lower();
        for b in a + 1..n {
            if gen_of[a] != gen_of[b] {
                add_to(&mut m[a][b], &low, false, 1.0);
            }
        }
    }
    for (l, r, t) in twists {
        let low = t.lower();
        if l < r {
            add_to(&mut m[l][r], &low, false, 1.0);
        } else if r < l {
            add_to(&mut m[r][l], &low, true, 1.0);
        }
    }
    Ok(PreparedWord { coefficient, legs, total_x: x, m })
}

fn check_admissible(f: &FieldPolynomial, phi: &ThermalFunctional) -> Result<()> {
    let fiber = phi.fiber_theta();
    for m in f.terms() {
        for g in &m.word {
            match g {
                Generator::SharpField { .. } => return Err(Error::SharpInSmeared),
                Generator::Translation { .. } | Generator::Spectral(_) if fiber.is_some() => {
                    return Err(Error::Inadmissible("translations and spectral functions need a covariant functional".into()))
                }
                Generator::Field { theta, .. } | Generator::Block { theta, .. } => {
                    if let Some(t) = &fiber {
                        if !theta.approx_eq(t, 1e-12 * (1.0 + t.max_abs())) {
                            return Err(Error::Inadmissible("field outside the functional's fiber".into()));
                        }
                    }
                }
                _ => {}
            }
        }
    }
    Ok(())
}

fn cis(x: f64) -> Complex64 {
    Complex64::from_polar(1.0, x)
}

fn arr(p: &FourVec) -> [f64; 4] {
    p.to_array()
}

/// Cross-pair matrices `g[k][k']`, `k < k'`, with exponent `Σ p_kᵀ g p_k'`.
fn cross_matrices(word: &PreparedWord, c: &Contraction) -> Vec<Vec<M4>> {
    let n = c.len();
    let mut g = vec![vec![[[0.0; 4]; 4]; n]; n];
    for k in 0..n {
        for k2 in k + 1..n {
            for (a, ea) in [(c.left[k], 1.0), (c.right[k], -1.0)] {
                for (b, eb) in [(c.left[k2], 1.0), (c.right[k2], -1.0)] {
                    if a < b {
                        add_to(&mut g[k][k2], &word.m[a][b], false, ea * eb);
                    } else {
                        add_to(&mut g[k][k2], &word.m[b][a], true, ea * eb);
                    }
                }
            }
        }
    }
    g
}

/// Pair amplitude without the statistical factor.
fn pair_base(word: &PreparedWord, l: usize, r: usize, slot_p: &FourVec, weight: f64) -> Complex64 {
    let (a, b) = (&word.legs[l], &word.legs[r]);
    weight * a.packet.fourier(&-*slot_p) * b.packet.fourier(slot_p) * cis(dot(slot_p, &(a.x_before - b.x_before)))
}

fn linear(l: &mut [f64; 4], g: &M4, p: &[f64; 4]) {
    for nu in 0..4 {
        l[nu] += (0..4).map(|mu| p[mu] * g[mu][nu]).sum::<f64>();
    }
}

fn dot4(a: &[f64; 4], b: &[f64; 4]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3]
}

struct Static<'a> {
    amp: &'a [Vec<Complex64>],
    g: &'a [Vec<M4>],
    pts: &'a [[f64; 4]],
}

impl Static<'_> {
    fn rec(&self, d: usize, idx: &mut [usize]) -> Complex64 {
        let n = self.amp.len();
        if d == n {
            return Complex64::new(1.0, 0.0);
        }
        let mut l = [0.0; 4];
        for k in 0..d {
            linear(&mut l, &self.g[k][d], &self.pts[idx[k]]);
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for (s, a) in self.amp[d].iter().enumerate() {
            if *a == Complex64::new(0.0, 0.0) {
                continue;
            }
            idx[d] = s;
            acc += a * cis(dot4(&l, &self.pts[s])) * self.rec(d + 1, idx);
        }
        acc
    }

    fn sum(&self) -> Complex64 {
        let n = self.amp.len();
        par_pairwise(self.pts.len(), |s0| {
            let a = self.amp[0][s0];
            if a == Complex64::new(0.0, 0.0) {
                return a;
            }
            let mut idx = vec![0; n];
            idx[0] = s0;
            a * self.rec(1, &mut idx)
        })
    }
}

struct Dynamic<'a> {
    base: &'a [Vec<Complex64>],
    g: &'a [Vec<M4>],
    /// `(θ_l - θ_r) p_s` per pair and slot.
    shift: &'a [Vec<FourVec>],
    slots: &'a [FourVec],
    pts: &'a [[f64; 4]],
    y0: FourVec,
    beta: f64,
    sigma: &'a SigmaMeasure,
}

impl Dynamic<'_> {
    fn leaf(&self, idx: &[usize]) -> Result<Complex64> {
        let mut y = self.y0;
        for (k, &s) in idx.iter().enumerate() {
            y = y - self.shift[k][s];
        }
        let mut v = sigma_hat_eval(self.sigma, &y);
        if v == Complex64::new(0.0, 0.0) {
            return Ok(v);
        }
        for &s in idx {
            let p = &self.slots[s];
            v *= commutator_sign(p) * bose_exp(Complex64::new(self.beta * p.p0, -dot(p, &y)))?;
        }
        Ok(v)
    }

    fn phase(&self, idx: &[usize]) -> f64 {
        let mut s = 0.0;
        for d in 1..idx.len() {
            let mut l = [0.0; 4];
            for k in 0..d {
                linear(&mut l, &self.g[k][d], &self.pts[idx[k]]);
            }
            s += dot4(&l, &self.pts[idx[d]]);
        }
        s
    }

    fn rec(&self, d: usize, idx: &mut [usize], prod: Complex64) -> Result<Complex64> {
        let n = self.base.len();
        if d == n {
            return Ok(prod * cis(self.phase(idx)) * self.leaf(idx)?);
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for (s, a) in self.base[d].iter().enumerate() {
            if *a == Complex64::new(0.0, 0.0) {
                continue;
            }
            idx[d] = s;
            acc += self.rec(d + 1, idx, prod * a)?;
        }
        Ok(acc)
    }

    fn sum(&self) -> Result<Complex64> {
        let n = self.base.len();
        let vals: Vec<Result<Complex64>> = (0..self.pts.len())
            .into_par_iter()
            .map(|s0| {
                let a = self.base[0][s0];
                if a == Complex64::new(0.0, 0.0) {
                    return Ok(a);
                }
                let mut idx = vec![0; n];
                idx[0] = s0;
                self.rec(1, &mut idx, a)
            })
            .collect();
        let vals = vals.into_iter().collect::<Result<Vec<_>>>()?;
        Ok(pairwise_sum(&vals))
    }
}

struct McParams {
    samples: usize,
    batches: usize,
    seed: u64,
}

/// Importance-sampled estimate of `Σ_{s₁…sₙ} ∏ a_k(s_k) · e^{iφ(s)} · extra(s)`.
fn monte_carlo<F>(amp: &[Vec<Complex64>], mc: &McParams, integrand: F) -> Result<(Complex64, f64)>
where
    F: Fn(&[usize]) -> Result<Complex64> + Sync,
{
    let mut dists = Vec::with_capacity(amp.len());
    let mut norm = 1.0;
    for a in amp {
        let w: Vec<f64> = a.iter().map(|z| z.norm()).collect();
        let z: f64 = w.iter().sum();
        if z == 0.0 {
            return Ok((Complex64::new(0.0, 0.0), 0.0));
        }
        norm *= z;
        dists.push(WeightedIndex::new(&w).expect("positive total weight"));
    }
    let batches = mc.batches.max(2);
    let per = (mc.samples / batches).max(1);
    let means: Vec<Result<Complex64>> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(mc.seed);
            rng.set_stream(b as u64);
            let mut idx = vec![0; amp.len()];
            let mut vals = Vec::with_capacity(per);
            for _ in 0..per {
                let mut unit = Complex64::new(1.0, 0.0);
                for (k, d) in dists.iter().enumerate() {
                    let s = d.sample(&mut rng);
                    idx[k] = s;
                    unit *= amp[k][s] / amp[k][s].norm();
                }
                vals.push(unit * integrand(&idx)?);
            }
            Ok(pairwise_sum(&vals) * (norm / per as f64))
        })
        .collect();
    let means = means.into_iter().collect::<Result<Vec<_>>>()?;
    let mean = pairwise_sum(&means) / batches as f64;
    let var: f64 = means.iter().map(|m| (m - mean).norm_sqr()).sum::<f64>() / (batches - 1) as f64;
    Ok((mean, (var / batches as f64).sqrt()))
}

struct TermValue {
    value: Complex64,
    mc_error: f64,
    surviving: bool,
    monte_carlo: bool,
}

fn eval_term(
    word: &PreparedWord,
    c: &Contraction,
    phi: &ThermalFunctional,
    nodes: &NodeSet,
    pts: &[[f64; 4]],
    exact: bool,
    mc: &McParams,
) -> Result<TermValue> {
    let zero = Complex64::new(0.0, 0.0);
    let same = c.pairs().all(|(l, r)| word.legs[l].theta.approx_eq(&word.legs[r].theta, 1e-14 * (1.0 + word.legs[l].theta.max_abs())));
    let sigma = match &phi.kind {
        FunctionalKind::Covariant { sigma } => Some(sigma),
        _ => None,
    };
    let dropped = TermValue { value: zero, mc_error: 0.0, surviving: false, monte_carlo: false };
    let slots: Vec<FourVec> = nodes.slots.iter().map(|s| s.p).collect();
    let g = cross_matrices(word, c);

    if same || sigma.is_none() {
        let y = word.total_x;
        let pre = sigma.map_or(Complex64::new(1.0, 0.0), |s| sigma_hat_eval(s, &y));
        if pre == zero {
            return Ok(dropped);
        }
        let mut amp = Vec::with_capacity(c.len());
        for (l, r) in c.pairs() {
            let a = nodes
                .slots
                .iter()
                .map(|s| {
                    let stat = commutator_sign(&s.p) * bose_exp(Complex64::new(phi.beta * s.p.p0, -dot(&s.p, &y)))?;
                    Ok(pair_base(word, l, r, &s.p, s.weight) * stat)
                })
                .collect::<Result<Vec<_>>>()?;
            amp.push(a);
        }
        if amp.is_empty() {
            return Ok(TermValue { value: pre, mc_error: 0.0, surviving: true, monte_carlo: false });
        }
        if exact {
            let v = Static { amp: &amp, g: &g, pts }.sum();
            return Ok(TermValue { value: pre * v, mc_error: 0.0, surviving: true, monte_carlo: false });
        }
        let st = Static { amp: &amp, g: &g, pts };
        let (v, e) = monte_carlo(&amp, mc, |idx| {
            let mut s = 0.0;
            for d in 1..idx.len() {
                let mut l = [0.0; 4];
                for k in 0..d {
                    linear(&mut l, &st.g[k][d], &st.pts[idx[k]]);
                }
                s += dot4(&l, &st.pts[idx[d]]);
            }
            Ok(cis(s))
        })?;
        return Ok(TermValue { value: pre * v, mc_error: e * pre.norm(), surviving: true, monte_carlo: true });
    }

    let sigma = sigma.expect("covariant");
    if sigma.is_zero() {
        return Ok(dropped);
    }
    let mut base = Vec::with_capacity(c.len());
    let mut shift = Vec::with_capacity(c.len());
    for (l, r) in c.pairs() {
        base.push(nodes.slots.iter().map(|s| pair_base(word, l, r, &s.p, s.weight)).collect::<Vec<_>>());
        let d = word.legs[l].theta.add(&word.legs[r].theta.scaled(-1.0));
        shift.push(slots.iter().map(|p| d.apply(p)).collect::<Vec<_>>());
    }
    let dynm = Dynamic { base: &base, g: &g, shift: &shift, slots: &slots, pts, y0: word.total_x, beta: phi.beta, sigma };
    if exact {
        return Ok(TermValue { value: dynm.sum()?, mc_error: 0.0, surviving: true, monte_carlo: false });
    }
    let (v, e) = monte_carlo(&base, mc, |idx| Ok(cis(dynm.phase(idx)) * dynm.leaf(idx)?))?;
    Ok(TermValue { value: v, mc_error: e, surviving: true, monte_carlo: true })
}

struct Evaluation {
    value: Complex64,
    mc_error: f64,
    monte_carlo: bool,
    magnitude: f64,
    monomials: Vec<MonomialReport>,
}

fn evaluate_on(f: &FieldPolynomial, phi: &ThermalFunctional, nodes: &NodeSet, max_exact_pairs: usize, mc: &McParams) -> Result<Evaluation> {
    let pts: Vec<[f64; 4]> = nodes.slots.iter().map(|s| arr(&s.p)).collect();
    let mut monomials = Vec::with_capacity(f.terms().len());
    let mut mc_error = 0.0;
    let mut magnitude = 0.0;
    for m in f.terms() {
        let words = expand_spectral(m.coefficient, &m.word);
        let prepared = words.iter().map(|(c, w)| prepare(*c, w)).collect::<Result<Vec<_>>>()?;
        let legs = prepared.first().map_or(0, |p| p.legs.len());
        if legs % 2 == 1 {
            monomials.push(MonomialReport { coefficient: m.coefficient, legs, odd: true, value: Complex64::new(0.0, 0.0), terms: Vec::new() });
            continue;
        }
        let contractions = enumerate_contractions(legs)?;
        let exact = legs / 2 <= max_exact_pairs;
        let mut terms: Vec<TermReport> = contractions
            .iter()
            .map(|c| TermReport {
                left: c.left.clone(),
                right: c.right.clone(),
                surviving: false,
                monte_carlo: false,
                value: Complex64::new(0.0, 0.0),
            })
            .collect();
        for pw in &prepared {
            for (t, c) in terms.iter_mut().zip(&contractions) {
                let tv = eval_term(pw, c, phi, nodes, &pts, exact, mc)?;
                t.value += pw.coefficient * tv.value;
                t.surviving |= tv.surviving;
                t.monte_carlo |= tv.monte_carlo;
                mc_error += pw.coefficient.norm() * tv.mc_error;
            }
        }
        let value = pairwise_sum(&terms.iter().map(|t| t.value).collect::<Vec<_>>());
        magnitude += terms.iter().map(|t| t.value.norm()).sum::<f64>();
        monomials.push(MonomialReport { coefficient: m.coefficient, legs, odd: false, value, terms });
    }
    let value = pairwise_sum(&monomials.iter().map(|m| m.value).collect::<Vec<_>>());
    let monte_carlo = monomials.iter().flat_map(|m| &m.terms).any(|t| t.monte_carlo);
    Ok(Evaluation { value, mc_error, monte_carlo, magnitude: magnitude.max(value.norm()), monomials })
}

fn min_width(f: &FieldPolynomial) -> Option<f64> {
    let mut w = f64::INFINITY;
    for m in f.terms() {
        for g in &m.word {
            match g {
                Generator::Field { f, .. } => w = w.min(f.width),
                Generator::Block { h, .. } => h.packets.iter().for_each(|f| w = w.min(f.width)),
                _ => {}
            }
        }
    }
    w.is_finite().then_some(w)
}

/// Quadrature scale used for `f` under `spec`.
pub fn default_scale(f: &FieldPolynomial, spec: &QuadratureSpec) -> f64 {
    spec.scale.unwrap_or_else(|| min_width(f).map_or(1.0, |w| 0.5 / w))
}

/// `ω(F)` in smeared mode with an error estimate and per-contraction breakdown.
pub fn omega_smeared(f: &FieldPolynomial, phi: &ThermalFunctional, integrator: &Integrator) -> Result<SmearedReport> {
    check_admissible(f, phi)?;
    match integrator {
        Integrator::Modes(ms) => {
            if (ms.mass() - phi.mass).abs() > 1e-12 * phi.mass {
                return Err(Error::InvalidModes(format!("mode mass {} differs from functional mass {}", ms.mass(), phi.mass)));
            }
            let nodes = NodeSet::from_modes(ms);
            let mc = McParams { samples: 0, batches: 2, seed: 0 };
            let ev = evaluate_on(f, phi, &nodes, usize::MAX, &mc)?;
            Ok(SmearedReport { value: ev.value, error_estimate: 0.0, method: format!("modes({})", ms.len()), monomials: ev.monomials })
        }
        Integrator::GaussHermite(spec) => {
            let scale = default_scale(f, spec);
            let mc = McParams { samples: spec.mc_samples, batches: spec.mc_batches, seed: spec.seed };
            let run = |n: usize| -> Result<Evaluation> {
                let nodes = NodeSet::gauss_hermite(n, scale, spec.center, phi.mass)?;
                evaluate_on(f, phi, &nodes, 2, &mc)
            };
            let legs = f.max_legs();
            let mut n = spec.order.max(3);
            let mut cur = run(n)?;
            if legs == 0 {
                return Ok(SmearedReport { value: cur.value, error_estimate: 0.0, method: "closed form".into(), monomials: cur.monomials });
            }
            let mut prev = run(n - 2)?;
            loop {
                let err = (cur.value - prev.value).norm() + cur.mc_error;
                let target = if cur.monte_carlo { spec.mc_target } else { spec.target };
                if err <= target * cur.magnitude || !spec.adaptive {
                    return Ok(SmearedReport {
                        value: cur.value,
                        error_estimate: err,
                        method: format!("gauss-hermite({n}, scale {scale}){}", if cur.monte_carlo { " + monte carlo" } else { "" }),
                        monomials: cur.monomials,
                    });
                }
                if n + 2 > spec.max_order {
                    return Err(Error::NonConvergence { achieved: err / cur.magnitude.max(f64::MIN_POSITIVE), target });
                }
                n += 2;
                prev = cur;
                cur = run(n)?;
            }
        }
    }
}
