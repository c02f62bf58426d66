//! Subcommand drivers. Each returns a finished report and its CSV table.

use anyhow::{anyhow, bail, Context, Result};
use moyal_kms::algebra::{star, FieldPolynomial};
use moyal_kms::functionals::{omega_smeared, FunctionalKind, Integrator, SmearedReport, ThermalFunctional};
use moyal_kms::oracle::{
    araki_woods_expect, check_warp_and_rieffel, gibbs_expect_polynomial, twisted_ccr_defect, vacuum_expect,
};
use moyal_kms::verify::{
    covariance_check, exchange_phase_check, gram_scan, hermiticity_check, kms_check, positivity_scan, random_exchange_pairs,
    random_paired_configurations, standard_family, uniform_grid, GramReport,
};
use moyal_kms::{FourVec, Lorentz, Skew};
use num_complex::Complex64;
use serde::Serialize;

use crate::config::Loaded;
use crate::polyspec;
use crate::report::{num, Report, Table};

pub const VERIFY_CHECKS: &[&str] = &["kms", "gram", "hermiticity", "covariance", "exchange"];
pub const ORACLE_CHECKS: &[&str] = &["twisted-ccr", "warp-homomorphism", "gibbs-vs-closed-form", "araki-woods", "vacuum-limit"];

fn c_str(z: Complex64) -> (String, String) {
    (num(z.re), num(z.im))
}

/// Rows `monomial, coefficient, legs, odd, contraction, surviving, monte_carlo, value`.
fn smeared_table(r: &SmearedReport) -> Table {
    let mut t = Table::new(&[
        "monomial", "coefficient_re", "coefficient_im", "legs", "odd", "left", "right", "surviving", "monte_carlo", "value_re", "value_im",
    ]);
    for (i, m) in r.monomials.iter().enumerate() {
        let (cr, ci) = c_str(m.coefficient);
        let base = vec![i.to_string(), cr, ci, m.legs.to_string(), m.odd.to_string()];
        if m.terms.is_empty() {
            let (vr, vi) = c_str(m.value);
            t.push([base.clone(), vec![String::new(), String::new(), String::new(), String::new(), vr, vi]].concat());
        }
        for term in &m.terms {
            let base = base.clone();
            let join = |v: &[usize]| v.iter().map(usize::to_string).collect::<Vec<_>>().join(" ");
            let (vr, vi) = c_str(term.value);
            t.push(
                [base, vec![join(&term.left), join(&term.right), term.surviving.to_string(), term.monte_carlo.to_string(), vr, vi]]
                    .concat(),
            );
        }
    }
    let (vr, vi) = c_str(r.value);
    t.push(vec!["total".into(), String::new(), String::new(), String::new(), String::new(), String::new(), String::new(), String::new(), String::new(), vr, vi]);
    t
}

pub fn npoint(l: &Loaded) -> Result<(Report, Table)> {
    let cfg = &l.config;
    let spec = cfg.npoint.as_ref().ok_or_else(|| anyhow!("npoint needs an [npoint] table with a polynomial path"))?;
    let (doc, poly) = polyspec::load(&cfg.resolve(&l.base, &spec.polynomial), cfg)?;
    let phi = cfg.functional()?;
    let r = omega_smeared(&poly, &phi, &cfg.integrator()?).context("evaluating the functional")?;
    let table = smeared_table(&r);
    let verdict = format!("value={} error_estimate={:e}", r.value, r.error_estimate);
    let mut rep = Report::new("npoint", None, cfg).input("polynomial", doc)?.result(&r)?;
    rep.verdict = verdict;
    Ok((rep, table))
}

fn optional_poly(l: &Loaded, p: &Option<std::path::PathBuf>) -> Result<(Option<polyspec::PolyDoc>, FieldPolynomial)> {
    match p {
        Some(path) => {
            let (d, f) = polyspec::load(&l.config.resolve(&l.base, path), &l.config)?;
            Ok((Some(d), f))
        }
        None => Ok((None, FieldPolynomial::one())),
    }
}

fn sigma_nonzero(phi: &ThermalFunctional) -> bool {
    matches!(&phi.kind, FunctionalKind::Covariant { sigma } if !sigma.is_zero())
}

fn gram_table(r: &GramReport) -> Table {
    let mut t = Table::new(&["row", "column", "label_row", "label_column", "value_re", "value_im"]);
    for (i, row) in r.matrix.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            let (a, b) = c_str(*v);
            t.push(vec![i.to_string(), j.to_string(), r.labels[i].clone(), r.labels[j].clone(), a, b]);
        }
    }
    t
}

pub fn verify(l: &Loaded, check: &str) -> Result<(Report, Table)> {
    let cfg = &l.config;
    let phi = cfg.functional()?;
    let tol = &cfg.tolerances;
    match check {
        "kms" => {
            let (fd, f) = optional_poly(l, &cfg.kms.f)?;
            let (gd, g) = optional_poly(l, &cfg.kms.g)?;
            let grid = uniform_grid(cfg.kms.t_min, cfg.kms.t_max, cfg.kms.points);
            let r = kms_check(&f, &g, &phi, &grid, &cfg.integrator()?, tol.kms)?;
            let mut t = Table::new(&["t", "f_re", "f_im", "continued_re", "continued_im", "comparison_re", "comparison_im", "deviation"]);
            for i in 0..grid.len() {
                let (a, b) = c_str(r.values[i]);
                let (c, d) = c_str(r.continued[i]);
                let (e, g) = c_str(r.comparison[i]);
                t.push(vec![num(grid[i]), a, b, c, d, e, g, num((r.continued[i] - r.comparison[i]).norm())]);
            }
            let detail = format!("max deviation {:e}, tolerance {:e}", r.max_deviation, r.tolerance);
            let rep = Report::new("verify", Some(check), cfg).input("f", fd)?.input("g", gd)?.result(&r)?.judged(r.pass, detail);
            Ok((rep, t))
        }
        "gram" if sigma_nonzero(&phi) => {
            let theta = cfg.fiber(&cfg.scan.fiber)?;
            let r = positivity_scan(&phi, &theta, cfg.scan.draws, cfg.scan.cutoff_nodes, cfg.seed, &cfg.integrator()?, tol.gram)?;
            let mut t = Table::new(&["draw", "cutoff_width", "lambda_min", "norm", "relative"]);
            for (i, d) in r.draws.iter().enumerate() {
                t.push(vec![i.to_string(), num(d.cutoff_width), num(d.lambda_min), num(d.norm), num(if d.norm > 0.0 { d.lambda_min / d.norm } else { 0.0 })]);
            }
            let verdict = r.verdict.clone();
            Ok((Report::new("verify", Some(check), cfg).result(&r)?.exploratory(verdict), t))
        }
        "gram" => {
            let spec = cfg.gram.as_ref().ok_or_else(|| anyhow!("gram needs a [gram] table"))?;
            let fam = standard_family(&cfg.fiber(&spec.fiber)?, &cfg.packet(&spec.f1)?, &cfg.packet(&spec.f2)?, &FourVec::from_array(spec.x1));
            let r = gram_scan(&fam, &phi, &cfg.integrator()?, tol.gram)?;
            let detail = format!("lambda_min={:e}, norm={:e}", r.lambda_min, r.norm);
            let t = gram_table(&r);
            Ok((Report::new("verify", Some(check), cfg).result(&r)?.judged(r.pass, detail), t))
        }
        "hermiticity" => {
            let spec = cfg.hermiticity.as_ref().ok_or_else(|| anyhow!("hermiticity needs a [hermiticity] table"))?;
            let (doc, f) = polyspec::load(&cfg.resolve(&l.base, &spec.polynomial), cfg)?;
            let integ = cfg.integrator()?;
            let d = hermiticity_check(&f, &phi, &integ)?;
            let v = omega_smeared(&f, &phi, &integ)?.value;
            let vs = omega_smeared(&star(&f), &phi, &integ)?.value;
            let mut t = Table::new(&["quantity", "re", "im"]);
            for (name, z) in [("omega(F)", v), ("omega(F*)", vs)] {
                let (a, b) = c_str(z);
                t.push(vec![name.into(), a, b]);
            }
            t.push(vec!["deviation".into(), num(d), String::new()]);
            #[derive(Serialize)]
            struct Out {
                omega: Complex64,
                omega_star: Complex64,
                deviation: f64,
            }
            let rep = Report::new("verify", Some(check), cfg).input("polynomial", doc)?.result(Out { omega: v, omega_star: vs, deviation: d })?;
            let detail = format!("deviation={d:e}");
            Ok((if sigma_nonzero(&phi) { rep.exploratory(detail) } else { rep.judged(d <= tol.hermiticity, detail) }, t))
        }
        "covariance" => {
            let c = &cfg.covariance;
            let theta = cfg.theta0()?;
            let lambda = Lorentz::rotation(3, c.angle).compose(&Lorentz::boost(2, c.rapidity));
            let configs = random_paired_configurations(cfg.seed, c.configurations, c.points, cfg.mass)?;
            let r = covariance_check(cfg.beta, cfg.mass, &theta, &lambda, &configs)?;
            // boosts move the thermal rest frame, so only rotations must leave the kernel fixed
            let pure_rotation = c.rapidity == 0.0;
            let pass = r.phase_deviation <= tol.covariance && (!pure_rotation || r.kernel_deviation <= tol.covariance);
            let mut t = Table::new(&["quantity", "value"]);
            t.push(vec!["phase_deviation".into(), num(r.phase_deviation)]);
            t.push(vec!["kernel_deviation".into(), num(r.kernel_deviation)]);
            let detail = format!(
                "phase deviation {:e}, kernel deviation {:e}{}",
                r.phase_deviation,
                r.kernel_deviation,
                if pure_rotation { "" } else { " (boost: kernel deviation expected, not judged)" }
            );
            Ok((Report::new("verify", Some(check), cfg).result(&r)?.judged(pass, detail), t))
        }
        "exchange" => {
            let theta = cfg.theta0()?;
            let theta2 = cfg.fiber(&cfg.exchange.fiber2)?;
            let pairs = random_exchange_pairs(cfg.seed, cfg.exchange.configurations, cfg.mass)?;
            let d = exchange_phase_check(cfg.beta, cfg.mass, &theta, &theta2, &pairs)?;
            let mut t = Table::new(&["quantity", "value"]);
            t.push(vec!["max_deviation".into(), num(d)]);
            #[derive(Serialize)]
            struct Out {
                theta2: Skew,
                configurations: usize,
                max_deviation: f64,
            }
            let rep = Report::new("verify", Some(check), cfg).result(Out { theta2, configurations: pairs.len(), max_deviation: d })?;
            Ok((rep.judged(d <= tol.exchange, format!("max deviation {d:e}")), t))
        }
        other => bail!("unknown verify check {other:?}; expected one of {VERIFY_CHECKS:?}"),
    }
}

/// Two packets for default oracle polynomials.
fn two_packets(l: &Loaded) -> Result<(moyal_kms::twist::GaussianPacket, moyal_kms::twist::GaussianPacket)> {
    let ps = l.config.packet_list()?;
    if ps.len() < 2 {
        bail!("default oracle polynomials need at least two [packets]");
    }
    Ok((ps[0], ps[1]))
}

#[derive(Serialize)]
struct Comparison {
    label: String,
    closed_form: Complex64,
    oracle: Complex64,
    relative_deviation: f64,
}

fn comparison_table(rows: &[Comparison]) -> Table {
    let mut t = Table::new(&["label", "closed_form_re", "closed_form_im", "oracle_re", "oracle_im", "relative_deviation"]);
    for r in rows {
        let (a, b) = c_str(r.closed_form);
        let (c, d) = c_str(r.oracle);
        t.push(vec![r.label.clone(), a, b, c, d, num(r.relative_deviation)]);
    }
    t
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    let s = b.norm();
    if s == 0.0 {
        a.norm()
    } else {
        (a - b).norm() / s
    }
}

pub fn oracle(l: &Loaded, check: &str) -> Result<(Report, Table)> {
    let cfg = &l.config;
    let tol = &cfg.tolerances;
    match check {
        "twisted-ccr" => {
            let ms = cfg.mode_set()?.with_cutoff(cfg.oracle.identity_cutoff, cfg.modes.as_ref().map_or(4096, |m| m.max_dim))?;
            let thetas: Vec<Skew> = cfg.orbit()?.thetas().take(3).copied().collect();
            let mut t = Table::new(&["theta", "theta_prime", "defect"]);
            let mut worst: f64 = 0.0;
            for (i, a) in thetas.iter().enumerate() {
                for (j, b) in thetas.iter().enumerate() {
                    let d = twisted_ccr_defect(&ms, a, b)?;
                    worst = worst.max(d);
                    t.push(vec![i.to_string(), j.to_string(), num(d)]);
                }
            }
            #[derive(Serialize)]
            struct Out {
                orbit_samples: usize,
                cutoff: usize,
                max_defect: f64,
            }
            let rep = Report::new("oracle", Some(check), cfg).result(Out { orbit_samples: thetas.len(), cutoff: ms.cutoff(), max_defect: worst })?;
            Ok((rep.judged(worst <= tol.twisted_ccr, format!("max defect {worst:e} on the sub-cutoff subspace")), t))
        }
        "warp-homomorphism" => {
            let ms = cfg.mode_set()?.with_cutoff(cfg.oracle.identity_cutoff, cfg.modes.as_ref().map_or(4096, |m| m.max_dim))?;
            let zero = Skew::zero();
            let (fd, f0, gd, g0) = match (&cfg.oracle.f0, &cfg.oracle.g0) {
                (Some(a), Some(b)) => {
                    let (fd, f0) = polyspec::load(&cfg.resolve(&l.base, a), cfg)?;
                    let (gd, g0) = polyspec::load(&cfg.resolve(&l.base, b), cfg)?;
                    (Some(fd), f0, Some(gd), g0)
                }
                (None, None) => {
                    let (p, q) = two_packets(l)?;
                    let f0 = FieldPolynomial::field(zero, p).add(&FieldPolynomial::scalar(Complex64::new(0.3, 0.0)));
                    let g0 = FieldPolynomial::field(zero, q).mul(&FieldPolynomial::field(zero, p.conj()));
                    (None, f0, None, g0)
                }
                _ => bail!("[oracle] needs both f0 and g0 or neither"),
            };
            let r = check_warp_and_rieffel(&ms, &cfg.theta0()?, cfg.beta, &FourVec::from_array(cfg.oracle.x), &f0, &g0)?;
            let mut t = Table::new(&["identity", "defect"]);
            for (k, v) in [
                ("homomorphism", r.homomorphism),
                ("symbolic_homomorphism", r.symbolic_homomorphism),
                ("symbolic_warp", r.symbolic_warp),
                ("symbolic_rieffel", r.symbolic_rieffel),
                ("star", r.star),
                ("unit", r.unit),
                ("vacuum", r.vacuum),
                ("translation", r.translation),
                ("rieffel_trace", r.rieffel_trace),
            ] {
                t.push(vec![k.into(), num(v)]);
            }
            let pass = r.max_matrix_defect() <= tol.warp && r.rieffel_trace <= tol.rieffel_trace;
            let detail = format!("max matrix defect {:e}, Rieffel trace defect {:e}", r.max_matrix_defect(), r.rieffel_trace);
            let rep = Report::new("oracle", Some(check), cfg).input("f0", fd)?.input("g0", gd)?.result(&r)?;
            Ok((rep.judged(pass, detail), t))
        }
        "gibbs-vs-closed-form" => {
            let phi = cfg.functional()?;
            let theta = phi.fiber_theta().ok_or_else(|| anyhow!("σ-dependent functionals have no finite-mode Gibbs counterpart"))?;
            let ms = cfg.mode_set()?;
            let polys = oracle_polynomials(l, theta)?;
            let mut rows = Vec::new();
            let mut docs = serde_json::Map::new();
            for (label, doc, p) in polys {
                let cf = omega_smeared(&p, &phi, &Integrator::Modes(ms.clone()))?.value;
                let or = gibbs_expect_polynomial(&ms, cfg.beta, &p)?.value;
                if let Some(d) = doc {
                    docs.insert(label.clone(), serde_json::to_value(d)?);
                }
                rows.push(Comparison { label, closed_form: cf, oracle: or, relative_deviation: rel(cf, or) });
            }
            let worst = rows.iter().map(|r| r.relative_deviation).fold(0.0, f64::max);
            let t = comparison_table(&rows);
            #[derive(Serialize)]
            struct Out {
                cutoff: usize,
                truncation_bound: f64,
                comparisons: Vec<Comparison>,
            }
            let rep = Report::new("oracle", Some(check), cfg)
                .input("polynomials", docs)?
                .result(Out { cutoff: ms.cutoff(), truncation_bound: ms.truncation_bound(cfg.beta), comparisons: rows })?;
            Ok((rep.judged(worst <= tol.gibbs, format!("max relative deviation {worst:e}")), t))
        }
        "araki-woods" => {
            let ms = cfg.mode_set()?;
            let (p, q) = two_packets(l)?;
            let z = Skew::zero();
            let (a, b, c) = (FieldPolynomial::field(z, p), FieldPolynomial::field(z, q), FieldPolynomial::field(z, p.conj()));
            let mut rows = Vec::new();
            for (label, poly) in [("f1 f2", a.mul(&b)), ("f2 f1", b.mul(&a)), ("f1 conj(f1)", a.mul(&c)), ("f1 f1", a.mul(&a))] {
                let aw = araki_woods_expect(&ms, cfg.beta, &poly)?;
                let gb = gibbs_expect_polynomial(&ms, cfg.beta, &poly)?.value;
                rows.push(Comparison { label: label.into(), closed_form: aw, oracle: gb, relative_deviation: rel(aw, gb) });
            }
            let worst = rows.iter().map(|r| r.relative_deviation).fold(0.0, f64::max);
            let t = comparison_table(&rows);
            let rep = Report::new("oracle", Some(check), cfg).result(&rows)?;
            Ok((rep.judged(worst <= tol.araki_woods, format!("max relative deviation {worst:e} (closed_form column: Araki–Woods)")), t))
        }
        "vacuum-limit" => {
            let base = cfg.mode_set()?;
            let ms = base.with_cutoff(2, cfg.modes.as_ref().map_or(4096, |m| m.max_dim))?;
            let (p, q) = two_packets(l)?;
            let z = Skew::zero();
            let phi = ThermalFunctional::zero_fiber(cfg.oracle.vacuum_beta, cfg.mass)?;
            let mut rows = Vec::new();
            for (label, poly) in [("f1 f2", FieldPolynomial::field(z, p).mul(&FieldPolynomial::field(z, q))), ("f2 f1", FieldPolynomial::field(z, q).mul(&FieldPolynomial::field(z, p)))] {
                let th = omega_smeared(&poly, &phi, &Integrator::Modes(ms.clone()))?.value;
                let vac = vacuum_expect(&ms, &poly)?;
                rows.push(Comparison { label: label.into(), closed_form: th, oracle: vac, relative_deviation: rel(th, vac) });
            }
            let worst = rows.iter().map(|r| r.relative_deviation).fold(0.0, f64::max);
            let t = comparison_table(&rows);
            let rep = Report::new("oracle", Some(check), cfg).result(&rows)?;
            Ok((rep.judged(worst <= tol.vacuum, format!("max relative deviation {worst:e} at beta={}", cfg.oracle.vacuum_beta)), t))
        }
        other => bail!("unknown oracle check {other:?}; expected one of {ORACLE_CHECKS:?}"),
    }
}

type Labelled = (String, Option<polyspec::PolyDoc>, FieldPolynomial);

fn oracle_polynomials(l: &Loaded, theta: Skew) -> Result<Vec<Labelled>> {
    let cfg = &l.config;
    if !cfg.oracle.polynomials.is_empty() {
        return cfg
            .oracle
            .polynomials
            .iter()
            .map(|p| {
                let (d, f) = polyspec::load(&cfg.resolve(&l.base, p), cfg)?;
                Ok((p.display().to_string(), Some(d), f))
            })
            .collect();
    }
    let (p, q) = two_packets(l)?;
    let a = FieldPolynomial::field(theta, p);
    let b = FieldPolynomial::field(theta, q);
    Ok(vec![
        ("f1 f2".into(), None, a.mul(&b)),
        ("f2 f1".into(), None, b.mul(&a)),
        ("f1 f2 f1 f2".into(), None, a.mul(&b).mul(&a).mul(&b)),
        ("f2 f1 f2 f1".into(), None, b.mul(&a).mul(&b).mul(&a)),
    ])
}

pub fn orbit(l: &Loaded) -> Result<(Report, Table)> {
    let cfg = &l.config;
    let orbit = cfg.orbit()?;
    let mut labels = vec![(0.0, 0.0)];
    let o = &cfg.orbit;
    if !(o.rapidities.is_empty() && o.angles.is_empty()) {
        let rs = if o.rapidities.is_empty() { vec![0.0] } else { o.rapidities.clone() };
        let an = if o.angles.is_empty() { vec![0.0] } else { o.angles.clone() };
        for r in &rs {
            for a in &an {
                labels.push((*r, *a));
            }
        }
    }
    let mut header = vec!["index", "rapidity", "angle"];
    let names: Vec<String> = (0..4).flat_map(|m| (0..4).map(move |n| format!("theta_{m}{n}"))).collect();
    header.extend(names.iter().map(String::as_str));
    let mut t = Table::new(&header);
    #[derive(Serialize)]
    struct Sample {
        rapidity: f64,
        angle: f64,
        lambda: Lorentz,
        theta_lower: [[f64; 4]; 4],
    }
    let mut samples = Vec::new();
    for (i, ((r, a), (lam, th))) in labels.iter().zip(&orbit.samples).enumerate() {
        let low = th.lower();
        let mut row = vec![i.to_string(), num(*r), num(*a)];
        row.extend(low.iter().flatten().map(|x| num(*x)));
        t.push(row);
        samples.push(Sample { rapidity: *r, angle: *a, lambda: *lam, theta_lower: low });
    }
    #[derive(Serialize)]
    struct Out {
        reference_lower: [[f64; 4]; 4],
        distinct: usize,
        samples: Vec<Sample>,
    }
    let distinct = orbit.distinct_count(1e-12);
    let out = Out { reference_lower: orbit.reference.lower(), distinct, samples };
    let mut rep = Report::new("orbit", None, cfg).result(out)?;
    rep.verdict = format!("{} samples, {distinct} distinct", labels.len());
    Ok((rep, t))
}
