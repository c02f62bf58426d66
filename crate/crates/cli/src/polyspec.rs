//! Polynomial documents (JSON).
//!
//! ```json
//! { "schema": "moyal-kms/polynomial/1",
//!   "terms": [ { "coefficient": [1.0, 0.0],
//!                "word": [ { "field": { "fiber": "theta", "packet": "f1" } },
//!                          { "field": { "fiber": "-theta", "packet": "f2", "conj": true } },
//!                          { "translation": [0.5, 0.0, 0.0, 0.0] },
//!                          { "energy_cutoff": { "width": 3.0, "nodes": 6 } },
//!                          { "fourier": [ [[0.5, 0.0], [1.0, 0.0, 0.0, 0.0]] ] },
//!                          { "sharp": { "fiber": "zero", "sign": 1, "k": [0.3, 0.0, 0.0] } } ] } ] }
//! ```
//!
//! Packets are named entries of the config or inline packet tables. An empty
//! word is the unit; an empty term list is zero.

use std::path::Path;

use anyhow::{bail, Context, Result};
use moyal_kms::algebra::{FieldPolynomial, Generator, Monomial, SpectralFn};
use moyal_kms::{FourVec, OnShell};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::config::{PacketSpec, RunConfig};

pub const SCHEMA: &str = "moyal-kms/polynomial/1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolyDoc {
    pub schema: String,
    pub terms: Vec<TermDoc>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermDoc {
    pub coefficient: [f64; 2],
    pub word: Vec<GeneratorDoc>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "snake_case")]
pub enum GeneratorDoc {
    Field {
        fiber: String,
        packet: PacketRef,
        #[serde(default)]
        conj: bool,
    },
    Sharp {
        fiber: String,
        sign: i8,
        k: [f64; 3],
    },
    Translation([f64; 4]),
    EnergyCutoff {
        width: f64,
        nodes: usize,
    },
    /// `Σ c U(x)` as `[[re, im], x]` pairs.
    Fourier(Vec<([f64; 2], [f64; 4])>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PacketRef {
    Named(String),
    Inline(PacketSpec),
}

impl PolyDoc {
    pub fn build(&self, cfg: &RunConfig) -> Result<FieldPolynomial> {
        if self.schema != SCHEMA {
            bail!("unsupported polynomial schema {:?}, expected {SCHEMA:?}", self.schema);
        }
        let mut terms = Vec::with_capacity(self.terms.len());
        for (i, t) in self.terms.iter().enumerate() {
            let word = t.word.iter().map(|g| g.build(cfg)).collect::<Result<Vec<_>>>().with_context(|| format!("term {i}"))?;
            terms.push(Monomial::new(Complex64::new(t.coefficient[0], t.coefficient[1]), word));
        }
        Ok(FieldPolynomial::from_terms(terms))
    }
}

impl GeneratorDoc {
    fn build(&self, cfg: &RunConfig) -> Result<Generator> {
        Ok(match self {
            GeneratorDoc::Field { fiber, packet, conj } => {
                let f = match packet {
                    PacketRef::Named(n) => cfg.packet(n)?,
                    PacketRef::Inline(p) => p.build()?,
                };
                Generator::field(cfg.fiber(fiber)?, if *conj { f.conj() } else { f })
            }
            GeneratorDoc::Sharp { fiber, sign, k } => {
                Generator::SharpField { theta: cfg.fiber(fiber)?, p: OnShell::new(*sign, *k, cfg.mass)? }
            }
            GeneratorDoc::Translation(x) => Generator::Translation { x: FourVec::from_array(*x) },
            GeneratorDoc::EnergyCutoff { width, nodes } => {
                if !(*width > 0.0) || *nodes == 0 {
                    bail!("energy cutoff needs a positive width and at least one node");
                }
                Generator::Spectral(SpectralFn::EnergyCutoff { width: *width, nodes: *nodes })
            }
            GeneratorDoc::Fourier(terms) => Generator::Spectral(SpectralFn::Fourier {
                terms: terms.iter().map(|(c, x)| (Complex64::new(c[0], c[1]), FourVec::from_array(*x))).collect(),
            }),
        })
    }
}

pub fn read(path: &Path) -> Result<PolyDoc> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading polynomial {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing polynomial {}", path.display()))
}

/// Read and build a polynomial document.
pub fn load(path: &Path, cfg: &RunConfig) -> Result<(PolyDoc, FieldPolynomial)> {
    let doc = read(path)?;
    let poly = doc.build(cfg).with_context(|| format!("building polynomial {}", path.display()))?;
    Ok((doc, poly))
}
