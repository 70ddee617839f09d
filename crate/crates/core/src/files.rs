//! JSON input formats for algebras and automorphisms, plus the bundled
//! examples compiled into the binary.

use crate::error::{Error, Result};
use crate::lie::{LiePresentation, NamedInvariant, RawBracket};
use crate::scalar::parse_rational;
use num_rational::BigRational;
use num_traits::Zero;
use serde::Deserialize;
use std::collections::BTreeMap;

#[derive(Deserialize, Debug)]
pub struct AlgebraFile {
    pub name: String,
    pub basis: Vec<String>,
    pub brackets: Vec<BracketEntry>,
    #[serde(default)]
    pub matrices: Option<Vec<Vec<Vec<i64>>>>,
    #[serde(default)]
    pub pmap: Option<Vec<Vec<String>>>,
    #[serde(default)]
    pub invariants: Vec<InvariantEntry>,
    #[serde(default)]
    pub assumption_asserted: bool,
}

#[derive(Deserialize, Debug)]
pub struct BracketEntry {
    pub i: usize,
    pub j: usize,
    /// Sparse: target basis index -> rational coefficient string.
    pub coefficients: BTreeMap<String, String>,
}

#[derive(Deserialize, Debug)]
pub struct InvariantEntry {
    pub name: String,
    pub terms: Vec<TermEntry>,
}

#[derive(Deserialize, Debug)]
pub struct TermEntry {
    pub exponents: Vec<u32>,
    pub coeff: String,
}

impl AlgebraFile {
    pub fn into_presentation(self) -> Result<LiePresentation> {
        let l = self.basis.len();
        let mut raw = Vec::new();
        for b in &self.brackets {
            let mut coeffs = vec![BigRational::zero(); l];
            for (k, v) in &b.coefficients {
                let idx: usize = k
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad coefficient index {:?}", k)))?;
                if idx >= l {
                    return Err(Error::Parse(format!(
                        "coefficient index {} out of range",
                        idx
                    )));
                }
                coeffs[idx] = parse_rational(v)?;
            }
            raw.push(RawBracket { i: b.i, j: b.j, coeffs });
        }
        let pmap = match self.pmap {
            None => None,
            Some(rows) => {
                let mut out = Vec::new();
                for row in rows {
                    let mut v = Vec::new();
                    for s in row {
                        v.push(parse_rational(&s)?);
                    }
                    out.push(v);
                }
                Some(out)
            }
        };
        let mut invariants = Vec::new();
        for inv in self.invariants {
            let mut terms = Vec::new();
            for t in inv.terms {
                if t.exponents.len() != l {
                    return Err(Error::Parse(format!(
                        "invariant {} has exponent vector of wrong length",
                        inv.name
                    )));
                }
                terms.push((t.exponents, parse_rational(&t.coeff)?));
            }
            invariants.push(NamedInvariant { name: inv.name, terms });
        }
        LiePresentation::new(
            self.name,
            self.basis,
            &raw,
            self.matrices,
            pmap,
            invariants,
            self.assumption_asserted,
        )
    }
}

#[derive(Deserialize, Debug)]
pub struct AutomorphismFile {
    pub name: String,
    pub algebra: String,
    pub images: Vec<ImageEntry>,
    #[serde(default)]
    pub order: Option<u64>,
}

#[derive(Deserialize, Debug)]
pub struct ImageEntry {
    pub terms: Vec<TermEntry>,
}

impl AutomorphismFile {
    /// Images as general polynomial terms: (exponent vector, coefficient).
    pub fn image_terms(&self, dim: usize) -> Result<Vec<Vec<(Vec<u32>, BigRational)>>> {
        if self.images.len() != dim {
            return Err(Error::Parse(format!(
                "automorphism {} has {} images for dimension {}",
                self.name,
                self.images.len(),
                dim
            )));
        }
        let mut out = Vec::new();
        for img in &self.images {
            let mut terms = Vec::new();
            for t in &img.terms {
                if t.exponents.len() != dim {
                    return Err(Error::Parse(format!(
                        "automorphism {} has exponent vector of wrong length",
                        self.name
                    )));
                }
                terms.push((t.exponents.clone(), parse_rational(&t.coeff)?));
            }
            out.push(terms);
        }
        Ok(out)
    }

    /// Linear images as rational coordinate rows: row i is the image of x_i.
    /// Errors if any image has a non-linear term.
    pub fn image_matrix(&self, dim: usize) -> Result<Vec<Vec<BigRational>>> {
        if self.images.len() != dim {
            return Err(Error::Parse(format!(
                "automorphism {} has {} images for dimension {}",
                self.name,
                self.images.len(),
                dim
            )));
        }
        let mut rows = Vec::new();
        for img in &self.images {
            let mut row = vec![BigRational::zero(); dim];
            for t in &img.terms {
                if t.exponents.len() != dim || t.exponents.iter().map(|&e| e as usize).sum::<usize>() != 1 {
                    return Err(Error::Parse(format!(
                        "automorphism {} image terms must be linear",
                        self.name
                    )));
                }
                let idx = t.exponents.iter().position(|&e| e == 1).unwrap();
                row[idx] = &row[idx] + parse_rational(&t.coeff)?;
            }
            rows.push(row);
        }
        Ok(rows)
    }
}

pub fn parse_algebra(text: &str) -> Result<LiePresentation> {
    let file: AlgebraFile =
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    file.into_presentation()
}

pub fn parse_automorphism(text: &str) -> Result<AutomorphismFile> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

pub const BUILTIN_ALGEBRAS: &[(&str, &str)] = &[
    ("sl2", include_str!("../algebras/sl2.json")),
    ("sl3", include_str!("../algebras/sl3.json")),
    ("heis3", include_str!("../algebras/heis3.json")),
    ("b2", include_str!("../algebras/b2.json")),
    ("abelian2", include_str!("../algebras/abelian2.json")),
    ("abelian3", include_str!("../algebras/abelian3.json")),
];

pub const BUILTIN_AUTOMORPHISMS: &[(&str, &str)] = &[
    ("cartan", include_str!("../automorphisms/cartan.json")),
    ("torus4", include_str!("../automorphisms/torus4.json")),
    ("identity", include_str!("../automorphisms/identity.json")),
];

pub fn builtin_presentation(name: &str) -> Result<LiePresentation> {
    let text = BUILTIN_ALGEBRAS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, t)| *t)
        .ok_or_else(|| Error::Parse(format!("unknown builtin algebra {:?}", name)))?;
    parse_algebra(text)
}

pub fn builtin_automorphism(name: &str) -> Result<AutomorphismFile> {
    let text = BUILTIN_AUTOMORPHISMS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, t)| *t)
        .ok_or_else(|| Error::Parse(format!("unknown builtin automorphism {:?}", name)))?;
    parse_automorphism(text)
}

/// Loads an algebra from a builtin name or a file path.
pub fn load_algebra(spec: &str) -> Result<LiePresentation> {
    if BUILTIN_ALGEBRAS.iter().any(|(n, _)| *n == spec) {
        return builtin_presentation(spec);
    }
    let text = std::fs::read_to_string(spec)?;
    parse_algebra(&text)
}

pub fn load_automorphism(spec: &str) -> Result<AutomorphismFile> {
    if BUILTIN_AUTOMORPHISMS.iter().any(|(n, _)| *n == spec) {
        return builtin_automorphism(spec);
    }
    let text = std::fs::read_to_string(spec)?;
    parse_automorphism(&text)
}
