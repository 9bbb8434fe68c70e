//! JSON polynomial files.
//!
//! A file holds one of `{"degree": d, "roots": [...]}`, `{"e_tilde": [...]}`
//! or `{"coefficients": [...]}` (descending, monic). Entries are strings in
//! `p/q` or decimal form; plain JSON numbers are accepted on input.

use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::precise::{format_exact, parse_rational};
use crate::symmetric::{BigPoly, RootMultiset, SymmetricProfile};

#[derive(Debug, Clone, PartialEq)]
pub enum PolynomialFile {
    /// Roots in any order; negative roots are kept for `⊞`.
    Roots(Vec<BigRational>),
    ETilde(Vec<BigRational>),
    /// Descending, leading coefficient 1.
    Coefficients(Vec<BigRational>),
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Entry {
    Text(String),
    Number(serde_json::Number),
}

impl Entry {
    fn parse(&self) -> Result<BigRational> {
        match self {
            Entry::Text(s) => parse_rational(s),
            Entry::Number(n) => parse_rational(&n.to_string()),
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Raw {
    degree: Option<usize>,
    roots: Option<Vec<Entry>>,
    e_tilde: Option<Vec<Entry>>,
    coefficients: Option<Vec<Entry>>,
}

fn parse_all(v: &[Entry]) -> Result<Vec<BigRational>> {
    v.iter().map(Entry::parse).collect()
}

impl PolynomialFile {
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: Raw = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let given = [
            raw.roots.is_some(),
            raw.e_tilde.is_some(),
            raw.coefficients.is_some(),
        ];
        if given.iter().filter(|&&g| g).count() != 1 {
            return Err(Error::Parse(
                "expected exactly one of \"roots\", \"e_tilde\", \"coefficients\"".into(),
            ));
        }
        let (file, d) = if let Some(r) = &raw.roots {
            let r = parse_all(r)?;
            let d = r.len();
            (PolynomialFile::Roots(r), d)
        } else if let Some(e) = &raw.e_tilde {
            let e = parse_all(e)?;
            let d = e.len().saturating_sub(1);
            (PolynomialFile::ETilde(e), d)
        } else {
            let c = parse_all(raw.coefficients.as_deref().unwrap_or_default())?;
            let d = c.len().saturating_sub(1);
            (PolynomialFile::Coefficients(c), d)
        };
        if let Some(stated) = raw.degree {
            if stated != d {
                return Err(Error::DegreeMismatch {
                    left: stated,
                    right: d,
                });
            }
        }
        if d == 0 {
            return Err(Error::EmptyRoots);
        }
        Ok(file)
    }

    pub fn read(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn degree(&self) -> usize {
        match self {
            PolynomialFile::Roots(r) => r.len(),
            PolynomialFile::ETilde(e) | PolynomialFile::Coefficients(e) => e.len() - 1,
        }
    }

    /// Normalized profile; rejects negative roots and sign-pattern violations.
    pub fn to_profile(&self) -> Result<SymmetricProfile> {
        match self {
            PolynomialFile::Roots(r) => {
                Ok(SymmetricProfile::from_roots(&RootMultiset::new(r.clone())?))
            }
            PolynomialFile::ETilde(e) => SymmetricProfile::from_exact(e.clone()),
            PolynomialFile::Coefficients(c) => {
                SymmetricProfile::from_coefficients(&BigPoly::from_coefficients(c.clone())?)
            }
        }
    }

    pub fn to_poly(&self) -> Result<BigPoly> {
        match self {
            PolynomialFile::Roots(r) => BigPoly::from_roots(r),
            PolynomialFile::ETilde(_) => self.to_profile()?.to_coefficients(),
            PolynomialFile::Coefficients(c) => BigPoly::from_coefficients(c.clone()),
        }
    }
}

#[derive(Serialize)]
struct Written {
    degree: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    roots: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    e_tilde: Option<Vec<String>>,
    coefficients: Vec<String>,
}

fn strings(v: &[BigRational]) -> Vec<String> {
    v.iter().map(format_exact).collect()
}

/// JSON for a polynomial: always its coefficients, plus the exact profile
/// and roots when given.
pub fn polynomial_json(
    poly: &BigPoly,
    profile: Option<&SymmetricProfile>,
    roots: Option<&[BigRational]>,
) -> String {
    let w = Written {
        degree: poly.degree(),
        roots: roots.map(strings),
        e_tilde: profile.and_then(|p| p.e_tilde_exact()).map(strings),
        coefficients: strings(poly.coefficients()),
    };
    serde_json::to_string_pretty(&w).expect("serializable")
}

/// A `{"key": ["p/q", ...]}` object, for ad-hoc exact vectors.
pub fn exact_vector_json(key: &str, values: &[BigRational]) -> Value {
    let mut m = Map::new();
    m.insert(
        key.to_string(),
        Value::Array(
            values
                .iter()
                .map(|v| Value::String(format_exact(v)))
                .collect(),
        ),
    );
    Value::Object(m)
}
