//! JSON spec files for spaces, functionals and functional sequences.
//!
//! ```text
//! space:      {"kind": "gram", "dim": n, "gram": [[...], ...]}
//!             {"kind": "product", "left": <space>, "right": <space>}
//! functional: {"b": [...], "c": [...], "domain": [[...], ...]}
//! sequence:   {"space": <space>, "b": [...], "members": [[...], ...],
//!              "label": "...", "total": [[...], ...], "probes": [[...], ...],
//!              "expected": "convergent" | "fails_norm_bound" | "fails_cauchy_on_total"}
//! ```
//!
//! Syntax errors carry the line and column reported by the parser; semantic
//! errors carry a JSON path such as `$.left.gram[1]`.

use std::fs;
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use serde::de::DeserializeOwned;
use serde::Deserialize;
use thiserror::Error;

use crate::functional::BLinearFunctional;
use crate::linalg::{vector, Vector};
use crate::space::TwoNormSpace;
use crate::subspace::Subspace;
use crate::ubp::{FunctionalFamily, Verdict};

#[derive(Debug, Error)]
pub enum SpecError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{}:{line}:{column}: {message}", path.display())]
    Syntax {
        path: PathBuf,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{}: {pointer}: {message}", path.display())]
    Invalid {
        path: PathBuf,
        pointer: String,
        message: String,
    },
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SpaceSpec {
    Gram { dim: usize, gram: Vec<Vec<f64>> },
    Product {
        left: Box<SpaceSpec>,
        right: Box<SpaceSpec>,
    },
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionalSpec {
    pub b: Vec<f64>,
    pub c: Vec<f64>,
    #[serde(default)]
    pub domain: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SequenceSpec {
    pub space: SpaceSpec,
    pub b: Vec<f64>,
    pub members: Vec<Vec<f64>>,
    #[serde(default)]
    pub label: Option<String>,
    #[serde(default)]
    pub total: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    pub probes: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    pub expected: Option<Verdict>,
}

/// File against which semantic errors are reported.
pub struct Source<'a> {
    pub path: &'a Path,
}

impl Source<'_> {
    fn invalid(&self, pointer: impl Into<String>, message: impl Into<String>) -> SpecError {
        SpecError::Invalid {
            path: self.path.to_path_buf(),
            pointer: pointer.into(),
            message: message.into(),
        }
    }
}

fn read(path: &Path) -> Result<String, SpecError> {
    fs::read_to_string(path).map_err(|source| SpecError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn parse<T: DeserializeOwned>(path: &Path, text: &str) -> Result<T, SpecError> {
    serde_json::from_str(text).map_err(|e| SpecError::Syntax {
        path: path.to_path_buf(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

/// Reads a single object or an array of objects.
pub fn read_one_or_many<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>, SpecError> {
    let text = read(path)?;
    if text.trim_start().starts_with('[') {
        let items: Vec<T> = parse(path, &text)?;
        if items.is_empty() {
            return Err(Source { path }.invalid("$", "expected at least one entry"));
        }
        Ok(items)
    } else {
        Ok(vec![parse(path, &text)?])
    }
}

pub fn read_spec<T: DeserializeOwned>(path: &Path) -> Result<T, SpecError> {
    parse(path, &read(path)?)
}

impl SpaceSpec {
    /// Builds the space; `allow_indefinite` admits non-positive-definite
    /// Gram matrices.
    pub fn build(
        &self,
        src: &Source<'_>,
        pointer: &str,
        allow_indefinite: bool,
    ) -> Result<TwoNormSpace, SpecError> {
        match self {
            SpaceSpec::Gram { dim, gram } => {
                if gram.len() != *dim {
                    return Err(src.invalid(
                        format!("{pointer}.gram"),
                        format!("expected {dim} rows, found {}", gram.len()),
                    ));
                }
                for (r, row) in gram.iter().enumerate() {
                    if row.len() != *dim {
                        return Err(src.invalid(
                            format!("{pointer}.gram[{r}]"),
                            format!("expected {dim} entries, found {}", row.len()),
                        ));
                    }
                }
                let m = DMatrix::from_fn(*dim, *dim, |i, j| gram[i][j]);
                let built = if allow_indefinite {
                    TwoNormSpace::gram_unchecked(m)
                } else {
                    TwoNormSpace::gram(m)
                };
                built.map_err(|e| src.invalid(format!("{pointer}.gram"), e.to_string()))
            }
            SpaceSpec::Product { left, right } => {
                let l = left.build(src, &format!("{pointer}.left"), allow_indefinite)?;
                let r = right.build(src, &format!("{pointer}.right"), allow_indefinite)?;
                Ok(TwoNormSpace::product(l, r))
            }
        }
    }

    pub fn is_gram(&self) -> bool {
        matches!(self, SpaceSpec::Gram { .. })
    }
}

fn build_vector(
    src: &Source<'_>,
    pointer: &str,
    coords: &[f64],
    dim: usize,
) -> Result<Vector, SpecError> {
    if coords.len() != dim {
        return Err(src.invalid(
            pointer,
            format!("expected {dim} coordinates, found {}", coords.len()),
        ));
    }
    if coords.iter().any(|v| !v.is_finite()) {
        return Err(src.invalid(pointer, "coordinates must be finite"));
    }
    Ok(vector(coords))
}

fn build_vectors(
    src: &Source<'_>,
    pointer: &str,
    rows: &[Vec<f64>],
    dim: usize,
) -> Result<Vec<Vector>, SpecError> {
    rows.iter()
        .enumerate()
        .map(|(k, v)| build_vector(src, &format!("{pointer}[{k}]"), v, dim))
        .collect()
}

impl FunctionalSpec {
    pub fn build(
        &self,
        space: &TwoNormSpace,
        src: &Source<'_>,
    ) -> Result<BLinearFunctional, SpecError> {
        let n = space.dim();
        let b = build_vector(src, "$.b", &self.b, n)?;
        let c = build_vector(src, "$.c", &self.c, n)?;
        let domain = match &self.domain {
            None => Subspace::full(n),
            Some(rows) => Subspace::new(n, build_vectors(src, "$.domain", rows, n)?)
                .map_err(|e| src.invalid("$.domain", e.to_string()))?,
        };
        BLinearFunctional::on_subspace(space, &b, c, domain)
            .map_err(|e| src.invalid("$", e.to_string()))
    }
}

/// A parsed functional sequence with its optional side data.
pub struct Sequence {
    pub family: FunctionalFamily,
    pub total: Option<Vec<Vector>>,
    pub probes: Option<Vec<Vector>>,
    pub expected: Option<Verdict>,
}

impl SequenceSpec {
    pub fn build(&self, src: &Source<'_>, pointer: &str) -> Result<Sequence, SpecError> {
        let space = self.space.build(src, &format!("{pointer}.space"), false)?;
        let n = space.dim();
        let b = build_vector(src, &format!("{pointer}.b"), &self.b, n)?;
        let members = build_vectors(src, &format!("{pointer}.members"), &self.members, n)?;
        let label = self.label.clone().unwrap_or_else(|| "sequence".into());
        let family = FunctionalFamily::from_coeffs(&space, &b, members, label)
            .map_err(|e| src.invalid(format!("{pointer}.members"), e.to_string()))?;
        let total = self
            .total
            .as_ref()
            .map(|t| build_vectors(src, &format!("{pointer}.total"), t, n))
            .transpose()?;
        let probes = self
            .probes
            .as_ref()
            .map(|p| build_vectors(src, &format!("{pointer}.probes"), p, n))
            .transpose()?;
        Ok(Sequence {
            family,
            total,
            probes,
            expected: self.expected,
        })
    }
}
