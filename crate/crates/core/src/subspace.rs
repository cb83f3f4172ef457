use nalgebra::DMatrix;

use crate::error::{check_len, Error, Result};
use crate::linalg::{self, columns, Vector};
use crate::tolerance;

/// A subspace given by an ordered, linearly independent basis.
///
/// An empty basis denotes `{0}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace {
    ambient: usize,
    basis: Vec<Vector>,
}

impl Subspace {
    pub fn new(ambient: usize, basis: Vec<Vector>) -> Result<Self> {
        for v in &basis {
            check_len(ambient, v.len())?;
        }
        if basis.len() > ambient {
            return Err(Error::InvalidSubspace(format!(
                "{} basis vectors in dimension {ambient}",
                basis.len()
            )));
        }
        let m = columns(ambient, &basis);
        if !basis.is_empty() && linalg::conditioning(&m) <= tolerance::RANK {
            return Err(Error::InvalidSubspace(
                "basis vectors are not linearly independent".into(),
            ));
        }
        Ok(Self { ambient, basis })
    }

    /// The whole space, spanned by the standard basis.
    pub fn full(ambient: usize) -> Self {
        Self {
            ambient,
            basis: linalg::standard_basis(ambient),
        }
    }

    pub fn zero(ambient: usize) -> Self {
        Self {
            ambient,
            basis: Vec::new(),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_full(&self) -> bool {
        self.basis.len() == self.ambient
    }

    pub fn basis(&self) -> &[Vector] {
        &self.basis
    }

    pub fn matrix(&self) -> DMatrix<f64> {
        columns(self.ambient, &self.basis)
    }

    /// Distance of `x` from the subspace relative to `|x|`.
    pub fn relative_residual(&self, x: &Vector) -> f64 {
        let norm = x.norm();
        if norm == 0.0 || self.is_full() {
            return 0.0;
        }
        linalg::span_residual(&self.matrix(), x) / norm
    }

    pub fn contains(&self, x: &Vector) -> bool {
        self.relative_residual(x) <= tolerance::AXIOM
    }

    /// Coordinates of `x` in the basis (least squares).
    pub fn coordinates(&self, x: &Vector) -> Vector {
        linalg::least_squares(&self.matrix(), x)
    }

    /// The subspace spanned by this basis and `v`.
    pub fn adjoin(&self, v: &Vector) -> Result<Self> {
        let mut basis = self.basis.clone();
        basis.push(v.clone());
        Self::new(self.ambient, basis)
    }
}
