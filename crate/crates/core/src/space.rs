//! Concrete linear 2-normed spaces.
//!
//! A space is either a Gram form `‖x, y‖ = √(⟨x,x⟩⟨y,y⟩ − ⟨x,y⟩²)` for a
//! symmetric positive-definite `G`, or the product of two spaces with
//! `‖(x₁,y₁),(x₂,y₂)‖ = ‖x₁,x₂‖ + ‖y₁,y₂‖` on concatenated coordinates.

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;

use crate::error::{check_len, Error, Result};
use crate::linalg::{wedge_norm, Vector};

/// Symmetric bilinear form defining a Gram 2-norm.
#[derive(Clone)]
pub struct GramForm {
    gram: DMatrix<f64>,
    /// `Lᵀ` with `G = L Lᵀ`, present iff `G` is positive definite.
    factor: Option<DMatrix<f64>>,
}

impl fmt::Debug for GramForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GramForm")
            .field("dim", &self.dim())
            .field("positive_definite", &self.factor.is_some())
            .finish()
    }
}

impl PartialEq for GramForm {
    fn eq(&self, other: &Self) -> bool {
        self.gram == other.gram
    }
}

const SYMMETRY_TOL: f64 = 1e-12;
const DEFINITENESS_TOL: f64 = 1e-12;

impl GramForm {
    /// Validated form: square, dimension ≥ 2, finite, symmetric and
    /// positive definite.
    pub fn new(gram: DMatrix<f64>) -> Result<Self> {
        let form = Self::new_unchecked(gram)?;
        if form.factor.is_none() {
            return Err(Error::InvalidSpace(
                "gram matrix is not positive definite".into(),
            ));
        }
        Ok(form)
    }

    /// Like [`GramForm::new`] but accepts indefinite matrices.
    ///
    /// Indefinite forms are evaluated through the raw Gram determinant,
    /// clamped at zero; they exist so the axiom checker can report on them.
    pub fn new_unchecked(gram: DMatrix<f64>) -> Result<Self> {
        let n = gram.nrows();
        if gram.ncols() != n {
            return Err(Error::InvalidSpace(format!(
                "gram matrix must be square, got {}x{}",
                n,
                gram.ncols()
            )));
        }
        if n < 2 {
            return Err(Error::InvalidSpace(format!(
                "a 2-norm needs dimension at least 2, got {n}"
            )));
        }
        if gram.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidSpace("gram matrix has non-finite entries".into()));
        }
        let scale = gram.amax().max(f64::MIN_POSITIVE);
        for i in 0..n {
            for j in (i + 1)..n {
                if (gram[(i, j)] - gram[(j, i)]).abs() > SYMMETRY_TOL * scale {
                    return Err(Error::InvalidSpace(format!(
                        "gram matrix is not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        let factor = positive_definite_factor(&gram);
        Ok(Self { gram, factor })
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::new(DMatrix::identity(n, n))
    }

    pub fn dim(&self) -> usize {
        self.gram.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.gram
    }

    pub fn is_positive_definite(&self) -> bool {
        self.factor.is_some()
    }

    pub fn inner(&self, x: &[f64], y: &[f64]) -> f64 {
        let n = self.dim();
        let mut acc = 0.0;
        for i in 0..n {
            let mut row = 0.0;
            for j in 0..n {
                row += self.gram[(i, j)] * y[j];
            }
            acc += x[i] * row;
        }
        acc
    }

    pub(crate) fn two_norm(&self, x: &[f64], y: &[f64]) -> f64 {
        match &self.factor {
            Some(upper) => {
                let u = apply_upper(upper, x);
                let v = apply_upper(upper, y);
                wedge_norm(&u, &v)
            }
            None => {
                let det = self.inner(x, x) * self.inner(y, y) - self.inner(x, y).powi(2);
                det.max(0.0).sqrt()
            }
        }
    }

    /// Cauchy–Schwarz upper bound `√|⟨x,x⟩⟨y,y⟩|` of the 2-norm.
    pub(crate) fn pair_scale(&self, x: &[f64], y: &[f64]) -> f64 {
        (self.inner(x, x) * self.inner(y, y)).abs().sqrt()
    }
}

fn positive_definite_factor(gram: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let eig = gram.clone().symmetric_eigen();
    let max = eig.eigenvalues.iter().cloned().fold(0.0, f64::max);
    let min = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    if max <= 0.0 || min <= DEFINITENESS_TOL * max {
        return None;
    }
    let chol = gram.clone().cholesky()?;
    Some(chol.l().transpose())
}

fn apply_upper(upper: &DMatrix<f64>, x: &[f64]) -> Vec<f64> {
    let n = upper.nrows();
    (0..n)
        .map(|i| (i..n).map(|j| upper[(i, j)] * x[j]).sum())
        .collect()
}

/// The two shapes a space can take.
#[derive(Debug, PartialEq)]
pub enum SpaceKind {
    Gram(GramForm),
    Product {
        left: TwoNormSpace,
        right: TwoNormSpace,
    },
}

/// A finite-dimensional linear 2-normed space. Cheap to clone.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoNormSpace {
    kind: Arc<SpaceKind>,
    dim: usize,
}

/// A Gram factor of a space together with its coordinate offset.
#[derive(Debug, Clone, Copy)]
pub struct Leaf<'a> {
    pub offset: usize,
    pub form: &'a GramForm,
}

impl Leaf<'_> {
    pub fn dim(&self) -> usize {
        self.form.dim()
    }

    pub fn range(&self) -> std::ops::Range<usize> {
        self.offset..self.offset + self.dim()
    }
}

impl TwoNormSpace {
    pub fn from_form(form: GramForm) -> Self {
        let dim = form.dim();
        Self {
            kind: Arc::new(SpaceKind::Gram(form)),
            dim,
        }
    }

    /// Gram space from a symmetric positive-definite matrix.
    pub fn gram(matrix: DMatrix<f64>) -> Result<Self> {
        GramForm::new(matrix).map(Self::from_form)
    }

    /// Gram space that skips the definiteness check (see
    /// [`GramForm::new_unchecked`]).
    pub fn gram_unchecked(matrix: DMatrix<f64>) -> Result<Self> {
        GramForm::new_unchecked(matrix).map(Self::from_form)
    }

    /// ℝⁿ with the standard inner product.
    pub fn euclidean(n: usize) -> Result<Self> {
        GramForm::identity(n).map(Self::from_form)
    }

    /// Cartesian product; coordinates are the left coordinates followed by
    /// the right ones.
    pub fn product(left: TwoNormSpace, right: TwoNormSpace) -> Self {
        let dim = left.dim + right.dim;
        Self {
            kind: Arc::new(SpaceKind::Product { left, right }),
            dim,
        }
    }

    pub fn kind(&self) -> &SpaceKind {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_product(&self) -> bool {
        matches!(*self.kind, SpaceKind::Product { .. })
    }

    /// Components of a product space.
    pub fn components(&self) -> Option<(&TwoNormSpace, &TwoNormSpace)> {
        match &*self.kind {
            SpaceKind::Product { left, right } => Some((left, right)),
            SpaceKind::Gram(_) => None,
        }
    }

    /// True when every Gram factor is positive definite.
    pub fn is_positive_definite(&self) -> bool {
        self.leaves().iter().all(|l| l.form.is_positive_definite())
    }

    /// Gram factors in coordinate order.
    pub fn leaves(&self) -> Vec<Leaf<'_>> {
        let mut out = Vec::new();
        self.collect_leaves(0, &mut out);
        out
    }

    fn collect_leaves<'a>(&'a self, offset: usize, out: &mut Vec<Leaf<'a>>) {
        match &*self.kind {
            SpaceKind::Gram(form) => out.push(Leaf { offset, form }),
            SpaceKind::Product { left, right } => {
                left.collect_leaves(offset, out);
                right.collect_leaves(offset + left.dim, out);
            }
        }
    }

    pub fn check_vector(&self, x: &Vector) -> Result<()> {
        check_len(self.dim, x.len())
    }

    /// `‖x, y‖`.
    pub fn two_norm(&self, x: &Vector, y: &Vector) -> Result<f64> {
        self.check_vector(x)?;
        self.check_vector(y)?;
        Ok(self.two_norm_slices(x.as_slice(), y.as_slice()))
    }

    pub(crate) fn two_norm_slices(&self, x: &[f64], y: &[f64]) -> f64 {
        match &*self.kind {
            SpaceKind::Gram(form) => form.two_norm(x, y),
            SpaceKind::Product { left, right } => {
                let k = left.dim;
                left.two_norm_slices(&x[..k], &y[..k]) + right.two_norm_slices(&x[k..], &y[k..])
            }
        }
    }

    /// An upper bound of `‖x, y‖` used to make residuals relative.
    pub fn pair_scale(&self, x: &Vector, y: &Vector) -> f64 {
        self.leaves()
            .iter()
            .map(|l| {
                let r = l.range();
                l.form.pair_scale(&x.as_slice()[r.clone()], &y.as_slice()[r])
            })
            .sum()
    }

    /// Length of `x` in the sum of the leaf inner-product norms.
    pub fn length(&self, x: &Vector) -> f64 {
        self.leaves()
            .iter()
            .map(|l| {
                let s = &x.as_slice()[l.range()];
                l.form.inner(s, s).abs().sqrt()
            })
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::vector;
    use approx::assert_relative_eq;

    fn plane() -> TwoNormSpace {
        TwoNormSpace::euclidean(2).unwrap()
    }

    #[test]
    fn plane_two_norm_is_parallelogram_area() {
        let s = plane();
        let v = s.two_norm(&vector(&[1.0, 2.0]), &vector(&[3.0, 4.0])).unwrap();
        // √(5·25 − 11²) = |det| = 2
        assert_relative_eq!(v, (5.0f64 * 25.0 - 121.0).sqrt(), epsilon = 1e-14);
        assert_relative_eq!(v, 2.0, epsilon = 1e-14);
        let w = s.two_norm(&vector(&[3.0, 0.0]), &vector(&[0.0, 4.0])).unwrap();
        assert_relative_eq!(w, 12.0, epsilon = 1e-14);
    }

    #[test]
    fn equal_arguments_give_zero() {
        let s = TwoNormSpace::euclidean(3).unwrap();
        let x = vector(&[0.3, -2.0, 5.0]);
        assert_eq!(s.two_norm(&x, &x).unwrap(), 0.0);
    }

    #[test]
    fn dimension_mismatch() {
        let s = plane();
        let err = s.two_norm(&vector(&[1.0, 2.0]), &vector(&[1.0, 2.0, 3.0]));
        assert_eq!(
            err,
            Err(Error::DimensionMismatch {
                expected: 2,
                found: 3
            })
        );
    }

    #[test]
    fn gram_matches_determinant_formula() {
        let g = DMatrix::from_row_slice(3, 3, &[2.0, 0.5, 0.1, 0.5, 1.5, -0.3, 0.1, -0.3, 1.0]);
        let s = TwoNormSpace::gram(g.clone()).unwrap();
        let x = vector(&[1.0, -0.5, 2.0]);
        let y = vector(&[0.2, 1.0, -1.0]);
        let xx = (x.transpose() * &g * &x)[0];
        let yy = (y.transpose() * &g * &y)[0];
        let xy = (x.transpose() * &g * &y)[0];
        assert_relative_eq!(
            s.two_norm(&x, &y).unwrap(),
            (xx * yy - xy * xy).sqrt(),
            max_relative = 1e-13
        );
    }

    #[test]
    fn rejects_invalid_gram_matrices() {
        assert!(TwoNormSpace::gram(DMatrix::identity(1, 1)).is_err());
        assert!(TwoNormSpace::gram(DMatrix::from_row_slice(2, 3, &[0.0; 6])).is_err());
        let asym = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.0, 1.0]);
        assert!(TwoNormSpace::gram(asym).is_err());
        let indefinite = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        assert!(TwoNormSpace::gram(indefinite.clone()).is_err());
        let raw = TwoNormSpace::gram_unchecked(indefinite).unwrap();
        assert!(!raw.is_positive_definite());
        // det of the 2×2 Gram matrix is negative and clamps to zero
        let v = raw.two_norm(&vector(&[1.0, 0.0]), &vector(&[0.0, 1.0])).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn products_split_coordinates() {
        let p = TwoNormSpace::product(plane(), plane());
        assert_eq!(p.dim(), 4);
        let leaves = p.leaves();
        assert_eq!(leaves.len(), 2);
        assert_eq!(leaves[1].offset, 2);
    }
}
