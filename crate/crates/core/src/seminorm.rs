//! The seminorm `x ↦ ‖x, b‖` for a fixed anchor `b`.
//!
//! On a Gram leaf `‖x, b‖² = xᵀ Q x` with `Q = (bᵀGb) G − (Gb)(Gb)ᵀ`, a
//! positive semidefinite matrix whose kernel is `span(b)`. On a product the
//! seminorm is the sum of the leaf seminorms, so its kernel is the direct
//! sum of the leaf kernels.

use nalgebra::{DMatrix, DVector};

use crate::error::{check_len, Error, Result};
use crate::linalg::Vector;
use crate::space::TwoNormSpace;

const ZERO_LEAF_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
struct LeafQuadratic {
    offset: usize,
    quad: DMatrix<f64>,
    /// Anchor restricted to this leaf vanishes, so the leaf seminorm is zero.
    null: bool,
}

/// `‖·, b‖` on a space, with its quadratic structure exposed.
#[derive(Debug, Clone)]
pub struct AnchoredSeminorm {
    space: TwoNormSpace,
    anchor: Vector,
    leaves: Vec<LeafQuadratic>,
}

impl AnchoredSeminorm {
    pub fn new(space: &TwoNormSpace, anchor: &Vector) -> Result<Self> {
        check_len(space.dim(), anchor.len())?;
        let scale = anchor.norm();
        if scale == 0.0 {
            return Err(Error::Degenerate("anchor b must be non-zero".into()));
        }
        let leaves = space
            .leaves()
            .iter()
            .map(|leaf| {
                let d = leaf.dim();
                let b = anchor.rows(leaf.offset, d).into_owned();
                let g = leaf.form.matrix();
                let gb = g * &b;
                let bgb = b.dot(&gb);
                let quad = g * bgb - &gb * gb.transpose();
                LeafQuadratic {
                    offset: leaf.offset,
                    quad: (&quad + quad.transpose()) * 0.5,
                    null: b.norm() <= ZERO_LEAF_TOL * scale,
                }
            })
            .collect();
        Ok(Self {
            space: space.clone(),
            anchor: anchor.clone(),
            leaves,
        })
    }

    pub fn space(&self) -> &TwoNormSpace {
        &self.space
    }

    pub fn anchor(&self) -> &Vector {
        &self.anchor
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    /// `‖x, b‖`, evaluated by the space itself.
    pub fn value(&self, x: &Vector) -> f64 {
        self.space.two_norm_slices(x.as_slice(), self.anchor.as_slice())
    }

    /// Block-diagonal `Q` with `Σ_leaves ‖x_l, b_l‖² = xᵀ Q x`.
    pub fn quadratic(&self) -> DMatrix<f64> {
        let n = self.dim();
        let mut q = DMatrix::zeros(n, n);
        for leaf in &self.leaves {
            let d = leaf.quad.nrows();
            q.view_mut((leaf.offset, leaf.offset), (d, d))
                .copy_from(&leaf.quad);
        }
        q
    }

    /// Polarised form of [`AnchoredSeminorm::quadratic`].
    pub fn bilinear(&self, x: &Vector, y: &Vector) -> f64 {
        self.leaves
            .iter()
            .map(|leaf| {
                let d = leaf.quad.nrows();
                let xs = x.rows(leaf.offset, d);
                let ys = y.rows(leaf.offset, d);
                xs.dot(&(&leaf.quad * ys))
            })
            .sum()
    }

    /// Euclidean-orthonormal basis of the kernel `{x : ‖x, b‖ = 0}`.
    pub fn kernel_basis(&self) -> Vec<Vector> {
        let n = self.dim();
        let mut out = Vec::new();
        for (leaf, info) in self.leaves.iter().zip(self.space.leaves()) {
            let d = info.dim();
            if leaf.null {
                for i in 0..d {
                    let mut e = DVector::zeros(n);
                    e[leaf.offset + i] = 1.0;
                    out.push(e);
                }
            } else {
                let b = self.anchor.rows(leaf.offset, d);
                let mut e = DVector::zeros(n);
                e.rows_mut(leaf.offset, d).copy_from(&(b / b.norm()));
                out.push(e);
            }
        }
        out
    }

    /// Smoothed seminorm `Σ √(y_lᵀ Q_l y_l + ε²)` with gradient and Hessian.
    pub fn smoothed(&self, y: &Vector, eps: f64) -> (f64, Vector, DMatrix<f64>) {
        let n = self.dim();
        let mut value = 0.0;
        let mut grad = DVector::zeros(n);
        let mut hess = DMatrix::zeros(n, n);
        for leaf in &self.leaves {
            if leaf.null {
                continue;
            }
            let d = leaf.quad.nrows();
            let ys = y.rows(leaf.offset, d);
            let qy = &leaf.quad * ys;
            let sigma = (ys.dot(&qy).max(0.0) + eps * eps).sqrt();
            value += sigma;
            grad.rows_mut(leaf.offset, d).copy_from(&(&qy / sigma));
            let h = &leaf.quad / sigma - (&qy * qy.transpose()) / sigma.powi(3);
            hess.view_mut((leaf.offset, leaf.offset), (d, d)).copy_from(&h);
        }
        (value, grad, hess)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{unit, vector};
    use approx::assert_relative_eq;

    #[test]
    fn quadratic_reproduces_two_norm() {
        let g = DMatrix::from_row_slice(3, 3, &[2.0, 0.3, 0.0, 0.3, 1.0, 0.2, 0.0, 0.2, 1.5]);
        let space = TwoNormSpace::gram(g).unwrap();
        let b = vector(&[0.5, -1.0, 2.0]);
        let p = AnchoredSeminorm::new(&space, &b).unwrap();
        let x = vector(&[1.0, 2.0, -0.4]);
        let q = p.quadratic();
        assert_relative_eq!(
            (x.transpose() * &q * &x)[0].sqrt(),
            p.value(&x),
            max_relative = 1e-12
        );
        assert!(p.value(&(&b * 3.0)) < 1e-12);
        assert_eq!(p.kernel_basis().len(), 1);
    }

    #[test]
    fn product_kernel_is_two_dimensional() {
        let plane = TwoNormSpace::euclidean(2).unwrap();
        let space = TwoNormSpace::product(plane.clone(), plane);
        let b = vector(&[1.0, 0.0, 0.0, 1.0]);
        let p = AnchoredSeminorm::new(&space, &b).unwrap();
        let kernel = p.kernel_basis();
        assert_eq!(kernel.len(), 2);
        for k in &kernel {
            assert_eq!(p.value(k), 0.0);
        }
    }

    #[test]
    fn null_leaf_contributes_whole_kernel() {
        let plane = TwoNormSpace::euclidean(2).unwrap();
        let space = TwoNormSpace::product(plane.clone(), plane);
        let b = vector(&[1.0, 0.0, 0.0, 0.0]);
        let p = AnchoredSeminorm::new(&space, &b).unwrap();
        assert_eq!(p.kernel_basis().len(), 3);
        assert_eq!(p.value(&unit(4, 3)), 0.0);
    }

    #[test]
    fn smoothed_gradient_matches_finite_differences() {
        let space = TwoNormSpace::euclidean(3).unwrap();
        let p = AnchoredSeminorm::new(&space, &unit(3, 2)).unwrap();
        let y = vector(&[0.7, -0.2, 0.4]);
        let (v, g, h) = p.smoothed(&y, 0.0);
        assert_relative_eq!(v, p.value(&y), max_relative = 1e-12);
        let step = 1e-6;
        for i in 0..3 {
            let mut yp = y.clone();
            yp[i] += step;
            let mut ym = y.clone();
            ym[i] -= step;
            let (vp, gp, _) = p.smoothed(&yp, 0.0);
            let (vm, gm, _) = p.smoothed(&ym, 0.0);
            assert_relative_eq!((vp - vm) / (2.0 * step), g[i], epsilon = 1e-8);
            for j in 0..3 {
                assert_relative_eq!((gp[j] - gm[j]) / (2.0 * step), h[(j, i)], epsilon = 1e-6);
            }
        }
    }

    #[test]
    fn rejects_zero_anchor() {
        let space = TwoNormSpace::euclidean(2).unwrap();
        assert!(AnchoredSeminorm::new(&space, &vector(&[0.0, 0.0])).is_err());
    }
}
