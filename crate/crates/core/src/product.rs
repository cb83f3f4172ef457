//! Cartesian products of 2-normed spaces and their sequence calculus.
//!
//! `‖(x₁,y₁),(x₂,y₂)‖ = ‖x₁,x₂‖_X + ‖y₁,y₂‖_Y`. Product vectors are the
//! left coordinates followed by the right coordinates.
//!
//! The sum satisfies N2–N4 and N1's reverse direction, but it vanishes on
//! pairs that are dependent in each component without being dependent in
//! the product (`(u, 0)` and `(0, v)`), so it is a 2-seminorm in general.
//! See `componentwise_dependent_pairs_vanish` below.

use nalgebra::DVector;

use crate::convergence::{self, ConvergenceOptions};
use crate::error::{Error, Result};
use crate::linalg::{standard_basis, Vector};
use crate::space::TwoNormSpace;

pub fn product(left: &TwoNormSpace, right: &TwoNormSpace) -> TwoNormSpace {
    TwoNormSpace::product(left.clone(), right.clone())
}

/// Concatenates component vectors.
pub fn join(left: &Vector, right: &Vector) -> Vector {
    let mut out = DVector::zeros(left.len() + right.len());
    out.rows_mut(0, left.len()).copy_from(left);
    out.rows_mut(left.len(), right.len()).copy_from(right);
    out
}

/// Splits a product vector into its components.
pub fn split(space: &TwoNormSpace, x: &Vector) -> Result<(Vector, Vector)> {
    let (left, _) = space
        .components()
        .ok_or_else(|| Error::InvalidInput("not a product space".into()))?;
    space.check_vector(x)?;
    let k = left.dim();
    Ok((
        x.rows(0, k).into_owned(),
        x.rows(k, x.len() - k).into_owned(),
    ))
}

/// Probes `(z, 0)` and `(0, t)` built from component probe sets.
pub fn product_probes(left_probes: &[Vector], right_probes: &[Vector]) -> Vec<Vector> {
    let (m, k) = (
        left_probes.first().map_or(0, |v| v.len()),
        right_probes.first().map_or(0, |v| v.len()),
    );
    let zl = DVector::zeros(m);
    let zr = DVector::zeros(k);
    left_probes
        .iter()
        .map(|z| join(z, &zr))
        .chain(right_probes.iter().map(|t| join(&zl, t)))
        .collect()
}

/// Component probe sets; the standard bases when `None`.
#[derive(Debug, Clone, Default)]
pub struct SplitProbes {
    pub left: Option<Vec<Vector>>,
    pub right: Option<Vec<Vector>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SplitCauchy {
    pub left: bool,
    pub right: bool,
    /// The product-level verdict under the matched probes `(z,0)`, `(0,t)`.
    pub product: bool,
}

impl SplitCauchy {
    pub fn conjunction_holds(&self) -> bool {
        self.product == (self.left && self.right)
    }
}

/// Per-component Cauchy verdicts of a sequence in a product space, along
/// with the product verdict under matched probes.
pub fn split_cauchy(
    space: &TwoNormSpace,
    seq: &[Vector],
    probes: &SplitProbes,
    opts: &ConvergenceOptions,
) -> Result<SplitCauchy> {
    let (left, right) = space
        .components()
        .ok_or_else(|| Error::InvalidInput("split_cauchy needs a product space".into()))?;
    if seq.is_empty() {
        return Err(Error::EmptySequence);
    }
    let mut ls = Vec::with_capacity(seq.len());
    let mut rs = Vec::with_capacity(seq.len());
    for x in seq {
        let (l, r) = split(space, x)?;
        ls.push(l);
        rs.push(r);
    }
    let lp = probes
        .left
        .clone()
        .unwrap_or_else(|| standard_basis(left.dim()));
    let rp = probes
        .right
        .clone()
        .unwrap_or_else(|| standard_basis(right.dim()));
    let left_ok = convergence::is_cauchy(left, &ls, Some(&lp), opts)?;
    let right_ok = convergence::is_cauchy(right, &rs, Some(&rp), opts)?;
    let pp = product_probes(&lp, &rp);
    let product_ok = convergence::is_cauchy(space, seq, Some(&pp), opts)?;
    Ok(SplitCauchy {
        left: left_ok,
        right: right_ok,
        product: product_ok,
    })
}
