//! Finite-window convergence and Cauchy tests.
//!
//! A sequence converges to `x` when `‖x_n − x, y‖ → 0` for every `y`;
//! here "every `y`" is a probe set (the standard basis by default) and the
//! limit is read off the last `tail` terms of a finite window.

use crate::error::{Error, Result};
use crate::linalg::{standard_basis, Vector};
use crate::space::TwoNormSpace;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceOptions {
    pub tol: f64,
    /// Number of trailing terms that must satisfy the bound; a quarter of
    /// the window when `None`.
    pub tail: Option<usize>,
}

impl Default for ConvergenceOptions {
    fn default() -> Self {
        Self {
            tol: crate::tolerance::CONVERGENCE,
            tail: None,
        }
    }
}

impl ConvergenceOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self { tol, tail: None }
    }

    pub fn tail_len(&self, len: usize) -> usize {
        self.tail.unwrap_or(len.div_ceil(4)).clamp(1, len.max(1))
    }
}

fn probes_or_default(space: &TwoNormSpace, probes: Option<&[Vector]>) -> Result<Vec<Vector>> {
    match probes {
        None => Ok(standard_basis(space.dim())),
        Some([]) => Err(Error::InvalidInput("probe set must be non-empty".into())),
        Some(p) => {
            for y in p {
                space.check_vector(y)?;
            }
            Ok(p.to_vec())
        }
    }
}

/// Largest `‖x_n − x, y‖` over the tail and the probes.
pub fn tail_distance(
    space: &TwoNormSpace,
    seq: &[Vector],
    limit: &Vector,
    probes: Option<&[Vector]>,
    opts: &ConvergenceOptions,
) -> Result<f64> {
    if seq.is_empty() {
        return Err(Error::EmptySequence);
    }
    space.check_vector(limit)?;
    let probes = probes_or_default(space, probes)?;
    let tail = opts.tail_len(seq.len());
    let mut worst: f64 = 0.0;
    for x in &seq[seq.len() - tail..] {
        space.check_vector(x)?;
        let d = x - limit;
        for y in &probes {
            worst = worst.max(space.two_norm(&d, y)?);
        }
    }
    Ok(worst)
}

/// True iff the last `tail` terms satisfy `‖x_n − x, y‖ < tol` for every probe.
pub fn converges_to(
    space: &TwoNormSpace,
    seq: &[Vector],
    limit: &Vector,
    probes: Option<&[Vector]>,
    opts: &ConvergenceOptions,
) -> Result<bool> {
    Ok(tail_distance(space, seq, limit, probes, opts)? < opts.tol)
}

/// Largest pairwise `‖x_n − x_m, y‖` over the tail and the probes.
pub fn cauchy_spread(
    space: &TwoNormSpace,
    seq: &[Vector],
    probes: Option<&[Vector]>,
    opts: &ConvergenceOptions,
) -> Result<f64> {
    if seq.is_empty() {
        return Err(Error::EmptySequence);
    }
    let probes = probes_or_default(space, probes)?;
    let tail = &seq[seq.len() - opts.tail_len(seq.len())..];
    for x in tail {
        space.check_vector(x)?;
    }
    let mut worst: f64 = 0.0;
    for (i, a) in tail.iter().enumerate() {
        for b in &tail[i + 1..] {
            let d = a - b;
            for y in &probes {
                worst = worst.max(space.two_norm_slices(d.as_slice(), y.as_slice()));
            }
        }
    }
    Ok(worst)
}

pub fn is_cauchy(
    space: &TwoNormSpace,
    seq: &[Vector],
    probes: Option<&[Vector]>,
    opts: &ConvergenceOptions,
) -> Result<bool> {
    Ok(cauchy_spread(space, seq, probes, opts)? < opts.tol)
}
