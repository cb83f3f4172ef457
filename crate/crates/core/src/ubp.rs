//! Boundedness of functional families and b-weak* convergence of
//! functional sequences over a finite window.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::convergence::ConvergenceOptions;
use crate::error::{Error, Result};
use crate::functional::BLinearFunctional;
use crate::linalg::{self, columns, Vector};
use crate::seminorm::AnchoredSeminorm;
use crate::space::TwoNormSpace;
use crate::subspace::Subspace;
use crate::tolerance;

/// A window flags norm blow-up when its last-quarter maximum norm is at
/// least this multiple of its first-quarter maximum.
pub const DEFAULT_GROWTH_FACTOR: f64 = 2.0;

/// Non-empty family of functionals sharing one space and one anchor.
#[derive(Debug, Clone)]
pub struct FunctionalFamily {
    members: Vec<BLinearFunctional>,
    label: String,
}

impl FunctionalFamily {
    pub fn new(members: Vec<BLinearFunctional>, label: impl Into<String>) -> Result<Self> {
        let first = members
            .first()
            .ok_or_else(|| Error::InvalidInput("functional family must be non-empty".into()))?;
        for (k, m) in members.iter().enumerate().skip(1) {
            if m.space() != first.space() || m.anchor() != first.anchor() {
                return Err(Error::InvalidInput(format!(
                    "member {k} does not share the family's space and anchor"
                )));
            }
        }
        Ok(Self {
            members,
            label: label.into(),
        })
    }

    /// Whole-space functionals `x ↦ c_k·x`.
    pub fn from_coeffs(
        space: &TwoNormSpace,
        anchor: &Vector,
        coeffs: Vec<Vector>,
        label: impl Into<String>,
    ) -> Result<Self> {
        if !space.is_positive_definite() {
            return Err(Error::InvalidSpace(
                "functionals need a positive-definite space".into(),
            ));
        }
        let seminorm = Arc::new(AnchoredSeminorm::new(space, anchor)?);
        let mut members = Vec::with_capacity(coeffs.len());
        for c in coeffs {
            space.check_vector(&c)?;
            members.push(BLinearFunctional::from_parts(
                seminorm.clone(),
                c,
                Subspace::full(space.dim()),
            ));
        }
        Self::new(members, label)
    }

    pub fn members(&self) -> &[BLinearFunctional] {
        &self.members
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn space(&self) -> &TwoNormSpace {
        self.members[0].space()
    }

    pub fn anchor(&self) -> &Vector {
        self.members[0].anchor()
    }

    /// Norm of every member.
    pub fn norms(&self) -> Result<Vec<f64>> {
        self.members.iter().map(|m| m.norm()).collect()
    }
}

/// Vectors whose span, together with the kernel of `‖·, b‖`, is the whole
/// space.
#[derive(Debug, Clone)]
pub struct TotalSet {
    vectors: Vec<Vector>,
    space: TwoNormSpace,
}

impl TotalSet {
    pub fn new(space: &TwoNormSpace, anchor: &Vector, vectors: Vec<Vector>) -> Result<Self> {
        for v in &vectors {
            space.check_vector(v)?;
        }
        let seminorm = AnchoredSeminorm::new(space, anchor)?;
        let mut all = vectors.clone();
        all.extend(seminorm.kernel_basis());
        let rank = linalg::rank(&columns(space.dim(), &all), tolerance::RANK);
        if rank < space.dim() {
            return Err(Error::InvalidInput(format!(
                "total set spans {rank} of {} dimensions together with the kernel of ‖·, b‖",
                space.dim()
            )));
        }
        Ok(Self {
            vectors,
            space: space.clone(),
        })
    }

    pub fn vectors(&self) -> &[Vector] {
        &self.vectors
    }

    pub fn space(&self) -> &TwoNormSpace {
        &self.space
    }
}

/// Least `K` with `|T(x, b)| ≤ K‖x, b‖` for every member and probe.
///
/// Probes in the kernel of `‖·, b‖` must be annihilated and impose nothing.
pub fn pointwise_bound(family: &FunctionalFamily, probes: &[Vector]) -> Result<f64> {
    let space = family.space();
    let anchor = family.anchor();
    for m in family.members() {
        m.require_bounded()?;
    }
    let mut k: f64 = 0.0;
    for x in probes {
        space.check_vector(x)?;
        let p = space.two_norm(x, anchor)?;
        let zero = p <= tolerance::AXIOM * space.pair_scale(x, anchor);
        for m in family.members() {
            let t = m.evaluate(x)?;
            if zero {
                let violation = t.abs() / (m.coeffs().norm() * x.norm()).max(f64::MIN_POSITIVE);
                if violation > tolerance::BOUNDEDNESS {
                    return Err(Error::Unbounded { violation });
                }
            } else {
                k = k.max(t.abs() / p);
            }
        }
    }
    Ok(k)
}

/// `sup_k ‖T_k‖`.
pub fn uniform_bound(family: &FunctionalFamily) -> Result<f64> {
    family
        .norms()?
        .into_iter()
        .try_fold(0.0, |acc: f64, n| Ok(acc.max(n)))
}

/// Spread `max − min` of the trailing values.
fn tail_spread(values: &[f64], tail: usize) -> f64 {
    let t = &values[values.len() - tail..];
    let max = t.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = t.iter().cloned().fold(f64::INFINITY, f64::min);
    max - min
}

fn probe_spread(family: &FunctionalFamily, probes: &[Vector], opts: &ConvergenceOptions) -> f64 {
    let tail = opts.tail_len(family.len());
    probes
        .iter()
        .map(|x| {
            let values: Vec<f64> = family.members().iter().map(|m| m.coeffs().dot(x)).collect();
            tail_spread(&values, tail)
        })
        .fold(0.0, f64::max)
}

/// The b-weak* limit of the window, if `T_n(x, b)` stabilises on every
/// probe (the domain basis of the first member by default).
pub fn weakstar_limit(
    seq: &FunctionalFamily,
    probes: Option<&[Vector]>,
    opts: &ConvergenceOptions,
) -> Option<BLinearFunctional> {
    let default;
    let probes = match probes {
        Some(p) => p,
        None => {
            default = seq.members()[0].domain().basis().to_vec();
            &default
        }
    };
    if probe_spread(seq, probes, opts) >= opts.tol {
        return None;
    }
    let limit = seq.members().last()?.clone();
    limit.is_bounded().then_some(limit)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Convergent,
    FailsNormBound,
    FailsCauchyOnTotal,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriterionOptions {
    pub convergence: ConvergenceOptions,
    pub growth_factor: f64,
}

impl Default for CriterionOptions {
    fn default() -> Self {
        Self {
            convergence: ConvergenceOptions::default(),
            growth_factor: DEFAULT_GROWTH_FACTOR,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Criterion {
    pub verdict: Verdict,
    pub uniform_bound: f64,
    /// Last-quarter over first-quarter maximum norm.
    pub growth_ratio: f64,
    /// Largest tail spread of `T_n(w, b)` over the total set.
    pub total_spread: f64,
    /// The verdict matches whether [`weakstar_limit`] finds a limit.
    pub agrees_with_limit: bool,
}

/// Convergence test by a bounded norm sequence plus the Cauchy property on
/// a total set.
pub fn weakstar_criterion(
    seq: &FunctionalFamily,
    total: &TotalSet,
    opts: &CriterionOptions,
) -> Result<Criterion> {
    if total.space() != seq.space() {
        return Err(Error::InvalidInput(
            "total set lives in a different space".into(),
        ));
    }
    let norms = seq.norms()?;
    let bound = norms.iter().cloned().fold(0.0, f64::max);
    let q = norms.len().div_ceil(4);
    let first = norms[..q].iter().cloned().fold(0.0, f64::max);
    let last = norms[norms.len() - q..].iter().cloned().fold(0.0, f64::max);
    let growth_ratio = if first > 0.0 {
        last / first
    } else if last > 0.0 {
        f64::INFINITY
    } else {
        1.0
    };
    let bounded = bound.is_finite() && growth_ratio < opts.growth_factor;
    let total_spread = probe_spread(seq, total.vectors(), &opts.convergence);
    let verdict = if !bounded {
        Verdict::FailsNormBound
    } else if total_spread >= opts.convergence.tol {
        Verdict::FailsCauchyOnTotal
    } else {
        Verdict::Convergent
    };
    let limit = weakstar_limit(seq, None, &opts.convergence);
    Ok(Criterion {
        verdict,
        uniform_bound: bound,
        growth_ratio,
        total_spread,
        agrees_with_limit: (verdict == Verdict::Convergent) == limit.is_some(),
    })
}
