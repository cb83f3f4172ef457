//! Bounded b-linear functionals `T(x, b) = c·x` on a subspace `W × ⟨b⟩`.
//!
//! `T` is bounded iff it vanishes on `W ∩ ker‖·, b‖`, and then
//!
//! ```text
//! ‖T‖ = inf{M : |T(x,b)| ≤ M‖x,b‖}      = sup{|T(x,b)| : ‖x,b‖ ≤ 1}
//!     = sup{|T(x,b)| : ‖x,b‖ = 1}       = sup{|T(x,b)| / ‖x,b‖ : ‖x,b‖ ≠ 0}.
//! ```
//!
//! Two independent routes compute it: a closed form through the
//! pseudoinverse of the seminorm's quadratic form, and a direction-search
//! oracle over the unit sphere of `W` modulo the kernel.

use std::sync::Arc;

use nalgebra::DMatrix;
use rand::Rng;
use serde::Serialize;

use crate::ball::{in_ball, Ball};
use crate::convergence::{self, ConvergenceOptions};
use crate::error::{check_len, Error, Result};
use crate::linalg::{self, columns, Vector};
use crate::optimize::{
    maximize_concave, maximize_on_sphere, ConcaveObjective, ConcaveOptions, DirectionSearch,
};
use crate::sampling;
use crate::seminorm::AnchoredSeminorm;
use crate::space::TwoNormSpace;
use crate::subspace::Subspace;
use crate::tolerance;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NormMethod {
    /// Direction search over the quotient unit sphere.
    Oracle,
    /// `√(dᵀ (BᵀQB)⁺ d)` with `d = Bᵀc`; Gram spaces, or products on the
    /// whole space.
    ClosedForm,
    /// Closed form when available, oracle otherwise.
    Auto,
}

#[derive(Debug, Clone)]
pub struct BLinearFunctional {
    seminorm: Arc<AnchoredSeminorm>,
    coeffs: Vector,
    domain: Subspace,
    cached_norm: Option<f64>,
}

/// The four equivalent norm expressions, each evaluated numerically.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormFormulas {
    pub infimum_bound: f64,
    pub sup_unit_ball: f64,
    pub sup_unit_sphere: f64,
    pub sup_ratio: f64,
}

impl NormFormulas {
    pub fn values(&self) -> [f64; 4] {
        [
            self.infimum_bound,
            self.sup_unit_ball,
            self.sup_unit_sphere,
            self.sup_ratio,
        ]
    }

    /// Largest pairwise relative disagreement.
    pub fn spread(&self) -> f64 {
        let v = self.values();
        let max = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let min = v.iter().cloned().fold(f64::INFINITY, f64::min);
        if max == 0.0 {
            0.0
        } else {
            (max - min) / max
        }
    }
}

impl BLinearFunctional {
    /// Functional on the whole space.
    pub fn new(space: &TwoNormSpace, anchor: &Vector, coeffs: Vector) -> Result<Self> {
        Self::on_subspace(space, anchor, coeffs, Subspace::full(space.dim()))
    }

    /// Functional on `domain × ⟨b⟩`.
    pub fn on_subspace(
        space: &TwoNormSpace,
        anchor: &Vector,
        coeffs: Vector,
        domain: Subspace,
    ) -> Result<Self> {
        if !space.is_positive_definite() {
            return Err(Error::InvalidSpace(
                "functionals need a positive-definite space".into(),
            ));
        }
        check_len(space.dim(), coeffs.len())?;
        check_len(space.dim(), domain.ambient_dim())?;
        let seminorm = AnchoredSeminorm::new(space, anchor)?;
        Ok(Self::from_parts(Arc::new(seminorm), coeffs, domain))
    }

    pub(crate) fn from_parts(
        seminorm: Arc<AnchoredSeminorm>,
        coeffs: Vector,
        domain: Subspace,
    ) -> Self {
        Self {
            seminorm,
            coeffs,
            domain,
            cached_norm: None,
        }
    }

    pub fn space(&self) -> &TwoNormSpace {
        self.seminorm.space()
    }

    pub fn anchor(&self) -> &Vector {
        self.seminorm.anchor()
    }

    pub fn seminorm(&self) -> &AnchoredSeminorm {
        &self.seminorm
    }

    pub(crate) fn seminorm_arc(&self) -> &Arc<AnchoredSeminorm> {
        &self.seminorm
    }

    pub fn coeffs(&self) -> &Vector {
        &self.coeffs
    }

    pub fn domain(&self) -> &Subspace {
        &self.domain
    }

    pub fn cached_norm(&self) -> Option<f64> {
        self.cached_norm
    }

    /// Returns a copy carrying its computed norm.
    pub fn with_norm(mut self) -> Result<Self> {
        self.cached_norm = None;
        let norm = self.functional_norm(NormMethod::Auto)?;
        self.cached_norm = Some(norm);
        Ok(self)
    }

    /// Cached norm, or the norm computed by [`NormMethod::Auto`].
    pub fn norm(&self) -> Result<f64> {
        match self.cached_norm {
            Some(n) => Ok(n),
            None => self.functional_norm(NormMethod::Auto),
        }
    }

    /// `k·T`.
    pub fn scaled(&self, k: f64) -> Self {
        Self {
            seminorm: self.seminorm.clone(),
            coeffs: &self.coeffs * k,
            domain: self.domain.clone(),
            cached_norm: self.cached_norm.map(|n| n * k.abs()),
        }
    }

    /// `T(x, b) = c·x` for `x` in the domain.
    pub fn evaluate(&self, x: &Vector) -> Result<f64> {
        self.space().check_vector(x)?;
        if !self.domain.is_full() {
            let residual = self.domain.relative_residual(x);
            if residual > tolerance::AXIOM {
                return Err(Error::NotInDomain { residual });
            }
        }
        Ok(self.coeffs.dot(x))
    }

    /// Basis of `W ∩ ker‖·, b‖`.
    pub fn domain_kernel(&self) -> Vec<Vector> {
        let kernel = self.seminorm.kernel_basis();
        if self.domain.is_full() {
            return kernel;
        }
        if self.domain.dim() == 0 {
            return Vec::new();
        }
        let n = self.space().dim();
        let w = self.domain.matrix();
        let mut joint = DMatrix::zeros(n, w.ncols() + kernel.len());
        joint.view_mut((0, 0), (n, w.ncols())).copy_from(&w);
        for (j, k) in kernel.iter().enumerate() {
            joint.set_column(w.ncols() + j, k);
        }
        linalg::null_space(&joint, tolerance::RANK)
            .into_iter()
            .filter_map(|z| {
                let v = &w * z.rows(0, w.ncols());
                let n = v.norm();
                (n > 0.0).then(|| v / n)
            })
            .collect()
    }

    /// Largest `|c·k| / (|c| |k|)` over the kernel part of the domain.
    pub fn boundedness_violation(&self) -> f64 {
        let cn = self.coeffs.norm();
        if cn == 0.0 {
            return 0.0;
        }
        self.domain_kernel()
            .iter()
            .map(|k| self.coeffs.dot(k).abs() / (cn * k.norm()))
            .fold(0.0, f64::max)
    }

    pub fn is_bounded(&self) -> bool {
        self.boundedness_violation() <= tolerance::BOUNDEDNESS
    }

    pub(crate) fn require_bounded(&self) -> Result<()> {
        let violation = self.boundedness_violation();
        if violation <= tolerance::BOUNDEDNESS {
            Ok(())
        } else {
            Err(Error::Unbounded { violation })
        }
    }

    pub fn functional_norm(&self, method: NormMethod) -> Result<f64> {
        if self.domain.dim() == 0 {
            return Ok(0.0);
        }
        self.require_bounded()?;
        match method {
            NormMethod::ClosedForm => self.closed_form_norm(),
            NormMethod::Oracle => Ok(self.oracle_norm(&DirectionSearch::default())),
            NormMethod::Auto => match self.closed_form_norm() {
                Err(Error::ClosedFormUnavailable(_)) => {
                    Ok(self.oracle_norm(&DirectionSearch::default()))
                }
                other => other,
            },
        }
    }

    fn closed_form_norm(&self) -> Result<f64> {
        let leaves = self.space().leaves();
        let q = self.seminorm.quadratic();
        if leaves.len() == 1 {
            let value = if self.domain.is_full() {
                let qi = linalg::psd_pseudo_inverse(&q, tolerance::RANK);
                self.coeffs.dot(&(&qi * &self.coeffs))
            } else {
                let b = self.domain.matrix();
                let a = b.transpose() * &q * &b;
                let d = b.transpose() * &self.coeffs;
                let ai = linalg::psd_pseudo_inverse(&a, tolerance::RANK);
                d.dot(&(&ai * &d))
            };
            return Ok(value.max(0.0).sqrt());
        }
        if !self.domain.is_full() {
            return Err(Error::ClosedFormUnavailable(
                "functionals on proper subspaces of product spaces",
            ));
        }
        // The dual of a sum of leaf seminorms is the maximum of the leaf duals.
        let mut best: f64 = 0.0;
        for leaf in leaves {
            let r = leaf.range();
            let d = r.len();
            let ql = q.view((leaf.offset, leaf.offset), (d, d)).into_owned();
            let cl = self.coeffs.rows(leaf.offset, d).into_owned();
            let qi = linalg::psd_pseudo_inverse(&ql, tolerance::RANK);
            best = best.max(cl.dot(&(&qi * &cl)).max(0.0).sqrt());
        }
        Ok(best)
    }

    /// Vectors spanning `W` modulo the kernel, orthonormal for the
    /// seminorm's polarised quadratic form: the eigenvectors of `BᵀQB` with
    /// non-negligible eigenvalues, rescaled.
    pub fn quotient_frame(&self) -> Vec<Vector> {
        if self.domain.dim() == 0 {
            return Vec::new();
        }
        let b = self.domain.matrix();
        let a = b.transpose() * self.seminorm.quadratic() * &b;
        let eig = ((&a + a.transpose()) * 0.5).symmetric_eigen();
        let max = eig.eigenvalues.iter().cloned().fold(0.0, f64::max);
        let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
        order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
        order
            .into_iter()
            .filter(|&j| max > 0.0 && eig.eigenvalues[j] > tolerance::RANK * max)
            .map(|j| &b * eig.eigenvectors.column(j) / eig.eigenvalues[j].sqrt())
            .collect()
    }

    /// Maximiser of the smoothed dual `a·u − ½‖Vu, b‖²`, a norming
    /// direction up to the smoothing.
    fn dual_start(&self, m: &DMatrix<f64>, a: &Vector) -> Option<Vector> {
        let scale = a.norm();
        (scale > 0.0).then(|| {
            let dual = DualObjective {
                seminorm: &self.seminorm,
                frame: m,
                slope: a,
                eps: 1e-12 * scale,
            };
            let opts = ConcaveOptions {
                initial_radius: scale,
                radius_cap: tolerance::RADIUS_CAP * scale,
                improvement_tol: 1e-15 * scale * scale,
                decrement_tol: 1e-18 * scale * scale,
                ..ConcaveOptions::default()
            };
            maximize_concave(&dual, &opts).point
        })
    }

    /// `sup |T(x, b)| / ‖x, b‖` by direction search, started from the
    /// maximiser of the smoothed dual problem `a·u − ½‖Vu, b‖²`.
    pub fn oracle_norm(&self, search: &DirectionSearch) -> f64 {
        let frame = self.quotient_frame();
        if frame.is_empty() {
            return 0.0;
        }
        let m = columns(self.space().dim(), &frame);
        let a = m.transpose() * &self.coeffs;
        let start = self.dual_start(&m, &a);
        let best = maximize_on_sphere(
            frame.len(),
            |u| {
                let x = &m * u;
                a.dot(u).abs() / self.seminorm.value(&x)
            },
            search,
            start.as_ref(),
        );
        best.value
    }

    /// Evaluates each of the four norm expressions by its own numerical route.
    pub fn norm_formulas(&self, search: &DirectionSearch) -> Result<NormFormulas> {
        self.require_bounded()?;
        let frame = self.quotient_frame();
        if frame.is_empty() || self.domain.dim() == 0 {
            return Ok(NormFormulas {
                infimum_bound: 0.0,
                sup_unit_ball: 0.0,
                sup_unit_sphere: 0.0,
                sup_ratio: 0.0,
            });
        }
        let k = frame.len();
        let m = columns(self.space().dim(), &frame);
        let a = m.transpose() * &self.coeffs;
        let p = |u: &Vector| self.seminorm.value(&(&m * u));
        let dual = self.dual_start(&m, &a);
        let dual = dual.as_ref();

        let sup_ratio = maximize_on_sphere(k, |u| a.dot(u).abs() / p(u), search, dual).value;

        // Points on {‖x, b‖ = 1}.
        let sup_unit_sphere =
            maximize_on_sphere(k, |u| (a.dot(u) / p(u)).abs(), search, dual).value;

        // Farthest admissible point of {‖x, b‖ ≤ 1} along each direction,
        // located by bracketing and bisection.
        let reach = |u: &Vector| {
            let mut hi = 1.0;
            while p(&(u * hi)) <= 1.0 && hi < 1e300 {
                hi *= 2.0;
            }
            let mut lo = 0.0;
            for _ in 0..64 {
                let mid = 0.5 * (lo + hi);
                if p(&(u * mid)) <= 1.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            lo
        };
        let coarse = DirectionSearch {
            budget: (search.budget / 10).max(100),
            seed: search.seed,
        };
        let sup_unit_ball =
            maximize_on_sphere(k, |u| a.dot(u).abs() * reach(u), &coarse, dual).value;

        // Least M with |T(x, b)| − M‖x, b‖ ≤ 0 on the sphere, by bisection.
        let mut start: Option<Vector> = dual.cloned();
        let excess = |bound: f64, start: &mut Option<Vector>| {
            let best = maximize_on_sphere(
                k,
                |u| a.dot(u).abs() - bound * p(u),
                &coarse,
                start.as_ref(),
            );
            *start = Some(best.direction);
            best.value
        };
        let mut hi = 1.0;
        while excess(hi, &mut start) > 0.0 {
            hi *= 2.0;
        }
        let mut lo = 0.0;
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if excess(mid, &mut start) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-12 * hi {
                break;
            }
        }

        Ok(NormFormulas {
            infimum_bound: hi,
            sup_unit_ball,
            sup_unit_sphere,
            sup_ratio,
        })
    }

    /// `‖T‖‖x − y, b‖ − |T(x, b) − T(y, b)|`, non-negative for bounded `T`.
    pub fn lipschitz_residual(&self, x: &Vector, y: &Vector) -> Result<f64> {
        self.require_bounded()?;
        let norm = self.norm()?;
        let d = self.space().two_norm(&(x - y), self.anchor())?;
        let tx = self.evaluate(x)?;
        let ty = self.evaluate(y)?;
        Ok(norm * d - (tx - ty).abs())
    }
}

// a·u − ½‖Vu, b‖², whose maximiser points along a norming direction.
struct DualObjective<'a> {
    seminorm: &'a AnchoredSeminorm,
    frame: &'a DMatrix<f64>,
    slope: &'a Vector,
    eps: f64,
}

impl ConcaveObjective for DualObjective<'_> {
    fn dim(&self) -> usize {
        self.slope.len()
    }

    fn value(&self, u: &Vector) -> f64 {
        let p = self.seminorm.value(&(self.frame * u));
        self.slope.dot(u) - 0.5 * p * p
    }

    fn derivatives(&self, u: &Vector) -> (f64, Vector, DMatrix<f64>) {
        let (p, g, h) = self.seminorm.smoothed(&(self.frame * u), self.eps);
        let vt = self.frame.transpose();
        let vg = &vt * g;
        let hess = &vg * vg.transpose() + (&vt * h * self.frame) * p;
        (self.slope.dot(u) - 0.5 * p * p, self.slope - &vg * p, -hess)
    }
}

/// Whether `T(x_n, b) → T(x, b)` for a sequence with `x_n → x` in `‖·, b‖`.
///
/// Unbounded functionals and non-convergent sequences are precondition
/// errors, distinct from an `Ok(false)` continuity failure.
pub fn check_b_sequential_continuity(
    functional: &BLinearFunctional,
    seq: &[Vector],
    limit: &Vector,
    opts: &ConvergenceOptions,
) -> Result<bool> {
    functional.require_bounded()?;
    let probe = [functional.anchor().clone()];
    if !convergence::converges_to(functional.space(), seq, limit, Some(&probe), opts)? {
        return Err(Error::Precondition(
            "sequence does not converge to the limit in ‖·, b‖".into(),
        ));
    }
    let norm = functional.norm()?;
    let target = functional.evaluate(limit)?;
    let bound = norm * opts.tol * (1.0 + 1e-9);
    let tail = opts.tail_len(seq.len());
    for x in &seq[seq.len() - tail..] {
        if (functional.evaluate(x)? - target).abs() > bound {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContinuityOptions {
    pub samples: usize,
    pub seed: u64,
}

impl Default for ContinuityOptions {
    fn default() -> Self {
        Self {
            samples: 200,
            seed: 42,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EpsilonWitness {
    pub epsilon: f64,
    pub delta: f64,
    pub max_deviation: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContinuityReport {
    pub norm: f64,
    pub witnesses: Vec<EpsilonWitness>,
}

impl ContinuityReport {
    pub fn passed(&self) -> bool {
        self.witnesses.iter().all(|w| w.passed)
    }
}

/// For each `ε`, exhibits `(e, δ) = (b, ε/‖T‖)` and checks by sampling the
/// slab `B_b(x₀, δ)` that `T` maps it into `(T(x₀) − ε, T(x₀) + ε)`.
pub fn check_epsilon_delta_continuity(
    functional: &BLinearFunctional,
    x0: &Vector,
    epsilons: &[f64],
    opts: &ContinuityOptions,
) -> Result<ContinuityReport> {
    functional.require_bounded()?;
    let center = functional.evaluate(x0)?;
    let norm = functional.norm()?;
    let space = functional.space();
    let anchor = functional.anchor();
    let basis = functional.domain().basis();
    let kernel = functional.domain_kernel();
    let mut witnesses = Vec::with_capacity(epsilons.len());
    for (idx, &epsilon) in epsilons.iter().enumerate() {
        if !(epsilon > 0.0) {
            return Err(Error::InvalidInput(format!("epsilon must be positive, got {epsilon}")));
        }
        let delta = if norm == 0.0 { 1.0 } else { epsilon / norm };
        let ball = Ball::open(x0.clone(), anchor.clone(), delta)?;
        let mut rng = sampling::rng(linalg::derive_seed(opts.seed, idx as u64));
        let mut max_deviation: f64 = 0.0;
        let mut passed = true;
        for _ in 0..opts.samples {
            let mut w = Vector::zeros(space.dim());
            for v in basis {
                w += v * rng.sample::<f64, _>(rand_distr::StandardNormal);
            }
            let pw = functional.seminorm().value(&w);
            if pw > 0.0 {
                w *= delta * rng.random_range(0.0..0.999) / pw;
            }
            // Slabs are unbounded along the kernel.
            for k in &kernel {
                w += k * rng.random_range(-1e3..1e3);
            }
            let x = x0 + &w;
            if !in_ball(space, &ball, &x)? {
                continue;
            }
            let dev = (functional.evaluate(&x)? - center).abs();
            max_deviation = max_deviation.max(dev);
            if dev >= epsilon {
                passed = false;
            }
        }
        witnesses.push(EpsilonWitness {
            epsilon,
            delta,
            max_deviation,
            passed,
        });
    }
    Ok(ContinuityReport { norm, witnesses })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{unit, vector};
    use approx::assert_relative_eq;

    fn r3() -> TwoNormSpace {
        TwoNormSpace::euclidean(3).unwrap()
    }

    #[test]
    fn evaluation_is_a_dot_product() {
        let t = BLinearFunctional::new(&r3(), &unit(3, 2), vector(&[2.0, 0.0, 0.0])).unwrap();
        assert_eq!(t.evaluate(&vector(&[1.0, 1.0, 1.0])).unwrap(), 2.0);
        assert!(t.evaluate(&vector(&[1.0, 1.0])).is_err());
    }

    #[test]
    fn evaluation_outside_domain_is_rejected() {
        let w = Subspace::new(3, vec![unit(3, 0)]).unwrap();
        let t = BLinearFunctional::on_subspace(&r3(), &unit(3, 2), vector(&[1.0, 0.0, 0.0]), w)
            .unwrap();
        assert_eq!(t.evaluate(&vector(&[-4.0, 0.0, 0.0])).unwrap(), -4.0);
        assert!(matches!(
            t.evaluate(&unit(3, 1)),
            Err(Error::NotInDomain { .. })
        ));
    }

    #[test]
    fn boundedness_is_kernel_vanishing() {
        let b = unit(3, 2);
        let ortho = BLinearFunctional::new(&r3(), &b, vector(&[1.0, -2.0, 0.0])).unwrap();
        assert!(ortho.is_bounded());
        let along = BLinearFunctional::new(&r3(), &b, vector(&[0.0, 0.0, 1.0])).unwrap();
        assert!(!along.is_bounded());
        assert!(matches!(
            along.functional_norm(NormMethod::Auto),
            Err(Error::Unbounded { .. })
        ));
        let zero = BLinearFunctional::new(&r3(), &b, vector(&[0.0, 0.0, 0.0])).unwrap();
        assert!(zero.is_bounded());
        // restricted away from b, any coefficients are bounded
        let w = Subspace::new(3, vec![unit(3, 0)]).unwrap();
        let t = BLinearFunctional::on_subspace(&r3(), &b, vector(&[1.0, 0.0, 5.0]), w).unwrap();
        assert!(t.is_bounded());
    }

    #[test]
    fn bounded_by_brute_force_ratio_sweep() {
        // c ⟂ b: sup |c·x| / ‖x, b‖ over random x stays below a fixed bound
        let b = vector(&[1.0, 1.0, 0.0]);
        let c = vector(&[1.0, -1.0, 3.0]);
        let t = BLinearFunctional::new(&r3(), &b, c.clone()).unwrap();
        assert!(t.is_bounded());
        let mut rng = sampling::rng(3);
        let mut worst: f64 = 0.0;
        for _ in 0..5000 {
            let x = sampling::normal_vector(&mut rng, 3);
            let p = r3().two_norm(&x, &b).unwrap();
            worst = worst.max(c.dot(&x).abs() / p);
        }
        // |c| / |b| for c ⟂ b in the Euclidean case
        assert!(worst <= c.norm() / b.norm() * (1.0 + 1e-12));
    }

    #[test]
    fn norm_fixtures() {
        // c ⟂ b: ‖T‖ = |c| / |b| = 5 / 2
        let t = BLinearFunctional::new(&r3(), &vector(&[0.0, 0.0, 2.0]), vector(&[3.0, 4.0, 0.0]))
            .unwrap();
        assert_relative_eq!(t.functional_norm(NormMethod::ClosedForm).unwrap(), 2.5, epsilon = 1e-12);
        assert_relative_eq!(t.functional_norm(NormMethod::Oracle).unwrap(), 2.5, max_relative = 1e-9);

        let zero = BLinearFunctional::new(&r3(), &unit(3, 0), vector(&[0.0, 0.0, 0.0])).unwrap();
        assert_eq!(zero.functional_norm(NormMethod::Oracle).unwrap(), 0.0);
        assert_eq!(zero.functional_norm(NormMethod::ClosedForm).unwrap(), 0.0);

        // ‖x, (0,1)‖ = |x₁| so ‖T‖ = 2
        let plane = TwoNormSpace::euclidean(2).unwrap();
        let t = BLinearFunctional::new(&plane, &unit(2, 1), vector(&[2.0, 0.0])).unwrap();
        assert_relative_eq!(t.functional_norm(NormMethod::ClosedForm).unwrap(), 2.0, epsilon = 1e-12);
        assert_relative_eq!(t.functional_norm(NormMethod::Oracle).unwrap(), 2.0, epsilon = 1e-12);
    }

    #[test]
    fn zero_domain_has_zero_norm() {
        let t = BLinearFunctional::on_subspace(
            &r3(),
            &unit(3, 2),
            vector(&[1.0, 2.0, 3.0]),
            Subspace::zero(3),
        )
        .unwrap();
        assert_eq!(t.functional_norm(NormMethod::Auto).unwrap(), 0.0);
    }

    #[test]
    fn with_norm_caches() {
        let t = BLinearFunctional::new(&r3(), &unit(3, 2), vector(&[3.0, 4.0, 0.0]))
            .unwrap()
            .with_norm()
            .unwrap();
        assert_relative_eq!(t.cached_norm().unwrap(), 5.0, epsilon = 1e-12);
        assert_relative_eq!(t.scaled(-2.0).norm().unwrap(), 10.0, epsilon = 1e-12);
    }

    #[test]
    fn four_formulas_agree_on_a_fixture() {
        let t = BLinearFunctional::new(&r3(), &vector(&[0.0, 0.0, 2.0]), vector(&[3.0, 4.0, 0.0]))
            .unwrap();
        let f = t.norm_formulas(&DirectionSearch::default()).unwrap();
        for v in f.values() {
            assert_relative_eq!(v, 2.5, max_relative = 1e-6);
        }
        assert!(f.spread() <= 1e-6);
    }

    #[test]
    fn lipschitz_fixtures() {
        let b = unit(3, 2);
        let t = BLinearFunctional::new(&r3(), &b, vector(&[1.0, 2.0, 0.0])).unwrap();
        let x = vector(&[0.3, -1.0, 2.0]);
        assert_eq!(t.lipschitz_residual(&x, &x).unwrap(), 0.0);
        // x − y ∈ span(b): both sides vanish
        let y = &x + &b * 4.5;
        assert!(t.lipschitz_residual(&x, &y).unwrap().abs() <= 1e-12);
        let unbounded = BLinearFunctional::new(&r3(), &b, vector(&[0.0, 0.0, 1.0])).unwrap();
        assert!(unbounded.lipschitz_residual(&x, &y).is_err());
    }

    #[test]
    fn sequential_continuity() {
        let b = unit(3, 2);
        let t = BLinearFunctional::new(&r3(), &b, vector(&[1.0, 2.0, 0.0])).unwrap();
        let x = vector(&[1.0, 1.0, 1.0]);
        let opts = ConvergenceOptions::with_tol(1e-3);
        let constant = vec![x.clone(); 10];
        assert!(check_b_sequential_continuity(&t, &constant, &x, &opts).unwrap());

        let v = vector(&[0.5, -3.0, 7.0]);
        let seq: Vec<_> = (1..=20_000).map(|n| &x + &v * (1.0 / n as f64)).collect();
        assert!(check_b_sequential_continuity(&t, &seq, &x, &opts).unwrap());

        let unbounded = BLinearFunctional::new(&r3(), &b, vector(&[0.0, 0.0, 1.0])).unwrap();
        let along_b: Vec<_> = (1..=10).map(|n| &x + &b * n as f64).collect();
        assert!(matches!(
            check_b_sequential_continuity(&unbounded, &along_b, &x, &opts),
            Err(Error::Unbounded { .. })
        ));
        let divergent: Vec<_> = (1..=10).map(|n| &x + unit(3, 0) * n as f64).collect();
        assert!(matches!(
            check_b_sequential_continuity(&t, &divergent, &x, &opts),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn epsilon_delta_witnesses() {
        let b = unit(3, 2);
        let zero = BLinearFunctional::new(&r3(), &b, vector(&[0.0, 0.0, 0.0])).unwrap();
        let x0 = vector(&[1.0, 2.0, 3.0]);
        let r = check_epsilon_delta_continuity(&zero, &x0, &[0.1, 1.0], &Default::default())
            .unwrap();
        assert!(r.passed());
        assert!(r.witnesses.iter().all(|w| w.delta == 1.0));

        // ‖T‖ = 2, ε = 0.5 → δ = 0.25
        let t = BLinearFunctional::new(&r3(), &b, vector(&[2.0, 0.0, 0.0])).unwrap();
        let r = check_epsilon_delta_continuity(&t, &x0, &[0.5], &Default::default()).unwrap();
        assert!(r.passed());
        assert_relative_eq!(r.witnesses[0].delta, 0.25, epsilon = 1e-12);
        assert!(r.witnesses[0].max_deviation < 0.5);

        // continuity at 0 propagates: same witnesses at 0 and at x0
        let at_zero =
            check_epsilon_delta_continuity(&t, &vector(&[0.0, 0.0, 0.0]), &[0.5], &Default::default())
                .unwrap();
        assert_eq!(at_zero.witnesses[0].delta, r.witnesses[0].delta);
    }
}
