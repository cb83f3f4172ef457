//! Norm-preserving extension of bounded b-linear functionals, norming
//! functionals, and recovery of `‖x, b‖` from the dual.
//!
//! One step extends `T_W` from `W` to `W + span(x₀)` by
//! `T₀(x + t·x₀, b) = T_W(x, b) − tα` with `α ∈ [s, i]`, where
//!
//! ```text
//! s = sup_{x∈W} { T_W(x, b) − M‖x + x₀, b‖ },
//! i = inf_{x∈W} { T_W(x, b) + M‖x + x₀, b‖ }.
//! ```

use std::str::FromStr;
use std::sync::Arc;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{check_len, Error, Result};
use crate::functional::BLinearFunctional;
use crate::linalg::{self, columns, Vector};
use crate::optimize::{maximize_concave_from, ConcaveMax, ConcaveObjective, ConcaveOptions};
use crate::sampling;
use crate::seminorm::AnchoredSeminorm;
use crate::space::TwoNormSpace;
use crate::subspace::Subspace;
use crate::tolerance;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AlphaRule {
    #[default]
    Midpoint,
    Lower,
    Upper,
}

impl AlphaRule {
    pub fn pick(self, s: f64, i: f64) -> f64 {
        match self {
            AlphaRule::Midpoint => 0.5 * (s + i),
            AlphaRule::Lower => s,
            AlphaRule::Upper => i,
        }
    }
}

impl FromStr for AlphaRule {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "midpoint" => Ok(AlphaRule::Midpoint),
            "lower" => Ok(AlphaRule::Lower),
            "upper" => Ok(AlphaRule::Upper),
            other => Err(format!(
                "unknown alpha rule `{other}` (expected midpoint, lower or upper)"
            )),
        }
    }
}

/// The extension interval `[s, i]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    pub s: f64,
    pub i: f64,
    /// `s` is approached along a ray in `W`, not attained.
    pub s_asymptotic: bool,
    pub i_asymptotic: bool,
}

// a·u − M·p(Vu + x₀) on the quotient coordinates u.
struct EndpointObjective<'a> {
    seminorm: &'a AnchoredSeminorm,
    frame: &'a DMatrix<f64>,
    shift: &'a Vector,
    slope: Vector,
    weight: f64,
    eps: f64,
}

impl ConcaveObjective for EndpointObjective<'_> {
    fn dim(&self) -> usize {
        self.slope.len()
    }

    fn value(&self, u: &Vector) -> f64 {
        let y = self.frame * u + self.shift;
        self.slope.dot(u) - self.weight * self.seminorm.value(&y)
    }

    fn derivatives(&self, u: &Vector) -> (f64, Vector, DMatrix<f64>) {
        let y = self.frame * u + self.shift;
        let (p, g, h) = self.seminorm.smoothed(&y, self.eps);
        let vt = self.frame.transpose();
        (
            self.slope.dot(u) - self.weight * p,
            &self.slope - (&vt * g) * self.weight,
            -(&vt * h * self.frame) * self.weight,
        )
    }
}

/// Writes `x₀ = w + k` with `w ∈ W`, `k` in the seminorm kernel, if possible.
fn split_modulo_kernel(t: &BLinearFunctional, x0: &Vector) -> Option<Vector> {
    let kernel = t.seminorm().kernel_basis();
    let basis = t.domain().basis();
    let mut all: Vec<Vector> = basis.to_vec();
    all.extend(kernel.iter().cloned());
    let m = columns(x0.len(), &all);
    let z = linalg::least_squares(&m, x0);
    let residual = (&m * &z - x0).norm();
    if residual > tolerance::AXIOM * x0.norm() {
        return None;
    }
    let mut w = Vector::zeros(x0.len());
    for (j, v) in basis.iter().enumerate() {
        w += v * z[j];
    }
    Some(w)
}

fn check_bound(t: &BLinearFunctional, bound: f64) -> Result<f64> {
    if !(bound.is_finite() && bound >= 0.0) {
        return Err(Error::InvalidInput(format!(
            "extension bound must be non-negative, got {bound}"
        )));
    }
    let norm = t.norm()?;
    if bound < norm - tolerance::NORM * norm.max(1.0) {
        return Err(Error::Infeasible { bound, norm });
    }
    Ok(norm)
}

/// `(s, i)` for extending `T_W` to `W + span(x₀)` under the bound `M`.
pub fn interval(t: &BLinearFunctional, x0: &Vector, bound: f64) -> Result<Interval> {
    t.space().check_vector(x0)?;
    t.require_bounded()?;
    if t.domain().is_full() || t.domain().contains(x0) {
        return Err(Error::AlreadyInDomain);
    }
    check_bound(t, bound)?;
    let seminorm = t.seminorm();
    let rho = seminorm.value(x0);
    let exact = |s: f64, i: f64| Interval {
        s,
        i,
        s_asymptotic: false,
        i_asymptotic: false,
    };

    if let Some(w) = split_modulo_kernel(t, x0) {
        // ‖x + x₀, b‖ = ‖x + w, b‖, so both endpoints equal −T_W(w).
        let value = -t.coeffs().dot(&w);
        return Ok(exact(value, value));
    }
    let frame = t.quotient_frame();
    if frame.is_empty() {
        return Ok(exact(-bound * rho, bound * rho));
    }
    if bound == 0.0 {
        return Ok(exact(0.0, 0.0));
    }

    let m = columns(x0.len(), &frame);
    let a = m.transpose() * t.coeffs();
    let opts = ConcaveOptions {
        initial_radius: rho,
        radius_cap: tolerance::RADIUS_CAP * rho,
        improvement_tol: tolerance::IMPROVEMENT * bound * rho,
        decrement_tol: 1e-15 * bound * rho,
        ..ConcaveOptions::default()
    };
    // A direct solve with fine smoothing, and a continuation from coarse
    // smoothing that carries the iterate past the kinks of product
    // seminorms. Both report unsmoothed values, so the larger one wins.
    let solve = |slope: Vector| {
        let objective = |eps: f64| EndpointObjective {
            seminorm,
            frame: &m,
            shift: x0,
            slope: slope.clone(),
            weight: bound,
            eps: eps * rho,
        };
        let direct = maximize_concave_from(&objective(1e-10), &opts, Vector::zeros(m.ncols()));
        let mut point = Vector::zeros(m.ncols());
        let mut continued = None::<ConcaveMax>;
        for eps in [1e-2, 1e-4, 1e-6, 1e-8, 1e-10] {
            let next = maximize_concave_from(&objective(eps), &opts, point);
            point = next.point.clone();
            continued = Some(next);
        }
        match continued {
            Some(c) if c.value > direct.value + tolerance::INTERVAL * bound * rho => c,
            _ => direct,
        }
    };
    // Far out along an escape ray the objective is dominated by
    // (a·d − M‖Vd, b‖)|u|, so rounding in M is amplified by the radius. The
    // endpoint is re-read with M raised to the ratio attained on that ray.
    let endpoint = |slope: &Vector, point: &Vector, value: f64| {
        let y = &m * point;
        let p = seminorm.value(&y);
        if p == 0.0 {
            return value;
        }
        let ratio = slope.dot(point) / p;
        if ratio > bound {
            slope.dot(point) - ratio * seminorm.value(&(y + x0))
        } else {
            value
        }
    };
    let upper = solve(a.clone());
    let lower = solve(-&a);
    let s = endpoint(&a, &upper.point, upper.value);
    let i = -endpoint(&(-&a), &lower.point, lower.value);
    let slack = tolerance::INTERVAL * (bound * rho).max(1.0);
    if s > i + slack {
        return Err(Error::EmptyInterval { lower: s, upper: i });
    }
    Ok(Interval {
        s,
        i,
        s_asymptotic: upper.asymptotic,
        i_asymptotic: lower.asymptotic,
    })
}

/// One recorded extension step.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtensionStep {
    pub adjoined: Vec<f64>,
    pub s: f64,
    pub i: f64,
    pub alpha: f64,
    pub norm_after: f64,
    pub s_asymptotic: bool,
    pub i_asymptotic: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtensionTrace {
    pub initial_norm: f64,
    pub steps: Vec<ExtensionStep>,
}

impl ExtensionTrace {
    pub fn final_norm(&self) -> f64 {
        self.steps.last().map_or(self.initial_norm, |s| s.norm_after)
    }

    /// Largest relative deviation of `norm_after` from the initial norm.
    pub fn norm_drift(&self) -> f64 {
        let scale = self.initial_norm.max(f64::MIN_POSITIVE);
        self.steps
            .iter()
            .map(|s| (s.norm_after - self.initial_norm).abs())
            .fold(0.0, f64::max)
            / if self.initial_norm > 0.0 { scale } else { 1.0 }
    }

    pub fn norm_preserved(&self, tol: f64) -> bool {
        self.norm_drift() <= tol
    }
}

/// The functional `x + t·x₀ ↦ T_W(x) − tα` on `W + span(x₀)`.
fn adjoin_value(t: &BLinearFunctional, x0: &Vector, alpha: f64) -> Result<BLinearFunctional> {
    let domain = t.domain().adjoin(x0)?;
    let mut values: Vec<f64> = t.domain().basis().iter().map(|v| t.coeffs().dot(v)).collect();
    values.push(-alpha);
    let m = domain.matrix().transpose();
    let coeffs = linalg::least_squares(&m, &Vector::from_vec(values));
    let domain = if domain.is_full() {
        Subspace::full(domain.ambient_dim())
    } else {
        domain
    };
    Ok(BLinearFunctional::from_parts(
        Arc::clone(t.seminorm_arc()),
        coeffs,
        domain,
    ))
}

fn step(
    t: &BLinearFunctional,
    x0: &Vector,
    bound: f64,
    rule: AlphaRule,
) -> Result<(BLinearFunctional, Interval, f64)> {
    let iv = interval(t, x0, bound)?;
    let alpha = rule.pick(iv.s, iv.i);
    Ok((adjoin_value(t, x0, alpha)?, iv, alpha))
}

/// Extends `T_W` to `W + span(x₀)` with `α` chosen by `rule` from `[s, i]`.
pub fn extend_one_step(
    t: &BLinearFunctional,
    x0: &Vector,
    bound: f64,
    rule: AlphaRule,
) -> Result<BLinearFunctional> {
    step(t, x0, bound, rule).map(|(f, _, _)| f)
}

/// Orthogonal completion of `domain` against the standard basis.
pub fn default_completion(domain: &Subspace) -> Vec<Vector> {
    let n = domain.ambient_dim();
    let mut ortho: Vec<Vector> = Vec::new();
    for v in domain.basis() {
        let mut w = v.clone();
        for _ in 0..2 {
            for o in &ortho {
                let p = o.dot(&w);
                w -= o * p;
            }
        }
        let norm = w.norm();
        if norm > 0.0 {
            ortho.push(w / norm);
        }
    }
    let mut out = Vec::new();
    for e in linalg::standard_basis(n) {
        if ortho.len() == n {
            break;
        }
        let mut w = e;
        for _ in 0..2 {
            for o in &ortho {
                let p = o.dot(&w);
                w -= o * p;
            }
        }
        let norm = w.norm();
        if norm > 1e-8 {
            let w = w / norm;
            ortho.push(w.clone());
            out.push(w);
        }
    }
    out
}

/// Extends `T_W` to the whole space, holding `M = ‖T_W‖` at every step.
///
/// `completion` defaults to [`default_completion`]. A completion that spans
/// the space only modulo the seminorm kernel is closed off with kernel
/// vectors, on which the extension is forced to vanish.
pub fn extend_full(
    t: &BLinearFunctional,
    completion: Option<&[Vector]>,
    rule: AlphaRule,
) -> Result<(BLinearFunctional, ExtensionTrace)> {
    t.require_bounded()?;
    let n = t.space().dim();
    let bound = t.norm()?;
    let mut trace = ExtensionTrace {
        initial_norm: bound,
        steps: Vec::new(),
    };
    if t.domain().is_full() {
        let mut out = t.clone();
        if t.cached_norm().is_none() {
            out = out.with_norm()?;
        }
        return Ok((out, trace));
    }
    let order: Vec<Vector> = match completion {
        Some(c) => c.to_vec(),
        None => default_completion(t.domain()),
    };

    let mut current = t.clone();
    let mut push = |current: &mut BLinearFunctional, x0: &Vector| -> Result<()> {
        let (next, iv, alpha) = step(current, x0, bound, rule)?;
        let next = next.with_norm()?;
        trace.steps.push(ExtensionStep {
            adjoined: x0.iter().cloned().collect(),
            s: iv.s,
            i: iv.i,
            alpha,
            norm_after: next.cached_norm().unwrap_or(f64::NAN),
            s_asymptotic: iv.s_asymptotic,
            i_asymptotic: iv.i_asymptotic,
        });
        *current = next;
        Ok(())
    };
    for (idx, x0) in order.iter().enumerate() {
        check_len(n, x0.len())?;
        if current.domain().is_full() || current.domain().relative_residual(x0) <= tolerance::RANK.sqrt() {
            return Err(Error::InvalidCompletion(format!(
                "completion vector {idx} already lies in the current domain"
            )));
        }
        push(&mut current, x0)?;
    }
    for k in t.seminorm().kernel_basis() {
        if current.domain().is_full() {
            break;
        }
        if current.domain().relative_residual(&k) > tolerance::RANK.sqrt() {
            push(&mut current, &k)?;
        }
    }
    if !current.domain().is_full() {
        return Err(Error::InvalidCompletion(format!(
            "completion spans {} of {n} dimensions",
            current.domain().dim()
        )));
    }
    Ok((current, trace))
}

/// `T` with `T(x₀, b) = ‖x₀, b‖` and `‖T‖ = 1`, built on `span(x₀)` and
/// extended to the whole space.
pub fn norming_functional(
    space: &TwoNormSpace,
    x0: &Vector,
    anchor: &Vector,
) -> Result<BLinearFunctional> {
    let (f, _) = norming_functional_traced(space, x0, anchor)?;
    Ok(f)
}

pub fn norming_functional_traced(
    space: &TwoNormSpace,
    x0: &Vector,
    anchor: &Vector,
) -> Result<(BLinearFunctional, ExtensionTrace)> {
    let value = space.two_norm(x0, anchor)?;
    if value <= tolerance::AXIOM * space.pair_scale(x0, anchor)
        || linalg::dependent(x0.as_slice(), anchor.as_slice(), tolerance::DEPENDENCE)
    {
        return Err(Error::Degenerate(
            "x0 depends on b, so ‖x0, b‖ = 0 and no norming functional exists".into(),
        ));
    }
    let domain = Subspace::new(space.dim(), vec![x0.clone()])?;
    let coeffs = x0 * (value / x0.norm_squared());
    let t = BLinearFunctional::on_subspace(space, anchor, coeffs, domain)?;
    extend_full(&t, None, AlphaRule::Midpoint)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Recovery {
    pub value: f64,
    pub two_norm: f64,
    pub norming_ratio: f64,
    pub sampled_ratios: Vec<f64>,
}

impl Recovery {
    pub fn max_sampled_ratio(&self) -> f64 {
        self.sampled_ratios.iter().cloned().fold(0.0, f64::max)
    }
}

/// `sup |T(x, b)| / ‖T‖` over the norming functional of `x` and `trials`
/// random bounded functionals.
pub fn recover_two_norm(
    space: &TwoNormSpace,
    x: &Vector,
    anchor: &Vector,
    trials: usize,
    seed: u64,
) -> Result<f64> {
    recover_two_norm_detailed(space, x, anchor, trials, seed).map(|r| r.value)
}

pub fn recover_two_norm_detailed(
    space: &TwoNormSpace,
    x: &Vector,
    anchor: &Vector,
    trials: usize,
    seed: u64,
) -> Result<Recovery> {
    if trials == 0 {
        return Err(Error::InvalidInput("trials must be at least 1".into()));
    }
    let two_norm = space.two_norm(x, anchor)?;
    let seminorm = AnchoredSeminorm::new(space, anchor)?;
    if two_norm <= tolerance::AXIOM * space.pair_scale(x, anchor)
        || linalg::dependent(x.as_slice(), anchor.as_slice(), tolerance::DEPENDENCE)
    {
        return Ok(Recovery {
            value: 0.0,
            two_norm,
            norming_ratio: 0.0,
            sampled_ratios: Vec::new(),
        });
    }
    let norming = norming_functional(space, x, anchor)?;
    let norming_ratio = norming.evaluate(x)?.abs() / norming.norm()?;
    let seminorm = Arc::new(seminorm);
    let mut rng = sampling::rng(seed);
    let mut sampled_ratios = Vec::with_capacity(trials);
    for _ in 0..trials {
        let c = sampling::bounded_coeffs(&mut rng, &seminorm);
        let t = BLinearFunctional::from_parts(seminorm.clone(), c, Subspace::full(space.dim()));
        let norm = t.norm()?;
        if norm > 0.0 {
            sampled_ratios.push(t.coeffs().dot(x).abs() / norm);
        }
    }
    let value = sampled_ratios
        .iter()
        .cloned()
        .fold(norming_ratio, f64::max);
    Ok(Recovery {
        value,
        two_norm,
        norming_ratio,
        sampled_ratios,
    })
}
