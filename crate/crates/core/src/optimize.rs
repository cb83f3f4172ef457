//! Numerical maximisers.
//!
//! [`maximize_on_sphere`] is a derivative-free direction search (random
//! sampling followed by a pattern search with randomised poll directions).
//! [`maximize_concave`] is a trust-region Newton method for smooth concave
//! objectives on ℝᵏ whose supremum may only be approached at infinity.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::linalg::Vector;
use crate::sampling;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectionSearch {
    /// Total number of objective evaluations.
    pub budget: usize,
    pub seed: u64,
}

impl Default for DirectionSearch {
    fn default() -> Self {
        Self {
            budget: crate::tolerance::ORACLE_BUDGET,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DirectionMax {
    pub value: f64,
    pub direction: Vector,
    pub evaluations: usize,
}

fn normalized(v: Vector) -> Option<Vector> {
    let n = v.norm();
    (n > 0.0 && n.is_finite()).then(|| v / n)
}

/// Maximises `f` over the unit sphere of ℝᵏ (`k ≥ 1`).
pub fn maximize_on_sphere<F>(
    k: usize,
    mut f: F,
    search: &DirectionSearch,
    start: Option<&Vector>,
) -> DirectionMax
where
    F: FnMut(&Vector) -> f64,
{
    assert!(k >= 1, "sphere dimension must be positive");
    let mut evaluations = 0usize;
    let mut eval = |v: &Vector, evaluations: &mut usize| {
        *evaluations += 1;
        let value = f(v);
        if value.is_nan() {
            f64::NEG_INFINITY
        } else {
            value
        }
    };

    let mut best = DVector::zeros(k);
    best[0] = 1.0;
    let mut best_value = eval(&best, &mut evaluations);
    let mut consider = |v: Vector, best: &mut Vector, best_value: &mut f64, evals: &mut usize| {
        let value = eval(&v, evals);
        if value > *best_value {
            *best_value = value;
            *best = v;
        }
    };

    if let Some(s) = start.and_then(|s| normalized(s.clone())) {
        consider(s, &mut best, &mut best_value, &mut evaluations);
    }
    for i in 0..k {
        for sign in [1.0, -1.0] {
            let mut e = DVector::zeros(k);
            e[i] = sign;
            consider(e, &mut best, &mut best_value, &mut evaluations);
        }
    }
    if k == 1 {
        return DirectionMax {
            value: best_value,
            direction: best,
            evaluations,
        };
    }

    let mut rng = sampling::rng(search.seed);
    let sample_count = (search.budget / 4).max(2 * k);
    while evaluations < sample_count {
        let v = Vector::from_fn(k, |_, _| rng.sample(StandardNormal));
        if let Some(v) = normalized(v) {
            consider(v, &mut best, &mut best_value, &mut evaluations);
        }
    }

    let mut step = 0.5;
    while step > 1e-13 && evaluations < search.budget {
        let mut improved = false;
        'poll: for round in 0..2 {
            let directions: Vec<Vector> = if round == 0 {
                (0..k)
                    .map(|i| {
                        let mut e = DVector::zeros(k);
                        e[i] = 1.0;
                        e
                    })
                    .collect()
            } else {
                (0..k)
                    .filter_map(|_| normalized(Vector::from_fn(k, |_, _| rng.sample(StandardNormal))))
                    .collect()
            };
            for d in directions {
                for sign in [1.0, -1.0] {
                    if evaluations >= search.budget {
                        break 'poll;
                    }
                    if let Some(cand) = normalized(&best + &d * (sign * step)) {
                        let value = eval(&cand, &mut evaluations);
                        if value > best_value {
                            best_value = value;
                            best = cand;
                            improved = true;
                        }
                    }
                }
            }
            if improved {
                break;
            }
        }
        if !improved {
            step *= 0.5;
        }
    }

    DirectionMax {
        value: best_value,
        direction: best,
        evaluations,
    }
}

/// A concave objective with a smooth surrogate used for the Newton model.
pub trait ConcaveObjective {
    fn dim(&self) -> usize;
    /// Exact objective value.
    fn value(&self, u: &Vector) -> f64;
    /// Smoothed value, gradient and (negative semidefinite) Hessian.
    fn derivatives(&self, u: &Vector) -> (f64, Vector, DMatrix<f64>);
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConcaveOptions {
    pub initial_radius: f64,
    /// Largest admissible `|u|`.
    pub radius_cap: f64,
    /// Stop once a radius doubling gains less than this.
    pub improvement_tol: f64,
    /// Stop once an interior Newton step predicts less gain than this.
    pub decrement_tol: f64,
    pub max_iter: usize,
}

impl Default for ConcaveOptions {
    fn default() -> Self {
        Self {
            initial_radius: 1.0,
            radius_cap: crate::tolerance::RADIUS_CAP,
            improvement_tol: crate::tolerance::IMPROVEMENT,
            decrement_tol: 1e-15,
            max_iter: 1000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConcaveMax {
    pub value: f64,
    pub point: Vector,
    /// The supremum is approached along a ray rather than attained.
    pub asymptotic: bool,
    pub iterations: usize,
}

/// Minimiser of `gᵀs + ½ sᵀHs` over `|s| ≤ radius` for positive
/// semidefinite `H`.
fn trust_region_step(g: &Vector, h: &DMatrix<f64>, radius: f64) -> Vector {
    let k = g.len();
    let eig = ((h + h.transpose()) * 0.5).symmetric_eigen();
    let lambda: Vec<f64> = eig.eigenvalues.iter().map(|l| l.max(0.0)).collect();
    let gh: Vec<f64> = (0..k).map(|i| eig.eigenvectors.column(i).dot(g)).collect();
    let lmax = lambda.iter().cloned().fold(0.0, f64::max);
    let step_norm = |mu: f64| -> f64 {
        gh.iter()
            .zip(&lambda)
            .map(|(gi, li)| {
                let d = li + mu;
                if d > 0.0 {
                    (gi / d).powi(2)
                } else if *gi == 0.0 {
                    0.0
                } else {
                    f64::INFINITY
                }
            })
            .sum::<f64>()
            .sqrt()
    };
    let build = |mu: f64| -> Vector {
        let mut s = DVector::zeros(k);
        for i in 0..k {
            let d = lambda[i] + mu;
            if d > 0.0 {
                s -= eig.eigenvectors.column(i) * (gh[i] / d);
            }
        }
        s
    };
    // Interior Newton step when the model is bounded and the step fits.
    let newton_ok = lambda
        .iter()
        .zip(&gh)
        .all(|(l, gi)| *l > 1e-14 * lmax.max(f64::MIN_POSITIVE) || gi.abs() == 0.0);
    if newton_ok && step_norm(0.0) <= radius {
        return build(0.0);
    }
    let mut lo = 0.0;
    let mut hi = g.norm() / radius;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if step_norm(mid) > radius {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    build(hi)
}

/// Maximises a concave objective from the origin with trust-region Newton
/// steps whose radius doubles while steps keep hitting the boundary.
pub fn maximize_concave<O: ConcaveObjective>(obj: &O, opts: &ConcaveOptions) -> ConcaveMax {
    maximize_concave_from(obj, opts, DVector::zeros(obj.dim()))
}

/// [`maximize_concave`] started at `start` instead of the origin.
pub fn maximize_concave_from<O: ConcaveObjective>(
    obj: &O,
    opts: &ConcaveOptions,
    start: Vector,
) -> ConcaveMax {
    let k = obj.dim();
    assert_eq!(start.len(), k, "start point has the wrong dimension");
    let mut u = start;
    if k == 0 {
        return ConcaveMax {
            value: obj.value(&u),
            point: u,
            asymptotic: false,
            iterations: 0,
        };
    }
    let mut radius = opts.initial_radius;
    let (mut fs, mut grad, mut hess) = obj.derivatives(&u);
    let mut iterations = 0;
    let mut outward = false;
    while iterations < opts.max_iter {
        iterations += 1;
        if grad.iter().all(|g| *g == 0.0) {
            break;
        }
        let g = -&grad;
        let h = -&hess;
        let mut s = trust_region_step(&g, &h, radius);
        let predicted = -(g.dot(&s) + 0.5 * s.dot(&(&h * &s)));
        if !(predicted > 0.0) || (s.norm() < 0.999 * radius && predicted <= opts.decrement_tol) {
            break;
        }
        let mut candidate = &u + &s;
        let at_cap = candidate.norm() > opts.radius_cap;
        if at_cap {
            candidate *= opts.radius_cap / candidate.norm();
            s = &candidate - &u;
        }
        let (fs_new, grad_new, hess_new) = obj.derivatives(&candidate);
        let actual = fs_new - fs;
        if at_cap {
            if actual >= 0.0 {
                u = candidate;
            }
            outward = true;
            break;
        }
        let rho = actual / predicted;
        let on_boundary = s.norm() >= 0.999 * radius;
        if rho > 1e-4 && actual >= 0.0 {
            u = candidate;
            fs = fs_new;
            grad = grad_new;
            hess = hess_new;
            outward = on_boundary;
            if on_boundary {
                if actual < opts.improvement_tol {
                    break;
                }
                if rho > 0.5 {
                    radius = (2.0 * radius).min(opts.radius_cap);
                }
            } else if actual < opts.improvement_tol * 1e-3 {
                break;
            }
        } else {
            // Gains lost in rounding: nothing left to resolve.
            if predicted < opts.improvement_tol && actual.abs() < opts.improvement_tol {
                break;
            }
            radius = 0.25 * s.norm();
            if radius <= 1e-15 * (1.0 + u.norm()) {
                break;
            }
        }
    }
    ConcaveMax {
        value: obj.value(&u),
        asymptotic: outward && u.norm() >= 1e3 * opts.initial_radius,
        point: u,
        iterations,
    }
}
