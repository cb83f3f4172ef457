//! Sampled verification of the 2-norm axioms.
//!
//! * N1: `‖x, y‖ = 0` iff `x, y` are linearly dependent
//! * N2: `‖x, y‖ = ‖y, x‖`
//! * N3: `‖αx, y‖ = |α| ‖x, y‖`
//! * N4: `‖x, y + z‖ ≤ ‖x, y‖ + ‖x, z‖`
//!
//! Residuals are relative to [`TwoNormSpace::pair_scale`]. Failures are
//! reported, never raised.

use rand::Rng;
use serde::Serialize;

use crate::error::Result;
use crate::linalg::{self, Vector};
use crate::sampling::{self, normal_vector};
use crate::space::TwoNormSpace;
use crate::tolerance;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxiomConfig {
    pub samples: usize,
    pub seed: u64,
    /// Allowed relative residual.
    pub tol: f64,
    /// Singular-value ratio below which a pair counts as dependent.
    pub dependence_tol: f64,
}

impl Default for AxiomConfig {
    fn default() -> Self {
        Self {
            samples: 1000,
            seed: 42,
            tol: tolerance::AXIOM,
            dependence_tol: tolerance::DEPENDENCE,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxiomResult {
    pub id: &'static str,
    pub passed: bool,
    pub cases: usize,
    pub failures: usize,
    pub worst_residual: f64,
}

impl AxiomResult {
    fn new(id: &'static str) -> Self {
        Self {
            id,
            passed: true,
            cases: 0,
            failures: 0,
            worst_residual: 0.0,
        }
    }

    fn record(&mut self, residual: f64, ok: bool) {
        self.cases += 1;
        if residual.is_nan() {
            self.worst_residual = f64::INFINITY;
        } else {
            self.worst_residual = self.worst_residual.max(residual);
        }
        if !ok {
            self.failures += 1;
            self.passed = false;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxiomReport {
    pub dim: usize,
    pub samples: usize,
    pub seed: u64,
    pub axioms: Vec<AxiomResult>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.axioms.iter().all(|a| a.passed)
    }

    pub fn axiom(&self, id: &str) -> Option<&AxiomResult> {
        self.axioms.iter().find(|a| a.id == id)
    }
}

fn relative(value: f64, scale: f64) -> f64 {
    if scale == 0.0 {
        if value == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        value / scale
    }
}

/// Draws `samples` random triples and scalars plus `samples` constructed
/// dependent pairs and checks N1–N4 on each.
pub fn check_axioms(space: &TwoNormSpace, config: &AxiomConfig) -> AxiomReport {
    let n = space.dim();
    let mut rng = sampling::rng(config.seed);
    let mut n1 = AxiomResult::new("N1");
    let mut n2 = AxiomResult::new("N2");
    let mut n3 = AxiomResult::new("N3");
    let mut n4 = AxiomResult::new("N4");
    let norm = |x: &Vector, y: &Vector| space.two_norm_slices(x.as_slice(), y.as_slice());

    for _ in 0..config.samples {
        let x = normal_vector(&mut rng, n);
        let y = normal_vector(&mut rng, n);
        let z = normal_vector(&mut rng, n);
        let alpha: f64 = rng.random_range(-10.0..10.0);

        let xy = norm(&x, &y);
        let scale_xy = space.pair_scale(&x, &y);

        // N1 on a generic pair: the zero test must agree with the rank test.
        let dependent = linalg::dependent(x.as_slice(), y.as_slice(), config.dependence_tol);
        let r = relative(xy, scale_xy);
        let zero = r <= config.tol;
        n1.record(if dependent { r } else { 0.0 }, zero == dependent);

        let r2 = relative((xy - norm(&y, &x)).abs(), scale_xy);
        n2.record(r2, r2 <= config.tol);

        let scaled = norm(&(&x * alpha), &y);
        let r3 = relative((scaled - alpha.abs() * xy).abs(), alpha.abs() * scale_xy);
        n3.record(r3, r3 <= config.tol);

        let lhs = norm(&x, &(&y + &z));
        let rhs = xy + norm(&x, &z);
        let r4 = relative((lhs - rhs).max(0.0), scale_xy + space.pair_scale(&x, &z));
        n4.record(r4, r4 <= config.tol);
    }

    // N1 reverse direction on constructed dependent pairs.
    for k in 0..config.samples {
        let x = normal_vector(&mut rng, n);
        let lambda: f64 = if k % 10 == 0 {
            0.0
        } else {
            rng.random_range(-10.0..10.0)
        };
        let y = &x * lambda;
        let (x, y) = if k % 2 == 0 { (x, y) } else { (y, x) };
        let r = relative(norm(&x, &y), space.pair_scale(&x, &y));
        n1.record(r, r <= config.tol);
    }

    AxiomReport {
        dim: n,
        samples: config.samples,
        seed: config.seed,
        axioms: vec![n1, n2, n3, n4],
    }
}

/// `‖x − y, z‖ − |‖x, z‖ − ‖y, z‖|`, non-negative by the reverse triangle
/// inequality.
pub fn reverse_triangle_residual(
    space: &TwoNormSpace,
    x: &Vector,
    y: &Vector,
    z: &Vector,
) -> Result<f64> {
    let d = space.two_norm(&(x - y), z)?;
    let xz = space.two_norm(x, z)?;
    let yz = space.two_norm(y, z)?;
    Ok(d - (xz - yz).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::vector;
    use crate::sampling::indefinite_gram;
    use approx::assert_relative_eq;

    #[test]
    fn euclidean_space_passes() {
        let space = TwoNormSpace::euclidean(3).unwrap();
        let report = check_axioms(&space, &AxiomConfig::default());
        assert!(report.passed(), "{report:?}");
        for a in &report.axioms {
            assert!(a.worst_residual <= 1e-9, "{a:?}");
        }
        assert_eq!(report.axiom("N1").unwrap().cases, 2000);
    }

    #[test]
    fn homogeneity_spot_value() {
        let space = TwoNormSpace::euclidean(3).unwrap();
        let x = vector(&[1.0, 2.0, -1.0]);
        let y = vector(&[0.5, 0.0, 3.0]);
        let lhs = space.two_norm(&(&x * -2.0), &y).unwrap();
        let rhs = 2.0 * space.two_norm(&x, &y).unwrap();
        assert_relative_eq!(lhs, rhs, max_relative = 1e-15);
    }

    #[test]
    fn indefinite_gram_fails_n1() {
        let g = indefinite_gram(&mut sampling::rng(11), 3);
        let eig = g.clone().symmetric_eigen().eigenvalues;
        assert!(eig.iter().any(|l| *l < 0.0));
        let space = TwoNormSpace::gram_unchecked(g).unwrap();
        let report = check_axioms(&space, &AxiomConfig::default());
        assert!(!report.axiom("N1").unwrap().passed);
        assert!(!report.passed());
    }

    #[test]
    fn deterministic_under_seed() {
        let space = sampling::random_gram_space(&mut sampling::rng(5), 4);
        let cfg = AxiomConfig {
            samples: 200,
            seed: 9,
            ..Default::default()
        };
        assert_eq!(check_axioms(&space, &cfg), check_axioms(&space, &cfg));
    }

    #[test]
    fn reverse_triangle_spot_values() {
        let space = TwoNormSpace::euclidean(2).unwrap();
        let x = vector(&[1.0, 0.0]);
        let y = vector(&[0.0, 1.0]);
        // ‖x − y, z‖ = 1 and |1 − 0| = 1
        assert_eq!(reverse_triangle_residual(&space, &x, &y, &y).unwrap(), 0.0);
        let z = vector(&[2.0, -3.0]);
        assert_eq!(reverse_triangle_residual(&space, &x, &x, &z).unwrap(), 0.0);
    }

    #[test]
    fn reverse_triangle_sweep() {
        let mut rng = sampling::rng(1);
        let space = sampling::random_gram_space(&mut rng, 4);
        let mut min = f64::INFINITY;
        for _ in 0..1000 {
            let x = normal_vector(&mut rng, 4);
            let y = normal_vector(&mut rng, 4);
            let z = normal_vector(&mut rng, 4);
            min = min.min(reverse_triangle_residual(&space, &x, &y, &z).unwrap());
        }
        assert!(min >= -1e-12, "{min}");
    }
}
