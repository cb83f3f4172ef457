//! Seeded generators for random spaces, vectors and functionals.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{self, Vector};
use crate::seminorm::AnchoredSeminorm;
use crate::space::TwoNormSpace;
use crate::subspace::Subspace;

pub type SampleRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Vector with independent standard normal coordinates.
pub fn normal_vector(rng: &mut SampleRng, n: usize) -> Vector {
    Vector::from_fn(n, |_, _| rng.sample(StandardNormal))
}

fn normal_matrix(rng: &mut SampleRng, n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, n, |_, _| rng.sample(StandardNormal))
}

/// Random symmetric positive-definite matrix `A Aᵀ / n + I / 4`.
pub fn random_spd(rng: &mut SampleRng, n: usize) -> DMatrix<f64> {
    let a = normal_matrix(rng, n);
    let g = &a * a.transpose() / n as f64 + DMatrix::identity(n, n) * 0.25;
    (&g + g.transpose()) * 0.5
}

pub fn random_gram_space(rng: &mut SampleRng, n: usize) -> TwoNormSpace {
    TwoNormSpace::gram(random_spd(rng, n)).expect("random SPD matrix is valid")
}

/// Symmetric matrix with exactly one negative eigenvalue.
pub fn indefinite_gram(rng: &mut SampleRng, n: usize) -> DMatrix<f64> {
    let q = normal_matrix(rng, n).qr().q();
    let mut eig = Vector::from_fn(n, |_, _| rng.random_range(0.5..2.0));
    eig[0] = -1.0;
    let g = &q * DMatrix::from_diagonal(&eig) * q.transpose();
    (&g + g.transpose()) * 0.5
}

/// Random coefficient vector annihilating the kernel of `‖·, b‖`, hence
/// defining a bounded functional on the whole space.
///
/// A draw that lands almost inside the kernel is redrawn, since its
/// projection would be rounding noise.
pub fn bounded_coeffs(rng: &mut SampleRng, seminorm: &AnchoredSeminorm) -> Vector {
    let kernel = seminorm.kernel_basis();
    if kernel.len() >= seminorm.dim() {
        return Vector::zeros(seminorm.dim());
    }
    loop {
        let raw = normal_vector(rng, seminorm.dim());
        let mut c = raw.clone();
        for k in &kernel {
            let proj = c.dot(k);
            c -= k * proj;
        }
        if c.norm() > 1e-6 * raw.norm() {
            return c;
        }
    }
}

/// Random `k`-dimensional subspace of ℝⁿ with a well-conditioned basis.
pub fn random_subspace(rng: &mut SampleRng, n: usize, k: usize) -> Subspace {
    loop {
        let basis: Vec<Vector> = (0..k).map(|_| normal_vector(rng, n)).collect();
        let m = linalg::columns(n, &basis);
        if linalg::conditioning(&m) > 1e-3 {
            return Subspace::new(n, basis).expect("independent basis");
        }
    }
}

/// Random vector linearly independent of `anchor`.
pub fn independent_of(rng: &mut SampleRng, anchor: &Vector) -> Vector {
    loop {
        let x = normal_vector(rng, anchor.len());
        if linalg::pair_rank_ratio(x.as_slice(), anchor.as_slice()) > 1e-3 {
            return x;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_generation_is_reproducible() {
        let a = random_spd(&mut rng(7), 4);
        let b = random_spd(&mut rng(7), 4);
        assert_eq!(a, b);
    }

    #[test]
    fn indefinite_gram_has_one_negative_eigenvalue() {
        let g = indefinite_gram(&mut rng(3), 4);
        let eig = g.symmetric_eigen().eigenvalues;
        assert_eq!(eig.iter().filter(|l| **l < 0.0).count(), 1);
    }
}
