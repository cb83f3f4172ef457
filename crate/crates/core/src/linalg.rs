//! Small dense linear-algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector};

use crate::tolerance;

pub type Vector = DVector<f64>;

/// Builds a vector from coordinates.
pub fn vector(coords: &[f64]) -> Vector {
    DVector::from_column_slice(coords)
}

/// The `i`-th standard basis vector of ℝⁿ.
pub fn unit(n: usize, i: usize) -> Vector {
    let mut e = DVector::zeros(n);
    e[i] = 1.0;
    e
}

pub fn standard_basis(n: usize) -> Vec<Vector> {
    (0..n).map(|i| unit(n, i)).collect()
}

/// Columns-as-vectors matrix, `n × k`.
pub fn columns(n: usize, vectors: &[Vector]) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(n, vectors.len());
    for (j, v) in vectors.iter().enumerate() {
        m.set_column(j, v);
    }
    m
}

/// Sum of squared 2×2 minors of `[u v]`, i.e. `|u|²|v|² − (u·v)²` without
/// the cancellation of the direct formula.
pub fn wedge_norm(u: &[f64], v: &[f64]) -> f64 {
    let mut acc = 0.0;
    for i in 0..u.len() {
        for j in (i + 1)..u.len() {
            let m = u[i] * v[j] - u[j] * v[i];
            acc += m * m;
        }
    }
    acc.sqrt()
}

/// Ratio `σ₂/σ₁` of the singular values of the `n × 2` matrix `[x y]`.
///
/// Returns 0 when both vectors vanish.
pub fn pair_rank_ratio(x: &[f64], y: &[f64]) -> f64 {
    let xx: f64 = x.iter().map(|a| a * a).sum();
    let yy: f64 = y.iter().map(|a| a * a).sum();
    let s = xx + yy;
    if s == 0.0 {
        return 0.0;
    }
    let d = wedge_norm(x, y);
    let disc = (s * s - 4.0 * d * d).max(0.0).sqrt();
    let s1 = ((s + disc) / 2.0).sqrt();
    // σ₁σ₂ = |x ∧ y|
    (d / s1) / s1
}

/// Linear dependence of a pair, judged by the singular-value ratio.
pub fn dependent(x: &[f64], y: &[f64], tol: f64) -> bool {
    pair_rank_ratio(x, y) <= tol
}

/// Numerical rank with relative threshold on the singular values.
pub fn rank(m: &DMatrix<f64>, tol: f64) -> usize {
    if m.ncols() == 0 || m.nrows() == 0 {
        return 0;
    }
    let sv = m.singular_values();
    let max = sv.iter().cloned().fold(0.0, f64::max);
    if max == 0.0 {
        return 0;
    }
    sv.iter().filter(|s| **s > tol * max).count()
}

/// Smallest-over-largest singular value ratio; 0 for an empty matrix.
pub fn conditioning(m: &DMatrix<f64>) -> f64 {
    if m.ncols() == 0 {
        return 1.0;
    }
    let sv = m.singular_values();
    let max = sv.iter().cloned().fold(0.0, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if max == 0.0 {
        0.0
    } else {
        min / max
    }
}

/// Moore–Penrose pseudoinverse of a symmetric positive semidefinite matrix,
/// dropping eigenvalues below `tol` times the largest.
pub fn psd_pseudo_inverse(a: &DMatrix<f64>, tol: f64) -> DMatrix<f64> {
    let n = a.nrows();
    if n == 0 {
        return DMatrix::zeros(0, 0);
    }
    let sym = (a + a.transpose()) * 0.5;
    let eig = sym.symmetric_eigen();
    let max = eig.eigenvalues.iter().cloned().fold(0.0, f64::max);
    let mut out = DMatrix::zeros(n, n);
    if max <= 0.0 {
        return out;
    }
    for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
        if lambda > tol * max {
            let q = eig.eigenvectors.column(k);
            out += (q * q.transpose()) / lambda;
        }
    }
    out
}

/// Minimum-norm least-squares solution of `m · z = rhs`.
pub fn least_squares(m: &DMatrix<f64>, rhs: &Vector) -> Vector {
    if m.ncols() == 0 {
        return DVector::zeros(0);
    }
    let svd = m.clone().svd(true, true);
    let max = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let eps = (tolerance::RANK * max).max(f64::MIN_POSITIVE);
    svd.solve(rhs, eps)
        .unwrap_or_else(|_| DVector::zeros(m.ncols()))
}

/// Orthonormal basis (Euclidean) of the null space of `m`.
pub fn null_space(m: &DMatrix<f64>, tol: f64) -> Vec<Vector> {
    let k = m.ncols();
    if k == 0 {
        return Vec::new();
    }
    // Pad to at least k rows so the full right singular basis is returned.
    let rows = m.nrows().max(k);
    let mut padded = DMatrix::zeros(rows, k);
    padded.view_mut((0, 0), (m.nrows(), k)).copy_from(m);
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let max = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let mut out = Vec::new();
    for (i, s) in svd.singular_values.iter().enumerate() {
        if max == 0.0 || *s <= tol * max {
            out.push(v_t.row(i).transpose());
        }
    }
    out
}

/// Residual of projecting `x` onto the column span of `m`.
pub fn span_residual(m: &DMatrix<f64>, x: &Vector) -> f64 {
    if m.ncols() == 0 {
        return x.norm();
    }
    let z = least_squares(m, x);
    (m * z - x).norm()
}

/// Merges `mixer` into a 64-bit seed (splitmix64 finaliser).
pub fn derive_seed(seed: u64, mixer: u64) -> u64 {
    let mut z = seed ^ mixer.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
