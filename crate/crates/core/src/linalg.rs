//! Dense helpers shared by the exact-computation modules.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// `Σ_x w(x) a(x) b(x)`.
pub(crate) fn weighted_dot(w: &DVector<f64>, a: &DVector<f64>, b: &DVector<f64>) -> f64 {
    w.iter()
        .zip(a.iter())
        .zip(b.iter())
        .map(|((w, a), b)| w * a * b)
        .sum()
}

/// Solves `m x = rhs` by LU with partial pivoting and checks the residual
/// against `1e-10 · ‖rhs‖` (plus a floor for a zero right-hand side).
pub(crate) fn solve(m: &DMatrix<f64>, rhs: &DVector<f64>, what: &'static str) -> Result<DVector<f64>> {
    let lu = m.clone().lu();
    let x = lu.solve(rhs).ok_or(Error::Singular(what))?;
    let residual = (m * &x - rhs).norm();
    if !residual.is_finite() || residual > 1e-10 * rhs.norm().max(1e-300) + 1e-14 {
        return Err(Error::Singular(what));
    }
    Ok(x)
}

/// `D^{1/2} M D^{-1/2}` symmetrised, for a matrix `M` that is self-adjoint in
/// the `w`-weighted inner product.
pub(crate) fn weighted_symmetrize(m: &DMatrix<f64>, w: &DVector<f64>) -> DMatrix<f64> {
    let n = m.nrows();
    let sq: Vec<f64> = w.iter().map(|v| v.sqrt()).collect();
    let s = DMatrix::from_fn(n, n, |i, j| sq[i] * m[(i, j)] / sq[j]);
    (&s + s.transpose()) * 0.5
}

/// Largest deviation of `D M` from symmetry, relative to `max |D M|`.
pub(crate) fn weighted_asymmetry(m: &DMatrix<f64>, w: &DVector<f64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    let mut scale = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let a = w[i] * m[(i, j)];
            let b = w[j] * m[(j, i)];
            worst = worst.max((a - b).abs());
            scale = scale.max(a.abs());
        }
    }
    if scale == 0.0 {
        0.0
    } else {
        worst / scale
    }
}

/// Eigenvalues (ascending) of a `w`-self-adjoint matrix.
pub(crate) fn weighted_eigenvalues(m: &DMatrix<f64>, w: &DVector<f64>) -> Vec<f64> {
    let mut ev: Vec<f64> = weighted_symmetrize(m, w)
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Spectral radius of a general square matrix.
pub(crate) fn spectral_radius(m: &DMatrix<f64>) -> f64 {
    if m.nrows() == 0 {
        return 0.0;
    }
    m.clone()
        .complex_eigenvalues()
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

/// Adjoint of `m` in the `w`-weighted inner product: `D^{-1} Mᵀ D`.
pub(crate) fn weighted_adjoint(m: &DMatrix<f64>, w: &DVector<f64>) -> DMatrix<f64> {
    let n = m.nrows();
    DMatrix::from_fn(n, n, |i, j| m[(j, i)] * w[j] / w[i])
}

/// Solves `(I − K) x = rhs` on functions centred under `pi`, for a
/// `pi`-invariant `K` whose restriction to centred functions has no
/// eigenvalue 1. The rank-one term `1 πᵀ` removes the constant direction.
pub(crate) fn solve_centered(k: &DMatrix<f64>, pi: &DVector<f64>, rhs: &DVector<f64>) -> Result<DVector<f64>> {
    let n = k.nrows();
    let m = DMatrix::from_fn(n, n, |i, j| {
        let id = if i == j { 1.0 } else { 0.0 };
        id - k[(i, j)] + pi[j]
    });
    solve(&m, rhs, "deflated (I - K) on centred functions")
}
