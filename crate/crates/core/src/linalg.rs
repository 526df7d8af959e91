//! Small Hermitian linear-algebra helpers on top of nalgebra.

use nalgebra::SymmetricEigen;

use crate::error::{Error, Result};
use crate::{CMatrix, CVector, C64};

/// Eigenvalues below this (in absolute terms) are treated as rounding noise
/// of a PSD matrix and clamped to zero.
pub const PSD_CLAMP: f64 = 1e-10;

/// Largest entrywise deviation from Hermitian symmetry.
pub fn hermitian_defect(a: &CMatrix) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..a.nrows() {
        for j in i..a.ncols() {
            worst = worst.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    worst
}

fn check_hermitian(a: &CMatrix) -> Result<()> {
    if !a.is_square() {
        return Err(Error::dim(format!(
            "expected a square matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    let scale = a.iter().fold(1.0f64, |m, z| m.max(z.norm()));
    let defect = hermitian_defect(a);
    if defect > 1e-10 * scale {
        return Err(Error::invalid(format!(
            "matrix is not Hermitian (defect {defect:e})"
        )));
    }
    Ok(())
}

/// Symmetrized copy, removing rounding asymmetry before an eigensolve.
fn symmetrize(a: &CMatrix) -> CMatrix {
    (a + a.adjoint()) * C64::new(0.5, 0.0)
}

/// Eigenpairs of a Hermitian matrix, sorted by descending eigenvalue.
pub fn hermitian_eigen(a: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    check_hermitian(a)?;
    let eig = SymmetricEigen::new(symmetrize(a));
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(a.nrows(), order.len(), |r, c| eig.eigenvectors[(r, order[c])]);
    Ok((values, vectors))
}

/// Apply a real function to the spectrum of a Hermitian PSD matrix.
fn psd_function(a: &CMatrix, f: impl Fn(f64) -> f64) -> Result<CMatrix> {
    let (values, vectors) = hermitian_eigen(a)?;
    let scale = values.first().copied().unwrap_or(0.0).abs().max(1.0);
    if let Some(&min) = values.last() {
        if min < -PSD_CLAMP * scale {
            return Err(Error::invalid(format!(
                "matrix is not positive semidefinite (min eigenvalue {min:e})"
            )));
        }
    }
    let n = a.nrows();
    let mut out = CMatrix::zeros(n, n);
    for (k, &lam) in values.iter().enumerate() {
        let w = f(lam.max(0.0));
        if w == 0.0 {
            continue;
        }
        let u = vectors.column(k);
        out += (&u * u.adjoint()) * C64::new(w, 0.0);
    }
    Ok(symmetrize(&out))
}

/// Hermitian PSD square root `S` with `S * S = A`.
///
/// Eigenvalues in `[-1e-10, 0)` (relative to the spectral scale) are clamped
/// to zero; anything more negative is rejected.
pub fn matrix_sqrt_psd(a: &CMatrix) -> Result<CMatrix> {
    psd_function(a, f64::sqrt)
}

/// `A^{-1/2}` for a Hermitian positive definite matrix.
pub fn inverse_sqrt_pd(a: &CMatrix) -> Result<CMatrix> {
    let (values, _) = hermitian_eigen(a)?;
    let max = values.first().copied().unwrap_or(0.0);
    let min = values.last().copied().unwrap_or(0.0);
    if !(min > 1e-13 * max.abs().max(f64::MIN_POSITIVE)) || min <= 0.0 {
        return Err(Error::invalid(format!(
            "matrix is not positive definite (min eigenvalue {min:e})"
        )));
    }
    psd_function(a, |x| 1.0 / x.sqrt())
}

/// Real part of `v^H A v`.
pub fn quad_form(a: &CMatrix, v: &CVector) -> f64 {
    v.dotc(&(a * v)).re
}

/// Result of a power iteration.
#[derive(Debug, Clone)]
pub struct PowerIterate {
    pub vector: CVector,
    pub eigenvalue: f64,
    pub iterations: usize,
}

/// Dominant eigenvector of a Hermitian PSD matrix by shifted power iteration.
///
/// The iteration runs on `A - s I` where `s` is the Gershgorin lower bound of
/// the spectrum (clamped at zero), which keeps the target eigenvalue on top
/// while shrinking the ratio that governs convergence. Stops when the
/// eigen-residual `||A x - (x^H A x) x||` drops below `tol` times the
/// Rayleigh quotient of the shifted matrix, so a spectrum that is nearly a
/// multiple of the identity is still resolved.
pub fn power_iteration(a: &CMatrix, tol: f64, max_iter: usize) -> Result<PowerIterate> {
    check_hermitian(a)?;
    let n = a.nrows();
    if n == 0 {
        return Err(Error::dim("empty matrix"));
    }
    let shift = (0..n)
        .map(|i| {
            let off: f64 = (0..n).filter(|&j| j != i).map(|j| a[(i, j)].norm()).sum();
            a[(i, i)].re - off
        })
        .fold(f64::INFINITY, f64::min)
        .max(0.0);
    let mut shifted = a.clone();
    for i in 0..n {
        shifted[(i, i)] -= C64::new(shift, 0.0);
    }

    // Deterministic start with components on every axis.
    let mut x = CVector::from_fn(n, |i, _| C64::new(1.0 + 0.01 * i as f64, 0.001 * i as f64));
    x /= C64::new(x.norm(), 0.0);
    let mut residual = f64::INFINITY;
    for it in 1..=max_iter {
        let y = &shifted * &x;
        let mu = x.dotc(&y).re;
        let eigenvalue = mu + shift;
        residual = (&y - &x * C64::new(mu, 0.0)).norm();
        if residual <= tol * mu.abs() {
            return Ok(PowerIterate { vector: x, eigenvalue, iterations: it });
        }
        let norm = y.norm();
        if norm == 0.0 {
            return Ok(PowerIterate { vector: x, eigenvalue, iterations: it });
        }
        x = y / C64::new(norm, 0.0);
    }
    Err(Error::Convergence { iterations: max_iter, residual })
}
