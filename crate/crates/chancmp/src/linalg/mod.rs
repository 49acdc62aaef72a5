//! Dense complex linear algebra over labeled tensor-product spaces.

mod dims;
mod eig;
mod matrix;
mod tensor;

pub use dims::SystemDims;
pub use eig::herm_eig;
pub use matrix::{kron, CMatrix, C64};
pub use tensor::{link_product, partial_trace, partial_transpose, permute_systems, vec_doubleket};

pub(crate) use eig::{herm_eig_unchecked, sym_eig};
pub(crate) use matrix::ZERO;
pub(crate) use tensor::{link_array, partial_trace_array, partial_transpose_array, permute_array};

use crate::error::{Error, Result};

fn hermitian_spectrum(x: &CMatrix) -> Result<Vec<f64>> {
    Ok(herm_eig(x)?.0)
}

/// Sum of singular values. Hermitian inputs use the spectrum directly;
/// other inputs go through `x* x`.
pub fn trace_norm(x: &CMatrix) -> Result<f64> {
    if x.is_square() && x.is_hermitian(1e-10) {
        return Ok(hermitian_spectrum(x)?.iter().map(|l| l.abs()).sum());
    }
    Ok(singular_values(x).iter().sum())
}

/// Largest singular value.
pub fn op_norm(x: &CMatrix) -> Result<f64> {
    if x.is_square() && x.is_hermitian(1e-10) {
        return Ok(hermitian_spectrum(x)?.iter().fold(0.0, |m, l| m.max(l.abs())));
    }
    Ok(singular_values(x).iter().fold(0.0, |m: f64, s| m.max(*s)))
}

/// Singular values of an arbitrary matrix, ascending.
pub fn singular_values(x: &CMatrix) -> Vec<f64> {
    let g = x.adjoint().mul(x);
    herm_eig_unchecked(&g.hermitian_part()).0.into_iter().map(|l| l.max(0.0).sqrt()).collect()
}

/// Applies `f` to the spectrum of a Hermitian matrix.
pub fn hermitian_fn(x: &CMatrix, f: impl Fn(f64) -> f64) -> Result<CMatrix> {
    let (vals, vecs) = herm_eig(x)?;
    Ok(spectral(&vals.iter().map(|&l| f(l)).collect::<Vec<_>>(), &vecs))
}

/// `Σ_i w_i v_i v_i*` for eigenvector columns `v_i`.
pub(crate) fn spectral(weights: &[f64], vecs: &CMatrix) -> CMatrix {
    let n = vecs.rows();
    let mut out = CMatrix::zeros(n, n);
    for (k, &w) in weights.iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        for i in 0..n {
            let vi = vecs[(i, k)] * w;
            for j in 0..n {
                out[(i, j)] += vi * vecs[(j, k)].conj();
            }
        }
    }
    out
}

/// Square root of a positive semidefinite matrix (negative eigenvalues are
/// clipped to zero).
pub fn sqrt_psd(x: &CMatrix) -> Result<CMatrix> {
    hermitian_fn(x, |l| l.max(0.0).sqrt())
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eig(x: &CMatrix) -> Result<f64> {
    Ok(hermitian_spectrum(x)?.first().copied().unwrap_or(0.0))
}

/// Largest eigenvalue of a Hermitian matrix.
pub fn max_eig(x: &CMatrix) -> Result<f64> {
    Ok(hermitian_spectrum(x)?.last().copied().unwrap_or(0.0))
}

/// `x ⪰ -tol·I` for a Hermitian `x`.
pub fn is_psd(x: &CMatrix, tol: f64) -> bool {
    x.is_square() && x.is_hermitian(1e-8) && min_eig(x).map_or(false, |l| l >= -tol)
}

fn check_state(x: &CMatrix, what: &str) -> Result<()> {
    if !is_psd(x, 1e-8) {
        return Err(Error::Domain(format!("{what} is not positive semidefinite")));
    }
    let t = x.trace();
    if (t.re - 1.0).abs() > 1e-8 || t.im.abs() > 1e-8 {
        return Err(Error::Domain(format!("{what} has trace {t}, expected 1")));
    }
    Ok(())
}

/// Fidelity `F(ρ, σ) = ‖ρ^{1/2} σ^{1/2}‖₁` of two density matrices.
pub fn fidelity(rho: &CMatrix, sigma: &CMatrix) -> Result<f64> {
    check_state(rho, "first argument")?;
    check_state(sigma, "second argument")?;
    if rho.rows() != sigma.rows() {
        return Err(Error::Dimension("states of different size".into()));
    }
    let r = sqrt_psd(rho)?;
    let m = r.mul(sigma).mul(&r).hermitian_part();
    let f: f64 = herm_eig_unchecked(&m).0.iter().map(|l| l.max(0.0).sqrt()).sum();
    Ok(f.min(1.0))
}

/// Purified distance `√(1 - F²)`.
pub fn purified_distance(rho: &CMatrix, sigma: &CMatrix) -> Result<f64> {
    let f = fidelity(rho, sigma)?;
    Ok((1.0 - f * f).max(0.0).sqrt())
}

/// Normalized maximally entangled state `|I>><<I| / d` on two copies of `C^d`.
pub fn max_entangled(d: usize) -> CMatrix {
    let v = vec_doubleket(&CMatrix::identity(d));
    CMatrix::projector(&v).scale(1.0 / d as f64)
}
