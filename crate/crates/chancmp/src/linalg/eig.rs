//! Hermitian eigendecomposition: Householder reduction to a real tridiagonal
//! matrix followed by the implicit QL iteration.

use super::matrix::{CMatrix, C64, ONE, ZERO};
use crate::error::{Error, Result};

/// Eigenvalues (ascending) and orthonormal eigenvectors (as columns) of a
/// Hermitian matrix.
///
/// The input is symmetrized before the reduction; it must be Hermitian to
/// `1e-10` relative to its largest entry.
pub fn herm_eig(x: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    if !x.is_square() {
        return Err(Error::Dimension(format!("{}x{} is not square", x.rows(), x.cols())));
    }
    let defect = x.hermiticity_defect();
    if defect > 1e-10 * x.max_abs().max(1.0) {
        return Err(Error::NotHermitian(defect));
    }
    Ok(herm_eig_unchecked(&x.hermitian_part()))
}

/// Eigendecomposition of a matrix already known to be Hermitian.
pub(crate) fn herm_eig_unchecked(x: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = x.rows();
    if n == 0 {
        return (vec![], CMatrix::zeros(0, 0));
    }
    let mut a = x.data().to_vec();
    let mut q = CMatrix::identity(n).into_data();
    let mut v = vec![ZERO; n];
    let mut p = vec![ZERO; n];
    let mut qv = vec![ZERO; n];

    for k in 0..n.saturating_sub(2) {
        let tail: f64 = (k + 2..n).map(|i| a[i * n + k].norm_sqr()).sum();
        if tail == 0.0 {
            continue;
        }
        let x0 = a[(k + 1) * n + k];
        let norm = (tail + x0.norm_sqr()).sqrt();
        let phase = if x0.norm() > 0.0 { x0 / x0.norm() } else { ONE };
        v.iter_mut().for_each(|z| *z = ZERO);
        v[k + 1] = x0 + phase * norm;
        for i in k + 2..n {
            v[i] = a[i * n + k];
        }
        let vnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        v.iter_mut().for_each(|z| *z /= vnorm);

        // A <- H A H with H = I - 2 v v*.
        for i in 0..n {
            p[i] = (k + 1..n).map(|j| a[i * n + j] * v[j]).sum();
        }
        let kk: f64 = (k + 1..n).map(|j| (v[j].conj() * p[j]).re).sum();
        let w: Vec<C64> = (0..n).map(|i| p[i] - v[i] * kk).collect();
        for i in 0..n {
            for j in 0..n {
                a[i * n + j] -= (v[i] * w[j].conj() + w[i] * v[j].conj()) * 2.0;
            }
        }
        // Q <- Q H.
        for i in 0..n {
            qv[i] = (k + 1..n).map(|j| q[i * n + j] * v[j]).sum();
        }
        for i in 0..n {
            for j in k + 1..n {
                q[i * n + j] -= qv[i] * v[j].conj() * 2.0;
            }
        }
    }

    // Rotate the subdiagonal to be real and nonnegative.
    let mut d: Vec<f64> = (0..n).map(|i| a[i * n + i].re).collect();
    let mut e = vec![0.0; n];
    let mut phase = vec![ONE; n];
    for i in 0..n - 1 {
        let off = a[(i + 1) * n + i];
        let r = off.norm();
        e[i] = r;
        phase[i + 1] = if r > 0.0 { phase[i] * (off / r) } else { phase[i] };
    }
    let mut z = vec![0.0; n * n];
    for i in 0..n {
        z[i * n + i] = 1.0;
    }
    tql2(&mut d, &mut e, &mut z, n);

    // Eigenvectors: Q · diag(phase) · Z.
    let mut out = vec![ZERO; n * n];
    for i in 0..n {
        for l in 0..n {
            let s = q[i * n + l] * phase[l];
            if s == ZERO {
                continue;
            }
            for j in 0..n {
                out[i * n + j] += s * z[l * n + j];
            }
        }
    }
    (d, CMatrix::from_vec(n, n, out).expect("square"))
}

/// Eigendecomposition of a real symmetric row-major `n x n` matrix.
/// Returns ascending eigenvalues and eigenvectors as columns (row-major).
pub(crate) fn sym_eig(a_in: &[f64], n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut a: Vec<f64> = a_in.to_vec();
    for i in 0..n {
        for j in 0..i {
            let s = 0.5 * (a[i * n + j] + a[j * n + i]);
            a[i * n + j] = s;
            a[j * n + i] = s;
        }
    }
    let mut q = vec![0.0; n * n];
    for i in 0..n {
        q[i * n + i] = 1.0;
    }
    let mut v = vec![0.0; n];
    let mut p = vec![0.0; n];
    let mut w = vec![0.0; n];
    for k in 0..n.saturating_sub(2) {
        let tail: f64 = (k + 2..n).map(|i| a[i * n + k] * a[i * n + k]).sum();
        if tail == 0.0 {
            continue;
        }
        let x0 = a[(k + 1) * n + k];
        let norm = (tail + x0 * x0).sqrt();
        v.iter_mut().for_each(|z| *z = 0.0);
        v[k + 1] = x0 + if x0 >= 0.0 { norm } else { -norm };
        for i in k + 2..n {
            v[i] = a[i * n + k];
        }
        let vnorm = v.iter().map(|z| z * z).sum::<f64>().sqrt();
        v.iter_mut().for_each(|z| *z /= vnorm);
        for i in 0..n {
            p[i] = (k + 1..n).map(|j| a[i * n + j] * v[j]).sum();
        }
        let kk: f64 = (k + 1..n).map(|j| v[j] * p[j]).sum();
        for i in 0..n {
            w[i] = p[i] - kk * v[i];
        }
        for i in 0..n {
            for j in 0..n {
                a[i * n + j] -= 2.0 * (v[i] * w[j] + w[i] * v[j]);
            }
        }
        for i in 0..n {
            p[i] = (k + 1..n).map(|j| q[i * n + j] * v[j]).sum();
        }
        for i in 0..n {
            for j in k + 1..n {
                q[i * n + j] -= 2.0 * p[i] * v[j];
            }
        }
    }
    let mut d: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    let mut e: Vec<f64> = (0..n).map(|i| if i + 1 < n { a[(i + 1) * n + i] } else { 0.0 }).collect();
    let mut z = vec![0.0; n * n];
    for i in 0..n {
        z[i * n + i] = 1.0;
    }
    tql2(&mut d, &mut e, &mut z, n);
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        for l in 0..n {
            let s = q[i * n + l];
            if s == 0.0 {
                continue;
            }
            for j in 0..n {
                out[i * n + j] += s * z[l * n + j];
            }
        }
    }
    (d, out)
}

/// Implicit QL on the symmetric tridiagonal matrix with diagonal `d` and
/// subdiagonal `e` (`e[i]` couples `i` and `i+1`). Rotations are accumulated
/// into the columns of `z`; eigenpairs are sorted ascending on return.
fn tql2(d: &mut [f64], e: &mut [f64], z: &mut [f64], n: usize) {
    if n == 0 {
        return;
    }
    e[n - 1] = 0.0;
    let eps = f64::EPSILON;
    let mut f = 0.0;
    let mut tst1: f64 = 0.0;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 && e[m].abs() > eps * tst1 {
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > 60 {
                    break;
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().take(n).skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    for k in 0..n {
                        let zk = &mut z[k * n..(k + 1) * n];
                        h = zk[i + 1];
                        zk[i + 1] = s * zk[i] + c * h;
                        zk[i] = c * zk[i] - s * h;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    for i in 0..n.saturating_sub(1) {
        let mut k = i;
        let mut p = d[i];
        for (j, &dj) in d.iter().enumerate().skip(i + 1) {
            if dj < p {
                k = j;
                p = dj;
            }
        }
        if k != i {
            d[k] = d[i];
            d[i] = p;
            for j in 0..n {
                z.swap(j * n + i, j * n + k);
            }
        }
    }
}
