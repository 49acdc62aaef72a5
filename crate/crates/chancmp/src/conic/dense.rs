//! Small dense real kernels for the interior-point method. Matrices are
//! square, row-major `Vec<f64>`.

pub(crate) fn matmul(a: &[f64], b: &[f64], n: usize) -> Vec<f64> {
    let mut c = vec![0.0; n * n];
    for i in 0..n {
        let ci = &mut c[i * n..(i + 1) * n];
        for k in 0..n {
            let aik = a[i * n + k];
            if aik == 0.0 {
                continue;
            }
            let bk = &b[k * n..(k + 1) * n];
            for (cij, bkj) in ci.iter_mut().zip(bk) {
                *cij += aik * bkj;
            }
        }
    }
    c
}

pub(crate) fn transpose(a: &[f64], n: usize) -> Vec<f64> {
    let mut t = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            t[j * n + i] = a[i * n + j];
        }
    }
    t
}

/// `aᵀ b`.
pub(crate) fn matmul_tn(a: &[f64], b: &[f64], n: usize) -> Vec<f64> {
    matmul(&transpose(a, n), b, n)
}

/// `a bᵀ`.
pub(crate) fn matmul_nt(a: &[f64], b: &[f64], n: usize) -> Vec<f64> {
    matmul(a, &transpose(b, n), n)
}

/// `rᵀ v r` for symmetric `v`.
pub(crate) fn congruence_t(r: &[f64], v: &[f64], n: usize) -> Vec<f64> {
    let vr = matmul(v, r, n);
    symmetrize(matmul_tn(r, &vr, n), n)
}

/// `r v rᵀ` for symmetric `v`.
pub(crate) fn congruence(r: &[f64], v: &[f64], n: usize) -> Vec<f64> {
    let rv = matmul(r, v, n);
    symmetrize(matmul_nt(&rv, r, n), n)
}

pub(crate) fn symmetrize(mut a: Vec<f64>, n: usize) -> Vec<f64> {
    for i in 0..n {
        for j in 0..i {
            let s = 0.5 * (a[i * n + j] + a[j * n + i]);
            a[i * n + j] = s;
            a[j * n + i] = s;
        }
    }
    a
}

/// Lower Cholesky factor, or `None` if `a` is not numerically positive
/// definite.
pub(crate) fn cholesky(a: &[f64], n: usize) -> Option<Vec<f64>> {
    let mut l = vec![0.0; n * n];
    for j in 0..n {
        let mut d = a[j * n + j];
        for k in 0..j {
            d -= l[j * n + k] * l[j * n + k];
        }
        if !(d > 0.0) || !d.is_finite() {
            return None;
        }
        let d = d.sqrt();
        l[j * n + j] = d;
        for i in j + 1..n {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            l[i * n + j] = s / d;
        }
    }
    Some(l)
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm_inf(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// `LDLᵀ` factorization without pivoting of a symmetric quasi-definite
/// matrix. `L` is unit lower triangular (diagonal not stored).
pub(crate) struct Ldl {
    n: usize,
    l: Vec<f64>,
    d: Vec<f64>,
}

impl Ldl {
    pub(crate) fn factor(a: &[f64], n: usize) -> Option<Ldl> {
        let mut l = vec![0.0; n * n];
        let mut d = vec![0.0; n];
        let mut w = vec![0.0; n];
        for j in 0..n {
            for k in 0..j {
                w[k] = l[j * n + k] * d[k];
            }
            let mut dj = a[j * n + j];
            for k in 0..j {
                dj -= l[j * n + k] * w[k];
            }
            if dj == 0.0 || !dj.is_finite() {
                return None;
            }
            d[j] = dj;
            for i in j + 1..n {
                let li = &l[i * n..i * n + j];
                let mut s = a[i * n + j];
                for k in 0..j {
                    s -= li[k] * w[k];
                }
                l[i * n + j] = s / dj;
            }
        }
        Some(Ldl { n, l, d })
    }

    pub(crate) fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut x = rhs.to_vec();
        for i in 0..n {
            let li = &self.l[i * n..i * n + i];
            let s: f64 = li.iter().zip(&x[..i]).map(|(a, b)| a * b).sum();
            x[i] -= s;
        }
        for i in 0..n {
            x[i] /= self.d[i];
        }
        for i in (0..n).rev() {
            let xi = x[i];
            if xi != 0.0 {
                for k in 0..i {
                    x[k] -= self.l[i * n + k] * xi;
                }
            }
        }
        x
    }
}

/// Packed upper-triangle index of `(i, j)`, `i <= j`, in an `n x n` block.
pub(crate) fn svec_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i <= j && j < n);
    // rows before i hold n, n-1, ..., n-i+1 entries
    i * (2 * n + 1 - i) / 2 + (j - i)
}

pub(crate) fn svec_len(n: usize) -> usize {
    n * (n + 1) / 2
}

/// Unpacks a scaled packed vector (off-diagonals carry a factor √2).
pub(crate) fn smat(v: &[f64], n: usize) -> Vec<f64> {
    let mut m = vec![0.0; n * n];
    let mut k = 0;
    for i in 0..n {
        m[i * n + i] = v[k];
        k += 1;
        for j in i + 1..n {
            let x = v[k] * std::f64::consts::FRAC_1_SQRT_2;
            m[i * n + j] = x;
            m[j * n + i] = x;
            k += 1;
        }
    }
    m
}

/// Packs a symmetric matrix, scaling off-diagonals by √2.
pub(crate) fn svec(m: &[f64], n: usize, out: &mut [f64]) {
    let mut k = 0;
    for i in 0..n {
        out[k] = m[i * n + i];
        k += 1;
        for j in i + 1..n {
            out[k] = (m[i * n + j] + m[j * n + i]) * std::f64::consts::FRAC_1_SQRT_2;
            k += 1;
        }
    }
}
