//! Row normalization and removal of linearly dependent equality rows.

use super::dense::cholesky;

pub(crate) struct Presolved {
    /// Original indices of the rows kept, ascending.
    pub keep: Vec<usize>,
    /// `1/‖a_i‖` for every original row (0 for empty rows).
    pub inv_norm: Vec<f64>,
    /// The dropped rows contradict the kept ones.
    pub inconsistent: bool,
}

/// Pivot tolerance on the normalized Gram matrix.
const PIVOT_TOL: f64 = 1e-9;

pub(crate) fn presolve(rows: &[Vec<(usize, f64)>], b: &[f64], nvar: usize) -> Presolved {
    let m = rows.len();
    let inv_norm: Vec<f64> = rows
        .iter()
        .map(|r| {
            let s = r.iter().map(|t| t.1 * t.1).sum::<f64>().sqrt();
            if s > 0.0 {
                1.0 / s
            } else {
                0.0
            }
        })
        .collect();
    let bhat: Vec<f64> = b.iter().zip(&inv_norm).map(|(bi, w)| bi * w).collect();
    let bscale = 1.0 + b.iter().zip(&inv_norm).filter(|t| *t.1 > 0.0).fold(0.0f64, |a, t| a.max(t.0.abs() * t.1));

    // Gram matrix of the normalized rows, through column lists.
    let mut cols: Vec<Vec<(usize, f64)>> = vec![Vec::new(); nvar];
    for (i, r) in rows.iter().enumerate() {
        for &(j, v) in r {
            cols[j].push((i, v * inv_norm[i]));
        }
    }
    let mut g = vec![0.0; m * m];
    for col in &cols {
        for &(i, vi) in col {
            for &(k, vk) in col {
                g[i * m + k] += vi * vk;
            }
        }
    }

    // Pivoted Cholesky; rows whose remaining diagonal falls below the
    // tolerance are dependent on the pivots chosen so far.
    let mut l = vec![0.0; m * m];
    let mut diag: Vec<f64> = (0..m).map(|i| g[i * m + i]).collect();
    let mut used = vec![false; m];
    let mut piv: Vec<usize> = Vec::new();
    for k in 0..m {
        let mut best = None;
        let mut bv = PIVOT_TOL;
        for i in 0..m {
            if !used[i] && diag[i] > bv {
                bv = diag[i];
                best = Some(i);
            }
        }
        let Some(p) = best else { break };
        used[p] = true;
        piv.push(p);
        let d = bv.sqrt();
        for i in 0..m {
            if used[i] && i != p {
                continue;
            }
            let mut s = g[i * m + p];
            for t in 0..k {
                s -= l[i * m + t] * l[p * m + t];
            }
            l[i * m + k] = if i == p { d } else { s / d };
            if i != p {
                diag[i] -= l[i * m + k] * l[i * m + k];
            }
        }
    }
    let mut keep = piv.clone();
    keep.sort_unstable();

    // Consistency of the dropped rows: with z = G_kk⁻¹ b̂_k, the minimum-norm
    // solution of the kept rows gives row i the value Σ_k G_ik z_k.
    let mut inconsistent = false;
    if keep.len() < m {
        let r = keep.len();
        let mut gkk = vec![0.0; r * r];
        for (a, &i) in keep.iter().enumerate() {
            for (c, &k) in keep.iter().enumerate() {
                gkk[a * r + c] = g[i * m + k];
            }
        }
        let z = match cholesky(&gkk, r) {
            Some(lk) => chol_solve(&lk, r, &keep.iter().map(|&i| bhat[i]).collect::<Vec<_>>()),
            None => vec![0.0; r],
        };
        for i in 0..m {
            if keep.binary_search(&i).is_ok() {
                continue;
            }
            let v: f64 = keep.iter().zip(&z).map(|(&k, zk)| g[i * m + k] * zk).sum();
            let target = if inv_norm[i] > 0.0 { bhat[i] } else { b[i] };
            if (v - target).abs() > 1e-7 * bscale {
                inconsistent = true;
            }
        }
    }
    Presolved { keep, inv_norm, inconsistent }
}

pub(crate) fn chol_solve(l: &[f64], n: usize, rhs: &[f64]) -> Vec<f64> {
    let mut x = rhs.to_vec();
    for i in 0..n {
        let mut s = x[i];
        for k in 0..i {
            s -= l[i * n + k] * x[k];
        }
        x[i] = s / l[i * n + i];
    }
    for i in (0..n).rev() {
        let mut s = x[i];
        for k in i + 1..n {
            s -= l[k * n + i] * x[k];
        }
        x[i] = s / l[i * n + i];
    }
    x
}
