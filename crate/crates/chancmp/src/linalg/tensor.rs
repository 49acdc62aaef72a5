//! Index bookkeeping for labeled tensor products.
//!
//! The generic helpers act on any row-major square array so that the same
//! code serves numeric matrices and matrices of affine expressions used when
//! compiling conic programs.

use std::ops::AddAssign;

use super::dims::SystemDims;
use super::matrix::{CMatrix, C64};
use crate::error::{Error, Result};

pub(crate) fn permute_array<T: Clone>(
    data: &[T],
    dims: &SystemDims,
    order: &[&str],
) -> Result<(Vec<T>, SystemDims)> {
    let map = dims.permutation_map(order)?;
    let n = map.len();
    debug_assert_eq!(data.len(), n * n);
    let mut out = Vec::with_capacity(n * n);
    for &r in &map {
        for &c in &map {
            out.push(data[r * n + c].clone());
        }
    }
    Ok((out, dims.select(order)?))
}

pub(crate) fn partial_trace_array<T: Clone + for<'a> AddAssign<&'a T>>(
    data: &[T],
    dims: &SystemDims,
    traced: &[&str],
    zero: T,
) -> Result<(Vec<T>, SystemDims)> {
    let (kept, sel) = dims.split_map(traced)?;
    let rest = dims.without(traced)?;
    let nk = rest.total();
    let n = dims.total();
    debug_assert_eq!(data.len(), n * n);
    let mut out = vec![zero; nk * nk];
    for r in 0..n {
        for c in 0..n {
            if sel[r] == sel[c] {
                out[kept[r] * nk + kept[c]] += &data[r * n + c];
            }
        }
    }
    Ok((out, rest))
}

pub(crate) fn partial_transpose_array<T: Clone>(
    data: &[T],
    dims: &SystemDims,
    flipped: &[&str],
) -> Result<Vec<T>> {
    let (kept, sel) = dims.split_map(flipped)?;
    let n = dims.total();
    let ns = dims.dim_of(flipped)?;
    let mut compose = vec![0; n];
    for idx in 0..n {
        compose[kept[idx] * ns + sel[idx]] = idx;
    }
    let mut out: Vec<T> = data.to_vec();
    for r in 0..n {
        for c in 0..n {
            let nr = compose[kept[r] * ns + sel[c]];
            let nc = compose[kept[c] * ns + sel[r]];
            out[nr * n + nc] = data[r * n + c].clone();
        }
    }
    Ok(out)
}

/// Layout of a link product: both operands permuted so that the shared
/// factors sit at the end of `x` and the start of `y`.
pub(crate) struct LinkLayout {
    pub x_order: Vec<String>,
    pub y_order: Vec<String>,
    pub na: usize,
    pub nb: usize,
    pub nc: usize,
    pub out_dims: SystemDims,
}

pub(crate) fn link_layout(xd: &SystemDims, yd: &SystemDims) -> Result<LinkLayout> {
    let shared: Vec<&str> = xd.labels().into_iter().filter(|l| yd.contains(l)).collect();
    for l in &shared {
        let (a, b) = (xd.dim(l)?, yd.dim(l)?);
        if a != b {
            return Err(Error::Dimension(format!("shared system `{l}` has dims {a} and {b}")));
        }
    }
    let a_dims = xd.without(&shared)?;
    let c_dims = yd.without(&shared)?;
    let x_order: Vec<String> =
        a_dims.labels().iter().chain(shared.iter()).map(|s| s.to_string()).collect();
    let y_order: Vec<String> =
        shared.iter().chain(c_dims.labels().iter()).map(|s| s.to_string()).collect();
    Ok(LinkLayout {
        na: a_dims.total(),
        nb: xd.dim_of(&shared)?,
        nc: c_dims.total(),
        out_dims: a_dims.concat(&c_dims)?,
        x_order,
        y_order,
    })
}

fn as_strs(v: &[String]) -> Vec<&str> {
    v.iter().map(String::as_str).collect()
}

/// Link product over the factors whose labels appear in both spaces:
/// `out[(a,c),(a',c')] = Σ_{b,b'} x[(a,b),(a',b')] y[(b,c),(b',c')]`.
///
/// `acc(out, x, y)` accumulates one product term.
pub(crate) fn link_array<X: Clone, Y: Clone, O: Clone>(
    x: &[X],
    xd: &SystemDims,
    y: &[Y],
    yd: &SystemDims,
    zero: O,
    mut acc: impl FnMut(&mut O, &X, &Y),
) -> Result<(Vec<O>, SystemDims)> {
    let lay = link_layout(xd, yd)?;
    let (xp, _) = permute_array(x, xd, &as_strs(&lay.x_order))?;
    let (yp, _) = permute_array(y, yd, &as_strs(&lay.y_order))?;
    let (na, nb, nc) = (lay.na, lay.nb, lay.nc);
    let nx = na * nb;
    let ny = nb * nc;
    let no = na * nc;
    let mut out = vec![zero; no * no];
    for a in 0..na {
        for a2 in 0..na {
            for b in 0..nb {
                for b2 in 0..nb {
                    let xv = &xp[(a * nb + b) * nx + a2 * nb + b2];
                    for c in 0..nc {
                        for c2 in 0..nc {
                            let yv = &yp[(b * nc + c) * ny + b2 * nc + c2];
                            acc(&mut out[(a * nc + c) * no + a2 * nc + c2], xv, yv);
                        }
                    }
                }
            }
        }
    }
    Ok((out, lay.out_dims))
}

/// Reorders the tensor factors of `x` (conjugation by the permutation unitary).
pub fn permute_systems(
    x: &CMatrix,
    dims: &SystemDims,
    order: &[&str],
) -> Result<(CMatrix, SystemDims)> {
    dims.check_matrix(x.rows(), x.cols())?;
    let (data, d) = permute_array(x.data(), dims, order)?;
    Ok((CMatrix::from_vec(x.rows(), x.cols(), data)?, d))
}

/// Traces out the listed factors; returns the reduced matrix and its layout.
pub fn partial_trace(
    x: &CMatrix,
    dims: &SystemDims,
    traced: &[&str],
) -> Result<(CMatrix, SystemDims)> {
    dims.check_matrix(x.rows(), x.cols())?;
    let (data, rest) = partial_trace_array(x.data(), dims, traced, C64::new(0.0, 0.0))?;
    let n = rest.total();
    Ok((CMatrix::from_vec(n, n, data)?, rest))
}

/// Transposes the listed factors in the standard basis.
pub fn partial_transpose(x: &CMatrix, dims: &SystemDims, flipped: &[&str]) -> Result<CMatrix> {
    dims.check_matrix(x.rows(), x.cols())?;
    let data = partial_transpose_array(x.data(), dims, flipped)?;
    CMatrix::from_vec(x.rows(), x.cols(), data)
}

/// Link product `x * y` over the labels common to both layouts.
///
/// The result lives on the unshared factors of `x` followed by those of `y`.
/// With nothing shared this is the tensor product.
pub fn link_product(
    x: &CMatrix,
    xd: &SystemDims,
    y: &CMatrix,
    yd: &SystemDims,
) -> Result<(CMatrix, SystemDims)> {
    xd.check_matrix(x.rows(), x.cols())?;
    yd.check_matrix(y.rows(), y.cols())?;
    let (data, d) = link_array(x.data(), xd, y.data(), yd, C64::new(0.0, 0.0), |o, a, b| {
        *o += a * b
    })?;
    let n = d.total();
    Ok((CMatrix::from_vec(n, n, data)?, d))
}

/// `|W>> = Σ_i W|i> ⊗ |i>`, i.e. the row-major vectorization of `W`.
pub fn vec_doubleket(w: &CMatrix) -> CMatrix {
    CMatrix::column(w.data())
}
