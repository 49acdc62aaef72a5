//! Linear maps in Choi form, superchannels and the pairing with operators.
//!
//! The Choi matrix of `Φ: A0 → A1` is `C_Φ = (Φ ⊗ id)(|I>><<I|)` on
//! `A1 ⊗ A0`. Input and output labels must be distinct; compose maps by
//! naming the wire they share the same on both sides.
//!
//! Constructors default to the labels `A0` (input) and `A1` (output); see
//! [`ChoiMap::relabel`].

use rand::Rng;

use crate::error::{Error, Result};
use crate::games::Povm;
use crate::linalg::{
    herm_eig, is_psd, kron, partial_trace, permute_systems, vec_doubleket, CMatrix, SystemDims,
};

pub use crate::linalg::link_product;

/// Tolerance of [`ChoiMap::is_cp`]'s smallest eigenvalue test.
pub const CP_TOL: f64 = 1e-9;
/// Tolerance of [`ChoiMap::is_tp`].
pub const TP_TOL: f64 = 1e-8;

/// A Hermitian-preserving linear map stored as its Choi matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct ChoiMap {
    choi: CMatrix,
    in_dims: SystemDims,
    out_dims: SystemDims,
}

impl ChoiMap {
    /// Wraps a Choi matrix on `out ⊗ in`. It must be Hermitian.
    pub fn new(choi: CMatrix, in_dims: SystemDims, out_dims: SystemDims) -> Result<ChoiMap> {
        let all = out_dims.concat(&in_dims)?;
        all.check_matrix(choi.rows(), choi.cols())?;
        let defect = choi.hermiticity_defect();
        if defect > 1e-10 * choi.max_abs().max(1.0) {
            return Err(Error::NotHermitian(defect));
        }
        Ok(ChoiMap { choi: choi.hermitian_part(), in_dims, out_dims })
    }

    pub(crate) fn new_unchecked(choi: CMatrix, in_dims: SystemDims, out_dims: SystemDims) -> ChoiMap {
        ChoiMap { choi, in_dims, out_dims }
    }

    pub fn choi(&self) -> &CMatrix {
        &self.choi
    }

    pub fn in_dims(&self) -> &SystemDims {
        &self.in_dims
    }

    pub fn out_dims(&self) -> &SystemDims {
        &self.out_dims
    }

    /// Layout of the Choi matrix, `out ⊗ in`.
    pub fn dims(&self) -> SystemDims {
        self.out_dims.concat(&self.in_dims).expect("labels checked at construction")
    }

    pub fn d_in(&self) -> usize {
        self.in_dims.total()
    }

    pub fn d_out(&self) -> usize {
        self.out_dims.total()
    }

    /// Same map on renamed wires; the label lists run parallel to the
    /// current factors.
    pub fn relabel(&self, in_labels: &[&str], out_labels: &[&str]) -> Result<ChoiMap> {
        let ren = |d: &SystemDims, l: &[&str]| -> Result<SystemDims> {
            if l.len() != d.len() {
                return Err(Error::Layout(format!("{} labels given for {d}", l.len())));
            }
            SystemDims::new(l.iter().zip(d.dims()).map(|(a, b)| (a.to_string(), b)))
        };
        ChoiMap::new(self.choi.clone(), ren(&self.in_dims, in_labels)?, ren(&self.out_dims, out_labels)?)
    }

    /// Same map with single-factor input and output wires named `a` and `b`.
    pub fn with_wires(&self, a: &str, b: &str) -> Result<ChoiMap> {
        let din = self.d_in();
        let dout = self.d_out();
        ChoiMap::new(self.choi.clone(), SystemDims::single(a, din), SystemDims::single(b, dout))
    }

    /// `Choi ⪰ −tol·I`.
    pub fn is_cp(&self, tol: f64) -> bool {
        is_psd(&self.choi, tol)
    }

    /// `‖Tr_out C − I_in‖ ≤ tol` (largest entry).
    pub fn is_tp(&self, tol: f64) -> bool {
        match partial_trace(&self.choi, &self.dims(), &self.out_dims.labels()) {
            Ok((t, _)) => t.dist(&CMatrix::identity(self.d_in())) <= tol,
            Err(_) => false,
        }
    }

    fn same_layout(&self, other: &ChoiMap) -> Result<()> {
        if self.in_dims != other.in_dims || self.out_dims != other.out_dims {
            return Err(Error::Dimension(format!(
                "maps {} -> {} and {} -> {}",
                self.in_dims, self.out_dims, other.in_dims, other.out_dims
            )));
        }
        Ok(())
    }

    /// `self − other`, a Hermitian-preserving map.
    pub fn sub(&self, other: &ChoiMap) -> Result<ChoiMap> {
        self.same_layout(other)?;
        Ok(ChoiMap::new_unchecked(&self.choi - &other.choi, self.in_dims.clone(), self.out_dims.clone()))
    }

    pub fn add(&self, other: &ChoiMap) -> Result<ChoiMap> {
        self.same_layout(other)?;
        Ok(ChoiMap::new_unchecked(&self.choi + &other.choi, self.in_dims.clone(), self.out_dims.clone()))
    }

    pub fn scale(&self, s: f64) -> ChoiMap {
        ChoiMap::new_unchecked(self.choi.scale(s), self.in_dims.clone(), self.out_dims.clone())
    }

    /// `after ∘ self`. The input wire of `after` must carry the labels of
    /// this map's output.
    pub fn then(&self, after: &ChoiMap) -> Result<ChoiMap> {
        if after.in_dims != self.out_dims {
            return Err(Error::Layout(format!(
                "cannot feed {} into a map expecting {}",
                self.out_dims, after.in_dims
            )));
        }
        let (c, d) = link_product(&after.choi, &after.dims(), &self.choi, &self.dims())?;
        let order = after.out_dims.concat(&self.in_dims)?;
        let (c, _) = permute_systems(&c, &d, &order.labels())?;
        ChoiMap::new(c, self.in_dims.clone(), after.out_dims.clone())
    }

    /// `self ⊗ other` with inputs `in ⊗ in'` and outputs `out ⊗ out'`.
    pub fn tensor(&self, other: &ChoiMap) -> Result<ChoiMap> {
        let (c, d) = link_product(&self.choi, &self.dims(), &other.choi, &other.dims())?;
        let in_dims = self.in_dims.concat(&other.in_dims)?;
        let out_dims = self.out_dims.concat(&other.out_dims)?;
        let (c, _) = permute_systems(&c, &d, &out_dims.concat(&in_dims)?.labels())?;
        ChoiMap::new(c, in_dims, out_dims)
    }

    /// Choi matrix of the adjoint map `Φ*: out → in`.
    pub fn adjoint(&self) -> ChoiMap {
        let order = self.in_dims.concat(&self.out_dims).expect("labels");
        let (c, _) = permute_systems(&self.choi, &self.dims(), &order.labels()).expect("labels");
        ChoiMap::new_unchecked(c.conj(), self.out_dims.clone(), self.in_dims.clone())
    }

    /// Kraus operators from the spectral decomposition of a CP map's Choi
    /// matrix; eigenvalues below `tol` are dropped.
    pub fn kraus(&self, tol: f64) -> Result<Vec<CMatrix>> {
        let (vals, vecs) = herm_eig(&self.choi)?;
        let (dout, din) = (self.d_out(), self.d_in());
        let mut out = Vec::new();
        for (k, &l) in vals.iter().enumerate() {
            if l < -tol {
                return Err(Error::Domain(format!("map is not completely positive (eigenvalue {l:.3e})")));
            }
            if l <= tol {
                continue;
            }
            let s = l.sqrt();
            out.push(CMatrix::from_fn(dout, din, |o, i| vecs[(o * din + i, k)] * s));
        }
        Ok(out)
    }
}

/// Choi map of `X ↦ Σ_k K_k X K_k*` on the default wires `A0 → A1`.
pub fn choi_of_kraus(kraus: &[CMatrix]) -> Result<ChoiMap> {
    let first = kraus.first().ok_or_else(|| Error::Domain("no Kraus operators".into()))?;
    let (dout, din) = (first.rows(), first.cols());
    choi_of_kraus_on(kraus, SystemDims::single("A0", din), SystemDims::single("A1", dout))
}

/// As [`choi_of_kraus`] with explicit wires.
pub fn choi_of_kraus_on(kraus: &[CMatrix], in_dims: SystemDims, out_dims: SystemDims) -> Result<ChoiMap> {
    let (dout, din) = (out_dims.total(), in_dims.total());
    let mut c = CMatrix::zeros(dout * din, dout * din);
    for k in kraus {
        if k.rows() != dout || k.cols() != din {
            return Err(Error::Dimension(format!("Kraus operator {}x{}, expected {dout}x{din}", k.rows(), k.cols())));
        }
        let v = vec_doubleket_rect(k);
        c += &CMatrix::projector(&v);
    }
    ChoiMap::new(c.hermitian_part(), in_dims, out_dims)
}

/// `(K ⊗ I)|I>>` for a rectangular `K`, i.e. its row-major vectorization.
fn vec_doubleket_rect(k: &CMatrix) -> CMatrix {
    CMatrix::column(k.data())
}

/// `Φ(x) = Tr_in[C (I ⊗ xᵀ)]`.
pub fn apply(phi: &ChoiMap, x: &CMatrix) -> Result<CMatrix> {
    phi.in_dims.check_matrix(x.rows(), x.cols())?;
    let (y, d) = link_product(&phi.choi, &phi.dims(), x, &phi.in_dims)?;
    debug_assert_eq!(d, phi.out_dims);
    Ok(y)
}

/// `(Φ ⊗ id)(x)` for `x` on a layout containing the input factors of `Φ`.
/// The result lives on `out ⊗ (the other factors of x)`.
pub fn apply_partial(phi: &ChoiMap, x: &CMatrix, xdims: &SystemDims) -> Result<(CMatrix, SystemDims)> {
    for l in phi.in_dims.labels() {
        if phi.in_dims.dim(l)? != xdims.dim(l)? {
            return Err(Error::Dimension(format!("factor `{l}` has a different size in the operand")));
        }
    }
    if phi.out_dims.labels().iter().any(|l| xdims.contains(l) && !phi.in_dims.contains(l)) {
        return Err(Error::Layout(format!("output of the map clashes with {xdims}")));
    }
    link_product(&phi.choi, &phi.dims(), x, xdims)
}

/// The pairing `⟨X, Φ⟩ = X * C_Φ` for `X` on `in ⊗ out`.
pub fn pairing(x: &CMatrix, phi: &ChoiMap) -> Result<f64> {
    let xd = phi.in_dims.concat(&phi.out_dims)?;
    xd.check_matrix(x.rows(), x.cols())?;
    let (v, _) = link_product(x, &xd, &phi.choi, &phi.dims())?;
    Ok(v[(0, 0)].re)
}

/// Completely positive and trace preserving, both to `tol`.
pub fn is_channel(phi: &ChoiMap, tol: f64) -> bool {
    phi.is_cp(tol) && phi.is_tp(tol)
}

/// Identity channel on `C^d`.
pub fn identity(d: usize) -> ChoiMap {
    let v = vec_doubleket(&CMatrix::identity(d));
    ChoiMap::new_unchecked(CMatrix::projector(&v), SystemDims::single("A0", d), SystemDims::single("A1", d))
}

/// `X ↦ Tr[X] σ` from `C^d_in`.
pub fn replacement(sigma: &CMatrix, d_in: usize) -> Result<ChoiMap> {
    if !is_psd(sigma, 1e-9) || (sigma.trace().re - 1.0).abs() > 1e-8 {
        return Err(Error::Domain("replacement state must be a density matrix".into()));
    }
    ChoiMap::new(
        kron(sigma, &CMatrix::identity(d_in)),
        SystemDims::single("A0", d_in),
        SystemDims::single("A1", sigma.rows()),
    )
}

/// `X ↦ λX + (1 − λ) Tr[X] I/d`, completely positive for
/// `−1/(d²−1) ≤ λ ≤ 1`.
pub fn depolarizing(d: usize, lambda: f64) -> Result<ChoiMap> {
    let lo = if d > 1 { -1.0 / ((d * d - 1) as f64) } else { f64::NEG_INFINITY };
    if lambda > 1.0 + 1e-12 || lambda < lo - 1e-12 {
        return Err(Error::Domain(format!("depolarizing parameter {lambda} outside [{lo}, 1]")));
    }
    let id = identity(d);
    let c = &id.choi.scale(lambda) + &CMatrix::identity(d * d).scale((1.0 - lambda) / d as f64);
    Ok(ChoiMap::new_unchecked(c, id.in_dims, id.out_dims))
}

/// Quantum-classical channel `σ ↦ Σ_i Tr[σ M_i] |i><i|`.
pub fn qc_from_povm(m: &Povm) -> Result<ChoiMap> {
    let k = m.len();
    let d = m.dim();
    let mut c = CMatrix::zeros(k * d, k * d);
    for (i, e) in m.effects().iter().enumerate() {
        let p = CMatrix::projector(&CMatrix::basis(k, i));
        c += &kron(&p, &e.transpose());
    }
    ChoiMap::new(c, SystemDims::single("A0", d), SystemDims::single("A1", k))
}

/// Classical channel `j ↦ Σ_x p[x][j] |x><x|` from a column-stochastic
/// table `p[x][j] = p(x|j)`.
pub fn cc_from_condprob(p: &[Vec<f64>]) -> Result<ChoiMap> {
    let nx = p.len();
    let nj = p.first().map_or(0, Vec::len);
    if nx == 0 || nj == 0 || p.iter().any(|r| r.len() != nj) {
        return Err(Error::Dimension("conditional probability table must be rectangular and nonempty".into()));
    }
    for j in 0..nj {
        let col: f64 = p.iter().map(|r| r[j]).sum();
        if p.iter().any(|r| r[j] < -1e-12) || (col - 1.0).abs() > 1e-9 {
            return Err(Error::Domain(format!("column {j} is not a probability vector")));
        }
    }
    let mut diag = vec![0.0; nx * nj];
    for x in 0..nx {
        for j in 0..nj {
            diag[x * nj + j] = p[x][j];
        }
    }
    ChoiMap::new(CMatrix::diag(&diag), SystemDims::single("A0", nj), SystemDims::single("A1", nx))
}

/// Random channel `C^d_in → C^d_out` from a Haar isometry into
/// `C^d_out ⊗ C^env` followed by tracing out the environment. `env` is
/// raised to `⌈d_in / d_out⌉` when smaller, since no isometry exists below.
pub fn random_channel(d_in: usize, d_out: usize, env_dim: usize, seed: u64) -> ChoiMap {
    random_channel_with(&mut crate::random::rng(seed), d_in, d_out, env_dim)
}

pub fn random_channel_with(rng: &mut impl Rng, d_in: usize, d_out: usize, env_dim: usize) -> ChoiMap {
    let env = env_dim.max(1).max(d_in.div_ceil(d_out.max(1)));
    let v = crate::random::haar_isometry(rng, d_out * env, d_in);
    let kraus: Vec<CMatrix> =
        (0..env).map(|e| CMatrix::from_fn(d_out, d_in, |o, i| v[(o * env + e, i)])).collect();
    choi_of_kraus(&kraus).expect("shapes agree")
}

/// Choi matrix of a superchannel (2-comb) sending maps `A0 → A1` to maps
/// `A0' → A1'`, on `A1' ⊗ A0 ⊗ A0' ⊗ A1`.
#[derive(Clone, Debug, PartialEq)]
pub struct SuperchannelChoi {
    choi: CMatrix,
    a0: SystemDims,
    a1: SystemDims,
    a0p: SystemDims,
    a1p: SystemDims,
}

impl SuperchannelChoi {
    pub fn new(
        choi: CMatrix,
        a0: SystemDims,
        a1: SystemDims,
        a0p: SystemDims,
        a1p: SystemDims,
    ) -> Result<SuperchannelChoi> {
        let d = a1p.concat(&a0)?.concat(&a0p)?.concat(&a1)?;
        d.check_matrix(choi.rows(), choi.cols())?;
        if !choi.is_hermitian(1e-10) {
            return Err(Error::NotHermitian(choi.hermiticity_defect()));
        }
        Ok(SuperchannelChoi { choi: choi.hermitian_part(), a0, a1, a0p, a1p })
    }

    pub fn choi(&self) -> &CMatrix {
        &self.choi
    }

    /// Layout `A1' A0 A0' A1`.
    pub fn dims(&self) -> SystemDims {
        self.a1p.concat(&self.a0).and_then(|d| d.concat(&self.a0p)).and_then(|d| d.concat(&self.a1)).expect("checked")
    }

    pub fn wires(&self) -> (&SystemDims, &SystemDims, &SystemDims, &SystemDims) {
        (&self.a0, &self.a1, &self.a0p, &self.a1p)
    }

    /// Superchannel `Φ ↦ post ∘ (Φ ⊗ id_R) ∘ pre` with `pre: A0' → A0 R`
    /// and `post: A1 R → A1'`. The memory `R` is whatever `pre` outputs
    /// besides `A0` (the labels shared with `post`'s input).
    pub fn from_pre_post(
        pre: &ChoiMap,
        post: &ChoiMap,
        a0: &SystemDims,
        a1: &SystemDims,
    ) -> Result<SuperchannelChoi> {
        let a0p = pre.in_dims.clone();
        let a1p = post.out_dims.clone();
        let (c, d) = link_product(&post.choi, &post.dims(), &pre.choi, &pre.dims())?;
        let order = a1p.concat(a0)?.concat(&a0p)?.concat(a1)?;
        let (c, _) = permute_systems(&c, &d, &order.labels())?;
        SuperchannelChoi::new(c, a0.clone(), a1.clone(), a0p, a1p)
    }

    /// The superchannel leaving every map unchanged, with `A0' = A0` and
    /// `A1' = A1` as spaces (labels `in'`, `out'` of the given ones).
    pub fn identity(a0: &SystemDims, a1: &SystemDims, a0p: &SystemDims, a1p: &SystemDims) -> Result<SuperchannelChoi> {
        if a0.total() != a0p.total() || a1.total() != a1p.total() {
            return Err(Error::Dimension("identity superchannel needs matching wires".into()));
        }
        let w0 = vec_doubleket(&CMatrix::identity(a0.total()));
        let w1 = vec_doubleket(&CMatrix::identity(a1.total()));
        // |I>><<I| on A0 A0' and on A1' A1
        let c = kron(&CMatrix::projector(&w1), &CMatrix::projector(&w0));
        let d = a1p.concat(a1)?.concat(a0)?.concat(a0p)?;
        let order = a1p.concat(a0)?.concat(a0p)?.concat(a1)?;
        let (c, _) = permute_systems(&c, &d, &order.labels())?;
        SuperchannelChoi::new(c, a0.clone(), a1.clone(), a0p.clone(), a1p.clone())
    }

    /// `Θ(Φ)` as a map `A0' → A1'`.
    pub fn apply(&self, phi: &ChoiMap) -> Result<ChoiMap> {
        if phi.in_dims != self.a0 || phi.out_dims != self.a1 {
            return Err(Error::Layout(format!(
                "superchannel acts on {} -> {}, got {} -> {}",
                self.a0, self.a1, phi.in_dims, phi.out_dims
            )));
        }
        let (c, d) = link_product(&self.choi, &self.dims(), &phi.choi, &phi.dims())?;
        let order = self.a1p.concat(&self.a0p)?;
        let (c, _) = permute_systems(&c, &d, &order.labels())?;
        ChoiMap::new(c, self.a0p.clone(), self.a1p.clone())
    }

    /// Residuals of the comb identities `Tr_{A1'} C = I_{A1} ⊗ C₂` and
    /// `Tr_{A0} C₂ = I_{A0'}`, with `C₂ = Tr_{A1'A1} C / d_{A1}`.
    pub fn comb_residuals(&self) -> Result<(f64, f64)> {
        let d = self.dims();
        let (t1, d1) = partial_trace(&self.choi, &d, &self.a1p.labels())?;
        let (c2, d2) = partial_trace(&t1, &d1, &self.a1.labels())?;
        let c2 = c2.scale(1.0 / self.a1.total() as f64);
        // I_{A1} ⊗ C₂ laid out like t1 (A0 A0' A1)
        let ic2 = kron(&c2, &CMatrix::identity(self.a1.total()));
        let r1 = t1.dist(&ic2);
        let (t2, _) = partial_trace(&c2, &d2, &self.a0.labels())?;
        let r2 = t2.dist(&CMatrix::identity(self.a0p.total()));
        Ok((r1, r2))
    }
}

/// `C ⪰ −tol·I` and both comb identities hold to `tol`.
pub fn is_comb(theta: &SuperchannelChoi, tol: f64) -> bool {
    let ok_psd = is_psd(&theta.choi, tol);
    match theta.comb_residuals() {
        Ok((r1, r2)) => ok_psd && r1 <= tol && r2 <= tol,
        Err(_) => false,
    }
}

/// Scalar helper: `⟨X, Θ⟩ = X * C_Θ` for `X` on any ordering of the four
/// wires.
pub fn comb_pairing(x: &CMatrix, xd: &SystemDims, theta: &SuperchannelChoi) -> Result<f64> {
    let td = theta.dims();
    if xd.len() != td.len() || xd.labels().iter().any(|l| !td.contains(l)) {
        return Err(Error::Layout(format!("{xd} does not cover {td}")));
    }
    let (v, _) = link_product(x, xd, &theta.choi, &td)?;
    Ok(v[(0, 0)].re)
}
