//! Diamond norms, conditional min-entropies and their superchannel
//! variants, each compiled to a semidefinite program.
//!
//! Elements paired with maps live on `input ⊗ output` (see
//! [`crate::channels::pairing`]); elements paired with superchannels carry
//! the four wires of a [`CombWires`] in any order, matched by label.
//!
//! Every function returns a [`NormValue`]: the optimal value bracketed by
//! the primal and dual objective of the solved program.

use serde::{Deserialize, Serialize};

use crate::channels::ChoiMap;
use crate::conic::model::{HExpr, Model, ModelSolution};
use crate::error::{Error, Result};
use crate::linalg::{
    hermitian_fn, is_psd, link_product, partial_trace, permute_systems, vec_doubleket, CMatrix, SystemDims,
};

/// Optimal value of a norm program with its certificate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormValue {
    /// Midpoint of `lower` and `upper`.
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
    pub iterations: usize,
    /// Largest relative residual reported by the solver.
    pub residual: f64,
}

impl NormValue {
    pub(crate) fn from_solution(sol: &ModelSolution) -> NormValue {
        let (a, b) = (sol.primal(), sol.dual());
        let (lower, upper) = if a <= b { (a, b) } else { (b, a) };
        NormValue {
            value: 0.5 * (lower + upper),
            lower,
            upper,
            iterations: sol.iterations(),
            residual: sol.sol.residuals.max(),
        }
    }

    /// Combines two independent bounds on the same quantity.
    pub(crate) fn bracket(lower: NormValue, upper: NormValue) -> NormValue {
        NormValue {
            value: 0.5 * (lower.lower + upper.upper),
            lower: lower.lower,
            upper: upper.upper,
            iterations: lower.iterations + upper.iterations,
            residual: lower.residual.max(upper.residual),
        }
    }

    /// `upper − lower`.
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

/// `ρ` reordered to `order` and transposed, so that `Re Tr[M C]` is the
/// full link product `ρ * C` for `C` laid out as `order`.
pub(crate) fn pairing_matrix(rho: &CMatrix, dims: &SystemDims, order: &SystemDims) -> Result<CMatrix> {
    let (r, _) = permute_systems(rho, dims, &order.labels())?;
    Ok(r.transpose())
}

fn check_psd(rho: &CMatrix, dims: &SystemDims) -> Result<()> {
    dims.check_matrix(rho.rows(), rho.cols())?;
    let defect = rho.hermiticity_defect();
    if defect > 1e-10 * rho.max_abs().max(1.0) {
        return Err(Error::NotHermitian(defect));
    }
    if !is_psd(&rho.hermitian_part(), 1e-8 * rho.max_abs().max(1.0)) {
        return Err(Error::Domain("operator is not positive semidefinite".into()));
    }
    Ok(())
}

/// Is `Tr_out C` zero (to rounding)?
pub fn is_trace_annihilating(delta: &ChoiMap) -> bool {
    match partial_trace(delta.choi(), &delta.dims(), &delta.out_dims().labels()) {
        Ok((t, _)) => t.max_abs() <= 1e-9 * delta.choi().max_abs().max(1.0),
        Err(_) => false,
    }
}

/// `I_out ⊗ σ` on `out ⊗ in` for a variable `σ` on `in`.
fn identity_out(sigma: &HExpr, delta: &ChoiMap) -> Result<HExpr> {
    let (e, _) = sigma.tensor_identity(delta.in_dims(), delta.out_dims(), &delta.dims().labels())?;
    Ok(e)
}

fn diamond_max(delta: &ChoiMap, tol: f64) -> Result<(ModelSolution, Option<HExpr>)> {
    let j = delta.choi();
    let n = j.rows();
    let mut m = Model::new();
    let s = m.herm_psd(delta.d_in());
    m.eq(s.trace(), 1.0);
    let is = identity_out(&s, delta)?;
    let p = m.herm_psd(n);
    if is_trace_annihilating(delta) {
        m.psd(&is.sub(&p));
        m.maximize(p.inner(j) * 2.0);
        let sol = m.solve(tol)?;
        Ok((sol, Some(p)))
    } else {
        let q = m.herm_psd(n);
        m.herm_eq(&p.add(&q), &is);
        m.maximize(p.inner(j) - q.inner(j));
        Ok((m.solve(tol)?, None))
    }
}

/// The dual (minimization) program of the diamond norm.
pub fn diamond_norm_min_form(delta: &ChoiMap, tol: f64) -> Result<NormValue> {
    let j = HExpr::constant(delta.choi());
    let mut m = Model::new();
    let mu = m.free(1).pop().expect("one variable");
    let z = m.herm_psd(j.size());
    m.psd(&z.sub(&j));
    let ta = is_trace_annihilating(delta);
    if !ta {
        m.psd(&z.add(&j));
    }
    let (tz, _) = z.partial_trace(&delta.dims(), &delta.out_dims().labels())?;
    m.psd(&HExpr::zeros(delta.d_in()).add_identity(&mu).sub(&tz));
    m.minimize(if ta { mu * 2.0 } else { mu });
    Ok(NormValue::from_solution(&m.solve(tol)?))
}

/// `‖Δ‖◇` of a Hermitian-preserving map.
///
/// Solves the maximization over input states and the minimization dual to
/// it as two separate programs; `lower` comes from the first and `upper`
/// from the second. For a difference of channels the smaller programs
/// `max 2Tr[PJ], 0 ⪯ P ⪯ I ⊗ σ` and `min 2μ, Z ⪰ 0, Z ⪰ J, Tr_out Z ⪯ μI`
/// are used.
///
/// ```
/// use chancmp::channels::{depolarizing, identity};
/// use chancmp::norms::diamond_norm;
///
/// let d = identity(2).sub(&depolarizing(2, 0.5)?)?;
/// let v = diamond_norm(&d, 1e-8)?;
/// assert!((v.value - 0.75).abs() < 1e-6);
/// # Ok::<(), chancmp::Error>(())
/// ```
pub fn diamond_norm(delta: &ChoiMap, tol: f64) -> Result<NormValue> {
    let (sol, _) = diamond_max(delta, tol)?;
    let lower = NormValue::from_solution(&sol);
    let upper = diamond_norm_min_form(delta, tol)?;
    Ok(NormValue::bracket(lower, upper))
}

/// Diamond norm of a trace-annihilating map together with a state `ρ` on
/// `in ⊗ out` with `⟨ρ, Δ⟩ / ‖ρ‖^◇ = ½‖Δ‖◇`.
pub fn diamond_norm_witness(delta: &ChoiMap, tol: f64) -> Result<(NormValue, CMatrix)> {
    if !is_trace_annihilating(delta) {
        return Err(Error::Domain("a state witness exists only for trace-annihilating maps".into()));
    }
    let (sol, p) = diamond_max(delta, tol)?;
    let p = sol.herm(&p.expect("trace-annihilating form"));
    let order = delta.in_dims().concat(delta.out_dims())?;
    let rho = pairing_matrix(&p, &delta.dims(), &order)?;
    let rho = hermitian_fn(&rho.hermitian_part(), |l| l.max(0.0))?;
    let t = rho.trace().re;
    if t <= 0.0 {
        return Err(Error::Domain("map is zero; no witness".into()));
    }
    let lower = NormValue::from_solution(&sol);
    let upper = diamond_norm_min_form(delta, tol)?;
    Ok((NormValue::bracket(lower, upper), rho.scale(1.0 / t)))
}

/// `ρ` reordered to `condition_on ⊗ rest`, with both layouts.
fn split(rho: &CMatrix, dims: &SystemDims, condition_on: &[&str]) -> Result<(CMatrix, SystemDims, SystemDims)> {
    let a0 = dims.select(condition_on)?;
    let a1 = dims.without(condition_on)?;
    let (r, _) = permute_systems(rho, dims, &a0.concat(&a1)?.labels())?;
    Ok((r, a0, a1))
}

fn dual_diamond_model(rho: &CMatrix, dims: &SystemDims, condition_on: &[&str]) -> Result<(Model, HExpr, SystemDims)> {
    check_psd(rho, dims)?;
    let (r, a0, a1) = split(rho, dims, condition_on)?;
    let order = a0.concat(&a1)?;
    let mut m = Model::new();
    let x = m.herm_psd(a0.total());
    let (xi, _) = x.tensor_identity(&a0, &a1, &order.labels())?;
    m.psd(&xi.sub(&HExpr::constant(&r.hermitian_part())));
    m.minimize(x.trace());
    Ok((m, x, a0))
}

/// `‖ρ‖^◇_{A1|A0} = min{Tr X : X ⪰ 0, ρ ⪯ X ⊗ I_{A1}}` with `A0` the factors
/// in `condition_on` and `A1` the rest. Equals `2^{−H_min(A1|A0)}`.
///
/// ```
/// use chancmp::linalg::{max_entangled, SystemDims};
/// use chancmp::norms::dual_diamond_norm;
///
/// let dims = SystemDims::new([("A0", 2), ("A1", 2)])?;
/// let v = dual_diamond_norm(&max_entangled(2), &dims, &["A0"], 1e-8)?;
/// assert!((v.value - 2.0).abs() < 1e-6);
/// # Ok::<(), chancmp::Error>(())
/// ```
pub fn dual_diamond_norm(rho: &CMatrix, dims: &SystemDims, condition_on: &[&str], tol: f64) -> Result<NormValue> {
    let (m, _, _) = dual_diamond_model(rho, dims, condition_on)?;
    Ok(NormValue::from_solution(&m.solve(tol)?))
}

/// Conditional min-entropy in bits.
pub fn hmin(rho: &CMatrix, dims: &SystemDims, condition_on: &[&str], tol: f64) -> Result<f64> {
    Ok(-dual_diamond_norm(rho, dims, condition_on, tol)?.value.log2())
}

/// The same norm as `max ⟨ρ, α⟩` over channels `α: A0 → A1`; returns the
/// optimal channel too.
pub fn dual_diamond_norm_max_form(
    rho: &CMatrix,
    dims: &SystemDims,
    condition_on: &[&str],
    tol: f64,
) -> Result<(NormValue, ChoiMap)> {
    check_psd(rho, dims)?;
    let a0 = dims.select(condition_on)?;
    let a1 = dims.without(condition_on)?;
    let cd = a1.concat(&a0)?;
    let mut m = Model::new();
    let c = m.herm_psd(cd.total());
    let (tc, _) = c.partial_trace(&cd, &a1.labels())?;
    m.herm_eq(&tc, &HExpr::constant(&CMatrix::identity(a0.total())));
    m.maximize(c.inner(&pairing_matrix(rho, dims, &cd)?));
    let sol = m.solve(tol)?;
    let alpha = ChoiMap::new(sol.herm(&c), a0, a1)?;
    Ok((NormValue::from_solution(&sol), alpha))
}

/// Factorization `ρ = (V ⊗ I) G (V ⊗ I)*` with `Tr[VV*] = 1` and
/// `‖G‖ = ‖ρ‖^◇_{A1|A0}`, read off an optimal `X` of the minimization.
#[derive(Clone, Debug)]
pub struct Decomposition {
    /// Operator on the conditioning factors.
    pub v: CMatrix,
    /// Operator on `A0 ⊗ A1` (conditioning factors first).
    pub g: CMatrix,
    pub norm: NormValue,
    /// Layout of `g`.
    pub dims: SystemDims,
}

/// See [`Decomposition`]. Eigenvalues below `1e-9` (relative) count as
/// zero when restricting to the support.
pub fn dualnorm_decompose(rho: &CMatrix, dims: &SystemDims, condition_on: &[&str], tol: f64) -> Result<Decomposition> {
    if rho.max_abs() == 0.0 {
        return Err(Error::Domain("cannot decompose the zero operator".into()));
    }
    let (m, x, a0) = dual_diamond_model(rho, dims, condition_on)?;
    let sol = m.solve(tol)?;
    let norm = NormValue::from_solution(&sol);
    let (r, a0, a1) = split(rho, dims, &a0.labels())?;
    let gd = a0.concat(&a1)?;
    let (r0, _) = partial_trace(&r, &gd, &a1.labels())?;

    // restrict X to the support of ρ_{A0}; this keeps it feasible and optimal
    let (l0, u0) = crate::linalg::herm_eig(&r0.hermitian_part())?;
    let top = l0.last().copied().unwrap_or(0.0).max(0.0);
    let keep: Vec<f64> = l0.iter().map(|&l| if l > 1e-9 * top { 1.0 } else { 0.0 }).collect();
    let proj = crate::linalg::spectral(&keep, &u0);
    let xs = proj.mul(&sol.herm(&x)).mul(&proj).hermitian_part();
    let lam = xs.trace().re;
    let (lx, ux) = crate::linalg::herm_eig(&xs)?;
    let xtop = lx.last().copied().unwrap_or(0.0).max(0.0);
    let on: Vec<bool> = lx.iter().map(|&l| l > 1e-9 * xtop.max(1e-300)).collect();
    let sq: Vec<f64> = lx.iter().zip(&on).map(|(&l, &o)| if o { (l / lam).sqrt() } else { 0.0 }).collect();
    let isq: Vec<f64> = lx.iter().zip(&on).map(|(&l, &o)| if o { (lam / l).sqrt() } else { 0.0 }).collect();
    let v = crate::linalg::spectral(&sq, &ux);
    let vinv = crate::linalg::spectral(&isq, &ux);
    let i1 = CMatrix::identity(a1.total());
    let w = crate::linalg::kron(&vinv, &i1);
    let mut g = w.mul(&r).mul(&w).hermitian_part();
    // pad the kernel of V so that ‖G‖ is attained there as well
    let comp: Vec<f64> = on.iter().map(|&o| if o { 0.0 } else { lam }).collect();
    let pad = crate::linalg::spectral(&comp, &ux);
    if pad.max_abs() > 0.0 {
        g += &crate::linalg::kron(&pad, &i1);
    }
    Ok(Decomposition { v, g, norm, dims: gd })
}

/// Labels of the four wires of a superchannel `(A0 → A1) ↦ (A0' → A1')`.
/// Any of them may be empty (a trivial wire).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CombWires {
    pub a0: Vec<String>,
    pub a1: Vec<String>,
    pub a0p: Vec<String>,
    pub a1p: Vec<String>,
}

fn owned(l: &[&str]) -> Vec<String> {
    l.iter().map(|s| s.to_string()).collect()
}

fn refs(l: &[String]) -> Vec<&str> {
    l.iter().map(String::as_str).collect()
}

impl CombWires {
    pub fn new(a0: &[&str], a1: &[&str], a0p: &[&str], a1p: &[&str]) -> CombWires {
        CombWires { a0: owned(a0), a1: owned(a1), a0p: owned(a0p), a1p: owned(a1p) }
    }

    /// Layouts `(A0, A1, A0', A1')` taken from `dims`, which must hold
    /// exactly these factors.
    pub fn resolve(&self, dims: &SystemDims) -> Result<[SystemDims; 4]> {
        let all: Vec<&String> = self.a0.iter().chain(&self.a1).chain(&self.a0p).chain(&self.a1p).collect();
        if all.len() != dims.len() || dims.labels().iter().any(|l| !all.iter().any(|a| a == l)) {
            return Err(Error::Layout(format!("wires {self:?} do not match {dims}")));
        }
        Ok([
            dims.select(&refs(&self.a0))?,
            dims.select(&refs(&self.a1))?,
            dims.select(&refs(&self.a0p))?,
            dims.select(&refs(&self.a1p))?,
        ])
    }

    /// `A1' A0 A0' A1`, the layout of a superchannel's Choi matrix.
    pub fn choi_order(&self) -> Vec<&str> {
        self.a1p.iter().chain(&self.a0).chain(&self.a0p).chain(&self.a1).map(String::as_str).collect()
    }

    fn without(&self, gone: &[String]) -> CombWires {
        let f = |v: &Vec<String>| v.iter().filter(|l| !gone.contains(l)).cloned().collect();
        CombWires { a0: f(&self.a0), a1: f(&self.a1), a0p: f(&self.a0p), a1p: f(&self.a1p) }
    }
}

/// Which superchannels a restricted norm optimizes over.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FVariant {
    /// `Θ(Φ) = Λ ∘ Φ`; `A0` and `A0'` are the same wire.
    Post,
    /// `Θ(Φ) = Φ ∘ Λ`; `A1` and `A1'` are the same wire.
    Pre,
    /// Superchannels acting on part of the wires; each pair
    /// `(A-side label, A'-side label)` names a wire passed through untouched.
    Partial { fixed: Vec<(String, String)> },
    FullComb,
    /// Combs that are also combs with the roles of the two slots swapped.
    NoSignaling,
    /// Combs whose Choi matrix stays PSD after transposing the listed
    /// factors. A relaxation: the value bounds the LOCC-restricted norm
    /// from above.
    PptComb { party: Vec<String> },
    /// Not computable; rejected with [`Error::Unsupported`].
    Locc,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FSpec {
    pub variant: FVariant,
    pub wires: CombWires,
}

/// Contracts each pair of factors with `|I>><<I|`, i.e. connects them as
/// one wire in the link product.
pub fn contract_pairs(rho: &CMatrix, dims: &SystemDims, pairs: &[(String, String)]) -> Result<(CMatrix, SystemDims)> {
    let mut r = rho.clone();
    let mut d = dims.clone();
    for (a, b) in pairs {
        let (da, db) = (d.dim(a)?, d.dim(b)?);
        if da != db {
            return Err(Error::Dimension(format!("cannot connect `{a}` ({da}) with `{b}` ({db})")));
        }
        let id = CMatrix::projector(&vec_doubleket(&CMatrix::identity(da)));
        let idd = SystemDims::new([(a.clone(), da), (b.clone(), db)])?;
        let (nr, nd) = link_product(&r, &d, &id, &idd)?;
        r = nr;
        d = nd;
    }
    Ok((r, d))
}

fn pairs_of(a: &[String], b: &[String]) -> Result<Vec<(String, String)>> {
    if a.len() != b.len() {
        return Err(Error::Layout(format!("cannot identify wires {a:?} and {b:?}")));
    }
    Ok(a.iter().cloned().zip(b.iter().cloned()).collect())
}

/// A Hermitian PSD variable constrained to be the Choi matrix of a
/// superchannel, laid out as `A1' A0 A0' A1`.
pub(crate) struct CombVar {
    pub c: HExpr,
    pub dims: SystemDims,
}

pub(crate) fn comb_variable(m: &mut Model, w: &[SystemDims; 4], no_signaling: bool) -> Result<CombVar> {
    let [a0, a1, a0p, a1p] = w;
    let dims = a1p.concat(a0)?.concat(a0p)?.concat(a1)?;
    let c = m.herm_psd(dims.total());
    // Tr_{A1'} C = I_{A1} ⊗ C₂,  Tr_{A0} C₂ = I_{A0'}
    let (t1, t1d) = c.partial_trace(&dims, &a1p.labels())?;
    let c2d = a0.concat(a0p)?;
    let c2 = m.herm_free(c2d.total());
    let (c2i, _) = c2.tensor_identity(&c2d, a1, &t1d.labels())?;
    m.herm_eq(&t1, &c2i);
    let (t2, _) = c2.partial_trace(&c2d, &a0.labels())?;
    m.herm_eq(&t2, &HExpr::constant(&CMatrix::identity(a0p.total())));
    if no_signaling {
        // Tr_{A0} C = I_{A0'} ⊗ D₂,  Tr_{A1'} D₂ = I_{A1}
        let (u1, u1d) = c.partial_trace(&dims, &a0.labels())?;
        let d2d = a1p.concat(a1)?;
        let d2 = m.herm_free(d2d.total());
        let (d2i, _) = d2.tensor_identity(&d2d, a0p, &u1d.labels())?;
        m.herm_eq(&u1, &d2i);
        let (u2, _) = d2.partial_trace(&d2d, &a1p.labels())?;
        m.herm_eq(&u2, &HExpr::constant(&CMatrix::identity(a1.total())));
    }
    Ok(CombVar { c, dims })
}

fn comb_norm(rho: &CMatrix, dims: &SystemDims, wires: &CombWires, extra: &FVariant, tol: f64) -> Result<NormValue> {
    check_psd(rho, dims)?;
    let w = wires.resolve(dims)?;
    let mut m = Model::new();
    let cv = comb_variable(&mut m, &w, *extra == FVariant::NoSignaling)?;
    if let FVariant::PptComb { party } = extra {
        let pt = cv.c.partial_transpose(&cv.dims, &refs(party))?;
        m.psd(&pt);
    }
    m.maximize(cv.c.inner(&pairing_matrix(rho, dims, &cv.dims)?));
    Ok(NormValue::from_solution(&m.solve(tol)?))
}

/// `‖ρ‖^{2◇} = max ⟨ρ, Θ⟩` over superchannels with the given wires.
pub fn two_diamond(rho: &CMatrix, dims: &SystemDims, wires: &CombWires, tol: f64) -> Result<NormValue> {
    comb_norm(rho, dims, wires, &FVariant::FullComb, tol)
}

/// Conditional 2-min-entropy in bits.
pub fn hmin2(rho: &CMatrix, dims: &SystemDims, wires: &CombWires, tol: f64) -> Result<f64> {
    Ok(-two_diamond(rho, dims, wires, tol)?.value.log2())
}

/// `‖ρ‖^{2◇}` from the minimization `min Tr s` over `Y ⪰ 0` on `A0' A1 A0`
/// with `Tr_{A1} Y = I_{A0} ⊗ s` and `ρ ⪯ Y ⊗ I_{A1'}`.
pub fn two_diamond_min_form(rho: &CMatrix, dims: &SystemDims, wires: &CombWires, tol: f64) -> Result<NormValue> {
    check_psd(rho, dims)?;
    let [a0, a1, a0p, a1p] = wires.resolve(dims)?;
    let yd = a0p.concat(&a1)?.concat(&a0)?;
    let mut m = Model::new();
    let y = m.herm_psd(yd.total());
    let s = m.herm_psd(a0p.total());
    let (ty, tyd) = y.partial_trace(&yd, &a1.labels())?;
    let (si, _) = s.tensor_identity(&a0p, &a0, &tyd.labels())?;
    m.herm_eq(&ty, &si);
    let (yi, _) = y.tensor_identity(&yd, &a1p, &dims.labels())?;
    m.psd(&yi.sub(&HExpr::constant(&rho.hermitian_part())));
    m.minimize(s.trace());
    Ok(NormValue::from_solution(&m.solve(tol)?))
}

/// `‖ρ‖^F = sup ⟨ρ, Θ⟩` over the superchannels allowed by `f`.
///
/// Post- and preprocessings reduce to [`dual_diamond_norm`] after the
/// fixed wires are connected; the comb variants solve one program over
/// superchannel Choi matrices.
pub fn f_norm(rho: &CMatrix, dims: &SystemDims, f: &FSpec, tol: f64) -> Result<NormValue> {
    let w = &f.wires;
    match &f.variant {
        FVariant::Post => {
            let pairs = pairs_of(&w.a0, &w.a0p)?;
            let (r, d) = contract_pairs(rho, dims, &pairs)?;
            dual_diamond_norm(&r, &d, &refs(&w.a1), tol)
        }
        FVariant::Pre => {
            let pairs = pairs_of(&w.a1, &w.a1p)?;
            let (r, d) = contract_pairs(rho, dims, &pairs)?;
            dual_diamond_norm(&r, &d, &refs(&w.a0p), tol)
        }
        FVariant::Partial { fixed } => {
            let (r, d) = contract_pairs(rho, dims, fixed)?;
            let gone: Vec<String> = fixed.iter().flat_map(|(a, b)| [a.clone(), b.clone()]).collect();
            comb_norm(&r, &d, &w.without(&gone), &FVariant::FullComb, tol)
        }
        FVariant::FullComb | FVariant::NoSignaling | FVariant::PptComb { .. } => {
            comb_norm(rho, dims, w, &f.variant, tol)
        }
        FVariant::Locc => Err(Error::Unsupported(
            "LOCC superchannels have no tractable description; use PptComb for an upper bound".into(),
        )),
    }
}

/// `−log₂ ‖ρ‖^F`.
pub fn hmin_f(rho: &CMatrix, dims: &SystemDims, f: &FSpec, tol: f64) -> Result<f64> {
    Ok(-f_norm(rho, dims, f, tol)?.value.log2())
}
