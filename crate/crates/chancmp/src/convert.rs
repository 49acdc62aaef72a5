//! Conversion distances: how well one channel can be turned into another
//! by a restricted class of superchannels, measured in diamond norm.
//!
//! Each distance is a single minimization: the dual diamond-norm program
//! `min 2μ, Z ⪰ 0, Z ⪰ J, Tr_out Z ⪯ μI` with `J = Θ(Φ₁) − Φ₂` linear in the
//! Choi matrix of the processing `Θ`, which is a variable of the same
//! program. The multipliers of the solved program give a state `ρ` on
//! `in ⊗ out` of the target, used as a witness by [`verify_rand_chans`].

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channels::{apply_partial, ChoiMap, SuperchannelChoi};
use crate::conic::model::{HExpr, Lin, Model, ModelSolution};
use crate::error::{Error, Result};
use crate::games::{MeasurementSet, SweepReport, Violation};
use crate::linalg::{
    hermitian_fn, kron, link_product, permute_systems, purified_distance, trace_norm, CMatrix, SystemDims,
};
use crate::norms::{
    contract_pairs, diamond_norm, dual_diamond_norm, f_norm, pairing_matrix, CombWires, FSpec, FVariant, NormValue,
};
use crate::random;

/// Which processings of `Φ₁` are allowed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Variant {
    /// `Λ ∘ Φ₁`; both maps share their input.
    Post,
    /// `Φ₁ ∘ Λ`; both maps share their output.
    Pre,
    /// `(Θ ⊗ id_B)(Φ₁)` with the listed input and output factors passed
    /// through untouched. Both maps must carry these labels.
    Partial { fixed_in: Vec<String>, fixed_out: Vec<String> },
    /// Any superchannel.
    Comb,
    /// Superchannels that are combs in both slot orders.
    NoSignaling,
}

impl Variant {
    pub fn partial(fixed_in: &[&str], fixed_out: &[&str]) -> Variant {
        let own = |l: &[&str]| l.iter().map(|s| s.to_string()).collect();
        Variant::Partial { fixed_in: own(fixed_in), fixed_out: own(fixed_out) }
    }
}

/// The processing attaining a conversion distance.
#[derive(Clone, Debug)]
pub enum Optimizer {
    Channel(ChoiMap),
    Comb(SuperchannelChoi),
    /// `p[y][j][x][i] = p(x, i | y, j)` and its marginal `q[y][i]`.
    CondProb { p: Vec<Vec<Vec<Vec<f64>>>>, q: Vec<Vec<f64>> },
}

#[derive(Clone, Debug)]
pub struct ConversionResult {
    pub delta: NormValue,
    /// `‖Θ(Φ₁) − Φ₂‖◇` recomputed from the returned optimizer.
    pub achieved: f64,
    pub optimizer: Optimizer,
    /// Normalized state on `in ⊗ out` of the target built from the
    /// multipliers; it maximizes the violation in [`verify_rand_chans`].
    pub witness: CMatrix,
    pub witness_dims: SystemDims,
}

/// Labels derived from `labels` that avoid `taken`; `taken` grows.
fn fresh_names(labels: &[&str], taken: &mut Vec<String>) -> Vec<String> {
    labels
        .iter()
        .map(|l| {
            let mut c = format!("{l}'");
            while taken.contains(&c) {
                c.push('\'');
            }
            taken.push(c.clone());
            c
        })
        .collect()
}

fn all_labels(maps: &[&ChoiMap]) -> Vec<String> {
    maps.iter().flat_map(|m| m.dims().labels().into_iter().map(String::from).collect::<Vec<_>>()).collect()
}

fn refs(v: &[String]) -> Vec<&str> {
    v.iter().map(String::as_str).collect()
}

/// Solves `min 2μ, Z ⪰ 0, Z ⪰ J, Tr_out Z ⪯ μI` for `J` on `out ⊗ in`
/// and extracts the witness `I ⊗ σ' − Ω` from the multipliers.
fn solve_conversion(
    mut m: Model,
    j: &HExpr,
    out: &SystemDims,
    inp: &SystemDims,
    tol: f64,
) -> Result<(ModelSolution, NormValue, CMatrix, SystemDims)> {
    let jd = out.concat(inp)?;
    let mu = m.free(1).pop().expect("one variable");
    let z = m.herm_psd(jd.total());
    let c1 = m.psd(&z.sub(j));
    let (tz, _) = z.partial_trace(&jd, &out.labels())?;
    let c2 = m.psd(&HExpr::zeros(inp.total()).add_identity(&mu).sub(&tz));
    m.minimize(mu * 2.0);
    let sol = m.solve(tol)?;
    let omega = sol.psd_dual(&c1);
    let sigma = sol.psd_dual(&c2);
    let w = &kron(&CMatrix::identity(out.total()), &sigma) - &omega;
    let wd = inp.concat(out)?;
    let rho = pairing_matrix(&w, &jd, &wd)?;
    let rho = hermitian_fn(&rho.hermitian_part(), |l| l.max(0.0))?;
    let t = rho.trace().re;
    let rho = if t > 1e-12 {
        rho.scale(1.0 / t)
    } else {
        CMatrix::identity(wd.total()).scale(1.0 / wd.total() as f64)
    };
    let nv = NormValue::from_solution(&sol);
    Ok((sol, nv, rho, wd))
}

/// Nearest channel in a cheap sense: drop negative eigenvalues, then
/// rescale by `(Tr_out C)^{-1/2}` on the input.
pub fn repair_channel(phi: &ChoiMap) -> Result<ChoiMap> {
    let c = hermitian_fn(phi.choi(), |l| l.max(0.0))?;
    let (t, _) = crate::linalg::partial_trace(&c, &phi.dims(), &phi.out_dims().labels())?;
    let top = crate::linalg::max_eig(&t)?.max(1e-300);
    let s = hermitian_fn(&t, |l| if l > 1e-12 * top { l.powf(-0.5) } else { 0.0 })?;
    let k = kron(&CMatrix::identity(phi.d_out()), &s);
    let c = k.mul(&c).mul(&k);
    // inputs with no support get the completely depolarizing channel
    let p = hermitian_fn(&t, |l| if l > 1e-12 * top { 0.0 } else { 1.0 })?;
    let c = &c + &kron(&CMatrix::identity(phi.d_out()), &p.transpose()).scale(1.0 / phi.d_out() as f64);
    ChoiMap::new(c.hermitian_part(), phi.in_dims().clone(), phi.out_dims().clone())
}

fn channel_variable(m: &mut Model, inp: &SystemDims, out: &SystemDims) -> Result<(HExpr, SystemDims)> {
    let ld = out.concat(inp)?;
    let l = m.herm_psd(ld.total());
    let (t, _) = l.partial_trace(&ld, &out.labels())?;
    m.herm_eq(&t, &HExpr::constant(&CMatrix::identity(inp.total())));
    Ok((l, ld))
}

fn achieved(actual: &CMatrix, adims: &SystemDims, target: &ChoiMap, tol: f64) -> Result<f64> {
    let (a, _) = permute_systems(actual, adims, &target.dims().labels())?;
    let a = ChoiMap::new(a.hermitian_part(), target.in_dims().clone(), target.out_dims().clone())?;
    Ok(diamond_norm(&a.sub(target)?, tol)?.value)
}

/// `δ_post(Φ₁‖Φ₂) = min_Λ ‖Λ ∘ Φ₁ − Φ₂‖◇`. The optimizer's input carries
/// primed copies of `Φ₁`'s output labels.
///
/// ```
/// use chancmp::channels::{depolarizing, identity};
/// use chancmp::convert::delta_post;
///
/// let r = delta_post(&identity(2), &depolarizing(2, 0.3)?, 1e-8)?;
/// assert!(r.delta.value < 1e-6);
/// # Ok::<(), chancmp::Error>(())
/// ```
pub fn delta_post(phi1: &ChoiMap, phi2: &ChoiMap, tol: f64) -> Result<ConversionResult> {
    if phi1.in_dims() != phi2.in_dims() {
        return Err(Error::Dimension(format!("inputs differ: {} vs {}", phi1.in_dims(), phi2.in_dims())));
    }
    let mut taken = all_labels(&[phi1, phi2]);
    let outs = fresh_names(&phi1.out_dims().labels(), &mut taken);
    let p1 = phi1.relabel(&phi1.in_dims().labels(), &refs(&outs))?;
    let mut m = Model::new();
    let (l, ld) = channel_variable(&mut m, p1.out_dims(), phi2.out_dims())?;
    let (j, jd) = l.link(&ld, p1.choi(), &p1.dims())?;
    let (j, _) = j.permute(&jd, &phi2.dims().labels())?;
    let j = j.sub(&HExpr::constant(phi2.choi()));
    let (sol, delta, witness, witness_dims) = solve_conversion(m, &j, phi2.out_dims(), phi2.in_dims(), tol)?;
    let lam = repair_channel(&ChoiMap::new(sol.herm(&l), p1.out_dims().clone(), phi2.out_dims().clone())?)?;
    let composed = p1.then(&lam)?;
    let achieved = achieved(composed.choi(), &composed.dims(), phi2, tol)?;
    Ok(ConversionResult { delta, achieved, optimizer: Optimizer::Channel(lam), witness, witness_dims })
}

/// `δ_pre(Φ₁‖Φ₂) = min_Λ ‖Φ₁ ∘ Λ − Φ₂‖◇`. The optimizer's output carries
/// primed copies of `Φ₁`'s input labels.
pub fn delta_pre(phi1: &ChoiMap, phi2: &ChoiMap, tol: f64) -> Result<ConversionResult> {
    if phi1.out_dims() != phi2.out_dims() {
        return Err(Error::Dimension(format!("outputs differ: {} vs {}", phi1.out_dims(), phi2.out_dims())));
    }
    let mut taken = all_labels(&[phi1, phi2]);
    let ins = fresh_names(&phi1.in_dims().labels(), &mut taken);
    let p1 = phi1.relabel(&refs(&ins), &phi1.out_dims().labels())?;
    let mut m = Model::new();
    let (l, ld) = channel_variable(&mut m, phi2.in_dims(), p1.in_dims())?;
    let (j, jd) = HExpr::link_left(p1.choi(), &p1.dims(), &l, &ld)?;
    let (j, _) = j.permute(&jd, &phi2.dims().labels())?;
    let j = j.sub(&HExpr::constant(phi2.choi()));
    let (sol, delta, witness, witness_dims) = solve_conversion(m, &j, phi2.out_dims(), phi2.in_dims(), tol)?;
    let lam = repair_channel(&ChoiMap::new(sol.herm(&l), phi2.in_dims().clone(), p1.in_dims().clone())?)?;
    let composed = lam.then(&p1)?;
    let achieved = achieved(composed.choi(), &composed.dims(), phi2, tol)?;
    Ok(ConversionResult { delta, achieved, optimizer: Optimizer::Channel(lam), witness, witness_dims })
}

/// Superchannels acting on the factors not listed in `fixed_in` /
/// `fixed_out`, which pass through. The optimizer's `A0`/`A1` wires carry
/// primed copies of `Φ₁`'s labels.
fn delta_superchannel(
    phi1: &ChoiMap,
    phi2: &ChoiMap,
    fixed_in: &[&str],
    fixed_out: &[&str],
    no_signaling: bool,
    tol: f64,
) -> Result<ConversionResult> {
    if no_signaling && !(fixed_in.is_empty() && fixed_out.is_empty()) {
        return Err(Error::Unsupported("no-signaling conversions act on all wires".into()));
    }
    for (a, b, fixed) in [(phi1.in_dims(), phi2.in_dims(), fixed_in), (phi1.out_dims(), phi2.out_dims(), fixed_out)] {
        if a.select(fixed)? != b.select(fixed)? {
            return Err(Error::Dimension(format!("passed-through wires {fixed:?} differ")));
        }
    }
    let a0_old = phi1.in_dims().without(fixed_in)?;
    let a1_old = phi1.out_dims().without(fixed_out)?;
    let mut taken = all_labels(&[phi1, phi2]);
    let a0n = fresh_names(&a0_old.labels(), &mut taken);
    let a1n = fresh_names(&a1_old.labels(), &mut taken);
    let ren = |d: &SystemDims, old: &SystemDims, new: &[String]| -> Vec<String> {
        d.labels()
            .iter()
            .map(|l| old.position(l).map_or(l.to_string(), |p| new[p].clone()))
            .collect()
    };
    let in_l = ren(phi1.in_dims(), &a0_old, &a0n);
    let out_l = ren(phi1.out_dims(), &a1_old, &a1n);
    let p1 = phi1.relabel(&refs(&in_l), &refs(&out_l))?;
    let wires = [
        p1.in_dims().select(&refs(&a0n))?,
        p1.out_dims().select(&refs(&a1n))?,
        phi2.in_dims().without(fixed_in)?,
        phi2.out_dims().without(fixed_out)?,
    ];
    let mut m = Model::new();
    let cv = crate::norms::comb_variable(&mut m, &wires, no_signaling)?;
    let (j, jd) = cv.c.link(&cv.dims, p1.choi(), &p1.dims())?;
    let (j, _) = j.permute(&jd, &phi2.dims().labels())?;
    let j = j.sub(&HExpr::constant(phi2.choi()));
    let (sol, delta, witness, witness_dims) = solve_conversion(m, &j, phi2.out_dims(), phi2.in_dims(), tol)?;
    let [a0, a1, a0p, a1p] = wires;
    let theta = SuperchannelChoi::new(sol.herm(&cv.c), a0, a1, a0p, a1p)?;
    let (c, cd) = link_product(theta.choi(), &theta.dims(), p1.choi(), &p1.dims())?;
    let achieved = achieved(&c, &cd, phi2, tol)?;
    Ok(ConversionResult { delta, achieved, optimizer: Optimizer::Comb(theta), witness, witness_dims })
}

/// `min_Θ ‖(Θ ⊗ id_B)(Φ₁) − Φ₂‖◇` over superchannels on the remaining wires.
pub fn delta_partial(
    phi1: &ChoiMap,
    phi2: &ChoiMap,
    fixed_in: &[&str],
    fixed_out: &[&str],
    tol: f64,
) -> Result<ConversionResult> {
    delta_superchannel(phi1, phi2, fixed_in, fixed_out, false, tol)
}

/// `min_Θ ‖Θ(Φ₁) − Φ₂‖◇` over all superchannels, or over no-signaling ones.
pub fn delta_comb(phi1: &ChoiMap, phi2: &ChoiMap, no_signaling: bool, tol: f64) -> Result<ConversionResult> {
    delta_superchannel(phi1, phi2, &[], &[], no_signaling, tol)
}

/// Dispatches on `variant`.
pub fn delta(phi1: &ChoiMap, phi2: &ChoiMap, variant: &Variant, tol: f64) -> Result<ConversionResult> {
    match variant {
        Variant::Post => delta_post(phi1, phi2, tol),
        Variant::Pre => delta_pre(phi1, phi2, tol),
        Variant::Partial { fixed_in, fixed_out } => delta_partial(phi1, phi2, &refs(fixed_in), &refs(fixed_out), tol),
        Variant::Comb => delta_comb(phi1, phi2, false, tol),
        Variant::NoSignaling => delta_comb(phi1, phi2, true, tol),
    }
}

/// `Δ(a, b) = max{δ(a‖b), δ(b‖a)}`.
pub fn delta_symmetric(a: &ChoiMap, b: &ChoiMap, variant: &Variant, tol: f64) -> Result<f64> {
    Ok(delta(a, b, variant, tol)?.delta.value.max(delta(b, a, variant, tol)?.delta.value))
}

/// The channel `Σ_{y,x} |x><x| ⊗ |y><y| ⊗ (N^y_x)ᵀ` that takes a choice of
/// measurement `y` and a state on `C` to the outcome `x`; layout
/// `X ⊗ Y ⊗ C`.
pub fn meas_set_channel(set: &MeasurementSet) -> Result<ChoiMap> {
    let (ny, nx, d) = (set.len(), set.outcomes(), set.dim());
    let mut c = CMatrix::zeros(nx * ny * d, nx * ny * d);
    for (y, povm) in set.povms().iter().enumerate() {
        for (x, e) in povm.effects().iter().enumerate() {
            let b = (x * ny + y) * d;
            for r in 0..d {
                for s in 0..d {
                    c[(b + r, b + s)] = e[(s, r)];
                }
            }
        }
    }
    ChoiMap::new(c, SystemDims::new([("Y", ny), ("C", d)])?, SystemDims::single("X", nx))
}

/// Largest violation of the c-c superchannel structure of `p`:
/// normalization per `(y, j)` and `Σ_x p(x,i|y,j)` independent of `j`.
pub fn cc_structure_residual(p: &[Vec<Vec<Vec<f64>>>]) -> f64 {
    let mut worst: f64 = 0.0;
    for py in p {
        for pj in py {
            let s: f64 = pj.iter().flatten().sum();
            worst = worst.max((s - 1.0).abs());
            worst = worst.max(pj.iter().flatten().fold(0.0, |a: f64, &v| a.max(-v)));
            for i in 0..pj.first().map_or(0, Vec::len) {
                let a: f64 = pj.iter().map(|r| r[i]).sum();
                let b: f64 = py[0].iter().map(|r| r[i]).sum();
                worst = worst.max((a - b).abs());
            }
        }
    }
    worst
}

/// `N'^y_x = Σ_{i,j} p(x,i|y,j) M^i_j`.
fn simulated_effects(m_set: &MeasurementSet, p: &[Vec<Vec<Vec<f64>>>]) -> Vec<Vec<CMatrix>> {
    let d = m_set.dim();
    p.iter()
        .map(|py| {
            (0..py[0].len())
                .map(|x| {
                    let mut e = CMatrix::zeros(d, d);
                    for (j, pj) in py.iter().enumerate() {
                        for (i, m) in m_set.povms().iter().enumerate() {
                            e += &m.effects()[j].scale(pj[x][i]);
                        }
                    }
                    e
                })
                .collect()
        })
        .collect()
}

/// How well the measurements `ℕ` can be simulated by classically choosing
/// a member of `𝕄` and post-processing its outcome: the diamond distance
/// between the channels of [`meas_set_channel`], minimized over
/// conditional probabilities `p(x, i | y, j)` whose marginal in `i` does
/// not depend on the outcome `j`.
pub fn delta_meas_sim(m_set: &MeasurementSet, n_set: &MeasurementSet, tol: f64) -> Result<ConversionResult> {
    if m_set.dim() != n_set.dim() {
        return Err(Error::Dimension("measurement sets act on different systems".into()));
    }
    let (k, mo) = (m_set.len(), m_set.outcomes());
    let (ny, nx, d) = (n_set.len(), n_set.outcomes(), n_set.dim());
    let target = meas_set_channel(n_set)?;
    let mut m = Model::new();
    // p[y][j][x][i]
    let vars: Vec<Vec<Vec<Vec<Lin>>>> = (0..ny)
        .map(|_| {
            (0..mo)
                .map(|_| {
                    let flat = m.nonneg(nx * k);
                    flat.chunks(k).map(<[Lin]>::to_vec).collect()
                })
                .collect()
        })
        .collect();
    for py in &vars {
        for pj in py {
            let mut s = Lin::zero();
            pj.iter().flatten().for_each(|v| s += v);
            m.eq(s, 1.0);
        }
        for pj in py.iter().skip(1) {
            for i in 0..k {
                let mut s = Lin::zero();
                for x in 0..nx {
                    s += &pj[x][i];
                    s += &(py[0][x][i].clone() * -1.0);
                }
                m.eq(s, 0.0);
            }
        }
    }
    let n = nx * ny * d;
    let mut j = HExpr::constant(&target.choi().scale(-1.0));
    for (y, py) in vars.iter().enumerate() {
        for (jj, pj) in py.iter().enumerate() {
            for (x, px) in pj.iter().enumerate() {
                for (i, v) in px.iter().enumerate() {
                    let e = &m_set.povms()[i].effects()[jj];
                    let b = (x * ny + y) * d;
                    let block = CMatrix::from_fn(n, n, |r, s| {
                        if r >= b && r < b + d && s >= b && s < b + d {
                            e[(s - b, r - b)]
                        } else {
                            crate::C64::new(0.0, 0.0)
                        }
                    });
                    j = j.add_lin_times(v, &block);
                }
            }
        }
    }
    let (sol, delta, witness, witness_dims) = solve_conversion(m, &j, target.out_dims(), target.in_dims(), tol)?;
    let p: Vec<Vec<Vec<Vec<f64>>>> = vars
        .iter()
        .map(|py| {
            py.iter()
                .map(|pj| {
                    let raw: Vec<Vec<f64>> = pj.iter().map(|px| px.iter().map(|v| sol.lin(v).max(0.0)).collect()).collect();
                    let s: f64 = raw.iter().flatten().sum();
                    raw.into_iter().map(|r| r.into_iter().map(|v| v / s).collect()).collect()
                })
                .collect()
        })
        .collect();
    let q: Vec<Vec<f64>> = p.iter().map(|py| (0..k).map(|i| py[0].iter().map(|r| r[i]).sum()).collect()).collect();
    // re-evaluate with the cleaned probabilities
    let sim = simulated_effects(m_set, &p);
    let povms = sim
        .into_iter()
        .map(|effects| crate::games::Povm::new(effects, SystemDims::single("A", d)))
        .collect::<Result<Vec<_>>>()?;
    let ach = meas_set_channel(&MeasurementSet::new(povms)?)?;
    let achieved = diamond_norm(&ach.sub(&target)?, tol)?.value;
    Ok(ConversionResult { delta, achieved, optimizer: Optimizer::CondProb { p, q }, witness, witness_dims })
}

/// `inf_σ ‖(Φ₁ ⊗ id)(σ) − (Φ₂ ⊗ id)(ξ)‖₁` over states `σ` on `in₁ ⊗ R` with
/// `σ_R = ξ_R`, for `ξ` on `in₂ ⊗ R` (`R` = the factors `r_labels`).
/// The supremum over `ξ` lower-bounds `δ_pre(Φ₁‖Φ₂)`.
pub fn pre_range_inner(
    phi1: &ChoiMap,
    phi2: &ChoiMap,
    xi: &CMatrix,
    xi_dims: &SystemDims,
    r_labels: &[&str],
    tol: f64,
) -> Result<NormValue> {
    if phi1.out_dims() != phi2.out_dims() {
        return Err(Error::Dimension("outputs differ".into()));
    }
    let r = xi_dims.select(r_labels)?;
    if phi1.dims().labels().iter().any(|l| r.contains(l)) {
        return Err(Error::Layout(format!("reference {r} clashes with the channel wires")));
    }
    let (target, td) = apply_partial(phi2, xi, xi_dims)?;
    let (xr, _) = crate::linalg::partial_trace(xi, xi_dims, &xi_dims.without(r_labels)?.labels())?;
    let sd = phi1.in_dims().concat(&r)?;
    let mut m = Model::new();
    let s = m.herm_psd(sd.total());
    let (sr, _) = s.partial_trace(&sd, &phi1.in_dims().labels())?;
    let (xr, _) = permute_systems(&xr, &xi_dims.select(r_labels)?, &r.labels())?;
    m.herm_eq(&sr, &HExpr::constant(&xr));
    let (img, imgd) = HExpr::link_left(phi1.choi(), &phi1.dims(), &s, &sd)?;
    let (t, _) = permute_systems(&target, &td, &imgd.labels())?;
    let pos = m.herm_psd(imgd.total());
    let neg = m.herm_psd(imgd.total());
    m.herm_eq(&pos.sub(&neg), &img.sub(&HExpr::constant(&t)));
    m.minimize(pos.trace() + neg.trace());
    Ok(NormValue::from_solution(&m.solve(tol)?))
}

/// `m(ξ, σ) = ‖ξ − σ‖₁ + 2 P(ξ_R, σ_R)` with `P` the purified distance of
/// the marginals on `r_labels`.
pub fn hausdorff_pre_metric(xi: &CMatrix, sigma: &CMatrix, dims: &SystemDims, r_labels: &[&str]) -> Result<f64> {
    dims.check_matrix(xi.rows(), xi.cols())?;
    dims.check_matrix(sigma.rows(), sigma.cols())?;
    let rest = dims.without(r_labels)?;
    let (a, _) = crate::linalg::partial_trace(xi, dims, &rest.labels())?;
    let (b, _) = crate::linalg::partial_trace(sigma, dims, &rest.labels())?;
    Ok(trace_norm(&(xi - sigma))? + 2.0 * purified_distance(&a.hermitian_part(), &b.hermitian_part())?)
}

/// Result of [`verify_rand_chans`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RandChansReport {
    pub delta: NormValue,
    pub sweep: SweepReport,
}

/// The quantity `‖ρ * C_Φ‖^F` for a state `ρ` on reference copies of the
/// target's wires.
struct Side<'a> {
    variant: &'a Variant,
    /// target label -> reference label
    rmap: Vec<(String, String)>,
    r0: Vec<String>,
    r1: Vec<String>,
}

impl Side<'_> {
    fn r_of(&self, l: &str) -> Result<String> {
        self.rmap.iter().find(|(a, _)| a == l).map(|(_, b)| b.clone()).ok_or_else(|| Error::UnknownLabel(l.into()))
    }

    fn norm(&self, rho: &CMatrix, rdims: &SystemDims, phi: &ChoiMap, tol: f64) -> Result<f64> {
        let full = rdims.concat(&phi.dims())?;
        let x = kron(rho, phi.choi());
        let v = match self.variant {
            Variant::Post => {
                let pairs: Vec<(String, String)> =
                    self.r0.iter().cloned().zip(phi.in_dims().labels().into_iter().map(String::from)).collect();
                let (e, ed) = contract_pairs(&x, &full, &pairs)?;
                dual_diamond_norm(&e, &ed, &phi.out_dims().labels(), tol)?
            }
            Variant::Pre => {
                let pairs: Vec<(String, String)> =
                    self.r1.iter().cloned().zip(phi.out_dims().labels().into_iter().map(String::from)).collect();
                let (e, ed) = contract_pairs(&x, &full, &pairs)?;
                dual_diamond_norm(&e, &ed, &refs(&self.r0), tol)?
            }
            Variant::Partial { fixed_in, fixed_out } => {
                let mut pairs = Vec::new();
                for l in fixed_in.iter().chain(fixed_out) {
                    pairs.push((self.r_of(l)?, l.clone()));
                }
                let (e, ed) = contract_pairs(&x, &full, &pairs)?;
                let gone: Vec<String> = pairs.iter().map(|p| p.0.clone()).collect();
                let keep = |v: &[String]| -> Vec<String> { v.iter().filter(|l| !gone.contains(l)).cloned().collect() };
                let wires = CombWires {
                    a0: phi.in_dims().without(&refs(fixed_in))?.labels().into_iter().map(String::from).collect(),
                    a1: phi.out_dims().without(&refs(fixed_out))?.labels().into_iter().map(String::from).collect(),
                    a0p: keep(&self.r0),
                    a1p: keep(&self.r1),
                };
                f_norm(&e, &ed, &FSpec { variant: FVariant::FullComb, wires }, tol)?
            }
            Variant::Comb | Variant::NoSignaling => {
                let wires = CombWires {
                    a0: phi.in_dims().labels().into_iter().map(String::from).collect(),
                    a1: phi.out_dims().labels().into_iter().map(String::from).collect(),
                    a0p: self.r0.clone(),
                    a1p: self.r1.clone(),
                };
                let fv = if *self.variant == Variant::Comb { FVariant::FullComb } else { FVariant::NoSignaling };
                f_norm(&x, &full, &FSpec { variant: fv, wires }, tol)?
            }
        };
        Ok(v.value)
    }
}

/// Sampled check of the randomization criterion
/// `‖ρ * C_Φ₂‖^F ≤ ‖ρ * C_Φ₁‖^F + ε/2 · ‖ρ‖^◇_{R1|R0}`
/// over states `ρ` on copies `R0 R1` of the target's input and output.
/// A violation proves `δ(Φ₁‖Φ₂) > ε`.
///
/// Both sides are divided by `‖ρ‖^◇_{R1|R0}`, so the reported gap does not
/// depend on the scale of `ρ`; at the witness and `ε = 0` it is at least
/// `δ/2`.
///
/// Sample 0 is the witness of the conversion program. Odd samples are
/// random density matrices of random rank; the other even ones mix the
/// witness with such a state, `(1 − t) ρ* + t τ` with `t ∈ (0, ½)`.
/// Sample `i` uses [`random::stream`]`(seed, i)`. A gap above `10·tol`
/// is a violation.
pub fn verify_rand_chans(
    phi1: &ChoiMap,
    phi2: &ChoiMap,
    variant: &Variant,
    epsilon: f64,
    n_samples: usize,
    seed: u64,
    tol: f64,
) -> Result<RandChansReport> {
    if epsilon < 0.0 {
        return Err(Error::Domain("epsilon must be nonnegative".into()));
    }
    let conv = delta(phi1, phi2, variant, tol)?;
    let mut taken = all_labels(&[phi1, phi2]);
    let tl = conv.witness_dims.labels();
    let bases: Vec<String> = tl.iter().map(|l| format!("R{l}")).collect();
    let rl = fresh_names(&refs(&bases), &mut taken);
    let rmap: Vec<(String, String)> = tl.iter().map(|s| s.to_string()).zip(rl.iter().cloned()).collect();
    let rdims = SystemDims::new(rl.iter().cloned().zip(conv.witness_dims.dims()))?;
    let n_in = phi2.in_dims().len();
    let side = Side { variant, rmap, r0: rl[..n_in].to_vec(), r1: rl[n_in..].to_vec() };
    let dim = rdims.total();
    let star = &conv.witness;
    let evaluate = |i: usize| -> Result<Violation> {
        let (rho, stream) = if i == 0 {
            (star.clone(), None)
        } else {
            let mut rng = random::stream(seed, i as u64);
            let env = rng.gen_range(1..=dim);
            let tau = random::density_matrix(&mut rng, dim, env);
            if i % 2 == 1 {
                (tau, Some(i as u64))
            } else {
                let t: f64 = rng.gen_range(0.0..0.5);
                (&star.scale(1.0 - t) + &tau.scale(t), Some(i as u64))
            }
        };
        let lhs = side.norm(&rho, &rdims, phi2, tol)?;
        let rhs1 = side.norm(&rho, &rdims, phi1, tol)?;
        let nr = dual_diamond_norm(&rho, &rdims, &refs(&side.r0), tol)?.value;
        let (lhs, rhs) = (lhs / nr, rhs1 / nr + 0.5 * epsilon);
        Ok(Violation { sample: i, stream, lhs, rhs, gap: lhs - rhs })
    };
    let all = (0..n_samples.max(1)).into_par_iter().map(evaluate).collect::<Result<Vec<_>>>()?;
    Ok(RandChansReport { delta: conv.delta, sweep: SweepReport::collect(epsilon, seed, 10.0 * tol, all) })
}
