//! Guessing games: ensembles, measurements, success probabilities, the
//! correspondence between channels and measurements through the Bell
//! measurement, and sampled checks of the guessing-game characterizations.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channels::{apply_partial, ChoiMap};
use crate::conic::model::{HExpr, Model};
use crate::error::{Error, Result};
use crate::linalg::{is_psd, kron, partial_trace, permute_systems, vec_doubleket, CMatrix, SystemDims, C64};
use crate::norms::{diamond_norm_witness, NormValue};
use crate::random;

/// Positive operators summing to the identity.
#[derive(Clone, Debug, PartialEq)]
pub struct Povm {
    effects: Vec<CMatrix>,
    dims: SystemDims,
}

impl Povm {
    /// Checks `M_i ⪰ −1e-10·I` and `Σ M_i = I` to `1e-9`.
    pub fn new(effects: Vec<CMatrix>, dims: SystemDims) -> Result<Povm> {
        if effects.is_empty() {
            return Err(Error::Domain("a measurement needs at least one outcome".into()));
        }
        let d = dims.total();
        let mut sum = CMatrix::zeros(d, d);
        for (i, e) in effects.iter().enumerate() {
            dims.check_matrix(e.rows(), e.cols())?;
            if !is_psd(e, 1e-10) {
                return Err(Error::Domain(format!("effect {i} is not positive semidefinite")));
            }
            sum += e;
        }
        let dev = sum.dist(&CMatrix::identity(d));
        if dev > 1e-9 {
            return Err(Error::Domain(format!("effects sum to the identity only up to {dev:.3e}")));
        }
        Ok(Povm { effects: effects.iter().map(CMatrix::hermitian_part).collect(), dims })
    }

    /// Measurement on a single factor labeled `A`.
    pub fn on_single(effects: Vec<CMatrix>) -> Result<Povm> {
        let d = effects.first().map_or(1, CMatrix::rows);
        Povm::new(effects, SystemDims::single("A", d))
    }

    /// Projective measurement in the standard basis of `C^d`.
    pub fn computational(d: usize) -> Povm {
        let effects = (0..d).map(|i| CMatrix::projector(&CMatrix::basis(d, i))).collect();
        Povm { effects, dims: SystemDims::single("A", d) }
    }

    /// Projective measurement onto the columns of a unitary.
    pub fn from_basis(u: &CMatrix) -> Result<Povm> {
        let d = u.rows();
        let effects =
            (0..u.cols()).map(|k| CMatrix::projector(&CMatrix::from_fn(d, 1, |i, _| u[(i, k)]))).collect();
        Povm::new(effects, SystemDims::single("A", d))
    }

    /// The one-outcome measurement `{I}`.
    pub fn trivial(d: usize) -> Povm {
        Povm { effects: vec![CMatrix::identity(d)], dims: SystemDims::single("A", d) }
    }

    pub fn effects(&self) -> &[CMatrix] {
        &self.effects
    }

    pub fn len(&self) -> usize {
        self.effects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.effects.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dims.total()
    }

    pub fn dims(&self) -> &SystemDims {
        &self.dims
    }

    /// The same effects on another layout of equal total dimension.
    pub fn with_dims(&self, dims: SystemDims) -> Result<Povm> {
        if dims.total() != self.dim() {
            return Err(Error::Dimension(format!("{dims} does not fit a {}-dimensional measurement", self.dim())));
        }
        Ok(Povm { effects: self.effects.clone(), dims })
    }

    /// `N_x = Σ_j p[x][j] M_j` for a column-stochastic `p`.
    pub fn post_process(&self, p: &[Vec<f64>]) -> Result<Povm> {
        if p.iter().any(|r| r.len() != self.len()) {
            return Err(Error::Dimension(format!("post-processing needs {} columns", self.len())));
        }
        let effects = p
            .iter()
            .map(|row| {
                let mut e = CMatrix::zeros(self.dim(), self.dim());
                for (w, m) in row.iter().zip(&self.effects) {
                    e += &m.scale(*w);
                }
                e
            })
            .collect();
        Povm::new(effects, self.dims.clone())
    }

    /// `Σ_i w_i M^i` for measurements with equally many outcomes.
    pub fn mixture(weights: &[f64], povms: &[Povm]) -> Result<Povm> {
        let first = povms.first().ok_or_else(|| Error::Domain("empty mixture".into()))?;
        if weights.len() != povms.len() || povms.iter().any(|m| m.len() != first.len() || m.dim() != first.dim()) {
            return Err(Error::Dimension("mixture of measurements with different shapes".into()));
        }
        let effects = (0..first.len())
            .map(|x| {
                let mut e = CMatrix::zeros(first.dim(), first.dim());
                for (w, m) in weights.iter().zip(povms) {
                    e += &m.effects[x].scale(*w);
                }
                e
            })
            .collect();
        Povm::new(effects, first.dims.clone())
    }
}

/// A finite family of measurements on one system.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementSet {
    povms: Vec<Povm>,
}

impl MeasurementSet {
    /// All members must act on the same dimension and have the same number
    /// of outcomes.
    pub fn new(povms: Vec<Povm>) -> Result<MeasurementSet> {
        let first = povms.first().ok_or_else(|| Error::Domain("empty measurement set".into()))?;
        if povms.iter().any(|m| m.dim() != first.dim() || m.len() != first.len()) {
            return Err(Error::Dimension("measurements in a set must share dimension and outcome count".into()));
        }
        Ok(MeasurementSet { povms })
    }

    pub fn povms(&self) -> &[Povm] {
        &self.povms
    }

    pub fn len(&self) -> usize {
        self.povms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.povms.is_empty()
    }

    pub fn outcomes(&self) -> usize {
        self.povms[0].len()
    }

    pub fn dim(&self) -> usize {
        self.povms[0].dim()
    }
}

/// States with prior probabilities.
#[derive(Clone, Debug, PartialEq)]
pub struct Ensemble {
    probs: Vec<f64>,
    states: Vec<CMatrix>,
    dims: SystemDims,
}

impl Ensemble {
    /// Priors must sum to one within `1e-10`; states must be density
    /// matrices on `dims`.
    pub fn new(items: Vec<(f64, CMatrix)>, dims: SystemDims) -> Result<Ensemble> {
        if items.is_empty() {
            return Err(Error::Domain("empty ensemble".into()));
        }
        let total: f64 = items.iter().map(|(p, _)| p).sum();
        if (total - 1.0).abs() > 1e-10 || items.iter().any(|(p, _)| *p < 0.0) {
            return Err(Error::Domain(format!("priors must form a probability vector (sum {total})")));
        }
        for (i, (_, s)) in items.iter().enumerate() {
            dims.check_matrix(s.rows(), s.cols())?;
            if !is_psd(s, 1e-9) || (s.trace().re - 1.0).abs() > 1e-8 {
                return Err(Error::Domain(format!("item {i} is not a density matrix")));
            }
        }
        let (probs, states) = items.into_iter().map(|(p, s)| (p, s.hermitian_part())).unzip();
        Ok(Ensemble { probs, states, dims })
    }

    /// Ensemble from unnormalized weights `λ_i ρ_i`; zero weights are
    /// dropped.
    pub fn from_weighted(ops: &[CMatrix], dims: SystemDims) -> Result<Ensemble> {
        let total: f64 = ops.iter().map(|o| o.trace().re).sum();
        if total <= 0.0 {
            return Err(Error::Domain("weights sum to zero".into()));
        }
        let items = ops
            .iter()
            .filter(|o| o.trace().re > 1e-14 * total)
            .map(|o| {
                let t = o.trace().re;
                (t / total, o.scale(1.0 / t))
            })
            .collect::<Vec<_>>();
        let s: f64 = items.iter().map(|(p, _)| p).sum();
        Ensemble::new(items.into_iter().map(|(p, r)| (p / s, r)).collect(), dims)
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn states(&self) -> &[CMatrix] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dims.total()
    }

    pub fn dims(&self) -> &SystemDims {
        &self.dims
    }

    /// `ρ_E = Σ_i λ_i ρ_i ⊗ |i><i|` with the classical register labeled
    /// `register`.
    pub fn qc_state(&self, register: &str) -> Result<(CMatrix, SystemDims)> {
        let k = self.len();
        let dims = self.dims.concat(&SystemDims::single(register, k))?;
        let mut out = CMatrix::zeros(dims.total(), dims.total());
        for (i, (p, s)) in self.probs.iter().zip(&self.states).enumerate() {
            out += &kron(s, &CMatrix::projector(&CMatrix::basis(k, i))).scale(*p);
        }
        Ok((out, dims))
    }

    /// `{λ_i, (Φ ⊗ id)(ρ_i)}`; the map acts on the factors named by its
    /// input labels.
    pub fn map(&self, phi: &ChoiMap) -> Result<Ensemble> {
        let mut dims = None;
        let mut states = Vec::with_capacity(self.len());
        for s in &self.states {
            let (r, d) = apply_partial(phi, s, &self.dims)?;
            states.push(r.hermitian_part());
            dims = Some(d);
        }
        Ok(Ensemble { probs: self.probs.clone(), states, dims: dims.expect("nonempty") })
    }
}

/// Effects of `m` in the factor order of `dims`: permuted when the label
/// sets agree, taken as they are when only the total dimensions do.
fn aligned_effects(m: &Povm, dims: &SystemDims) -> Result<Vec<CMatrix>> {
    if m.dim() != dims.total() {
        return Err(Error::Dimension(format!("measurement on {} applied to {dims}", m.dims)));
    }
    let same_set = m.dims.len() == dims.len() && dims.labels().iter().all(|l| m.dims.contains(l));
    if same_set && m.dims != *dims {
        m.effects
            .iter()
            .map(|e| permute_systems(e, &m.dims, &dims.labels()).map(|p| p.0))
            .collect()
    } else {
        Ok(m.effects.clone())
    }
}

/// `Σ_i λ_i Tr[ρ_i M_i]`.
pub fn psucc(e: &Ensemble, m: &Povm) -> Result<f64> {
    if e.len() != m.len() {
        return Err(Error::Dimension(format!("{} states but {} outcomes", e.len(), m.len())));
    }
    let effects = aligned_effects(m, &e.dims)?;
    Ok(e.probs.iter().zip(&e.states).zip(&effects).map(|((p, s), f)| p * s.trace_product(f).re).sum())
}

/// Best success probability over all measurements, with an optimal
/// measurement.
pub fn optimal_measurement(e: &Ensemble, tol: f64) -> Result<(NormValue, Povm)> {
    let d = e.dim();
    let mut m = Model::new();
    let vars: Vec<HExpr> = (0..e.len()).map(|_| m.herm_psd(d)).collect();
    let mut sum = HExpr::zeros(d);
    let mut obj = crate::conic::model::Lin::zero();
    for ((v, p), s) in vars.iter().zip(&e.probs).zip(&e.states) {
        sum = sum.add(v);
        obj += &(v.inner(s) * *p);
    }
    m.herm_eq(&sum, &HExpr::constant(&CMatrix::identity(d)));
    m.maximize(obj);
    let sol = m.solve(tol)?;
    let mut effects: Vec<CMatrix> =
        vars.iter().map(|v| crate::linalg::hermitian_fn(&sol.herm(v), |l| l.max(0.0))).collect::<Result<_>>()?;
    // put the rounding defect of the completeness relation on the last effect
    let mut total = CMatrix::zeros(d, d);
    effects.iter().for_each(|f| total += f);
    let last = effects.len() - 1;
    let fix = &effects[last] + &(&CMatrix::identity(d) - &total);
    effects[last] = fix;
    let povm = Povm { effects, dims: e.dims.clone() };
    Ok((NormValue::from_solution(&sol), povm))
}

/// `P_succ(E) = max_M Σ λ_i Tr[ρ_i M_i]`.
pub fn psucc_opt(e: &Ensemble, tol: f64) -> Result<NormValue> {
    Ok(optimal_measurement(e, tol)?.0)
}

/// Best success probability when only `m` may be measured and its outcome
/// post-processed: `Σ_j max_x λ_x Tr[ρ_x M_j]`. Also returns the optimal
/// guess for every outcome (ties go to the smallest index).
pub fn psucc_q_rule(e: &Ensemble, m: &Povm) -> Result<(f64, Vec<usize>)> {
    let effects = aligned_effects(m, &e.dims)?;
    let mut total = 0.0;
    let mut rule = Vec::with_capacity(effects.len());
    for f in &effects {
        let mut best = (f64::NEG_INFINITY, 0);
        for (x, (p, s)) in e.probs.iter().zip(&e.states).enumerate() {
            let v = p * s.trace_product(f).re;
            if v > best.0 {
                best = (v, x);
            }
        }
        total += best.0;
        rule.push(best.1);
    }
    Ok((total, rule))
}

pub fn psucc_q(e: &Ensemble, m: &Povm) -> Result<f64> {
    Ok(psucc_q_rule(e, m)?.0)
}

/// Generalized Pauli unitaries `U_{a,b} = X^a Z^b` with `X|j> = |j+1>` and
/// `Z|j> = ω^j |j>`, `ω = e^{2πi/d}`, ordered lexicographically in `(a, b)`.
pub fn pauli_group(d: usize) -> Vec<CMatrix> {
    let mut out = Vec::with_capacity(d * d);
    for a in 0..d {
        for b in 0..d {
            out.push(CMatrix::from_fn(d, d, |i, j| {
                if i == (j + a) % d {
                    C64::from_polar(1.0, 2.0 * std::f64::consts::PI * ((b * j) % d) as f64 / d as f64)
                } else {
                    C64::new(0.0, 0.0)
                }
            }));
        }
    }
    out
}

/// Bell measurement `B_x = |U_x>><<U_x| / d` on `C^d ⊗ C^d`, factors
/// labeled `first` and `second`.
pub fn bell_measurement_on(first: &str, second: &str, d: usize) -> Result<Povm> {
    let effects = pauli_group(d)
        .iter()
        .map(|u| CMatrix::projector(&vec_doubleket(u)).scale(1.0 / d as f64))
        .collect();
    Povm::new(effects, SystemDims::new([(first, d), (second, d)])?)
}

/// [`bell_measurement_on`] with factors `R` and `R'`.
pub fn bell_measurement(d: usize) -> Povm {
    bell_measurement_on("R", "R'", d).expect("valid for d >= 1")
}

/// `{d_R^{-2}, (id ⊗ Ũ_x)(ρ)}` where `Ũ_x` conjugates the factors
/// `r_labels` by `U_xᵀ`.
pub fn pauli_ensemble(rho: &CMatrix, dims: &SystemDims, r_labels: &[&str]) -> Result<Ensemble> {
    let r = dims.select(r_labels)?;
    let rest = dims.without(r_labels)?;
    let order = rest.concat(&r)?;
    let (p, _) = permute_systems(rho, dims, &order.labels())?;
    let dr = r.total();
    let ir = CMatrix::identity(rest.total());
    let w = 1.0 / (dr * dr) as f64;
    let mut items = Vec::with_capacity(dr * dr);
    for u in pauli_group(dr) {
        let k = kron(&ir, &u.transpose());
        let s = k.mul(&p).mul(&k.adjoint());
        let (s, _) = permute_systems(&s, &order, &dims.labels())?;
        items.push((w, s.hermitian_part()));
    }
    Ensemble::new(items, dims.clone())
}

/// `M^β_x = (β* ⊗ id)(B_x)` for `β: A → R`, a measurement on `A ⊗ R'` with
/// `d_R²` outcomes; `R'` is a fresh label.
pub fn meas_from_channel(beta: &ChoiMap) -> Result<Povm> {
    let dr = beta.d_out();
    let all = beta.dims();
    let rp = all.fresh_label("R'");
    let bdims = beta.out_dims().concat(&SystemDims::single(&rp, dr))?;
    let adj = beta.adjoint();
    let mut effects = Vec::with_capacity(dr * dr);
    for u in pauli_group(dr) {
        let b = CMatrix::projector(&vec_doubleket(&u)).scale(1.0 / dr as f64);
        let (e, _) = apply_partial(&adj, &b, &bdims)?;
        effects.push(e.hermitian_part());
    }
    Povm::new(effects, beta.in_dims().concat(&SystemDims::single(&rp, dr))?)
}

/// The channel `β^M: A → R` realized by teleportation with the measurement
/// `m` on `A ⊗ R'`, where `R'` is the last factor of `m` and has dimension
/// `d_r`. Needs `d_r²` outcomes. The output is labeled `R` (or a fresh
/// variant of it).
pub fn channel_from_meas(m: &Povm, d_r: usize) -> Result<ChoiMap> {
    if m.len() != d_r * d_r {
        return Err(Error::Dimension(format!("{} outcomes, expected {}", m.len(), d_r * d_r)));
    }
    let labels = m.dims.labels();
    let last = *labels.last().expect("nonempty layout");
    if m.dims.dim(last)? != d_r {
        return Err(Error::Dimension(format!("last factor `{last}` should have dimension {d_r}")));
    }
    let a = m.dims.without(&[last])?;
    let da = a.total();
    let out = m.dims.fresh_label("R");
    // σ ⊗ ψ on A R' R, ψ the normalized maximally entangled state on R' R
    let psi = crate::linalg::max_entangled(d_r);
    let full = m.dims.concat(&SystemDims::single(&out, d_r))?;
    let traced: Vec<&str> = m.dims.labels();
    let us = pauli_group(d_r);
    let mut choi = CMatrix::zeros(d_r * da, d_r * da);
    for i in 0..da {
        for j in 0..da {
            let mut eij = CMatrix::zeros(da, da);
            eij[(i, j)] = C64::new(1.0, 0.0);
            let s = kron(&eij, &psi);
            let mut img = CMatrix::zeros(d_r, d_r);
            for (mx, u) in m.effects.iter().zip(&us) {
                let prod = s.mul(&kron(mx, &CMatrix::identity(d_r)));
                let (t, _) = partial_trace(&prod, &full, &traced)?;
                img += &u.mul(&t).mul(&u.adjoint());
            }
            // C = Σ_ij β(E_ij) ⊗ E_ij on R ⊗ A
            for r in 0..d_r {
                for c in 0..d_r {
                    choi[(r * da + i, c * da + j)] += img[(r, c)];
                }
            }
        }
    }
    ChoiMap::new(choi.hermitian_part(), a, SystemDims::single(&out, d_r))
}

/// Outcome of [`verify_coro_psuc`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CoroPsucReport {
    /// `½‖Φ₁ − Φ₂‖◇` from the diamond-norm program.
    pub half_diamond: f64,
    pub psucc_1: f64,
    pub psucc_2: f64,
    pub psucc_opt: f64,
    /// `(psucc_1 − psucc_2) / psucc_opt`.
    pub ratio: f64,
    pub abs_error: f64,
    pub diamond: NormValue,
}

/// Plays the guessing game built from the optimal diamond-norm witness `ρ`:
/// the Pauli ensemble of `ρ` (twirled on the output copy), sent through
/// `Φ₁` or `Φ₂` and measured with the Bell measurement. The normalized
/// difference of success probabilities should equal `½‖Φ₁ − Φ₂‖◇`.
pub fn verify_coro_psuc(phi1: &ChoiMap, phi2: &ChoiMap, tol: f64) -> Result<CoroPsucReport> {
    let delta = phi1.sub(phi2)?;
    let (din, dout) = (phi1.in_dims().clone(), phi1.out_dims().clone());
    let (nv, rho) = match diamond_norm_witness(&delta, tol) {
        Ok(x) => x,
        Err(Error::Domain(_)) if delta.choi().max_abs() < 1e-12 => {
            let zero = crate::norms::NormValue { value: 0.0, lower: 0.0, upper: 0.0, iterations: 0, residual: 0.0 };
            let n = din.total() * dout.total();
            (zero, CMatrix::identity(n).scale(1.0 / n as f64))
        }
        Err(e) => return Err(e),
    };
    // ρ on in ⊗ out; rename the output copy to a reference system
    let mut rdims = din.clone();
    let mut r_labels = Vec::new();
    let taken = phi1.dims();
    for (l, d) in dout.iter() {
        let mut fresh = taken.fresh_label(&format!("{l}~"));
        while rdims.contains(&fresh) || taken.contains(&fresh) {
            fresh.push('\'');
        }
        rdims = rdims.concat(&SystemDims::single(&fresh, d))?;
        r_labels.push(fresh);
    }
    let rl: Vec<&str> = r_labels.iter().map(String::as_str).collect();
    let ens = pauli_ensemble(&rho, &rdims, &rl)?;
    let e1 = ens.map(phi1)?;
    let e2 = ens.map(phi2)?;
    // Bell measurement on out ⊗ reference, in the layout of the mapped states
    let bdims = dout.concat(&rdims.select(&rl)?)?;
    let bell = bell_measurement(dout.total()).with_dims(bdims)?;
    let p1 = psucc(&e1, &bell)?;
    let p2 = psucc(&e2, &bell)?;
    let popt = psucc_opt(&ens, tol)?.value;
    let ratio = (p1 - p2) / popt;
    let half = 0.5 * nv.value;
    Ok(CoroPsucReport {
        half_diamond: half,
        psucc_1: p1,
        psucc_2: p2,
        psucc_opt: popt,
        ratio,
        abs_error: (ratio - half).abs(),
        diamond: nv,
    })
}

/// One sampled instance that breaks (or comes closest to breaking) an
/// inequality.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub sample: usize,
    /// Seed of the generator stream that produced the sample, for replay;
    /// `None` for deterministic witness samples.
    pub stream: Option<u64>,
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs − rhs`; positive means violated.
    pub gap: f64,
}

/// Outcome of a sampled check of an inequality `lhs ≤ rhs`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepReport {
    pub epsilon: f64,
    pub samples: usize,
    /// Largest `lhs − rhs` seen (normalized as documented by the producer).
    pub max_gap: f64,
    /// Samples with `gap > threshold`.
    pub violations: Vec<Violation>,
    /// The three samples with the largest gap, for replay.
    pub worst: Vec<Violation>,
    pub threshold: f64,
    pub seed: u64,
}

impl SweepReport {
    pub(crate) fn collect(epsilon: f64, seed: u64, threshold: f64, all: Vec<Violation>) -> SweepReport {
        let max_gap = all.iter().map(|v| v.gap).fold(f64::NEG_INFINITY, f64::max);
        let violations: Vec<Violation> = all.iter().filter(|v| v.gap > threshold).cloned().collect();
        let mut sorted = all.clone();
        // stable sort keeps the lower sample index first on ties
        sorted.sort_by(|a, b| b.gap.partial_cmp(&a.gap).unwrap_or(std::cmp::Ordering::Equal));
        sorted.truncate(3);
        SweepReport { epsilon, samples: all.len(), max_gap, violations, worst: sorted, threshold, seed }
    }
}

/// Random ensemble on `C^d` with `k` items: priors uniform on the simplex,
/// states Haar pure or mixed with equal odds.
pub fn random_ensemble(rng: &mut impl Rng, d: usize, k: usize) -> Ensemble {
    let probs = random::dirichlet(rng, k);
    let items = probs
        .into_iter()
        .map(|p| {
            let s = if rng.gen_bool(0.5) {
                CMatrix::projector(&random::pure_state(rng, d))
            } else {
                random::mixed_state(rng, d)
            };
            (p, s)
        })
        .collect();
    Ensemble::new(items, SystemDims::single("A", d)).expect("sampled ensemble is valid")
}

/// Ensembles `{Tr N_x / d, N_x / Tr N_x}` read off each target measurement.
fn target_ensembles(n_set: &MeasurementSet) -> Vec<Ensemble> {
    let d = n_set.dim();
    n_set
        .povms()
        .iter()
        .filter_map(|n| Ensemble::from_weighted(n.effects(), SystemDims::single("A", d)).ok())
        .collect()
}

/// Sampled check of
/// `max_y P^Q(E, N^y) ≤ max_i P^Q(E, M^i) + ε/2 · P_succ(E)`
/// over ensembles on the measured system. A violation proves that `N` is
/// not `ε`-simulable by `M`.
///
/// The first samples are the ensembles read off the effects of each `N^y`
/// (deterministic); the rest are [`random_ensemble`]s of size
/// `2..=2·outcomes`, sample `i` drawn from [`random::stream`]`(seed, i)`.
/// Both sides are divided by `P_succ(E)`. A gap above `10·tol` counts as
/// a violation.
pub fn verify_sc_simul(
    m_set: &MeasurementSet,
    n_set: &MeasurementSet,
    epsilon: f64,
    n_ensembles: usize,
    seed: u64,
    tol: f64,
) -> Result<SweepReport> {
    if m_set.dim() != n_set.dim() {
        return Err(Error::Dimension("measurement sets act on different systems".into()));
    }
    let d = m_set.dim();
    let fixed = target_ensembles(n_set);
    let kmax = 2 * m_set.outcomes().max(n_set.outcomes()).max(1);
    let evaluate = |i: usize| -> Result<Violation> {
        let (e, stream) = if i < fixed.len() {
            (fixed[i].clone(), None)
        } else {
            let mut rng = random::stream(seed, i as u64);
            let k = rng.gen_range(2..=kmax.max(2));
            (random_ensemble(&mut rng, d, k), Some(i as u64))
        };
        let n_side = n_set.povms().iter().map(|n| psucc_q(&e, &n.with_dims(e.dims.clone())?)).collect::<Result<Vec<_>>>()?;
        let m_side = m_set.povms().iter().map(|m| psucc_q(&e, &m.with_dims(e.dims.clone())?)).collect::<Result<Vec<_>>>()?;
        let lhs = n_side.into_iter().fold(f64::NEG_INFINITY, f64::max);
        let ps = psucc_opt(&e, tol)?.value;
        let lhs = lhs / ps;
        let rhs = m_side.into_iter().fold(f64::NEG_INFINITY, f64::max) / ps + 0.5 * epsilon;
        Ok(Violation { sample: i, stream, lhs, rhs, gap: lhs - rhs })
    };
    let total = n_ensembles.max(fixed.len());
    let all = (0..total).into_par_iter().map(evaluate).collect::<Result<Vec<_>>>()?;
    Ok(SweepReport::collect(epsilon, seed, 10.0 * tol, all))
}
