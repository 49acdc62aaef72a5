//! Finite classical statistical experiments: Le Cam deficiency, Le Cam
//! distance and the randomization criterion for decision problems.
//!
//! All programs here are linear and go through the same conic solver as
//! the quantum quantities, with nonnegative blocks only.

use serde::{Deserialize, Serialize};

use crate::conic::model::{Lin, Model, ModelSolution};
use crate::error::{Error, Result};
use crate::norms::NormValue;

/// A finite family `(p¹, …, pᵏ)` of probability vectors on `m` points.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct Experiment {
    dists: Vec<Vec<f64>>,
}

impl Experiment {
    /// Entries must be nonnegative and each vector must sum to 1 within
    /// `1e-12`. All vectors share one sample space.
    pub fn new(dists: Vec<Vec<f64>>) -> Result<Experiment> {
        let Some(m) = dists.first().map(Vec::len) else {
            return Err(Error::Domain("an experiment needs at least one distribution".into()));
        };
        if m == 0 {
            return Err(Error::Domain("empty sample space".into()));
        }
        for (i, p) in dists.iter().enumerate() {
            if p.len() != m {
                return Err(Error::Dimension(format!("distribution {i} has {} points, expected {m}", p.len())));
            }
            if p.iter().any(|v| !v.is_finite() || *v < 0.0) {
                return Err(Error::Domain(format!("distribution {i} has a negative or non-finite entry")));
            }
            let s: f64 = p.iter().sum();
            if (s - 1.0).abs() > 1e-12 {
                return Err(Error::Domain(format!("distribution {i} sums to {s}")));
            }
        }
        Ok(Experiment { dists })
    }

    pub fn dists(&self) -> &[Vec<f64>] {
        &self.dists
    }

    /// Number of distributions `k`.
    pub fn len(&self) -> usize {
        self.dists.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dists.is_empty()
    }

    /// Size `m` of the sample space.
    pub fn points(&self) -> usize {
        self.dists[0].len()
    }

    /// `(T p¹, …, T pᵏ)` for a column-stochastic `T` given row by row.
    pub fn randomize(&self, t: &[Vec<f64>]) -> Result<Experiment> {
        if t.iter().any(|r| r.len() != self.points()) {
            return Err(Error::Dimension("stochastic matrix does not match the sample space".into()));
        }
        let dists = self.dists.iter().map(|p| t.iter().map(|r| dot(r, p)).collect()).collect();
        // renormalize rounding in the sums
        Experiment::new(normalize_all(dists))
    }
}

impl TryFrom<Vec<Vec<f64>>> for Experiment {
    type Error = Error;

    fn try_from(v: Vec<Vec<f64>>) -> Result<Experiment> {
        Experiment::new(v)
    }
}

impl From<Experiment> for Vec<Vec<f64>> {
    fn from(e: Experiment) -> Self {
        e.dists
    }
}

/// Optimal randomization found by [`lecam_deficiency`].
#[derive(Clone, Debug)]
pub struct Deficiency {
    pub delta: NormValue,
    /// Column-stochastic `T`, `t[b][a]` = probability of `b` given `a`.
    pub t: Vec<Vec<f64>>,
    /// `max_i ‖T pⁱ − qⁱ‖₁` for the cleaned `T`.
    pub achieved: f64,
}

/// `δ(p‖q) = min_T max_i ‖T pⁱ − qⁱ‖₁` over stochastic maps `T`.
pub fn lecam_deficiency(p: &Experiment, q: &Experiment, tol: f64) -> Result<Deficiency> {
    if p.len() != q.len() {
        return Err(Error::Dimension(format!("{} distributions against {}", p.len(), q.len())));
    }
    let (mp, mq) = (p.points(), q.points());
    let mut m = Model::new();
    let t: Vec<Vec<Lin>> = (0..mq).map(|_| m.nonneg(mp)).collect();
    for a in 0..mp {
        let mut s = Lin::zero();
        t.iter().for_each(|r| s += &r[a]);
        m.eq(s, 1.0);
    }
    let bound = m.nonneg(1).remove(0);
    for (pi, qi) in p.dists().iter().zip(q.dists()) {
        let mut l1 = Lin::zero();
        for (b, row) in t.iter().enumerate() {
            let (plus, minus) = {
                let v = m.nonneg(2);
                (v[0].clone(), v[1].clone())
            };
            let mut e = Lin::zero();
            for (a, v) in row.iter().enumerate() {
                e.add_scaled(v, pi[a]);
            }
            m.eq(e - plus.clone() + minus.clone(), qi[b]);
            l1 += &plus;
            l1 += &minus;
        }
        m.le(l1 - bound.clone(), 0.0);
    }
    m.minimize(bound);
    let sol = m.solve(tol)?;
    let tm = clean_stochastic(&sol, &t);
    let achieved = p
        .dists()
        .iter()
        .zip(q.dists())
        .map(|(pi, qi)| tm.iter().zip(qi).map(|(r, qb)| (dot(r, pi) - qb).abs()).sum::<f64>())
        .fold(0.0, f64::max);
    Ok(Deficiency { delta: NormValue::from_solution(&sol), t: tm, achieved })
}

/// `max(δ(p‖q), δ(q‖p))`; the bounds of the larger side are returned.
pub fn lecam_distance(p: &Experiment, q: &Experiment, tol: f64) -> Result<NormValue> {
    let a = lecam_deficiency(p, q, tol)?.delta;
    let b = lecam_deficiency(q, p, tol)?.delta;
    Ok(if a.value >= b.value { a } else { b })
}

/// Outcome of [`gain_check`].
#[derive(Clone, Debug, Serialize)]
pub struct GainReport {
    /// `sup_Θ G(q, λ, g, Θ)`.
    pub lhs: f64,
    /// `sup_Θ G(p, λ, g, Θ) + ε/2 Σ_i λ_i max_d g(i,d)`.
    pub rhs: f64,
    /// `rhs − lhs`; negative means the criterion fails.
    pub gap: f64,
    pub holds: bool,
    pub threshold: f64,
}

/// Best expected gain `sup_Θ Σ_i λ_i Σ_d g(i,d) (Θ pⁱ)_d` over decision
/// rules `Θ`, solved as a linear program. `gain[i][d] ≥ 0`.
pub fn max_gain(p: &Experiment, prior: &[f64], gain: &[Vec<f64>], tol: f64) -> Result<NormValue> {
    let nd = check_decision_problem(p, prior, gain)?;
    let mut m = Model::new();
    let rule: Vec<Vec<Lin>> = (0..nd).map(|_| m.nonneg(p.points())).collect();
    for x in 0..p.points() {
        let mut s = Lin::zero();
        rule.iter().for_each(|r| s += &r[x]);
        m.eq(s, 1.0);
    }
    let mut obj = Lin::zero();
    for (i, pi) in p.dists().iter().enumerate() {
        for (d, row) in rule.iter().enumerate() {
            for (x, v) in row.iter().enumerate() {
                obj.add_scaled(v, prior[i] * gain[i][d] * pi[x]);
            }
        }
    }
    m.maximize(obj);
    Ok(NormValue::from_solution(&m.solve(tol)?))
}

/// Closed form of [`max_gain`]: each point picks its best decision,
/// `Σ_x max_d Σ_i λ_i g(i,d) pⁱ(x)`.
pub fn bayes_gain(p: &Experiment, prior: &[f64], gain: &[Vec<f64>]) -> Result<f64> {
    let nd = check_decision_problem(p, prior, gain)?;
    Ok((0..p.points())
        .map(|x| {
            (0..nd)
                .map(|d| p.dists().iter().enumerate().map(|(i, pi)| prior[i] * gain[i][d] * pi[x]).sum::<f64>())
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .sum())
}

/// Checks the randomization criterion: if `δ(p‖q) ≤ ε` then every
/// decision problem is solved at least as well from `p`, up to
/// `ε/2 Σ_i λ_i max_d g(i,d)`.
pub fn gain_check(
    p: &Experiment,
    q: &Experiment,
    epsilon: f64,
    gain: &[Vec<f64>],
    prior: &[f64],
    tol: f64,
) -> Result<GainReport> {
    if p.len() != q.len() {
        return Err(Error::Dimension(format!("{} distributions against {}", p.len(), q.len())));
    }
    let lhs = max_gain(q, prior, gain, tol)?.value;
    let slack: f64 = prior.iter().zip(gain).map(|(l, g)| l * g.iter().cloned().fold(0.0, f64::max)).sum();
    let rhs = max_gain(p, prior, gain, tol)?.value + 0.5 * epsilon * slack;
    let threshold = 10.0 * tol;
    Ok(GainReport { lhs, rhs, gap: rhs - lhs, holds: rhs - lhs >= -threshold, threshold })
}

fn check_decision_problem(p: &Experiment, prior: &[f64], gain: &[Vec<f64>]) -> Result<usize> {
    if prior.len() != p.len() || gain.len() != p.len() {
        return Err(Error::Dimension("prior and gain need one entry per distribution".into()));
    }
    if prior.iter().any(|v| *v < 0.0) || (prior.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
        return Err(Error::Domain("prior is not a probability vector".into()));
    }
    let nd = gain[0].len();
    if nd == 0 || gain.iter().any(|g| g.len() != nd) {
        return Err(Error::Dimension("gain rows must have the same positive length".into()));
    }
    if gain.iter().flatten().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(Error::Domain("gains must be nonnegative".into()));
    }
    Ok(nd)
}

fn clean_stochastic(sol: &ModelSolution, t: &[Vec<Lin>]) -> Vec<Vec<f64>> {
    let mut tm: Vec<Vec<f64>> = t.iter().map(|r| r.iter().map(|v| sol.lin(v).max(0.0)).collect()).collect();
    for a in 0..tm[0].len() {
        let s: f64 = tm.iter().map(|r| r[a]).sum();
        tm.iter_mut().for_each(|r| r[a] /= s);
    }
    tm
}

fn normalize_all(dists: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    dists
        .into_iter()
        .map(|p| {
            let p: Vec<f64> = p.into_iter().map(|v| v.max(0.0)).collect();
            let s: f64 = p.iter().sum();
            p.into_iter().map(|v| v / s).collect()
        })
        .collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
