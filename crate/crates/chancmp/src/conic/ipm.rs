//! Homogeneous self-dual interior-point method with Nesterov-Todd scaling.
//!
//! Internally every problem is a minimization over row-normalized data with
//! `b` and `c` scaled to unit size. The NT scaling of each PSD block is kept
//! in factored form `X = R Λ Rᵀ`, `S = R⁻ᵀ Λ R⁻¹` and updated in the scaled
//! frame, which stays well conditioned close to the boundary.

use super::dense::{
    cholesky, congruence, congruence_t, dot, matmul, matmul_tn, norm_inf, smat, svec, symmetrize, transpose,
    Ldl,
};
use super::presolve::presolve;
use super::{Cone, ConicProblem, ConicSolution, Residuals, Sense, Status};
use crate::linalg::sym_eig;

const STEP: f64 = 0.99;
/// Complementarity level below which further iterations cannot help.
const MU_FLOOR: f64 = 1e-15;
/// A stalled iterate within this multiple of tol still counts as optimal.
const STALL_FACTOR: f64 = 10.0;

struct PsdBlock {
    off: usize,
    n: usize,
    /// Rows touching the block, with matrix-coordinate coefficients
    /// `(p, q, v)`, `p <= q`: the row reads `Σ v·(X_pq + X_qp)` off the
    /// diagonal and `v·X_pp` on it.
    rows: Vec<(usize, Vec<(usize, usize, f64)>)>,
    /// Objective as a dense symmetric matrix.
    c: Vec<f64>,
}

struct Data {
    m: usize,
    nvar: usize,
    rows: Vec<Vec<(usize, f64)>>,
    b: Vec<f64>,
    c: Vec<f64>,
    psd: Vec<PsdBlock>,
    lp: Vec<usize>,
    lp_cols: Vec<Vec<(usize, f64)>>,
    free: Vec<usize>,
    free_cols: Vec<Vec<(usize, f64)>>,
    nu: f64,
}

impl Data {
    fn a_mul(&self, x: &[f64]) -> Vec<f64> {
        self.rows.iter().map(|r| r.iter().map(|&(j, v)| v * x[j]).sum()).collect()
    }

    fn at_mul(&self, y: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.nvar];
        for (r, yi) in self.rows.iter().zip(y) {
            if *yi == 0.0 {
                continue;
            }
            for &(j, v) in r {
                out[j] += v * yi;
            }
        }
        out
    }
}

#[derive(Clone)]
struct PsdScale {
    r: Vec<f64>,
    rinv: Vec<f64>,
    lam: Vec<f64>,
}

#[derive(Clone)]
struct State {
    psd: Vec<PsdScale>,
    lp_r: Vec<f64>,
    lp_lam: Vec<f64>,
    xf: Vec<f64>,
    y: Vec<f64>,
    tau: f64,
    kappa: f64,
}

impl State {
    fn x(&self, d: &Data) -> Vec<f64> {
        let mut x = vec![0.0; d.nvar];
        for (blk, sc) in d.psd.iter().zip(&self.psd) {
            let n = blk.n;
            let mut lr = sc.r.clone();
            for i in 0..n {
                for j in 0..n {
                    lr[i * n + j] *= sc.lam[j];
                }
            }
            let xm = symmetrize(matmul(&lr, &transpose(&sc.r, n), n), n);
            svec(&xm, n, &mut x[blk.off..blk.off + n * (n + 1) / 2]);
        }
        for (k, &j) in d.lp.iter().enumerate() {
            x[j] = self.lp_r[k] * self.lp_r[k] * self.lp_lam[k];
        }
        for (k, &j) in d.free.iter().enumerate() {
            x[j] = self.xf[k];
        }
        x
    }

    fn s(&self, d: &Data) -> Vec<f64> {
        let mut s = vec![0.0; d.nvar];
        for (blk, sc) in d.psd.iter().zip(&self.psd) {
            let n = blk.n;
            let sm = congruence_t(&sc.rinv, &diag(&sc.lam), n);
            svec(&sm, n, &mut s[blk.off..blk.off + n * (n + 1) / 2]);
        }
        for (k, &j) in d.lp.iter().enumerate() {
            s[j] = self.lp_lam[k] / (self.lp_r[k] * self.lp_r[k]);
        }
        s
    }

    fn mu(&self, d: &Data) -> f64 {
        let mut xs: f64 = self.tau * self.kappa;
        for sc in &self.psd {
            xs += sc.lam.iter().map(|l| l * l).sum::<f64>();
        }
        xs += self.lp_lam.iter().map(|l| l * l).sum::<f64>();
        xs / (d.nu + 1.0)
    }
}

fn diag(v: &[f64]) -> Vec<f64> {
    let n = v.len();
    let mut m = vec![0.0; n * n];
    for i in 0..n {
        m[i * n + i] = v[i];
    }
    m
}

/// Per-iteration quantities shared by the predictor and corrector.
struct Iter {
    rtcr: Vec<Vec<f64>>,
    lp_g: Vec<f64>,
    kkt: Ldl,
    kkt0: Vec<f64>,
    u: Vec<f64>,
    h_rd: Vec<f64>,
    c_hrd: f64,
    dy2: Vec<f64>,
    dxf2: Vec<f64>,
    cdx2: f64,
    bdy2: f64,
    rp: Vec<f64>,
    rd: Vec<f64>,
    rg: f64,
}

struct Dir {
    dy: Vec<f64>,
    dxf: Vec<f64>,
    dtau: f64,
    dkappa: f64,
    dxt: Vec<Vec<f64>>,
    dst: Vec<Vec<f64>>,
    lp_dx: Vec<f64>,
    lp_ds: Vec<f64>,
}

/// Scaled-frame right-hand side of the complementarity equation.
struct Comp {
    psd: Vec<Vec<f64>>,
    lp: Vec<f64>,
    rtau: f64,
}

pub(crate) fn solve(p: &ConicProblem, tol: f64, max_iter: usize) -> ConicSolution {
    let sign = match p.sense() {
        Sense::Minimize => 1.0,
        Sense::Maximize => -1.0,
    };
    let nvar = p.num_vars();
    let pre = presolve(p.rows(), p.rhs(), nvar);
    let fail = |status: Status| ConicSolution {
        status,
        primal_value: f64::NAN,
        dual_value: f64::NAN,
        x: vec![0.0; nvar],
        y: vec![0.0; p.num_rows()],
        s: vec![0.0; nvar],
        residuals: Residuals { primal: f64::INFINITY, dual: f64::INFINITY, gap: f64::INFINITY },
        iterations: 0,
    };
    if pre.inconsistent {
        return fail(Status::Infeasible);
    }

    let rows: Vec<Vec<(usize, f64)>> = pre
        .keep
        .iter()
        .map(|&i| p.rows()[i].iter().map(|&(j, v)| (j, v * pre.inv_norm[i])).collect())
        .collect();
    let bn: Vec<f64> = pre.keep.iter().map(|&i| p.rhs()[i] * pre.inv_norm[i]).collect();
    let beta_b = norm_inf(&bn).max(1.0);
    let beta_c = norm_inf(p.objective()).max(1.0);
    let b: Vec<f64> = bn.iter().map(|v| v / beta_b).collect();
    let c: Vec<f64> = p.objective().iter().map(|v| sign * v / beta_c).collect();
    let m = rows.len();

    let mut cols: Vec<Vec<(usize, f64)>> = vec![Vec::new(); nvar];
    for (i, r) in rows.iter().enumerate() {
        for &(j, v) in r {
            cols[j].push((i, v));
        }
    }
    let mut psd = Vec::new();
    let mut lp = Vec::new();
    let mut free = Vec::new();
    for (k, cone) in p.cones().iter().enumerate() {
        let off = p.offset(k);
        match *cone {
            Cone::Psd(n) => {
                let mut by_row: std::collections::BTreeMap<usize, Vec<(usize, usize, f64)>> = Default::default();
                let mut cm = vec![0.0; n * n];
                let mut idx = off;
                for pi in 0..n {
                    for qi in pi..n {
                        let w = if pi == qi { 1.0 } else { std::f64::consts::FRAC_1_SQRT_2 };
                        for &(i, v) in &cols[idx] {
                            by_row.entry(i).or_default().push((pi, qi, v * w));
                        }
                        cm[pi * n + qi] = c[idx] * w;
                        cm[qi * n + pi] = c[idx] * w;
                        idx += 1;
                    }
                }
                psd.push(PsdBlock { off, n, rows: by_row.into_iter().collect(), c: cm });
            }
            Cone::Nonneg(n) => lp.extend(off..off + n),
            Cone::Free(n) => {
                for j in off..off + n {
                    if cols[j].is_empty() {
                        if c[j] != 0.0 {
                            return fail(Status::Unbounded);
                        }
                    } else {
                        free.push(j);
                    }
                }
            }
        }
    }
    let lp_cols = lp.iter().map(|&j| cols[j].clone()).collect();
    let free_cols = free.iter().map(|&j| cols[j].clone()).collect();
    let nu = p.cones().iter().map(|k| k.degree()).sum::<usize>() as f64;
    let d = Data { m, nvar, rows, b, c, psd, lp, lp_cols, free, free_cols, nu };

    let mut st = State {
        psd: d
            .psd
            .iter()
            .map(|blk| PsdScale { r: diag(&vec![1.0; blk.n]), rinv: diag(&vec![1.0; blk.n]), lam: vec![1.0; blk.n] })
            .collect(),
        lp_r: vec![1.0; d.lp.len()],
        lp_lam: vec![1.0; d.lp.len()],
        xf: vec![0.0; d.free.len()],
        y: vec![0.0; m],
        tau: 1.0,
        kappa: 1.0,
    };

    let unscale = |st: &State, x: &[f64], s: &[f64]| -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let xu: Vec<f64> = x.iter().map(|v| beta_b * v / st.tau).collect();
        let su: Vec<f64> = s.iter().map(|v| beta_c * v / st.tau).collect();
        let mut yu = vec![0.0; p.num_rows()];
        for (k, &i) in pre.keep.iter().enumerate() {
            yu[i] = sign * beta_c * pre.inv_norm[i] * st.y[k] / st.tau;
        }
        (xu, yu, su)
    };
    let finish = |st: &State, status: Status, iterations: usize, x: &[f64], s: &[f64]| {
        let (xu, yu, su) = unscale(st, x, s);
        let residuals = p.residuals(&xu, &yu, &su);
        ConicSolution {
            status,
            primal_value: dot(p.objective(), &xu),
            dual_value: dot(p.rhs(), &yu),
            x: xu,
            y: yu,
            s: su,
            residuals,
            iterations,
        }
    };

    let mut small_steps = 0;
    let mut collapsed = 0;
    let mut best: Option<(f64, State, usize)> = None;
    for iter in 0..=max_iter {
        let x = st.x(&d);
        let s = st.s(&d);
        if !st.tau.is_finite() || x.iter().any(|v| !v.is_finite()) || st.y.iter().any(|v| !v.is_finite()) {
            return finish(&st, Status::NumericalFailure, iter, &x, &s);
        }
        let (xu, yu, su) = unscale(&st, &x, &s);
        let res = p.residuals(&xu, &yu, &su);
        if res.max() <= tol {
            return finish(&st, Status::Optimal, iter, &x, &s);
        }
        if best.as_ref().map_or(true, |(r, _, _)| res.max() < *r) {
            best = Some((res.max(), st.clone(), iter));
        }
        // On degenerate problems mu collapses while the primal residual
        // stalls just above tol. Fall back to the best iterate seen.
        collapsed = if st.mu(&d) < MU_FLOOR { collapsed + 1 } else { 0 };
        if collapsed >= 3 || iter == max_iter || small_steps >= 5 {
            let (r, bst, bit) = best.take().unwrap();
            let status = if r <= STALL_FACTOR * tol { Status::Optimal } else { Status::NumericalFailure };
            return finish(&bst, status, bit, &bst.x(&d), &bst.s(&d));
        }
        // Infeasibility certificates, on the scaled data.
        let aty = d.at_mul(&st.y);
        let by = dot(&d.b, &st.y);
        let cx = dot(&d.c, &x);
        if st.tau < st.kappa {
            let mut r = 0.0f64;
            for j in 0..d.nvar {
                r = r.max((aty[j] + s[j]).abs());
            }
            if by > 0.0 && r <= tol * by {
                let mut sol = finish(&st, Status::Infeasible, iter, &x, &s);
                sol.primal_value = f64::NAN;
                return sol;
            }
            let ax = d.a_mul(&x);
            if cx < 0.0 && norm_inf(&ax) <= tol * -cx {
                let mut sol = finish(&st, Status::Unbounded, iter, &x, &s);
                sol.dual_value = f64::NAN;
                return sol;
            }
        }

        let Some(it) = prepare(&d, &st, &x, &s, &aty) else {
            return finish(&st, Status::NumericalFailure, iter, &x, &s);
        };
        let mu = st.mu(&d);

        // Predictor.
        let aff = Comp {
            psd: st.psd.iter().map(|sc| diag(&sc.lam.iter().map(|l| -l).collect::<Vec<_>>())).collect(),
            lp: st.lp_lam.iter().map(|l| -l).collect(),
            rtau: -st.tau * st.kappa,
        };
        let da = direction(&d, &st, &it, 1.0, &aff);
        let alpha_a = max_step(&d, &st, &da).min(1.0);
        let sigma = (1.0 - alpha_a).max(0.0).powi(3);

        // Corrector.
        let mut comb = Comp { psd: Vec::with_capacity(d.psd.len()), lp: Vec::with_capacity(d.lp.len()), rtau: 0.0 };
        for (k, (blk, sc)) in d.psd.iter().zip(&st.psd).enumerate() {
            let n = blk.n;
            let xs = matmul(&da.dxt[k], &da.dst[k], n);
            let mut rc = vec![0.0; n * n];
            for i in 0..n {
                for j in 0..n {
                    rc[i * n + j] = -0.5 * (xs[i * n + j] + xs[j * n + i]);
                }
                rc[i * n + i] += sigma * mu - sc.lam[i] * sc.lam[i];
            }
            for i in 0..n {
                for j in 0..n {
                    rc[i * n + j] *= 2.0 / (sc.lam[i] + sc.lam[j]);
                }
            }
            comb.psd.push(rc);
        }
        for k in 0..d.lp.len() {
            let l = st.lp_lam[k];
            comb.lp.push((-l * l - da.lp_dx[k] * da.lp_ds[k] + sigma * mu) / l);
        }
        comb.rtau = -st.tau * st.kappa - da.dtau * da.dkappa + sigma * mu;
        let dc = direction(&d, &st, &it, 1.0 - sigma, &comb);
        let mut alpha = (STEP * max_step(&d, &st, &dc)).min(1.0);

        let mut next = None;
        for _ in 0..30 {
            if let Some(ns) = take_step(&d, &st, &dc, alpha) {
                next = Some(ns);
                break;
            }
            alpha *= 0.7;
        }
        let Some(ns) = next else {
            return finish(&st, Status::NumericalFailure, iter, &x, &s);
        };
        small_steps = if alpha < 1e-7 { small_steps + 1 } else { 0 };
        st = ns;
    }
    unreachable!()
}

fn prepare(d: &Data, st: &State, x: &[f64], s: &[f64], aty: &[f64]) -> Option<Iter> {
    let m = d.m;
    let nf = d.free.len();
    let rp: Vec<f64> = d.a_mul(x).iter().zip(&d.b).map(|(ax, b)| ax - b * st.tau).collect();
    let rd: Vec<f64> = (0..d.nvar).map(|j| aty[j] + s[j] - d.c[j] * st.tau).collect();
    let rg = dot(&d.c, x) - dot(&d.b, &st.y) + st.kappa;

    // Schur complement M = A H⁻¹ Aᵀ.
    let mut mm = vec![0.0; m * m];
    let mut g = Vec::with_capacity(d.psd.len());
    let mut rtcr = Vec::with_capacity(d.psd.len());
    for (blk, sc) in d.psd.iter().zip(&st.psd) {
        let n = blk.n;
        let gb = symmetrize(matmul(&sc.r, &transpose(&sc.r, n), n), n);
        schur_psd(blk, &gb, &mut mm, m);
        rtcr.push(congruence_t(&sc.r, &blk.c, n));
        g.push(gb);
    }
    let lp_g: Vec<f64> = st.lp_r.iter().map(|r| r * r).collect();
    for (k, col) in d.lp_cols.iter().enumerate() {
        let w = lp_g[k] * lp_g[k];
        for &(i, vi) in col {
            for &(j, vj) in col {
                mm[i * m + j] += w * vi * vj;
            }
        }
    }

    let kd = m + nf;
    let mut kkt0 = vec![0.0; kd * kd];
    let mut maxd: f64 = 0.0;
    for i in 0..m {
        maxd = maxd.max(mm[i * m + i]);
        kkt0[i * kd..i * kd + m].copy_from_slice(&mm[i * m..(i + 1) * m]);
    }
    for (k, col) in d.free_cols.iter().enumerate() {
        for &(i, v) in col {
            kkt0[i * kd + m + k] = v;
            kkt0[(m + k) * kd + i] = v;
        }
    }
    let delta = 1e-13 * maxd.max(1.0);
    let mut kreg = kkt0.clone();
    for i in 0..kd {
        kreg[i * kd + i] += if i < m { delta } else { -delta };
    }
    let kkt = Ldl::factor(&kreg, kd)?;

    // H⁻¹c and H⁻¹r_d.
    let mut hc = vec![0.0; d.nvar];
    let mut h_rd = vec![0.0; d.nvar];
    let mut c_gcg = 0.0;
    for (k, blk) in d.psd.iter().enumerate() {
        let n = blk.n;
        let len = n * (n + 1) / 2;
        let gcg = congruence(&g[k], &blk.c, n);
        svec(&gcg, n, &mut hc[blk.off..blk.off + len]);
        let rdm = smat(&rd[blk.off..blk.off + len], n);
        let h = congruence(&g[k], &rdm, n);
        svec(&h, n, &mut h_rd[blk.off..blk.off + len]);
    }
    for (k, &j) in d.lp.iter().enumerate() {
        let w = lp_g[k] * lp_g[k];
        hc[j] = w * d.c[j];
        h_rd[j] = w * rd[j];
    }
    for j in 0..d.nvar {
        c_gcg += d.c[j] * hc[j];
    }
    let c_hrd = dot(&d.c, &h_rd);
    let u = d.a_mul(&hc);

    let mut rhs2 = vec![0.0; kd];
    for i in 0..m {
        rhs2[i] = d.b[i] + u[i];
    }
    for (k, &j) in d.free.iter().enumerate() {
        rhs2[m + k] = d.c[j];
    }
    let z2 = refine_solve(&kkt, &kkt0, kd, &rhs2);
    let dy2 = z2[..m].to_vec();
    let dxf2 = z2[m..].to_vec();
    let cf_dxf2: f64 = d.free.iter().zip(&dxf2).map(|(&j, v)| d.c[j] * v).sum();
    let cdx2 = dot(&u, &dy2) - c_gcg + cf_dxf2;
    let bdy2 = dot(&d.b, &dy2);
    Some(Iter { rtcr, lp_g, kkt, kkt0, u, h_rd, c_hrd, dy2, dxf2, cdx2, bdy2, rp, rd, rg })
}

fn refine_solve(f: &Ldl, k0: &[f64], n: usize, rhs: &[f64]) -> Vec<f64> {
    let mut z = f.solve(rhs);
    for _ in 0..2 {
        let mut r = rhs.to_vec();
        for i in 0..n {
            let row = &k0[i * n..(i + 1) * n];
            r[i] -= dot(row, &z);
        }
        let dz = f.solve(&r);
        for (a, b) in z.iter_mut().zip(dz) {
            *a += b;
        }
    }
    z
}

/// Adds `⟨A_i, G A_j G⟩` for the rows touching one PSD block.
fn schur_psd(blk: &PsdBlock, g: &[f64], mm: &mut [f64], m: usize) {
    let n = blk.n;
    let mut t = vec![0.0; n * n];
    for (jj, (j, ent_j)) in blk.rows.iter().enumerate() {
        t.iter_mut().for_each(|v| *v = 0.0);
        if ent_j.len() > n {
            let mut a = vec![0.0; n * n];
            for &(p, q, v) in ent_j {
                a[p * n + q] += v;
                if p != q {
                    a[q * n + p] += v;
                }
            }
            t = congruence(g, &a, n);
        } else {
            for &(p, q, v) in ent_j {
                let gp = &g[p * n..(p + 1) * n];
                let gq = &g[q * n..(q + 1) * n];
                if p == q {
                    for a in 0..n {
                        let s = v * gp[a];
                        if s == 0.0 {
                            continue;
                        }
                        let ta = &mut t[a * n..(a + 1) * n];
                        for (tb, gb) in ta.iter_mut().zip(gp) {
                            *tb += s * gb;
                        }
                    }
                } else {
                    for a in 0..n {
                        let sp = v * gp[a];
                        let sq = v * gq[a];
                        let ta = &mut t[a * n..(a + 1) * n];
                        for b in 0..n {
                            ta[b] += sp * gq[b] + sq * gp[b];
                        }
                    }
                }
            }
        }
        for (i, ent_i) in blk.rows[..=jj].iter() {
            let mut val = 0.0;
            for &(p, q, v) in ent_i {
                val += if p == q { v * t[p * n + p] } else { 2.0 * v * t[p * n + q] };
            }
            mm[i * m + j] += val;
            if i != j {
                mm[j * m + i] += val;
            }
        }
    }
}

fn direction(d: &Data, st: &State, it: &Iter, eta: f64, comp: &Comp) -> Dir {
    let m = d.m;
    let kd = m + d.free.len();
    // R D Rᵀ in packed form, and ⟨RᵀCR, D⟩.
    let mut rdr = vec![0.0; d.nvar];
    let mut c_rdr = 0.0;
    for (k, (blk, sc)) in d.psd.iter().zip(&st.psd).enumerate() {
        let n = blk.n;
        let v = congruence(&sc.r, &comp.psd[k], n);
        svec(&v, n, &mut rdr[blk.off..blk.off + n * (n + 1) / 2]);
        c_rdr += dot(&it.rtcr[k], &comp.psd[k]);
    }
    for (k, &j) in d.lp.iter().enumerate() {
        rdr[j] = it.lp_g[k] * comp.lp[k];
        c_rdr += it.lp_g[k] * d.c[j] * comp.lp[k];
    }
    let ardr = d.a_mul(&rdr);
    let ahrd = d.a_mul(&it.h_rd);
    let mut rhs1 = vec![0.0; kd];
    for i in 0..m {
        rhs1[i] = -eta * it.rp[i] - ardr[i] - eta * ahrd[i];
    }
    for (k, &j) in d.free.iter().enumerate() {
        rhs1[m + k] = -eta * it.rd[j];
    }
    let z1 = refine_solve(&it.kkt, &it.kkt0, kd, &rhs1);
    let (dy1, dxf1) = z1.split_at(m);
    let cf_dxf1: f64 = d.free.iter().zip(dxf1).map(|(&j, v)| d.c[j] * v).sum();
    let cdx1 = c_rdr + dot(&it.u, dy1) + eta * it.c_hrd + cf_dxf1;
    let bdy1 = dot(&d.b, dy1);

    let dtau = (-eta * it.rg - comp.rtau / st.tau - cdx1 + bdy1) / (it.cdx2 - it.bdy2 - st.kappa / st.tau);
    let dkappa = (comp.rtau - st.kappa * dtau) / st.tau;
    let dy: Vec<f64> = dy1.iter().zip(&it.dy2).map(|(a, b)| a + dtau * b).collect();
    let dxf: Vec<f64> = dxf1.iter().zip(&it.dxf2).map(|(a, b)| a + dtau * b).collect();

    // V = Aᵀdy − c dτ + η r_d; ds = −V.
    let mut v = d.at_mul(&dy);
    for j in 0..d.nvar {
        v[j] += -d.c[j] * dtau + eta * it.rd[j];
    }
    let mut dxt = Vec::with_capacity(d.psd.len());
    let mut dst = Vec::with_capacity(d.psd.len());
    for (k, (blk, sc)) in d.psd.iter().zip(&st.psd).enumerate() {
        let n = blk.n;
        let vm = smat(&v[blk.off..blk.off + n * (n + 1) / 2], n);
        let w = congruence_t(&sc.r, &vm, n);
        let dx: Vec<f64> = w.iter().zip(&comp.psd[k]).map(|(a, b)| a + b).collect();
        let ds: Vec<f64> = w.iter().map(|a| -a).collect();
        dxt.push(dx);
        dst.push(ds);
    }
    let mut lp_dx = Vec::with_capacity(d.lp.len());
    let mut lp_ds = Vec::with_capacity(d.lp.len());
    for (k, &j) in d.lp.iter().enumerate() {
        let w = it.lp_g[k] * v[j];
        lp_dx.push(w + comp.lp[k]);
        lp_ds.push(-w);
    }
    Dir { dy, dxf, dtau, dkappa, dxt, dst, lp_dx, lp_ds }
}

/// Largest α with the scaled iterate `λ + α·Δ` still in the cone.
fn max_step(d: &Data, st: &State, dir: &Dir) -> f64 {
    let mut a = f64::INFINITY;
    let mut bound = |lam: &[f64], delta: &[f64]| {
        let n = lam.len();
        let inv: Vec<f64> = lam.iter().map(|l| 1.0 / l.sqrt()).collect();
        let mut b = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                b[i * n + j] = delta[i * n + j] * inv[i] * inv[j];
            }
        }
        let (ev, _) = sym_eig(&b, n);
        if let Some(&e) = ev.first() {
            if e < 0.0 {
                a = a.min(-1.0 / e);
            }
        }
    };
    for (k, sc) in st.psd.iter().enumerate() {
        bound(&sc.lam, &dir.dxt[k]);
        bound(&sc.lam, &dir.dst[k]);
    }
    let _ = d;
    for (k, l) in st.lp_lam.iter().enumerate() {
        for dv in [dir.lp_dx[k], dir.lp_ds[k]] {
            if dv < 0.0 {
                a = a.min(-l / dv);
            }
        }
    }
    if dir.dtau < 0.0 {
        a = a.min(-st.tau / dir.dtau);
    }
    if dir.dkappa < 0.0 {
        a = a.min(-st.kappa / dir.dkappa);
    }
    a
}

fn take_step(d: &Data, st: &State, dir: &Dir, alpha: f64) -> Option<State> {
    let mut psd = Vec::with_capacity(st.psd.len());
    for (k, (blk, sc)) in d.psd.iter().zip(&st.psd).enumerate() {
        let n = blk.n;
        let mut xt: Vec<f64> = dir.dxt[k].iter().map(|v| alpha * v).collect();
        let mut stt: Vec<f64> = dir.dst[k].iter().map(|v| alpha * v).collect();
        for i in 0..n {
            xt[i * n + i] += sc.lam[i];
            stt[i * n + i] += sc.lam[i];
        }
        let l1 = cholesky(&symmetrize(xt, n), n)?;
        let l2 = cholesky(&symmetrize(stt, n), n)?;
        let pm = matmul_tn(&l2, &l1, n);
        let ptp = symmetrize(matmul_tn(&pm, &pm, n), n);
        let (w, v) = sym_eig(&ptp, n);
        if w.iter().any(|x| !(*x > 0.0)) {
            return None;
        }
        let lam: Vec<f64> = w.iter().map(|x| x.sqrt()).collect();
        // U = P V Λ⁻¹
        let mut u = matmul(&pm, &v, n);
        for i in 0..n {
            for j in 0..n {
                u[i * n + j] /= lam[j];
            }
        }
        // r = L1 V Λ^{-1/2}, r⁻¹ = Λ^{-1/2} Uᵀ L2ᵀ
        let mut r = matmul(&l1, &v, n);
        for i in 0..n {
            for j in 0..n {
                r[i * n + j] /= lam[j].sqrt();
            }
        }
        let mut rinv = matmul(&transpose(&u, n), &transpose(&l2, n), n);
        for i in 0..n {
            let f = 1.0 / lam[i].sqrt();
            for j in 0..n {
                rinv[i * n + j] *= f;
            }
        }
        psd.push(PsdScale { r: matmul(&sc.r, &r, n), rinv: matmul(&rinv, &sc.rinv, n), lam });
    }
    let mut lp_r = st.lp_r.clone();
    let mut lp_lam = st.lp_lam.clone();
    for k in 0..lp_r.len() {
        let xt = st.lp_lam[k] + alpha * dir.lp_dx[k];
        let stt = st.lp_lam[k] + alpha * dir.lp_ds[k];
        if !(xt > 0.0 && stt > 0.0) {
            return None;
        }
        lp_lam[k] = (xt * stt).sqrt();
        lp_r[k] *= (xt / stt).sqrt().sqrt();
    }
    let tau = st.tau + alpha * dir.dtau;
    let kappa = st.kappa + alpha * dir.dkappa;
    if !(tau > 0.0 && kappa > 0.0) {
        return None;
    }
    Some(State {
        psd,
        lp_r,
        lp_lam,
        xf: st.xf.iter().zip(&dir.dxf).map(|(a, b)| a + alpha * b).collect(),
        y: st.y.iter().zip(&dir.dy).map(|(a, b)| a + alpha * b).collect(),
        tau,
        kappa,
    })
}
